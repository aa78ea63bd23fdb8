"""GAIE container round-trips, protocol parsing, and dataset assembly."""

import io
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from greenspoof.errors import AssemblyError, FormatError, ProtocolError, UsageError
from greenspoof.store import (GAIE_MAGIC, EmbeddingRecord, Label,
                              ProtocolEntry, assemble, parse_protocol,
                              read_embeddings, write_embeddings)


def _record(utt, layer=3, frames=4, dim=8, label=Label.SPOOF, seed=0):
    rng = np.random.default_rng(seed)
    values = rng.normal(size=(frames, dim)).astype(np.float32)
    return EmbeddingRecord(utt, layer, values, label)


class TestGaieRoundTrip:
    def test_records_round_trip_exactly(self, tmp_path):
        records = [_record(f"U_{i:03d}", frames=i + 1, seed=i) for i in range(5)]
        path = tmp_path / "x.gaie"
        write_embeddings(records, path)
        loaded = read_embeddings(path)
        assert [r.utt_id for r in loaded] == [r.utt_id for r in records]
        for a, b in zip(records, loaded):
            assert b.layer == a.layer and b.label == a.label
            np.testing.assert_array_equal(a.values, b.values)

    def test_empty_file_needs_explicit_shape(self, tmp_path):
        path = tmp_path / "empty.gaie"
        with pytest.raises(UsageError):
            write_embeddings([], path)
        write_embeddings([], path, dim=8, layer=2)
        assert read_embeddings(path) == []

    def test_stream_io(self):
        buf = io.BytesIO()
        write_embeddings([_record("A")], buf)
        buf.seek(0)
        assert read_embeddings(buf)[0].utt_id == "A"

    @settings(max_examples=30, deadline=None)
    @given(frames=st.integers(1, 6), dim=st.integers(1, 12),
           layer=st.integers(0, 12),
           label=st.sampled_from([Label.SPOOF, Label.BONAFIDE, Label.UNKNOWN]),
           seed=st.integers(0, 2**16))
    def test_any_record_round_trips(self, frames, dim, layer, label, seed):
        rec = _record("P_001", layer=layer, frames=frames, dim=dim,
                      label=label, seed=seed)
        buf = io.BytesIO()
        write_embeddings([rec], buf)
        buf.seek(0)
        out = read_embeddings(buf)[0]
        assert (out.layer, out.label) == (layer, label)
        np.testing.assert_array_equal(out.values, rec.values)


class TestGaieValidation:
    def test_bad_magic(self):
        buf = io.BytesIO(b"NOPE" + b"\x00" * 30)
        with pytest.raises(FormatError, match="magic"):
            read_embeddings(buf)

    def test_bad_version(self):
        head = struct.pack("<4sIIHQ", GAIE_MAGIC, 9, 8, 0, 0)
        with pytest.raises(FormatError, match="version"):
            read_embeddings(io.BytesIO(head))

    def test_truncated_payload(self):
        buf = io.BytesIO()
        write_embeddings([_record("A", frames=3)], buf)
        clipped = io.BytesIO(buf.getvalue()[:-5])
        with pytest.raises(FormatError, match="truncated"):
            read_embeddings(clipped)

    def test_trailing_bytes(self):
        buf = io.BytesIO()
        write_embeddings([_record("A")], buf)
        padded = io.BytesIO(buf.getvalue() + b"x")
        with pytest.raises(FormatError, match="trailing"):
            read_embeddings(padded)

    def test_invalid_label_byte(self):
        buf = io.BytesIO()
        write_embeddings([_record("A", frames=1, dim=1)], buf)
        raw = bytearray(buf.getvalue())
        # label byte sits right after the header and the 2+1 byte utt id
        raw[struct.calcsize("<4sIIHQ") + 2 + 1] = 7
        with pytest.raises(FormatError, match="label"):
            read_embeddings(io.BytesIO(bytes(raw)))

    def test_non_finite_rejected_on_write(self):
        bad = EmbeddingRecord("A", 0, np.array([[np.nan]], dtype=np.float32))
        with pytest.raises(UsageError, match="finite"):
            write_embeddings([bad], io.BytesIO())

    def test_mixed_layers_rejected(self):
        with pytest.raises(UsageError, match="layers"):
            write_embeddings([_record("A", layer=1), _record("B", layer=2)],
                             io.BytesIO())


PROTOCOL = """\
LA_0069 LA_D_1047731 - - bonafide
LA_0069 LA_D_1105538 - A01 spoof
LA_0070 LA_D_1125976 - A06 spoof
"""


class TestProtocol:
    def test_parse(self):
        entries = parse_protocol(PROTOCOL)
        assert entries[0] == ProtocolEntry("LA_0069", "LA_D_1047731", None,
                                           Label.BONAFIDE)
        assert entries[1].attack_id == "A01"
        assert entries[1].label is Label.SPOOF
        assert len(entries) == 3

    def test_blank_lines_skipped(self):
        assert len(parse_protocol("\n" + PROTOCOL + "\n\n")) == 3

    @pytest.mark.parametrize("line,fragment", [
        ("A B - - maybe", "unknown key"),
        ("A B - -", "5 fields"),
        ("A B - A01 bonafide", "inconsistent"),
        ("A B - - spoof", "inconsistent"),
    ])
    def test_bad_lines(self, line, fragment):
        with pytest.raises(ProtocolError, match=fragment):
            parse_protocol(PROTOCOL + line + "\n")

    def test_error_carries_line_number(self):
        with pytest.raises(ProtocolError, match="line 4"):
            parse_protocol(PROTOCOL + "A B - - maybe\n")


class TestAssemble:
    def _entries(self, n, label=Label.BONAFIDE):
        return [ProtocolEntry("S", f"U_{i}", None if label is Label.BONAFIDE
                              else "A01", label) for i in range(n)]

    def test_sorted_and_labeled(self):
        records = [_record("U_2"), _record("U_0"), _record("U_1")]
        entries = self._entries(3)
        ds = assemble(records, entries, "train")
        assert ds.utt_ids == ["U_0", "U_1", "U_2"]
        assert ds.is_fully_labeled()
        assert ds.layer == 3

    def test_order_independence(self):
        records = [_record("U_0"), _record("U_1"), _record("U_2")]
        entries = self._entries(3)
        a = assemble(records, entries, "train")
        b = assemble(records[::-1], entries[::-1], "train")
        assert a.utt_ids == b.utt_ids
        assert list(a.labels) == list(b.labels)

    def test_duplicate_records_rejected(self):
        with pytest.raises(AssemblyError, match="duplicate record"):
            assemble([_record("U_0"), _record("U_0")], self._entries(1), "train")

    def test_missing_label_rejected_in_train(self):
        with pytest.raises(AssemblyError, match="without a protocol entry"):
            assemble([_record("U_0"), _record("U_9")], self._entries(1), "train")

    def test_eval_may_allow_unlabeled(self):
        records = [_record("U_0"), _record("U_9")]
        ds = assemble(records, self._entries(1), "eval", allow_unlabeled=True)
        assert ds.items[1].label is Label.UNKNOWN
        with pytest.raises(AssemblyError):
            assemble(records, self._entries(1), "eval")

    def test_unknown_partition(self):
        with pytest.raises(UsageError, match="partition"):
            assemble([_record("U_0")], self._entries(1), "test")
