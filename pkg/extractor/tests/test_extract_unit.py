"""Manifest parsing, waveform loading, and job validation (no model)."""

import numpy as np
import pytest

from w2v2dump.cli import parse_layers
from w2v2dump.extract import (ExtractionJob, ManifestError, SkipFile,
                              load_waveform, read_manifest)

from conftest import write_wav


class TestReadManifest:
    def test_parses_paths_and_ids(self, tmp_path):
        manifest = tmp_path / "m.txt"
        manifest.write_text("a.wav utt_a\n\n# comment\nb.wav utt_b\n")
        entries = read_manifest(manifest)
        assert [e.utt_id for e in entries] == ["utt_a", "utt_b"]
        assert entries[0].path == tmp_path / "a.wav"

    def test_absolute_paths_kept(self, tmp_path):
        manifest = tmp_path / "m.txt"
        manifest.write_text("/data/x.wav utt_x\n")
        assert str(read_manifest(manifest)[0].path) == "/data/x.wav"

    def test_paths_with_spaces(self, tmp_path):
        manifest = tmp_path / "m.txt"
        manifest.write_text("my clips/a b.wav utt_a\n")
        entry = read_manifest(manifest)[0]
        assert entry.path == tmp_path / "my clips" / "a b.wav"
        assert entry.utt_id == "utt_a"

    def test_duplicate_utt_id_rejected(self, tmp_path):
        manifest = tmp_path / "m.txt"
        manifest.write_text("a.wav utt\nb.wav utt\n")
        with pytest.raises(ManifestError, match="duplicate"):
            read_manifest(manifest)

    def test_missing_column_rejected(self, tmp_path):
        manifest = tmp_path / "m.txt"
        manifest.write_text("only_one_token\n")
        with pytest.raises(ManifestError, match="m.txt:1"):
            read_manifest(manifest)

    def test_empty_manifest_rejected(self, tmp_path):
        manifest = tmp_path / "m.txt"
        manifest.write_text("# nothing here\n")
        with pytest.raises(ManifestError, match="no usable"):
            read_manifest(manifest)


class TestLoadWaveform:
    def test_int16_scaled_to_unit_range(self, tmp_path):
        pcm = np.array([0, 16384, -32768, 32767] * 200, dtype=np.int16)
        path = write_wav(tmp_path / "a.wav", pcm)
        wave = load_waveform(path)
        assert wave.dtype == np.float32
        np.testing.assert_allclose(wave[:4],
                                   [0.0, 0.5, -1.0, 32767 / 32768])

    def test_float32_passthrough(self, tmp_path):
        data = np.linspace(-0.5, 0.5, 800, dtype=np.float32)
        path = write_wav(tmp_path / "f.wav", data)
        wave = load_waveform(path)
        assert wave.tobytes() == data.tobytes()

    def test_wrong_rate_skipped(self, tmp_path):
        path = write_wav(tmp_path / "slow.wav",
                         np.zeros(800, dtype=np.int16), rate=8_000)
        with pytest.raises(SkipFile, match="8000"):
            load_waveform(path)

    def test_stereo_skipped(self, tmp_path):
        path = write_wav(tmp_path / "st.wav",
                         np.zeros((800, 2), dtype=np.int16))
        with pytest.raises(SkipFile, match="mono"):
            load_waveform(path)

    def test_empty_audio_skipped(self, tmp_path):
        path = write_wav(tmp_path / "e.wav", np.zeros(0, dtype=np.int16))
        with pytest.raises(SkipFile, match="empty"):
            load_waveform(path)

    def test_sub_frame_clip_skipped(self, tmp_path):
        path = write_wav(tmp_path / "tiny.wav",
                         np.zeros(399, dtype=np.int16))
        with pytest.raises(SkipFile, match="too short"):
            load_waveform(path)

    def test_unsupported_sample_format_skipped(self, tmp_path):
        path = write_wav(tmp_path / "i32.wav",
                         np.zeros(800, dtype=np.int32))
        with pytest.raises(SkipFile, match="format"):
            load_waveform(path)

    def test_unreadable_file_skipped(self, tmp_path):
        missing = tmp_path / "nope.wav"
        with pytest.raises(SkipFile, match="unreadable"):
            load_waveform(missing)
        garbage = tmp_path / "garbage.wav"
        garbage.write_bytes(b"not a wav at all")
        with pytest.raises(SkipFile, match="unreadable"):
            load_waveform(garbage)


class TestExtractionJob:
    def entry_stub(self):
        return []

    def test_empty_layers_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="layer"):
            ExtractionJob(entries=[], out_dir=tmp_path, layers=())

    def test_out_of_range_layer_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="range"):
            ExtractionJob(entries=[], out_dir=tmp_path, layers=(0, 13))

    def test_duplicate_layers_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="duplicate"):
            ExtractionJob(entries=[], out_dir=tmp_path, layers=(2, 2))


class TestParseLayers:
    def test_ranges_and_singletons(self):
        assert parse_layers("0-3,7,11-12") == (0, 1, 2, 3, 7, 11, 12)

    def test_deduplicates_and_sorts(self):
        assert parse_layers("5,1,5") == (1, 5)

    def test_full_default_span(self):
        assert parse_layers("0-12") == tuple(range(13))

    def test_bad_spec_rejected(self):
        with pytest.raises(ManifestError, match="layer"):
            parse_layers("two")
        with pytest.raises(ManifestError, match="empty"):
            parse_layers(",")
