"""Pure numpy implementations of the hot training kernels.

These mirror the compiled extension (greenspoof._fast) operation for
operation so the two backends produce bit-identical results. Any arithmetic
change here must be made in _fast.pyx as well, and vice versa.
"""

from __future__ import annotations

import numpy as np


def smo_solve(K: np.ndarray, y: np.ndarray, C: float, tol: float,
              max_iter: int) -> tuple[np.ndarray, np.ndarray, int, bool]:
    """Sequential minimal optimization over a dense kernel matrix.

    Solves the soft-margin SVM dual by repeatedly updating the maximally
    violating pair. `y` holds +1/-1 targets; `F[t]` caches the margin error
    sum_s alpha_s y_s K[s, t] - y[t], so alpha = 0 gives F = -y.

    Returns (alpha, F, iterations, converged); converged means the duality
    gap estimate F[j] - F[i] fell to `tol` or no updatable pair remained.
    """
    n = y.shape[0]
    alpha = np.zeros(n, dtype=np.float64)
    F = -y
    iters = 0
    converged = False
    while True:
        up = ((y > 0.0) & (alpha < C)) | ((y < 0.0) & (alpha > 0.0))
        low = ((y > 0.0) & (alpha > 0.0)) | ((y < 0.0) & (alpha < C))
        if not up.any() or not low.any():
            converged = True
            break
        i = int(np.argmin(np.where(up, F, np.inf)))
        j = int(np.argmax(np.where(low, F, -np.inf)))
        if F[j] - F[i] <= tol:
            converged = True
            break
        if iters >= max_iter:
            break

        Fi = float(F[i])
        Fj = float(F[j])
        yi = float(y[i])
        yj = float(y[j])
        ai_old = float(alpha[i])
        aj_old = float(alpha[j])
        Kii = float(K[i, i])
        Kjj = float(K[j, j])
        Kij = float(K[i, j])
        eta = Kii + Kjj - 2.0 * Kij
        if eta < 1e-12:
            eta = 1e-12
        aj = aj_old + yj * (Fi - Fj) / eta
        # When the step clips, assign the partner variable its exact bound
        # value. Rounding the generic update instead can leave an alpha one
        # ulp away from a bound, where it keeps being selected but has no
        # representable room to move.
        if yi == yj:
            total = ai_old + aj_old
            lo = total - C
            if lo < 0.0:
                lo = 0.0
            hi = total
            if hi > C:
                hi = C
            if aj >= hi:
                aj = hi
                ai = total - C if hi == C else 0.0
            elif aj <= lo:
                aj = lo
                ai = C if lo > 0.0 else total
            else:
                ai = total - aj
        else:
            diff = aj_old - ai_old
            lo = diff
            if lo < 0.0:
                lo = 0.0
            hi = C + diff
            if hi > C:
                hi = C
            if aj >= hi:
                aj = hi
                ai = C - diff if hi == C else C
            elif aj <= lo:
                aj = lo
                ai = 0.0 if lo > 0.0 else -diff
            else:
                ai = aj - diff
        if aj == aj_old:
            # The most violating pair cannot move: numerical stall.
            break
        alpha[i] = ai
        alpha[j] = aj
        d1 = yi * (ai - ai_old)
        d2 = yj * (aj - aj_old)
        F += d1 * K[i] + d2 * K[j]
        iters += 1
    return alpha, F, iters, converged


def tree_best_split(vals: np.ndarray, labs: np.ndarray, criterion: int,
                    log2_table: np.ndarray) -> tuple[int, int, float]:
    """Find the lowest-impurity boundary over per-column-sorted node data.

    `vals` is (m, d) with every column independently sorted ascending and
    `labs` is the uint8 0/1 label matrix permuted by the same per-column
    order. A boundary t splits rows [0..t] | [t+1..m-1] and is valid only
    where vals[t, f] < vals[t+1, f]. criterion 0 = gini, 1 = entropy (which
    reads the caller-supplied log2 table so both backends share one table).

    Ties resolve to the lowest feature index, then the lowest boundary.
    Returns (feature, boundary, score), feature -1 when nothing is valid.
    """
    m, d = vals.shape
    if criterion == 1 and log2_table.shape[0] < m + 1:
        raise ValueError("log2 table shorter than node size")
    mf = float(m)
    best_f = -1
    best_t = -1
    best = np.inf
    nl = np.arange(1, m, dtype=np.int64)
    nr = m - nl
    for f in range(d):
        v = vals[:, f]
        valid = v[:-1] < v[1:]
        if not valid.any():
            continue
        pos = np.cumsum(labs[:, f], dtype=np.int64)
        P = int(pos[-1])
        pl = pos[:-1]
        pr = P - pl
        if criterion == 0:
            q1 = pl / nl
            q0 = (nl - pl) / nl
            hl = (1.0 - q1 * q1) - q0 * q0
            q1 = pr / nr
            q0 = (nr - pr) / nr
            hr = (1.0 - q1 * q1) - q0 * q0
        else:
            ql = nl - pl
            hl = log2_table[nl] - (pl * log2_table[pl] + ql * log2_table[ql]) / nl
            qr = nr - pr
            hr = log2_table[nr] - (pr * log2_table[pr] + qr * log2_table[qr]) / nr
        score = (nl * hl + nr * hr) / mf
        score = np.where(valid, score, np.inf)
        t = int(np.argmin(score))
        s = float(score[t])
        if s < best:
            best = s
            best_f = f
            best_t = t
    return best_f, best_t, best
