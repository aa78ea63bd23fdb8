# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in greenspoof._kernels.numpy_backend.

The arithmetic here is kept operation-for-operation identical to the numpy
backend (and the build turns off floating-point contraction), so the two
produce bit-identical results. Change both together or not at all.
"""

import numpy as np

from libc.math cimport INFINITY


def smo_solve(double[:, ::1] K, double[::1] y, double C, double tol,
              long max_iter):
    """Dense-kernel SMO; see numpy_backend.smo_solve for the contract."""
    cdef Py_ssize_t n = y.shape[0]
    alpha_arr = np.zeros(n, dtype=np.float64)
    F_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] alpha = alpha_arr
    cdef double[::1] F = F_arr
    cdef Py_ssize_t t, i, j
    cdef double fmin, fmax, Fi, Fj, yi, yj, ai_old, aj_old
    cdef double Kii, Kjj, Kij, eta, aj, ai, lo, hi, total, diff, d1, d2, u, v
    cdef long iters = 0
    cdef bint converged = False

    for t in range(n):
        F[t] = -y[t]

    while True:
        i = -1
        j = -1
        fmin = 0.0
        fmax = 0.0
        for t in range(n):
            if (y[t] > 0.0 and alpha[t] < C) or (y[t] < 0.0 and alpha[t] > 0.0):
                if i < 0 or F[t] < fmin:
                    fmin = F[t]
                    i = t
            if (y[t] > 0.0 and alpha[t] > 0.0) or (y[t] < 0.0 and alpha[t] < C):
                if j < 0 or F[t] > fmax:
                    fmax = F[t]
                    j = t
        if i < 0 or j < 0:
            converged = True
            break
        if F[j] - F[i] <= tol:
            converged = True
            break
        if iters >= max_iter:
            break

        Fi = F[i]
        Fj = F[j]
        yi = y[i]
        yj = y[j]
        ai_old = alpha[i]
        aj_old = alpha[j]
        Kii = K[i, i]
        Kjj = K[j, j]
        Kij = K[i, j]
        eta = Kii + Kjj - 2.0 * Kij
        if eta < 1e-12:
            eta = 1e-12
        aj = aj_old + yj * (Fi - Fj) / eta
        # Clipped steps assign the partner its exact bound value, matching
        # numpy_backend (see the comment there about ulp-from-bound alphas).
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
        for t in range(n):
            u = d1 * K[i, t]
            v = d2 * K[j, t]
            F[t] = F[t] + (u + v)
        iters += 1
    return alpha_arr, F_arr, int(iters), bool(converged)


def tree_best_split(double[:, ::1] vals, unsigned char[:, ::1] labs,
                    int criterion, double[::1] log2_table):
    """Best split over per-column-sorted node data; see numpy_backend."""
    cdef Py_ssize_t m = vals.shape[0]
    cdef Py_ssize_t d = vals.shape[1]
    cdef Py_ssize_t f, t
    cdef Py_ssize_t best_f = -1, best_t = -1
    cdef long nl, nr, pl, pr, ql, qr, pos, P
    cdef double best = INFINITY
    cdef double mf, q1, q0, hl, hr, score

    if criterion == 1 and log2_table.shape[0] < m + 1:
        raise ValueError("log2 table shorter than node size")
    mf = <double> m

    for f in range(d):
        P = 0
        for t in range(m):
            P += labs[t, f]
        pos = 0
        for t in range(m - 1):
            pos += labs[t, f]
            if not (vals[t, f] < vals[t + 1, f]):
                continue
            nl = t + 1
            nr = m - nl
            pl = pos
            pr = P - pos
            if criterion == 0:
                q1 = (<double> pl) / (<double> nl)
                q0 = (<double> (nl - pl)) / (<double> nl)
                hl = (1.0 - q1 * q1) - q0 * q0
                q1 = (<double> pr) / (<double> nr)
                q0 = (<double> (nr - pr)) / (<double> nr)
                hr = (1.0 - q1 * q1) - q0 * q0
            else:
                ql = nl - pl
                hl = log2_table[nl] - ((<double> pl) * log2_table[pl]
                                       + (<double> ql) * log2_table[ql]) / (<double> nl)
                qr = nr - pr
                hr = log2_table[nr] - ((<double> pr) * log2_table[pr]
                                       + (<double> qr) * log2_table[qr]) / (<double> nr)
            score = ((<double> nl) * hl + (<double> nr) * hr) / mf
            if score < best:
                best = score
                best_f = f
                best_t = t
    return int(best_f), int(best_t), float(best)
