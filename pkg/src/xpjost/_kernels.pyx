# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.

Two kernels live here:

* ``jacobi_hermitian``: cyclic-by-row Jacobi eigensolver for complex
  Hermitian matrices (used by the discretized-kernel oracle).
* ``dirichlet_sum``: weighted Dirichlet-type sums
  ``out[j] = sum_k coef[k] * exp(-s[j] * logs[k])`` (inner loop of the
  accelerated zeta/L-series evaluations).

``_fallback.py`` holds numpy implementations with identical signatures.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, exp, cos, sin

cnp.import_array()

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double complex conj(double complex)


def jacobi_hermitian(a, double tol=1e-12, int max_sweeps=60):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    A sweep visits every pair (p, q) once in round-robin order: each of
    the n - 1 rounds holds n/2 disjoint pairs, so a round is applied as one
    cache-friendly column pass (row by row) followed by one row pass.

    Parameters
    ----------
    a : (n, n) complex array
        Hermitian input (a copy is rotated).
    tol : float
        Stop when the off-diagonal Frobenius norm drops below
        ``tol * ||a||_F``.
    max_sweeps : int
        Sweep budget.

    Returns
    -------
    w : (n,) float array, unsorted diagonal after convergence
    v : (n, n) complex array of eigenvectors (columns)
    sweeps : int, number of sweeps used (-1 if the budget ran out)
    """
    cdef Py_ssize_t n0 = np.shape(a)[0]
    cdef Py_ssize_t n = n0 + (n0 % 2)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] A = np.zeros((n, n), dtype=np.complex128)
    A[:n0, :n0] = a
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] Vt = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] Am = A
    cdef double complex[:, ::1] Vm = Vt
    cdef Py_ssize_t half = n // 2
    cdef cnp.ndarray[cnp.intp_t, ndim=1] P = np.empty(half, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] Q = np.empty(half, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] ring = np.arange(n, dtype=np.intp)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] C = np.empty(half)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] S = np.empty(half)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ER = np.empty(half)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] EI = np.empty(half)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] TR = np.empty(half)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] ACT = np.empty(half, dtype=np.uint8)
    cdef Py_ssize_t[::1] Pm = P, Qm = Q, Rm = ring
    cdef double[::1] Cm = C, Sm = S, ERm = ER, EIm = EI, TRm = TR
    cdef unsigned char[::1] ACTm = ACT
    cdef Py_ssize_t i, p, q, k, rnd, last
    cdef double fro = 0.0, off, r, zeta, t, c, s, app, aqq, thresh
    cdef double er, ei, pr, pi_, qr, qi, ur, ui
    cdef int sweep, used = -1, nact

    for p in range(n):
        for q in range(n):
            fro += Am[p, q].real * Am[p, q].real + Am[p, q].imag * Am[p, q].imag
    fro = sqrt(fro)
    if fro == 0.0:
        return np.zeros(n0), np.eye(n0, dtype=np.complex128), 0
    thresh = tol * fro / n0

    with nogil:
        for sweep in range(max_sweeps + 1):
            off = 0.0
            for p in range(n):
                for q in range(p + 1, n):
                    off += 2.0 * (Am[p, q].real * Am[p, q].real + Am[p, q].imag * Am[p, q].imag)
            if sqrt(off) < tol * fro:
                used = sweep
                break
            if sweep == max_sweeps:
                break
            for rnd in range(n - 1):
                # pairs of this round
                nact = 0
                for i in range(half):
                    p = Rm[i]
                    q = Rm[n - 1 - i]
                    if p > q:
                        p, q = q, p
                    Pm[i] = p
                    Qm[i] = q
                    r = sqrt(Am[p, q].real * Am[p, q].real + Am[p, q].imag * Am[p, q].imag)
                    if r <= thresh:
                        ACTm[i] = 0
                        continue
                    ACTm[i] = 1
                    nact += 1
                    app = Am[p, p].real
                    aqq = Am[q, q].real
                    zeta = (aqq - app) / (2.0 * r)
                    t = 1.0 / (fabs(zeta) + sqrt(1.0 + zeta * zeta))
                    if zeta < 0.0:
                        t = -t
                    Cm[i] = 1.0 / sqrt(1.0 + t * t)
                    Sm[i] = t * Cm[i]
                    ERm[i] = Am[p, q].real / r
                    EIm[i] = Am[p, q].imag / r
                    TRm[i] = t * r
                if nact > 0:
                    # X = A W : columns p, q of every row (e^{-i alpha} on column q)
                    for k in range(n):
                        for i in range(half):
                            if not ACTm[i]:
                                continue
                            p = Pm[i]
                            q = Qm[i]
                            c = Cm[i]
                            s = Sm[i]
                            er = ERm[i]
                            ei = EIm[i]
                            pr = Am[k, p].real
                            pi_ = Am[k, p].imag
                            qr = Am[k, q].real
                            qi = Am[k, q].imag
                            ur = er * qr + ei * qi
                            ui = er * qi - ei * qr
                            Am[k, p].real = c * pr - s * ur
                            Am[k, p].imag = c * pi_ - s * ui
                            Am[k, q].real = s * pr + c * ur
                            Am[k, q].imag = s * pi_ + c * ui
                    # A' = W^H X : rows p, q (e^{+i alpha} on row q)
                    for i in range(half):
                        if not ACTm[i]:
                            continue
                        p = Pm[i]
                        q = Qm[i]
                        c = Cm[i]
                        s = Sm[i]
                        er = ERm[i]
                        ei = EIm[i]
                        app = Am[p, p].real
                        aqq = Am[q, q].real
                        for k in range(n):
                            pr = Am[p, k].real
                            pi_ = Am[p, k].imag
                            qr = Am[q, k].real
                            qi = Am[q, k].imag
                            ur = er * qr - ei * qi
                            ui = er * qi + ei * qr
                            Am[p, k].real = c * pr - s * ur
                            Am[p, k].imag = c * pi_ - s * ui
                            Am[q, k].real = s * pr + c * ur
                            Am[q, k].imag = s * pi_ + c * ui
                        # Vt rows p, q (same right action as the columns of A)
                        for k in range(n):
                            pr = Vm[p, k].real
                            pi_ = Vm[p, k].imag
                            qr = Vm[q, k].real
                            qi = Vm[q, k].imag
                            ur = er * qr + ei * qi
                            ui = er * qi - ei * qr
                            Vm[p, k].real = c * pr - s * ur
                            Vm[p, k].imag = c * pi_ - s * ui
                            Vm[q, k].real = s * pr + c * ur
                            Vm[q, k].imag = s * pi_ + c * ui
                    # exact 2x2 block values
                    for i in range(half):
                        if not ACTm[i]:
                            continue
                        p = Pm[i]
                        q = Qm[i]
                        Am[p, q] = 0.0
                        Am[q, p] = 0.0
                # rotate the ring, keeping element 0 fixed
                last = Rm[n - 1]
                for i in range(n - 1, 1, -1):
                    Rm[i] = Rm[i - 1]
                Rm[1] = last

    w = np.real(np.diagonal(A)).copy()
    V = np.ascontiguousarray(Vt.T)
    if n != n0:
        # drop the eigenpair living on the padding index
        j = int(np.argmax(np.abs(V[n0, :])))
        keep = [m for m in range(n) if m != j]
        w = w[keep]
        V = np.ascontiguousarray(V[:n0][:, keep])
    return w, V, used


def dirichlet_sum(s, logs, coef):
    """Return ``sum_k coef[k] * exp(-s[j] * logs[k])`` for every ``s[j]``."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] S = np.ascontiguousarray(s, dtype=np.complex128).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lg = np.ascontiguousarray(logs, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cf = np.ascontiguousarray(coef, dtype=np.float64)
    cdef Py_ssize_t m = S.shape[0], nk = lg.shape[0], j, k
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(m, dtype=np.complex128)
    cdef double sr, si, mag, ph, accr, acci
    with nogil:
        for j in range(m):
            sr = S[j].real
            si = S[j].imag
            accr = 0.0
            acci = 0.0
            for k in range(nk):
                mag = cf[k] * exp(-sr * lg[k])
                ph = -si * lg[k]
                accr += mag * cos(ph)
                acci += mag * sin(ph)
            out[j] = accr + 1j * acci
    return out
