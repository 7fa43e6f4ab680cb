"""Pure numpy versions of the compiled kernels.

Same signatures and return conventions as ``_kernels.pyx``.  The Jacobi
solver here uses a round-robin (tournament) ordering so that n/2 disjoint
rotations are applied per numpy call; the compiled version uses the plain
cyclic-by-row order.  Both reach the same stopping criterion.
"""
import numpy as np


def _tournament(n):
    # round-robin pairings of an even number of indices; n - 1 rounds
    idx = list(range(n))
    rounds = []
    for _ in range(n - 1):
        half = n // 2
        p = np.array(idx[:half])
        q = np.array(idx[half:][::-1])
        lo, hi = np.minimum(p, q), np.maximum(p, q)
        rounds.append((lo, hi))
        idx = [idx[0]] + [idx[-1]] + idx[1:-1]
    return rounds


def jacobi_hermitian(a, tol=1e-12, max_sweeps=60):
    A = np.array(a, dtype=np.complex128, copy=True)
    n0 = A.shape[0]
    fro = np.linalg.norm(A)
    if fro == 0.0:
        return np.zeros(n0), np.eye(n0, dtype=np.complex128), 0
    n = n0 + (n0 % 2)
    if n != n0:
        # pad with an isolated zero row/column
        A = np.pad(A, ((0, 1), (0, 1)))
    V = np.eye(n, dtype=np.complex128)
    thresh = tol * fro / max(n0, 1)
    rounds = _tournament(n)
    used = -1

    mask = ~np.eye(n, dtype=bool)

    def offnorm(M):
        return np.linalg.norm(M[mask])

    for sweep in range(max_sweeps):
        if offnorm(A) < tol * fro:
            used = sweep
            break
        for p, q in rounds:
            b = A[p, q]
            r = np.abs(b)
            act = r > thresh
            if not act.any():
                continue
            p, q, b, r = p[act], q[act], b[act], r[act]
            app = A[p, p].real
            aqq = A[q, q].real
            zeta = (aqq - app) / (2.0 * r)
            t = np.where(zeta < 0.0, -1.0, 1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            em = np.conj(b) / r
            # columns
            xp = A[:, p].copy()
            xq = A[:, q]
            A[:, p] = c * xp - (s * em) * xq
            A[:, q] = s * xp + (c * em) * xq
            # rows
            xp = A[p, :].copy()
            xq = A[q, :]
            ep = np.conj(em)[:, None]
            A[p, :] = c[:, None] * xp - (s[:, None] * ep) * xq
            A[q, :] = s[:, None] * xp + (c[:, None] * ep) * xq
            A[p, p] = app - t * r
            A[q, q] = aqq + t * r
            A[p, q] = 0.0
            A[q, p] = 0.0
            xp = V[:, p].copy()
            xq = V[:, q]
            V[:, p] = c * xp - (s * em) * xq
            V[:, q] = s * xp + (c * em) * xq
    if used < 0 and offnorm(A) < tol * fro:
        used = max_sweeps
    w = np.real(np.diagonal(A)).copy()
    if n != n0:
        # drop the padding eigenpair (the one living on the dummy index)
        j = int(np.argmax(np.abs(V[n0, :])))
        keep = [i for i in range(n) if i != j]
        w = w[keep]
        V = V[:n0][:, keep]
    return w, V, used


def dirichlet_sum(s, logs, coef, chunk=512):
    s = np.ascontiguousarray(s, dtype=np.complex128).ravel()
    logs = np.asarray(logs, dtype=np.float64)
    coef = np.asarray(coef, dtype=np.float64)
    out = np.empty(s.shape[0], dtype=np.complex128)
    for i in range(0, s.shape[0], chunk):
        blk = s[i:i + chunk]
        out[i:i + chunk] = np.exp(-np.outer(blk, logs)) @ coef
    return out
