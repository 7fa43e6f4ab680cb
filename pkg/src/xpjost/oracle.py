"""Brute-force check: the interacting kernel discretized in q and diagonalized.

On the midpoint grid q_j = (j + 1/2) h, h = L/n, the q-space kernel is

    M_jk = (i h / 2) [sign(q_j - q_k) + a(q_j) b(q_k) - b(q_j) a(q_k)],

a Hermitian matrix with purely imaginary entries (b = 1 for M1).  Its
eigenvalues mu are inverse energies, E = 1/mu.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import jost, kernels
from .errors import ConvergenceError, DomainError
from .jost import ModelSpec


@dataclass(frozen=True)
class HermitianKernel:
    n: int
    L: float
    h: float
    q: np.ndarray
    entries: np.ndarray


@dataclass(frozen=True)
class CrossCheck:
    n: int
    energies: np.ndarray
    residuals: np.ndarray

    @property
    def max_residual(self):
        return float(np.max(self.residuals)) if len(self.residuals) else 0.0


def _values(p, q):
    return np.asarray(p.eval_q(q), dtype=float) * np.ones_like(q)


def build_kernel(m: ModelSpec, L, n) -> HermitianKernel:
    """Midpoint-rule discretization of the kernel on [0, L]."""
    if n < 2:
        raise DomainError("need n >= 2")
    if not math.isfinite(L) or L <= 0:
        raise DomainError("L must be finite and positive")
    h = L / n
    q = (np.arange(n) + 0.5) * h
    av = _values(m.a, q)
    bv = _values(m.b, q)
    j = np.arange(n)
    sgn = np.sign(j[:, None] - j[None, :]).astype(float)
    K = sgn + np.outer(av, bv) - np.outer(bv, av)
    M = (0.5j * h) * K
    return HermitianKernel(n, float(L), h, q, M)


def eigen(k: HermitianKernel, tol=1e-12, max_sweeps=60):
    """Eigenvalues (ascending) and eigenvector columns via Jacobi rotations."""
    w, V, sweeps = kernels.jacobi_hermitian(k.entries, tol, max_sweeps)
    if sweeps < 0:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    order = np.argsort(w)
    return w[order], V[:, order]


def energies(mu):
    """E = 1/mu."""
    return 1.0 / np.asarray(mu)


def lowest_levels(mu, k_levels, V=None):
    """Indices of the k_levels smallest |E| (largest |mu|)."""
    idx = np.argsort(-np.abs(mu))[:k_levels]
    return idx


def cross_check(m: ModelSpec, L, n, k_levels=10, tol=1e-12) -> CrossCheck:
    """|F(E) + F(-E) e^{iEL}| at the k_levels lowest matrix energies."""
    k = build_kernel(m, L, n)
    mu, _ = eigen(k, tol)
    idx = lowest_levels(mu, k_levels)
    E = np.sort(energies(mu[idx]))
    res = np.abs(jost.quantization(m.with_L(L), E))
    return CrossCheck(n, E, res)


def convergence_table(m: ModelSpec, L, ns=(64, 128, 256), k_levels=6):
    """(n, max residual, ratio to the previous n) for successive grids."""
    rows, prev = [], None
    for n in ns:
        r = cross_check(m, L, n, k_levels).max_residual
        rows.append((n, r, prev / r if prev is not None and r > 0 else float("nan")))
        prev = r
    return rows


def localization_diagnostic(eigvec, k: HermitianKernel, frac=0.25):
    """Fraction of sum |phi~_j|^2 carried by the last ``frac`` of the grid."""
    v = np.asarray(eigvec)
    tot = float(np.sum(np.abs(v) ** 2))
    if tot == 0.0:
        raise DomainError("zero vector")
    start = int(round((1 - frac) * len(v)))
    return float(np.sum(np.abs(v[start:]) ** 2) / tot)
