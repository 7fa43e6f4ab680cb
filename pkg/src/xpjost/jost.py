"""R and S transforms, Jost functions, amplitudes, wavefunctions and norms.

For a cutoff L (possibly infinite)

    R_f(E)     = (iE/2) int_0^L f(q) e^{iEq} dq
    S_{f,g}(E) = (iE/2) int_0^L f g dq
                 - (E^2/2) int_0^L dq f(q) e^{iEq} int_0^q dq' g(q') e^{-iEq'}

Dispatch:

* truncated exponentials (Step, ExpSum, ConstantOne): closed forms, bilinear
  over the terms c e^{-mu q} 1[q < Q];
* finite effective range (finite L or compact support): nested composite
  Simpson on a breakpoint-aware q-grid, refined until converged;
* infinite L with an oscillatory family at real E: the spectral (Hilbert)
  representation of S from :mod:`xpjost.hilbert`, with the transforms
  sampled once per potential and window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from . import hilbert, potentials as pot
from .errors import (CollinearityError, ConfigError, DomainError,
                     NegativeNormError, PoleError, QuadratureError)
from .potentials import INF, exp_integral

QUAD_TOL = 1e-10
QUAD_MAX_NODES = 1 << 21


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    a: object
    b: object = pot.ConstantOne()
    L: float = INF

    def __post_init__(self):
        if self.kind not in ("M1", "M2"):
            raise DomainError("kind must be 'M1' or 'M2'")
        if self.kind == "M1" and not isinstance(self.b, pot.ConstantOne):
            object.__setattr__(self, "b", pot.ConstantOne())
        if not (self.L > 0):
            raise DomainError("L must be positive")
        if math.isinf(self.L):
            pots = [self.a] if self.kind == "M1" else [self.a, self.b]
            for p in pots:
                if isinstance(p, pot.ConstantOne):
                    raise DomainError("infinite L needs decaying potentials")

    def with_L(self, L):
        return ModelSpec(self.kind, self.a, self.b, L)


@dataclass(frozen=True)
class JostValue:
    E: complex
    F: complex
    F_neg: complex
    f1: Optional[complex] = None


@dataclass(frozen=True)
class AmplitudeVector:
    A: complex
    B: complex
    C_inf: complex

    def as_array(self):
        return np.array([self.A, self.B, self.C_inf], dtype=complex)

    def scaled(self, k):
        return AmplitudeVector(k * self.A, k * self.B, k * self.C_inf)


# ---------------------------------------------------------------------------
# closed forms

def _terms(p, L, shift=0.0):
    return [(c, mu + shift, min(edge, L)) for c, mu, edge in p.exp_terms()]


def _J(kappa, a, b):
    """exp_integral, continued meromorphically in kappa when b = inf."""
    if math.isinf(b):
        kappa = np.asarray(kappa, dtype=complex)
        if np.any(kappa == 0):
            raise PoleError("pole of the continued transform")
        return np.exp(-kappa * a) / kappa
    return exp_integral(kappa, a, b)


def _R_closed(tf, E):
    out = np.zeros(E.shape, dtype=complex)
    for c, mu, Q in tf:
        out = out + c * _J(mu - 1j * E, 0.0, Q)
    return 0.5j * E * out


def _divdiff(k1, k2, m):
    """int_0^m e^{-k1 q} (1 - e^{-k2 q}) / k2 dq, stable for k2 -> 0."""
    k1 = np.asarray(k1, dtype=complex)
    k2 = np.asarray(k2, dtype=complex)
    if math.isinf(m):
        return 1.0 / (k1 * (k1 + k2))
    out = np.empty(k1.shape, dtype=complex)
    small = np.abs(k2) * m < 0.5
    big = ~small
    if np.any(big):
        out[big] = (_J(k1[big], 0.0, m) - _J(k1[big] + k2[big], 0.0, m)) / k2[big]
    if np.any(small):
        for idx in zip(*np.nonzero(small)):
            a, b = complex(k1[idx]), complex(k2[idx])
            npan = int(abs(a) * m / 2.0) + 1
            br = np.linspace(0.0, m, npan + 1)
            out[idx] = pot._panel_integral(
                lambda q: np.exp(-a * q) * q * pot._cexpm1_over(-b * q), br)
    return out


def _S_closed(tf, tg, E):
    out = np.zeros(E.shape, dtype=complex)
    for c1, m1, Q1 in tf:
        for c2, m2, Q2 in tg:
            m = min(Q1, Q2)
            k1 = m1 - 1j * E
            k2 = m2 + 1j * E
            term = 0.5j * E * _J(m1 + m2 + 0 * E, 0.0, m)
            inner = _divdiff(k1, k2, m)
            if Q1 > Q2:
                inner = inner + _J(k1, Q2, Q1) * _J(k2, 0.0, Q2)
            term = term - 0.5 * E * E * inner
            out = out + c1 * c2 * term
    return np.where(E == 0, 0.0, out)


# ---------------------------------------------------------------------------
# quadrature fallback

def _breakpoints(p, Q):
    """Points in (0, Q) where p is not smooth."""
    if isinstance(p, (pot.SawtoothZeta, pot.DirichletSaw)):
        kmax = math.floor(math.exp(min(Q, 40.0)))
        if kmax - 1 > QUAD_MAX_NODES // 4:
            raise QuadratureError("too many jumps for the quadrature grid")
        return np.log(np.arange(2, kmax + 1, dtype=float))
    if isinstance(p, pot.Sampled):
        return p.grid.nodes[1:-1]
    if p.exp_terms() is not None:
        return np.array([e for _, _, e in p.exp_terms() if e < Q])
    return np.empty(0)


class _QGrid:
    """Piecewise-uniform grid whose Simpson triples never straddle a breakpoint."""

    def __init__(self, breaks, Q, h):
        b = np.unique(np.concatenate([[0.0, Q], breaks[(breaks > 0) & (breaks < Q)]]))
        seg = np.diff(b)
        m = np.maximum(2 * np.ceil(seg / (2 * h)).astype(int), 2)
        if m.sum() + 1 > QUAD_MAX_NODES:
            raise QuadratureError("quadrature grid budget exceeded")
        nodes = [np.linspace(b[i], b[i + 1], m[i] + 1)[:-1] for i in range(len(seg))]
        self.q = np.concatenate(nodes + [[Q]])
        # triple starts and spacings
        starts = np.concatenate([[0], np.cumsum(m)[:-1]])
        self.t0 = np.concatenate([np.arange(s, s + mm, 2) for s, mm in zip(starts, m)])
        self.th = np.concatenate([np.full(mm // 2, sg / mm) for sg, mm in zip(seg, m)])
        # integrating a left-continuous step right at its edge: use left limits there
        self.n = len(self.q)

    def integral(self, v):
        """Simpson integral of samples along the last axis."""
        i = self.t0
        return np.sum(self.th / 3.0 * (v[..., i] + 4 * v[..., i + 1] + v[..., i + 2]), axis=-1)

    def cumulative(self, v):
        """Cumulative integral from 0 at every node (last axis)."""
        i = self.t0
        full = self.th / 3.0 * (v[..., i] + 4 * v[..., i + 1] + v[..., i + 2])
        half = self.th / 12.0 * (5 * v[..., i] + 8 * v[..., i + 1] - v[..., i + 2])
        csum = np.cumsum(full, axis=-1)
        start = csum - full
        out = np.empty(v.shape, dtype=np.result_type(v, complex))
        out[..., 0] = 0.0
        out[..., i + 1] = start + half
        out[..., i + 2] = csum
        return out


def _samples(p, q, left):
    """Values on the grid; at nodes that are breakpoints use one-sided limits.

    ``left`` marks nodes that end a segment (value taken just before them).
    """
    v = np.asarray(p.eval_q(q), dtype=float)
    return v


def _seg_values(p, grid):
    # evaluate with a tiny inward nudge at segment ends so that each Simpson
    # triple sees the smooth branch of p on its own segment
    q = grid.q
    eps = 1e-13 * max(1.0, q[-1])
    i = grid.t0
    lo = p.eval_q(q[i] + eps)
    mid = p.eval_q(q[i + 1])
    hi = p.eval_q(q[i + 2] - eps)
    return lo, mid, hi


def _quad_pair(f, g, E, Q, fmul=None, gmul=None, h0=None):
    """Nested Simpson evaluation of R_f and S_{f,g} (g may be None)."""
    E = np.asarray(E, dtype=complex)
    breaks = _breakpoints(f, Q)
    if g is not None:
        breaks = np.concatenate([breaks, _breakpoints(g, Q)])
    freq = float(np.max(np.abs(E.real), initial=0.0))
    if isinstance(f, pot.BesselHalf) or isinstance(g, pot.BesselHalf):
        lam = max(p.lam for p in (f, g) if isinstance(p, pot.BesselHalf))
        freq += lam * math.exp(min(Q, 30.0))
    h = h0 or min(0.05, 1.0 / (1.0 + freq))
    prev = None
    while True:
        grid = _QGrid(breaks, Q, h)
        val = _quad_eval(f, g, E, grid, fmul, gmul)
        if prev is not None:
            err = np.max(np.abs(val - prev) / (1.0 + np.abs(val)))
            if err < QUAD_TOL:
                return val
        prev = val
        h *= 0.5
        if 2 * Q / h > QUAD_MAX_NODES:
            raise QuadratureError(f"quadrature did not converge (last change {err:.2e})")


def _triple_vals(p, grid, mul):
    lo, mid, hi = _seg_values(p, grid)
    if mul is not None:
        i = grid.t0
        lo = lo * mul(grid.q[i])
        mid = mid * mul(grid.q[i + 1])
        hi = hi * mul(grid.q[i + 2])
    return lo, mid, hi


def _quad_eval(f, g, E, grid, fmul, gmul):
    i = grid.t0
    q0, q1, q2 = grid.q[i], grid.q[i + 1], grid.q[i + 2]
    fl, fm, fh = _triple_vals(f, grid, fmul)
    out_R = np.empty(E.shape, dtype=complex)
    out_S = np.empty(E.shape, dtype=complex)
    th = grid.th
    if g is not None:
        gl, gm, gh = _triple_vals(g, grid, gmul)
        fg = np.sum(th / 3.0 * (fl * gl + 4 * fm * gm + fh * gh))
    for idx, e in np.ndenumerate(E):
        e0, e1, e2 = np.exp(1j * e * q0), np.exp(1j * e * q1), np.exp(1j * e * q2)
        Rint = np.sum(th / 3.0 * (fl * e0 + 4 * fm * e1 + fh * e2))
        out_R[idx] = 0.5j * e * Rint
        if g is None:
            continue
        # inner cumulative integral of g e^{-iEq}
        G0, G1, G2 = gl / e0, gm / e1, gh / e2
        full = th / 3.0 * (G0 + 4 * G1 + G2)
        half = th / 12.0 * (5 * G0 + 8 * G1 - G2)
        start = np.cumsum(full) - full
        I0, I1, I2 = start, start + half, start + full
        outer = np.sum(th / 3.0 * (fl * e0 * I0 + 4 * fm * e1 * I1 + fh * e2 * I2))
        out_S[idx] = 0.5j * e * fg - 0.5 * e * e * outer
    if g is None:
        return out_R
    return np.stack([out_R, out_S])


def _effective_range(p, L):
    return min(L, p.support)


def _check_quad_halfplane(ps, E, L):
    rate = min(p.decay_rate for p in ps)
    Q = max(_effective_range(p, L) for p in ps)
    if math.isfinite(Q) and not math.isfinite(rate):
        return
    lim = -0.5 * rate
    if np.any(np.asarray(E).imag < lim - 1e-15):
        raise DomainError(f"quadrature path limited to Im E >= {lim}")


# ---------------------------------------------------------------------------
# spectral route (infinite L, oscillatory families, real E)

@lru_cache(maxsize=32)
def _hat_on_mesh(p, d, mesh):
    """Transforms on the full window mesh [-d, d], via conjugation symmetry."""
    win = hilbert.PVWindow(d, mesh)
    yh = win.half_mesh()
    vh = np.asarray(pot.fourier_hat(p, yh))
    full = np.concatenate([np.conj(vh[:0:-1]), vh])
    full.setflags(write=False)
    return full


def _S_spectral(f, g, E, win):
    E = np.asarray(E, dtype=complex)
    if np.any(E.imag != 0):
        raise DomainError("spectral route needs real E (infinite L, oscillatory family)")
    Er = E.real
    y = win.full_mesh()
    fy = _hat_on_mesh(f, win.half_width, win.mesh)
    gy = _hat_on_mesh(g, win.half_width, win.mesh)
    fE = np.asarray(pot.fourier_hat(f, Er))
    gE = fE if f == g else np.asarray(pot.fourier_hat(g, Er))
    return hilbert.s_spectral_sampled(y, fy, gy[::-1], fE, np.conj(gE), Er, win)


def _needs_spectral(ps, L):
    return math.isinf(L) and any(math.isinf(p.support) and p.exp_terms() is None for p in ps)


# ---------------------------------------------------------------------------
# public transforms

def _prep(E):
    Ea = np.asarray(E, dtype=complex)
    return Ea, Ea.ndim == 0


def transform_R(f, E, L=INF):
    """R_f(E) = (iE/2) int_0^L f e^{iEq} dq."""
    Ea, scalar = _prep(E)
    Ea = np.atleast_1d(Ea)
    if pot.is_zero(f):
        out = np.zeros(Ea.shape, dtype=complex)
    elif f.exp_terms() is not None:
        out = _R_closed(_terms(f, L), Ea)
    else:
        Q = _effective_range(f, L)
        if math.isinf(Q):
            out = 0.5j * Ea * pot.hat(f, Ea, INF)
        else:
            _check_quad_halfplane([f], Ea, L)
            out = 0.5j * Ea * pot.hat(f, Ea, Q)
    out = np.where(Ea == 0, 0.0, out)
    return out[0] if scalar else out


def transform_S(f, g, E, L=INF, win: hilbert.PVWindow = hilbert.DEFAULT_WINDOW):
    """S_{f,g}(E) for cutoff L (see module docstring for the dispatch)."""
    Ea, scalar = _prep(E)
    Ea = np.atleast_1d(Ea)
    if pot.is_zero(f) or pot.is_zero(g):
        out = np.zeros(Ea.shape, dtype=complex)
    elif f.exp_terms() is not None and g.exp_terms() is not None:
        out = _S_closed(_terms(f, L), _terms(g, L), Ea)
    elif _needs_spectral([f, g], L):
        out = _S_spectral(f, g, Ea, win)
    else:
        Q = max(_effective_range(f, L), _effective_range(g, L))
        Q = min(Q, L)
        if math.isinf(Q):  # pragma: no cover - excluded by _needs_spectral
            raise DomainError("unbounded quadrature range")
        _check_quad_halfplane([f, g], Ea, L)
        out = _quad_pair(f, g, Ea, Q)[1]
    out = np.where(Ea == 0, 0.0, out)
    return out[0] if scalar else out


def transform_S_weighted(f, g, E, L=INF, weight="g"):
    """S_{f, q g} (weight='g') or S_{q f, g} (weight='f').

    Closed forms use q e^{-mu q} = -d/d eps e^{-(mu + eps) q}, evaluated by a
    five-point central difference in the rate shift eps.  The step follows
    the slowest scale of the weighted potential (its rate, or 1/edge for a
    flat step).
    """
    Ea, scalar = _prep(E)
    Ea = np.atleast_1d(Ea)
    if f.exp_terms() is not None and g.exp_terms() is not None:
        wt = _terms(f if weight == "f" else g, L)
        scale = min((max(mu, 1.0 / Q) for _, mu, Q in wt), default=1.0)
        h = 2e-3 * scale
        vals = []
        for k in (-2, -1, 1, 2):
            s = k * h
            tf = _terms(f, L, s if weight == "f" else 0.0)
            tg = _terms(g, L, s if weight == "g" else 0.0)
            vals.append(_S_closed(tf, tg, Ea))
        deriv = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
        out = -deriv
    else:
        Q = max(_effective_range(f, L), _effective_range(g, L))
        if math.isinf(Q):
            raise DomainError("q-weighted transforms need a finite effective range")
        ident = (lambda q: q)
        out = _quad_pair(f, g, Ea, Q,
                         fmul=ident if weight == "f" else None,
                         gmul=ident if weight == "g" else None)[1]
    out = np.where(Ea == 0, 0.0, out)
    return out[0] if scalar else out


def overlap(f, g, L=INF):
    """int_0^L f g dq."""
    if f.exp_terms() is not None and g.exp_terms() is not None:
        tot = 0.0
        for c1, m1, Q1 in _terms(f, L):
            for c2, m2, Q2 in _terms(g, L):
                tot += c1 * c2 * exp_integral(m1 + m2, 0.0, min(Q1, Q2)).real
        return float(np.real(tot))
    Q = min(max(_effective_range(f, L), _effective_range(g, L)), L)
    if math.isinf(Q):
        raise DomainError("overlap needs a finite effective range")
    grid = _QGrid(np.concatenate([_breakpoints(f, Q), _breakpoints(g, Q)]), Q, 1e-3)
    fl, fm, fh = _seg_values(f, grid)
    gl, gm, gh = _seg_values(g, grid)
    return float(np.sum(grid.th / 3.0 * (fl * gl + 4 * fm * gm + fh * gh)))


# ---------------------------------------------------------------------------
# Jost functions

def jost_F1_values(m: ModelSpec, E):
    """(F1(E), f1(E)) as arrays for the M1 model."""
    Ea = np.atleast_1d(np.asarray(E, dtype=complex))
    R = transform_R(m.a, Ea, m.L)
    S = transform_S(m.a, m.a, Ea, m.L)
    return 1.0 + 2.0 * R - S, 1.0 + R


def jost_F_values(m: ModelSpec, E):
    """F(E) as an array for the M2 model."""
    Ea = np.atleast_1d(np.asarray(E, dtype=complex))
    a, b, L = m.a, m.b, m.L
    Sab = transform_S(a, b, Ea, L)
    Sba = transform_S(b, a, Ea, L)
    Saa = transform_S(a, a, Ea, L)
    Sbb = transform_S(b, b, Ea, L)
    return 1.0 + Sab - Sba + Saa * Sbb - Sab * Sba


def jost_values(m: ModelSpec, E):
    """F (M2) or F1 (M1) as an array, vectorized over E."""
    if m.kind == "M1":
        return jost_F1_values(m, E)[0]
    return jost_F_values(m, E)


def jost_F1(m: ModelSpec, E) -> JostValue:
    """F1 = 1 + 2R_a - S_aa and f1 = 1 + R_a; F_neg evaluated at -E directly."""
    if m.kind != "M1":
        raise DomainError("jost_F1 needs an M1 model")
    F, f1 = jost_F1_values(m, E)
    Fn, _ = jost_F1_values(m, -np.asarray(E, dtype=complex))
    if np.ndim(E) == 0:
        return JostValue(complex(E), complex(F[0]), complex(Fn[0]), complex(f1[0]))
    return JostValue(np.asarray(E, dtype=complex), F, Fn, f1)


def jost_F(m: ModelSpec, E) -> JostValue:
    """F = 1 + S_ab - S_ba + S_aa S_bb - S_ab S_ba; F_neg = F(-E)."""
    if m.kind != "M2":
        raise DomainError("jost_F needs an M2 model")
    F = jost_F_values(m, E)
    Fn = jost_F_values(m, -np.asarray(E, dtype=complex))
    if np.ndim(E) == 0:
        return JostValue(complex(E), complex(F[0]), complex(Fn[0]))
    return JostValue(np.asarray(E, dtype=complex), F, Fn)


def quantization(m: ModelSpec, E, L=None):
    """D(E) = F(E) + F(-E) e^{iEL}; real roots are the finite-L levels."""
    L = m.L if L is None else L
    mm = m.with_L(L)
    Ea = np.asarray(E, dtype=complex)
    return jost_values(mm, Ea) + jost_values(mm, -Ea) * np.exp(1j * Ea * L)


# ---------------------------------------------------------------------------
# amplitudes and wavefunctions

def _rows(m: ModelSpec, E, L):
    E = complex(E)
    ph = np.exp(1j * E * L)
    a, b = m.a, m.b
    Ra = complex(transform_R(a, E, L))
    Saa = complex(transform_S(a, a, E, L))
    if m.kind == "M1":
        v1 = np.array([1 + 2 * Ra, -Saa, ph * Ra])
        v2 = np.array([-1.0, 1.0, -ph])
        Rna = complex(transform_R(a, -E, L))
        v3 = np.array([2.0, 2 * Rna, ph + 1])
        return v1, v2, v3
    Rb = complex(transform_R(b, E, L))
    Sab = complex(transform_S(a, b, E, L))
    Sba = complex(transform_S(b, a, E, L))
    Sbb = complex(transform_S(b, b, E, L))
    Rna = complex(transform_R(a, -E, L))
    Rnb = complex(transform_R(b, -E, L))
    v1 = np.array([1 + Sab, -Saa, ph * Ra])
    v2 = np.array([Sbb, 1 - Sba, ph * Rb])
    v3 = np.array([-2 * Rnb, 2 * Rna, ph + 1])
    return v1, v2, v3


def system_matrix(m: ModelSpec, E, L):
    """The 3x3 matrix S(E) acting on (A, B, C_inf)."""
    return np.vstack(_rows(m, E, L))


def amplitudes(m: ModelSpec, E, L=None) -> AmplitudeVector:
    """w = v1 x v2 for the first two rows of the amplitude system.

    For infinite L the e^{iEL} column drops out; the returned vector is
    (S_aa, 1 + S_ab, F) for M2 (null vector of the first row, localized
    when F(E) = 0) and (S_aa, 1 + 2R_a, F1) for M1.
    """
    L = m.L if L is None else L
    if math.isinf(L):
        E = complex(E)
        Saa = complex(transform_S(m.a, m.a, E, L))
        if m.kind == "M1":
            first = 1 + 2 * complex(transform_R(m.a, E, L))
        else:
            first = 1 + complex(transform_S(m.a, m.b, E, L))
        return AmplitudeVector(Saa, first, complex(jost_values(m, E)[0]))
    v1, v2, _ = _rows(m, E, L)
    w = np.cross(v1, v2)
    if np.linalg.norm(w) < 1e-12 * np.linalg.norm(v1) * np.linalg.norm(v2):
        raise CollinearityError("rows v1, v2 are collinear (exceptional case)")
    return AmplitudeVector(complex(w[0]), complex(w[1]), complex(w[2]))


def _boundary_constant(m: ModelSpec, E, w: AmplitudeVector, L):
    a1 = float(m.a.eval_q(0.0))
    if math.isinf(L):
        # localized state: the asymptotic amplitude is taken as zero
        b1 = 2.0 if m.kind == "M1" else float(m.b.eval_q(0.0))
        return -b1 * w.A + a1 * w.B
    if m.kind == "M1":
        # C_{1,inf} = -e^{-iEL} (C + 2A - a1 B)
        return -np.exp(1j * E * L) * w.C_inf - 2 * w.A + a1 * w.B
    b1 = float(m.b.eval_q(0.0))
    return -np.exp(1j * E * L) * w.C_inf - b1 * w.A + a1 * w.B


def wavefunction_q(m: ModelSpec, E, w: AmplitudeVector, q, L=None):
    """phi~(q) = e^{iEq} [C + int_0^q e^{-iEq'} (a' B - b' A) dq'].

    The derivative integral is integrated by parts,
    int_0^q e^{-iEq'} f' = e^{-iEq} f(q) - f(0) + iE int_0^q f e^{-iEq'}.
    """
    L = m.L if L is None else L
    E = float(np.real(E))
    q = np.atleast_1d(np.asarray(q, dtype=float))
    C = _boundary_constant(m, E, w, L)

    def part(f):
        if isinstance(f, pot.ConstantOne):
            return np.zeros(q.shape, dtype=complex)
        f0 = float(f.eval_q(0.0))
        terms = f.exp_terms()
        if terms is not None:
            vals = np.zeros(q.shape, dtype=complex)
            for c, mu, edge in terms:
                vals = vals + c * exp_integral(mu + 1j * E, 0.0, np.minimum(q, edge))
        else:
            vals = np.array([pot.hat(f, -E, qq) if qq > 0 else 0.0 for qq in q], dtype=complex)
        return np.exp(-1j * E * q) * f.eval_q(q) - f0 + 1j * E * vals

    inner = part(m.a) * w.B - part(m.b) * w.A
    return np.exp(1j * E * q) * (C + inner)


def wavefunction(m: ModelSpec, E, w: AmplitudeVector, x, L=None):
    """psi(x) = x^{-1/2 + iE} [C + int_1^x dx' x'^{-iE} (a' B - b' A)]."""
    x = np.asarray(x, dtype=float)
    L = m.L if L is None else L
    if np.any(x < 1) or (math.isfinite(L) and np.any(np.log(x) > L * (1 + 1e-12))):
        raise DomainError("x must lie in [1, e^L]")
    phi = wavefunction_q(m, E, w, np.log(x), L)
    out = phi / np.sqrt(x)
    return out[0] if np.ndim(x) == 0 else out


def omega(f, g, E, L=INF):
    """Omega_{f,g}(E) of the localized-state norm."""
    E = complex(E)
    Sg_qf = complex(transform_S_weighted(g, f, E, L, weight="g"))
    St_f_qg = complex(transform_S_weighted(f, g, -E, L, weight="g"))
    Sgf = complex(transform_S(g, f, E, L))
    St_fg = complex(transform_S(f, g, -E, L))
    return -2.0 * (Sg_qf + St_f_qg + 1j / E * (Sgf - St_fg)) - overlap(f, g, L)


def norm_localized(m: ModelSpec, E, w: AmplitudeVector, L=None, tol=1e-8):
    """<psi|psi> of a localized M2 state via the quadratic form in (A, B)."""
    if m.kind != "M2":
        raise DomainError("norm_localized needs an M2 model")
    L = m.L if L is None else L
    E = float(np.real(E))
    a, b = m.a, m.b
    Obb = omega(b, b, E, L)
    Oab = omega(a, b, E, L)
    Oba = omega(b, a, E, L)
    Oaa = omega(a, a, E, L)
    v = np.array([w.A, w.B])
    Mq = np.array([[Obb, -Oab], [-Oba, Oaa]])
    val = np.conj(v) @ Mq @ v
    scale = max(abs(val), np.linalg.norm(v) ** 2 * 1e-300)
    if abs(val.imag) > tol * max(scale, 1.0) or val.real < -tol * max(scale, 1.0):
        raise NegativeNormError(f"norm came out as {val}")
    return float(val.real)


# ---------------------------------------------------------------------------
# JSON

def model_from_dict(d) -> ModelSpec:
    if not isinstance(d, dict):
        raise ConfigError("model config must be a JSON object")
    for key in ("model", "a"):
        if key not in d:
            raise ConfigError(f"model config: missing key '{key}'")
    kind = d["model"]
    if kind not in ("M1", "M2"):
        raise ConfigError("model config: 'model' must be \"M1\" or \"M2\"")
    a = pot.potential_from_dict(d["a"])
    if kind == "M2":
        if "b" not in d:
            raise ConfigError("model config: M2 needs key 'b'")
        b = pot.potential_from_dict(d["b"])
    else:
        b = pot.ConstantOne()
    Lraw = d.get("L", "infinite")
    if Lraw == "infinite":
        L = INF
    else:
        try:
            L = float(Lraw)
        except (TypeError, ValueError) as exc:
            raise ConfigError("model config: 'L' must be a number or \"infinite\"") from exc
        if not L > 0:
            raise ConfigError("model config: 'L' must be positive")
    try:
        return ModelSpec(kind, a, b, L)
    except DomainError as exc:
        raise ConfigError(f"model config: {exc}") from exc


def model_to_dict(m: ModelSpec) -> dict:
    d = {"model": m.kind, "a": pot.potential_to_dict(m.a)}
    if m.kind == "M2":
        d["b"] = pot.potential_to_dict(m.b)
    d["L"] = "infinite" if math.isinf(m.L) else m.L
    return d
