"""Finite-L levels, bound states, resonances and zero counting."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import hilbert, jost, potentials as pot, specialfn
from .errors import BoundaryZeroError, DomainError, PhaseUnwrapError
from .jost import ModelSpec

ZERO_TOL = 1e-8
BOUNDARY_TOL = 1e-10


@dataclass
class SpectrumReport:
    L: float
    scattering_levels: list = field(default_factory=list)
    bound_states: list = field(default_factory=list)  # (E, |F(E)|)
    resonances: list = field(default_factory=list)  # (E, |F(E)|)
    upper_zero_count: int = 0


def free_spectrum(L, theta=math.pi, E_range=(-10.0, 10.0)):
    """E_n = (2 pi / L)(n + theta / 2pi) inside ``E_range``."""
    lo, hi = E_range
    step = 2 * math.pi / L
    off = theta / L
    n0 = math.ceil((lo - off) / step - 1e-12)
    n1 = math.floor((hi - off) / step + 1e-12)
    return off + step * np.arange(n0, n1 + 1)


def _F(m: ModelSpec, E):
    return jost.jost_values(m, E)


def _real_F(m, E):
    # F on the real axis: F(-E) = conj F(E) for real potentials
    return np.atleast_1d(_F(m, np.asarray(E, dtype=float)))


def _scan_mesh(E_range, L, n_scan):
    lo, hi = E_range
    if n_scan is None:
        per = 16.0 * max(L, 1.0) / (2 * math.pi)
        n_scan = int(min(max(per * (hi - lo), 200), 200_000))
    return np.linspace(lo, hi, n_scan + 1)


def finite_spectrum(m: ModelSpec, L, E_range, n_scan=None) -> SpectrumReport:
    """Real roots of F(E) + F(-E) e^{iEL} inside ``E_range`` for a finite L.

    With G(E) = F(E) e^{-iEL/2} the condition reads Re G = 0.  The phase of
    G is followed along a mesh (jumps above pi/2 between neighbours raise
    PhaseUnwrapError) and each sign change of Re G is refined by brentq.
    Roots with |F| < 1e-8 are localized and reported as bound states.
    """
    if not math.isfinite(L):
        raise DomainError("finite_spectrum needs a finite L")
    mL = m.with_L(L)
    Es = _scan_mesh(E_range, L, n_scan)
    G = _real_F(mL, Es) * np.exp(-0.5j * Es * L)
    absG = np.abs(G)
    big = (absG[:-1] > 1e-6) & (absG[1:] > 1e-6)
    jump = np.abs(np.angle(G[1:] / np.where(G[:-1] == 0, 1, G[:-1])))
    scale = float(np.median(absG)) or 1.0
    for i in np.nonzero(big & (jump > math.pi / 2))[0]:
        # refine; a jump that survives is only allowed where G passes near 0
        sub = np.linspace(Es[i], Es[i + 1], 17)
        Gs = _real_F(mL, sub) * np.exp(-0.5j * sub * L)
        js = np.abs(np.angle(Gs[1:] / Gs[:-1]))
        k = int(np.argmax(js))
        if js[k] > math.pi / 2 and min(abs(Gs[k]), abs(Gs[k + 1])) > 1e-2 * scale:
            raise PhaseUnwrapError(
                f"phase jump {jump[i]:.2f} on [{Es[i]:.6g}, {Es[i + 1]:.6g}]; refine the scan")

    def g(E):
        return float((complex(_real_F(mL, E)[0]) * np.exp(-0.5j * E * L)).real)

    gr = G.real
    levels, bound = [], []
    for i in range(len(Es) - 1):
        if gr[i] == 0.0:
            root = Es[i]
        elif gr[i] * gr[i + 1] < 0:
            root = brentq(g, Es[i], Es[i + 1], xtol=1e-13, rtol=1e-15, maxiter=200)
        else:
            continue
        res = abs(complex(_real_F(mL, root)[0]))
        if res < ZERO_TOL:
            bound.append((float(root), res))
        else:
            levels.append(float(root))
    if gr[-1] == 0.0:
        levels.append(float(Es[-1]))
    # bound states where Re G only touches zero
    for E, r in bound_states_report(mL, E_range, Es=Es):
        if all(abs(E - b) > 1e-9 * (1 + abs(E)) for b, _ in bound):
            bound.append((E, r))
    bound.sort()
    return SpectrumReport(L, sorted(levels), bound, [], 0)


def _newton_complex(f, z, h_rel=1e-6, tol=1e-15, maxiter=60):
    """Newton with a central-difference derivative; returns the start
    point unchanged if the iteration leaves the finite plane."""
    z_start = z
    with np.errstate(all="ignore"):
        for _ in range(maxiter):
            h = h_rel * (1 + abs(z))
            fz = f(z)
            d = (f(z + h) - f(z - h)) / (2 * h)
            if d == 0 or not np.isfinite(d) or not np.isfinite(fz):
                break
            step = fz / d
            z = z - step
            if not np.isfinite(z) or abs(z - z_start) > 1e6 * (1 + abs(z_start)):
                return z_start
            if abs(step) < tol * (1 + abs(z)):
                break
    return z


def bound_states_report(m: ModelSpec, E_range, n_scan=None, Es=None):
    """Real zeros of F (list of (E, |F(E)|)).

    |F|^2 is sampled, each interior local minimum is refined by bounded
    Brent minimization and then by complex Newton; a zero is accepted when
    the Newton limit sits on the real axis (|Im E| < 1e-6 (1 + |E|)) and
    |F| < 1e-8 (1 + |E|) there.
    """
    if Es is None:
        Es = _scan_mesh(E_range, m.L if math.isfinite(m.L) else 40.0, n_scan)
    A = np.abs(_real_F(m, Es))
    out = []
    cx_ok = not jost._needs_spectral([m.a] if m.kind == "M1" else [m.a, m.b], m.L)

    def absF(E):
        return abs(complex(_real_F(m, E)[0]))

    for i in range(1, len(Es) - 1):
        if not (A[i] <= A[i - 1] and A[i] < A[i + 1]):
            continue
        r = minimize_scalar(absF, bounds=(Es[i - 1], Es[i + 1]), method="bounded",
                            options={"xatol": 1e-14})
        E = float(r.x)
        if cx_ok:
            try:
                z = _newton_complex(lambda z: complex(_F(m, z)[0]), complex(E))
            except (DomainError, ZeroDivisionError, FloatingPointError):
                z = complex(E)
            if abs(z.imag) < 1e-6 * (1 + abs(z)) and Es[i - 1] <= z.real <= Es[i + 1]:
                E = z.real
        res = absF(E)
        if res < ZERO_TOL * (1 + abs(E)):
            out.append((E, res))
    return out


def bound_states(m: ModelSpec, E_range, n_scan=None):
    """Real zeros of F (M2) or F1 (M1) inside ``E_range``."""
    return [E for E, _ in bound_states_report(m, E_range, n_scan)]


# ---------------------------------------------------------------------------
# argument principle

def _pole_rates(m: ModelSpec):
    if math.isfinite(m.L):
        return []
    rates = set()
    for p in ([m.a] if m.kind == "M1" else [m.a, m.b]):
        terms = p.exp_terms()
        if terms is None:
            continue
        for c, mu, edge in terms:
            if math.isinf(edge) and c != 0:
                rates.add(mu)
    return sorted(rates)


def _as_func(m):
    def f(z):
        return np.atleast_1d(_F(m, np.asarray(z, dtype=complex)))
    return f


def _edge_winding(f, z0, z1, depth=0, f0=None, f1=None):
    """Change of arg f along the segment z0 -> z1 (adaptive)."""
    if f0 is None:
        f0, f1 = f(np.array([z0, z1]))
    n = 32
    zs = z0 + (z1 - z0) * np.linspace(0.0, 1.0, n + 1)
    fs = f(zs)
    fs[0], fs[-1] = f0, f1
    if np.any(np.abs(fs) < BOUNDARY_TOL):
        k = int(np.argmin(np.abs(fs)))
        raise BoundaryZeroError(f"|F| < {BOUNDARY_TOL} on a contour edge near {zs[k]}")
    d = np.angle(fs[1:] / fs[:-1])
    total = 0.0
    for k in range(n):
        if abs(d[k]) > math.pi / 4 and depth < 12:
            total += _edge_winding(f, zs[k], zs[k + 1], depth + 1, fs[k], fs[k + 1])
        else:
            total += d[k]
    return total


def _winding(f, rect):
    x0, x1, y0, y1 = rect
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    tot = 0.0
    for k in range(4):
        tot += _edge_winding(f, corners[k], corners[(k + 1) % 4])
    return tot / (2 * math.pi)


def _pole_order(f, p, rad):
    zs = p + rad * np.exp(2j * math.pi * np.arange(256) / 256)
    fs = f(zs)
    d = np.angle(np.roll(fs, -1) / fs)
    return -int(round(d.sum() / (2 * math.pi)))


def _poles_in(m, f, rect, cache):
    x0, x1, y0, y1 = rect
    n = 0
    for mu in _pole_rates(m):
        p = complex(0.0, -mu)
        if x0 < 0 < x1 and y0 < -mu < y1:
            if mu not in cache:
                cache[mu] = _pole_order(f, p, 1e-3 * mu)
            n += cache[mu]
    return n


def _near_pole(m, z, h):
    return any(abs(z - complex(0, -mu)) < 4 * h for mu in _pole_rates(m))


def _count(m, f, rect, cache):
    w = _winding(f, rect)
    k = int(round(w))
    if abs(w - k) > 0.1:
        raise BoundaryZeroError(f"non-integer winding {w:.3f} on {rect}")
    return k + _poles_in(m, f, rect, cache)


def _split(rect, frac=0.4937):
    x0, x1, y0, y1 = rect
    xm = x0 + frac * (x1 - x0)
    ym = y0 + (1 - frac) * (y1 - y0)
    return [(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)]


def complex_zeros(m: ModelSpec, rect, min_size=1e-6, max_depth=40):
    """All zeros of F in rect = (x0, x1, y0, y1) as a list of (E, |F(E)|)."""
    f = _as_func(m)
    cache = {}
    out = []

    def fz(z):
        return complex(f(z)[0])

    def rec(r, n, depth):
        if n <= 0:
            return
        x0, x1, y0, y1 = r
        size = max(x1 - x0, y1 - y0)
        if n == 1 or size < min_size or depth >= max_depth:
            z = _newton_complex(fz, complex(0.5 * (x0 + x1), 0.5 * (y0 + y1)))
            pad = 1e-9 * (1 + abs(z))
            inside = x0 - pad <= z.real <= x1 + pad and y0 - pad <= z.imag <= y1 + pad
            res = abs(fz(z))
            if (inside and res < ZERO_TOL * (1 + abs(z))) or size < min_size or depth >= max_depth:
                # a cell that cannot be split further keeps its multiplicity
                for _ in range(1 if n == 1 else n):
                    out.append((z, res))
                return
        for frac in (0.4937, 0.5311, 0.4613):
            try:
                subs = _split(r, frac)
                counts = [_count(m, f, s, cache) for s in subs]
                break
            except BoundaryZeroError:
                continue
        else:
            raise BoundaryZeroError(f"cannot split {r} without touching a zero")
        for s, c in zip(subs, counts):
            rec(s, c, depth + 1)

    n = _count(m, f, rect, cache)
    rec(tuple(map(float, rect)), n, 0)
    return sorted(out, key=lambda t: (t[0].real, t[0].imag))


def resonances(m: ModelSpec, rect):
    """Zeros of F with Im E < 0 inside rect (x0, x1, y0, y1), y1 <= 0."""
    if rect[3] > 0:
        raise DomainError("resonance rectangle must lie in Im E <= 0")
    return [z for z, _ in complex_zeros(m, rect)]


def upper_halfplane_zero_count(m: ModelSpec, rect):
    """Number of zeros of F in rect (x0, x1, y0, y1) with y0 > 0."""
    if rect[2] <= 0:
        raise DomainError("rectangle must lie in Im E > 0")
    f = _as_func(m)
    w = _winding(f, rect)
    k = int(round(w))
    if abs(w - k) > 0.1:
        raise BoundaryZeroError(f"non-integer winding {w:.3f}")
    return k


def spectrum_report(m: ModelSpec, E_range, rect=None, upper_rect=None) -> SpectrumReport:
    """Collect levels (finite L), bound states, resonances and the UHP count."""
    if math.isfinite(m.L):
        rep = finite_spectrum(m, m.L, E_range)
    else:
        rep = SpectrumReport(m.L, [], bound_states_report(m, E_range), [], 0)
    if rect is not None:
        rep.resonances = [(z, r) for z, r in complex_zeros(m, rect) if z.imag < 0]
    if upper_rect is not None:
        rep.upper_zero_count = upper_halfplane_zero_count(m, upper_rect)
    return rep


# ---------------------------------------------------------------------------
# smooth zeros

def F1_dispersion_model(m: ModelSpec, E, win: hilbert.PVWindow = hilbert.DEFAULT_WINDOW):
    """F1 through the dispersion route, for M1 with infinite L."""
    if m.kind != "M1":
        raise DomainError("dispersion route is for M1 models")
    a, L = m.a, m.L

    def f1sq(t):
        t = np.asarray(t, dtype=float)
        return np.abs(1.0 + jost.transform_R(a, t, L)) ** 2

    return hilbert.F1_dispersion(f1sq, E, win)


def F1_minima(m: ModelSpec, E_range=(10.0, 60.0), step=0.01, win=hilbert.DEFAULT_WINDOW):
    """Local minima of |F1| on a uniform grid (dispersion route), refined
    by a parabola through the three grid points around each minimum."""
    Es = np.arange(E_range[0], E_range[1] + 0.5 * step, step)
    A = np.abs(F1_dispersion_model(m, Es, win))
    out = []
    for i in range(1, len(Es) - 1):
        if A[i] < A[i - 1] and A[i] <= A[i + 1]:
            den = A[i - 1] - 2 * A[i] + A[i + 1]
            shift = 0.5 * (A[i - 1] - A[i + 1]) / den if den > 0 else 0.0
            out.append(float(Es[i] + shift * step))
    return out


def compare_smooth(minima, n_max):
    """(n, E_min, smooth_zero(n), relative gap) pairing each smooth zero
    n <= n_max with the nearest entry of ``minima`` (real parts)."""
    vals = np.array([complex(z).real for z in minima])
    out = []
    if len(vals) == 0:
        return out
    for n in range(1, n_max + 1):
        z = specialfn.smooth_zero(n)
        k = int(np.argmin(np.abs(vals - z)))
        out.append((n, float(vals[k]), float(z), float(abs(vals[k] - z) / z)))
    return out
