"""Principal-value Hilbert transforms and the dispersion constructions.

Conventions: ``hilbert_pv(g, x)`` is  P int_{-d}^{d} (dy/pi) g(y)/(y - x),
computed on the uniform mesh of a :class:`PVWindow` with the singularity
subtracted,

    int (g(y) - g(x))/(y - x) dy/pi + (g(x)/pi) log((d - x)/(d + x)),

and composite Simpson for the smooth remainder.  For a function F analytic
in the upper half plane with real part u on the real axis, the imaginary
part is  -hilbert_pv(u); this fixes the sign in :func:`F1_dispersion` and
:func:`FZ_integral`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from . import specialfn
from .errors import DomainError, WindowError


@dataclass(frozen=True)
class PVWindow:
    half_width: float = 400.0
    mesh: float = 0.05

    def __post_init__(self):
        if not (self.half_width > 0 and self.mesh > 0):
            raise DomainError("window half-width and mesh must be positive")
        if self.half_width <= 10 * self.mesh:
            raise DomainError("window half-width must exceed 10 mesh steps")

    @property
    def d(self):
        return self.half_width

    @property
    def n_half(self):
        # even number of Simpson intervals on [0, d]
        n = int(round(self.half_width / self.mesh))
        return n + (n % 2)

    def half_mesh(self):
        """Nodes on [0, d]."""
        return np.linspace(0.0, self.half_width, self.n_half + 1)

    def full_mesh(self):
        """Nodes on [-d, d] (symmetric, contains 0)."""
        y = self.half_mesh()
        return np.concatenate([-y[:0:-1], y])


DEFAULT_WINDOW = PVWindow()


def _simpson_weights(n_intervals, h):
    w = np.ones(n_intervals + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


def _check_x(x, win):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > win.d - 10 * win.mesh):
        raise WindowError(
            f"evaluation point within 10 mesh steps of the window edge (d = {win.d})")
    return x


def pv_sampled(y, gy, x, gx, win):
    """Singularity-subtracted PV integral from samples ``gy`` on the full mesh.

    ``gx`` are the values g(x) at the (array of) evaluation points.  Linear
    in ``gy``/``gx``; complex samples are allowed.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    gx = np.atleast_1d(np.asarray(gx))
    h = y[1] - y[0]
    w = _simpson_weights(len(y) - 1, h)
    d = win.d
    out = np.empty(x.shape, dtype=np.result_type(gy, gx, float))
    # derivative on the mesh for nodes that coincide with x
    dg = np.gradient(gy, h)
    for i, (xi, gi) in enumerate(zip(x, gx)):
        diff = y - xi
        hit = np.abs(diff) < 1e-9 * h
        with np.errstate(divide="ignore", invalid="ignore"):
            q = (gy - gi) / diff
        if np.any(hit):
            q[hit] = dg[hit]
        out[i] = (np.dot(w, q) + gi * math.log((d - xi) / (d + xi))) / math.pi
    return out


def hilbert_pv(g, x, win: PVWindow = DEFAULT_WINDOW, parity=None):
    """P int_{-d}^{d} (dy/pi) g(y)/(y - x) for a vectorized handle ``g``.

    ``parity`` may be ``"even"`` or ``"odd"`` to evaluate g on [0, d] only.
    Complex-valued g is accepted (the transform is linear).
    """
    xa = _check_x(x, win)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    y = win.full_mesh()
    if parity in ("even", "odd"):
        yh = win.half_mesh()
        gh = np.asarray(g(yh))
        sign = 1.0 if parity == "even" else -1.0
        gy = np.concatenate([sign * gh[:0:-1], gh])
    else:
        gy = np.asarray(g(y))
    gx = np.asarray(g(xa))
    out = pv_sampled(y, gy, xa, gx, win)
    return out[0] if scalar else out


def _log_ratio(d, x):
    return np.log((d + x) / (d - x))


def _inv_x_log_ratio(d, x):
    # (1/x) log((d+x)/(d-x)), with its x -> 0 limit 2/d
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-6 * d
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(small, 2.0 / d * (1 + x * x / (3 * d * d)), _log_ratio(d, x) / x)
    return out


def _tail_fit(y, k, win, frac=0.25):
    """Fit k(t) ~ k0 + k1/t on the outer ``frac`` of the window."""
    n = len(y)
    mid = n // 2
    m = int(frac * mid)
    pos = slice(n - m, n)
    neg = slice(m - 1, None, -1) if m > 0 else slice(0, 0)
    kp = k[pos]
    kn = k[:m][::-1]
    t = y[pos]
    even = 0.5 * (kp + kn)
    odd = 0.5 * (kp - kn)
    return np.mean(even), np.mean(odd * t)


def s_spectral_sampled(y, fhat_y, ghat_neg_y, fhat_E, ghat_neg_E, E, win, tail=True):
    """Spectral form of S_{f,g} from samples of fhat(t) and ghat(-t) on the mesh."""
    E = np.atleast_1d(np.asarray(E, dtype=float))
    _check_x(E, win)
    k = y * fhat_y * ghat_neg_y
    kE = E * fhat_E * ghat_neg_E
    H = pv_sampled(y, k, E, kE, win)
    if tail:
        k0, k1 = _tail_fit(y, k, win)
        H = H + (k0 * _log_ratio(win.d, E) + k1 * _inv_x_log_ratio(win.d, E)) / math.pi
    out = -(E * E / 4.0) * fhat_E * ghat_neg_E + 0.25j * E * H
    out = np.where(E == 0.0, 0.0, out)
    return out


def s_spectral(fhat, ghat, E, win: PVWindow = DEFAULT_WINDOW, tail=True):
    """S_{f,g}(E) = -(E^2/4) fhat(E) ghat(-E) + (iE/4) P int (dt/pi) t fhat(t) ghat(-t)/(t - E).

    ``fhat`` and ``ghat`` are vectorized handles.  The contribution of
    |t| > d is added from a fit k0 + k1/t of the integrand numerator on the
    outer quarter of the window (set ``tail=False`` to skip it).
    """
    Ea = np.asarray(E, dtype=float)
    scalar = Ea.ndim == 0
    Ea = np.atleast_1d(Ea)
    y = win.full_mesh()
    out = s_spectral_sampled(y, np.asarray(fhat(y)), np.asarray(ghat(-y)),
                             np.asarray(fhat(Ea)), np.asarray(ghat(-Ea)), Ea, win, tail)
    return out[0] if scalar else out


def outer_constant(y, gy, frac=0.25):
    """Average of g over the outer ``frac`` of the window (both sides)."""
    n = len(y)
    m = max(int(frac * (n // 2)), 1)
    return 0.5 * (np.mean(gy[:m]) + np.mean(gy[-m:]))


def F1_dispersion_sampled(y, gy, E, gE, win):
    E = np.atleast_1d(np.asarray(E, dtype=float))
    _check_x(E, win)
    H = pv_sampled(y, gy, E, gE, win)
    ginf = outer_constant(y, gy)
    H = H + ginf / math.pi * _log_ratio(win.d, E)
    return gE - 1j * H


def F1_dispersion(f1sq, E, win: PVWindow = DEFAULT_WINDOW, even=True):
    """F_1(E) = |f_1(E)|^2 - i H[|f_1|^2](E), with the constant tail restored.

    ``f1sq`` is a vectorized handle; for real potentials |f_1|^2 is even,
    which is used to halve the evaluations unless ``even=False``.
    """
    Ea = np.asarray(E, dtype=float)
    scalar = Ea.ndim == 0
    Ea = np.atleast_1d(Ea)
    y = win.full_mesh()
    if even:
        yh = win.half_mesh()
        gh = np.asarray(f1sq(yh), dtype=float)
        gy = np.concatenate([gh[:0:-1], gh])
    else:
        gy = np.asarray(f1sq(y), dtype=float)
    gE = np.asarray(f1sq(Ea), dtype=float)
    out = F1_dispersion_sampled(y, gy, Ea, gE, win)
    return out[0] if scalar else out


# ---------------------------------------------------------------------------
# F_Z

@lru_cache(maxsize=8)
def _z2_on_half_mesh(d, mesh):
    win = PVWindow(d, mesh)
    t = win.half_mesh()
    z2 = specialfn.riemann_siegel_Z(t) ** 2
    z2.setflags(write=False)
    return t, z2


def _mean_z2_tail(x, d):
    """(1/pi) int_d^inf <Z^2>(t) 2x/(t^2 - x^2) dt with the mean value
    <Z^2>(t) = log(t/2pi) + 2 gamma of the squared zeta modulus."""
    c = 2 * np.euler_gamma - math.log(2 * math.pi)
    f = lambda t: (math.log(t) + c) * 2 * x / (t * t - x * x)
    return quad(f, d, np.inf, epsabs=1e-12, epsrel=1e-10, limit=200)[0] / math.pi


def FZ_integral(E, win: PVWindow = DEFAULT_WINDOW, tail=True):
    """F_Z(E) = Z(E)^2 - 2iE P int_0^inf (dt/pi) Z(t)^2/(t^2 - E^2).

    The principal value is taken on [0, d] (even fold of the two-sided
    Hilbert transform, Z^2 cached per window).  With ``tail`` the part
    beyond d is added using the mean value of Z^2; without it the
    integral is simply cut at d, which biases Im F_Z by roughly
    (2E/pi d) log(d/2pi).
    """
    Ea = np.asarray(E, dtype=float)
    scalar = Ea.ndim == 0
    Ea = np.atleast_1d(Ea)
    _check_x(Ea, win)
    t, z2 = _z2_on_half_mesh(win.half_width, win.mesh)
    h = t[1] - t[0]
    w = _simpson_weights(len(t) - 1, h)
    dz = np.gradient(z2, h)
    zE = specialfn.riemann_siegel_Z(np.abs(Ea)) ** 2
    d = win.d
    out = np.empty(Ea.shape, dtype=complex)
    for i, (e, ze) in enumerate(zip(Ea, zE)):
        x = abs(e)
        if x == 0.0:
            out[i] = ze
            continue
        # 2x/(t^2 - x^2) = 1/(t - x) - 1/(t + x)
        diff = t - x
        hit = np.abs(diff) < 1e-9 * h
        with np.errstate(divide="ignore", invalid="ignore"):
            q = (z2 - ze) / diff
        if np.any(hit):
            q[hit] = dz[hit]
        pv = np.dot(w, q) + ze * math.log((d - x) / x)
        reg = np.dot(w, z2 / (t + x))
        H = (pv - reg) / math.pi
        if tail:
            H += _mean_z2_tail(x, d)
        out[i] = ze - 1j * math.copysign(1.0, e) * H
    return out[0] if scalar else out


def FZ_tail_bound(E, d):
    """Rough bound on the neglected |t| > d part of Im F_Z from |Z|^2 <~ t^{1/2}."""
    E = np.abs(np.asarray(E, dtype=float))
    # (2E/pi) int_d^inf t^{1/2} / (t^2 - E^2) dt <= (2E/pi) * 2 d^{-1/2} / (1 - E^2/d^2)
    return (2 * E / math.pi) * 2.0 / math.sqrt(d) / (1.0 - (E / d) ** 2)


SERIES_M_MAX = 100_000


def p_factor(t):
    """p(t) = 2^{1/2 + it} - 1."""
    t = np.asarray(t, dtype=complex)
    return np.exp((0.5 + 1j * t) * math.log(2.0)) - 1.0


def FZ_series(E, M=5000):
    """M-term truncation of the double-sum representation of F_Z(E).

    With A_n = (-1)^n n^{-1/2 + iE} and B_m = (-1)^m m^{-1/2 - iE}:

      F_Z = 2/(p p~) sum_{n>m} A_n B_m + (1 + p - p~)/(p p~) H_M
            - 2 sum_{n>m} [ A_n B_m 2^{-k(1/2+iE)} / p - B_n A_m 2^{-k(1/2-iE)} / p~ ]

    where p = p(E), p~ = p(-E), H_M the harmonic number and k the integer part
    of log2(n/m) (so 2^{(1/2+iE){log2(n/m)}} = (n/m)^{1/2+iE} 2^{-k(1/2+iE)}).
    Pairs are grouped into the dyadic blocks 2^k m <= n < 2^{k+1} m, which
    turns the double sum into O(M log M) prefix-sum work.  E may be complex.
    """
    if int(M) != M or M < 1:
        raise DomainError("M must be a positive integer")
    M = int(M)
    if M > SERIES_M_MAX:
        raise DomainError(f"M = {M} exceeds the guard {SERIES_M_MAX}")
    Ea = np.asarray(E, dtype=complex)
    scalar = Ea.ndim == 0
    out = np.array([_fz_series_one(complex(e), M) for e in np.atleast_1d(Ea)])
    return out[0] if scalar else out


def _fz_series_one(t, M):
    n = np.arange(1, M + 1, dtype=float)
    sgn = np.where(np.arange(1, M + 1) % 2 == 0, 1.0, -1.0)
    logn = np.log(n)
    A = sgn * np.exp((-0.5 + 1j * t) * logn)
    B = sgn * np.exp((-0.5 - 1j * t) * logn)
    PA = np.concatenate([[0.0], np.cumsum(A)])   # PA[j] = sum_{n<=j} A_n
    PB = np.concatenate([[0.0], np.cumsum(B)])
    HM = np.sum(1.0 / n)
    p = complex(p_factor(t))
    pt = complex(p_factor(-t))
    # sum_{n>m} A_n B_m = sum_n A_n PB[n-1]
    double = np.sum(A * PB[:-1])
    third = 0.0 + 0.0j
    m = np.arange(1, M + 1)
    k = 0
    while (1 << k) <= M:
        lo = np.maximum(m + 1, (1 << k) * m)
        hi = np.minimum((1 << (k + 1)) * m - 1, M)
        ok = lo <= hi
        if not np.any(ok):
            k += 1
            continue
        mm = m[ok] - 1
        s_ab = np.sum(B[mm] * (PA[hi[ok]] - PA[lo[ok] - 1]))
        s_ba = np.sum(A[mm] * (PB[hi[ok]] - PB[lo[ok] - 1]))
        third += (np.exp(-k * (0.5 + 1j * t) * math.log(2.0)) * s_ab / p
                  - np.exp(-k * (0.5 - 1j * t) * math.log(2.0)) * s_ba / pt)
        k += 1
    return 2.0 * double / (p * pt) + (1.0 + p - pt) / (p * pt) * HM - 2.0 * third


def FZ_series_direct(E, M):
    """Reference O(M^2) evaluation of the same truncated sums (small M only)."""
    t = complex(E)
    p = complex(p_factor(t))
    pt = complex(p_factor(-t))
    total = 0.0 + 0.0j
    for nn in range(1, M + 1):
        for mm in range(1, nn):
            s = (-1) ** (nn + mm)
            total += 2 * s * nn ** (-0.5 + 1j * t) * mm ** (-0.5 - 1j * t) / (p * pt)
            u = math.log2(nn / mm) % 1.0
            total -= 2 * s / nn * (2 ** ((0.5 + 1j * t) * u) / p - 2 ** ((0.5 - 1j * t) * u) / pt)
    HM = sum(1.0 / k for k in range(1, M + 1))
    return total + (1 + p - pt) / (p * pt) * HM
