"""Special functions on and near the critical line.

Everything here is self-contained numpy code:

* complex log-gamma (recurrence shift + Stirling series),
* the Riemann-Siegel theta and Z functions,
* zeta and the two real-character Dirichlet L-functions (moduli 3 and 4)
  for Re s > 0, from accelerated alternating series,
* the smooth counting function of the Riemann zeros and its "smooth zeros".

Alternating series are summed with the Chebyshev-weight acceleration of
Cohen, Rodriguez Villegas and Zagier (Borwein's algorithm 2 for eta).  The
number of terms follows from an a-priori error bound, so the result meets
the requested tolerance or an :class:`AccuracyError` is raised.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .errors import AccuracyError, BracketError, ConsistencyError, DomainError, PoleError

LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2.0 * math.pi)
_RATE = math.log(3.0 + math.sqrt(8.0))

# Bernoulli numbers B_2 ... B_24
_BERNOULLI = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
    Fraction(43867, 798), Fraction(-174611, 330), Fraction(854513, 138),
    Fraction(-236364091, 2730),
]
_STIRLING = np.array([float(b / (2 * k * (2 * k - 1)))
                      for k, b in enumerate(_BERNOULLI, start=1)])

# Stieltjes constants gamma_0 ... gamma_7 for the Laurent series of zeta at s = 1
_STIELTJES = np.array([
    0.5772156649015328606, -0.0728158454836767249, -0.0096903631928723184,
    0.0020538344203033458, 0.0023253700654673000, 0.0007933238173010627,
    -0.0002387693454301996, -0.0005272895671832973,
])

DEFAULT_TOL = 1e-13
DEFAULT_BUDGET = 2000


def _as_complex(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def log_gamma(z, shift_to=15.0):
    """Principal branch of log Gamma(z) for Re z > 0.

    Uses the recurrence Gamma(z) = Gamma(z + k) / (z (z+1) ... (z+k-1)) to
    move the argument to Re z >= ``shift_to`` and then the Stirling series
    with Bernoulli terms up to B_24.  Accepts scalars or arrays.
    """
    z, scalar = _as_complex(z)
    if np.any(z.real <= 0.0):
        raise DomainError("log_gamma requires Re z > 0")
    k = np.maximum(np.ceil(shift_to - z.real), 0.0).astype(int)
    w = z + k
    acc = np.zeros_like(z)
    for j in range(int(k.max(initial=0))):
        m = j < k
        acc[m] += np.log(z[m] + j)
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    p = inv
    for c in _STIRLING:
        series += c * p
        p = p * inv2
    out = (w - 0.5) * np.log(w) - w + 0.5 * LOG_2PI + series - acc
    return out[()] if scalar else out


def riemann_siegel_theta(t):
    """theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi, odd and continuous."""
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1e4):
        raise DomainError("|t| must not exceed 1e4")
    # oddness enforced exactly: evaluate on |t|
    a = np.abs(t)
    th = log_gamma(0.25 + 0.5j * a).imag - 0.5 * a * LOG_PI
    th = np.sign(t) * th
    return th[()] if th.ndim == 0 else th


def theta_asymptotic(t):
    """Stirling expansion (t/2) log(t/2pi) - t/2 - pi/8 + 1/(48t) + 7/(5760 t^3)."""
    t = np.asarray(t, dtype=float)
    return 0.5 * t * np.log(t / (2 * np.pi)) - 0.5 * t - np.pi / 8 + 1 / (48 * t) + 7 / (5760 * t**3)


# ---------------------------------------------------------------------------
# accelerated alternating series

@lru_cache(maxsize=64)
def _cvz_weights(n):
    """Weights w_k, k < n, with sum (-1)^k a_k ~= sum (-1)^k w_k a_k."""
    i = np.arange(n + 1)
    loge = (math.log(n) + np.array([math.lgamma(n + j) for j in i])
            - np.array([math.lgamma(n - j + 1) for j in i])
            - np.array([math.lgamma(2 * j + 1) for j in i]) + i * math.log(4.0))
    loge[0] = 0.0
    e = np.exp(loge - loge.max())
    tail = np.cumsum(e[::-1])[::-1]      # tail[k] = sum_{i>=k} e_i
    w = tail[1:] / tail[0]
    w.setflags(write=False)
    return w


def _terms_needed(s, x, tol):
    """Term count from the bound 4 * int|w| / (3 + sqrt 8)^n."""
    sig = s.real
    logM = (np.array([math.lgamma(v) for v in sig.ravel()]).reshape(sig.shape)
            - log_gamma(s).real - sig * math.log(x))
    n = np.ceil((logM + math.log(4.0) - math.log(tol)) / _RATE) + 3
    return np.maximum(n, 8).astype(int)


def alt_series(s, step=1.0, offset=1.0, tol=DEFAULT_TOL, budget=DEFAULT_BUDGET):
    """sum_{k>=0} (-1)^k (step*k + offset)^(-s) for Re s > 0.

    Parameters
    ----------
    s : complex or array
    step, offset : float
        Positive progression parameters.
    tol : float
        Absolute tolerance of the accelerated sum (before the step^-s
        scaling).
    budget : int
        Maximum number of terms; exceeding it raises AccuracyError.
    """
    s, scalar = _as_complex(s)
    s = np.atleast_1d(s)
    if np.any(s.real <= 0.0):
        raise DomainError("alternating series requires Re s > 0")
    x = offset / step
    need = _terms_needed(s, x, tol)
    if need.max() > budget:
        raise AccuracyError(
            f"acceleration needs {int(need.max())} terms, budget is {budget}")
    out = np.empty(s.shape, dtype=complex)
    flat_s = s.ravel()
    flat_n = need.ravel()
    res = np.empty(flat_s.shape, dtype=complex)
    # group by term count (rounded up to a multiple of 16) to share weights
    bucket = ((flat_n + 15) // 16) * 16
    for n in np.unique(bucket):
        m = bucket == n
        w = _cvz_weights(int(n))
        k = np.arange(n)
        coef = np.where(k % 2 == 0, w, -w)
        res[m] = kernels.dirichlet_sum(flat_s[m], np.log(k + x), coef)
    out[...] = res.reshape(s.shape)
    out *= np.exp(-s * math.log(step))
    return out[0] if scalar else out


def eta(s, **kw):
    """Dirichlet eta function for Re s > 0."""
    return alt_series(s, 1.0, 1.0, **kw)


def zeta(s, **kw):
    """Riemann zeta for Re s > 0, s != 1, via eta(s) / (1 - 2^(1-s))."""
    s, scalar = _as_complex(s)
    if np.any(s == 1.0):
        raise PoleError("zeta has a pole at s = 1")
    out = eta(s, **kw) / (1.0 - np.exp((1.0 - s) * math.log(2.0)))
    return out[()] if scalar else out


def _expm1c(z):
    # complex expm1 accurate for small |z|
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-2
    out = np.expm1(z.real) * np.cos(z.imag) - 2.0 * np.sin(0.5 * z.imag) ** 2 + 1j * np.exp(z.real) * np.sin(z.imag)
    zs = z[small]
    out[small] = zs * (1 + zs / 2 * (1 + zs / 3 * (1 + zs / 4 * (1 + zs / 5 * (1 + zs / 6)))))
    return out


def zeta_regular(s, **kw):
    """zeta(s) - 1/(s - 1), regular at s = 1 (Re s > 0).

    Near s = 1 the Laurent series with Stieltjes constants is used, away
    from it the difference is taken directly.
    """
    s, scalar = _as_complex(s)
    s1 = np.atleast_1d(s)
    u = s1 - 1.0
    out = np.empty(s1.shape, dtype=complex)
    near = np.abs(u) < 0.05
    if np.any(near):
        un = u[near]
        acc = np.zeros(un.shape, dtype=complex)
        fact = 1.0
        for n, g in enumerate(_STIELTJES):
            if n:
                fact *= n
            acc += (-1) ** n * g * un**n / fact
        out[near] = acc
    far = ~near
    if np.any(far):
        out[far] = zeta(s1[far], **kw) - 1.0 / u[far]
    return out[0] if scalar else out.reshape(s.shape)


def zeta_hardy(s, **kw):
    """(s - 1) zeta(s) / s, the pole-free combination at s = 1 (Re s > 0)."""
    s, scalar = _as_complex(s)
    s1 = np.atleast_1d(s)
    u = s1 - 1.0
    # (s-1)/(1 - 2^(1-s)) = -u / expm1(-u log 2)
    ratio = np.empty(s1.shape, dtype=complex)
    nz = u != 0
    ratio[nz] = -u[nz] / _expm1c(-u[nz] * math.log(2.0))
    ratio[~nz] = 1.0 / math.log(2.0)
    out = ratio * eta(s1, **kw) / s1
    return out[0] if scalar else out.reshape(s.shape)


def zeta_critical(t, **kw):
    """zeta(1/2 + it)."""
    t = np.asarray(t, dtype=float)
    return zeta(0.5 + 1j * t, **kw)


def dirichlet_L(s, modulus, **kw):
    """L(s, chi) for the real non-principal character mod 3 or mod 4, Re s > 0."""
    s, scalar = _as_complex(s)
    if modulus == 4:
        out = alt_series(s, 2.0, 1.0, **kw)
    elif modulus == 3:
        # with G_r = sum (-1)^k (3k + r)^(-s):  L = (G_1 + G_2) / (1 + 2^(1-s))
        g1 = alt_series(s, 3.0, 1.0, **kw)
        g2 = alt_series(s, 3.0, 2.0, **kw)
        out = (g1 + g2) / (1.0 + np.exp((1.0 - s) * math.log(2.0)))
    else:
        raise DomainError("modulus must be 3 or 4")
    return out[()] if scalar else out


def dirichlet_L_critical(t, modulus, **kw):
    """L(1/2 + it, chi) for modulus 3 or 4."""
    t = np.asarray(t, dtype=float)
    return dirichlet_L(0.5 + 1j * t, modulus, **kw)


def character(modulus):
    """Values chi(0..f-1) of the real non-principal character mod 3 or 4."""
    if modulus == 3:
        return np.array([0.0, 1.0, -1.0])
    if modulus == 4:
        return np.array([0.0, 1.0, 0.0, -1.0])
    raise DomainError("modulus must be 3 or 4")


def riemann_siegel_Z(t, check_tol=1e-6, **kw):
    """Z(t) = Re[e^{i theta(t)} zeta(1/2 + it)], real and even."""
    if np.iscomplexobj(t):
        if np.any(np.imag(t) != 0):
            raise DomainError("Z is defined here for real t only")
        t = np.real(t)
    t = np.asarray(t, dtype=float)
    a = np.abs(t)
    val = np.exp(1j * riemann_siegel_theta(a)) * zeta_critical(a, **kw)
    if np.any(np.abs(val.imag) > check_tol):
        raise ConsistencyError(
            f"imaginary part of e^(i theta) zeta reached {np.abs(val.imag).max():.3g}")
    z = val.real
    return z[()] if np.ndim(z) == 0 else z


def smooth_counting(E):
    """<N(E)> = (1/pi) Im log Gamma(1/4 + iE/2) - (E / 2pi) log pi + 1."""
    E = np.asarray(E, dtype=float)
    return riemann_siegel_theta(E) / np.pi + 1.0


def smooth_counting_bk(E):
    """Asymptotic form (E/2pi)(log(E/2pi) - 1) + 7/8, for E > 0."""
    E = np.asarray(E, dtype=float)
    x = E / (2 * np.pi)
    return x * (np.log(x) - 1.0) + 7.0 / 8.0


# theta has its minimum near t = 6.29; the counting branch is t beyond it
_THETA_MIN_T = 6.289835988836


def smooth_zero(n, t_max=1e4):
    """n-th smooth zero: the solution of <N(t)> = n - 1/2 on the increasing branch.

    Equivalently theta(t) = (n - 3/2) pi, where cos theta vanishes.
    """
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    target = (n - 1.5) * np.pi
    lo = _THETA_MIN_T
    hi = 2.0 * lo
    while riemann_siegel_theta(hi) < target:
        lo, hi = hi, 2.0 * hi
        if hi > t_max:
            raise BracketError(f"no bracket for smooth zero {n} below t = {t_max}")
    return brentq(lambda t: riemann_siegel_theta(t) - target, lo, hi, xtol=1e-13)


@dataclass(frozen=True)
class CountingPoint:
    t: float
    theta: float
    Z: float
    zeta: complex
    n_smooth: float


def counting_point(t):
    """Bundle theta, Z, zeta and the smooth count at ordinate t."""
    th = float(riemann_siegel_theta(t))
    z = complex(zeta_critical(t))
    Z = float(riemann_siegel_Z(t))
    return CountingPoint(float(t), th, Z, z, th / np.pi + 1.0)
