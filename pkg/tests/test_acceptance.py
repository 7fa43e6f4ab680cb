"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest (the lines show with ``-s`` or in the summary test) or
directly with ``python3 tests/test_acceptance.py``.
"""
import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from xpjost import hilbert, jost, oracle, specialfn as sf, spectrum
from xpjost import potentials as P
from xpjost.jost import ModelSpec

RESULTS = {}


def record(n, ok, detail):
    RESULTS[n] = (bool(ok), detail)
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    return ok


def _random_pot(rng, allow_step=True):
    if allow_step and rng.random() < 0.4:
        return P.Step(float(rng.uniform(-2, 2)), float(rng.uniform(0.3, 4)))
    k = int(rng.integers(1, 4))
    return P.ExpSum(tuple((float(rng.uniform(-3, 3)), float(rng.uniform(0.2, 5)))
                          for _ in range(k)))


# ---------------------------------------------------------------------------

def criterion_1():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst_prod = worst_sum = worst_pos = 0.0
    f0_exact = True
    for _ in range(100):
        f, g = _random_pot(rng), _random_pot(rng)
        L = math.inf if rng.random() < 0.5 else float(rng.uniform(1, 10))
        E = rng.uniform(-20, 20, 8)
        lhs = jost.transform_S(f, g, E, L) + jost.transform_S(g, f, -E, L)
        rhs = -2 * jost.transform_R(f, E, L) * jost.transform_R(g, -E, L)
        worst_prod = max(worst_prod, np.max(np.abs(lhs - rhs) / (1 + np.abs(rhs))))

        m1 = ModelSpec("M1", f, L=L)
        F, f1 = jost.jost_F1_values(m1, E)
        Fn, f1n = jost.jost_F1_values(m1, -E)
        worst_sum = max(worst_sum, np.max(np.abs(F + Fn - 2 * f1 * f1n) / (1 + np.abs(F))))
        worst_pos = max(worst_pos, np.max(np.abs(F.real - np.abs(f1) ** 2) / (1 + np.abs(F))))
        m2 = ModelSpec("M2", f, g, L)
        f0_exact &= complex(jost.jost_values(m1, 0.0)[0]) == 1.0
        f0_exact &= complex(jost.jost_values(m2, 0.0)[0]) == 1.0
    dt = time.perf_counter() - t0
    ok = max(worst_prod, worst_sum, worst_pos) < 1e-9 and f0_exact and dt < 5
    return record(1, ok, f"product identity {worst_prod:.1e}, sum rule {worst_sum:.1e}, "
                         f"Re F1 - |f1|^2 {worst_pos:.1e}, F(0)=1 exact {f0_exact}, {dt:.1f}s")


SLOW_B = ModelSpec("M2", P.ExpSum(((7.22928, 1.0), (-7.03245, 4.0))),
                 P.ExpSum(((1.0, 0.0360157),)))


def criterion_2():
    t0 = time.perf_counter()
    checks = {}
    # step M1, a1 = 1: zeros at (2n + 1) pi / q1
    q1 = 2.0
    m = ModelSpec("M1", P.Step(1.0, q1))
    want = (2 * np.arange(6) + 1) * math.pi / q1
    found = np.array(spectrum.bound_states(m, (0.1, want[-1] + 0.5)))
    checks["step M1"] = (len(found) == len(want)
                         and np.max(np.abs(found - want)) < 1e-8
                         and np.max(np.abs(jost.jost_values(m, want))) < 1e-12)
    # step M2, c = 1/2, q1/q2 = 3/4: zeros where e^{i q1 E} = e^{i (q2 - q1) E} = -1
    m = ModelSpec("M2", P.Step(1.0, 3.0), P.Step(1.0, 4.0))
    found = np.array(spectrum.bound_states(m, (0.5, 10.0)))
    want = np.array([math.pi, 3 * math.pi])
    checks["step M2"] = len(found) == 2 and np.max(np.abs(found - want)) < 1e-8
    literal = abs(complex(jost.jost_values(m, math.pi / 2)[0]))
    # ExpSum M1 bound states at +-sqrt(a1 a2) = +-2
    m = ModelSpec("M1", P.ExpSum(((10 / 3, 1.0), (-10 / 3, 4.0))))
    found = np.array(spectrum.bound_states(m, (-5, 5)))
    checks["two-exponential M1"] = len(found) == 2 and np.max(np.abs(found - [-2, 2])) < 1e-8
    # single-exponential M1 resonance at -i mu / (1 - a1/2)^2
    a1, mu = 0.5, 1.0
    z_want = -1j * mu / (1 - a1 / 2) ** 2
    res = spectrum.resonances(ModelSpec("M1", P.ExpSum(((a1, mu),))), (-1.0, 1.1, -2.5, -1.3))
    checks["single-exponential resonance"] = len(res) == 1 and abs(res[0] - z_want) < 1e-8
    # M2 with a slowly decaying b
    found = np.array(spectrum.bound_states(SLOW_B, (-4, 4)))
    checks["slow-b M2"] = len(found) == 2 and np.max(np.abs(np.abs(found) - 1.95634)) < 1e-4
    dt = time.perf_counter() - t0
    ok = all(checks.values()) and dt < 30
    bad = [k for k, v in checks.items() if not v]
    return record(2, ok, f"{len(checks) - len(bad)}/{len(checks)} examples "
                         f"(slow-b zeros at {found}, step M2 |F(pi/2)| = {literal:.2f}), {dt:.1f}s")


def criterion_3():
    rng = np.random.default_rng(303)
    t0 = time.perf_counter()
    counts = []
    for i in range(50):
        if i % 2:
            m = ModelSpec("M1", _random_pot(rng))
        else:
            m = ModelSpec("M2", _random_pot(rng), _random_pot(rng))
        counts.append(spectrum.upper_halfplane_zero_count(m, (-20, 20, 0.05, 5)))
    dt = time.perf_counter() - t0
    return record(3, max(counts) == 0 and dt < 120,
                  f"upper half-plane zero counts {set(counts)} on 50 models, {dt:.1f}s")


def _sl2(rng):
    al = rng.choice([-1, 1]) * rng.uniform(0.5, 2)
    be, ga = rng.uniform(-1.5, 1.5, 2)
    return al, be, ga, (1 + be * ga) / al


def criterion_4():
    rng = np.random.default_rng(404)
    a = P.ExpSum(((1.3, 0.7), (-0.6, 2.2)))
    b = P.ExpSum(((0.8, 0.4),))
    m = ModelSpec("M2", a, b)
    E = rng.uniform(-15, 15, 20)
    F = jost.jost_values(m, E)
    mu0 = oracle.eigen(oracle.build_kernel(m, 5.0, 48))[0]
    worst_F = worst_mu = 0.0
    for _ in range(20):
        al, be, ga, de = _sl2(rng)
        m2 = ModelSpec("M2", P.scaled_sum(al, a, be, b), P.scaled_sum(ga, a, de, b))
        F2 = jost.jost_values(m2, E)
        worst_F = max(worst_F, np.max(np.abs(F - F2) / np.abs(F)))
        mu = oracle.eigen(oracle.build_kernel(m2, 5.0, 48))[0]
        worst_mu = max(worst_mu, np.max(np.abs(mu - mu0)))
    return record(4, worst_F < 1e-8 and worst_mu < 1e-8,
                  f"max |F-F'|/|F| {worst_F:.1e}, eigenvalue shift {worst_mu:.1e}")


def _free_error(n, k=6):
    L = 2 * math.pi
    m = ModelSpec("M1", P.ExpSum(()), L=L)
    mu = oracle.eigen(oracle.build_kernel(m, L, n))[0]
    E = oracle.energies(mu[oracle.lowest_levels(mu, 2 * k)])
    E = np.sort(E[E > 0])[:k]
    return float(np.max(np.abs(E - (np.arange(k) + 0.5))))


def criterion_5():
    t0 = time.perf_counter()
    e256, e512 = _free_error(256), _free_error(512)
    r_free = e256 / e512
    m = ModelSpec("M2", P.ExpSum(((1.5, 1.0), (-0.7, 3.0))), P.ExpSum(((1.0, 0.5),)))
    table = oracle.convergence_table(m, 6.0, (256, 512), k_levels=6)
    r_int = table[-1][2]
    dt = time.perf_counter() - t0
    ok = abs(r_free - 4) < 0.5 and abs(r_int - 4) < 0.5 and dt < 180
    return record(5, ok, f"free error {e256:.2e} -> {e512:.2e} (ratio {r_free:.3f}), "
                         f"interacting residual ratio {r_int:.3f}, {dt:.1f}s")


def criterion_6():
    t0 = time.perf_counter()
    m = ModelSpec("M1", P.BesselHalf(-2.0, 2 * math.pi))
    t = np.linspace(20.05, 29.95, 199)
    th = sf.riemann_siegel_theta(t)
    dev = float(np.max(np.abs(spectrum.F1_dispersion_model(m, t)
                              - 4 * np.cos(th) * np.exp(1j * th))))
    mins = spectrum.F1_minima(m, (10.0, 55.0), 0.01)[:10]
    table = spectrum.compare_smooth(mins, 10)
    gap = max(r[3] for r in table)
    dt = time.perf_counter() - t0
    ok = dev < 0.5 and len(mins) == 10 and gap < 0.03 and dt < 300
    return record(6, ok, f"max |F1 - 4cos(theta)e^(i theta)| {dev:.3f}, "
                         f"worst minimum vs smooth zero {100 * gap:.2f}%, {dt:.1f}s")


def criterion_7():
    t0 = time.perf_counter()
    E = np.arange(10.0, 50.0 + 1e-9, 2.0)
    win = hilbert.PVWindow(400.0, 0.05)
    gap = float(np.max(np.abs(hilbert.FZ_integral(E, win).imag
                              - hilbert.FZ_series(E, 5000).imag)))
    Es = np.array([11.3, 23.7, 37.1, 48.9])
    shuffle = float(np.max(np.abs(hilbert.FZ_integral(Es, win) + hilbert.FZ_integral(-Es, win)
                                  - 2 * sf.riemann_siegel_Z(Es) ** 2)))
    dt = time.perf_counter() - t0
    return record(7, gap < 0.5 and shuffle < 1e-6 and dt < 600,
                  f"max Im gap {gap:.3f}, shuffle identity {shuffle:.1e}, {dt:.1f}s")


def criterion_8():
    t0 = brentq(lambda t: float(sf.riemann_siegel_Z(t)), 14.0, 14.2, xtol=1e-14)
    fz = complex(hilbert.FZ_integral(t0))
    return record(8, abs(fz.real) < 1e-4 and abs(fz.imag) > 0.01,
                  f"zero at t = {t0:.10f}: Re F_Z {fz.real:.1e}, Im F_Z {fz.imag:.3f}")


def criterion_9():
    t = np.array([0.3, 1.0, 7.5, 14.13, 33.3, 100.0, 250.0])
    odd = float(np.max(np.abs(sf.riemann_siegel_theta(-t) + sf.riemann_siegel_theta(t))))
    even = float(np.max(np.abs(sf.riemann_siegel_Z(-t) - sf.riemann_siegel_Z(t))))
    s = np.array([0.5 + 3j, 0.3 + 17j, 2.0 - 4j, 0.5 - 40.2j])
    conj = float(np.max(np.abs(sf.zeta(np.conj(s)) - np.conj(sf.zeta(s)))))
    count = float(np.max(np.abs(sf.smooth_counting(t) - (sf.riemann_siegel_theta(t) / math.pi + 1))))
    bk = abs(float(sf.smooth_counting(100.0)) - float(sf.smooth_counting_bk(100.0)))
    ok = max(odd, even, conj, count) < 1e-10 and bk < 0.01
    return record(9, ok, f"theta odd {odd:.1e}, Z even {even:.1e}, zeta conj {conj:.1e}, "
                         f"counting {count:.1e}, asymptotic gap at 100 {bk:.1e}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("n", range(1, 10))
def test_criterion(n, capsys):
    with capsys.disabled():
        ok = CRITERIA[n - 1]()
    assert ok, RESULTS[n][1]


def test_summary(capsys):
    with capsys.disabled():
        print()
        for n in range(1, 10):
            if n in RESULTS:
                ok, detail = RESULTS[n]
                print(f"criterion {n}: {'PASS' if ok else 'FAIL'}")
            else:
                print(f"criterion {n}: not run")


if __name__ == "__main__":
    for c in CRITERIA:
        c()
