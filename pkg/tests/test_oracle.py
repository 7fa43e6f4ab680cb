import math

import numpy as np
import pytest
import sympy as sp

from xpjost import oracle
from xpjost import potentials as P
from xpjost.errors import DomainError
from xpjost.jost import ModelSpec

FREE = ModelSpec("M1", P.ExpSum(()), L=2 * math.pi)


def test_kernel_is_hermitian_and_imaginary():
    m = ModelSpec("M2", P.ExpSum(((1.0, 0.5),)), P.Step(0.7, 1.0), 4.0)
    k = oracle.build_kernel(m, 4.0, 40)
    M = k.entries
    assert np.allclose(M, M.conj().T, atol=0)
    assert np.all(M.real == 0)
    assert np.allclose(k.q, (np.arange(40) + 0.5) * 0.1)


def test_spectrum_symmetric_about_zero():
    m = ModelSpec("M2", P.ExpSum(((1.0, 0.5),)), P.Step(0.7, 1.0), 4.0)
    mu, _ = oracle.eigen(oracle.build_kernel(m, 4.0, 40))
    assert np.allclose(mu, -mu[::-1], atol=1e-10)


def test_four_by_four_against_characteristic_polynomial():
    m = ModelSpec("M2", P.ExpSum(((1.0, 0.5),)), P.ExpSum(((0.6, 1.5),)), 2.0)
    k = oracle.build_kernel(m, 2.0, 4)
    h = sp.Rational(1, 2)
    q = [h * (j + sp.Rational(1, 2)) for j in range(4)]
    a = [sp.exp(-sp.Rational(1, 2) * x).evalf(30) for x in q]
    b = [(sp.Rational(3, 5) * sp.exp(-sp.Rational(3, 2) * x)).evalf(30) for x in q]
    M = sp.Matrix(4, 4, lambda i, j: sp.I * h / 2 * (sp.sign(i - j) + a[i] * b[j] - b[i] * a[j]))
    roots = M.charpoly().nroots(n=30)
    want = np.sort([float(sp.re(r)) for r in roots])
    mu, _ = oracle.eigen(k)
    assert np.allclose(mu, want, atol=1e-13)


def test_eigenvectors_diagonalize():
    m = ModelSpec("M1", P.Step(0.8, 1.0), L=3.0)
    k = oracle.build_kernel(m, 3.0, 30)
    mu, V = oracle.eigen(k)
    assert np.allclose(k.entries @ V, V * mu, atol=1e-11)
    assert np.allclose(V.conj().T @ V, np.eye(30), atol=1e-11)


def test_sl2_entries_and_spectrum_invariant():
    a = P.ExpSum(((1.3, 0.7),))
    b = P.ExpSum(((0.8, 0.4),))
    al, be, ga = 1.4, 0.3, -0.8
    de = (1 + be * ga) / al
    m1 = ModelSpec("M2", a, b, 5.0)
    m2 = ModelSpec("M2", P.scaled_sum(al, a, be, b), P.scaled_sum(ga, a, de, b), 5.0)
    k1 = oracle.build_kernel(m1, 5.0, 32)
    k2 = oracle.build_kernel(m2, 5.0, 32)
    # a_j b_k - b_j a_k is a 2x2 determinant, so the entries themselves agree
    assert np.allclose(k1.entries, k2.entries, atol=1e-14)
    assert np.allclose(oracle.eigen(k1)[0], oracle.eigen(k2)[0], atol=1e-12)


def test_free_levels_converge_quadratically():
    rows = oracle.convergence_table(FREE, FREE.L, (32, 64, 128), k_levels=4)
    assert all(abs(r[2] - 4) < 0.5 for r in rows[1:])


def test_free_eigenvector_is_spread_out():
    k = oracle.build_kernel(FREE, FREE.L, 128)
    mu, V = oracle.eigen(k)
    i = oracle.lowest_levels(mu, 1)[0]
    assert abs(oracle.localization_diagnostic(V[:, i], k) - 0.25) < 0.02


def test_two_exponential_state_is_localized():
    m = ModelSpec("M1", P.ExpSum(((10 / 3, 1.0), (-10 / 3, 4.0))), L=12.0)
    k = oracle.build_kernel(m, 12.0, 256)
    mu, V = oracle.eigen(k)
    E = oracle.energies(mu)
    i = int(np.argmin(np.abs(E - 2.0)))
    assert abs(E[i] - 2.0) < 0.05
    assert oracle.localization_diagnostic(V[:, i], k) < 0.01
    assert oracle.localization_diagnostic(V[:, i], k, frac=1 / 3) < 0.01


def test_step_matrix_reproduces_both_ladders():
    q1, L = 2.0, 7.0
    m = ModelSpec("M1", P.Step(1.0, q1), L=L)
    chk = oracle.cross_check(m, L, 280, k_levels=6)
    inner = (2 * np.arange(3) + 1) * math.pi / q1
    outer = (2 * np.arange(5) + 1) * math.pi / (L - q1)
    ladders = np.concatenate([inner, -inner, outer, -outer])
    for E in chk.energies:
        assert np.min(np.abs(ladders - E)) < 2e-3


def test_guards():
    with pytest.raises(DomainError):
        oracle.build_kernel(FREE, FREE.L, 1)
    with pytest.raises(DomainError):
        oracle.build_kernel(FREE, math.inf, 8)
    k = oracle.build_kernel(FREE, FREE.L, 8)
    with pytest.raises(DomainError):
        oracle.localization_diagnostic(np.zeros(8), k)
