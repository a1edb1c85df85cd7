import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diracphase.model import PERIODIC, MomentumGrid, build_free_hamiltonian
from diracphase.symbolic import (ClassicalSymbol, ModeSymbol, SymbolError, composed_matrix,
                                 gaussian_remainder, lattice_operator, odd_power_symbol,
                                 plain_lattice_sum, power_symbol, rational_remainder,
                                 remainder_symbol, symbol_compose, trace_anomaly_check,
                                 weighted_trace_split, wodzicki_residue, zeta_function,
                                 zeta_trace)

# 2 * Euler's constant: weighted trace of |p|^{-1} on the unit-spaced periodic lattice
TWO_GAMMA = 1.1544313298030657
# Euler-Maclaurin oracle (mpmath, 30 digits, tail integral continued through 2F1) for
# (p^2 + mu^2)^{-1/2} on the periodic L = 2 pi lattice, weight mass mu
EM_ORACLE = {0.5: 2.8944250042585579594, 3.3: -1.0015505747427196753}


def inverse_abs(grid, cp=1.0, cm=1.0):
    return ClassicalSymbol(-1, ((cp, cm),), None, grid)


def test_two_gamma_value():
    assert TWO_GAMMA == pytest.approx(2 * np.euler_gamma, abs=1e-16)
    g = MomentumGrid(nmax=8, boundary=PERIODIC)
    assert zeta_trace(inverse_abs(g)) == pytest.approx(TWO_GAMMA, abs=1e-13)


@pytest.mark.parametrize("L", [2 * math.pi, 5.0, 17.0])
def test_inverse_abs_closed_form(L):
    g = MomentumGrid(L, 8, PERIODIC)
    r = L / (2 * math.pi)
    assert abs(zeta_trace(inverse_abs(g)) - 2 * r * (np.euler_gamma + math.log(r))) < 1e-12


def test_inverse_abs_antiperiodic():
    g = MomentumGrid(nmax=8)
    assert abs(zeta_trace(inverse_abs(g)) - 2 * (np.euler_gamma + 2 * math.log(2))) < 1e-12


@pytest.mark.parametrize("mu", sorted(EM_ORACLE))
def test_massive_weight_against_euler_maclaurin(mu):
    g = MomentumGrid(nmax=64, boundary=PERIODIC)
    assert abs(zeta_trace(power_symbol(-0.5, mu, g), mu) - EM_ORACLE[mu]) < 1e-11


def test_remainder_converges_with_cutoff():
    ref = EM_ORACLE[3.3]
    errs = [abs(zeta_trace(power_symbol(-0.5, 3.3, MomentumGrid(nmax=n, boundary=PERIODIC)),
                           3.3) - ref) for n in (8, 16, 32)]
    assert errs[0] > errs[1] > errs[2]
    assert math.log2(errs[0] / errs[1]) > 9


def test_pure_power_is_cutoff_independent():
    vals = {zeta_trace(inverse_abs(MomentumGrid(nmax=n), 0.3, 1.7)) for n in (4, 16, 64)}
    assert max(abs(a - b) for a in vals for b in vals) < 1e-14


def test_zeta_function_near_zero_matches_subtracted_trace():
    g = MomentumGrid(nmax=8, boundary=PERIODIC)
    sym = power_symbol(-0.5, 0.5, g)
    z = 1e-6
    f = zeta_function(sym, z, 0.5) - wodzicki_residue(sym) / z
    assert abs(f - zeta_trace(sym, 0.5)) < 1e-4


@pytest.mark.parametrize("mu,boundary", [(0.0, "antiperiodic"), (0.7, PERIODIC),
                                         (3.3, "antiperiodic")])
def test_order_minus_two_plain_sums(mu, boundary):
    g = MomentumGrid(nmax=16, boundary=boundary)
    sym = power_symbol(-1.0, mu, g) if mu > 0 else ClassicalSymbol(-2, ((1, 2),), None, g)
    ref = plain_lattice_sum(sym)
    assert abs(zeta_trace(sym, mu) - ref) <= 1e-8 * abs(ref)


def test_remainder_only_symbol_is_plain_sum():
    g = MomentumGrid(nmax=40, boundary=PERIODIC)
    sym = remainder_symbol(gaussian_remainder(1.0, 2.0), g)
    ref = sum(math.exp(-(n / 2) ** 2) for n in range(-40, 41))
    # with mu = 0 the weight vanishes at p = 0 and that mode is left out
    assert zeta_trace(sym) == pytest.approx(ref - 1, abs=1e-13)
    assert zeta_trace(sym, 0.5) == pytest.approx(ref, abs=1e-13)
    assert wodzicki_residue(sym) == 0


@given(a=st.complex_numbers(max_magnitude=3), b=st.complex_numbers(max_magnitude=3),
       c=st.floats(-2, 2))
@settings(max_examples=30, deadline=None)
def test_zeta_trace_linear(a, b, c):
    g = MomentumGrid(nmax=8)
    s1 = ClassicalSymbol(-1, ((a, b), (1.0, -1.0)), rational_remainder(1.0, 1.0, 4), g)
    s2 = odd_power_symbol(-1.0, 0.0, g)
    lhs = zeta_trace(s1 + s2.scaled(c))
    rhs = zeta_trace(s1) + c * zeta_trace(s2)
    assert abs(lhs - rhs) <= 1e-11 * (1 + abs(lhs))


def test_residue_and_depth_checks():
    g = MomentumGrid(nmax=8)
    assert wodzicki_residue(inverse_abs(g, 2.0, 3.0)) == pytest.approx(5.0)
    assert wodzicki_residue(ModeSymbol(1, inverse_abs(g))) == 0
    with pytest.raises(SymbolError, match="depth"):
        zeta_trace(ClassicalSymbol(0, ((1, 1),), rational_remainder(), g))
    with pytest.raises(SymbolError):
        power_symbol(-0.25)


def test_tail_check_detects_slow_remainder():
    g = MomentumGrid(nmax=64)
    ok = ClassicalSymbol(-1, ((1, 1),), rational_remainder(1.0, 1.0, 4), g)
    ok.check_tail()
    bad = ClassicalSymbol(-1, ((1, 1), (0, 0), (0, 0)), lambda p: np.abs(p) ** -1.5, g)
    with pytest.raises(SymbolError, match="tail"):
        bad.check_tail()


@pytest.mark.parametrize("depth", [1, 2, 3])
def test_composition_matches_dense_product(depth):
    grid = MomentumGrid(nmax=8, boundary=PERIODIC)
    T = ModeSymbol(1, power_symbol(-0.5, 1.0, grid))
    S = ModeSymbol(2, odd_power_symbol(-0.5, 1.0, grid))
    comp = symbol_compose(T, S, depth)
    errs = []
    for n in (64, 128):
        big = grid.with_cutoff(n)
        M = composed_matrix(T, S, big)
        p = big.momenta
        i = np.flatnonzero((p > n / 2) & (p < n - 3))
        exact = M[i + 3, i]
        approx = comp.symbol.homogeneous(p[i])
        errs.append(np.max(np.abs(exact - approx)))
    # error of the truncated expansion falls like |p|^{order - depth - 1} or faster
    assert math.log2(errs[0] / errs[1]) >= depth + 2 - 0.2


def test_anomaly_diagonal_family_is_trivial():
    grid = MomentumGrid(nmax=8, boundary=PERIODIC)
    T = power_symbol(-0.5, 1.0, grid)
    S = ModeSymbol(1, odd_power_symbol(-0.5, 1.0, grid))
    c = trace_anomaly_check(T, S, 1.0)
    assert c.defect <= 1e-3
    assert abs(c.lhs) < 1e-8 and abs(c.rhs) < 1e-12


@pytest.mark.parametrize("k", [1, 2])
def test_anomaly_mode_family_bracket_order(k):
    grid = MomentumGrid(nmax=8, boundary=PERIODIC)
    T = ModeSymbol(-k, power_symbol(0.0, 1.0, grid))
    S = ModeSymbol(k, odd_power_symbol(-0.5, 1.0, grid))
    c = trace_anomaly_check(T, S, 1.0)
    # the cutoff trace of [T, S] telescopes to 2k
    assert c.lhs == pytest.approx(2 * k, abs=1e-6)
    assert c.rhs_reordered == pytest.approx(2 * k, abs=1e-10)
    assert c.rhs == pytest.approx(-2 * k, abs=1e-10)


def test_split_invariance_under_remainder_moves(rng):
    grid = MomentumGrid(nmax=6)
    D0 = build_free_hamiltonian(grid, 1.0)
    E, W = np.linalg.eigh(D0)
    X = power_symbol(-0.5, 1.0, grid)
    Y = rng.normal(size=(grid.dim, grid.dim)) / grid.dim
    R = remainder_symbol(gaussian_remainder(0.4 - 0.2j, 1.5, 1.0), grid)
    t = 0.8
    F = (W * np.exp(1j * t * E)) @ W.conj().T
    moved = F @ lattice_operator(R) @ F.conj().T
    a = weighted_trace_split(X, Y, t, D0)
    b = weighted_trace_split(X + R, Y - moved, t, D0)
    assert abs(a - b) < 1e-12
    with pytest.raises(SymbolError):
        weighted_trace_split(power_symbol(0.0, 1.0, grid), Y, t, D0)
