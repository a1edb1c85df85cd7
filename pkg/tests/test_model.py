import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diracphase.model import (GaugePotential, MomentumGrid, PERIODIC, bump, bump_derivative,
                              build_free_hamiltonian, build_potential, default_potential,
                              epsilon_grading, hermiticity_defect, parity_operator,
                              random_potential)


def test_grid_sizes_and_symmetry():
    g = MomentumGrid(nmax=24)
    assert g.size == 50 and g.dim == 100
    assert np.allclose(np.sort(g.momenta), np.sort(-g.momenta))
    assert 0.0 not in g.momenta
    p = MomentumGrid(nmax=3, boundary=PERIODIC)
    assert p.size == 7 and 0.0 in p.momenta


def test_grid_rejects_bad_input():
    with pytest.raises(ValueError):
        MomentumGrid(nmax=0)
    with pytest.raises(ValueError):
        MomentumGrid(circumference=-1.0)
    with pytest.raises(ValueError):
        MomentumGrid(boundary="twisted")


def test_free_hamiltonian_spectrum():
    g = MomentumGrid(nmax=5)
    D0 = build_free_hamiltonian(g, 1.3)
    E = np.sort(np.linalg.eigvalsh(D0))
    ref = np.sort(np.concatenate([np.sqrt(g.momenta**2 + 1.3**2),
                                  -np.sqrt(g.momenta**2 + 1.3**2)]))
    assert np.allclose(E, ref, atol=1e-13)


def test_massless_periodic_zero_mode_rejected():
    with pytest.raises(ValueError, match="zero mode"):
        build_free_hamiltonian(MomentumGrid(nmax=2, boundary=PERIODIC), 0.0)
    with pytest.warns(RuntimeWarning):
        epsilon_grading(np.diag([0.0, 1.0, -1.0]))


def test_bump_is_smooth_and_compact():
    t = np.linspace(-0.5, 1.5, 401)
    f = bump(t, 1.0)
    assert np.all(f[(t <= 0) | (t >= 1)] == 0)
    assert math.isclose(bump(0.5, 1.0), 1.0)
    h = 1e-6
    fd = (bump(0.3 + h, 1.0) - bump(0.3 - h, 1.0)) / (2 * h)
    assert abs(fd - bump_derivative(0.3, 1.0)) < 1e-7


def test_potential_conjugate_symmetry_enforced():
    with pytest.raises(ValueError, match="conjugate"):
        GaugePotential({1: 1.0})
    pot = GaugePotential.from_modes({1: 0.3 + 0.1j}, {2: 0.2j})
    assert pot.A0[-1] == (0.3 - 0.1j)
    x = np.linspace(0, 2 * math.pi, 17)
    assert np.max(np.abs(pot.values(0.5, x, 2 * math.pi).imag)) < 1e-15


@given(seed=st.integers(0, 2**31), t=st.floats(0.0, 1.0))
@settings(max_examples=25, deadline=None)
def test_potential_hermitean(seed, t):
    pot = random_potential(np.random.default_rng(seed))
    V = build_potential(MomentumGrid(nmax=6), pot, t)
    assert hermiticity_defect(V) < 1e-13


def test_default_potential_parity_even():
    g = MomentumGrid(nmax=6)
    P = parity_operator(g)
    V = build_potential(g, default_potential(), 0.5)
    D0 = build_free_hamiltonian(g, 1.0)
    assert np.allclose(P @ P, np.eye(g.dim))
    assert np.linalg.norm(P @ V @ P.conj().T - V) < 1e-13
    assert np.linalg.norm(P @ D0 @ P.conj().T - D0) < 1e-13


def test_grading_projections():
    g = MomentumGrid(nmax=4)
    gr = epsilon_grading(build_free_hamiltonian(g, 1.0))
    assert np.allclose(gr.eps @ gr.eps, np.eye(g.dim))
    assert np.allclose(gr.P_plus + gr.P_minus, np.eye(g.dim))
    assert gr.n_plus == g.dim // 2
    M = np.arange(g.dim**2).reshape(g.dim, g.dim).astype(complex)
    assert np.allclose(gr.from_eigenbasis(gr.to_eigenbasis(M)), M)
