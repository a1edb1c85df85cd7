import cmath

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from diracphase.evolve import FunctionPath
from diracphase.model import PERIODIC, MomentumGrid, build_free_hamiltonian, epsilon_grading
from diracphase.polarized import SectionDomainError
from diracphase.transport import (curvature_at_identity, curvature_pair, effective_action,
                                  jacobi_anchor, loop_holonomy, parallel_transport,
                                  random_antihermitean, transported_det, transported_det_parts)


@pytest.fixture(scope="module")
def grading():
    return epsilon_grading(build_free_hamiltonian(MomentumGrid(nmax=3, boundary=PERIODIC), 1.0))


def exp_path(X, grading=None, times=np.linspace(0, 1, 9)):
    return FunctionPath(times, lambda t: (sla.expm(t * X), X @ sla.expm(t * X)))


def test_block_diagonal_path_is_horizontal(grading, rng):
    n, m = grading.n_plus, grading.dim - grading.n_plus
    X = grading.from_eigenbasis(sla.block_diag(random_antihermitean(rng, n),
                                               random_antihermitean(rng, m)))
    res = parallel_transport(exp_path(X), grading)
    assert abs(res.phase - 1) < 1e-12


def test_eq4_both_routes_small_model(small_model, small_path):
    tr = parallel_transport(small_path, small_model.grading, rtol=1e-10)
    td = transported_det(small_path, small_model.grading, rtol=1e-10)
    assert abs(tr.phase - td) < 1e-9 * abs(td)
    lu, jac = jacobi_anchor(small_path, small_model.grading, transport=tr)
    assert abs(lu - jac) < 1e-9 * abs(lu)


def test_effective_action_is_vacuum_expectation_of_lift(small_model, small_path):
    parts = transported_det_parts(small_path, small_model.grading, rtol=1e-10)
    Z = effective_action(small_path, small_model.grading, rtol=1e-10)
    assert abs(Z.Z - cmath.exp(parts.log_det_a - parts.log_det_q)) < 1e-12
    assert abs(Z.modulus) <= 1 + 1e-9


def test_reparametrization_invariance(grading, rng):
    X = 0.4 * random_antihermitean(rng, grading.dim)
    slow = parallel_transport(exp_path(X), grading, rtol=1e-11)
    fast = FunctionPath(np.linspace(0, 0.5, 9),
                        lambda t: (sla.expm(2 * t * X), 2 * X @ sla.expm(2 * t * X)))
    assert abs(parallel_transport(fast, grading, rtol=1e-11).exponent - slow.exponent) < 1e-10


def test_section_domain_error(grading):
    n = grading.n_plus
    # rotate H+ fully into H- halfway through: a(t) = cos(t) becomes singular at pi/2
    S = np.zeros((grading.dim, grading.dim), dtype=complex)
    S[n, 0], S[0, n] = 1, -1
    X = grading.from_eigenbasis(S)
    with pytest.raises(SectionDomainError):
        parallel_transport(exp_path(X, times=np.linspace(0, np.pi / 2, 9)), grading)


@given(seed=st.integers(0, 2**31))
@settings(max_examples=20, deadline=None)
def test_curvature_identity_property(seed):
    rng = np.random.default_rng(seed)
    gr = epsilon_grading(build_free_hamiltonian(MomentumGrid(nmax=4), 0.7))
    X = random_antihermitean(rng, gr.dim, normalize=False)
    Y = random_antihermitean(rng, gr.dim, normalize=False)
    w1, w2 = curvature_pair(X, Y, gr)
    assert abs(w1 - w2) <= 1e-12 * gr.dim
    # antisymmetric and purely imaginary for anti-Hermitean directions
    assert abs(curvature_at_identity(Y, X, gr) + w2) < 1e-12 * gr.dim
    assert abs(w2.real) < 1e-12 * gr.dim


def test_holonomy_sign_and_scaling(grading, rng):
    X = random_antihermitean(rng, grading.dim)
    Y = random_antihermitean(rng, grading.dim)
    w = curvature_at_identity(X, Y, grading)
    hs = np.array([0.02, 0.01, 0.005])
    logs = np.array([loop_holonomy(X, Y, h, grading).log_phase for h in hs])
    # log Phi = +omega h^2 + O(h^3): the opposite sign leaves an O(h^2) residual
    plus = np.abs(logs - w * hs**2)
    minus = np.abs(logs + w * hs**2)
    assert np.all(plus < 0.05 * minus)
    assert np.polyfit(np.log(hs), np.log(plus), 1)[0] > 2.8
    assert np.polyfit(np.log(hs), np.log(minus), 1)[0] == pytest.approx(2.0, abs=0.05)


def test_trivial_loop_has_no_holonomy(grading, rng):
    X = random_antihermitean(rng, grading.dim)
    assert abs(loop_holonomy(X, X, 0.05, grading).log_phase) < 1e-12
