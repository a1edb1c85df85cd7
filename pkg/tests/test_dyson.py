import math

import numpy as np
import pytest
import scipy.linalg as sla

from diracphase.dyson import (dyson_series, dyson_term, extrapolate_ratio, first_order_logZ,
                              scaling_fit, second_order_logZ)
from diracphase.evolve import interaction_potential


def test_constant_generator_terms(rng):
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    V = A + A.conj().T
    s = dyson_series(lambda t: V, 3, 0.7)
    for n in range(4):
        ref = np.linalg.matrix_power(-0.7j * V, n) / math.factorial(n)
        assert np.linalg.norm(s.terms[n] - ref) < 1e-10 * max(1, np.linalg.norm(ref))


def midpoint_propagator(V, n=800):
    """Exponential midpoint rule with one Richardson step (order 4)."""
    def prop(n):
        U = np.eye(V(0.0).shape[0], dtype=complex)
        h = 1.0 / n
        for k in range(n):
            U = sla.expm(-1j * h * V((k + 0.5) * h)) @ U
        return U
    return (4 * prop(n) - prop(n // 2)) / 3


def test_partial_sums_approach_time_ordered_exponential(rng):
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    B = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    H0, H1 = A + A.conj().T, B + B.conj().T
    lams = (0.05, 0.1, 0.2)
    errs = []
    for lam in lams:
        def V(t, lam=lam):
            return lam * (np.cos(t) * H0 + t * H1)
        s = dyson_series(V, 3, 1.0, rtol=1e-10)
        errs.append(np.linalg.norm(s.partial_sum(3) - midpoint_propagator(V)))
    assert scaling_fit(list(zip(lams, errs))).exponent > 3.8


def test_dyson_term_rejects_order():
    with pytest.raises(ValueError):
        dyson_term(lambda t: np.eye(2), 4, 1.0)


def spectral_D2(model, T=1.0, n=160):
    """``sum_{i+, j-} |V_ij|^2 int_{s > t} f(s) f(t) e^{i (E_i - E_j)(s - t)}`` by tensor Gauss."""
    gr = model.grading
    Vh = gr.to_eigenbasis(model.V.spatial)
    n_plus = gr.n_plus
    W = np.abs(Vh[:n_plus, n_plus:]) ** 2
    omega = gr.energies[:n_plus, None] - gr.energies[None, n_plus:]
    x, w = np.polynomial.legendre.leggauss(n)
    x, w = (x + 1) / 2, w / 2
    s = T * x
    S, U = np.meshgrid(s, x, indexing="ij")
    t = S * U                                   # t in [0, s]
    weight = (T * w)[:, None] * (s[:, None] * w[None, :])
    f = model.potential.envelope
    base = weight * f(S) * f(t)
    total = 0j
    for om, wij in zip(omega.ravel(), W.ravel()):
        total += wij * np.sum(base * np.exp(1j * om * (S - t)))
    return total


def test_second_order_matches_spectral_oracle(small_model):
    V_I = interaction_potential(small_model.D0, small_model.V)
    D2 = second_order_logZ(V_I, small_model.grading, 1.0, rtol=1e-10)
    ref = spectral_D2(small_model)
    assert abs(D2 - ref) < 1e-8 * abs(ref)


def test_first_order_vanishes_for_traceless_diagonal(small_model):
    V_I = interaction_potential(small_model.D0, small_model.V)
    assert abs(first_order_logZ(V_I, small_model.grading, 1.0)) < 1e-12


def test_scaling_fit_exact_power():
    lams = [0.1, 0.2, 0.4, 0.8]
    fit = scaling_fit([(x, 3.0 * x**2.5) for x in lams])
    assert fit.exponent == pytest.approx(2.5)
    assert fit.coefficient == pytest.approx(3.0)
    assert scaling_fit([(x, 0.0) for x in lams]).exponent == math.inf
    with pytest.raises(ValueError):
        scaling_fit([(0.1, 1.0), (0.2, 2.0)])
    with pytest.raises(ValueError):
        scaling_fit([(0.1, 1.0), (0.1, 2.0), (0.3, 1.0)])


def test_extrapolate_ratio_polynomial():
    lams = np.array([0.02, 0.04, 0.06, 0.08])
    assert extrapolate_ratio(lams, -1 + 2j * lams + lams**2) == pytest.approx(-1.0)
