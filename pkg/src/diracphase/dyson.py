"""Dyson series of the interaction-picture evolution and the second-order ``log Z``.

Time-ordered integrals are built by nested cumulative quadrature: on every
panel the Gauss-Legendre spectral integration matrix gives
``int_a^{x_i} f`` at the nodes, so the ``n``-th term is obtained from the
``(n-1)``-th by one more cumulative integral,

    U_n(t) = -i int_0^t V_I(s) U_{n-1}(s) ds,     U_0 = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import legendre

from .model import Grading

DYSON_RTOL = 1e-7
MAX_DOUBLINGS = 6
NODES = 8


class DysonConvergenceError(RuntimeError):
    pass


@lru_cache(maxsize=None)
def _panel_rule(m: int):
    """Gauss nodes/weights on [0, 1] and the cumulative integration matrix.

    ``S[i, j]`` integrates the Lagrange basis polynomial of node ``j`` from 0
    to node ``i``.
    """
    x, w = legendre.leggauss(m)
    x, w = (x + 1) / 2, w / 2
    V = np.vander(x, m, increasing=True)          # V[i, k] = x_i^k
    powers = np.arange(1, m + 1)
    integ = x[:, None] ** powers / powers           # int_0^{x_i} x^k dx
    S = np.linalg.solve(V.T, integ.T).T
    return x, w, S


@dataclass
class DysonSeries:
    """Terms ``U_0 .. U_n`` at the final time and the panel count that converged them."""

    terms: list[np.ndarray]
    panels: int
    change: float

    def partial_sum(self, order: int, coupling: float = 1.0) -> np.ndarray:
        return sum(coupling**k * self.terms[k] for k in range(order + 1))


def _cumulative_terms(V_I: Callable, order: int, t0: float, t1: float, panels: int,
                      m: int = NODES, project: Callable | None = None):
    """Terms at ``t1`` plus, optionally, ``int tr[project(V(s), U_1(s))] ds``."""
    x, w, S = _panel_rule(m)
    dim = V_I(t0).shape[0]
    U = [np.eye(dim, dtype=complex)] + [np.zeros((dim, dim), dtype=complex)
                                        for _ in range(order)]
    extra = 0j
    edges = np.linspace(t0, t1, panels + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        h = b - a
        Vs = [V_I(a + h * xi) for xi in x]
        # values of U_k at the nodes, built order by order
        node_vals = [[U[0]] * m]
        for k in range(1, order + 1):
            prev = node_vals[k - 1]
            integrand = np.array([-1j * Vs[j] @ prev[j] for j in range(m)])
            cum = np.tensordot(S, integrand, axes=(1, 0)) * h
            node_vals.append([U[k] + cum[i] for i in range(m)])
            U[k] = U[k] + h * np.tensordot(w, integrand, axes=(0, 0))
        if project is not None and order >= 1:
            extra += h * sum(w[j] * project(Vs[j], node_vals[1][j]) for j in range(m))
    return U, extra


def _refine(compute: Callable[[int], tuple], scale: Callable, panels: int, rtol: float):
    prev = compute(panels)
    for _ in range(MAX_DOUBLINGS):
        panels *= 2
        cur = compute(panels)
        change = scale(cur, prev)
        if change <= rtol:
            return cur, panels, change
        prev = cur
    raise DysonConvergenceError(f"simplex quadrature did not converge after {MAX_DOUBLINGS} "
                                f"doublings (relative change {change:.3e})")


def dyson_series(V_I: Callable, order: int, t: float, t_start: float = 0.0,
                 panels: int = 8, rtol: float = DYSON_RTOL) -> DysonSeries:
    """Terms ``0..order`` of the Dyson expansion of ``g(t)`` (``g(t_start) = 1``)."""
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be in {0, 1, 2, 3}")
    if t <= t_start:
        dim = V_I(t_start).shape[0]
        terms = [np.eye(dim, dtype=complex)] + [np.zeros((dim, dim), complex)] * order
        return DysonSeries(terms, 0, 0.0)

    def scale(cur, prev):
        num = max(np.linalg.norm(c - p) for c, p in zip(cur[0], prev[0]))
        den = max(np.linalg.norm(c) for c in cur[0][1:]) if order else 1.0
        return num / den if den > 0 else num

    (terms, _), n, change = _refine(
        lambda p: _cumulative_terms(V_I, order, t_start, t, p), scale, panels, rtol)
    return DysonSeries(terms, n, change)


def dyson_term(V_I: Callable, n: int, t: float, t_start: float = 0.0,
               rtol: float = DYSON_RTOL) -> np.ndarray:
    """``(-i)^n int_{t > s_1 > ... > s_n} V_I(s_1) ... V_I(s_n)``."""
    if n not in (1, 2, 3):
        raise ValueError("n must be in {1, 2, 3}")
    return dyson_series(V_I, n, t, t_start, rtol=rtol).terms[n]


def second_order_logZ(V_I: Callable, grading: Grading, t_end: float, t_start: float = 0.0,
                      panels: int = 8, rtol: float = DYSON_RTOL) -> complex:
    """``D_2 = int int_{s > t} tr[P_+ V_I(s) P_- V_I(t) P_+] dt ds``."""
    Pp, Pm = grading.P_plus, grading.P_minus

    def project(V, U1):
        # U1 = -i int_0^s V_I, so V_I(t) integrated equals i U1
        return np.trace(Pp @ V @ Pm @ (1j * U1) @ Pp)

    def scale(cur, prev):
        return abs(cur[1] - prev[1]) / max(abs(cur[1]), 1e-300)

    (_, value), _, _ = _refine(
        lambda p: _cumulative_terms(V_I, 1, t_start, t_end, p, project=project),
        scale, panels, rtol)
    return complex(value)


def first_order_logZ(V_I: Callable, grading: Grading, t_end: float, t_start: float = 0.0,
                     rtol: float = DYSON_RTOL) -> complex:
    """``-i int tr(P_+ V_I P_+) dt``: the order-one term of ``log Z``."""
    U1 = dyson_term(V_I, 1, t_end, t_start, rtol)
    return complex(np.trace(grading.P_plus @ U1 @ grading.P_plus))


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    coefficient: float

    def __iter__(self):
        return iter((self.exponent, self.coefficient))


def scaling_fit(samples) -> ScalingFit:
    """Least-squares fit of ``log|value| = exponent * log(lam) + log(coefficient)``.

    Returns an infinite exponent when every value is below ``1e-14`` (the
    residual vanishes to rounding).
    """
    lam = np.array([s[0] for s in samples], dtype=float)
    vals = np.abs(np.array([s[1] for s in samples]))
    if len(lam) < 3:
        raise ValueError("need at least three samples")
    if np.any(lam <= 0) or len(set(lam.tolist())) != len(lam):
        raise ValueError("lambda values must be positive and distinct")
    if np.all(vals < 1e-14):
        return ScalingFit(math.inf, 0.0)
    if np.any(vals == 0):
        raise ValueError("cannot fit a zero value among nonzero ones")
    slope, intercept = np.polyfit(np.log(lam), np.log(vals), 1)
    return ScalingFit(float(slope), float(np.exp(intercept)))


def extrapolate_ratio(lams, ratios, degree: int | None = None) -> complex:
    """Value at ``lam = 0`` of the polynomial through ``(lam, ratio)`` samples."""
    lams = np.asarray(lams, dtype=float)
    ratios = np.asarray(ratios, dtype=complex)
    degree = len(lams) - 1 if degree is None else degree
    re = np.polyfit(lams, ratios.real, degree)
    im = np.polyfit(lams, ratios.imag, degree)
    return complex(re[-1], im[-1])
