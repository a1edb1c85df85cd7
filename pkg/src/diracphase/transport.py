"""Connection form, parallel transport, curvature and the effective action.

Along a path ``g(t)`` with ``g(0) = 1`` the horizontal lift relative to the
section ``g -> (g, a)`` picks up the factor

    exp(-int tr[a' (alpha - a^{-1}) + b' gamma] dt)

where ``alpha, gamma`` are blocks of ``g^{-1}``.  The exponent is accumulated
as a complex number and never recovered from a principal logarithm.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .evolve import FunctionPath, UnitaryPath, concatenate, expm_hermitian
from .model import Grading
from .polarized import SECTION_TOL, SectionDomainError, block_decompose, log_det
from .quadrature import refine_integral

QUAD_RTOL = 1e-8
QUAD_ATOL = 1e-14
DEFAULT_PANELS = 32


@dataclass(frozen=True)
class ConnectionSample:
    t: float
    integrand: complex
    condition: float


@dataclass
class TransportResult:
    """``exponent`` is ``int tr[a'(alpha - a^{-1}) + b' gamma] dt``; ``phase = exp(-exponent)``."""

    exponent: complex
    q_exponent: complex
    jacobi_exponent: complex
    min_condition: float
    change: float
    levels: int
    samples: list[ConnectionSample] = field(repr=False, default_factory=list)

    @property
    def phase(self) -> complex:
        return cmath.exp(-self.exponent)


def connection_form(g, q, dg, dq, grading: Grading) -> complex:
    """``tr(da alpha) + tr(db gamma) - tr(dq q^{-1})`` at the point ``(g, q)``."""
    n = grading.n_plus
    G = grading.to_eigenbasis(g)
    dG = grading.to_eigenbasis(dg)
    inv = np.linalg.inv(G)
    alpha, gamma = inv[:n, :n], inv[n:, :n]
    da, db = dG[:n, :n], dG[:n, n:]
    dq_qinv = dq @ np.linalg.inv(q)
    return complex(np.sum(da * alpha.T) + np.sum(db * gamma.T) - np.trace(dq_qinv))


def connection_terms(g, dg, grading: Grading, t: float = math.nan, unitary: bool = True):
    """Integrands at one point: ``[full, tr(a' alpha + b' gamma), tr(a' a^{-1})]`` and cond(a)."""
    n = grading.n_plus
    G = grading.to_eigenbasis(g)
    dG = grading.to_eigenbasis(dg)
    a = G[:n, :n]
    da, db = dG[:n, :n], dG[:n, n:]
    inv = G.conj().T if unitary else np.linalg.inv(G)
    alpha, gamma = inv[:n, :n], inv[n:, :n]
    smin = float(np.linalg.svd(a, compute_uv=False).min()) if n else 1.0
    if smin < SECTION_TOL:
        raise SectionDomainError(f"left local-section domain at t={t:.6g} "
                                 f"(smallest singular value of a = {smin:.3e})")
    jac = complex(np.trace(sla.lu_solve(sla.lu_factor(a, check_finite=False), da,
                                        check_finite=False)))
    qpart = complex(np.sum(da * alpha.T) + np.sum(db * gamma.T))
    return np.array([qpart - jac, qpart, jac]), smin


def panel_breakpoints(path: UnitaryPath, panels: int = DEFAULT_PANELS) -> np.ndarray:
    times = np.asarray(path.times)
    steps = len(times) - 1
    if steps <= panels:
        return times
    stride = math.ceil(steps / panels)
    bp = times[::stride]
    if bp[-1] != times[-1]:
        bp = np.append(bp, times[-1])
    return bp


def parallel_transport(path: UnitaryPath, grading: Grading, rtol: float = QUAD_RTOL,
                       panels: int = DEFAULT_PANELS, nodes: int = 5,
                       atol: float = QUAD_ATOL) -> TransportResult:
    """Composite Gauss-Lobatto integration of the connection integrands along ``path``.

    Piecewise paths (loops, concatenations) are integrated piece by piece so
    that no panel straddles a corner; every piece gets the panel layout it
    would get on its own.
    """
    total = np.zeros(3, dtype=complex)
    change, levels, samples = 0.0, 0, []
    pieces = path.pieces()
    for piece in pieces:
        conds = {}

        def f(t, piece=piece, conds=conds):
            g, dg = piece.at(t)
            vals, smin = connection_terms(g, dg, grading, t)
            conds[t] = (vals[0], smin)
            return vals

        res = refine_integral(f, panel_breakpoints(piece, panels),
                              "lobatto", nodes, rtol=rtol, atol=atol)
        total += res.value
        change += float(res.change[0])
        levels = max(levels, res.levels)
        samples += [ConnectionSample(t, complex(v), c) for t, (v, c) in sorted(conds.items())]
    return TransportResult(complex(total[0]), complex(total[1]), complex(total[2]),
                           min(s.condition for s in samples), change, levels, samples)


def parallel_phase(path: UnitaryPath, grading: Grading, rtol: float = QUAD_RTOL,
                   panels: int = DEFAULT_PANELS) -> complex:
    """Fiber factor ``exp(-int tr[a'(alpha - a^{-1}) + b' gamma] dt)``."""
    return parallel_transport(path, grading, rtol, panels).phase


@dataclass
class TransportedDet:
    log_det_a: complex
    log_det_q: complex

    @property
    def log_value(self) -> complex:
        return self.log_det_a - self.log_det_q

    @property
    def value(self) -> complex:
        return cmath.exp(self.log_value)


def accumulated_log_det_a(path: UnitaryPath, grading: Grading, times=None) -> complex:
    """``log det a(T)`` continued along the path from ``det a(0) = 1``.

    Each step adds ``log det(a_i^{-1} a_{i+1})`` which equals the exact
    integral of ``tr(a' a^{-1})`` over the step; steps whose ratio is not
    close to 1 are subdivided so the principal logarithm is unambiguous.
    """
    times = np.asarray(path.times if times is None else times)
    n = grading.n_plus

    def a_at(t):
        return grading.to_eigenbasis(path.at(t)[0])[:n, :n]

    def increment(t0, a0, t1, a1, depth=0):
        smin = np.linalg.svd(a1, compute_uv=False).min()
        if smin < SECTION_TOL:
            raise SectionDomainError(f"left local-section domain at t={t1:.6g}")
        ratio = sla.solve(a0, a1)
        step = np.linalg.norm(ratio - np.eye(n), 2)
        if step > 0.5 and depth < 30:
            tm = 0.5 * (t0 + t1)
            am = a_at(tm)
            return increment(t0, a0, tm, am, depth + 1) + increment(tm, am, t1, a1, depth + 1)
        return log_det(ratio)

    total = log_det(a_at(times[0]))
    a_prev = a_at(times[0])
    for t0, t1 in zip(times[:-1], times[1:]):
        a_next = a_at(t1)
        total += increment(t0, a_prev, t1, a_next)
        a_prev = a_next
    return total


def transported_det_parts(path: UnitaryPath, grading: Grading, rtol: float = QUAD_RTOL,
                          panels: int = DEFAULT_PANELS) -> TransportedDet:
    """Integrate the parallel-lift condition for ``log det q`` and continue ``log det a``.

    ``d/dt log det q = tr[a' alpha + b' gamma]`` is integrated with composite
    Gauss-Legendre (nodes disjoint from the Lobatto rule used by
    :func:`parallel_transport`).
    """
    pieces = path.pieces()
    log_q = sum(complex(refine_integral(
        lambda t, p=p: connection_terms(*p.at(t), grading, t)[0][1],
        panel_breakpoints(p, panels), "gauss", 4,
        rtol=rtol, atol=QUAD_ATOL).value) for p in pieces)
    return TransportedDet(accumulated_log_det_a(path, grading), log_q)


def transported_det(path: UnitaryPath, grading: Grading, rtol: float = QUAD_RTOL,
                    panels: int = DEFAULT_PANELS) -> complex:
    """``det(a(T) q(T)^{-1})`` for the parallel lift starting at ``(1, 1)``."""
    return transported_det_parts(path, grading, rtol, panels).value


def jacobi_anchor(path: UnitaryPath, grading: Grading, rtol: float = QUAD_RTOL,
                  panels: int = DEFAULT_PANELS,
                  transport: TransportResult | None = None) -> tuple[complex, complex]:
    """``(det a(T) by LU, det a(0) exp(int tr(a' a^{-1}) dt))``."""
    n = grading.n_plus
    a_end = grading.to_eigenbasis(path.at(path.end)[0])[:n, :n]
    a_start = grading.to_eigenbasis(path.at(path.start)[0])[:n, :n]
    tr = transport or parallel_transport(path, grading, rtol, panels)
    lu = cmath.exp(log_det(a_end))
    return lu, cmath.exp(log_det(a_start) + tr.jacobi_exponent)


@dataclass
class EffectiveAction:
    Z: complex
    log_z: complex

    @property
    def modulus(self) -> float:
        return abs(self.Z)

    @property
    def phase(self) -> float:
        return cmath.phase(self.Z)


def effective_action(path: UnitaryPath, grading: Grading, rtol: float = QUAD_RTOL,
                     panels: int = DEFAULT_PANELS) -> EffectiveAction:
    """``Z(A)``: vacuum expectation of the transported endpoint."""
    parts = transported_det_parts(path, grading, rtol, panels)
    return EffectiveAction(parts.value, parts.log_value)


class CurvatureMismatch(AssertionError):
    pass


def curvature_pair(X: np.ndarray, Y: np.ndarray, grading: Grading) -> tuple[complex, complex]:
    """``(-tr(b_X c_Y - b_Y c_X), tr(eps [eps, X] [eps, Y]) / 4)``."""
    bx = block_decompose(X, grading, False)
    by = block_decompose(Y, grading, False)
    w1 = -(np.trace(bx.b @ by.c) - np.trace(by.b @ bx.c))
    eps = grading.eps
    w2 = 0.25 * np.trace(eps @ (eps @ X - X @ eps) @ (eps @ Y - Y @ eps))
    return complex(w1), complex(w2)


def curvature_at_identity(X: np.ndarray, Y: np.ndarray, grading: Grading) -> complex:
    w1, w2 = curvature_pair(X, Y, grading)
    if abs(w1 - w2) > 1e-12 * grading.dim:
        raise CurvatureMismatch(f"block and commutator curvature differ: {w1} vs {w2}")
    return w2


def random_antihermitean(rng: np.random.Generator, dim: int, normalize: bool = True):
    """Gaussian anti-Hermitean matrix, scaled to unit operator norm by default."""
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    A = 0.5 * (A - A.conj().T)
    return A / np.linalg.norm(A, 2) if normalize else A


def _geodesic(H: np.ndarray, scale: float, left=None, right=None, panels: int = 4):
    """``s -> left @ exp(-i s scale H) @ right`` on [0, 1] (H Hermitean)."""
    w, v = np.linalg.eigh(H)
    vh = v.conj().T
    dim = H.shape[0]
    left = np.eye(dim) if left is None else left
    right = np.eye(dim) if right is None else right

    def func(s):
        E = (v * np.exp(-1j * s * scale * w)) @ vh
        dE = (v * (-1j * scale * w * np.exp(-1j * s * scale * w))) @ vh
        return left @ E @ right, left @ dE @ right
    return FunctionPath(np.linspace(0.0, 1.0, panels + 1), func)


@dataclass
class Holonomy:
    phase: complex
    log_phase: complex


def square_loop(X: np.ndarray, Y: np.ndarray, h: float, panels: int = 4) -> UnitaryPath:
    """Closed loop ``1 -> e^{hX} -> e^{hX} e^{hY} -> e^{hY} -> 1`` with geodesic edges."""
    HX, HY = 1j * X, 1j * Y  # e^{sX} = exp(-i s HX)
    eX = expm_hermitian(HX, h)
    eY = expm_hermitian(HY, h)
    e1 = _geodesic(HX, h, panels=panels)
    e2 = _geodesic(HY, h, left=eX, panels=panels)
    e3 = _geodesic(HX, h, right=eY, panels=panels).reversed()
    e4 = _geodesic(HY, h, panels=panels).reversed()
    return concatenate(e1, e2, e3, e4)


def loop_holonomy(X: np.ndarray, Y: np.ndarray, h: float, grading: Grading,
                  rtol: float = 1e-10, panels: int = 4) -> Holonomy:
    """Parallel transport around :func:`square_loop`."""
    res = parallel_transport(square_loop(X, Y, h, panels), grading, rtol=rtol,
                             panels=panels, atol=1e-16)
    return Holonomy(res.phase, -res.exponent)
