"""Dressing operators ``T = exp(iK)`` with ``K`` of order -1 and the dressed paths.

A dressing is switched on and off with the potential's envelope,
``T(t) = exp(i f(t) K)``, so that every dressed interaction-picture path

    h(t) = e^{itD0} T(t) e^{-itD0} g(t)

starts at 1 and ends at the scattering operator ``g(T)``.  Two dressings thus
give two paths with common endpoints; their phase ratio is the holonomy of
the closed loop formed by one path and the reverse of the other.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .evolve import FunctionPath, InteractionPath, UnitaryPath, concatenate
from .model import (SIGMA0, SIGMA1, GaugePotential, Grading, MomentumGrid,
                    build_free_hamiltonian, epsilon_grading)
from .polarized import trace_norm
from .transport import QUAD_RTOL, parallel_transport

RECIPES = ("zero", "diagonal_decay", "mode_mixed")
LOOP_TOL = 1e-8


class LoopConsistencyError(AssertionError):
    pass


@dataclass(frozen=True, eq=False)
class DressingOperator:
    """``K`` Hermitean; ``profile(t)`` (default 1) scales it in time."""

    K: np.ndarray
    recipe: str = "custom"
    profile: Callable | None = None
    profile_derivative: Callable | None = None
    _eig: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if np.linalg.norm(self.K - self.K.conj().T) > 1e-12 * self.K.shape[0]:
            raise ValueError("K must be Hermitean")
        object.__setattr__(self, "_eig", np.linalg.eigh(self.K))

    @property
    def dim(self) -> int:
        return self.K.shape[0]

    def exp(self, s: float = 1.0) -> np.ndarray:
        """``exp(i s K)``."""
        w, v = self._eig
        return (v * np.exp(1j * s * w)) @ v.conj().T

    @property
    def T(self) -> np.ndarray:
        return self.exp(1.0)

    def strength(self, t: float) -> tuple[float, float]:
        if self.profile is None:
            return 1.0, 0.0
        return float(self.profile(t)), float(self.profile_derivative(t))

    def at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """``T(t)`` and ``dT/dt``."""
        f, df = self.strength(t)
        E = self.exp(f)
        return E, 1j * df * (self.K @ E)

    def unitarity_defect(self) -> float:
        return float(np.linalg.norm(self.T.conj().T @ self.T - np.eye(self.dim)))

    def commutator_hs(self, grading: Grading) -> float:
        """``||[eps, T]||_HS``."""
        T = self.T
        return float(np.linalg.norm(grading.eps @ T - T @ grading.eps))


def _order_minus_one(grid: MomentumGrid, m: float) -> np.ndarray:
    return 1.0 / np.sqrt(grid.momenta**2 + m**2)


def build_dressing(pot: GaugePotential, grid: MomentumGrid, recipe: str, mass: float = 1.0,
                   strength: float | None = None, modulated: bool = True) -> DressingOperator:
    """Dressing recipes with ``K`` of order -1.

    ``zero``: ``K = 0``.  ``diagonal_decay``: ``K = lam (p^2 + m^2)^{-1/2}`` on
    both spinor components.  ``mode_mixed``: the diagonal part plus the
    potential's Fourier modes, each carried by ``(p^2 + m^2)^{-1/2}`` and
    symmetrized.  ``lam`` defaults to the potential's coupling.
    """
    if recipe not in RECIPES:
        raise ValueError(f"unknown dressing recipe {recipe!r}; expected one of {RECIPES}")
    lam = pot.coupling if strength is None else strength
    n = grid.size
    K = np.zeros((2 * n, 2 * n), dtype=complex)
    if recipe in ("diagonal_decay", "mode_mixed"):
        K += lam * np.kron(np.diag(_order_minus_one(grid, mass)), SIGMA0)
    if recipe == "mode_mixed":
        s = _order_minus_one(grid, mass)
        M = np.zeros_like(K)
        for k in sorted(set(pot.A0) | set(pot.A1)):
            if k == 0:
                continue
            block = SIGMA1 * pot.A1.get(k, 0.0) - SIGMA0 * pot.A0.get(k, 0.0)
            for i in range(max(0, -k), min(n, n - k)):
                j = i + k
                M[2 * j:2 * j + 2, 2 * i:2 * i + 2] += block * s[i]
        K += lam * 0.5 * (M + M.conj().T)
    profile = pot.envelope if modulated else None
    dprofile = pot.envelope_derivative if modulated else None
    return DressingOperator(K, recipe, profile, dprofile)


def _free(D0):
    E, W = np.linalg.eigh(D0)

    def F(t):
        return (W * np.exp(1j * t * E)) @ W.conj().T
    return F


def dressed_path(path: UnitaryPath, dressing: DressingOperator, D0) -> FunctionPath:
    """``h(t) = e^{itD0} T(t) e^{-itD0} g(t)``, i.e. ``g1(t)^{-1} g(t)``."""
    F = _free(D0)

    def func(t):
        g, dg = path.at(t)
        Ft = F(t)
        T, dT = dressing.at(t)
        C = Ft @ T @ Ft.conj().T
        # d/dt of e^{itD0} T e^{-itD0}
        dC = Ft @ (1j * (D0 @ T - T @ D0) + dT) @ Ft.conj().T
        return C @ g, dC @ g + C @ dg
    return FunctionPath(path.times, func)


@dataclass
class Factorization:
    times: np.ndarray
    reassembly_defects: np.ndarray
    g2_offdiag_trace_norms: np.ndarray      # columns: ||P+ g2 P-||_1, ||P- g2 P+||_1
    g_offdiag_trace_norms: np.ndarray

    def ratio(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.g2_offdiag_trace_norms / self.g_offdiag_trace_norms


def factorize_interaction(path: UnitaryPath, dressing: DressingOperator, D0,
                          grading: Grading, times=None):
    """``g = g1 g2`` with ``g1(t) = e^{itD0} T(t)^{-1} e^{-itD0}``.

    Returns the factor callables and a :class:`Factorization` report over
    ``times`` (default: the path samples).
    """
    F = _free(D0)

    def g1(t):
        Ft = F(t)
        return Ft @ dressing.at(t)[0].conj().T @ Ft.conj().T

    def g2(t):
        return g1(t).conj().T @ path.at(t)[0]

    times = np.asarray(path.times if times is None else times)
    dim = grading.dim
    defects, n2, n1 = [], [], []
    Pp, Pm = grading.P_plus, grading.P_minus
    for t in times:
        g = path.at(t)[0]
        a, b = g1(t), g2(t)
        defects.append(float(np.linalg.norm(a @ b - g)))
        n2.append((trace_norm(Pp @ b @ Pm), trace_norm(Pm @ b @ Pp)))
        n1.append((trace_norm(Pp @ g @ Pm), trace_norm(Pm @ g @ Pp)))
    report = Factorization(times, np.array(defects), np.array(n2), np.array(n1))
    if report.reassembly_defects.max(initial=0.0) > 1e-12 * dim:
        raise AssertionError("g1 g2 does not reassemble g")
    return g1, g2, report


@dataclass
class PhaseRatio:
    ratio: complex
    loop_phase: complex
    phase_first: complex
    phase_second: complex
    log_ratio: complex

    @property
    def gap(self) -> float:
        return abs(self.ratio - self.loop_phase)

    @property
    def arg(self) -> float:
        return self.log_ratio.imag


def dressing_phase_ratio(path: InteractionPath, first: DressingOperator,
                         second: DressingOperator, D0, grading: Grading,
                         rtol: float = QUAD_RTOL, tol: float = LOOP_TOL,
                         transports: dict | None = None) -> PhaseRatio:
    """Ratio of parallel phases along the two dressed paths and the loop check.

    The loop runs forward along the ``first`` dressed path and back along
    the ``second``; its parallel phase must equal the ratio within ``tol``.
    ``transports`` may carry results from earlier calls on the same ``path``
    (keyed by dressing) so that each dressed path is integrated once.
    """
    transports = {} if transports is None else transports
    paths = {}
    for d in (first, second):
        paths[id(d)] = dressed_path(path, d, D0)
        if id(d) not in transports:
            transports[id(d)] = parallel_transport(paths[id(d)], grading, rtol=rtol)
    r1, r2 = transports[id(first)], transports[id(second)]
    loop = parallel_transport(concatenate(paths[id(first)], paths[id(second)].reversed()),
                              grading, rtol=rtol)
    log_ratio = r2.exponent - r1.exponent
    ratio = cmath.exp(log_ratio)
    out = PhaseRatio(ratio, loop.phase, r1.phase, r2.phase, log_ratio)
    if out.gap > tol:
        raise LoopConsistencyError(f"phase ratio {ratio} differs from loop phase "
                                   f"{loop.phase} by {out.gap:.3e}")
    return out


def recipe_pairs(recipes=RECIPES):
    return [(a, b) for i, a in enumerate(recipes) for b in recipes[i + 1:]]


def phase_ratio_table(path: InteractionPath, dressings: dict, D0, grading: Grading,
                      rtol: float = QUAD_RTOL) -> dict:
    """``dressing_phase_ratio`` for every pair of named dressings."""
    transports: dict = {}
    return {(a, b): dressing_phase_ratio(path, dressings[a], dressings[b], D0, grading,
                                         rtol=rtol, transports=transports)
            for a, b in recipe_pairs(tuple(dressings))}


def endpoint_gap(path: UnitaryPath, dressing: DressingOperator, D0) -> float:
    """``||h(T) - g(T)||``: zero when the dressing is switched off at the end."""
    h = dressed_path(path, dressing, D0)
    return float(np.linalg.norm(h.at(path.end)[0] - path.at(path.end)[0]))


def commutator_table(pot: GaugePotential, nmaxes, recipe: str = "mode_mixed",
                     mass: float = 1.0, boundary: str = "antiperiodic"):
    """``(N_max, ||[eps, T]||_HS)`` rows for a cutoff sweep."""
    rows = []
    for n in nmaxes:
        grid = MomentumGrid(nmax=n, boundary=boundary)
        grading = epsilon_grading(build_free_hamiltonian(grid, mass))
        rows.append((n, build_dressing(pot, grid, recipe, mass).commutator_hs(grading)))
    return rows


def top_quartile_deviation(dressing: DressingOperator, grid: MomentumGrid) -> float:
    """Largest singular value of ``T - 1`` restricted to the top momentum quartile."""
    p = np.repeat(np.abs(grid.momenta), 2)
    keep = p >= 0.75 * p.max()
    D = (dressing.T - np.eye(dressing.dim))[np.ix_(keep, keep)]
    return float(np.linalg.norm(D, 2))

