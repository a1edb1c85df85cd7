"""Time evolution ``i dU/dt = (D0 + V(t)) U`` and the interaction picture.

Paths are objects that can be evaluated at any time in their range through
``at(t) -> (g, dg/dt)``.  Their ``times`` are the integrator's accepted steps
and double as quadrature panel breakpoints for the transport module.
"""

from __future__ import annotations

import csv
import logging
import math
from collections import OrderedDict
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)

# Gauss nodes and the two-exponential weights of the order-4 commutator-free scheme.
_C1 = 0.5 - math.sqrt(3) / 6
_C2 = 0.5 + math.sqrt(3) / 6
_W1 = 0.25 + math.sqrt(3) / 6
_W2 = 0.25 - math.sqrt(3) / 6

MAX_HALVINGS = 20
VALUE_CACHE = 1536  # off-grid U(t) kept per path; shared by repeated quadratures
ROUNDING_FLOOR = 1e-9  # refinement changes below this that stop shrinking are rounding noise


class ConvergenceError(RuntimeError):
    pass


def expm_hermitian(H: np.ndarray, tau: float) -> np.ndarray:
    """``exp(-i tau H)`` for Hermitean ``H`` via eigendecomposition."""
    w, v = np.linalg.eigh(H)
    return (v * np.exp(-1j * tau * w)) @ v.conj().T


def cf4_step(U: np.ndarray, t: float, h: float, hamiltonian: Callable) -> np.ndarray:
    H1 = hamiltonian(t + _C1 * h)
    H2 = hamiltonian(t + _C2 * h)
    U = expm_hermitian(_W1 * H1 + _W2 * H2, h) @ U
    return expm_hermitian(_W2 * H1 + _W1 * H2, h) @ U


class UnitaryPath:
    """A differentiable path of (unitary) operators on ``[times[0], times[-1]]``."""

    times: np.ndarray

    def at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    @property
    def start(self) -> float:
        return float(self.times[0])

    @property
    def end(self) -> float:
        return float(self.times[-1])

    @property
    def unitaries(self) -> np.ndarray:
        return np.array([self.at(t)[0] for t in self.times])

    def pieces(self) -> list["UnitaryPath"]:
        """Smooth pieces; quadrature treats each separately."""
        return [self]

    def reversed(self) -> "UnitaryPath":
        a, b = self.start, self.end

        def func(s):
            g, dg = self.at(a + b - s)
            return g, -dg
        return FunctionPath(a + b - self.times[::-1], func)


class FunctionPath(UnitaryPath):
    """Path given by a closure ``t -> (g, dg)``."""

    def __init__(self, times, func: Callable[[float], tuple[np.ndarray, np.ndarray]]):
        self.times = np.asarray(times, dtype=float)
        self._func = func

    def at(self, t):
        return self._func(float(t))


class CompositePath(UnitaryPath):
    """Paths run one after another; each keeps its own smoothness."""

    def __init__(self, parts):
        self.parts = list(parts)
        self._offsets = []
        times = [self.parts[0].times]
        offset = 0.0
        for i, p in enumerate(self.parts):
            if i:
                offset = times[-1][-1] - p.start
                times.append(p.times[1:] + offset)
            self._offsets.append(offset)
        self.times = np.concatenate(times)

    def at(self, t):
        for p, off in zip(self.parts, self._offsets):
            if t <= p.end + off:
                return p.at(t - off)
        p, off = self.parts[-1], self._offsets[-1]
        return p.at(t - off)

    def pieces(self):
        return [q for p in self.parts for q in p.pieces()]

    def reversed(self):
        return CompositePath([p.reversed() for p in reversed(self.parts)])


def concatenate(*paths: UnitaryPath) -> CompositePath:
    """Run the paths in order (each time-shifted to start where the previous ends)."""
    return CompositePath(paths)


class SchrodingerPath(UnitaryPath):
    """``U(t)`` stored at the integrator steps; off-grid values by one local step."""

    picture = "schrodinger"

    def __init__(self, times, unitaries, D0, potential):
        self.times = np.asarray(times, dtype=float)
        self._unitaries = np.asarray(unitaries)
        self.D0 = D0
        self.potential = potential
        self._cache: OrderedDict = OrderedDict()

    def hamiltonian(self, t: float) -> np.ndarray:
        return self.D0 + self.potential(t)

    def generator(self, t: float) -> np.ndarray:
        return self.hamiltonian(t)

    @property
    def unitaries(self):
        return self._unitaries

    def value(self, t: float) -> np.ndarray:
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        i = min(max(i, 0), len(self.times) - 1)
        dt = t - self.times[i]
        if dt == 0.0:
            return self._unitaries[i]
        # times that agree to 14 digits (e.g. a node reached through a reversed
        # parametrization) share one evaluation
        key = round(t, 14)
        hit = self._cache.get(key)
        if hit is not None:
            self._cache.move_to_end(key)
            return hit
        U = cf4_step(self._unitaries[i], self.times[i], dt, self.hamiltonian)
        self._cache[key] = U
        if len(self._cache) > VALUE_CACHE:
            self._cache.popitem(last=False)
        return U

    def at(self, t):
        U = self.value(t)
        return U, -1j * self.hamiltonian(t) @ U


def _propagate(D0, potential, t_end, steps, t_start=0.0):
    times = np.linspace(t_start, t_end, steps + 1)
    h = (t_end - t_start) / steps
    out = np.empty((steps + 1,) + D0.shape, dtype=complex)
    out[0] = np.eye(D0.shape[0])
    ham = lambda t: D0 + potential(t)  # noqa: E731
    for i, t in enumerate(times[:-1]):
        out[i + 1] = cf4_step(out[i], t, h, ham)
    return times, out


def evolve_schrodinger(D0, potential, t_end: float, steps: int = 64, tol: float = 1e-10,
                       t_start: float = 0.0, max_halvings: int = MAX_HALVINGS):
    """Solve ``i dU/dt = (D0 + V(t)) U`` with ``U(t_start) = 1``.

    The step count is doubled until ``U(t_end)`` changes by less than ``tol``
    (Frobenius norm).  Returns a :class:`SchrodingerPath`; its ``defects``
    attribute lists the successive refinement changes.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    support = getattr(potential, "support", None)
    if support is not None and t_end < support[1]:
        raise ValueError(f"t_end={t_end} precedes switch-off at {support[1]}")
    times, Us = _propagate(D0, potential, t_end, steps, t_start)
    defects = []
    for _ in range(max_halvings):
        steps *= 2
        last = Us[-1].copy()
        del Us
        times, Us = _propagate(D0, potential, t_end, steps, t_start)
        defects.append(float(np.linalg.norm(Us[-1] - last)))
        logger.debug("steps=%d defect=%.3e", steps, defects[-1])
        if defects[-1] < tol:
            break
        if len(defects) > 2 and defects[-1] >= 0.5 * defects[-2] and defects[-1] < ROUNDING_FLOOR:
            raise ConvergenceError(f"refinement stalled at {defects[-1]:.3e} above tol={tol:.1e}"
                                   " (rounding floor)")
    else:
        raise ConvergenceError("stiff potential - raise steps or lower lambda "
                               f"(last defect {defects[-1]:.3e})")
    path = SchrodingerPath(times, Us, D0, potential)
    path.defects = defects
    return path


class InteractionPath(UnitaryPath):
    """``g(t) = exp(i t D0) U(t)`` with ``dg/dt = -i V_I(t) g(t)``."""

    picture = "interaction"

    def __init__(self, base: SchrodingerPath, energies, basis):
        self.base = base
        self.times = base.times
        self._E = np.asarray(energies)
        self._W = basis
        self.potential = base.potential

    def free(self, t: float) -> np.ndarray:
        """``exp(i t D0)``."""
        return (self._W * np.exp(1j * t * self._E)) @ self._W.conj().T

    def interaction_potential(self, t: float) -> np.ndarray:
        F = self.free(t)
        return F @ self.potential(t) @ F.conj().T

    def generator(self, t: float) -> np.ndarray:
        return self.interaction_potential(t)

    def at(self, t):
        F = self.free(t)
        U = self.base.value(t)
        g = F @ U
        VI = F @ self.potential(t) @ F.conj().T
        return g, -1j * VI @ g


def interaction_picture(path: SchrodingerPath, D0=None) -> InteractionPath:
    D0 = path.D0 if D0 is None else D0
    if D0 is not path.D0 and not np.allclose(D0, path.D0):
        raise ValueError("path was generated with a different D0")
    E, W = np.linalg.eigh(D0)
    return InteractionPath(path, E, W)


def interaction_potential(D0, potential) -> Callable[[float], np.ndarray]:
    """``t -> V_I(t) = e^{itD0} V(t) e^{-itD0}`` without solving for ``U``."""
    E, W = np.linalg.eigh(D0)
    Vhat = getattr(potential, "spatial", None)
    if Vhat is not None:
        # V(t) = f(t) V_hat: rotate once, then only phases depend on t
        Vw = W.conj().T @ Vhat @ W
        gaps = E[:, None] - E[None, :]

        def V_I(t):
            M = potential.envelope(t) * np.exp(1j * t * gaps) * Vw
            return W @ M @ W.conj().T
        return V_I

    def V_I(t):
        F = (W * np.exp(1j * t * E)) @ W.conj().T
        return F @ potential(t) @ F.conj().T
    return V_I


def unitarity_defects(path: UnitaryPath) -> np.ndarray:
    Us = path.unitaries
    eye = np.eye(Us.shape[-1])
    return np.array([np.linalg.norm(U.conj().T @ U - eye) for U in Us])


def offdiagonal_hs_norms(path: UnitaryPath, grading) -> np.ndarray:
    """``||P_+ g(t) P_-||_HS`` at every sample."""
    return np.array([np.linalg.norm(grading.P_plus @ U @ grading.P_minus)
                     for U in path.unitaries])


def dump_csv(path: UnitaryPath, filename) -> None:
    """Long-format text dump: one row per matrix element per sample."""
    with open(filename, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "row", "col", "re", "im"])
        for t, U in zip(path.times, path.unitaries):
            for (i, j), z in np.ndenumerate(U):
                w.writerow([repr(float(t)), i, j, repr(float(z.real)), repr(float(z.imag))])
