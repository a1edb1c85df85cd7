"""Truncated 1+1 dimensional Dirac model in a momentum basis.

Basis vectors are ordered momentum-major: index ``2*i + s`` is momentum
``grid.momenta[i]`` with spinor component ``s``.  The gamma matrices are
fixed to ``gamma^0 = sigma_3`` and ``gamma^1 = i sigma_2`` so that
``gamma^0 gamma^1 = sigma_1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

SIGMA0 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)

GAMMA0 = SIGMA3
GAMMA1 = 1j * SIGMA2

PERIODIC = "periodic"
ANTIPERIODIC = "antiperiodic"


@dataclass(frozen=True)
class MomentumGrid:
    """Momenta ``2 pi (n + shift) / L`` with ``|n| <= nmax``.

    The antiperiodic grid runs over ``n = -nmax-1 .. nmax`` so that it is
    symmetric about zero.
    """

    circumference: float = 2 * math.pi
    nmax: int = 24
    boundary: str = ANTIPERIODIC
    spinor_dim: int = field(default=2, init=False)

    def __post_init__(self):
        if not self.circumference > 0:
            raise ValueError("circumference must be positive")
        if int(self.nmax) != self.nmax or self.nmax < 1:
            raise ValueError("nmax must be an integer >= 1")
        if self.boundary not in (PERIODIC, ANTIPERIODIC):
            raise ValueError(f"unknown boundary {self.boundary!r}")

    @property
    def shift(self) -> float:
        return 0.0 if self.boundary == PERIODIC else 0.5

    @property
    def indices(self) -> np.ndarray:
        lo = -self.nmax if self.boundary == PERIODIC else -self.nmax - 1
        return np.arange(lo, self.nmax + 1)

    @property
    def momenta(self) -> np.ndarray:
        return 2 * math.pi * (self.indices + self.shift) / self.circumference

    @property
    def size(self) -> int:
        return len(self.indices)

    @property
    def dim(self) -> int:
        return self.spinor_dim * self.size

    def with_cutoff(self, nmax: int) -> "MomentumGrid":
        return MomentumGrid(self.circumference, nmax, self.boundary)


def bump(t, duration: float, start: float = 0.0):
    """Smooth envelope supported in ``[start, start + duration]``, max 1.

    ``exp(1 - 1 / (4 u (T - u) / T^2))`` with ``u = t - start``.
    """
    u = np.asarray(t, dtype=float) - start
    inside = (u > 0) & (u < duration)
    s = np.where(inside, 4 * u * (duration - u) / duration**2, 1.0)
    out = np.where(inside, np.exp(1.0 - 1.0 / s), 0.0)
    return out if out.ndim else float(out)


def bump_derivative(t, duration: float, start: float = 0.0):
    u = np.asarray(t, dtype=float) - start
    inside = (u > 0) & (u < duration)
    us = np.where(inside, u, 0.5 * duration)
    s = 4 * us * (duration - us) / duration**2
    ds = 4 * (duration - 2 * us) / duration**2
    out = np.where(inside, np.exp(1.0 - 1.0 / s) * ds / s**2, 0.0)
    return out if out.ndim else float(out)


def _complete_modes(modes: Mapping[int, complex]) -> dict[int, complex]:
    out = {}
    for k, c in modes.items():
        k = int(k)
        c = complex(c)
        if k == 0:
            out[0] = complex(c.real, 0.0)
        else:
            out[k] = c
            out[-k] = c.conjugate()
    return out


@dataclass(frozen=True)
class GaugePotential:
    """External U(1) potential ``A_mu(t, x) = lambda f(t) sum_k c_k e^{i q_k x}``.

    ``A0`` and ``A1`` map integer modes ``k`` (wave number ``2 pi k / L``) to
    complex coefficients and must satisfy ``c_{-k} = conj(c_k)``.  Use
    :meth:`from_modes` to supply only ``k >= 0`` and have the negative modes
    filled in.
    """

    A0: Mapping[int, complex] = field(default_factory=dict)
    A1: Mapping[int, complex] = field(default_factory=dict)
    coupling: float = 0.1
    duration: float = 1.0
    start: float = 0.0

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError("duration must be positive")
        for name in ("A0", "A1"):
            modes = {int(k): complex(v) for k, v in getattr(self, name).items()}
            for k, c in modes.items():
                partner = modes.get(-k, 0.0)
                if abs(partner - c.conjugate()) > 1e-14 * max(1.0, abs(c)):
                    raise ValueError(
                        f"{name} mode {k} violates conjugate symmetry (field not real)")
            object.__setattr__(self, name, dict(sorted(modes.items())))

    @classmethod
    def from_modes(cls, A0=None, A1=None, **kw) -> "GaugePotential":
        return cls(_complete_modes(A0 or {}), _complete_modes(A1 or {}), **kw)

    @property
    def kmax(self) -> int:
        ks = [abs(k) for k in (*self.A0, *self.A1)]
        return max(ks, default=0)

    @property
    def end(self) -> float:
        return self.start + self.duration

    def envelope(self, t):
        return bump(t, self.duration, self.start)

    def envelope_derivative(self, t):
        return bump_derivative(t, self.duration, self.start)

    def values(self, t, x, circumference: float, component: int = 0):
        """Real-space value of ``A_component(t, x)`` (complex dtype, imag ~ 0)."""
        modes = self.A0 if component == 0 else self.A1
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape, dtype=complex)
        for k, c in modes.items():
            total += c * np.exp(2j * math.pi * k * x / circumference)
        return self.coupling * self.envelope(t) * total

    def with_coupling(self, coupling: float) -> "GaugePotential":
        return GaugePotential(self.A0, self.A1, coupling, self.duration, self.start)

    def shifted(self, delta: float) -> "GaugePotential":
        return GaugePotential(self.A0, self.A1, self.coupling, self.duration,
                              self.start + delta)


def default_potential(coupling: float = 0.1, duration: float = 1.0) -> GaugePotential:
    """Parity-even default: ``A0`` a cosine series, ``A1`` a sine series, ``K_max = 3``."""
    A0 = {1: 0.5, 2: 0.25, 3: 0.125}
    A1 = {1: -0.4j, 3: -0.15j}
    return GaugePotential.from_modes(A0, A1, coupling=coupling, duration=duration)


def random_potential(rng: np.random.Generator, kmax: int = 3, coupling: float = 0.1,
                     duration: float = 1.0, zero_mode: bool = True) -> GaugePotential:
    def draw():
        modes = {k: complex(rng.normal(), rng.normal()) / (2 * k)
                 for k in range(1, kmax + 1)}
        if zero_mode:
            modes[0] = rng.normal() / 2
        return modes
    return GaugePotential.from_modes(draw(), draw(), coupling=coupling, duration=duration)


def build_free_hamiltonian(grid: MomentumGrid, m: float = 1.0) -> np.ndarray:
    """Block-diagonal ``D_0`` with blocks ``sigma_1 p - sigma_3 m``."""
    if m < 0:
        raise ValueError("mass must be non-negative")
    if m == 0 and grid.boundary == PERIODIC:
        raise ValueError("zero mode makes eps and |D_0| ill-conditioned: "
                         "use an antiperiodic grid for m = 0")
    n = grid.size
    D0 = np.zeros((2 * n, 2 * n), dtype=complex)
    for i, p in enumerate(grid.momenta):
        D0[2 * i:2 * i + 2, 2 * i:2 * i + 2] = SIGMA1 * p - SIGMA3 * m
    return D0


def _mode_matrix(grid: MomentumGrid, pot: GaugePotential) -> np.ndarray:
    if pot.kmax > 2 * grid.nmax:
        raise ValueError("potential modes truncated - aliasing "
                         f"(K_max={pot.kmax} > 2*N_max={2 * grid.nmax})")
    n = grid.size
    V = np.zeros((2 * n, 2 * n), dtype=complex)
    for k in sorted(set(pot.A0) | set(pot.A1)):
        block = SIGMA1 * pot.A1.get(k, 0.0) - SIGMA0 * pot.A0.get(k, 0.0)
        for i in range(max(0, -k), min(n, n - k)):
            j = i + k
            V[2 * j:2 * j + 2, 2 * i:2 * i + 2] = block
    return pot.coupling * V


@dataclass(frozen=True, eq=False)
class PotentialOperator:
    """``V(t) = f(t) * V_hat``: the spatial matrix is fixed, only the envelope varies."""

    grid: MomentumGrid
    potential: GaugePotential
    spatial: np.ndarray

    def __call__(self, t: float) -> np.ndarray:
        return self.potential.envelope(t) * self.spatial

    def envelope(self, t):
        return self.potential.envelope(t)

    @property
    def support(self) -> tuple[float, float]:
        return self.potential.start, self.potential.end


def potential_operator(grid: MomentumGrid, pot: GaugePotential) -> PotentialOperator:
    return PotentialOperator(grid, pot, _mode_matrix(grid, pot))


def build_potential(grid: MomentumGrid, pot: GaugePotential, t: float) -> np.ndarray:
    """Matrix of ``V = alpha^1 A_1 - A_0`` at time ``t`` (Hermitean convention)."""
    return potential_operator(grid, pot)(t)


def parity_operator(grid: MomentumGrid) -> np.ndarray:
    """``x -> -x``: maps momentum ``p`` to ``-p`` and acts as ``gamma^0`` on spinors."""
    n = grid.size
    P = np.zeros((2 * n, 2 * n), dtype=complex)
    for i in range(n):
        j = n - 1 - i
        P[2 * j:2 * j + 2, 2 * i:2 * i + 2] = GAMMA0
    return P


@dataclass(frozen=True, eq=False)
class Grading:
    """Energy polarization of ``D_0``.

    ``basis`` holds eigenvectors as columns, positive-energy ones first;
    ``n_plus`` is the dimension of ``H_+``.
    """

    eps: np.ndarray
    P_plus: np.ndarray
    P_minus: np.ndarray
    basis: np.ndarray
    energies: np.ndarray
    n_plus: int

    @property
    def dim(self) -> int:
        return self.eps.shape[0]

    def to_eigenbasis(self, M: np.ndarray) -> np.ndarray:
        return self.basis.conj().T @ M @ self.basis

    def from_eigenbasis(self, M: np.ndarray) -> np.ndarray:
        return self.basis @ M @ self.basis.conj().T


def epsilon_grading(D0: np.ndarray) -> Grading:
    """``eps = sign(D0)`` with eigenvalue 0 assigned to ``+1``."""
    energies, vecs = np.linalg.eigh(D0)
    if np.min(np.abs(energies)) < 1e-10:
        warnings.warn("D0 has a (near) zero eigenvalue: grading numerically unstable",
                      RuntimeWarning, stacklevel=2)
    positive = energies >= 0
    order = np.concatenate([np.flatnonzero(positive), np.flatnonzero(~positive)])
    energies = energies[order]
    vecs = vecs[:, order]
    n_plus = int(positive.sum())
    signs = np.where(energies >= 0, 1.0, -1.0)
    eps = (vecs * signs) @ vecs.conj().T
    P_plus = vecs[:, :n_plus] @ vecs[:, :n_plus].conj().T
    P_minus = vecs[:, n_plus:] @ vecs[:, n_plus:].conj().T
    return Grading(eps, P_plus, P_minus, vecs, energies, n_plus)


@dataclass(frozen=True, eq=False)
class DiracModel:
    """Convenience bundle: grid, mass, free Hamiltonian, grading and potential."""

    grid: MomentumGrid
    mass: float
    potential: GaugePotential
    D0: np.ndarray
    grading: Grading
    V: PotentialOperator

    @classmethod
    def build(cls, grid: MomentumGrid | None = None, mass: float = 1.0,
              potential: GaugePotential | None = None) -> "DiracModel":
        grid = grid or MomentumGrid()
        potential = potential if potential is not None else default_potential()
        D0 = build_free_hamiltonian(grid, mass)
        return cls(grid, mass, potential, D0, epsilon_grading(D0),
                   potential_operator(grid, potential))

    def with_potential(self, potential: GaugePotential) -> "DiracModel":
        return DiracModel(self.grid, self.mass, potential, self.D0, self.grading,
                          potential_operator(self.grid, potential))


def hermiticity_defect(M: np.ndarray) -> float:
    return float(np.linalg.norm(M - M.conj().T))
