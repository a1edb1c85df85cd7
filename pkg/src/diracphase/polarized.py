"""Block algebra relative to the grading and the extension pairs ``(g, q)``.

Blocks live in the grading eigenbasis with ``H_+`` first::

    g = [[a, b],
         [c, d]]      a: H+ -> H+, b: H- -> H+, c: H+ -> H-, d: H- -> H-

``q`` is an operator on ``H_+`` written in the same coordinates as ``a``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .model import Grading

SECTION_TOL = 1e-8


class SectionDomainError(ArithmeticError):
    """The a-block is (numerically) singular: the local section ``g -> (g, a)`` fails."""


def trace_norm(M: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(M, compute_uv=False)))


def log_det(M: np.ndarray) -> complex:
    """Complex logarithm of ``det M`` via LU, accumulated term by term.

    The imaginary part is a sum of principal arguments, so it is a valid
    logarithm but not reduced to ``(-pi, pi]``.
    """
    if M.shape[0] == 0:
        return 0j
    lu, piv = sla.lu_factor(M, check_finite=False)
    diag = np.diag(lu)
    if np.any(diag == 0):
        return complex(-np.inf, 0.0)
    swaps = int(np.sum(piv != np.arange(len(piv))))
    return complex(np.sum(np.log(diag.astype(complex)))) + (1j * np.pi if swaps % 2 else 0)


@dataclass(frozen=True, eq=False)
class BlockedOperator:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    grading: Grading
    diagnostics: dict = field(default_factory=dict)

    @property
    def matrix_eigenbasis(self) -> np.ndarray:
        return np.block([[self.a, self.b], [self.c, self.d]])

    def reassemble(self) -> np.ndarray:
        """The operator in the original basis."""
        return self.grading.from_eigenbasis(self.matrix_eigenbasis)

    def inverse_blocks(self) -> tuple[np.ndarray, ...]:
        """Blocks ``(alpha, beta, gamma, delta)`` of ``g^{-1}``."""
        n = self.grading.n_plus
        inv = np.linalg.inv(self.matrix_eigenbasis)
        return inv[:n, :n], inv[:n, n:], inv[n:, :n], inv[n:, n:]

    def unitarity_defect(self) -> float:
        """Largest violation of the blockwise relations implied by ``g^dag g = 1``."""
        a, b, c, d = self.a, self.b, self.c, self.d
        H = lambda M: M.conj().T  # noqa: E731
        rel = [H(a) @ a + H(c) @ c - np.eye(a.shape[1]),
               H(b) @ b + H(d) @ d - np.eye(b.shape[1]),
               H(a) @ b + H(c) @ d]
        return max(float(np.linalg.norm(r)) for r in rel)


def block_decompose(g: np.ndarray, grading: Grading, diagnostics: bool = True) -> BlockedOperator:
    n = grading.n_plus
    G = grading.to_eigenbasis(g)
    a, b, c, d = G[:n, :n], G[:n, n:], G[n:, :n], G[n:, n:]
    diag = {}
    if diagnostics:
        sv_a = np.linalg.svd(a, compute_uv=False) if n else np.zeros(0)
        diag = {
            "hs_b": float(np.linalg.norm(b)),
            "hs_c": float(np.linalg.norm(c)),
            "trace_norm_b": trace_norm(b),
            "trace_norm_c": trace_norm(c),
            "a_min_singular": float(sv_a.min()) if n else 1.0,
            "a_rank_deficiency": int(np.sum(sv_a < SECTION_TOL)),
        }
        diag["near_singular_a"] = diag["a_min_singular"] < SECTION_TOL
    return BlockedOperator(a, b, c, d, grading, diag)


@dataclass(frozen=True, eq=False)
class ExtendedOperator:
    """A representative ``(g, q)`` of a point in the central extension."""

    g: BlockedOperator
    q: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.q.shape != self.g.a.shape:
            raise ValueError("q must act on H_+")

    @property
    def matrix(self) -> np.ndarray:
        return self.g.reassemble()

    def a_minus_q_trace_norm(self) -> float:
        return trace_norm(self.g.a - self.q)

    def equivalent(self, other: "ExtendedOperator", tol: float = 1e-8) -> bool:
        """``(g, q) ~ (g', q')`` iff ``g = g'`` and ``det(q' q^{-1}) = 1``."""
        if np.linalg.norm(self.g.matrix_eigenbasis - other.g.matrix_eigenbasis) > tol:
            return False
        ld = log_det(other.q) - log_det(self.q)
        return abs(cmath.exp(ld) - 1) <= tol


def identity_extended(grading: Grading) -> ExtendedOperator:
    eye = np.eye(grading.dim, dtype=complex)
    return ExtendedOperator(block_decompose(eye, grading), np.eye(grading.n_plus, dtype=complex))


def ext_multiply(x: ExtendedOperator, y: ExtendedOperator) -> ExtendedOperator:
    """``(g, q)(g', q') = (g g', q q')``."""
    if x.g.grading.dim != y.g.grading.dim:
        raise ValueError("incompatible dimensions")
    gg = block_decompose(x.g.reassemble() @ y.g.reassemble(), x.g.grading)
    qq = x.q @ y.q
    return ExtendedOperator(gg, qq, {"a_minus_q_trace_norm": trace_norm(gg.a - qq)})


def local_section(g, grading: Grading | None = None) -> ExtendedOperator:
    """``g -> (g, a_g)``, defined where the a-block is invertible."""
    blocked = g if isinstance(g, BlockedOperator) else block_decompose(g, grading)
    smin = blocked.diagnostics.get("a_min_singular")
    if smin is None:
        smin = float(np.linalg.svd(blocked.a, compute_uv=False).min())
    if smin <= SECTION_TOL:
        raise SectionDomainError(
            f"outside local section domain (smallest singular value of a = {smin:.3e})")
    return ExtendedOperator(blocked, blocked.a.copy())


def log_vacuum_expectation(x: ExtendedOperator) -> complex:
    return log_det(x.g.a) - log_det(x.q)


def vacuum_expectation(x: ExtendedOperator) -> complex:
    """``<0|(g, q)|0> = det(a q^{-1})``; exactly 0 when ``a`` is singular to tolerance."""
    sv = np.linalg.svd(x.g.a, compute_uv=False)
    if sv.size and sv.min() <= SECTION_TOL * max(1.0, sv.max()):
        return 0j
    return cmath.exp(log_vacuum_expectation(x))


def group_cocycle(g1: np.ndarray, g2: np.ndarray, grading: Grading) -> complex:
    """``det(a_{g1} a_{g2} a_{g1 g2}^{-1})``: the 2-cocycle of the local section."""
    a1 = block_decompose(g1, grading, False).a
    a2 = block_decompose(g2, grading, False).a
    a12 = block_decompose(g1 @ g2, grading, False).a
    return cmath.exp(log_det(a1) + log_det(a2) - log_det(a12))
