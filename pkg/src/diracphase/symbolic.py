"""One-dimensional polyhomogeneous symbols on a momentum lattice.

A :class:`ClassicalSymbol` of order ``m`` is

    sigma(p) = sum_j c_j^{sign p} |p|^{m - j} + r(p),    j = 0..J,

with ``r`` decaying faster than the last kept component.  Weighted traces use
the weight ``Q`` with symbol ``(p^2 + mu^2)^{1/2}`` (order ``q = 1``) and are
computed over the infinite lattice ``p = 2 pi (n + shift) / L`` (without
``p = 0`` when ``mu = 0``, where the weight is not invertible): the power
components by exact Hurwitz-zeta continuation, the remainder by a plain sum
over the symbol's grid.

Single-Fourier-mode operators ``e^{i k x} s(p)`` (:class:`ModeSymbol`) map
``|p> -> s(p) |p + 2 pi k / L>``; momentum-diagonal symbols are the ``k = 0``
case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import mpmath
import numpy as np

from .model import MomentumGrid, PERIODIC
from .quadrature import richardson_limit

MAX_COMPONENTS = 9  # J <= 8
MAX_DEPTH = 6
mpmath.mp.dps = 30


class SymbolError(ValueError):
    pass


def _binom(a: float, i: int) -> float:
    """Generalized binomial coefficient (valid for negative integer ``a``)."""
    out = 1.0
    for r in range(i):
        out *= (a - r) / (r + 1)
    return out


def _as_pairs(components) -> tuple[tuple[complex, complex], ...]:
    out = []
    for c in components:
        if isinstance(c, (tuple, list)):
            cp, cm = c
        else:
            cp = cm = c
        out.append((complex(cp), complex(cm)))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class ClassicalSymbol:
    """``order``, components ``((c_0^+, c_0^-), ...)`` and an optional remainder.

    ``at_zero`` is the value at ``p = 0`` (only used on periodic grids, where
    the homogeneous components are undefined at the origin).  ``remainder``
    must accept a numpy array of momenta.
    """

    order: int
    components: tuple = ()
    remainder: Callable | None = None
    grid: MomentumGrid = field(default_factory=MomentumGrid)
    at_zero: complex | None = None
    label: str = ""

    def __post_init__(self):
        if int(self.order) != self.order:
            raise SymbolError("symbol order must be an integer")
        object.__setattr__(self, "order", int(self.order))
        object.__setattr__(self, "components", _as_pairs(self.components))
        if len(self.components) > MAX_COMPONENTS:
            raise SymbolError(f"at most {MAX_COMPONENTS} homogeneous components")

    # -- evaluation -------------------------------------------------------
    @property
    def depth(self) -> int:
        """Number of stored components ``J + 1``."""
        return len(self.components)

    def homogeneous(self, p, upto: int | None = None) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        out = np.zeros(p.shape, dtype=complex)
        ap = np.abs(p)
        nz = ap > 0
        for j, (cp, cm) in enumerate(self.components[:upto]):
            c = np.where(p > 0, cp, cm)
            out[nz] += c[nz] * ap[nz] ** float(self.order - j)
        return out

    def remainder_values(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if self.remainder is None:
            return np.zeros(p.shape, dtype=complex)
        return np.asarray(self.remainder(p), dtype=complex) * np.ones(p.shape)

    def __call__(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        out = self.homogeneous(p) + self.remainder_values(p)
        zero = p == 0
        if np.any(zero):
            if self.at_zero is None:
                if any(self.order - j < 0 and (cp or cm)
                       for j, (cp, cm) in enumerate(self.components)):
                    raise SymbolError("symbol is singular at p = 0: supply at_zero")
            else:
                out[zero] = self.at_zero
        return out

    def lattice_values(self, grid: MomentumGrid | None = None) -> np.ndarray:
        return self((grid or self.grid).momenta)

    def lattice_matrix(self, grid: MomentumGrid | None = None) -> np.ndarray:
        """Diagonal matrix of the symbol on the scalar momentum lattice."""
        return np.diag(self.lattice_values(grid))

    # -- algebra ----------------------------------------------------------
    def padded(self, order: int, depth: int) -> tuple:
        """Components re-indexed to a higher ``order`` and padded to ``depth``."""
        shift = order - self.order
        if shift < 0:
            raise SymbolError("cannot lower the nominal order")
        comps = [(0j, 0j)] * shift + list(self.components)
        comps = comps[:depth] + [(0j, 0j)] * max(0, depth - len(comps))
        return tuple(comps)

    def scaled(self, c: complex) -> "ClassicalSymbol":
        rem = self.remainder
        return replace(self,
                       components=tuple((c * a, c * b) for a, b in self.components),
                       remainder=None if rem is None else (lambda p, r=rem: c * r(p)),
                       at_zero=None if self.at_zero is None else c * self.at_zero)

    def __add__(self, other: "ClassicalSymbol") -> "ClassicalSymbol":
        order = max(self.order, other.order)
        depth = max(self.depth + order - self.order, other.depth + order - other.order)
        a, b = self.padded(order, depth), other.padded(order, depth)
        comps = tuple((x[0] + y[0], x[1] + y[1]) for x, y in zip(a, b))
        r1, r2 = self.remainder, other.remainder
        if r1 is None and r2 is None:
            rem = None
        else:
            rem = lambda p: (0 if r1 is None else r1(p)) + (0 if r2 is None else r2(p))  # noqa: E731
        z1, z2 = self.at_zero, other.at_zero
        at_zero = None if z1 is None and z2 is None else (z1 or 0) + (z2 or 0)
        return ClassicalSymbol(order, comps, rem, self.grid, at_zero)

    def __sub__(self, other):
        return self + other.scaled(-1)

    def truncated(self, depth: int) -> "ClassicalSymbol":
        return ClassicalSymbol(self.order, self.components[:depth], None, self.grid)

    def derivative(self) -> "ClassicalSymbol":
        """``d/dp`` of the homogeneous part (the remainder is dropped)."""
        comps = tuple(((self.order - j) * cp, -(self.order - j) * cm)
                      for j, (cp, cm) in enumerate(self.components))
        return ClassicalSymbol(self.order - 1, comps, None, self.grid)

    def times(self, other: "ClassicalSymbol", depth: int | None = None) -> "ClassicalSymbol":
        """Pointwise product of the homogeneous expansions (remainders dropped)."""
        depth = min(self.depth, other.depth) if depth is None else depth
        comps = []
        for j in range(depth):
            cp = sum(self.components[i][0] * other.components[j - i][0]
                     for i in range(j + 1)
                     if i < self.depth and j - i < other.depth)
            cm = sum(self.components[i][1] * other.components[j - i][1]
                     for i in range(j + 1)
                     if i < self.depth and j - i < other.depth)
            comps.append((cp, cm))
        return ClassicalSymbol(self.order + other.order, tuple(comps), None, self.grid)

    # -- diagnostics ------------------------------------------------------
    def tail_profile(self) -> np.ndarray:
        """``|r(p)| |p|^{J + 1 - order}`` over the outer half of the grid."""
        p = self.grid.momenta
        ap = np.abs(p)
        outer = ap >= 0.5 * ap.max()
        J = self.depth - 1
        return np.abs(self.remainder_values(p[outer])) * ap[outer] ** (J + 1 - self.order)

    def check_tail(self, factor: float = 2.0) -> float:
        """Verify the remainder tail bound numerically; returns the bound."""
        prof = self.tail_profile()
        if not np.all(np.isfinite(prof)):
            raise SymbolError("remainder is not finite on the grid")
        if prof.size < 4:
            return float(prof.max(initial=0.0))
        p = np.abs(self.grid.momenta)
        ap = p[p >= 0.5 * p.max()]
        inner, outer = prof[ap < 0.75 * ap.max()], prof[ap >= 0.75 * ap.max()]
        if inner.size and outer.max() > factor * inner.max() + 1e-300:
            raise SymbolError("remainder tail does not decay at the declared rate")
        return float(prof.max())


@dataclass(frozen=True, eq=False)
class ModeSymbol:
    """``e^{i k x} s(p)`` with ``k`` an integer lattice mode."""

    k: int
    symbol: ClassicalSymbol

    @property
    def order(self) -> int:
        return self.symbol.order

    @property
    def grid(self) -> MomentumGrid:
        return self.symbol.grid

    @property
    def shift(self) -> float:
        """Momentum transfer ``2 pi k / L``."""
        return 2 * math.pi * self.k / self.grid.circumference

    def matrix(self, grid: MomentumGrid | None = None) -> np.ndarray:
        """Scalar lattice matrix: column ``p`` carries ``s(p)`` to row ``p + k``."""
        grid = grid or self.grid
        vals = self.symbol(grid.momenta)
        n = grid.size
        M = np.zeros((n, n), dtype=complex)
        for i in range(max(0, -self.k), min(n, n - self.k)):
            M[i + self.k, i] = vals[i]
        return M

    def scaled(self, c) -> "ModeSymbol":
        return ModeSymbol(self.k, self.symbol.scaled(c))


def as_mode(x) -> ModeSymbol:
    return x if isinstance(x, ModeSymbol) else ModeSymbol(0, x)


# -- built-in symbols -------------------------------------------------------

def _remainder_from_exact(exact, homog):
    def rem(p):
        p = np.asarray(p, dtype=float)
        out = np.zeros(p.shape, dtype=complex)
        nz = p != 0
        out[nz] = exact(p[nz]) - homog(p[nz])
        return out
    return rem


def power_symbol(a: float, mu: float = 0.0, grid: MomentumGrid | None = None,
                 depth: int = 9, coefficient: complex = 1.0) -> ClassicalSymbol:
    """``coefficient * (p^2 + mu^2)^a`` (``2a`` an integer)."""
    order = 2 * a
    if abs(order - round(order)) > 1e-12:
        raise SymbolError("2a must be an integer")
    grid = grid or MomentumGrid()
    comps = [(0j, 0j)] * depth
    for i in range(0, (depth + 1) // 2):
        c = coefficient * _binom(a, i) * mu ** (2 * i)
        comps[2 * i] = (c, c)
    base = ClassicalSymbol(round(order), tuple(comps), None, grid)

    def exact(p):
        return coefficient * (p**2 + mu**2) ** a
    at_zero = coefficient * mu ** (2 * a) if mu > 0 or a >= 0 else None
    return replace(base, remainder=_remainder_from_exact(exact, base.homogeneous),
                   at_zero=at_zero, label=f"(p^2+{mu}^2)^{a}")


def odd_power_symbol(a: float, mu: float = 0.0, grid: MomentumGrid | None = None,
                     depth: int = 9, coefficient: complex = 1.0) -> ClassicalSymbol:
    """``coefficient * p (p^2 + mu^2)^a`` (``2a`` an integer)."""
    even = power_symbol(a, mu, grid, depth, coefficient)
    comps = tuple((cp, -cm) for cp, cm in even.components)
    base = ClassicalSymbol(even.order + 1, comps, None, even.grid)

    def exact(p):
        return coefficient * p * (p**2 + mu**2) ** a
    return replace(base, remainder=_remainder_from_exact(exact, base.homogeneous),
                   at_zero=0j, label=f"p(p^2+{mu}^2)^{a}")


def gaussian_remainder(amplitude: complex = 1.0, width: float = 1.0, center: float = 0.0):
    def r(p):
        return amplitude * np.exp(-((np.asarray(p, dtype=float) - center) / width) ** 2)
    return r


def rational_remainder(amplitude: complex = 1.0, scale: float = 1.0, power: int = 4):
    def r(p):
        return amplitude / (np.asarray(p, dtype=float) ** 2 + scale**2) ** (power / 2)
    return r


REMAINDERS = {"gaussian": gaussian_remainder, "rational": rational_remainder}


def remainder_symbol(remainder: Callable, grid: MomentumGrid | None = None,
                     order: int = -2) -> ClassicalSymbol:
    """A symbol with no homogeneous part (all of it lives in the remainder)."""
    return ClassicalSymbol(order, (), remainder, grid or MomentumGrid(),
                           at_zero=complex(np.asarray(remainder(np.array([0.0])))[0]))


def log_weight_derivative(mu: float, grid: MomentumGrid | None = None,
                          depth: int = 7) -> ClassicalSymbol:
    """``d/dp log (p^2 + mu^2)^{1/2} = p / (p^2 + mu^2)``."""
    return odd_power_symbol(-1.0, mu, grid, depth)


# -- weighted trace -----------------------------------------------------------

def _lattice_offset(grid: MomentumGrid) -> float:
    """Smallest positive ``n + shift``: the Hurwitz parameter of either branch."""
    return 1.0 if grid.boundary == PERIODIC else 0.5


def _check_depth(sym: ClassicalSymbol):
    if sym.order >= -1 and sym.depth < sym.order + 2 and (sym.remainder is not None
                                                           or sym.depth):
        # the remainder must be absolutely summable: order - J - 1 < -1
        raise SymbolError("insufficient polyhomogeneous depth for the continuation "
                          f"(order {sym.order} needs {sym.order + 2} components)")


@dataclass
class _Split:
    low: np.ndarray     # lattice momenta treated exactly (p != 0)
    start: float        # Hurwitz parameter of the high part (both branches)
    has_zero: bool     # p = 0 is in the lattice and the weight is invertible there


def _split(grid: MomentumGrid, mu: float) -> _Split:
    base = _lattice_offset(grid)
    unit = 2 * math.pi / grid.circumference
    # the binomial expansion of (1 + mu^2/p^2)^{-z/2} needs |p| >= 2 mu
    K = 0 if mu == 0 else max(0, math.ceil(2 * mu / unit - base))
    mags = unit * (base + np.arange(K))
    low = np.concatenate([mags, -mags])
    return _Split(low, base + K, grid.boundary == PERIODIC and mu > 0)


def zeta_function(sym: ClassicalSymbol, z: complex, mu: float = 0.0) -> complex:
    """``f(z) = sum_p sigma(p) (p^2 + mu^2)^{-z/2}`` continued in ``z`` (``z != pole``)."""
    _check_depth(sym)
    z = mpmath.mpc(z)
    L = sym.grid.circumference
    unit = 2 * mpmath.pi / L
    sp = _split(sym.grid, mu)
    total = mpmath.mpc(0)
    for p in sp.low:
        val = sym.homogeneous(np.array([p]))[0]
        total += val * mpmath.power(p * p + mu * mu, -z / 2)
    if sp.has_zero:
        total += (sym.at_zero or 0) * mpmath.power(mu, -z)
    for j, (cp, cm) in enumerate(sym.components):
        C = cp + cm
        if C == 0:
            continue
        a = sym.order - j
        k = 0
        while True:
            coef = mpmath.binomial(-z / 2, k) * mpmath.mpf(mu) ** (2 * k)
            term = coef * C * unit ** (a - 2 * k - z) * mpmath.zeta(z - a + 2 * k, sp.start)
            total += term
            if mu == 0 or (k > 2 and abs(term) < mpmath.mpf(10) ** -25):
                break
            k += 1
    p = sym.grid.momenta
    rem = sym.remainder_values(p[p != 0])
    w = (p[p != 0] ** 2 + mu**2)
    total += sum(complex(r) * mpmath.power(x, -z / 2) for r, x in zip(rem, w))
    return complex(total)


def wodzicki_residue(sym) -> complex:
    """``(L / 2 pi) (c^+ + c^-)`` of the ``|p|^{-1}`` component (0 for off-diagonal modes)."""
    if isinstance(sym, ModeSymbol):
        if sym.k != 0:
            return 0j
        sym = sym.symbol
    j = sym.order + 1
    if j < 0:
        return 0j
    if j >= sym.depth:
        if sym.remainder is None and not sym.components:
            return 0j
        raise SymbolError("insufficient polyhomogeneous depth for the residue")
    cp, cm = sym.components[j]
    return complex(sym.grid.circumference / (2 * math.pi) * (cp + cm))


def zeta_trace(sym: ClassicalSymbol, mu: float = 0.0, q: int = 1) -> complex:
    """``lim_{z -> 0} (f(z) - Res / (q z))`` with the pole removed analytically."""
    if q != 1:
        raise SymbolError("only the first-order weight (p^2 + mu^2)^{1/2} is implemented")
    _check_depth(sym)
    L = sym.grid.circumference
    unit = 2 * math.pi / L
    sp = _split(sym.grid, mu)
    total = complex(np.sum(sym.homogeneous(sp.low)))
    if sp.has_zero:
        total += complex(sym.at_zero or 0)
    for j, (cp, cm) in enumerate(sym.components):
        C = cp + cm
        if C == 0:
            continue
        a = sym.order - j
        if a == -1:
            # (L/2pi)^{1+z} zeta(1+z, s) = (L/2pi)[1/z + log(L/2pi) - psi(s)] + O(z)
            total += C * (L / (2 * math.pi)) * (math.log(L / (2 * math.pi))
                                                - float(mpmath.digamma(sp.start)))
        else:
            total += C * unit**a * complex(mpmath.zeta(-a, sp.start))
        # terms binom(-z/2, k) mu^{2k} zeta(z - a + 2k) survive only on the pole
        if mu > 0 and a >= 1 and a % 2 == 1:
            k = (a + 1) // 2
            total += C * (L / (2 * math.pi)) * mu ** (2 * k) * (-0.5) * (-1) ** (k - 1) / k
    p = sym.grid.momenta
    total += complex(np.sum(sym.remainder_values(p[p != 0])))
    return total


def plain_lattice_sum(sym: ClassicalSymbol, start: int = 1 << 12, levels: int = 5) -> complex:
    """Convergent sum of ``sigma`` over the infinite lattice (order <= -2 only).

    Partial sums over ``|n| <= N`` for ``N = start * 2^i`` are extrapolated
    in ``1/N``; this is the brute-force route, independent of the zeta
    continuation.
    """
    if sym.order > -2:
        raise SymbolError("plain sum diverges for order > -2")
    ns, sums = [], []
    for i in range(levels):
        N = start << i
        g = sym.grid.with_cutoff(N)
        p = g.momenta
        if g.boundary == PERIODIC and sym.at_zero is None:
            p = p[p != 0]
        ns.append(N)
        sums.append(complex(np.sum(sym(p))))
    return complex(richardson_limit(ns, np.array(sums), powers=tuple(range(1, levels))))


# -- composition ----------------------------------------------------------------

def symbol_compose(T, S, depth: int) -> ModeSymbol:
    """Asymptotic symbol of ``T S`` for mode symbols ``T = e^{i k_T x} t``, ``S = e^{i k_S x} s``.

    In one dimension ``sigma_{TS} ~ sum_alpha (1/alpha!) d_p^alpha t(p) (k_S')^alpha s(p)``
    with ``k_S' = 2 pi k_S / L``; components beyond index ``depth`` are dropped.
    """
    T, S = as_mode(T), as_mode(S)
    if depth > MAX_DEPTH:
        raise SymbolError(f"depth must be <= {MAX_DEPTH}")
    if depth >= T.symbol.depth or depth >= S.symbol.depth:
        raise SymbolError("depth exceeds stored homogeneity data")
    kp = S.shift
    order = T.order + S.order
    result = ClassicalSymbol(order, ((0j, 0j),) * (depth + 1), None, T.grid)
    deriv = T.symbol
    for alpha in range(depth + 1):
        if alpha:
            deriv = deriv.derivative()
        term = deriv.times(S.symbol, depth + 1 - alpha).scaled(kp**alpha / math.factorial(alpha))
        result = _add_components(result, term, depth + 1)
    return ModeSymbol(T.k + S.k, result)


def _add_components(x: ClassicalSymbol, y: ClassicalSymbol, depth: int) -> ClassicalSymbol:
    a, b = x.padded(x.order, depth), y.padded(x.order, depth)
    return ClassicalSymbol(x.order, tuple((u[0] + v[0], u[1] + v[1]) for u, v in zip(a, b)),
                           None, x.grid)


def log_commutator(S, mu: float, depth: int) -> ModeSymbol:
    """Symbol of ``[log Q, S]``: ``e^{ikx} s(p) sum_{alpha>=1} (k')^alpha l^{(alpha)}(p) / alpha!``."""
    S = as_mode(S)
    if S.k == 0:
        return ModeSymbol(0, ClassicalSymbol(S.order - 1, ((0j, 0j),) * (depth + 1), None,
                                             S.grid))
    kp = S.shift
    deriv = log_weight_derivative(mu, S.grid, depth + 2)
    result = ClassicalSymbol(S.order - 1, ((0j, 0j),) * (depth + 1), None, S.grid)
    for alpha in range(1, depth + 2):
        if alpha > 1:
            deriv = deriv.derivative()
        term = deriv.times(S.symbol, depth + 2 - alpha).scaled(kp**alpha / math.factorial(alpha))
        result = _add_components(result, term, depth + 1)
    return ModeSymbol(S.k, result)


def composed_matrix(T, S, grid: MomentumGrid) -> np.ndarray:
    """Exact lattice product ``T S`` (dense), the oracle for :func:`symbol_compose`."""
    T, S = as_mode(T), as_mode(S)
    return T.matrix(grid) @ S.matrix(grid)


# -- trace anomaly ------------------------------------------------------------------

def commutator_cutoff_trace(T, S, nmax: int) -> complex:
    """Sum of the diagonal of the exact commutator ``[T, S]`` over ``|n| <= nmax``.

    Matrices are assembled on a grid enlarged by the mode numbers so that the
    diagonal entries near the cutoff are exact.
    """
    T, S = as_mode(T), as_mode(S)
    grid = T.grid
    pad = abs(T.k) + abs(S.k)
    big = grid.with_cutoff(nmax + pad)
    Tm, Sm = T.matrix(big), S.matrix(big)
    diag = np.diag(Tm @ Sm - Sm @ Tm)
    keep = np.isin(big.indices, grid.with_cutoff(nmax).indices)
    return complex(np.sum(diag[keep]))


@dataclass
class AnomalyCheck:
    """``lhs = tr_Q [T, S]``; ``rhs = -Res(T [log Q, S]) / q``.

    ``rhs_reordered = -Res(T [S, log Q]) / q`` is reported alongside because
    the two bracket orders differ by a sign whenever the residue is nonzero.
    """

    lhs: complex
    rhs: complex
    rhs_reordered: complex
    cutoffs: tuple
    cutoff_values: tuple

    @property
    def defect(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def defect_reordered(self) -> float:
        return abs(self.lhs - self.rhs_reordered)

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.defect))


class ExtrapolationError(RuntimeError):
    pass


def trace_anomaly_check(T, S, mu: float, cutoffs: Sequence[int] = (64, 128, 256, 512),
                        depth: int = 3, q: int = 1) -> AnomalyCheck:
    """Compare the weighted trace of ``[T, S]`` with the residue formula.

    The left side is extrapolated from cutoff traces of the exact commutator
    (fit ``A + b_1/N + b_2/N^2 + b_3/N^3``); the right side comes from the
    symbol calculus alone.
    """
    T, S = as_mode(T), as_mode(S)
    if S.k == 0 and T.k == 0:
        return AnomalyCheck(0j, 0j, 0j, tuple(cutoffs), tuple(0j for _ in cutoffs))
    vals = [commutator_cutoff_trace(T, S, n) for n in cutoffs]
    lhs = richardson_limit(cutoffs, np.array(vals), powers=tuple(range(1, len(cutoffs))))
    # consistency of the ladder: the last two raw values and the limit must agree
    spread = abs(vals[-1] - lhs)
    if not np.isfinite(lhs) or spread > 1e-2 * max(1.0, abs(lhs)):
        raise ExtrapolationError(f"cutoff traces do not settle (spread {spread:.3e})")
    comm = log_commutator(S, mu, depth)
    res = wodzicki_residue(symbol_compose(T, comm, depth))
    return AnomalyCheck(complex(lhs), -res / q, res / q, tuple(cutoffs), tuple(vals))


# -- splittings ----------------------------------------------------------------------

def weighted_trace_split(X: ClassicalSymbol, Y: np.ndarray, t: float = 0.0, D0=None,
                         mu: float | None = None, spinor_dim: int = 2) -> complex:
    """``tr Y + tr_Q X`` for an operator ``e^{itD0} (X (x) 1) e^{-itD0} + Y``.

    ``X`` acts as the scalar symbol on each spinor component, so its weighted
    trace counts ``spinor_dim`` times.  The weight mass defaults to the mass
    read off ``D0``; the conjugation by ``e^{itD0}`` commutes with the weight
    and drops out.
    """
    if X.order > -1:
        raise SymbolError("X must have order <= -1")
    if mu is None:
        mu = 0.0 if D0 is None else float(abs(np.asarray(D0)[0, 0]))
    return complex(np.trace(Y)) + spinor_dim * zeta_trace(X, mu)


def lattice_operator(X: ClassicalSymbol, spinor_dim: int = 2) -> np.ndarray:
    """``X (x) 1`` on the spinor lattice (index ``2*i + s``)."""
    return np.kron(X.lattice_matrix(), np.eye(spinor_dim))
