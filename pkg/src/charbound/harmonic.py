"""Fourier analysis on finite Abelian groups.

Measure conventions are fixed throughout the package: Haar probability on a
group (norms are averages) and counting measure on its dual.  With these,

    f^(a) = (1/|G|) sum_x f(x) conj(chi_a(x)),    f(x) = sum_a f^(a) chi_a(x),

and Parseval reads ``sum_a |f^(a)|^2 = ||f||_2^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .groups import Element, GroupSpec, power

INF = math.inf


@dataclass(frozen=True, eq=False)
class GroupFunction:
    group: GroupSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if v.size != self.group.order:
            raise ValueError(f"{v.size} values for a group of order {self.group.order}")
        object.__setattr__(self, "values", v)

    def __add__(self, other: GroupFunction) -> GroupFunction:
        _same(self.group, other.group)
        return GroupFunction(self.group, self.values + other.values)

    def __sub__(self, other: GroupFunction) -> GroupFunction:
        _same(self.group, other.group)
        return GroupFunction(self.group, self.values - other.values)

    def __mul__(self, c: complex) -> GroupFunction:
        return GroupFunction(self.group, c * self.values)

    __rmul__ = __mul__

    def __call__(self, x: Sequence[int]) -> complex:
        return complex(self.values[self.group.index(x)])

    def norm(self, p: float = 2.0) -> float:
        return lp_norm(self, p)


@dataclass(frozen=True, eq=False)
class Spectrum:
    group: GroupSpec
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128).reshape(-1)
        if c.size != self.group.order:
            raise ValueError(f"{c.size} coefficients for a dual of order {self.group.order}")
        object.__setattr__(self, "coeffs", c)

    def __call__(self, a: Sequence[int]) -> complex:
        return complex(self.coeffs[self.group.index(a)])

    def support(self, tol: float = 0.0) -> set[Element]:
        return {self.group.element(int(i)) for i in np.flatnonzero(np.abs(self.coeffs) > tol)}


def _same(g: GroupSpec, h: GroupSpec):
    if g != h:
        raise ValueError(f"group mismatch: {g} vs {h}")


# --- characters -------------------------------------------------------------


def char_eval(g: GroupSpec, a: Sequence[int], x: Sequence[int]) -> complex:
    a, x = g.check(a), g.check(x)
    frac = sum(((ai * xi) % n) / n for ai, xi, n in zip(a, x, g.orders))
    return complex(np.exp(2j * np.pi * frac))


def char_table(g: GroupSpec, chars: Iterable[Sequence[int]]) -> np.ndarray:
    """Rows are the characters in ``chars`` evaluated at every element of g."""
    A = np.array([g.check(a) for a in chars], dtype=np.int64).reshape(-1, g.rank)
    X = g.element_array()
    n = np.array(g.orders, dtype=np.int64)
    frac = np.zeros((A.shape[0], X.shape[0]))
    for j in range(g.rank):
        frac += np.outer(A[:, j], X[:, j]) % n[j] / n[j]
    return np.exp(2j * np.pi * frac)


def character(g: GroupSpec, a: Sequence[int]) -> GroupFunction:
    return GroupFunction(g, char_table(g, [a])[0])


def point_mass(g: GroupSpec, y: Sequence[int], scale: float | None = None) -> GroupFunction:
    """``scale * delta_y``; the default scale |G| gives unit L_1 norm."""
    v = np.zeros(g.order, dtype=np.complex128)
    v[g.index(g.check(y))] = g.order if scale is None else scale
    return GroupFunction(g, v)


# --- transforms -------------------------------------------------------------


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis (length 2^L)."""
    x = np.array(values, dtype=np.complex128)
    size = x.shape[-1]
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    lead = x.shape[:-1]
    h = 1
    while h < size:
        x = x.reshape(*lead, size // (2 * h), 2, h)
        a, b = x[..., 0, :], x[..., 1, :]
        x = np.stack((a + b, a - b), axis=-2)
        h *= 2
    return x.reshape(*lead, size)


def _cyclic_matrix(n: int, sign: int) -> np.ndarray:
    k = np.arange(n)
    return np.exp(sign * 2j * np.pi * (np.outer(k, k) % n) / n)


def _transform(values: np.ndarray, g: GroupSpec, sign: int) -> np.ndarray:
    """``out[a] = sum_x values[x] exp(sign 2 pi i <a, x>)`` over the last axis."""
    values = np.asarray(values, dtype=np.complex128)
    lead = values.shape[:-1]
    if g.rank == 0:
        return values.copy()
    if all(n == 2 for n in g.orders):
        return fwht(values)
    x = values.reshape(*lead, *g.orders)
    nlead = len(lead)
    for j, n in enumerate(g.orders):
        if n == 2:
            x = np.moveaxis(x, nlead + j, -1)
            x = np.stack((x[..., 0] + x[..., 1], x[..., 0] - x[..., 1]), axis=-1)
            x = np.moveaxis(x, -1, nlead + j)
        else:
            x = np.moveaxis(np.tensordot(x, _cyclic_matrix(n, sign), axes=([nlead + j], [1])), -1, nlead + j)
    return x.reshape(*lead, g.order)


def dft(f: GroupFunction) -> Spectrum:
    return Spectrum(f.group, _transform(f.values, f.group, -1) / f.group.order)


def idft(s: Spectrum) -> GroupFunction:
    return GroupFunction(s.group, _transform(s.coeffs, s.group, +1))


def dft_array(values: np.ndarray, g: GroupSpec) -> np.ndarray:
    """Batched :func:`dft` on raw arrays of shape ``(..., |G|)``."""
    return _transform(values, g, -1) / g.order


def idft_array(coeffs: np.ndarray, g: GroupSpec) -> np.ndarray:
    return _transform(coeffs, g, +1)


# --- norms and basic operations ---------------------------------------------


def lp_norm_array(values: np.ndarray, p: float, axis: int = -1) -> np.ndarray:
    a = np.abs(values)
    if p == INF:
        return a.max(axis=axis)
    if p < 1:
        raise ValueError(f"L_p norms need p >= 1, got {p}")
    if p == 2:
        return np.sqrt(np.mean(a * a, axis=axis))
    if p == 1:
        return a.mean(axis=axis)
    return np.mean(a**p, axis=axis) ** (1.0 / p)


def lp_norm(f: GroupFunction, p: float) -> float:
    """Haar-probability L_p norm; ``p = math.inf`` gives the sup norm."""
    return float(lp_norm_array(f.values, p))


def inner(f: GroupFunction, g: GroupFunction) -> complex:
    _same(f.group, g.group)
    return complex(np.mean(f.values * np.conj(g.values)))


def translate(f: GroupFunction, z: Sequence[int]) -> GroupFunction:
    """``tau_z f(x) = f(x + z)``."""
    g = f.group
    z = g.check(z)
    if g.rank == 0:
        return f
    x = f.values.reshape(g.orders)
    x = np.roll(x, shift=tuple(-v for v in z), axis=tuple(range(g.rank)))
    return GroupFunction(g, x.reshape(-1))


def convolve(f: GroupFunction, h: GroupFunction) -> GroupFunction:
    """``(f * h)(x) = E_y f(y) h(x - y)`` under Haar probability measure."""
    _same(f.group, h.group)
    return idft(Spectrum(f.group, dft(f).coeffs * dft(h).coeffs))


# --- projections and kernels ------------------------------------------------


def _mask(g: GroupSpec, chars: Iterable[Sequence[int]]) -> np.ndarray:
    m = np.zeros(g.order, dtype=bool)
    for a in chars:
        m[g.index(g.check(a))] = True
    return m


def project(f: GroupFunction, chars: Iterable[Sequence[int]]) -> GroupFunction:
    """``pi_Lambda f = sum_{a in Lambda} f^(a) chi_a``."""
    s = dft(f)
    return idft(Spectrum(f.group, np.where(_mask(f.group, chars), s.coeffs, 0)))


def dirichlet_kernel(g: GroupSpec, chars: Iterable[Sequence[int]]) -> GroupFunction:
    """``D_Lambda = sum_{a in Lambda} chi_a``."""
    m = _mask(g, chars)
    if not m.any():
        raise ValueError("Dirichlet kernel of an empty character set")
    return GroupFunction(g, _transform(m.astype(np.complex128), g, +1))


def projection_norm_1to1(g: GroupSpec, chars: Iterable[Sequence[int]]) -> float:
    """``||pi_Lambda||_{1->1}``.

    pi_Lambda is convolution with D_Lambda, and the L_1 unit ball of a finite
    group is the convex hull of unimodular multiples of ``|G| delta_y``, so the
    norm is ``||D_Lambda||_1``.
    """
    return lp_norm(dirichlet_kernel(g, chars), 1)


def projection_norm_pointmass(g: GroupSpec, chars: Iterable[Sequence[int]]) -> float:
    """Same quantity as :func:`projection_norm_1to1`, by maximising over point masses."""
    chars = list(chars)
    if not chars:
        raise ValueError("empty character set")
    return max(lp_norm(project(point_mass(g, y), chars), 1) for y in g.elements())


def reflect(f: GroupFunction) -> GroupFunction:
    """``x -> f(-x)``."""
    g = f.group
    if g.rank == 0:
        return f
    x = f.values.reshape(g.orders)
    for ax in range(g.rank):
        x = np.roll(np.flip(x, axis=ax), 1, axis=ax)
    return GroupFunction(g, x.reshape(-1))


def graph_function(prod: GroupSpec, points: Iterable[Sequence[int]]) -> GroupFunction:
    """``phi(u) = sum_{gamma in Gamma} gamma(-u)``."""
    m = _mask(prod, points).astype(np.complex128)
    return reflect(GroupFunction(prod, _transform(m, prod, +1)))


def algebra_norm_indicator(prod: GroupSpec, points: Iterable[Sequence[int]]) -> float:
    """Fourier-algebra norm of ``1_Gamma``: L_1 norm of the function with spectrum 1_Gamma."""
    m = _mask(prod, points)
    if not m.any():
        return 0.0
    return float(lp_norm_array(_transform(m.astype(np.complex128), prod, +1), 1))


# --- Walsh and trigonometric systems on dyadic / uniform grids --------------


def rademacher(L: int, j: int) -> np.ndarray:
    """``r_j`` sampled at ``t / 2^L``: +1 iff ``frac(2^j x) < 1/2`` (0-based j)."""
    if not 0 <= j < L:
        raise ValueError(f"Rademacher index {j} needs 0 <= j < L={L}")
    t = np.arange(2**L, dtype=np.int64)
    # frac(2^j t / 2^L) < 1/2  <=>  (t 2^j mod 2^L) < 2^(L-1)
    return np.where((t << j) % (1 << L) < (1 << (L - 1)), 1, -1)


def sample_walsh(L: int, J: Iterable[int]) -> GroupFunction:
    """Walsh function ``w_J = prod_{j in J} r_j`` on the 2^L dyadic points, as a function on (Z/2)^L.

    The point ``t / 2^L`` is the element whose binary digits (most significant
    first) are the coordinates, so its canonical index is t.  With this
    identification ``w_J`` is the character whose j-th coordinate is ``[j in J]``.
    """
    vals = np.ones(2**L, dtype=np.int64)
    for j in set(J):
        vals *= rademacher(L, j)
    return GroupFunction(power(GroupSpec((2,)), L), vals)


def walsh_index(L: int, J: Iterable[int]) -> Element:
    J = set(J)
    if any(not 0 <= j < L for j in J):
        raise ValueError(f"indices {sorted(J)} out of range for L={L}")
    return tuple(int(j in J) for j in range(L))


def sample_trig(N: int, z: int) -> GroupFunction:
    """``e_z(x) = exp(2 pi i z x)`` at the points ``t / N``, as a function on Z/N."""
    if N < 1:
        raise ValueError("N must be positive")
    t = np.arange(N, dtype=np.int64)
    # reduce z t mod N before scaling so large z keep full precision
    return GroupFunction(GroupSpec((N,)) if N > 1 else GroupSpec(()), np.exp(2j * np.pi * ((z * t) % N) / N))
