"""Sumsets, additive energy and the exact counting steps behind the energy bound for graphs.

Every count here is an exact Python/numpy integer; nothing passes through
floating point except the derived ratios in :class:`PropKReport`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .groups import Element, GroupSpec, add, dilate_set, dilated_group_size, direct_product

COUNT_CAP = 2**63 - 1


@dataclass(frozen=True)
class MapGraph:
    """Graph ``{(lam, phi(lam))}`` of a map from a set of G^ characters into H^."""

    g_dual: GroupSpec
    h_dual: GroupSpec
    pairs: tuple[tuple[Element, Element], ...]

    def __post_init__(self):
        pairs = tuple((self.g_dual.check(a), self.h_dual.check(b)) for a, b in self.pairs)
        if len({a for a, _ in pairs}) != len(pairs):
            raise ValueError("first coordinates must be distinct (not the graph of a function)")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_dict(cls, g_dual: GroupSpec, h_dual: GroupSpec, phi: dict) -> MapGraph:
        return cls(g_dual, h_dual, tuple(sorted(phi.items())))

    @property
    def prod_dual(self) -> GroupSpec:
        return direct_product(self.g_dual, self.h_dual)

    @property
    def domain(self) -> list[Element]:
        return [a for a, _ in self.pairs]

    @property
    def image(self) -> set[Element]:
        return {b for _, b in self.pairs}

    @property
    def points(self) -> list[Element]:
        """Graph points as elements of the product group."""
        return [a + b for a, b in self.pairs]

    def as_dict(self) -> dict[Element, Element]:
        return dict(self.pairs)

    def __len__(self):
        return len(self.pairs)


def sumset(g: GroupSpec, A: Iterable[Sequence[int]], B: Iterable[Sequence[int]]) -> set[Element]:
    B = list(B)
    return {add(g, a, b) for a in A for b in B}


def iterated_sumset(g: GroupSpec, m: int, A: Iterable[Sequence[int]]) -> set[Element]:
    """``mA = A + ... + A`` (m copies); not to be confused with the dilate ``m . A``."""
    if m < 1:
        raise ValueError("iterated sumset needs m >= 1")
    A = {tuple(a) for a in A}
    out = set(A)
    for _ in range(m - 1):
        out = sumset(g, out, A)
    return out


def _indices(g: GroupSpec, S: Iterable[Sequence[int]]) -> np.ndarray:
    arr = np.array([g.check(s) for s in S], dtype=np.int64).reshape(-1, g.rank)
    return arr


def _pair_sum_counts(g: GroupSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Multiplicities ``r(s) = #{(a, b) in A x B : a + b = s}`` over the occupied s."""
    if len(A) == 0 or len(B) == 0:
        return np.zeros(0, dtype=np.int64)
    idx = np.zeros((len(A), len(B)), dtype=np.int64)
    for j, n in enumerate(g.orders):
        idx = idx * n + (A[:, j, None] + B[None, :, j]) % n
    _, counts = np.unique(idx.ravel(), return_counts=True)
    return counts.astype(np.int64)


def _check_energy_cap(size: int):
    if size**3 > COUNT_CAP:
        raise OverflowError(f"|Lambda|^3 = {size**3} does not fit in 63 bits")


def energy(g: GroupSpec, S: Iterable[Sequence[int]]) -> int:
    """Additive energy ``#{(l1, l2, l3, l4) in S^4 : l1 + l2 = l3 + l4}``, as ``sum_s r(s)^2``."""
    A = np.unique(_indices(g, S), axis=0)
    _check_energy_cap(len(A))
    r = _pair_sum_counts(g, A, A)
    return int(np.dot(r, r))


def graph_energy(graph: MapGraph) -> int:
    return energy(graph.prod_dual, graph.points)


@dataclass(frozen=True)
class ConvStats:
    """Counting-measure statistics of ``1_X * 1_{m.X}``."""

    l1: int
    l2sq: int
    support: int
    x_size: int
    mx_size: int
    mg_size: int

    @property
    def cauchy_schwarz_ok(self) -> bool:
        return self.l1 * self.l1 <= self.l2sq * self.support

    @property
    def counting_bound(self) -> int:
        """``|X| |m.G| |m.X|``, the number of triples that determine a quadruple."""
        return self.x_size * self.mg_size * self.mx_size

    @property
    def counting_ok(self) -> bool:
        return self.l2sq <= self.counting_bound


def conv_stats(g: GroupSpec, X: Iterable[Sequence[int]], m: int) -> ConvStats:
    if m < 1:
        raise ValueError("m must be positive")
    X = {g.check(x) for x in X}
    mX = dilate_set(g, m, X)
    _check_energy_cap(max(len(X), len(mX)))
    c = _pair_sum_counts(g, _indices(g, X), _indices(g, mX))
    return ConvStats(
        l1=int(c.sum()),
        l2sq=int(np.dot(c, c)),
        support=len(c),
        x_size=len(X),
        mx_size=len(mX),
        mg_size=dilated_group_size(g, m),
    )


@dataclass(frozen=True)
class PropKReport:
    energy: int
    size: int
    mg_size: int
    m_image_size: int
    m: int

    @property
    def normalized_energy(self) -> float:
        return self.energy / self.size**3

    @property
    def ratio(self) -> float:
        return self.mg_size / self.m_image_size

    @property
    def empirical_exponent(self) -> float | None:
        """``log(eps) / log(ratio)``; None when the ratio is 1."""
        if self.mg_size <= self.m_image_size:
            return None
        return float(np.log(self.normalized_energy) / np.log(self.ratio))


def propk_report(graph: MapGraph, m: int) -> PropKReport:
    """Raw quantities of the graph energy bound: E, |Gamma|, |m.G^|, |m.Im phi|.

    The implicit constant of the bound is never instantiated; only the sanity
    facts ``eps <= 1`` and positivity are checked.
    """
    if len(graph) == 0:
        raise ValueError("empty graph")
    rep = PropKReport(
        energy=graph_energy(graph),
        size=len(graph),
        mg_size=dilated_group_size(graph.g_dual, m),
        m_image_size=len(dilate_set(graph.h_dual, m, graph.image)),
        m=m,
    )
    assert 0 < rep.energy <= rep.size**3
    return rep


def doubling(g: GroupSpec, X: Sequence[Element]) -> int:
    return len(sumset(g, X, X))


def bsg_heuristic(
    g: GroupSpec, points: Sequence[Sequence[int]], K: float, mode: str = "exhaustive"
) -> set[Element] | None:
    """Largest X among ``points`` with ``|X + X| <= K |X|``; None if there is none.

    Heuristic stand-in for a Balog-Szemeredi-Gowers extraction.  ``exhaustive``
    searches subsets by decreasing size (exact, exponential, at most 64
    points); ``greedy`` repeatedly drops the point whose removal shrinks
    ``X + X`` the most.
    """
    pts = sorted({g.check(p) for p in points})
    if not pts or K < 1:
        return None
    if mode == "exhaustive":
        if len(pts) > 64:
            raise ValueError("exhaustive mode is capped at 64 points")
        full = doubling(g, pts)
        for size in range(len(pts), 0, -1):
            if full <= K * size:
                # every subset of this size has |X+X| <= |P+P| <= K size
                return set(pts[:size])
            for X in itertools.combinations(pts, size):
                if doubling(g, X) <= K * size:
                    return set(X)
        return None
    if mode == "greedy":
        X = list(pts)
        while X:
            if doubling(g, X) <= K * len(X):
                return set(X)
            scores = [(doubling(g, X[:i] + X[i + 1 :]), i) for i in range(len(X))]
            _, drop = min(scores)
            X.pop(drop)
        return None
    raise ValueError(f"unknown mode {mode!r}")

