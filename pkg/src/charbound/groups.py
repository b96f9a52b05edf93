"""Finite Abelian groups as products of cyclic factors.

A group is a :class:`GroupSpec` holding the cyclic moduli ``(n_1, ..., n_k)``.
Elements are plain tuples of residues.  The same GroupSpec also stands for the dual
group: the character indexed by ``a`` is ``x -> exp(2 pi i sum a_j x_j / n_j)``
(see :mod:`charbound.harmonic`).

Elements are numbered by a mixed-radix index, row-major with factor 1 most
significant, which matches numpy's C-order reshape to ``spec.orders``.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
from sympy import factorint

Element = tuple[int, ...]

ORDER_CAP = 2**63 - 1


@dataclass(frozen=True)
class GroupSpec:
    orders: tuple[int, ...]
    order: int = field(init=False, compare=False)

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        if any(n < 2 for n in orders):
            raise ValueError(f"cyclic moduli must be >= 2, got {orders}; use make_group to drop 1s")
        total = math.prod(orders)
        if total > ORDER_CAP:
            raise OverflowError(f"group order {total} exceeds cap 2^63-1")
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "order", total)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def zero(self) -> Element:
        return (0,) * self.rank

    def __repr__(self):
        if not self.orders:
            return "GroupSpec(trivial)"
        return "GroupSpec(" + " x ".join(f"Z/{n}" for n in self.orders) + ")"

    def elements(self) -> Iterator[Element]:
        """All elements in canonical index order."""
        return itertools.product(*(range(n) for n in self.orders))

    def element_array(self) -> np.ndarray:
        """``(order, rank)`` integer array of all elements in index order."""
        if not self.orders:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.indices(self.orders).reshape(self.rank, -1)
        return grids.T.astype(np.int64)

    def index(self, x: Sequence[int]) -> int:
        i = 0
        for v, n in zip(x, self.orders):
            i = i * n + v
        return i

    def element(self, i: int) -> Element:
        out = []
        for n in reversed(self.orders):
            i, r = divmod(i, n)
            out.append(r)
        return tuple(reversed(out))

    def check(self, x: Sequence[int]) -> Element:
        """Validate ``x`` and return it as a tuple."""
        x = tuple(int(v) for v in x)
        if len(x) != self.rank:
            raise ValueError(f"element {x} has {len(x)} coordinates, {self} needs {self.rank}")
        for v, n in zip(x, self.orders):
            if not 0 <= v < n:
                raise ValueError(f"residue {v} out of range for Z/{n}")
        return x

    def reduce(self, x: Sequence[int]) -> Element:
        """Reduce an arbitrary integer vector into canonical residues."""
        if len(x) != self.rank:
            raise ValueError(f"element {tuple(x)} does not match {self}")
        return tuple(int(v) % n for v, n in zip(x, self.orders))


def make_group(orders: Iterable[int]) -> GroupSpec:
    """Canonical GroupSpec: factors equal to 1 are dropped."""
    orders = [int(n) for n in orders]
    if any(n < 1 for n in orders):
        raise ValueError(f"moduli must be positive, got {orders}")
    return GroupSpec(tuple(n for n in orders if n != 1))


def direct_product(*groups: GroupSpec) -> GroupSpec:
    return GroupSpec(tuple(n for g in groups for n in g.orders))


def power(g: GroupSpec, n: int) -> GroupSpec:
    return GroupSpec(g.orders * n)


def add(g: GroupSpec, a: Sequence[int], b: Sequence[int]) -> Element:
    if len(a) != g.rank or len(b) != g.rank:
        raise ValueError(f"shape mismatch for {g}: {tuple(a)}, {tuple(b)}")
    return tuple((u + v) % n for u, v, n in zip(a, b, g.orders))


def neg(g: GroupSpec, a: Sequence[int]) -> Element:
    if len(a) != g.rank:
        raise ValueError(f"shape mismatch for {g}: {tuple(a)}")
    return tuple((-u) % n for u, n in zip(a, g.orders))


def sub(g: GroupSpec, a: Sequence[int], b: Sequence[int]) -> Element:
    return add(g, a, neg(g, b))


def dilate(g: GroupSpec, m: int, x: Sequence[int]) -> Element:
    """``m . x``, the m-fold sum of x with itself (``0 . x = 0``)."""
    if m < 0:
        raise ValueError("dilation factor must be nonnegative")
    if len(x) != g.rank:
        raise ValueError(f"shape mismatch for {g}: {tuple(x)}")
    return tuple((m * v) % n for v, n in zip(x, g.orders))


def dilate_set(g: GroupSpec, m: int, S: Iterable[Sequence[int]]) -> set[Element]:
    return {dilate(g, m, s) for s in S}


def dilated_group_size(g: GroupSpec, m: int) -> int:
    """``|m . G|``; multiplication by m on Z/n has image of size n / gcd(n, m)."""
    return math.prod(n // math.gcd(n, m) for n in g.orders)


def exponent(g: GroupSpec) -> int:
    return math.lcm(*g.orders) if g.orders else 1


def element_order(g: GroupSpec, x: Sequence[int]) -> int:
    return math.lcm(*(n // math.gcd(n, v) for v, n in zip(x, g.orders))) if g.orders else 1


def invariant_factors(g: GroupSpec) -> list[int]:
    """Invariant factors ``d_1 | d_2 | ... | d_r`` of g.

    Each modulus is split into prime powers; for every prime the powers are
    sorted in descending order and the j-th largest power of each prime goes
    into ``d_{r-j}``.
    """
    by_prime: dict[int, list[int]] = {}
    for n in g.orders:
        for p, e in factorint(n).items():
            by_prime.setdefault(p, []).append(p**e)
    if not by_prime:
        return []
    r = max(len(v) for v in by_prime.values())
    factors = [1] * r
    for powers in by_prime.values():
        powers.sort(reverse=True)
        for j, q in enumerate(powers):
            factors[r - 1 - j] *= q
    return factors


def subgroup_generated(g: GroupSpec, F: Iterable[Sequence[int]]) -> set[Element]:
    """Subgroup generated by F, by breadth-first saturation from 0."""
    gens = [g.check(f) for f in F]
    seen = {g.zero}
    queue = deque([g.zero])
    while queue:
        x = queue.popleft()
        for f in gens:
            y = add(g, x, f)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    # finite group: closure under +f already contains -f
    return seen


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism ``domain -> codomain`` given by an integer matrix.

    Row i of ``matrix`` belongs to codomain factor i; column j to domain
    factor j.  It is a genuine homomorphism iff ``m_i | n_j * M[i][j]``.
    """

    domain: GroupSpec
    codomain: GroupSpec
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(
            tuple(int(v) % m for v in row) for row, m in zip(self.matrix, self.codomain.orders)
        )
        if len(self.matrix) != self.codomain.rank or any(len(r) != self.domain.rank for r in rows):
            raise ValueError(
                f"matrix must be {self.codomain.rank} x {self.domain.rank} for {self.domain} -> {self.codomain}"
            )
        for i, m in enumerate(self.codomain.orders):
            for j, n in enumerate(self.domain.orders):
                if (n * rows[i][j]) % m:
                    raise ValueError(
                        f"entry M[{i}][{j}]={rows[i][j]} does not respect Z/{n} -> Z/{m}"
                    )
        object.__setattr__(self, "matrix", rows)

    def __call__(self, x: Sequence[int]) -> Element:
        return hom_apply(self, x)

    def image(self) -> set[Element]:
        return {self(x) for x in self.domain.elements()}

    def is_surjective(self) -> bool:
        gens = [self(e) for e in unit_vectors(self.domain)]
        return len(subgroup_generated(self.codomain, gens)) == self.codomain.order


def hom_apply(h: GroupHom, x: Sequence[int]) -> Element:
    x = h.domain.check(x)
    return tuple(
        sum(c * v for c, v in zip(row, x)) % m for row, m in zip(h.matrix, h.codomain.orders)
    )


def identity_hom(g: GroupSpec) -> GroupHom:
    return GroupHom(g, g, tuple(tuple(int(i == j) for j in range(g.rank)) for i in range(g.rank)))


def unit_vectors(g: GroupSpec) -> list[Element]:
    return [tuple(int(i == j) for j in range(g.rank)) for i in range(g.rank)]


def dual_hom(h: GroupHom) -> GroupHom:
    """The dual map ``chi -> chi o h`` from codomain characters to domain characters.

    Under the self-duality convention the character ``b`` of the codomain
    pulls back to the domain character with ``a_j = sum_i b_i M_ij n_j / m_i``.
    """
    n, m = h.domain.orders, h.codomain.orders
    M = h.matrix
    rows = tuple(
        tuple(M[i][j] * n[j] // m[i] for i in range(h.codomain.rank)) for j in range(h.domain.rank)
    )
    return GroupHom(h.codomain, h.domain, rows)


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small) | {n // d for d in small})


def best_dilation(g_dual: GroupSpec, h_dual: GroupSpec) -> tuple[int, int, int]:
    """Dilation m shrinking ``m . G^`` as far as possible while ``m . H^`` stays nontrivial.

    Candidates are the divisors of the joint exponent; returns
    ``(m, |m . G^|, |m . H^|)`` with ties broken by the smallest m.
    """
    if g_dual.order == 1 or h_dual.order == 1:
        raise ValueError("both groups must be nontrivial")
    best = None
    for m in divisors(math.lcm(exponent(g_dual), exponent(h_dual))):
        size_h = dilated_group_size(h_dual, m)
        if size_h == 1:
            continue
        size_g = dilated_group_size(g_dual, m)
        if best is None or size_g < best[1]:
            best = (m, size_g, size_h)
    return best
