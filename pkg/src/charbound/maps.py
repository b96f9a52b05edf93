"""Constructions of character maps used by the experiments.

* ``walsh_paley``: the dual element of (Z/2)^k with bit set J goes to
  ``sum_{j in J} 2^j mod N``.
* ``random_injection``: a uniformly random injection into Z/N.
* ``sidon``: a map whose graph is a Sidon set of the product group, so that
  ``E(Gamma) = 2|Gamma|^2 - |Gamma|``.  Built by greedy placement followed by
  min-conflicts repair, then verified by an exact energy count.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .additive import MapGraph, graph_energy
from .groups import Element, GroupSpec, add, power
from .operators import AlgebraHom, hom_spectral

log = logging.getLogger(__name__)


def sidon_energy(n: int) -> int:
    """Energy of a Sidon set of size n: only the trivial quadruples survive."""
    return 2 * n * n - n


def walsh_paley_map(k: int, N: int) -> MapGraph:
    G = power(GroupSpec((2,)), k)
    H = GroupSpec((N,))
    pairs = tuple((a, (sum(2**j for j, bit in enumerate(a) if bit) % N,)) for a in G.elements())
    return MapGraph(G, H, pairs)


def random_injection_map(g_dual: GroupSpec, chars: Sequence[Element], h_dual: GroupSpec, rng: np.random.Generator) -> MapGraph:
    if len(chars) > h_dual.order:
        raise ValueError(f"no injection of {len(chars)} characters into a group of order {h_dual.order}")
    targets = rng.choice(h_dual.order, size=len(chars), replace=False)
    return MapGraph(g_dual, h_dual, tuple((tuple(a), h_dual.element(int(t))) for a, t in zip(chars, targets)))


def sidon_set(N: int, n: int) -> list[int]:
    """Greedy sum-distinct set of size n in Z/N (smallest admissible residue first)."""
    chosen: list[int] = []
    sums: set[int] = set()
    for c in range(N):
        new = {(c + x) % N for x in chosen} | {2 * c % N}
        if len(new) == len(chosen) + 1 and not new & sums:
            chosen.append(c)
            sums |= new
            if len(chosen) == n:
                return chosen
    raise ValueError(f"greedy Sidon set in Z/{N} stalls at size {len(chosen)} < {n}")


def sidon_image_map(g_dual: GroupSpec, chars: Sequence[Element], N: int) -> MapGraph:
    """Injection onto a Sidon subset of Z/N; its graph is then Sidon too."""
    targets = sidon_set(N, len(chars))
    return MapGraph(g_dual, GroupSpec((N,)), tuple((tuple(a), (t,)) for a, t in zip(chars, targets)))


@dataclass
class SidonSearch:
    graph: MapGraph
    conflicts: int
    verified: bool
    moves: int


def sidon_graph(
    g_dual: GroupSpec,
    chars: Sequence[Element],
    N: int,
    seed: int = 0,
    max_moves: int = 3000,
    patience: int = 800,
    noise: float = 0.02,
) -> SidonSearch:
    """Search for phi: chars -> Z/N whose graph is a Sidon set.

    A conflict is an extra unordered pair ``{i, j}`` (``i = j`` allowed) whose
    sum in ``G^ x Z/N`` coincides with that of another pair.  Points are placed
    greedily at a least-conflict residue, then conflicted points are moved to
    least-conflict residues (or, with probability ``noise``, a random free
    residue) until none remain, ``max_moves`` is spent, or
    ``patience`` moves pass without a new best.  Residues already taken are
    never chosen, so phi stays injective even when no Sidon graph is found.
    The best assignment is returned with ``verified`` set from an exact
    energy count.
    """
    if len(chars) > N:
        raise ValueError(f"no injection of {len(chars)} characters into Z/{N}")
    rng = np.random.default_rng(seed)
    chars = [g_dual.check(a) for a in chars]
    n = len(chars)
    S = np.array([[g_dual.index(add(g_dual, a, b)) for b in chars] for a in chars], dtype=np.int64)
    cnt = np.zeros((g_dual.order, N), dtype=np.int64)
    t = np.full(n, -1, dtype=np.int64)
    placed = np.zeros(n, dtype=bool)
    residues = np.arange(N)
    taken = np.zeros(N, dtype=np.int64)

    def touch(i: int, sign: int):
        others = np.flatnonzero(placed)
        others = others[others != i]
        np.add.at(cnt, (S[i, others], (t[i] + t[others]) % N), sign)
        cnt[S[i, i], (2 * t[i]) % N] += sign
        taken[t[i]] += sign

    def scores(i: int) -> np.ndarray:
        others = np.flatnonzero(placed)
        others = others[others != i]
        idx = (residues[None, :] + t[others][:, None]) % N
        out = (cnt[S[i, others][:, None], idx] > 0).sum(axis=0)
        out = out + (cnt[S[i, i], (2 * residues) % N] > 0)
        return out + (n + 1) * (taken > 0)

    def pick(sc: np.ndarray) -> int:
        return int(rng.choice(np.flatnonzero(sc == sc.min())))

    for i in rng.permutation(n):
        t[i] = pick(scores(i))
        placed[i] = True
        touch(i, +1)

    def total() -> int:
        return int(np.maximum(cnt - 1, 0).sum())

    conflicts = total()
    best_t, best_c = t.copy(), conflicts
    moves = last_best = 0
    while conflicts and moves < max_moves and moves - last_best < patience:
        moves += 1
        pair_sums = (t[:, None] + t[None, :]) % N
        hot = np.flatnonzero((cnt[S, pair_sums] > 1).any(axis=1))
        i = int(rng.choice(hot))
        touch(i, -1)
        if rng.random() < noise:
            t[i] = int(rng.choice(np.flatnonzero(taken == 0)))
        else:
            t[i] = pick(scores(i))
        touch(i, +1)
        conflicts = total()
        if conflicts < best_c:
            best_t, best_c, last_best = t.copy(), conflicts, moves
    graph = MapGraph(g_dual, GroupSpec((N,)), tuple((a, (int(v),)) for a, v in zip(chars, best_t)))
    verified = graph_energy(graph) == sidon_energy(n)
    if not verified:
        log.warning("no Sidon graph found for %d characters into Z/%d (%d conflicts left)", n, N, best_c)
    return SidonSearch(graph, best_c, verified, moves)


def random_spectral_hom(dom: GroupSpec, cod: GroupSpec, rng: np.random.Generator) -> AlgebraHom:
    """Spectral hom ``L_1(dom) -> L_1(cod)`` from a uniformly random injection of duals."""
    if dom.order > cod.order:
        raise ValueError(f"no injection of a dual of order {dom.order} into one of order {cod.order}")
    targets = rng.choice(cod.order, size=dom.order, replace=False)
    pairs = tuple((b, cod.element(int(t))) for b, t in zip(dom.elements(), targets))
    return hom_spectral(MapGraph(dom, cod, pairs))


def random_surjective_hom(dom: GroupSpec, cod: GroupSpec, size: int, rng: np.random.Generator) -> AlgebraHom:
    """Hom with S a random subset of ``cod``'s dual of the given size and alpha a random surjection."""
    if not dom.order <= size <= cod.order:
        raise ValueError("need |dom| <= size <= |cod|")
    S = rng.choice(cod.order, size=size, replace=False)
    alpha = np.concatenate([rng.permutation(dom.order), rng.integers(dom.order, size=size - dom.order)])
    pairs = tuple((cod.element(int(s)), dom.element(int(a))) for s, a in zip(S, alpha))
    return AlgebraHom(dom, cod, MapGraph(cod, dom, pairs))
