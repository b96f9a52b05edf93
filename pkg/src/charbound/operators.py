"""Character-mapping operators, the energy certificate for their L_p norms, and
algebra homomorphisms ``L_1(H^n) -> L_1(G)``.

A :class:`CharOperator` is determined by a map ``phi`` on a character set
``Lambda`` of G; it sends ``chi_lam`` to ``chi_phi(lam)`` and extends linearly.
For ``1 <= p < 2`` its norm on ``L_p^Lambda(G)`` is bounded below by

    (|Lambda|^3 / (K^6 E(Gamma)))^((2 - p) / (2p)),

where ``K = ||pi_Lambda||_{1->1}`` and ``Gamma`` is the graph of phi.
:func:`verify_prop_main_chain` recomputes every inequality that leads there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import harmonic as hm
from .additive import MapGraph, graph_energy
from .groups import Element, GroupHom, GroupSpec, dual_hom, direct_product

LEAK_TOL = 1e-9
CHAIN_RTOL = 1e-9


# --- character-mapping operators --------------------------------------------


@dataclass(frozen=True)
class CharOperator:
    g: GroupSpec
    h: GroupSpec
    graph: MapGraph

    def __post_init__(self):
        if self.graph.g_dual != self.g or self.graph.h_dual != self.h:
            raise ValueError("graph must map characters of g to characters of h")
        if len(self.graph) == 0:
            raise ValueError("empty character set")

    @property
    def chars(self) -> list[Element]:
        return self.graph.domain

    @property
    def targets(self) -> list[Element]:
        return [b for _, b in self.graph.pairs]

    @property
    def injective(self) -> bool:
        return len(self.graph.image) == len(self.graph)

    def synthesis(self) -> tuple[np.ndarray, np.ndarray]:
        """Matrices ``(A_G, A_H)`` with ``f = A_G c`` and ``T f = A_H c`` for coefficients c on Lambda."""
        return hm.char_table(self.g, self.chars).T, hm.char_table(self.h, self.targets).T


def charop_apply(T: CharOperator, f: hm.GroupFunction) -> hm.GroupFunction:
    """Apply T to f, which must have its spectrum inside Lambda."""
    if f.group != T.g:
        raise ValueError(f"function lives on {f.group}, operator on {T.g}")
    s = hm.dft(f).coeffs
    src = np.array([T.g.index(a) for a in T.chars])
    inside = np.zeros(T.g.order, dtype=bool)
    inside[src] = True
    leak = np.abs(s[~inside]).max(initial=0.0)
    if leak > LEAK_TOL:
        raise ValueError(f"spectrum leaks outside Lambda (max |coefficient| {leak:.3g}); project first")
    out = np.zeros(T.h.order, dtype=np.complex128)
    np.add.at(out, [T.h.index(b) for b in T.targets], s[src])
    return hm.idft(hm.Spectrum(T.h, out))


@dataclass(frozen=True)
class NormCertificate:
    p: float
    K: float
    energy: int
    lambda_size: int
    theta: float
    raw_bound: float
    effective_bound: float


def _cert_exponent(p: float) -> float:
    return (2 - p) / (2 * p)


def energy_certificate(T: CharOperator, p: float) -> NormCertificate:
    """Lower bound for ``||T||_{p->p}`` from K and the graph energy."""
    if not 1 <= p < 2:
        raise ValueError(f"certificate needs 1 <= p < 2, got {p}")
    K = hm.projection_norm_1to1(T.g, T.chars)
    E = graph_energy(T.graph)
    n = len(T.graph)
    raw = (n**3 / (K**6 * E)) ** _cert_exponent(p)
    return NormCertificate(
        p=p,
        K=K,
        energy=E,
        lambda_size=n,
        theta=(4 - 2 * p) / (4 - p),
        raw_bound=raw,
        effective_bound=max(1.0, raw),
    )


@dataclass(frozen=True)
class Link:
    name: str
    lhs: float
    relation: str
    rhs: float
    passed: bool

    def __str__(self):
        mark = "ok" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: {self.lhs:.12g} {self.relation} {self.rhs:.12g}"


def _link(name: str, lhs: float, relation: str, rhs: float, rtol: float = CHAIN_RTOL) -> Link:
    slack = rtol * max(1.0, abs(lhs), abs(rhs))
    if relation == "==":
        ok = abs(lhs - rhs) <= slack
    elif relation == "<=":
        ok = lhs <= rhs + slack
    elif relation == ">=":
        ok = lhs >= rhs - slack
    else:
        raise ValueError(relation)
    return Link(name, float(lhs), relation, float(rhs), bool(ok))


@dataclass
class ChainReport:
    p: float
    quantities: dict[str, float] = field(default_factory=dict)
    links: list[Link] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(link.passed for link in self.links)

    def failures(self) -> list[Link]:
        return [link for link in self.links if not link.passed]

    def __str__(self):
        return "\n".join(str(link) for link in self.links)


def _coincidence_sum(T: CharOperator, coeffs: np.ndarray) -> complex:
    """``sum c1 c4 conj(c2 c3)`` over quadruples with ``l1+l4 = l2+l3`` and ``phi`` sums equal.

    Grouping ordered pairs by their sum in the product dual, this is
    ``sum_s |R(s)|^2`` with ``R(s) = sum_{l1 + l4 = s} c1 c4``.
    """
    prod = T.graph.prod_dual
    P = np.array(T.graph.points, dtype=np.int64).reshape(-1, prod.rank)
    idx = np.zeros((len(P), len(P)), dtype=np.int64)
    for j, n in enumerate(prod.orders):
        idx = idx * n + (P[:, j, None] + P[None, :, j]) % n
    _, inv = np.unique(idx.ravel(), return_inverse=True)
    R = np.zeros(inv.max() + 1, dtype=np.complex128)
    np.add.at(R, inv, np.outer(coeffs, coeffs).ravel())
    return complex(np.vdot(R, R))


def verify_prop_main_chain(T: CharOperator, p: float) -> ChainReport:
    """Recompute each step of the energy certificate for T at exponent p.

    On a finite group the extremiser can be taken to be ``k = |G| delta_0``,
    which has unit L_1 norm and ``<k, g> = g(0) = |Lambda| = ||g||_inf`` for
    ``g = D_Lambda``; so ``f = pi_Lambda k = D_Lambda``.  Averages over z run
    over every z in G.
    """
    if not 1 <= p < 2:
        raise ValueError(f"chain needs 1 <= p < 2, got {p}")
    G, chars = T.g, T.chars
    rep = ChainReport(p)
    q = rep.quantities
    cert = energy_certificate(T, p)
    K, E, n = cert.K, cert.energy, cert.lambda_size
    theta = (4 - 2 * p) / (4 - p)
    q.update(K=K, E=E, lambda_size=n, theta=theta)

    g_fun = hm.dirichlet_kernel(G, chars)
    f = hm.project(hm.point_mass(G, G.zero), chars)
    fhat = hm.dft(f)
    fhat_on = np.array([fhat(a) for a in chars])
    f1, f2, fp = hm.lp_norm(f, 1), hm.lp_norm(f, 2), hm.lp_norm(f, p)
    q.update(f_L1=f1, f_L2=f2, f_Lp=fp)

    links = rep.links
    # (i) the extremiser: <f, g> = |Lambda| = ||g||_inf and ||f||_1 = K
    links.append(_link("(i) <f,g> = |Lambda|", abs(hm.inner(f, g_fun)), "==", n))
    links.append(_link("(i) ||g||_inf = |Lambda|", hm.lp_norm(g_fun, hm.INF), "==", n))
    links.append(_link("(i) ||f||_1 = K", f1, "==", K))
    # (ii) ||f||_2^2 = |Lambda|, and Cauchy-Schwarz ||f||_2^6 >= (|<f,g>|/||g||_2)^6 >= |Lambda|^3
    links.append(_link("(ii) ||f||_2^2 = |Lambda|", f2**2, "==", n))
    cs = (abs(hm.inner(f, g_fun)) / hm.lp_norm(g_fun, 2)) ** 6
    links.append(_link("(ii) ||f||_2^6 >= (|<f,g>|/||g||_2)^6", f2**6, ">=", cs))
    links.append(_link("(ii) (|<f,g>|/||g||_2)^6 >= |Lambda|^3", cs, ">=", n**3))

    Tf = np.array([charop_apply(T, hm.translate(f, z)).values for z in G.elements()])
    n2 = hm.lp_norm_array(Tf, 2, axis=1)
    n4 = hm.lp_norm_array(Tf, 4, axis=1)
    npp = hm.lp_norm_array(Tf, p, axis=1)

    # (iii) E_z ||T tau_z f||_2^2 = sum |f^|^2
    l2_avg = float(np.mean(n2**2))
    links.append(_link("(iii) E_z ||T tau_z f||_2^2 = sum |f^|^2", l2_avg, "==", float(np.sum(np.abs(fhat.coeffs) ** 2))))
    # (iv) Jensen for X -> X^((4-p)/(2-p)) applied to X = ||T tau_z f||_2^2
    r = (4 - p) / (2 - p)
    links.append(_link("(iv) Jensen", float(np.mean(n2 ** (2 * r))), ">=", l2_avg**r))
    # (v) L_4 identity and the energy bound
    l4_avg = float(np.mean(n4**4))
    quad = _coincidence_sum(T, fhat_on)
    q.update(l4_avg=l4_avg, quadruple_sum=quad.real)
    links.append(_link("(v) E_z ||T tau_z f||_4^4 = coincidence sum", l4_avg, "==", quad.real))
    links.append(_link("(v) coincidence sum <= K^4 E(Gamma)", quad.real, "<=", K**4 * E))
    # (vi) log-convexity, pointwise in z and for f itself
    interp = npp ** (1 - theta) * n4**theta - n2
    worst = int(np.argmin(interp))
    links.append(
        _link("(vi) ||Tf||_p^(1-theta) ||Tf||_4^theta >= ||Tf||_2 (worst z)",
              float(npp[worst] ** (1 - theta) * n4[worst] ** theta), ">=", float(n2[worst]))
    )
    links.append(_link("(vi) ||f||_p <= ||f||_2^(2-2/p) K^(2/p-1)", fp, "<=", f2 ** (2 - 2 / p) * K ** (2 / p - 1)))
    # (vii) the chain's implied bound dominates the certificate, which matches energy_certificate
    implied = (f2**6 / (K**2 * l4_avg)) ** _cert_exponent(p)
    raw = (n**3 / (K**6 * E)) ** _cert_exponent(p)
    q.update(implied_bound=implied, raw_bound=raw)
    links.append(_link("(vii) chain bound >= rawBound", implied, ">=", raw))
    links.append(_link("(vii) rawBound matches energy_certificate", raw, "==", cert.raw_bound))
    return rep


# --- numerical estimation ---------------------------------------------------


def _ratio(AG: np.ndarray, AH: np.ndarray, C: np.ndarray, p: float) -> np.ndarray:
    """``||A_H c||_p / ||A_G c||_p`` for each column c of C."""
    return hm.lp_norm_array(AH @ C, p, axis=0) / hm.lp_norm_array(AG @ C, p, axis=0)


def _log_ratio_grad(AG, AH, c, p, eps=1e-12):
    def part(A):
        v = A @ c
        w = (np.abs(v) ** 2 + eps) ** ((p - 2) / 2)
        M = np.mean(w * np.abs(v) ** 2)
        return A.conj().T @ (w * v) / (len(v) * M)

    return part(AH) - part(AG)


def estimate_norm_lp(
    T: CharOperator, p: float, restarts: int = 16, iters: int = 200, seed: int = 0
) -> float:
    """Best ratio ``||T f||_p / ||f||_p`` found over f in ``L_p^Lambda(G)``.

    Candidates: every character, every translate ``tau_z D_Lambda``, and
    normalised gradient ascent on the coefficient sphere with step halving.
    Restart i draws its start from ``seed + i``.  The result is a lower bound
    on the norm and is nondecreasing in both budgets.
    """
    if not 1 <= p <= 2:
        raise ValueError(f"estimation supports 1 <= p <= 2, got {p}")
    AG, AH = T.synthesis()
    n = AG.shape[1]
    best = float(np.max(_ratio(AG, AH, np.eye(n, dtype=np.complex128), p)))
    # translates of the Dirichlet kernel: coefficients chi_lam(z)
    best = max(best, float(np.max(_ratio(AG, AH, AG.T.copy(), p))))
    for i in range(restarts):
        rng = np.random.default_rng(seed + i)
        c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        c /= np.linalg.norm(c)
        val = float(_ratio(AG, AH, c[:, None], p)[0])
        step = 0.5
        for _ in range(iters):
            grad = _log_ratio_grad(AG, AH, c, p)
            gnorm = np.linalg.norm(grad)
            if gnorm == 0 or step < 1e-10:
                break
            trial = c + step * grad / gnorm
            trial /= np.linalg.norm(trial)
            tval = float(_ratio(AG, AH, trial[:, None], p)[0])
            if tval > val:
                c, val = trial, tval
                step = min(2 * step, 1.0)
            else:
                step /= 2
        best = max(best, val)
    return best


# --- algebra homomorphisms L_1(H^n) -> L_1(G) -------------------------------


@dataclass(frozen=True)
class AlgebraHom:
    """``T(f)^(gamma) = f^(alpha(gamma))`` for gamma in S, zero elsewhere.

    ``graph`` holds alpha as a map from characters of ``cod`` (the group G)
    to characters of ``dom`` (the group H^n).
    """

    dom: GroupSpec
    cod: GroupSpec
    graph: MapGraph

    def __post_init__(self):
        if self.graph.g_dual != self.cod or self.graph.h_dual != self.dom:
            raise ValueError("alpha must map characters of cod to characters of dom")

    @property
    def S(self) -> list[Element]:
        return self.graph.domain

    @property
    def injective(self) -> bool:
        """T is injective iff alpha is onto the dual of dom."""
        return len(self.graph.image) == self.dom.order

    def __call__(self, f: hm.GroupFunction) -> hm.GroupFunction:
        return hom_apply_alg(self, f)


def hom_make(dom: GroupSpec, cod: GroupSpec, graph: MapGraph, S: Sequence[Element] | None = None) -> AlgebraHom:
    if S is not None and {tuple(s) for s in S} != set(graph.domain):
        raise ValueError("alpha must be defined exactly on S")
    return AlgebraHom(dom, cod, graph)


def hom_apply_alg(T: AlgebraHom, f: hm.GroupFunction) -> hm.GroupFunction:
    if f.group != T.dom:
        raise ValueError(f"function lives on {f.group}, hom expects {T.dom}")
    fhat = hm.dft(f)
    out = np.zeros(T.cod.order, dtype=np.complex128)
    for gamma, a in T.graph.pairs:
        out[T.cod.index(gamma)] = fhat(a)
    return hm.idft(hm.Spectrum(T.cod, out))


def hom_pullback(psi: GroupHom, check: bool = True) -> AlgebraHom:
    """``f -> f o psi`` for a surjection ``psi: G -> H^n``.

    Its spectral form has ``S = {chi o psi}`` and ``alpha(chi o psi) = chi``.
    """
    if check and not psi.is_surjective():
        raise ValueError("pullback needs a surjective homomorphism")
    dual = dual_hom(psi)
    pairs = tuple((dual(b), b) for b in psi.codomain.elements())
    return AlgebraHom(psi.codomain, psi.domain, MapGraph(psi.domain, psi.codomain, pairs))


def hom_spectral(phi_inj: MapGraph) -> AlgebraHom:
    """``f -> sum_lam f^(lam) phi(lam)`` for an injection phi of the dual of H^n into G^."""
    if len(phi_inj.image) != len(phi_inj):
        raise ValueError("spectral hom needs an injective map")
    dom, cod = phi_inj.g_dual, phi_inj.h_dual
    T = AlgebraHom(dom, cod, MapGraph(cod, dom, tuple((b, a) for a, b in phi_inj.pairs)))
    # ||T(|H| delta_y)||_1 <= sum of |coefficients| = |S| <= |H^n|
    assert len(T.S) <= dom.order
    return T


def hom_pointmass_images(T: AlgebraHom) -> np.ndarray:
    """Rows are ``T(|H^n| delta_y)`` on G for every y in H^n."""
    out = np.zeros((T.dom.order, T.cod.order), dtype=np.complex128)
    if not T.S:
        return out
    table = hm.char_table(T.dom, [a for _, a in T.graph.pairs])  # alpha(gamma)(y)
    cols = np.array([T.cod.index(gamma) for gamma in T.S])
    out[:, cols] = np.conj(table).T
    return hm.idft_array(out, T.cod)


def hom_norm_exact(T: AlgebraHom) -> float:
    """Exact ``||T||_{1->1}``: the maximum of ``||T(|H^n| delta_y)||_1`` over y.

    Extreme points of the L_1 unit ball of a finite group are unimodular
    multiples of normalised point masses.
    """
    if not T.S:
        return 0.0
    return float(hm.lp_norm_array(hom_pointmass_images(T), 1, axis=1).max())


@dataclass(frozen=True)
class HomEnergyBound:
    energy: int
    anorm: float
    gamma_size: int
    norm_lower_bound: float
    phi_L4_4: float
    phi_L2_2: float
    phi_L1: float

    def identities_ok(self, tol: float = 1e-9) -> bool:
        return (
            math.isclose(self.phi_L4_4, self.energy, rel_tol=tol, abs_tol=tol)
            and math.isclose(self.phi_L2_2, self.gamma_size, rel_tol=tol, abs_tol=tol)
            and math.isclose(self.phi_L1, self.anorm, rel_tol=tol, abs_tol=tol)
        )


def hom_energy_bound(T: AlgebraHom, tol: float = 1e-9) -> HomEnergyBound:
    """Graph energy, A-norm, and the norm bound ``||T|| >= |Gamma|^(3/2) / E^(1/2)``.

    Uses ``E = ||phi||_4^4``, ``|Gamma| = ||phi||_2^2``, ``||1_Gamma||_A = ||phi||_1``
    for ``phi(u) = sum_{gamma in Gamma} gamma(-u)`` and log-convexity
    ``||phi||_4^4 >= ||phi||_2^6 / ||phi||_1^2``.
    """
    if not T.S:
        raise ValueError("empty graph")
    prod = direct_product(T.cod, T.dom)
    pts = T.graph.points
    E = graph_energy(T.graph)
    phi = hm.graph_function(prod, pts)
    res = HomEnergyBound(
        energy=E,
        anorm=hm.algebra_norm_indicator(prod, pts),
        gamma_size=len(pts),
        norm_lower_bound=len(pts) ** 1.5 / math.sqrt(E),
        phi_L4_4=hm.lp_norm(phi, 4) ** 4,
        phi_L2_2=hm.lp_norm(phi, 2) ** 2,
        phi_L1=hm.lp_norm(phi, 1),
    )
    if not res.identities_ok(tol):
        raise ArithmeticError(f"graph-function identities failed: {res}")
    return res
