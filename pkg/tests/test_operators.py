import math

import numpy as np
import pytest

import oracles
from charbound import harmonic as hm
from charbound.additive import MapGraph
from charbound.groups import GroupHom, GroupSpec, identity_hom, power
from charbound.maps import random_spectral_hom, random_surjective_hom, sidon_energy, sidon_image_map
from charbound.operators import (
    CharOperator,
    charop_apply,
    energy_certificate,
    estimate_norm_lp,
    hom_apply_alg,
    hom_energy_bound,
    hom_make,
    hom_norm_exact,
    hom_pullback,
    hom_spectral,
    verify_prop_main_chain,
)
from instances import random_alg_hom, random_operator

Z2 = GroupSpec((2,))


def identity_operator(g: GroupSpec) -> CharOperator:
    return CharOperator(g, g, MapGraph(g, g, tuple((a, a) for a in g.elements())))


def sidon_operator(k: int, N: int) -> CharOperator:
    G = power(Z2, k)
    graph = sidon_image_map(G, list(G.elements()), N)
    return CharOperator(G, graph.h_dual, graph)


class TestCharOperator:
    def test_characters_map_to_characters(self):
        T = sidon_operator(2, 31)
        for a, b in T.graph.pairs:
            out = charop_apply(T, hm.character(T.g, a))
            assert np.allclose(out.values, hm.character(T.h, b).values, atol=1e-12)

    def test_linearity(self):
        T = sidon_operator(2, 31)
        (a1, b1), (a2, b2) = T.graph.pairs[:2]
        f = 2 * hm.character(T.g, a1) + 1j * hm.character(T.g, a2)
        want = 2 * hm.character(T.h, b1) + 1j * hm.character(T.h, b2)
        assert np.allclose(charop_apply(T, f).values, want.values, atol=1e-12)

    def test_isometry_when_injective(self, rng):
        for _ in range(20):
            T = random_operator(rng, injective=True)
            c = rng.standard_normal(len(T.chars)) + 1j * rng.standard_normal(len(T.chars))
            f = hm.GroupFunction(T.g, hm.char_table(T.g, T.chars).T @ c)
            assert abs(hm.lp_norm(charop_apply(T, f), 2) - hm.lp_norm(f, 2)) < 1e-12 * max(1, hm.lp_norm(f, 2))

    def test_leak_rejected(self):
        G = GroupSpec((4,))
        T = CharOperator(G, G, MapGraph(G, G, (((1,), (1,)),)))
        with pytest.raises(ValueError, match="project"):
            charop_apply(T, hm.character(G, (2,)))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            CharOperator(Z2, Z2, MapGraph(Z2, Z2, ()))


class TestCertificate:
    def test_identity(self):
        cert = energy_certificate(identity_operator(GroupSpec((3, 4))), 1.0)
        assert cert.K == pytest.approx(1) and cert.energy == 12**3
        assert cert.raw_bound == pytest.approx(1) and cert.effective_bound == 1

    def test_p_near_two(self):
        T = sidon_operator(3, 257)
        assert energy_certificate(T, 2 - 1e-9).raw_bound == pytest.approx(1, abs=1e-8)

    def test_sidon_k3(self):
        T = sidon_operator(3, 257)
        E_brute = oracles.naive_graph_energy(T.graph.pairs, T.g.orders, T.h.orders)
        assert E_brute == 120
        cert = energy_certificate(T, 1.0)
        assert cert.K == pytest.approx(1, abs=1e-12) and cert.energy == 120
        assert cert.raw_bound == pytest.approx(math.sqrt(512 / 120), rel=1e-12)
        assert cert.raw_bound == pytest.approx(2.0656, abs=1e-4)
        assert cert.theta == pytest.approx(2 / 3)

    def test_k1(self):
        T = sidon_operator(1, 1009)
        cert = energy_certificate(T, 1.0)
        assert cert.energy == 6 and cert.raw_bound == pytest.approx(math.sqrt(8 / 6))

    @pytest.mark.parametrize("p", [0.9, 2.0, 3.0])
    def test_p_range(self, p):
        with pytest.raises(ValueError):
            energy_certificate(sidon_operator(2, 31), p)

    def test_formula_on_random(self, rng):
        for _ in range(20):
            T = random_operator(rng, max_g=32, max_h=32)
            p = float(rng.choice([1, 1.25, 1.5, 1.75]))
            c = energy_certificate(T, p)
            want = (c.lambda_size**3 / (c.K**6 * c.energy)) ** ((2 - p) / (2 * p))
            assert c.raw_bound == pytest.approx(want, rel=1e-12)
            assert c.effective_bound == max(1.0, c.raw_bound) >= 1


class TestChain:
    @pytest.mark.parametrize("p", [1.0, 1.5])
    def test_identity_with_equalities(self, p):
        rep = verify_prop_main_chain(identity_operator(GroupSpec((2, 3))), p)
        assert rep.passed, str(rep)
        q = rep.quantities
        assert q["l4_avg"] == pytest.approx(q["quadruple_sum"], rel=1e-12)
        assert q["l4_avg"] == pytest.approx(q["K"] ** 4 * q["E"], rel=1e-12)

    def test_random_z2_4_to_z64(self, rng):
        G, H = power(Z2, 4), GroupSpec((64,))
        for _ in range(5):
            size = int(rng.integers(1, 17))
            chars = rng.choice(16, size=size, replace=False)
            pairs = tuple((G.element(int(a)), (int(b),)) for a, b in zip(chars, rng.integers(0, 64, size=size)))
            rep = verify_prop_main_chain(CharOperator(G, H, MapGraph(G, H, pairs)), 1.5)
            assert rep.passed, str(rep)

    def test_l4_identity_against_brute_force(self, rng):
        for _ in range(10):
            T = random_operator(rng, max_g=16, max_h=16, max_lambda=6)
            rep = verify_prop_main_chain(T, 1.25)
            brute = oracles.naive_graph_energy(T.graph.pairs, T.g.orders, T.h.orders)
            # f = D_Lambda has unit coefficients, so the coincidence sum is E(Gamma)
            assert rep.quantities["quadruple_sum"] == pytest.approx(brute, rel=1e-9)
            assert rep.quantities["l4_avg"] == pytest.approx(brute, rel=1e-9)

    def test_failures_listed(self):
        rep = verify_prop_main_chain(sidon_operator(2, 31), 1.0)
        assert rep.passed and rep.failures() == []
        assert len(rep.links) >= 7

    def test_rejects_p(self):
        with pytest.raises(ValueError):
            verify_prop_main_chain(sidon_operator(2, 31), 2.0)


class TestEstimate:
    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0])
    def test_identity(self, p):
        assert estimate_norm_lp(identity_operator(GroupSpec((2, 3))), p, restarts=3, iters=30) == pytest.approx(1, abs=1e-9)

    def test_isometry_at_two(self, rng):
        T = random_operator(rng, max_g=32, max_h=32, injective=True)
        assert estimate_norm_lp(T, 2.0, restarts=4, iters=50) == pytest.approx(1, abs=1e-9)

    def test_witness_floor(self, rng):
        for _ in range(10):
            T = random_operator(rng, max_g=32, max_h=32)
            p = 1.25
            est = estimate_norm_lp(T, p, restarts=2, iters=20)
            D = hm.dirichlet_kernel(T.g, T.chars)
            assert est >= 1 - 1e-12
            assert est >= hm.lp_norm(charop_apply(T, D), p) / hm.lp_norm(D, p) - 1e-12

    def test_deterministic_and_monotone(self, rng):
        T = random_operator(rng, max_g=32, max_h=32, max_lambda=6)
        a = estimate_norm_lp(T, 1.0, restarts=4, iters=40, seed=7)
        assert a == estimate_norm_lp(T, 1.0, restarts=4, iters=40, seed=7)
        assert estimate_norm_lp(T, 1.0, restarts=8, iters=40, seed=7) >= a
        assert estimate_norm_lp(T, 1.0, restarts=4, iters=80, seed=7) >= a

    def test_matches_grid_on_three_characters(self, rng):
        for _ in range(4):
            T = random_operator(rng, max_g=16, max_h=16, max_lambda=3)
            while len(T.chars) != 3:
                T = random_operator(rng, max_g=16, max_h=16, max_lambda=3)
            AG, AH = T.synthesis()
            for p in (1.0, 1.5):
                grid = oracles.grid_operator_norm(AG, AH, p)
                est = estimate_norm_lp(T, p)
                assert est == pytest.approx(grid, abs=1e-3)

    def test_certificate_below_estimate_on_sidon(self):
        T = sidon_operator(3, 257)
        assert estimate_norm_lp(T, 1.0) >= energy_certificate(T, 1.0).effective_bound


def brute_hom_norm(T):
    """Apply T to every normalised point mass through the public map."""
    return max(hm.lp_norm(hom_apply_alg(T, hm.point_mass(T.dom, y)), 1) for y in T.dom.elements())


class TestAlgebraHoms:
    def test_pullback_projection(self):
        psi = GroupHom(power(Z2, 4), power(Z2, 2), ((1, 0, 0, 0), (0, 1, 0, 0)))
        T = hom_pullback(psi)
        assert hom_norm_exact(T) == 1 and T.injective
        f = hm.GroupFunction(T.dom, np.arange(4.0))
        want = [f(psi(x)) for x in psi.domain.elements()]
        assert np.allclose(T(f).values, want, atol=1e-12)

    def test_pullback_identity_and_reduction(self):
        g = GroupSpec((3, 4))
        assert hom_norm_exact(hom_pullback(identity_hom(g))) == pytest.approx(1, abs=1e-12)
        T = hom_pullback(GroupHom(GroupSpec((4,)), Z2, ((1,),)))
        assert hom_norm_exact(T) == pytest.approx(1, abs=1e-12)
        assert brute_hom_norm(T) == pytest.approx(1, abs=1e-12)

    def test_pullback_needs_surjection(self):
        with pytest.raises(ValueError):
            hom_pullback(GroupHom(Z2, GroupSpec((4,)), ((2,),)))

    def test_spectral_z3_into_z2_4(self, rng):
        G = power(Z2, 4)
        for _ in range(10):
            T = random_spectral_hom(GroupSpec((3,)), G, rng)
            v = hom_norm_exact(T)
            assert 1 - 1e-12 <= v <= 3 + 1e-12
            assert v == pytest.approx(brute_hom_norm(T), abs=1e-12)

    def test_spectral_isomorphism(self):
        g = GroupSpec((2, 3))
        T = hom_spectral(MapGraph(g, g, tuple((a, a) for a in g.elements())))
        assert hom_norm_exact(T) == pytest.approx(1, abs=1e-12)

    def test_spectral_rejects_non_injective(self):
        with pytest.raises(ValueError):
            hom_spectral(MapGraph(Z2, GroupSpec((3,)), (((0,), (1,)), ((1,), (1,)))))

    def test_empty_s(self):
        T = hom_make(GroupSpec((3,)), GroupSpec((4,)), MapGraph(GroupSpec((4,)), GroupSpec((3,)), ()))
        assert hom_norm_exact(T) == 0 and not T.injective

    def test_small_s_flagged(self):
        G, H = GroupSpec((5,)), GroupSpec((3,))
        T = hom_make(H, G, MapGraph(G, H, (((1,), (0,)), ((2,), (2,)))), S=[(1,), (2,)])
        assert not T.injective
        with pytest.raises(ValueError):
            hom_make(H, G, MapGraph(G, H, (((1,), (0,)),)), S=[(2,)])

    def test_multiplicativity(self, rng):
        for _ in range(30):
            T = random_alg_hom(rng)
            f = hm.GroupFunction(T.dom, rng.standard_normal(T.dom.order) + 1j * rng.standard_normal(T.dom.order))
            g = hm.GroupFunction(T.dom, rng.standard_normal(T.dom.order))
            lhs = T(hm.convolve(f, g)).values
            rhs = hm.convolve(T(f), T(g)).values
            assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_norm_matches_brute(self, rng):
        for _ in range(10):
            T = random_alg_hom(rng, max_cod=32)
            assert hom_norm_exact(T) == pytest.approx(brute_hom_norm(T), abs=1e-12)

    def test_energy_bound_identities(self, rng):
        for _ in range(30):
            T = random_alg_hom(rng)
            b = hom_energy_bound(T)
            assert b.identities_ok(1e-9)
            v = hom_norm_exact(T)
            assert b.anorm <= v + 1e-9 and b.norm_lower_bound <= v + 1e-9

    def test_energy_bound_pullback(self):
        psi = GroupHom(GroupSpec((2, 3, 3)), GroupSpec((3,)), ((0, 1, 0),))
        b = hom_energy_bound(hom_pullback(psi))
        assert b.energy == b.gamma_size**3 and b.norm_lower_bound == pytest.approx(1)

    def test_energy_bound_sidon(self):
        H = GroupSpec((5,))
        graph = sidon_image_map(H, list(H.elements()), 101)
        T = hom_spectral(graph)
        b = hom_energy_bound(T)
        n = 5
        assert b.energy == sidon_energy(n)
        assert b.norm_lower_bound == pytest.approx(n**1.5 / math.sqrt(2 * n * n - n))
        assert b.norm_lower_bound <= hom_norm_exact(T) + 1e-9

    def test_random_surjective_is_injective(self, rng):
        T = random_surjective_hom(GroupSpec((3,)), power(Z2, 4), 6, rng)
        assert T.injective and len(T.S) == 6
