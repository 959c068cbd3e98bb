"""Modal algebras, axiom checks, and the finite duality round trips."""

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from conftest import frames_, preorders
from kforge.errors import NotS4, ValidationError
from kforge.frames import (Frame, PMorphism, all_pmorphisms, cluster,
                           frame_iso)
from kforge.algebras import (AlgebraMorphism, ModalAlgebra, atoms,
                             atoms_frame, check_caba_distributivity,
                             check_grz, check_s4, dual_morphism, epsilon,
                             eta, powerset_algebra, powerset_morphism,
                             presented_from_concrete)

ONE = Frame((1,))
RCHAIN2 = Frame((0b11, 0b10))
CLUSTER2 = Frame((0b11, 0b11))
EDGE = Frame.from_edges(2, [(0, 1)])

TWO_ELEMENT = ModalAlgebra.presented(
    ["bot", "top"], [[0, 1], [1, 1]], [1, 0], [0, 1], 0)


class TestAtoms:
    def test_concrete_atoms_are_singletons(self):
        assert atoms(powerset_algebra(EDGE)) == [0b01, 0b10]

    def test_two_element_presented(self):
        assert atoms(TWO_ELEMENT) == [1]

    def test_presented_four_element(self):
        alg = presented_from_concrete(powerset_algebra(Frame((1, 2))))
        # independent minimality scan over the order a <= b iff a | b == b
        expected = [a for a in range(4) if a and all(
            b == 0 or b == a or (b | a) != a for b in range(4))]
        assert atoms(alg) == expected == [1, 2]


class TestPowersetAlgebra:
    def test_edge_frame(self):
        alg = powerset_algebra(EDGE)
        assert alg.diamond(0b10) == 0b01  # sees {1} from 0
        assert alg.diamond(0b01) == 0b00

    def test_empty_frame(self):
        alg = powerset_algebra(Frame(()))
        assert alg.element_count == 1

    def test_cluster_diamond_total(self):
        alg = powerset_algebra(CLUSTER2)
        for x in (0b01, 0b10, 0b11):
            assert alg.diamond(x) == 0b11

    @given(frames_(4))
    def test_diamond_additive_and_strict(self, frame):
        alg = powerset_algebra(frame)
        for x in alg.elements():
            for y in alg.elements():
                assert alg.diamond(x | y) == alg.diamond(x) | alg.diamond(y)
        assert alg.diamond(0) == 0


class TestAtomsFrame:
    def test_round_trip_edge(self):
        assert atoms_frame(powerset_algebra(EDGE)).rel == EDGE.rel

    def test_identity_diamond_gives_loops(self):
        alg = ModalAlgebra.concrete((0b01, 0b10))
        assert atoms_frame(alg).rel == (0b01, 0b10)

    def test_total_diamond_gives_complete_digraph(self):
        alg = ModalAlgebra.concrete((0b11, 0b11))
        assert atoms_frame(alg).rel == (0b11, 0b11)


class TestEtaEpsilon:
    def test_eta_concrete_relabeling(self):
        alg = powerset_algebra(RCHAIN2)
        morphism = eta(alg)
        assert morphism.is_bijective()
        assert morphism.mapping == tuple(alg.elements())

    def test_eta_presented_four(self):
        alg = presented_from_concrete(powerset_algebra(Frame((1, 2))))
        morphism = eta(alg)
        assert morphism.is_bijective()
        assert sorted(morphism.mapping) == list(range(4))

    def test_eta_one_element(self):
        alg = powerset_algebra(Frame(()))
        assert eta(alg).mapping == (0,)

    def test_epsilon_empty(self):
        assert epsilon(Frame(())).mapping == ()

    def test_epsilon_loop_preserved(self):
        eps = epsilon(ONE)
        assert eps.mapping == (0,)
        assert eps.cod.rel == (1,)

    @given(frames_(5))
    @settings(max_examples=100)
    def test_epsilon_isomorphism(self, frame):
        eps = epsilon(frame)  # construction validates the p-morphism
        assert eps.is_injective() and eps.is_surjective()
        assert frame_iso(frame, eps.cod) is not None


class TestDualMorphism:
    def test_identity(self):
        alg = powerset_algebra(RCHAIN2)
        ident = AlgebraMorphism(alg, alg, tuple(alg.elements()))
        assert dual_morphism(ident).mapping == (0, 1)

    def test_recovers_collapse(self):
        f = PMorphism(CLUSTER2, ONE, (0, 0))
        recovered = dual_morphism(powerset_morphism(f))
        assert recovered.mapping == f.mapping
        assert frame_iso(recovered.dom, CLUSTER2) is not None

    def test_recovers_inclusion(self):
        f = PMorphism(ONE, RCHAIN2, (1,))
        recovered = dual_morphism(powerset_morphism(f))
        assert recovered.mapping == f.mapping

    @given(frames_(3), frames_(3), st.data())
    @settings(max_examples=40)
    def test_round_trip_all_small_maps(self, dom, cod, data):
        maps = all_pmorphisms(dom, cod)
        if not maps:
            return
        f = PMorphism(dom, cod, data.draw(st.sampled_from(maps)))
        recovered = dual_morphism(powerset_morphism(f))
        # epsilon identifies points with singleton atoms positionally
        assert recovered.mapping == f.mapping

    @given(frames_(3), frames_(3), frames_(3), st.data())
    @settings(max_examples=25)
    def test_contravariant_composition(self, a, b, c, data):
        fs, gs = all_pmorphisms(a, b), all_pmorphisms(b, c)
        if not fs or not gs:
            return
        f = PMorphism(a, b, data.draw(st.sampled_from(fs)))
        g = PMorphism(b, c, data.draw(st.sampled_from(gs)))
        left = powerset_morphism(f.then(g))
        right = powerset_morphism(g).then(powerset_morphism(f))
        assert left.mapping == right.mapping


class TestAxiomChecks:
    def test_s4_preorder(self):
        assert check_s4(powerset_algebra(RCHAIN2))

    def test_s4_fails_irreflexive(self):
        alg = powerset_algebra(EDGE)
        # exhaustive witness scan: x & diamond(x) != x somewhere
        witnesses = [x for x in alg.elements()
                     if alg.meet(x, alg.diamond(x)) != x]
        assert witnesses
        assert not check_s4(alg)

    def test_s4_one_element(self):
        assert check_s4(powerset_algebra(Frame(())))

    @given(frames_(4))
    def test_s4_iff_preorder(self, frame):
        assert check_s4(powerset_algebra(frame)) == frame.is_preorder()

    def test_grz_poset(self):
        assert check_grz(powerset_algebra(RCHAIN2))

    def test_grz_fails_cluster(self):
        assert not check_grz(powerset_algebra(CLUSTER2))

    def test_grz_one_element(self):
        assert check_grz(powerset_algebra(Frame(())))

    def test_grz_requires_s4(self):
        with pytest.raises(NotS4):
            check_grz(powerset_algebra(EDGE))

    @given(preorders(4))
    def test_grz_iff_poset(self, frame):
        is_poset = all(
            bin(cluster(frame, p)).count("1") == 1 for p in range(frame.n))
        assert check_grz(powerset_algebra(frame)) == is_poset


class TestPresentedValidation:
    def test_broken_join_rejected(self):
        with pytest.raises(ValidationError):
            ModalAlgebra.presented(
                ["bot", "top"], [[0, 1], [1, 0]], [1, 0], [0, 1], 0)

    def test_broken_hemimorphism_rejected(self):
        with pytest.raises(ValidationError):
            ModalAlgebra.presented(
                ["bot", "top"], [[0, 1], [1, 1]], [1, 0], [1, 1], 0)

    def test_morphism_must_preserve_diamond(self):
        alg = powerset_algebra(ONE)
        bad = powerset_algebra(Frame((0,)))
        with pytest.raises(ValidationError):
            AlgebraMorphism(alg, bad, (0, 1))


class TestCabaDistributivity:
    def test_small_concrete(self):
        assert check_caba_distributivity(powerset_algebra(Frame((1, 2, 4))))

    def test_one_element(self):
        assert check_caba_distributivity(powerset_algebra(Frame(())))

    def test_two_element(self):
        assert check_caba_distributivity(TWO_ELEMENT)
