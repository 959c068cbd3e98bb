"""Layered universal-model stages: base cases, growth, irreducibility,
embeddings, and the stage dual algebra."""

import pytest

from kforge.errors import (BoundExceeded, NotIrreducible, StageExplosion,
                           ValidationError)
from kforge.frames import Frame, cone, frame_heights
from kforge.models import (Irreducible, Model, VarSet, check_irreducible,
                           irreducible_oracle)
from kforge.universal import (Carried, NewPoint, admissible_cluster_specs,
                              build_universal, embed_irreducible, next_stage,
                              stage_dual_algebra, stage_zero)
from kforge.algebras import check_s4

EMPTY_VARS = VarSet(())
X = VarSet(("x",))
XY = VarSet(("x", "y"))


class TestStageZero:
    @pytest.mark.parametrize("variables", [EMPTY_VARS, X, XY])
    def test_empty(self, variables):
        stage = stage_zero(variables)
        assert stage.n == 0
        assert stage.model.n == 0


class TestNoVariables:
    def test_stage_one_single_reflexive_point(self):
        stage = build_universal(EMPTY_VARS, 1)
        assert stage.model.frame.rel == (1,)
        assert stage.model.val == (0,)

    def test_stabilizes_from_stage_one(self):
        reference = build_universal(EMPTY_VARS, 1).model
        for k in (2, 3, 4):
            assert build_universal(EMPTY_VARS, k).model == reference

    def test_stage_two_candidate_excluded(self):
        # the only base is the cone of the single point, and the only
        # valuation set is contained in its cluster image
        stage1 = build_universal(EMPTY_VARS, 1)
        assert admissible_cluster_specs(stage1) == []


class TestOneVariable:
    def test_stage_one_shape(self):
        stage = build_universal(X, 1)
        stats = stage.stats()
        assert stats["points"] == 4
        assert stats["clusters"] == 3
        # clusters ordered by valuation-set encoding over the empty base
        assert stage.model.val == (0, 1, 0, 1)
        specs = [p for p in stage.provenance if isinstance(p, NewPoint)]
        assert [s.cluster_vals for s in specs] == [(0,), (1,), (0, 1), (0, 1)]

    def test_stage_one_cluster_structure(self):
        stage = build_universal(X, 1)
        rel = stage.model.frame.rel
        assert rel == (0b0001, 0b0010, 0b1100, 0b1100)

    def test_heights_audit(self):
        for k in (1, 2):
            stage = build_universal(X, k)
            heights = frame_heights(stage.model.frame)
            for p, prov in enumerate(stage.provenance):
                if isinstance(prov, NewPoint):
                    assert heights[p] == k
                else:
                    assert heights[p] < k

    def test_stage_monotone(self):
        s1 = build_universal(X, 1)
        s2 = build_universal(X, 2)
        n1 = s1.model.n
        assert s2.model.frame.rel[:n1] == s1.model.frame.rel
        assert s2.model.val[:n1] == s1.model.val
        # earlier stage is successor-closed in the later one
        for p in range(n1):
            assert cone(s2.model.frame, p) < (1 << n1)

    def test_stage_two_size_regression(self):
        # independent derivation: count admissible cluster specs over the
        # stage-1 model by unfolding the two admissibility conditions
        s1 = build_universal(X, 1)
        specs = admissible_cluster_specs(s1)
        new_points = sum(len(s.cluster_vals) for s in specs)
        assert len(specs) == 16
        assert new_points == 22
        s2 = build_universal(X, 2)
        assert s2.model.n == s1.model.n + new_points == 26
        assert s2.stats()["clusters"] == 19

    def test_stages_irreducible(self):
        for k in (1, 2):
            stage = build_universal(X, k)
            assert isinstance(check_irreducible(stage.model), Irreducible)

    def test_every_cone_irreducible(self):
        stage = build_universal(X, 2)
        for p in range(stage.model.n):
            sub, _ = stage.model.submodel(cone(stage.model.frame, p))
            assert isinstance(check_irreducible(sub), Irreducible)

    def test_new_cluster_valuations_enumerate_spec(self):
        stage = build_universal(X, 2)
        for p, prov in enumerate(stage.provenance):
            if isinstance(prov, NewPoint):
                assert stage.model.val[p] == prov.val
                assert prov.val in prov.cluster_vals

    def test_stage_three_explodes_at_default_cap(self):
        with pytest.raises(StageExplosion):
            build_universal(X, 3)


class TestEmbedding:
    def test_point_with_empty_valuation(self):
        stage = build_universal(X, 1)
        model = Model(Frame((1,)), X, (0,))
        emb = embed_irreducible(model, stage)
        assert emb is not None
        assert emb.f.mapping == (0,)

    def test_two_cluster_both_valuations(self):
        stage = build_universal(X, 1)
        model = Model(Frame((0b11, 0b11)), X, (0, 1))
        emb = embed_irreducible(model, stage)
        assert emb is not None
        assert set(emb.f.mapping) == {2, 3}

    def test_height_two_needs_stage_two(self):
        model = Model(Frame((0b11, 0b10)), X, (1, 0))
        assert embed_irreducible(model, build_universal(X, 1)) is None
        emb = embed_irreducible(model, build_universal(X, 2))
        assert emb is not None
        assert emb.f.is_injective()

    def test_reducible_model_rejected(self):
        stage = build_universal(X, 1)
        with pytest.raises(NotIrreducible):
            embed_irreducible(Model(Frame((0b11, 0b11)), X, (1, 1)), stage)

    def test_var_mismatch_rejected(self):
        stage = build_universal(X, 1)
        with pytest.raises(ValidationError):
            embed_irreducible(Model(Frame((1,)), XY, (0,)), stage)

    def test_image_is_generated(self):
        stage = build_universal(X, 2)
        model = Model(Frame((0b11, 0b10)), X, (1, 0))
        emb = embed_irreducible(model, stage)
        image = 0
        for q in emb.f.mapping:
            image |= 1 << q
        from kforge.frames import generated_subframe
        assert generated_subframe(stage.model.frame, image) == image


class TestStageDualAlgebra:
    def test_no_vars(self):
        alg = stage_dual_algebra(build_universal(EMPTY_VARS, 2))
        assert alg.element_count == 2
        assert alg.diamond(alg.top) == alg.top

    def test_one_var_stage_one(self):
        alg = stage_dual_algebra(build_universal(X, 1))
        assert alg.element_count == 16
        assert check_s4(alg)

    def test_stage_zero(self):
        alg = stage_dual_algebra(stage_zero(X))
        assert alg.element_count == 1

    def test_bound(self):
        with pytest.raises(BoundExceeded):
            stage_dual_algebra(build_universal(X, 2), atom_bound=16)
