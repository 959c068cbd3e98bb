"""Layered universal-model stages over a finite variable set.

Each stage extends the previous one with every admissible new bottom
cluster: a non-empty set of valuations placed over a generated subframe of
the previous stage that reaches its newest layer.  Cluster candidates whose
valuations already occur across the cluster of a cone tip are excluded, so
every stage stays irreducible.  Stages grow doubly exponentially; the point
cap aborts construction exactly rather than truncating.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .algebras import ModalAlgebra, check_s4, powerset_algebra
from .errors import BoundExceeded, NotIrreducible, StageExplosion, ValidationError
from .frames import (Frame, PMorphism, bit_indices, cluster,
                     enumerate_generated_subframes, frame_heights, rt_closure)
from .models import (Irreducible, Model, ModelMorphism, VarSet,
                     check_irreducible)

STAGE_POINT_CAP = 10_000
STAGE_ALGEBRA_ATOM_BOUND = 16


@dataclass(frozen=True)
class Carried:
    """Point present since the previous stage."""


@dataclass(frozen=True)
class NewPoint:
    """Point added by this stage: its valuation, its whole cluster's
    valuation set, and the generated subframe of the previous stage it
    sits over (as a bitset of previous-stage points)."""

    val: int
    cluster_vals: tuple[int, ...]
    base: int


Provenance = Union[Carried, NewPoint]


@dataclass(frozen=True)
class NewClusterSpec:
    """Candidate bottom cluster: valuation set plus base subframe."""

    cluster_vals: tuple[int, ...]
    base: int

    def __post_init__(self):
        if not self.cluster_vals:
            raise ValidationError("cluster valuation set must be non-empty")
        if tuple(sorted(set(self.cluster_vals))) != self.cluster_vals:
            raise ValidationError("cluster valuations must be sorted and distinct")


@dataclass(frozen=True)
class UniversalStage:
    """Stage index, its model, and per-point provenance."""

    n: int
    model: Model
    provenance: tuple[Provenance, ...]

    def __post_init__(self):
        if len(self.provenance) != self.model.n:
            raise ValidationError("provenance must cover every point")

    def heights(self) -> tuple[int, ...]:
        return frame_heights(self.model.frame)

    def stats(self) -> dict:
        """Point and cluster counts, overall and per height."""
        frame = self.model.frame
        heights = self.heights() if frame.n else ()
        seen = 0
        clusters_by_height: dict[int, int] = {}
        points_by_height: dict[int, int] = {}
        for p in range(frame.n):
            points_by_height[heights[p]] = points_by_height.get(heights[p], 0) + 1
            if not seen >> p & 1:
                members = cluster(frame, p)
                seen |= members
                clusters_by_height[heights[p]] = \
                    clusters_by_height.get(heights[p], 0) + 1
        return {
            "stage": self.n,
            "points": frame.n,
            "clusters": sum(clusters_by_height.values()),
            "points_by_height": points_by_height,
            "clusters_by_height": clusters_by_height,
        }


def stage_zero(variables: VarSet) -> UniversalStage:
    """The empty model at stage zero."""
    return UniversalStage(0, Model(Frame(()), variables, ()), ())


def admissible_cluster_specs(stage: UniversalStage) -> list[NewClusterSpec]:
    """All admissible new bottom clusters over the given stage, ordered by
    (base bitset, valuation-set encoding).

    Admissibility: the base is a generated subframe containing a point of
    maximal (= stage-index) height, except at stage zero where only the
    empty base exists; and if the base is the cone of some point p, the
    valuation set must not be contained in the valuation image of p's
    cluster.
    """
    frame = stage.model.frame
    val_count = stage.model.vars.valuation_count
    if stage.n == 0:
        bases = [0]
    else:
        heights = frame_heights(frame)
        newest = 0
        for p in range(frame.n):
            if heights[p] == stage.n:
                newest |= 1 << p
        all_subs = enumerate_generated_subframes(frame, bound=frame.n)
        bases = [g for g in all_subs if g & newest]
    cone_vals: dict[int, int] = {}
    clo = frame.closure()
    for p in range(frame.n):
        if clo[p] not in cone_vals:
            image = 0
            for q in bit_indices(cluster(frame, p)):
                image |= 1 << stage.model.val[q]
            cone_vals[clo[p]] = image
    specs = []
    full_vals = (1 << val_count) - 1
    for base in bases:
        blocked = cone_vals.get(base)
        for y_mask in range(1, full_vals + 1):
            if blocked is not None and y_mask & ~blocked == 0:
                continue
            specs.append(NewClusterSpec(tuple(bit_indices(y_mask)), base))
    return specs


def next_stage(stage: UniversalStage,
               point_cap: int = STAGE_POINT_CAP) -> UniversalStage:
    """Extend a stage with every admissible new bottom cluster."""
    frame = stage.model.frame
    if frame.n > point_cap:
        raise StageExplosion(
            f"stage {stage.n} already exceeds the point cap {point_cap}")
    try:
        specs = _specs_with_cap(stage, point_cap)
    except BoundExceeded as exc:
        raise StageExplosion(str(exc)) from exc
    new_points = sum(len(s.cluster_vals) for s in specs)
    if frame.n + new_points > point_cap:
        raise StageExplosion(
            f"stage {stage.n + 1} would have {frame.n + new_points} points, "
            f"over the cap {point_cap}")
    rows = list(frame.rel)
    vals = list(stage.model.val)
    provenance: list[Provenance] = [Carried()] * frame.n
    index = frame.n
    for spec in specs:
        members = range(index, index + len(spec.cluster_vals))
        cluster_mask = 0
        for m in members:
            cluster_mask |= 1 << m
        for y in spec.cluster_vals:
            rows.append(cluster_mask | spec.base)
            vals.append(y)
            provenance.append(NewPoint(y, spec.cluster_vals, spec.base))
        index += len(spec.cluster_vals)
    new_frame = Frame(tuple(rows))
    # bases are generated subframes, so the relation is already closed
    assert rt_closure(new_frame) == new_frame.rel
    model = Model(new_frame, stage.model.vars, tuple(vals))
    return UniversalStage(stage.n + 1, model, tuple(provenance))


def _specs_with_cap(stage: UniversalStage, point_cap: int):
    frame = stage.model.frame
    val_count = stage.model.vars.valuation_count
    if stage.n > 0:
        # cheap pre-count: every non-cone base over the newest layer stays
        # admissible, each contributing at least one point per valuation set
        subs = enumerate_generated_subframes(
            frame, bound=frame.n, result_cap=4 * point_cap + 64)
        min_new = max(len(subs) - 1 - frame.n, 0) * val_count * \
            (1 << (val_count - 1))
        if min_new > 4 * point_cap:
            raise StageExplosion(
                f"stage {stage.n + 1} admits at least {min_new} new points, "
                f"over the cap {point_cap}")
    return admissible_cluster_specs(stage)


def build_universal(variables: VarSet, stages: int,
                    point_cap: int = STAGE_POINT_CAP) -> UniversalStage:
    """Iterate the stage construction; stages form an inclusion chain of
    generated submodels, which is re-checked at every step."""
    stage = stage_zero(variables)
    for _ in range(stages):
        nxt = next_stage(stage, point_cap)
        assert nxt.model.frame.rel[:stage.model.n] == stage.model.frame.rel
        assert nxt.model.val[:stage.model.n] == stage.model.val
        stage = nxt
    return stage


def embed_irreducible(model: Model,
                      stage: UniversalStage) -> Optional[ModelMorphism]:
    """Injective valuation-commuting p-morphism of an irreducible model into
    a stage, or None when the stage is too shallow or no embedding exists."""
    if model.vars != stage.model.vars:
        raise ValidationError("model and stage use different variable sets")
    if not isinstance(check_irreducible(model), Irreducible):
        raise NotIrreducible("only irreducible models embed canonically")
    if model.n == 0:
        return ModelMorphism(
            PMorphism(model.frame, stage.model.frame, ()), model, stage.model)
    if stage.model.n == 0:
        return None
    mh = frame_heights(model.frame)
    if max(mh) > stage.n:
        return None
    sh = stage.heights()
    mclo = model.frame.closure()
    sclo = stage.model.frame.closure()
    mcl = [cluster(model.frame, p) for p in range(model.n)]
    scl = [cluster(stage.model.frame, q) for q in range(stage.model.n)]
    candidates = []
    for p in range(model.n):
        opts = [q for q in range(stage.model.n)
                if sh[q] == mh[p]
                and stage.model.val[q] == model.val[p]
                and bin(sclo[q]).count("1") == bin(mclo[p]).count("1")
                and bin(scl[q]).count("1") == bin(mcl[p]).count("1")]
        if not opts:
            return None
        candidates.append(opts)
    order = sorted(range(model.n), key=lambda p: (mh[p], p))
    rel = model.frame.rel
    srel = stage.model.frame.rel
    assign = [-1] * model.n
    used = set()

    def search(i):
        if i == model.n:
            return True
        p = order[i]
        for q in candidates[p]:
            if q in used:
                continue
            ok = True
            for j in range(i):
                p2 = order[j]
                q2 = assign[p2]
                if bool(rel[p] >> p2 & 1) != bool(srel[q] >> q2 & 1) or \
                        bool(rel[p2] >> p & 1) != bool(srel[q2] >> q & 1):
                    ok = False
                    break
            if not ok:
                continue
            assign[p] = q
            used.add(q)
            if search(i + 1):
                return True
            assign[p] = -1
            used.discard(q)
        return False

    if not search(0):
        return None
    try:
        f = PMorphism(model.frame, stage.model.frame, tuple(assign))
    except ValidationError:
        return None
    return ModelMorphism(f, model, stage.model)


def stage_dual_algebra(stage: UniversalStage,
                       atom_bound: int = STAGE_ALGEBRA_ATOM_BOUND) -> ModalAlgebra:
    """Powerset algebra of the stage frame; always an S4 algebra."""
    if stage.model.n > atom_bound:
        raise BoundExceeded(
            f"stage has {stage.model.n} points, over the algebra bound "
            f"{atom_bound}")
    algebra = powerset_algebra(stage.model.frame)
    assert check_s4(algebra)
    return algebra
