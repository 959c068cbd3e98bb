"""Finite S4 models, irreducibility, and reduction to irreducible images.

A model is a preordered frame with a valuation assigning each point a subset
of a fixed variable set.  Morphisms are valuation-commuting p-morphisms.
The irreducibility check tests the two pairwise conditions (pointed cone
isomorphism, and cluster absorption into an equal upper cone); the partition
oracle is the independent brute-force ground truth it is validated against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .errors import (BoundExceeded, InvalidWitness, ValidationError)
from .frames import (Frame, PMorphism, bit_indices, cluster, frame_heights,
                     inclusion, require_preorder, subframe)
from .colimits import coequalizer

PARTITION_ORACLE_BOUND = 6


@dataclass(frozen=True)
class VarSet:
    """Ordered propositional variable names; order fixes bit positions."""

    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValidationError("variable names must be unique")

    def __len__(self):
        return len(self.names)

    def encode(self, subset) -> int:
        mask = 0
        for name in subset:
            mask |= 1 << self.names.index(name)
        return mask

    def decode(self, mask: int) -> list[str]:
        return [self.names[i] for i in bit_indices(mask)]

    @property
    def valuation_count(self) -> int:
        return 1 << len(self.names)


@dataclass(frozen=True)
class Model:
    """Preordered frame with a total valuation into subsets of the vars."""

    frame: Frame
    vars: VarSet
    val: tuple[int, ...]

    def __post_init__(self):
        require_preorder(self.frame)
        if len(self.val) != self.frame.n:
            raise ValidationError("valuation is not total")
        full = self.vars.valuation_count - 1
        for p, v in enumerate(self.val):
            if v & ~full:
                raise ValidationError(f"valuation of point {p} out of range")

    @property
    def n(self) -> int:
        return self.frame.n

    def submodel(self, mask: int) -> tuple["Model", list[int]]:
        sub, keep = subframe(self.frame, mask)
        return Model(sub, self.vars, tuple(self.val[p] for p in keep)), keep


@dataclass(frozen=True)
class ModelMorphism:
    """A p-morphism whose codomain valuation pulls back to the domain's."""

    f: PMorphism
    dom: Model
    cod: Model

    def __post_init__(self):
        if self.f.dom != self.dom.frame or self.f.cod != self.cod.frame:
            raise ValidationError("underlying map does not match the models")
        if self.dom.vars != self.cod.vars:
            raise ValidationError("models must share a variable set")
        for p in range(self.dom.n):
            if self.dom.val[p] != self.cod.val[self.f(p)]:
                raise ValidationError(
                    f"valuation does not commute at point {p}")

    def then(self, other: "ModelMorphism") -> "ModelMorphism":
        return ModelMorphism(self.f.then(other.f), self.dom, other.cod)

    @staticmethod
    def identity(model: Model) -> "ModelMorphism":
        return ModelMorphism(PMorphism.identity(model.frame), model, model)


def pointed_iso_map(model: Model, p1: int, p2: int) -> Optional[tuple[int, ...]]:
    """Valuation-preserving cone isomorphism sending p1 to p2, as a tuple of
    pairs (cone point, image), or None."""
    clo = model.frame.closure()
    cone1, cone2 = clo[p1], clo[p2]
    if bin(cone1).count("1") != bin(cone2).count("1"):
        return None
    heights = frame_heights(model.frame)
    pts1 = bit_indices(cone1)
    pts2 = bit_indices(cone2)
    sig1 = sorted((model.val[p], heights[p]) for p in pts1)
    sig2 = sorted((model.val[p], heights[p]) for p in pts2)
    if sig1 != sig2:
        return None
    rel = model.frame.rel
    val = model.val
    order = [p1] + [p for p in pts1 if p != p1]
    assign: dict[int, int] = {}
    used = set()

    def candidates(p):
        if p == p1:
            return [p2]
        return [q for q in pts2
                if q not in used
                and val[q] == val[p]
                and heights[q] == heights[p]]

    def search(i):
        if i == len(order):
            return True
        p = order[i]
        for q in candidates(p):
            ok = True
            for p_done, q_done in assign.items():
                if bool(rel[p] >> p_done & 1) != bool(rel[q] >> q_done & 1):
                    ok = False
                    break
                if bool(rel[p_done] >> p & 1) != bool(rel[q_done] >> q & 1):
                    ok = False
                    break
            if ok and bool(rel[p] >> p & 1) == bool(rel[q] >> q & 1):
                assign[p] = q
                used.add(q)
                if search(i + 1):
                    return True
                del assign[p]
                used.discard(q)
        return False

    if search(0):
        return tuple(sorted(assign.items()))
    return None


def pointed_iso(model: Model, p1: int, p2: int) -> bool:
    """True iff the cones of p1 and p2 are isomorphic as pointed models."""
    return pointed_iso_map(model, p1, p2) is not None


@dataclass(frozen=True)
class Irreducible:
    pass


@dataclass(frozen=True)
class ViolatesA:
    """Distinct points with isomorphic pointed cones."""

    p1: int
    p2: int
    iso: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ViolatesB:
    """cl(p1) absorbs into cl(p2): the cone of p1 minus its cluster equals
    the cone of p2, and the cluster valuation image of p1 is contained in
    that of p2."""

    p1: int
    p2: int


Verdict = Union[Irreducible, ViolatesA, ViolatesB]


def _condition_b(model: Model, p1: int, p2: int) -> bool:
    clo = model.frame.closure()
    cl1 = cluster(model.frame, p1)
    if clo[p1] & ~cl1 != clo[p2]:
        return False
    cl2 = cluster(model.frame, p2)
    vals1 = {model.val[q] for q in bit_indices(cl1)}
    vals2 = {model.val[q] for q in bit_indices(cl2)}
    return vals1 <= vals2


def check_irreducible(model: Model, skip_diagonal: bool = True) -> Verdict:
    """First violation of either pairwise condition, in ascending (p1, p2)
    order with condition a checked before b per pair, else Irreducible.

    The diagonal is skipped for condition b: p1 belongs to its own cluster
    and its own cone, so the required cone equation cannot hold at p1 = p2.
    """
    n = model.n
    for p1 in range(n):
        for p2 in range(n):
            if p1 == p2:
                if not skip_diagonal and _condition_b(model, p1, p2):
                    return ViolatesB(p1, p2)
                continue
            iso = pointed_iso_map(model, p1, p2)
            if iso is not None:
                return ViolatesA(p1, p2, iso)
            if _condition_b(model, p1, p2):
                return ViolatesB(p1, p2)
    return Irreducible()


def _recheck(model: Model, witness: Verdict) -> None:
    if isinstance(witness, ViolatesA):
        pairs = dict(witness.iso)
        clo = model.frame.closure()
        if witness.p1 >= model.n or witness.p2 >= model.n:
            raise InvalidWitness("witness points out of range")
        if pairs.get(witness.p1) != witness.p2:
            raise InvalidWitness("iso does not send p1 to p2")
        cone1 = clo[witness.p1]
        if set(pairs) != set(bit_indices(cone1)):
            raise InvalidWitness("iso domain is not the cone of p1")
        rel, val = model.frame.rel, model.val
        for p, q in pairs.items():
            if val[p] != val[q]:
                raise InvalidWitness("iso does not preserve valuations")
            for p2, q2 in pairs.items():
                if bool(rel[p] >> p2 & 1) != bool(rel[q] >> q2 & 1):
                    raise InvalidWitness("iso does not preserve the relation")
        if len(set(pairs.values())) != len(pairs):
            raise InvalidWitness("iso is not injective")
    elif isinstance(witness, ViolatesB):
        if witness.p1 == witness.p2 or witness.p1 >= model.n \
                or witness.p2 >= model.n:
            raise InvalidWitness("witness points out of range")
        if not _condition_b(model, witness.p1, witness.p2):
            raise InvalidWitness("condition b does not hold for the witness")
    else:
        raise InvalidWitness("witness must be a violation")


def reduce_step(model: Model, witness: Verdict) -> tuple[ModelMorphism, Model]:
    """One quotient along a violation witness, onto a strictly smaller model.

    A-violations identify the two cones pointwise along the witnessing
    isomorphism; B-violations send each cluster point of p1 to the
    minimal-index point of cl(p2) carrying the same valuation.  Both are
    coequalizers of the cone inclusion against a second p-morphism, so the
    projection validates by construction and is re-checked.
    """
    _recheck(model, witness)
    clo = model.frame.closure()
    if isinstance(witness, ViolatesA):
        mask = clo[witness.p1]
        incl = inclusion(model.frame, mask)
        pairs = dict(witness.iso)
        other = PMorphism(incl.dom, model.frame,
                          tuple(pairs[p] for p in incl.mapping))
    else:
        mask = clo[witness.p1]
        incl = inclusion(model.frame, mask)
        cl1 = cluster(model.frame, witness.p1)
        cl2_pts = bit_indices(cluster(model.frame, witness.p2))
        target = {}
        for p in bit_indices(cl1):
            match = next(q for q in cl2_pts if model.val[q] == model.val[p])
            target[p] = match
        other = PMorphism(
            incl.dom, model.frame,
            tuple(target.get(p, p) for p in incl.mapping))
    proj = coequalizer(incl, other)
    if proj.cod.n >= model.n:
        raise InvalidWitness("witness quotient does not shrink the model")
    class_val = {}
    for p in range(model.n):
        cls = proj(p)
        if cls in class_val and class_val[cls] != model.val[p]:
            raise InvalidWitness("witness identifies points with different "
                                 "valuations")
        class_val[cls] = model.val[p]
    quotient = Model(proj.cod, model.vars,
                     tuple(class_val[c] for c in range(proj.cod.n)))
    return ModelMorphism(proj, model, quotient), quotient


def reduce(model: Model) -> tuple[ModelMorphism, Model]:
    """Iterate reduce_step to a fixpoint; the composite surjection and the
    irreducible image."""
    morphism = ModelMorphism.identity(model)
    current = model
    while True:
        verdict = check_irreducible(current)
        if isinstance(verdict, Irreducible):
            return morphism, current
        step, current = reduce_step(current, verdict)
        morphism = morphism.then(step)


def _partitions(n: int):
    """All set partitions of range(n) via restricted growth strings."""
    if n == 0:
        yield []
        return
    rgs = [0] * n
    maxes = [0] * n

    while True:
        blocks = [[] for _ in range(max(rgs) + 1)]
        for i, b in enumerate(rgs):
            blocks[b].append(i)
        yield blocks
        i = n - 1
        while i > 0:
            if rgs[i] <= maxes[i - 1]:
                rgs[i] += 1
                maxes[i] = max(maxes[i - 1], rgs[i])
                for j in range(i + 1, n):
                    rgs[j] = 0
                    maxes[j] = maxes[i]
                break
            i -= 1
        else:
            return


def irreducible_oracle(model: Model,
                       bound: int = PARTITION_ORACLE_BOUND) -> bool:
    """Brute-force ground truth: no non-bijective surjective
    valuation-commuting p-morphism exists out of the model.

    Enumerates every partition of the points; a partition admits such a
    morphism iff its blocks are valuation-constant and the projection onto
    the image relation validates as a p-morphism.
    """
    n = model.n
    if n > bound:
        raise BoundExceeded(f"partition oracle over {n} points exceeds {bound}")
    rel = model.frame.rel
    val = model.val
    for blocks in _partitions(n):
        if len(blocks) == n:
            continue
        if any(val[b[0]] != val[x] for b in blocks for x in b[1:]):
            continue
        cls = [0] * n
        for k, b in enumerate(blocks):
            for x in b:
                cls[x] = k
        rows = [0] * len(blocks)
        for x in range(n):
            row = rel[x]
            while row:
                low = row & -row
                row ^= low
                rows[cls[x]] |= 1 << cls[low.bit_length() - 1]
        try:
            quotient = Frame(tuple(rows))
            PMorphism(model.frame, quotient, tuple(cls))
        except ValidationError:
            continue
        return False
    return True
