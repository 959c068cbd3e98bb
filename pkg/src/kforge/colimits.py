"""Finite colimit constructions on Kripke frames.

Coproducts, coequalizers, equalizers, cokernel pairs, chain colimits, the
stage-factorization procedure for maps into chain colimits, and a brute-force
universal-property verifier.  Quotients always take minimal-index class
representatives and order quotient points by representative, so outputs are
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import BoundExceeded, NoStage, NotParallel, ValidationError
from .frames import (Frame, PMorphism, all_frames_upto, all_pmorphisms,
                     bit_indices, generated_subframe, inclusion, subframe)

VERIFY_INPUT_BOUND = 5
VERIFY_TEST_BOUND = 3
VERIFY_TEST_CEILING = 4


@dataclass(frozen=True)
class Cocone:
    """An apex frame with one leg per diagram object."""

    apex: Frame
    legs: tuple[PMorphism, ...]

    def __post_init__(self):
        for leg in self.legs:
            if leg.cod != self.apex:
                raise ValidationError("cocone leg does not land in the apex")


@dataclass(frozen=True)
class Diagram:
    """Finite diagram: objects plus arrows (src index, dst index, morphism)."""

    objects: tuple[Frame, ...]
    arrows: tuple[tuple[int, int, PMorphism], ...] = ()

    def __post_init__(self):
        for src, dst, f in self.arrows:
            if f.dom != self.objects[src] or f.cod != self.objects[dst]:
                raise ValidationError("diagram arrow endpoints mismatch")


def parallel_pair_diagram(f: PMorphism, g: PMorphism) -> Diagram:
    if f.dom != g.dom or f.cod != g.cod:
        raise NotParallel("morphisms do not share domain and codomain")
    return Diagram((f.dom, f.cod), ((0, 1, f), (0, 1, g)))


@dataclass(frozen=True)
class FrameChain:
    """Stages with composable links, links[k]: stages[k] -> stages[k+1]."""

    stages: tuple[Frame, ...]
    links: tuple[PMorphism, ...]

    def __post_init__(self):
        if len(self.links) != max(len(self.stages) - 1, 0):
            raise ValidationError("chain needs exactly one link per step")
        for k, link in enumerate(self.links):
            if link.dom != self.stages[k] or link.cod != self.stages[k + 1]:
                raise ValidationError(f"link {k} does not connect its stages")

    def push(self, stage: int, point: int, target: int) -> int:
        """Image of a stage point after advancing to a later stage."""
        for k in range(stage, target):
            point = self.links[k](point)
        return point


def coproduct(frames) -> Cocone:
    """Disjoint union with the union relation; legs are the block inclusions."""
    frames = tuple(frames)
    offsets = []
    total = 0
    for f in frames:
        offsets.append(total)
        total += f.n
    rows = []
    for off, f in zip(offsets, frames):
        rows.extend(row << off for row in f.rel)
    apex = Frame(tuple(rows))
    legs = tuple(
        PMorphism(f, apex, tuple(range(off, off + f.n)))
        for off, f in zip(offsets, frames))
    return Cocone(apex, legs)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller index as representative
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


def _quotient(cod: Frame, pairs) -> PMorphism:
    """Quotient of cod by the equivalence generated by the given pairs.

    Quotient relation: class X sees class Y iff the minimal representative
    of X has an edge into some member of Y.  Well-definedness holds when the
    pairs come from a parallel p-morphism pair.
    """
    uf = _UnionFind(cod.n)
    for a, b in pairs:
        uf.union(a, b)
    reps = sorted({uf.find(x) for x in range(cod.n)})
    index = {rep: i for i, rep in enumerate(reps)}
    proj = tuple(index[uf.find(x)] for x in range(cod.n))
    members = [0] * len(reps)
    for x in range(cod.n):
        members[proj[x]] |= 1 << x
    rows = []
    for rep in reps:
        row = 0
        succ = cod.rel[rep]
        for cls, mem in enumerate(members):
            if succ & mem:
                row |= 1 << cls
        rows.append(row)
    quot = Frame(tuple(rows))
    return PMorphism(cod, quot, proj)


def coequalizer(f: PMorphism, g: PMorphism) -> PMorphism:
    """Projection onto cod/~ where ~ is generated by {(f(p), g(p))}."""
    if f.dom != g.dom or f.cod != g.cod:
        raise NotParallel("coequalizer needs a parallel pair")
    return _quotient(f.cod, zip(f.mapping, g.mapping))


def agreement_mask(f: PMorphism, g: PMorphism) -> int:
    mask = 0
    for p in range(f.dom.n):
        if f.mapping[p] == g.mapping[p]:
            mask |= 1 << p
    return mask


def equalizer(f: PMorphism, g: PMorphism) -> PMorphism:
    """Inclusion of the largest generated subframe inside the agreement set.

    A point belongs iff its whole cone agrees, so the subframe is
    successor-closed and maximal among successor-closed agreement subsets.
    """
    if f.dom != g.dom or f.cod != g.cod:
        raise NotParallel("equalizer needs a parallel pair")
    agree = agreement_mask(f, g)
    clo = f.dom.closure()
    mask = 0
    for p in range(f.dom.n):
        if clo[p] & ~agree == 0:
            mask |= 1 << p
    return inclusion(f.dom, mask)


def cokernel_pair(f: PMorphism) -> tuple[PMorphism, PMorphism]:
    """The pushout of f against itself: Q + (Q minus the image of f).

    The first block carries a full copy of the codomain relation; the second
    block carries the relation restricted to non-image points; a non-image
    copy sees the first-block copy of each image successor.
    """
    q = f.cod
    image = f.image_mask()
    outside = bit_indices(q.points_mask & ~image)
    second = {old: q.n + k for k, old in enumerate(outside)}
    rows = list(q.rel)
    for old in outside:
        row = 0
        for j in bit_indices(q.rel[old]):
            if image >> j & 1:
                row |= 1 << j            # into the first-block image copy
            else:
                row |= 1 << second[j]    # stay in the second block
        rows.append(row)
    apex = Frame(tuple(rows))
    iota1 = PMorphism(q, apex, tuple(range(q.n)))
    iota2 = PMorphism(
        q, apex,
        tuple(x if image >> x & 1 else second[x] for x in range(q.n)))
    return iota1, iota2


def is_epi(f: PMorphism) -> bool:
    """Epimorphisms are exactly the surjective p-morphisms."""
    return f.is_surjective()


def chain_colimit(chain: FrameChain) -> Cocone:
    """Colimit of a finite chain: coproduct of the stages coequalized along
    the links."""
    if not chain.stages:
        raise ValidationError("chain must be non-empty")
    cop = coproduct(chain.stages)
    prefix = coproduct(chain.stages[:-1])
    offsets = []
    total = 0
    for stage in chain.stages:
        offsets.append(total)
        total += stage.n
    ident = []
    linked = []
    for k in range(len(chain.stages) - 1):
        for x in range(chain.stages[k].n):
            ident.append(offsets[k] + x)
            linked.append(offsets[k + 1] + chain.links[k](x))
    u = PMorphism(prefix.apex, cop.apex, tuple(ident))
    v = PMorphism(prefix.apex, cop.apex, tuple(linked))
    proj = coequalizer(u, v)
    legs = tuple(leg.then(proj) for leg in cop.legs)
    return Cocone(proj.cod, legs)


def factor_through_stage(f: PMorphism, chain: FrameChain,
                         cocone: Optional[Cocone] = None) -> tuple[int, PMorphism]:
    """Factor f: P -> apex through a stage of the chain.

    Phase 0 lifts f to the earliest stage holding a representative of every
    image class.  Phase 1 repairs stability failures one lexicographic pair
    at a time, advancing to the first stage where the openly-found witness
    and the current image merge.  Phase 2 repairs openness with one joint
    advance over all successor pairs.  NoStage signals a cocone that is not
    a genuine chain colimit.
    """
    if cocone is None:
        cocone = chain_colimit(chain)
    if f.cod != cocone.apex:
        raise ValidationError("morphism does not land in the chain colimit apex")
    legs = cocone.legs
    last = len(chain.stages) - 1
    dom = f.dom

    def lift_at(stage: int):
        lifted = []
        for p in range(dom.n):
            target = f(p)
            pick = None
            for x in range(chain.stages[stage].n):
                if legs[stage](x) == target:
                    pick = x
                    break
            if pick is None:
                return None
            lifted.append(pick)
        return lifted

    stage, lift = None, None
    for k in range(last + 1):
        lift = lift_at(k)
        if lift is not None:
            stage = k
            break
    if lift is None or stage is None:
        raise NoStage("no stage holds representatives of every image class")

    def advance(to_stage: int):
        nonlocal stage, lift
        lift = [chain.push(stage, x, to_stage) for x in lift]
        stage = to_stage

    # phase 1: stability
    while True:
        frame = chain.stages[stage]
        bad = None
        for p in range(dom.n):
            for p2 in bit_indices(dom.rel[p]):
                if not frame.rel[lift[p]] >> lift[p2] & 1:
                    bad = (p, p2)
                    break
            if bad:
                break
        if bad is None:
            break
        p, p2 = bad
        witness = None
        for x in bit_indices(frame.rel[lift[p]]):
            if legs[stage](x) == f(p2):
                witness = x
                break
        if witness is None:
            raise NoStage(f"no open witness for stability pair {bad}")
        merged = None
        for k in range(stage + 1, last + 1):
            if chain.push(stage, witness, k) == chain.push(stage, lift[p2], k):
                merged = k
                break
        if merged is None:
            raise NoStage(f"stability pair {bad} never merges along the chain")
        advance(merged)

    # phase 2: openness, single joint advance
    frame = chain.stages[stage]
    join = stage
    for p in range(dom.n):
        for x in bit_indices(frame.rel[lift[p]]):
            hit = None
            for p2 in bit_indices(dom.rel[p]):
                if f(p2) == legs[stage](x):
                    hit = p2
                    break
            if hit is None:
                raise NoStage(f"successor pair ({p},{x}) has no lift target")
            merged = None
            for k in range(stage, last + 1):
                if chain.push(stage, lift[hit], k) == chain.push(stage, x, k):
                    merged = k
                    break
            if merged is None:
                raise NoStage(f"successor pair ({p},{x}) never merges")
            if merged > join:
                join = merged
    advance(join)

    try:
        tilde = PMorphism(dom, chain.stages[stage], tuple(lift))
    except ValidationError as exc:
        raise NoStage(f"repair finished without a p-morphism: {exc}") from exc
    if tilde.then(legs[stage]) != f:
        raise NoStage("factorization does not compose to the original map")
    return stage, tilde


def _commutes(cone: Cocone, diagram: Diagram) -> bool:
    if len(cone.legs) != len(diagram.objects):
        return False
    for leg, obj in zip(cone.legs, diagram.objects):
        if leg.dom != obj:
            return False
    for src, dst, h in diagram.arrows:
        if h.then(cone.legs[dst]) != cone.legs[src]:
            return False
    return True


def verify_colimit(cone: Cocone, diagram: Diagram,
                   test_bound: int = VERIFY_TEST_BOUND,
                   input_bound: int = VERIFY_INPUT_BOUND) -> bool:
    """Brute-force universal-property check against all small test frames.

    True iff the cone commutes and, for every test frame with at most
    test_bound points (one per iso class) and every commuting cocone into
    it, exactly one mediating p-morphism exists.
    """
    if any(obj.n > input_bound for obj in diagram.objects):
        raise BoundExceeded(
            f"diagram object exceeds the input bound {input_bound}")
    if test_bound > VERIFY_TEST_CEILING:
        raise BoundExceeded(
            f"test-frame enumeration above {VERIFY_TEST_CEILING} points "
            "is intractable here")
    if not _commutes(cone, diagram):
        return False
    arrows_by_src = [[] for _ in diagram.objects]
    for src, dst, h in diagram.arrows:
        arrows_by_src[src].append((dst, h))
    for test in all_frames_upto(test_bound):
        obj_maps = [all_pmorphisms(obj, test) for obj in diagram.objects]
        if any(not maps for maps in obj_maps):
            continue  # no commuting cocones into this test frame
        apex_maps = all_pmorphisms(cone.apex, test)
        for combo in _cocones_into(diagram, obj_maps, arrows_by_src):
            matches = 0
            for cand in apex_maps:
                ok = True
                for leg, want in zip(cone.legs, combo):
                    if any(cand[leg(p)] != want[p] for p in range(leg.dom.n)):
                        ok = False
                        break
                if ok:
                    matches += 1
                    if matches > 1:
                        break
            if matches != 1:
                return False
    return True


def _cocones_into(diagram: Diagram, obj_maps, arrows_by_src):
    """All leg tuples commuting with the diagram arrows."""
    k = len(diagram.objects)

    def rec(i, chosen):
        if i == k:
            yield tuple(chosen)
            return
        for cand in obj_maps[i]:
            ok = True
            for src, dst, h in diagram.arrows:
                if src == i and dst < i:
                    if any(chosen[dst][h(p)] != cand[p]
                           for p in range(h.dom.n)):
                        ok = False
                        break
                elif dst == i and src < i:
                    if any(cand[h(p)] != chosen[src][p]
                           for p in range(h.dom.n)):
                        ok = False
                        break
                elif src == i and dst == i:
                    if any(cand[h(p)] != cand[p] for p in range(h.dom.n)):
                        ok = False
                        break
            if ok:
                chosen.append(cand)
                yield from rec(i + 1, chosen)
                chosen.pop()

    yield from rec(0, [])
