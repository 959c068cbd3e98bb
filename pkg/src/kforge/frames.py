"""Finite Kripke frames and p-morphisms over bitset-encoded relations.

A frame is a finite directed graph: points 0..n-1 and a successor bitset per
point.  All set-valued data (successor sets, cones, subframes) are plain ints
used as bitsets, so exhaustive scans over subsets stay cheap.  Point identity
is positional; labels are cosmetic and ignored by every algorithm.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional

from .errors import BoundExceeded, NotPreorder, ValidationError

SUBFRAME_ENUM_BOUND = 20


def bit_indices(mask: int) -> list[int]:
    """Indices of the set bits of a bitset, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@dataclass(frozen=True)
class Frame:
    """Finite directed graph (P, R) with a write-once closure cache."""

    rel: tuple[int, ...]
    labels: Optional[tuple[str, ...]] = field(default=None, compare=False)
    _closure: Optional[tuple[int, ...]] = field(
        default=None, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.rel)
        full = (1 << n) - 1
        for i, row in enumerate(self.rel):
            if row & ~full:
                raise ValidationError(f"successor set of point {i} out of range")
        if self.labels is not None and len(self.labels) != n:
            raise ValidationError("label count does not match point count")

    @property
    def n(self) -> int:
        return len(self.rel)

    @property
    def points_mask(self) -> int:
        return (1 << len(self.rel)) - 1

    @staticmethod
    def from_edges(n: int, edges, labels=None) -> "Frame":
        """Build from an edge list; duplicates allowed, order irrelevant."""
        rows = [0] * n
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise ValidationError(f"edge ({i},{j}) out of range for {n} points")
            rows[i] |= 1 << j
        return Frame(tuple(rows), tuple(labels) if labels is not None else None)

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in bit_indices(self.rel[i])]

    def closure(self) -> tuple[int, ...]:
        """Reflexive-transitive closure, computed once and cached."""
        if self._closure is None:
            object.__setattr__(self, "_closure", rt_closure(self))
        return self._closure

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.rel[i] >> j & 1)

    def is_preorder(self) -> bool:
        return preorder_violation(self) is None

    def __hash__(self):
        return hash(self.rel)


def rt_closure(frame: Frame) -> tuple[int, ...]:
    """Least reflexive transitive relation containing the frame's relation."""
    clo = [frame.rel[i] | (1 << i) for i in range(frame.n)]
    changed = True
    while changed:
        changed = False
        for i in range(frame.n):
            acc = clo[i]
            todo = acc
            while todo:
                low = todo & -todo
                todo ^= low
                acc |= clo[low.bit_length() - 1]
            if acc != clo[i]:
                clo[i] = acc
                changed = True
    return tuple(clo)


def preorder_violation(frame: Frame):
    """First witness that the relation is not reflexive-transitive, or None.

    Witnesses are (p, p) for a missing loop, else the first (p, q) with
    p R q' R q but not p R q, in ascending scan order.
    """
    for p in range(frame.n):
        if not frame.rel[p] >> p & 1:
            return (p, p)
    for p in range(frame.n):
        reach = 0
        row = frame.rel[p]
        todo = row
        while todo:
            low = todo & -todo
            todo ^= low
            reach |= frame.rel[low.bit_length() - 1]
        missing = reach & ~row
        if missing:
            return (p, (missing & -missing).bit_length() - 1)
    return None


def require_preorder(frame: Frame) -> None:
    witness = preorder_violation(frame)
    if witness is not None:
        raise NotPreorder(witness)


def generated_subframe(frame: Frame, seeds: int) -> int:
    """Least successor-closed superset of the seed bitset."""
    if seeds & ~frame.points_mask:
        raise ValidationError("seed set out of range")
    closed = seeds
    todo = seeds
    while todo:
        low = todo & -todo
        todo ^= low
        new = frame.rel[low.bit_length() - 1] & ~closed
        closed |= new
        todo |= new
    return closed


def cone(frame: Frame, p: int) -> int:
    """The cone of p: all points reachable in zero or more steps."""
    return frame.closure()[p]


def enumerate_generated_subframes(frame: Frame, bound: int = SUBFRAME_ENUM_BOUND,
                                  result_cap: Optional[int] = None) -> list[int]:
    """All successor-closed subsets, ascending as bitsets, empty set included.

    The count can be exponential in the point count, hence the bound on the
    frame size.  ``result_cap``, when given, aborts the enumeration as soon
    as more subframes than the cap exist.
    """
    if frame.n > bound:
        raise BoundExceeded(
            f"subframe enumeration over {frame.n} points exceeds bound {bound}")
    # Every successor-closed set is a union of cones, so close {<empty>}
    # under union with each distinct cone.
    cones = sorted(set(frame.closure()))
    sets = {0}
    for c in cones:
        sets |= {s | c for s in sets}
        if result_cap is not None and len(sets) > result_cap:
            raise BoundExceeded(
                f"generated-subframe count exceeds cap {result_cap}")
    return sorted(sets)


def height(frame: Frame, p: int) -> int:
    """Maximum cardinality of strictly ascending chains from p.

    Defined only on preorders; a strict step p R q excludes q R p.
    """
    return frame_heights(frame)[p]


def frame_heights(frame: Frame) -> tuple[int, ...]:
    """Heights of all points of a preordered frame."""
    require_preorder(frame)
    clo = frame.rel  # already reflexive-transitive
    n = frame.n
    heights: list[Optional[int]] = [None] * n
    order = sorted(range(n), key=lambda p: bin(clo[p]).count("1"))
    for p in order:
        best = 1
        todo = clo[p]
        while todo:
            low = todo & -todo
            todo ^= low
            q = low.bit_length() - 1
            if not clo[q] >> p & 1:  # strict step: q does not see p back
                hq = heights[q]
                if hq is None:
                    hq = _height_rec(clo, q, heights)
                if hq + 1 > best:
                    best = hq + 1
        heights[p] = best
    return tuple(heights)  # type: ignore[arg-type]


def _height_rec(clo, p, heights):
    best = 1
    todo = clo[p]
    while todo:
        low = todo & -todo
        todo ^= low
        q = low.bit_length() - 1
        if not clo[q] >> p & 1:
            hq = heights[q]
            if hq is None:
                hq = _height_rec(clo, q, heights)
            if hq + 1 > best:
                best = hq + 1
    heights[p] = best
    return best


def cluster(frame: Frame, p: int) -> int:
    """Points mutually related to p (always contains p on a preorder)."""
    require_preorder(frame)
    members = 0
    for q in bit_indices(frame.rel[p]):
        if frame.rel[q] >> p & 1:
            members |= 1 << q
    return members


def scc_masks(frame: Frame) -> list[int]:
    """Mutual-reachability classes under the closure, ordered by least member."""
    clo = frame.closure()
    seen = 0
    out = []
    for p in range(frame.n):
        if seen >> p & 1:
            continue
        members = 0
        for q in bit_indices(clo[p]):
            if clo[q] >> p & 1:
                members |= 1 << q
        seen |= members
        out.append(members)
    return out


@dataclass(frozen=True)
class Violation:
    """First failing witness of a p-morphism check.

    ``kind`` is "stability" with witness (p, p'), or "openness" with
    witness (p, q').
    """

    kind: str
    witness: tuple[int, int]


def pmorphism_violation(mapping, dom: Frame, cod: Frame) -> Optional[Violation]:
    """Scan for the first stability then openness violation, ascending."""
    if len(mapping) != dom.n:
        raise ValidationError("mapping is not total on the domain")
    for p, q in enumerate(mapping):
        if not 0 <= q < cod.n:
            raise ValidationError(f"mapping sends {p} outside the codomain")
    drel, crel = dom.rel, cod.rel
    for p in range(dom.n):
        crow = crel[mapping[p]]
        succ = drel[p]
        while succ:
            low = succ & -succ
            succ ^= low
            p2 = low.bit_length() - 1
            if not crow >> mapping[p2] & 1:
                return Violation("stability", (p, p2))
    for p in range(dom.n):
        image = 0
        succ = drel[p]
        while succ:
            low = succ & -succ
            succ ^= low
            image |= 1 << mapping[low.bit_length() - 1]
        missing = crel[mapping[p]] & ~image
        if missing:
            return Violation("openness", (p, (missing & -missing).bit_length() - 1))
    return None


@dataclass(frozen=True)
class PMorphism:
    """A stable and open map between frames; construction validates."""

    dom: Frame
    cod: Frame
    mapping: tuple[int, ...]

    def __post_init__(self):
        bad = pmorphism_violation(self.mapping, self.dom, self.cod)
        if bad is not None:
            raise ValidationError(
                f"not a p-morphism: {bad.kind} fails at {bad.witness}")

    def __call__(self, p: int) -> int:
        return self.mapping[p]

    def then(self, other: "PMorphism") -> "PMorphism":
        """Diagrammatic composition: (f.then(g))(p) = g(f(p))."""
        if self.cod != other.dom:
            raise ValidationError("composition mismatch")
        return PMorphism(self.dom, other.cod,
                         tuple(other.mapping[q] for q in self.mapping))

    @staticmethod
    def identity(frame: Frame) -> "PMorphism":
        return PMorphism(frame, frame, tuple(range(frame.n)))

    def is_surjective(self) -> bool:
        return mask_of(self.mapping) == self.cod.points_mask

    def is_injective(self) -> bool:
        return len(set(self.mapping)) == self.dom.n

    def image_mask(self) -> int:
        return mask_of(self.mapping)

    def __hash__(self):
        return hash((self.dom.rel, self.cod.rel, self.mapping))


def validate_pmorphism(mapping, dom: Frame, cod: Frame):
    """Either a validated PMorphism or the first Violation, never raises
    for well-typed total mappings."""
    bad = pmorphism_violation(tuple(mapping), dom, cod)
    if bad is not None:
        return bad
    return PMorphism(dom, cod, tuple(mapping))


def subframe(frame: Frame, mask: int) -> tuple[Frame, list[int]]:
    """Induced subframe on a point bitset; returns it with new->old indices."""
    keep = bit_indices(mask)
    pos = {old: new for new, old in enumerate(keep)}
    rows = []
    for old in keep:
        row = 0
        for j in bit_indices(frame.rel[old] & mask):
            row |= 1 << pos[j]
        rows.append(row)
    labels = None
    if frame.labels is not None:
        labels = tuple(frame.labels[old] for old in keep)
    return Frame(tuple(rows), labels), keep


def inclusion(frame: Frame, mask: int) -> PMorphism:
    """Inclusion of a generated subframe; validates iff mask is closed."""
    sub, keep = subframe(frame, mask)
    return PMorphism(sub, frame, tuple(keep))


def frame_iso(a: Frame, b: Frame) -> Optional[tuple[int, ...]]:
    """Lexicographically least relation-preserving-and-reflecting bijection,
    or None."""
    n = a.n
    if n != b.n:
        return None
    if sorted(bin(r).count("1") for r in a.rel) != \
            sorted(bin(r).count("1") for r in b.rel):
        return None
    used = [False] * n
    assign = [0] * n

    def consistent(i, q):
        if a.rel[i] >> i & 1 != b.rel[q] >> q & 1:
            return False
        for j in range(i):
            if (a.rel[i] >> j & 1) != (b.rel[q] >> assign[j] & 1):
                return False
            if (a.rel[j] >> i & 1) != (b.rel[assign[j]] >> q & 1):
                return False
        return True

    def search(i):
        if i == n:
            return True
        for q in range(n):
            if used[q] or not consistent(i, q):
                continue
            assign[i] = q
            used[q] = True
            if search(i + 1):
                return True
            used[q] = False
        return False

    if search(0):
        return tuple(assign)
    return None


def frame_automorphisms(frame: Frame) -> list[tuple[int, ...]]:
    """All relation-preserving-and-reflecting permutations, lexicographic."""
    n = frame.n
    out = []
    used = [False] * n
    assign = [0] * n

    def search(i):
        if i == n:
            out.append(tuple(assign))
            return
        for q in range(n):
            if used[q]:
                continue
            ok = frame.rel[i] >> i & 1 == frame.rel[q] >> q & 1
            if ok:
                for j in range(i):
                    if (frame.rel[i] >> j & 1) != (frame.rel[q] >> assign[j] & 1) \
                            or (frame.rel[j] >> i & 1) != (frame.rel[assign[j]] >> q & 1):
                        ok = False
                        break
            if ok:
                assign[i] = q
                used[q] = True
                search(i + 1)
                used[q] = False
    search(0)
    return out


def encode_rel(rel: tuple[int, ...]) -> int:
    """Pack an n-point relation into one int, row i at bits [i*n, (i+1)*n)."""
    n = len(rel)
    code = 0
    for i, row in enumerate(rel):
        code |= row << (i * n)
    return code


def permute_rel(rel: tuple[int, ...], perm: tuple[int, ...]) -> tuple[int, ...]:
    """Relabel points by perm: new point perm[i] plays old point i."""
    n = len(rel)
    rows = [0] * n
    for i, row in enumerate(rel):
        new = 0
        while row:
            low = row & -row
            row ^= low
            new |= 1 << perm[low.bit_length() - 1]
        rows[perm[i]] = new
    return tuple(rows)


def canonical_key(frame: Frame) -> int:
    """Smallest encoded relation over all relabelings; iso-class invariant."""
    n = frame.n
    best = None
    for perm in itertools.permutations(range(n)):
        code = encode_rel(permute_rel(frame.rel, perm))
        if best is None or code < best:
            best = code
    return best if best is not None else 0


@lru_cache(maxsize=None)
def frame_iso_classes(n: int) -> tuple[Frame, ...]:
    """Canonical representatives of all frames on exactly n points.

    Exhaustive over the 2^(n*n) labeled relations; intended for n <= 4.
    """
    if n == 0:
        return (Frame(()),)
    if n * n > 16:
        raise BoundExceeded(f"iso-class enumeration over {n} points is intractable")
    perms = list(itertools.permutations(range(n)))[1:]
    # per-permutation bitset relabeling tables
    tables = []
    for perm in perms:
        tab = [0] * (1 << n)
        for mask in range(1 << n):
            new = 0
            m = mask
            while m:
                low = m & -m
                m ^= low
                new |= 1 << perm[low.bit_length() - 1]
            tab[mask] = new
        tables.append((perm, tab))
    reps = []
    size = 1 << n
    for code in range(1 << (n * n)):
        rows = tuple((code >> (i * n)) & (size - 1) for i in range(n))
        canonical = True
        for perm, tab in tables:
            other = 0
            for i in range(n):
                other |= tab[rows[i]] << (perm[i] * n)
            if other < code:
                canonical = False
                break
        if canonical:
            reps.append(Frame(rows))
    return tuple(reps)


def all_frames_upto(n: int) -> list[Frame]:
    """Iso-class representatives of all frames with at most n points."""
    out = []
    for k in range(n + 1):
        out.extend(frame_iso_classes(k))
    return out


def all_pmorphisms(dom: Frame, cod: Frame) -> list[tuple[int, ...]]:
    """All p-morphism mappings dom -> cod, lexicographically ascending."""
    n, m = dom.n, cod.n
    if n == 0:
        return [()]
    if m == 0:
        return []
    dclo, cclo = dom.closure(), cod.closure()
    dsize = [bin(x).count("1") for x in dclo]
    csize = [bin(x).count("1") for x in cclo]
    cand = []
    for p in range(n):
        mask = 0
        for q in range(m):
            if dom.rel[p] >> p & 1 and not cod.rel[q] >> q & 1:
                continue
            if dom.rel[p] == 0 and cod.rel[q] != 0:
                continue
            if csize[q] > dsize[p]:
                continue
            mask |= 1 << q
        if not mask:
            return []
        cand.append(mask)
    drel, crel = dom.rel, cod.rel
    results = []
    assign = [0] * n

    def search(i):
        opts = cand[i]
        while opts:
            low = opts & -opts
            opts ^= low
            q = low.bit_length() - 1
            ok = True
            for j in range(i):
                if drel[i] >> j & 1 and not crel[q] >> assign[j] & 1:
                    ok = False
                    break
                if drel[j] >> i & 1 and not crel[assign[j]] >> q & 1:
                    ok = False
                    break
            if not ok:
                continue
            if drel[i] >> i & 1 and not crel[q] >> q & 1:
                continue
            assign[i] = q
            if i + 1 == n:
                for p in range(n):
                    image = 0
                    succ = drel[p]
                    while succ:
                        b = succ & -succ
                        succ ^= b
                        image |= 1 << assign[b.bit_length() - 1]
                    if crel[assign[p]] & ~image:
                        break
                else:
                    results.append(tuple(assign))
            else:
                search(i + 1)

    search(0)
    return results


def hom_frames(dom: Frame, cod: Frame) -> list[PMorphism]:
    return [PMorphism(dom, cod, m) for m in all_pmorphisms(dom, cod)]


def frames_to_dot(frame: Frame, name: str = "G") -> str:
    """DOT export: nodes "i:label", one edge per relation pair, points of a
    common mutual-reachability cluster grouped."""
    lines = [f"digraph {name} {{"]
    labels = frame.labels or tuple(str(i) for i in range(frame.n))
    groups = [g for g in scc_masks(frame) if bin(g).count("1") > 1]
    grouped = 0
    for k, g in enumerate(groups):
        grouped |= g
        lines.append(f"  subgraph cluster_{k} {{")
        for i in bit_indices(g):
            lines.append(f'    p{i} [label="{i}:{labels[i]}"];')
        lines.append("  }")
    for i in range(frame.n):
        if not grouped >> i & 1:
            lines.append(f'  p{i} [label="{i}:{labels[i]}"];')
    for i, j in frame.edges():
        lines.append(f"  p{i} -> p{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def frame_iterator_labeled(n: int) -> Iterator[Frame]:
    """All labeled frames on exactly n points, ascending by encoded relation."""
    size = 1 << n
    for code in range(1 << (n * n)):
        yield Frame(tuple((code >> (i * n)) & (size - 1) for i in range(n)))
