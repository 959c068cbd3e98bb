"""Seeded generators for randomized suites: S4 models, frame chains, and
maps into their colimits.

Everything is driven by an explicit random.Random so identical seeds give
identical instances across runs.
"""

from __future__ import annotations

import random

from .colimits import FrameChain, chain_colimit
from .frames import (Frame, PMorphism, bit_indices, generated_subframe,
                     inclusion, rt_closure, validate_pmorphism)
from .models import Model, VarSet


def random_frame(rng: random.Random, max_points: int,
                 min_points: int = 0) -> Frame:
    n = rng.randint(min_points, max_points)
    density = rng.random()
    rows = []
    for _ in range(n):
        row = 0
        for j in range(n):
            if rng.random() < density:
                row |= 1 << j
        rows.append(row)
    return Frame(tuple(rows))


def random_preorder(rng: random.Random, max_points: int,
                    min_points: int = 1) -> Frame:
    """Reflexive-transitive closure of a random sparse relation."""
    base = random_frame(rng, max_points, min_points)
    return Frame(rt_closure(base))


def random_s4_model(rng: random.Random, max_points: int,
                    variables: VarSet) -> Model:
    frame = random_preorder(rng, max_points)
    full = variables.valuation_count
    val = tuple(rng.randrange(full) for _ in range(frame.n))
    return Model(frame, variables, val)


def _random_quotient_link(rng: random.Random, frame: Frame):
    """A surjective p-morphism out of the frame via a random point merge,
    or None when the sampled merge does not validate."""
    if frame.n < 2:
        return None
    a = rng.randrange(frame.n)
    b = rng.randrange(frame.n)
    if a == b:
        return None
    cls = sorted(range(frame.n), key=lambda x: (x != min(a, b), x))
    mapping = []
    kept = [x for x in range(frame.n) if x != max(a, b)]
    index = {x: i for i, x in enumerate(kept)}
    for x in range(frame.n):
        mapping.append(index[min(a, b)] if x == max(a, b) else index[x])
    rows = [0] * len(kept)
    for x in range(frame.n):
        for y in bit_indices(frame.rel[x]):
            rows[mapping[x]] |= 1 << mapping[y]
    quotient = Frame(tuple(rows))
    result = validate_pmorphism(mapping, frame, quotient)
    if isinstance(result, PMorphism):
        return result
    return None


def _random_extension_link(rng: random.Random, frame: Frame,
                           max_points: int):
    """Inclusion of the frame into an extension where it stays generated:
    new points may see old points and each other, never the reverse."""
    extra = rng.randint(1, max(1, max_points - frame.n))
    n = frame.n + extra
    rows = list(frame.rel)
    for k in range(extra):
        row = 0
        for j in range(frame.n + k + 1):
            if rng.random() < 0.5:
                row |= 1 << j
        rows.append(row)
    extended = Frame(tuple(rows))
    return PMorphism(frame, extended, tuple(range(frame.n)))


def random_chain(rng: random.Random, max_stages: int = 4,
                 max_points: int = 4) -> FrameChain:
    stages = [random_frame(rng, max_points, min_points=1)]
    links = []
    target = rng.randint(1, max_stages)
    while len(stages) < target:
        frame = stages[-1]
        link = None
        if frame.n >= 2 and rng.random() < 0.5:
            link = _random_quotient_link(rng, frame)
        if link is None and frame.n < max_points:
            link = _random_extension_link(rng, frame, max_points)
        if link is None:
            link = PMorphism.identity(frame)
        links.append(link)
        stages.append(link.cod)
    return FrameChain(tuple(stages), tuple(links))


def random_map_into_chain_colimit(rng: random.Random, max_dom_points: int = 3,
                                  max_stages: int = 4, max_points: int = 4):
    """A chain together with a validated p-morphism from a small frame into
    its colimit apex.  Retries chains until a small enough source exists."""
    while True:
        chain = random_chain(rng, max_stages, max_points)
        cocone = chain_colimit(chain)
        apex = cocone.apex
        candidates = sorted({apex.closure()[p] for p in range(apex.n)},
                            key=lambda m: (bin(m).count("1"), m))
        small = [m for m in candidates
                 if 0 < bin(m).count("1") <= max_dom_points]
        if not small:
            continue
        mask = generated_subframe(apex, rng.choice(small))
        if bin(mask).count("1") > max_dom_points:
            continue
        f = inclusion(apex, mask)
        return chain, cocone, f
