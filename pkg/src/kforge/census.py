"""Exhaustive sweep over p-morphisms between small frames, up to iso.

Criteria that quantify over "all parallel pairs between small frames" reduce
to finitely many outcome-determining configurations: a coequalizer check
depends only on the codomain and the generated partition, an equalizer check
only on the domain and the agreement set, a cokernel check only on the
codomain and the image.  The sweep enumerates every pair of iso-class
representatives, every p-morphism pair between them, and records one witness
per configuration, so downstream checks cover the full quantifier exactly
once per distinct outcome.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass, field

from .frames import Frame, all_frames_upto, all_pmorphisms

_WORKER_STATE: dict = {}


def _point_signature(frame: Frame, clo, p: int) -> tuple:
    return (
        bool(frame.rel[p] >> p & 1),          # loop
        bin(frame.rel[p]).count("1"),         # out-degree
        bin(clo[p]).count("1"),               # cone size
    )


def _compatible(psig: tuple, qsig: tuple) -> bool:
    """Whether a domain point with signature psig can map to a codomain
    point with signature qsig: loops persist, out-degree and cone size
    never grow along a p-morphism."""
    ploop, podeg, pcsize = psig
    qloop, qodeg, qcsize = qsig
    if ploop and not qloop:
        return False
    return qodeg <= podeg and qcsize <= pcsize


@dataclass
class PairSweepResult:
    """Accumulated configurations and raw counts from a class-pair sweep."""

    pair_count: int = 0
    nonempty_pairs: int = 0
    hom_total: int = 0
    parallel_pairs: int = 0
    coreflexive_pairs: int = 0
    # (qid, partition rgs) -> (pid, fmap, gmap)
    coeq_configs: dict = field(default_factory=dict)
    # (pid, agreement mask) -> (qid, fmap, gmap)
    eq_configs: dict = field(default_factory=dict)
    # (pid, agreement mask) -> (qid, fmap, gmap, tmap), coreflexive pairs only
    coreflexive_configs: dict = field(default_factory=dict)
    # (qid, image mask) -> (pid, fmap)
    epi_configs: dict = field(default_factory=dict)

    def merge(self, other: "PairSweepResult") -> None:
        self.pair_count += other.pair_count
        self.nonempty_pairs += other.nonempty_pairs
        self.hom_total += other.hom_total
        self.parallel_pairs += other.parallel_pairs
        self.coreflexive_pairs += other.coreflexive_pairs
        for mine, theirs in (
                (self.coeq_configs, other.coeq_configs),
                (self.eq_configs, other.eq_configs),
                (self.coreflexive_configs, other.coreflexive_configs),
                (self.epi_configs, other.epi_configs)):
            for key, rep in theirs.items():
                if key not in mine or rep < mine[key]:
                    mine[key] = rep


def _partition_rgs(n: int, fmap, gmap) -> tuple[int, ...]:
    """Restricted-growth encoding of the partition generated by the pairs."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in zip(fmap, gmap):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    labels = {}
    out = []
    for x in range(n):
        root = find(x)
        if root not in labels:
            labels[root] = len(labels)
        out.append(labels[root])
    return tuple(out)


def _init_worker(max_points: int):
    classes = all_frames_upto(max_points)
    all_sigs = sorted({
        _point_signature(f, f.closure(), p)
        for f in classes for p in range(f.n)})
    sig_index = {s: k for k, s in enumerate(all_sigs)}
    point_sigs = []      # per class: tuple of signature ids per point
    sig_to_mask = []     # per class: per signature id, bitmask of points
    for frame in classes:
        clo = frame.closure()
        ids = tuple(sig_index[_point_signature(frame, clo, p)]
                    for p in range(frame.n))
        point_sigs.append(ids)
        masks = []
        for psig in all_sigs:
            mask = 0
            for q in range(frame.n):
                if _compatible(psig, all_sigs[ids[q]]):
                    mask |= 1 << q
            masks.append(mask)
        sig_to_mask.append(masks)
    _WORKER_STATE["classes"] = classes
    _WORKER_STATE["point_sigs"] = point_sigs
    _WORKER_STATE["sig_to_mask"] = sig_to_mask


def _pmorphisms(drel, crel, cand) -> list[tuple[int, ...]]:
    """Backtracking over precomputed candidate masks; checks stability
    incrementally, openness on completion."""
    n = len(drel)
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


def _hom(pid, qid):
    classes = _WORKER_STATE["classes"]
    dom, cod = classes[pid], classes[qid]
    if dom.n == 0:
        return [()]
    if cod.n == 0:
        return []
    qmasks = _WORKER_STATE["sig_to_mask"][qid]
    cand = []
    for sig in _WORKER_STATE["point_sigs"][pid]:
        mask = qmasks[sig]
        if not mask:
            return []
        cand.append(mask)
    return _pmorphisms(dom.rel, cod.rel, cand)


def _sweep_chunk(q_ids) -> PairSweepResult:
    classes = _WORKER_STATE["classes"]
    point_sigs = _WORKER_STATE["point_sigs"]
    res = PairSweepResult()
    discrete = [tuple(range(n)) for n in range(5)]
    full_agree = [(1 << n) - 1 for n in range(5)]

    for qid in q_ids:
        qmasks = _WORKER_STATE["sig_to_mask"][qid]
        qn = classes[qid].n
        for pid in range(len(classes)):
            res.pair_count += 1
            sigs = point_sigs[pid]
            skip = False
            for sig in sigs:
                if not qmasks[sig]:
                    skip = True
                    break
            if skip:
                continue
            maps = _hom(pid, qid)
            if not maps:
                continue
            res.nonempty_pairs += 1
            res.hom_total += len(maps)
            pn = classes[pid].n
            # epi / cokernel configurations, one per distinct image
            for fmap in maps:
                image = 0
                for q in fmap:
                    image |= 1 << q
                key = (qid, image)
                rep = (pid, fmap)
                if key not in res.epi_configs or rep < res.epi_configs[key]:
                    res.epi_configs[key] = rep
            # parallel pairs: coequalizer and equalizer configurations
            coeq_configs = res.coeq_configs
            eq_configs = res.eq_configs
            for i, fmap in enumerate(maps):
                # f = g: the partition is discrete, agreement is everything
                res.parallel_pairs += 1
                ckey = (qid, discrete[qn])
                crep = (pid, fmap, fmap)
                if ckey not in coeq_configs or crep < coeq_configs[ckey]:
                    coeq_configs[ckey] = crep
                ekey = (pid, full_agree[pn])
                erep = (qid, fmap, fmap)
                if ekey not in eq_configs or erep < eq_configs[ekey]:
                    eq_configs[ekey] = erep
                for gmap in maps[i + 1:]:
                    res.parallel_pairs += 1
                    ckey = (qid, _partition_rgs(qn, fmap, gmap))
                    crep = (pid, fmap, gmap)
                    if ckey not in coeq_configs or crep < coeq_configs[ckey]:
                        coeq_configs[ckey] = crep
                    agree = 0
                    for p in range(pn):
                        if fmap[p] == gmap[p]:
                            agree |= 1 << p
                    ekey = (pid, agree)
                    erep = (qid, fmap, gmap)
                    if ekey not in eq_configs or erep < eq_configs[ekey]:
                        eq_configs[ekey] = erep
            # coreflexive pairs: sections of some retraction t
            back = _hom(qid, pid)
            if back:
                ident = discrete[pn]
                for tmap in back:
                    sections = [m for m in maps
                                if tuple(tmap[x] for x in m) == ident]
                    for i, fmap in enumerate(sections):
                        for gmap in sections[i:]:
                            res.coreflexive_pairs += 1
                            agree = 0
                            for p in range(pn):
                                if fmap[p] == gmap[p]:
                                    agree |= 1 << p
                            key = (pid, agree)
                            rep = (qid, fmap, gmap, tmap)
                            if key not in res.coreflexive_configs \
                                    or rep < res.coreflexive_configs[key]:
                                res.coreflexive_configs[key] = rep
    return res


def sweep_small_frames(max_points: int = 4,
                       processes: int = 1) -> PairSweepResult:
    """Run the full ordered class-pair sweep; results are independent of the
    process count."""
    classes = all_frames_upto(max_points)
    chunks = [list(range(k, len(classes), max(processes * 4, 1)))
              for k in range(max(processes * 4, 1))]
    chunks = [c for c in chunks if c]
    total = PairSweepResult()
    if processes <= 1:
        _init_worker(max_points)
        for chunk in chunks:
            total.merge(_sweep_chunk(chunk))
        return total
    with multiprocessing.Pool(
            processes, initializer=_init_worker,
            initargs=(max_points,)) as pool:
        for res in pool.imap_unordered(_sweep_chunk, chunks):
            total.merge(res)
    return total
