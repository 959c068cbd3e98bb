"""JSON and DOT encodings for frames, morphisms, algebras, models, stages.

All loaders deduplicate repeated edges, accept any edge order, and validate
on construction.  Morphism files may reference frame files by path (resolved
against the referencing file) or carry frames inline.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from .algebras import ModalAlgebra
from .colimits import Cocone, Diagram, FrameChain
from .errors import ParseError
from .frames import Frame, PMorphism, bit_indices, frames_to_dot
from .models import Model, ModelMorphism, VarSet
from .universal import Carried, NewPoint, UniversalStage


def _require(obj: dict, key: str, context: str):
    if key not in obj:
        raise ParseError(f"{context}: missing field '{key}'")
    return obj[key]


def frame_to_json(frame: Frame) -> dict:
    labels = frame.labels or tuple(str(i) for i in range(frame.n))
    return {"points": list(labels), "rel": [[i, j] for i, j in frame.edges()]}


def frame_from_json(obj: dict) -> Frame:
    if not isinstance(obj, dict):
        raise ParseError("frame: expected an object")
    points = _require(obj, "points", "frame")
    rel = _require(obj, "rel", "frame")
    n = len(points)
    try:
        edges = [(int(i), int(j)) for i, j in rel]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"frame: bad edge list: {exc}") from exc
    for i, j in edges:
        if not (0 <= i < n and 0 <= j < n):
            raise ParseError(f"frame: edge ({i},{j}) out of range")
    return Frame.from_edges(n, edges, labels=[str(p) for p in points])


def pmorphism_to_json(f: PMorphism) -> dict:
    return {
        "dom": frame_to_json(f.dom),
        "cod": frame_to_json(f.cod),
        "map": list(f.mapping),
    }


def _frame_ref(obj, base_dir: Optional[Path], context: str) -> Frame:
    if isinstance(obj, str):
        path = Path(obj)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return load_frame(path)
    if isinstance(obj, dict):
        return frame_from_json(obj)
    raise ParseError(f"{context}: expected a frame object or a file path")


def pmorphism_from_json(obj: dict, base_dir: Optional[Path] = None) -> PMorphism:
    dom = _frame_ref(_require(obj, "dom", "morphism"), base_dir, "morphism dom")
    cod = _frame_ref(_require(obj, "cod", "morphism"), base_dir, "morphism cod")
    mapping = _require(obj, "map", "morphism")
    return PMorphism(dom, cod, tuple(int(x) for x in mapping))


def algebra_to_json(algebra: ModalAlgebra) -> dict:
    if algebra.mode == "concrete":
        preds = algebra.diamond_on_atoms
        n = algebra.atom_count
        edges = [[p, q] for q in range(n) for p in bit_indices(preds[q])]
        frame = {"points": [str(i) for i in range(n)],
                 "rel": sorted(edges)}
        return {"dual-of": frame}
    return {
        "elements": list(algebra.names),
        "join": [list(row) for row in algebra.join_table],
        "neg": list(algebra.neg_table),
        "diamond": list(algebra.diamond_table),
        "bot": algebra.bot_element,
    }


def algebra_from_json(obj: dict) -> ModalAlgebra:
    from .algebras import powerset_algebra
    if "dual-of" in obj:
        return powerset_algebra(frame_from_json(obj["dual-of"]))
    names = _require(obj, "elements", "algebra")
    return ModalAlgebra.presented(
        [str(x) for x in names],
        _require(obj, "join", "algebra"),
        _require(obj, "neg", "algebra"),
        _require(obj, "diamond", "algebra"),
        int(_require(obj, "bot", "algebra")),
    )


def model_to_json(model: Model) -> dict:
    out = frame_to_json(model.frame)
    out["vars"] = list(model.vars.names)
    out["val"] = [model.vars.decode(v) for v in model.val]
    return out


def model_from_json(obj: dict) -> Model:
    frame = frame_from_json(obj)
    variables = VarSet(tuple(str(v) for v in _require(obj, "vars", "model")))
    raw = _require(obj, "val", "model")
    if len(raw) != frame.n:
        raise ParseError("model: valuation list does not cover the points")
    try:
        val = tuple(variables.encode(entry) for entry in raw)
    except ValueError as exc:
        raise ParseError(f"model: unknown variable: {exc}") from exc
    return Model(frame, variables, val)


def model_morphism_to_json(m: ModelMorphism) -> dict:
    return {
        "dom": model_to_json(m.dom),
        "cod": model_to_json(m.cod),
        "map": list(m.f.mapping),
    }


def stage_to_json(stage: UniversalStage) -> dict:
    out = model_to_json(stage.model)
    out["stage"] = stage.n
    entries = []
    for p in stage.provenance:
        if isinstance(p, Carried):
            entries.append("carried")
        else:
            entries.append({
                "y": stage.model.vars.decode(p.val),
                "Y": [stage.model.vars.decode(y) for y in p.cluster_vals],
                "G": bit_indices(p.base),
            })
    out["provenance"] = entries
    return out


def stage_from_json(obj: dict) -> UniversalStage:
    model = model_from_json(obj)
    n = int(_require(obj, "stage", "stage"))
    raw = _require(obj, "provenance", "stage")
    entries = []
    for item in raw:
        if item == "carried":
            entries.append(Carried())
        else:
            vals = tuple(sorted(model.vars.encode(y) for y in item["Y"]))
            base = 0
            for i in item["G"]:
                base |= 1 << int(i)
            entries.append(NewPoint(model.vars.encode(item["y"]), vals, base))
    return UniversalStage(n, model, tuple(entries))


def cocone_from_json(obj: dict, base_dir: Optional[Path] = None
                     ) -> tuple[Cocone, Diagram]:
    raw_diag = _require(obj, "diagram", "cocone")
    objects = tuple(_frame_ref(o, base_dir, "diagram object")
                    for o in _require(raw_diag, "objects", "diagram"))
    arrows = []
    for arrow in raw_diag.get("arrows", []):
        src = int(_require(arrow, "src", "arrow"))
        dst = int(_require(arrow, "dst", "arrow"))
        mapping = tuple(int(x) for x in _require(arrow, "map", "arrow"))
        arrows.append((src, dst, PMorphism(objects[src], objects[dst], mapping)))
    diagram = Diagram(objects, tuple(arrows))
    apex = _frame_ref(_require(obj, "apex", "cocone"), base_dir, "apex")
    legs = tuple(
        PMorphism(objects[i], apex, tuple(int(x) for x in leg))
        for i, leg in enumerate(_require(obj, "legs", "cocone")))
    return Cocone(apex, legs), diagram


def chain_from_json(obj: dict, base_dir: Optional[Path] = None
                    ) -> tuple[FrameChain, Optional[PMorphism]]:
    stages = tuple(_frame_ref(o, base_dir, "chain stage")
                   for o in _require(obj, "stages", "chain"))
    links = tuple(
        PMorphism(stages[k], stages[k + 1], tuple(int(x) for x in link))
        for k, link in enumerate(obj.get("links", [])))
    chain = FrameChain(stages, links)
    if "dom" in obj and "map" in obj:
        from .colimits import chain_colimit
        dom = _frame_ref(obj["dom"], base_dir, "chain dom")
        apex = chain_colimit(chain).apex
        f = PMorphism(dom, apex, tuple(int(x) for x in obj["map"]))
        return chain, f
    return chain, None


def load_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc


def load_frame(path) -> Frame:
    return frame_from_json(load_json(path))


def load_model(path) -> Model:
    return model_from_json(load_json(path))


def dumps(obj: dict) -> str:
    """Canonical JSON text: sorted keys, two-space indent, newline-terminated."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def stage_to_dot(stage: UniversalStage) -> str:
    """DOT export of a stage frame with points ranked by height."""
    body = frames_to_dot(stage.model.frame)
    if stage.model.n == 0:
        return body
    heights = stage.heights()
    by_height: dict[int, list[int]] = {}
    for p, h in enumerate(heights):
        by_height.setdefault(h, []).append(p)
    ranks = []
    for h in sorted(by_height):
        members = "; ".join(f"p{p}" for p in by_height[h])
        ranks.append(f"  {{ rank=same; {members}; }}")
    lines = body.rstrip("\n").split("\n")
    return "\n".join(lines[:-1] + ranks + [lines[-1]]) + "\n"
