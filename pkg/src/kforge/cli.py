"""Command-line front end: JSON/DOT I/O over the frame, colimit, duality,
model, and universal-model operations.

Exit codes: 0 success, 1 validation failure (a witness is reported),
2 usage or parse error, 3 bound exceeded.  Reports printed to stdout are
byte-identical across runs for identical inputs and config; timing goes to
stderr.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import algebras, colimits, frames, models, serialize, universal
from .config import Config, load_config
from .errors import (BoundExceeded, KforgeError, ParseError, ValidationError)
from .frames import Frame, PMorphism, Violation, bit_indices
from .models import Irreducible, ViolatesA, ViolatesB, VarSet

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_BOUND = 3


@dataclass
class RunReport:
    """Machine-readable outcome of one CLI invocation."""

    command: list[str]
    result: Optional[dict] = None
    error: Optional[dict] = None
    passed: int = 0
    failed: int = 0
    elapsed: float = 0.0

    def payload(self) -> dict:
        out = {
            "command": self.command,
            "checks": {"passed": self.passed, "failed": self.failed},
        }
        if self.result is not None:
            out["result"] = self.result
        if self.error is not None:
            out["error"] = self.error
        return out

    @property
    def exit_code(self) -> int:
        if self.error is not None:
            return int(self.error.get("exit", EXIT_VALIDATION))
        return EXIT_OK if self.failed == 0 else EXIT_VALIDATION


def _error_payload(exc: Exception) -> dict:
    exit_code = EXIT_VALIDATION
    if isinstance(exc, BoundExceeded):
        exit_code = EXIT_BOUND
    elif isinstance(exc, ParseError):
        exit_code = EXIT_USAGE
    payload = {"type": type(exc).__name__, "message": str(exc),
               "exit": exit_code}
    witness = getattr(exc, "witness", None)
    if witness is not None:
        payload["witness"] = list(witness)
    return payload


def _emit(report: RunReport, out_path: Optional[str] = None) -> int:
    text = serialize.dumps(report.payload())
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"elapsed: {report.elapsed:.3f}s", file=sys.stderr)
    return report.exit_code


def _load_frames(paths) -> list[Frame]:
    return [serialize.load_frame(p) for p in paths]


def _load_morphism(path) -> PMorphism:
    obj = serialize.load_json(path)
    return serialize.pmorphism_from_json(obj, base_dir=Path(path).parent)


# frame ----------------------------------------------------------------------

def cmd_frame(args, config: Config, report: RunReport) -> None:
    results = []
    if args.frame_cmd == "iso":
        a, b = _load_frames(args.files[:2])
        mapping = frames.frame_iso(a, b)
        report.result = {"items": [{"iso": list(mapping) if mapping else None}]}
        report.passed += 1
        return
    for path in args.files:
        frame = serialize.load_frame(path)
        if args.frame_cmd == "check":
            ok = frame.is_preorder()
            entry = {
                "file": str(path),
                "points": frame.n,
                "edges": len(frame.edges()),
                "valid": True,
                "preorder": ok,
            }
            if ok:
                entry["poset"] = all(
                    bin(frames.cluster(frame, p)).count("1") == 1
                    for p in range(frame.n))
            results.append(entry)
            report.passed += 1
        elif args.frame_cmd == "closure":
            closed = Frame(frame.closure(), labels=frame.labels)
            if args.fmt == "dot":
                results.append({"file": str(path),
                                "dot": frames.frames_to_dot(closed)})
            else:
                results.append({"file": str(path),
                                "frame": serialize.frame_to_json(closed)})
            report.passed += 1
        elif args.frame_cmd == "subframes":
            subs = frames.enumerate_generated_subframes(
                frame, bound=config.subframe_enum_bound)
            results.append({"file": str(path),
                            "subframes": [bit_indices(m) for m in subs]})
            report.passed += 1
        elif args.frame_cmd == "heights":
            hs = frames.frame_heights(frame)
            results.append({"file": str(path), "heights": list(hs)})
            report.passed += 1
        elif args.frame_cmd == "cluster":
            masks = frames.scc_masks(frame)
            results.append({"file": str(path),
                            "clusters": [bit_indices(m) for m in masks]})
            report.passed += 1
    report.result = {"items": results}


# cat (colimits / limits) ------------------------------------------------------

def cmd_cat(args, config: Config, report: RunReport) -> None:
    sub = args.cat_cmd
    if sub == "coproduct":
        cone = colimits.coproduct(_load_frames(args.files))
        report.result = {
            "apex": serialize.frame_to_json(cone.apex),
            "legs": [list(leg.mapping) for leg in cone.legs],
        }
        report.passed += 1
    elif sub in ("coeq", "eq"):
        f = _load_morphism(args.files[0])
        g = _load_morphism(args.files[1])
        if sub == "coeq":
            proj = colimits.coequalizer(f, g)
            report.result = {
                "quotient": serialize.frame_to_json(proj.cod),
                "projection": list(proj.mapping),
            }
        else:
            incl = colimits.equalizer(f, g)
            report.result = {
                "subframe": serialize.frame_to_json(incl.dom),
                "inclusion": list(incl.mapping),
            }
        report.passed += 1
    elif sub == "cokernel":
        f = _load_morphism(args.files[0])
        i1, i2 = colimits.cokernel_pair(f)
        report.result = {
            "apex": serialize.frame_to_json(i1.cod),
            "iota1": list(i1.mapping),
            "iota2": list(i2.mapping),
        }
        report.passed += 1
    elif sub == "is-epi":
        f = _load_morphism(args.files[0])
        report.result = {"epi": colimits.is_epi(f)}
        report.passed += 1
    elif sub == "factor":
        obj = serialize.load_json(args.files[0])
        chain, f = serialize.chain_from_json(
            obj, base_dir=Path(args.files[0]).parent)
        if f is None:
            raise ParseError("factor input needs 'dom' and 'map' fields")
        stage, tilde = colimits.factor_through_stage(f, chain)
        report.result = {"stage": stage, "map": list(tilde.mapping)}
        report.passed += 1
    elif sub == "verify":
        obj = serialize.load_json(args.files[0])
        cone, diagram = serialize.cocone_from_json(
            obj, base_dir=Path(args.files[0]).parent)
        ok = colimits.verify_colimit(
            cone, diagram, test_bound=args.bound,
            input_bound=config.brute_force_point_bound)
        report.result = {"verified": ok}
        if ok:
            report.passed += 1
        else:
            report.failed += 1


# dual -------------------------------------------------------------------------

def cmd_dual(args, config: Config, report: RunReport) -> None:
    sub = args.dual_cmd
    if sub == "powerset":
        frame = serialize.load_frame(args.files[0])
        report.result = {
            "algebra": serialize.algebra_to_json(
                algebras.powerset_algebra(frame))}
        report.passed += 1
    elif sub == "atoms-frame":
        alg = serialize.algebra_from_json(serialize.load_json(args.files[0]))
        report.result = {
            "frame": serialize.frame_to_json(algebras.atoms_frame(alg))}
        report.passed += 1
    elif sub == "eta":
        alg = serialize.algebra_from_json(serialize.load_json(args.files[0]))
        morphism = algebras.eta(alg)
        report.result = {
            "map": list(morphism.mapping),
            "cod": serialize.algebra_to_json(morphism.cod),
            "bijective": morphism.is_bijective(),
        }
        report.passed += 1
    elif sub == "epsilon":
        frame = serialize.load_frame(args.files[0])
        eps = algebras.epsilon(frame)
        report.result = {
            "map": list(eps.mapping),
            "cod": serialize.frame_to_json(eps.cod),
        }
        report.passed += 1
    elif sub == "roundtrip":
        frame = serialize.load_frame(args.files[0])
        eps = algebras.epsilon(frame)
        mapping = frames.frame_iso(frame, eps.cod)
        ok = mapping is not None and eps.is_injective() and eps.is_surjective()
        report.result = {"iso-confirmed": ok}
        if ok:
            report.passed += 1
        else:
            report.failed += 1
    elif sub in ("check-s4", "check-grz"):
        alg = _load_algebra_or_frame(args.files[0])
        if sub == "check-s4":
            report.result = {"s4": algebras.check_s4(alg)}
        else:
            report.result = {"grz": algebras.check_grz(alg)}
        report.passed += 1


def _load_algebra_or_frame(path) -> algebras.ModalAlgebra:
    obj = serialize.load_json(path)
    if "elements" in obj or "dual-of" in obj:
        return serialize.algebra_from_json(obj)
    return algebras.powerset_algebra(serialize.frame_from_json(obj))


# model ------------------------------------------------------------------------

def cmd_model(args, config: Config, report: RunReport) -> None:
    model = serialize.load_model(args.files[0])
    sub = args.model_cmd
    if sub == "irreducible-check":
        verdict = models.check_irreducible(model)
        report.result = {"verdict": _verdict_json(verdict)}
        report.passed += 1
    elif sub == "reduce":
        morphism, reduced = models.reduce(model)
        report.result = {
            "points-before": model.n,
            "points-after": reduced.n,
            "model": serialize.model_to_json(reduced),
            "morphism": list(morphism.f.mapping),
        }
        if args.out_morphism:
            Path(args.out_morphism).write_text(
                serialize.dumps(serialize.model_morphism_to_json(morphism)))
        report.passed += 1
    elif sub == "oracle":
        ok = models.irreducible_oracle(
            model, bound=config.partition_oracle_bound)
        report.result = {"irreducible": ok}
        report.passed += 1


def _verdict_json(verdict) -> dict:
    if isinstance(verdict, Irreducible):
        return {"kind": "irreducible"}
    if isinstance(verdict, ViolatesA):
        return {"kind": "violates-a", "pair": [verdict.p1, verdict.p2],
                "iso": [list(x) for x in verdict.iso]}
    if isinstance(verdict, ViolatesB):
        return {"kind": "violates-b", "pair": [verdict.p1, verdict.p2]}
    raise ValidationError(f"unknown verdict {verdict!r}")


# universal ----------------------------------------------------------------------

def _parse_vars(raw: str) -> VarSet:
    names = tuple(x for x in raw.split(",") if x)
    return VarSet(names)


def cmd_universal(args, config: Config, report: RunReport) -> None:
    sub = args.universal_cmd
    variables = _parse_vars(args.vars)
    if sub in ("build", "stats"):
        stage = universal.build_universal(
            variables, args.height, point_cap=config.stage_point_cap)
        result = {}
        if sub == "build":
            if args.fmt == "dot":
                result["dot"] = serialize.stage_to_dot(stage)
            else:
                result["stage"] = serialize.stage_to_json(stage)
        if sub == "stats" or args.stats:
            result["stats"] = _stats_json(stage)
        report.result = result
        report.passed += 1
    elif sub == "embed":
        model = serialize.load_model(args.files[0])
        stage = universal.build_universal(
            model.vars, args.height, point_cap=config.stage_point_cap)
        emb = universal.embed_irreducible(model, stage)
        report.result = {
            "embedding": list(emb.f.mapping) if emb is not None else None}
        report.passed += 1
    elif sub == "dual-algebra":
        stage = universal.build_universal(
            variables, args.height, point_cap=config.stage_point_cap)
        alg = universal.stage_dual_algebra(stage)
        report.result = {"algebra": serialize.algebra_to_json(alg),
                         "elements": alg.element_count}
        report.passed += 1


def _stats_json(stage) -> dict:
    stats = stage.stats()
    return {
        "stage": stats["stage"],
        "points": stats["points"],
        "clusters": stats["clusters"],
        "points-by-height": {str(k): v for k, v
                             in sorted(stats["points_by_height"].items())},
        "clusters-by-height": {str(k): v for k, v
                               in sorted(stats["clusters_by_height"].items())},
    }


# parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kforge",
        description="Finite Kripke frames, modal algebras, and universal models")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to a key = value config file")
    common.add_argument("--threads", type=int, default=None,
                        help="cap on internal parallelism")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for randomized suites")
    common.add_argument("--out", default=None,
                        help="report destination file, or 'json'/'dot' to "
                             "pick the payload format")
    common.add_argument("--format", dest="fmt", choices=["json", "dot"],
                        default=None)
    sub = parser.add_subparsers(dest="cmd", required=True)

    frame = sub.add_parser("frame", parents=[common], help="frame inspection")
    frame.add_argument("frame_cmd", choices=[
        "check", "closure", "subframes", "heights", "cluster", "iso"])
    frame.add_argument("files", nargs="+")

    for name in ("cat", "colimit", "limit"):
        cat = sub.add_parser(name, parents=[common],
                             help="colimit and limit constructions")
        cat.add_argument("cat_cmd", choices=[
            "coproduct", "coeq", "eq", "cokernel", "is-epi", "factor",
            "verify"])
        cat.add_argument("files", nargs="*")
        cat.add_argument("--bound", type=int, default=3,
                         help="test-frame bound for verify")

    dual = sub.add_parser("dual", parents=[common],
                          help="finite duality operations")
    dual.add_argument("dual_cmd", choices=[
        "powerset", "atoms-frame", "eta", "epsilon", "roundtrip",
        "check-s4", "check-grz"])
    dual.add_argument("files", nargs="+")

    model = sub.add_parser("model", parents=[common],
                           help="S4 model operations")
    model.add_argument("model_cmd", choices=[
        "irreducible-check", "reduce", "oracle"])
    model.add_argument("files", nargs="+")
    model.add_argument("--out-morphism", default=None)

    uni = sub.add_parser("universal", parents=[common],
                         help="universal-model stages")
    uni.add_argument("universal_cmd", choices=[
        "build", "stats", "embed", "dual-algebra"])
    uni.add_argument("files", nargs="*")
    uni.add_argument("--vars", default="",
                     help="comma-separated variable names; empty for none")
    uni.add_argument("--height", type=int, required=True,
                     help="number of stages to build")
    uni.add_argument("--stats", action="store_true")
    return parser


_DISPATCH = {
    "frame": cmd_frame,
    "cat": cmd_cat,
    "colimit": cmd_cat,
    "limit": cmd_cat,
    "dual": cmd_dual,
    "model": cmd_model,
    "universal": cmd_universal,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    out_file = args.out
    if out_file in ("json", "dot"):  # `--out dot` picks the payload format
        args.fmt = out_file
        out_file = None
    report = RunReport(command=argv)
    started = time.monotonic()
    try:
        config = load_config(
            args.config,
            threads=args.threads,
            seed=args.seed,
            output_format=args.fmt,
        )
        if args.fmt is None:
            args.fmt = config.output_format
        if args.cmd in ("colimit", "limit"):
            _check_alias(args)
        _DISPATCH[args.cmd](args, config, report)
    except KforgeError as exc:
        report.error = _error_payload(exc)
    except FileNotFoundError as exc:
        report.error = {"type": "ParseError", "message": str(exc),
                        "exit": EXIT_USAGE}
    report.elapsed = time.monotonic() - started
    return _emit(report, out_file)


def _check_alias(args) -> None:
    allowed = {
        "colimit": {"coproduct", "coeq", "verify", "cokernel", "is-epi",
                    "factor"},
        "limit": {"eq"},
    }[args.cmd]
    if args.cat_cmd not in allowed:
        raise ParseError(
            f"'{args.cmd} {args.cat_cmd}' is not available; use 'cat'")


if __name__ == "__main__":
    sys.exit(main())
