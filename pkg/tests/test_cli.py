"""CLI dispatch, exit codes, determinism, and file round trips."""

import json

import pytest

from kforge.cli import main
from kforge.serialize import dumps

CHAIN3 = {"points": ["a", "b", "c"], "rel": [[0, 1], [1, 2]]}
RCHAIN2 = {"points": ["0", "1"], "rel": [[0, 0], [0, 1], [1, 1]]}
CLUSTER2 = {"points": ["0", "1"], "rel": [[0, 0], [0, 1], [1, 0], [1, 1]]}
EMPTY = {"points": [], "rel": []}
ONE = {"points": ["0"], "rel": [[0, 0]]}


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(dumps(obj))
        return str(path)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else out


class TestFrameCommands:
    def test_check_chain(self, files, capsys):
        path = files("chain3.json", CHAIN3)
        code, report = run(capsys, "frame", "check", path)
        assert code == 0
        item = report["result"]["items"][0]
        assert item["valid"] and not item["preorder"]

    def test_closure_dot_six_edges(self, files, capsys):
        path = files("chain3.json", CHAIN3)
        code, report = run(capsys, "frame", "closure", path, "--out", "dot")
        assert code == 0
        dot = report["result"]["items"][0]["dot"]
        assert dot.count("->") == 6

    def test_iso_none(self, files, capsys):
        a = files("a.json", CHAIN3)
        b = files("b.json", EMPTY)
        code, report = run(capsys, "frame", "iso", a, b)
        assert code == 0
        assert report["result"]["items"][0]["iso"] is None

    def test_iso_found(self, files, capsys):
        a = files("a.json", RCHAIN2)
        b = files("b.json", RCHAIN2)
        code, report = run(capsys, "frame", "iso", a, b)
        assert report["result"]["items"][0]["iso"] == [0, 1]

    def test_heights_not_preorder_exit1(self, files, capsys):
        path = files("chain3.json", CHAIN3)
        code, report = run(capsys, "frame", "heights", path)
        assert code == 1
        assert report["error"]["type"] == "NotPreorder"
        assert "witness" in report["error"]

    def test_parse_error_exit2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{nope")
        code, report = run(capsys, "frame", "check", str(bad))
        assert code == 2

    def test_subframes_bound_exit3(self, files, capsys, tmp_path):
        big = {"points": [str(i) for i in range(6)], "rel": []}
        path = files("big.json", big)
        cfg = tmp_path / "kforge.cfg"
        cfg.write_text("subframe_enum_bound = 3\n")
        code, report = run(capsys, "frame", "subframes", path,
                           "--config", str(cfg))
        assert code == 3
        assert report["error"]["type"] == "BoundExceeded"


class TestCatCommands:
    def test_coeq(self, files, capsys):
        dom = ONE
        cod = {"points": ["0", "1"], "rel": [[0, 0], [1, 1]]}
        f = files("f.json", {"dom": dom, "cod": cod, "map": [0]})
        g = files("g.json", {"dom": dom, "cod": cod, "map": [1]})
        code, report = run(capsys, "cat", "coeq", f, g)
        assert code == 0
        assert len(report["result"]["quotient"]["points"]) == 1
        assert report["result"]["projection"] == [0, 0]

    def test_eq_via_limit_alias(self, files, capsys):
        f = files("f.json", {"dom": RCHAIN2, "cod": RCHAIN2, "map": [0, 1]})
        g = files("g.json", {"dom": RCHAIN2, "cod": RCHAIN2, "map": [1, 1]})
        code, report = run(capsys, "limit", "eq", f, g)
        assert code == 0
        assert report["result"]["inclusion"] == [1]

    def test_colimit_alias_rejects_eq(self, files, capsys):
        f = files("f.json", {"dom": ONE, "cod": ONE, "map": [0]})
        code, report = run(capsys, "colimit", "eq", f, f)
        assert code == 2

    def test_coproduct(self, files, capsys):
        a = files("a.json", ONE)
        b = files("b.json", ONE)
        code, report = run(capsys, "cat", "coproduct", a, b)
        assert report["result"]["legs"] == [[0], [1]]

    def test_is_epi(self, files, capsys):
        f = files("f.json", {"dom": ONE, "cod": RCHAIN2, "map": [1]})
        code, report = run(capsys, "cat", "is-epi", f)
        assert code == 0
        assert report["result"]["epi"] is False

    def test_verify_pass(self, files, capsys):
        cone = files("cone.json", {
            "diagram": {"objects": [ONE, ONE]},
            "apex": {"points": ["0", "1"], "rel": [[0, 0], [1, 1]]},
            "legs": [[0], [1]],
        })
        code, report = run(capsys, "cat", "verify", cone, "--bound", "3")
        assert code == 0
        assert report["result"]["verified"] is True

    def test_verify_fail_exit1(self, files, capsys):
        cone = files("cone.json", {
            "diagram": {"objects": [ONE, ONE]},
            "apex": ONE,
            "legs": [[0], [0]],
        })
        code, report = run(capsys, "cat", "verify", cone)
        assert code == 1
        assert report["result"]["verified"] is False

    def test_factor(self, files, capsys):
        chain = files("chain.json", {
            "stages": [CLUSTER2, ONE],
            "links": [[0, 0]],
            "dom": ONE,
            "map": [0],
        })
        code, report = run(capsys, "cat", "factor", chain)
        assert code == 0
        assert report["result"]["stage"] in (0, 1)

    def test_not_parallel_exit1(self, files, capsys):
        f = files("f.json", {"dom": ONE, "cod": ONE, "map": [0]})
        g = files("g.json", {"dom": RCHAIN2, "cod": RCHAIN2, "map": [0, 1]})
        code, report = run(capsys, "cat", "coeq", f, g)
        assert code == 1
        assert report["error"]["type"] == "NotParallel"


class TestDualCommands:
    def test_roundtrip(self, files, capsys):
        path = files("f.json", CHAIN3)
        code, report = run(capsys, "dual", "roundtrip", path)
        assert code == 0 and report["result"]["iso-confirmed"]

    def test_check_grz_cluster_false(self, files, capsys):
        path = files("c.json", CLUSTER2)
        code, report = run(capsys, "dual", "check-grz", path)
        assert code == 0 and report["result"]["grz"] is False

    def test_check_s4_empty_true(self, files, capsys):
        path = files("e.json", EMPTY)
        code, report = run(capsys, "dual", "check-s4", path)
        assert report["result"]["s4"] is True

    def test_check_grz_not_s4_exit1(self, files, capsys):
        path = files("e.json", {"points": ["a", "b"], "rel": [[0, 1]]})
        code, report = run(capsys, "dual", "check-grz", path)
        assert code == 1
        assert report["error"]["type"] == "NotS4"

    def test_powerset_then_atoms_frame(self, files, capsys, tmp_path):
        path = files("f.json", RCHAIN2)
        code, report = run(capsys, "dual", "powerset", path)
        alg_path = tmp_path / "alg.json"
        alg_path.write_text(dumps(report["result"]["algebra"]))
        code, report = run(capsys, "dual", "atoms-frame", str(alg_path))
        assert code == 0
        assert sorted(map(tuple, report["result"]["frame"]["rel"])) == \
            [(0, 0), (0, 1), (1, 1)]


class TestModelCommands:
    def test_irreducible_check(self, files, capsys):
        model = dict(CLUSTER2, vars=["x"], val=[["x"], ["x"]])
        path = files("m.json", model)
        code, report = run(capsys, "model", "irreducible-check", path)
        assert report["result"]["verdict"]["kind"] == "violates-a"

    def test_reduce_writes_morphism(self, files, capsys, tmp_path):
        model = dict(CLUSTER2, vars=["x"], val=[["x"], ["x"]])
        path = files("m.json", model)
        out = tmp_path / "surjection.json"
        code, report = run(capsys, "model", "reduce", path,
                           "--out-morphism", str(out))
        assert code == 0
        assert report["result"]["points-after"] == 1
        saved = json.loads(out.read_text())
        assert saved["map"] == [0, 0]

    def test_oracle(self, files, capsys):
        model = dict(RCHAIN2, vars=["x"], val=[["x"], []])
        path = files("m.json", model)
        code, report = run(capsys, "model", "oracle", path)
        assert report["result"]["irreducible"] is True


class TestUniversalCommands:
    def test_build_stats(self, capsys):
        code, report = run(capsys, "universal", "build", "--vars", "x",
                           "--height", "1", "--stats")
        assert code == 0
        stats = report["result"]["stats"]
        assert stats["points"] == 4 and stats["clusters"] == 3

    def test_build_no_vars_stabilizes(self, capsys):
        code, report = run(capsys, "universal", "stats", "--vars", "",
                           "--height", "3")
        assert report["result"]["stats"]["points"] == 1

    def test_stage_explosion_exit3(self, capsys):
        code, report = run(capsys, "universal", "stats", "--vars", "x",
                           "--height", "3")
        assert code == 3
        assert report["error"]["type"] == "StageExplosion"

    def test_embed(self, files, capsys):
        model = dict(ONE, vars=["x"], val=[[]])
        path = files("m.json", model)
        code, report = run(capsys, "universal", "embed", path,
                           "--height", "1")
        assert code == 0
        assert report["result"]["embedding"] == [0]

    def test_dual_algebra(self, capsys):
        code, report = run(capsys, "universal", "dual-algebra", "--vars", "x",
                           "--height", "1")
        assert report["result"]["elements"] == 16

    def test_build_dot(self, capsys):
        code, report = run(capsys, "universal", "build", "--vars", "x",
                           "--height", "1", "--format", "dot")
        assert "digraph" in report["result"]["dot"]


class TestDeterminismAndRoundTrip:
    def test_byte_identical_output(self, files, capsys):
        path = files("c.json", CLUSTER2)
        code, first = main(["frame", "check", path]), capsys.readouterr().out
        code, second = main(["frame", "check", path]), capsys.readouterr().out
        assert first == second

    def test_emitted_frame_reparses(self, files, capsys, tmp_path):
        path = files("chain.json", CHAIN3)
        code, report = run(capsys, "frame", "closure", path)
        emitted = report["result"]["items"][0]["frame"]
        again = tmp_path / "closed.json"
        again.write_text(dumps(emitted))
        code, report = run(capsys, "frame", "check", str(again))
        assert code == 0
        assert report["result"]["items"][0]["preorder"] is True

    def test_report_to_file(self, files, tmp_path, capsys):
        path = files("c.json", CLUSTER2)
        out = tmp_path / "report.json"
        code = main(["frame", "check", path, "--out", str(out)])
        capsys.readouterr()
        assert code == 0
        assert json.loads(out.read_text())["checks"]["passed"] == 1

    def test_seed_flag_accepted(self, files, capsys):
        path = files("c.json", CLUSTER2)
        code, _ = run(capsys, "frame", "check", path, "--seed", "7",
                      "--threads", "2")
        assert code == 0
