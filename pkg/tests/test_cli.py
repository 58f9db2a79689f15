"""End-to-end tests of the command line interface.

Every invocation goes through main(argv) in process; stdout, stderr, and
exit codes are asserted against frozen texts from the documented examples.
Exit codes: 0 decided, 2 undetermined, 1 error.
"""

import json

import pytest

from coarsebundle import bs, graph_of_groups
from coarsebundle.cli import main


@pytest.fixture()
def write_doc(tmp_path):
    def _write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)
    return _write


@pytest.fixture()
def gog_file(write_doc):
    def _gog(name, g):
        return write_doc(name, graph_of_groups.to_json_dict(g))
    return _gog


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# classify and qi-compare


def test_classify_ascending_case(capsys, gog_file):
    path = gog_file("bs12.json", bs(1, 2))
    code, out, err = run(capsys, ["classify", path])
    assert code == 0
    assert out == "Parabolic, endomorphism [[2]]\n"
    assert err == ""


def test_classify_folded_case(capsys, gog_file):
    path = gog_file("bs23.json", bs(2, 3))
    code, out, _ = run(capsys, ["classify", path])
    assert code == 0
    assert out == "Folded\n"


def test_qi_compare_distinguishes_holonomy(capsys, gog_file):
    a = gog_file("bs23.json", bs(2, 3))
    b = gog_file("bs49.json", bs(4, 9))
    code, out, _ = run(capsys, ["qi-compare", a, b])
    assert code == 0
    assert out.startswith("DifferentQiClass:")
    assert "3/2" in out and "9/4" in out


def test_qi_compare_same_input_agrees(capsys, gog_file):
    a = gog_file("a.json", bs(2, 3))
    b = gog_file("b.json", bs(2, 3))
    code, out, _ = run(capsys, ["qi-compare", a, b])
    assert code == 0
    assert out.startswith("SameQiClass")


def test_qi_compare_undetermined_exits_two(capsys, gog_file):
    a = gog_file("bs12.json", bs(1, 2))
    b = gog_file("bs13.json", bs(1, 3))
    code, out, _ = run(capsys, ["qi-compare", a, b])
    assert code == 2
    assert out.startswith("Undetermined")


# ---------------------------------------------------------------------------
# cocycle


def test_cocycle_check_reports_nontrivial(capsys, write_doc):
    path = write_doc("heis.json",
                     {"complex": {"grid": [9, 9]}, "gluing": "heisenberg"})
    code, out, _ = run(capsys, ["cocycle", "check", path])
    assert code == 0
    assert out == "Nontrivial: loop ratios grow across 3 doubling scales\n"


def test_cocycle_check_reports_trivial(capsys, write_doc):
    faces = [{"face": i, "value": [0]} for i in range(16)]
    path = write_doc("zero.json",
                     {"complex": {"grid": [5, 5]},
                      "obstruction": {"dim": 1, "values": faces}})
    code, out, _ = run(capsys, ["cocycle", "check", path])
    assert code == 0
    assert out.startswith("Trivial")


def test_cocycle_primitive_reports_positive_cycle(capsys, write_doc):
    path = write_doc("heis.json",
                     {"complex": {"grid": [5, 4]}, "gluing": "heisenberg"})
    code, out, _ = run(capsys, ["cocycle", "primitive", path, "--C", "1/10"])
    assert code == 0
    assert out.startswith("PositiveCycle: no bounded primitive at C = 1/10")
    assert "witness loop of length" in out


def test_cocycle_primitive_defaults_to_the_scanned_bound(capsys, write_doc):
    path = write_doc("heis.json",
                     {"complex": {"grid": [5, 4]}, "gluing": "heisenberg"})
    code, out, _ = run(capsys, ["cocycle", "primitive", path])
    assert code == 0
    assert out.startswith("primitive found: sup |a + df| =")
    assert "within budget" in out


def test_cocycle_compare_classes_up_to_transform(capsys, write_doc):
    first = [{"face": i, "value": [2]} for i in range(12)]
    second = [{"face": i, "value": [1]} for i in range(12)]
    path = write_doc("pair.json",
                     {"complex": {"grid": [5, 4]},
                      "first": {"dim": 1, "values": first},
                      "second": {"dim": 1, "values": second},
                      "transform": [[2]]})
    code, out, _ = run(capsys, ["cocycle", "compare", path])
    assert code == 0
    assert out == "Equivalent (difference class is Trivial)\n"


# ---------------------------------------------------------------------------
# bundle


@pytest.fixture()
def trivial_spec(write_doc):
    return write_doc("trivial.json",
                     {"base": "line", "fiber_dim": 1,
                      "map": {"type": "translation", "vector": [0]}})


def test_bundle_build_summarizes_the_window(capsys, trivial_spec):
    code, out, _ = run(capsys, ["bundle", "build", trivial_spec,
                                "--base-window", "10",
                                "--fiber-window", "10"])
    assert code == 0
    assert out == "built 441 vertices (61 clipped), degree <= 4\n"


def test_bundle_grow_emits_csv_and_classification(capsys, trivial_spec):
    code, out, _ = run(capsys, ["bundle", "grow", trivial_spec,
                                "--base-window", "14",
                                "--fiber-window", "14", "--rmax", "12"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "r,count,clipped"
    assert len(lines) == 15
    for r in range(13):
        cells = lines[1 + r].split(",")
        assert cells == [str(r), str(2 * r * r + 2 * r + 1), "0"]
    assert lines[-1].startswith("# growth: Polynomial parameter=")


def test_bundle_grow_flags_clipped_radii_and_exits_two(capsys, trivial_spec):
    code, out, _ = run(capsys, ["bundle", "grow", trivial_spec,
                                "--base-window", "3",
                                "--fiber-window", "3", "--rmax", "6"])
    assert code == 2
    lines = out.strip().split("\n")
    assert lines[1] == "0,1,0"
    assert lines[-2] == "6,49,1"
    assert lines[-1] == ("# growth: Undetermined (need at least 8 valid "
                         "radii, have 2)")


def test_bundle_respects_the_vertex_cap_env_var(capsys, monkeypatch,
                                                trivial_spec):
    monkeypatch.setenv("COARSEBUNDLE_VERTEX_CAP", "100")
    code, out, err = run(capsys, ["bundle", "build", trivial_spec,
                                  "--base-window", "10",
                                  "--fiber-window", "10"])
    assert code == 1
    assert err == "error: window volume exceeds the vertex cap (100)\n"
    assert out == ""


def test_bundle_grow_rejects_a_clipped_origin(capsys, trivial_spec):
    code, _, err = run(capsys, ["bundle", "grow", trivial_spec,
                                "--base-window", "3", "--fiber-window", "3",
                                "--origin-base", "3"])
    assert code == 1
    assert err == "error: origin is clipped; enlarge the windows\n"


def test_bundle_doubling_wedge_is_exponential(capsys, write_doc):
    path = write_doc("phi.json", {"base": "line", "fiber_dim": 1,
                                  "map": {"type": "phi_example"}})
    code, out, _ = run(capsys, ["bundle", "grow", path,
                                "--base-window", "1005:1043",
                                "--fiber-window", "8500",
                                "--origin-base", "1024", "--rmax", "18"])
    assert code == 0
    assert out.strip().split("\n")[-1].startswith(
        "# growth: Exponential parameter=")


# ---------------------------------------------------------------------------
# subgroup


@pytest.fixture()
def sanov_file(write_doc):
    return write_doc("sanov.json",
                     {"matrices": [[[1, 2], [0, 1]], [[1, 0], [2, 1]]]})


@pytest.fixture()
def full_file(write_doc):
    return write_doc("full.json",
                     {"matrices": [[[0, -1], [1, 0]], [[1, 1], [0, 1]]]})


def test_subgroup_class_reports_lattice_index(capsys, sanov_file, full_file):
    code, out, _ = run(capsys, ["subgroup", "class", sanov_file])
    assert code == 0
    assert out == "Lattice(6), det Trivial\n"
    code, out, _ = run(capsys, ["subgroup", "class", full_file])
    assert code == 0
    assert out == "Lattice(1), det Trivial\n"


def test_subgroup_equiv_commensurable_lattices(capsys, sanov_file,
                                               full_file):
    code, out, _ = run(capsys, ["subgroup", "equiv", sanov_file, full_file])
    assert code == 0
    assert out.startswith("Equivalent:")


def test_subgroup_free_certificates(capsys, sanov_file, write_doc):
    code, out, _ = run(capsys, ["subgroup", "free", sanov_file])
    assert code == 0
    assert out == "PingPong\n"
    torsion = write_doc("s.json", {"matrices": [[[0, -1], [1, 0]]]})
    code, out, _ = run(capsys, ["subgroup", "free", torsion])
    assert code == 0
    assert out == "RelationFound: word of length 4\n"


def test_subgroup_reduce_prints_the_trace_summary(capsys):
    code, out, _ = run(capsys, ["subgroup", "reduce", "4", "6"])
    assert code == 0
    assert out == "reduce (4, 6) -> (2, 0) in 2 steps; final norm 2\n"


# ---------------------------------------------------------------------------
# JSON reports


def test_json_report_schema_and_determinism(capsys, gog_file):
    path = gog_file("bs23.json", bs(2, 3))
    code, out1, _ = run(capsys, ["classify", path, "--json"])
    assert code == 0
    code, out2, _ = run(capsys, ["classify", path, "--json"])
    assert out1 == out2
    report = json.loads(out1)
    assert sorted(report) == ["command", "evidence", "parameters", "seed",
                              "timing", "verdict"]
    assert report["command"] == ["classify", path, "--json"]
    assert report["timing"] is None
    assert report["verdict"]["kind"] == "Folded"
    assert report["parameters"]["depth"] == 6


def test_json_report_for_subgroup_reduce(capsys):
    code, out, _ = run(capsys, ["subgroup", "reduce", "4", "6", "--json"])
    assert code == 0
    report = json.loads(out)
    assert report["verdict"]["final"] == ["2", "0"]
    assert report["verdict"]["steps"] == 2
    assert report["verdict"]["exact"] is True


# ---------------------------------------------------------------------------
# error handling


def test_missing_file_is_an_error(capsys):
    code, out, err = run(capsys, ["classify", "/nonexistent/g.json"])
    assert code == 1
    assert err.startswith("error:")
    assert out == ""


def test_malformed_json_is_an_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    code, _, err = run(capsys, ["classify", str(bad)])
    assert code == 1
    assert err.startswith("error:")


def test_unknown_subcommand_is_an_error(capsys):
    assert main(["bogus"]) == 1
    capsys.readouterr()


def test_float_matrix_entries_are_rejected(capsys, write_doc):
    first = [{"face": i, "value": [1]} for i in range(1)]
    path = write_doc("pair.json",
                     {"complex": {"grid": [2, 2]},
                      "first": {"dim": 1, "values": first},
                      "second": {"dim": 1, "values": first},
                      "transform": [[0.5]]})
    code, _, err = run(capsys, ["cocycle", "compare", path])
    assert code == 1
    assert "exact rational expected" in err
