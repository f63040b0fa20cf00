import json

import pytest

import horoscope as h
from horoscope.cli import main
from horoscope.specs import graph_from_spec, load_spec, object_from_spec


def write_spec(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


Z_SPEC = {"kind": "cayley", "family": "integers"}
LATTICE_SPEC = {"kind": "cayley", "family": "integer-lattice-2d"}
DIHEDRAL_SPEC = {"kind": "cayley", "family": "infinite-dihedral"}
HALL_SPEC = {"kind": "layered",
             "period": {"layers": [["a", "b"]], "edges": []},
             "wrap": [["a", "a"], ["b", "a"]]}


# ---------------------------------------------------------------- spec loading


def test_graph_from_cayley_spec():
    g = graph_from_spec({"kind": "cayley", "family": "integers-times-cyclic",
                         "modulus": 2, "generators": [[1, 0], [-1, 0], [0, 1]]})
    assert g.basepoint == (0, 0)
    assert g.neighbors((0, 0)) == ((-1, 0), (0, 1), (1, 0))


def test_graph_from_explicit_spec():
    g = graph_from_spec({"kind": "explicit", "vertices": ["p", "q", "r"],
                         "edges": [["p", "q"], ["q", "r"]], "basepoint": "p"})
    assert h.distance(g, "p", "r") == 2


def test_explicit_spec_validation():
    with pytest.raises(h.MalformedSpec):
        graph_from_spec({"kind": "explicit", "vertices": ["p", 1],
                         "edges": [], "basepoint": "p"})
    with pytest.raises(h.MalformedSpec):
        graph_from_spec({"kind": "explicit", "vertices": ["p"],
                         "edges": [["p", "zz"]], "basepoint": "p"})
    with pytest.raises(h.MalformedSpec):
        graph_from_spec({"kind": "wat"})


def test_layered_dispatch():
    lg = object_from_spec(HALL_SPEC)
    assert isinstance(lg, h.LayeredGraph)


def test_load_spec_errors(tmp_path):
    with pytest.raises(h.MalformedSpec):
        load_spec(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(h.MalformedSpec):
        load_spec(str(bad))
    nokind = tmp_path / "nokind.json"
    nokind.write_text("{}")
    with pytest.raises(h.MalformedSpec):
        load_spec(str(nokind))


# ---------------------------------------------------------------- CLI runs


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_cli_growth_linear(tmp_path, capsys):
    path = write_spec(tmp_path, "z.json", Z_SPEC)
    code, out = run_cli(capsys, "growth", path)
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == "horoscope/1"
    assert report["verdict"] == "linear-candidate"
    assert report["k"] == 2
    assert report["sphere_sizes"][1:4] == [2, 2, 2]


def test_cli_growth_superlinear(tmp_path, capsys):
    path = write_spec(tmp_path, "l.json", LATTICE_SPEC)
    code, out = run_cli(capsys, "growth", path)
    assert code == 0
    assert json.loads(out)["verdict"] == "not-linear"


def test_cli_growth_free_group_truncates(tmp_path, capsys):
    path = write_spec(tmp_path, "f.json", {"kind": "cayley", "family": "free-2"})
    code, out = run_cli(capsys, "growth", path, "--ball", "14")
    assert code == 0
    report = json.loads(out)
    assert report["verdict"] == "not-linear"
    assert report["truncated"] is True


def test_cli_horo_counts(tmp_path, capsys):
    path = write_spec(tmp_path, "z.json", Z_SPEC)
    code, out = run_cli(capsys, "horo", path, "--radius", "6")
    assert code == 0
    report = json.loads(out)
    assert report["counts"] == [2] * 6
    assert report["stable_tail"] is True
    assert report["per_radius"][0]["maps"] == [
        [[-1, -1], [0, 0], [1, 1]], [[-1, 1], [0, 0], [1, -1]]]


def test_cli_cover(tmp_path, capsys):
    path = write_spec(tmp_path, "hall.json", HALL_SPEC)
    code, out = run_cli(capsys, "cover", path)
    assert code == 0
    report = json.loads(out)
    assert report["k"] == 2
    assert report["trace"]["kind"] == "split"
    assert report["verification"]["minima"] == [10, 20, 40]
    assert [m >= b for m, b in zip(report["verification"]["minima"],
                                   [8, 18, 38])] == [True, True, True]


def test_cli_cover_truncation(tmp_path, capsys):
    spec = {"kind": "layered",
            "layers": [["a", "b"]] * 15,
            "edges": [[j, n, n] for j in range(14) for n in ("a", "b")]}
    path = write_spec(tmp_path, "spines.json", spec)
    code, out = run_cli(capsys, "cover", path)
    assert code == 0
    report = json.loads(out)
    assert report["approximate"] is True
    assert report["k"] == 2
    assert report["verification"]["depths"] == [10]


def test_cli_orbit(tmp_path, capsys):
    path = write_spec(tmp_path, "d.json", DIHEDRAL_SPEC)
    code, out = run_cli(capsys, "orbit", path)
    assert code == 0
    report = json.loads(out)
    assert report["growth_verdict"] == "linear-candidate"
    assert "warning" not in report
    assert report["witness"]["image_gcd"] == 2
    assert report["orbit"]["index_estimate"] == 2


def test_cli_orbit_warns_on_superlinear(tmp_path, capsys):
    path = write_spec(tmp_path, "l.json", LATTICE_SPEC)
    code, out = run_cli(capsys, "orbit", path, "--radius", "6", "--ball", "2")
    # the pipeline may or may not finish usefully, but when it does finish
    # the report must carry the warning
    if code == 0:
        assert "warning" in json.loads(out)


def test_cli_reroot(tmp_path, capsys):
    path = write_spec(tmp_path, "z.json", Z_SPEC)
    code, out = run_cli(capsys, "reroot", path, "--depth", "10")
    assert code == 0
    report = json.loads(out)
    assert report["all_ok"] is True
    assert report["count"] == 100


def test_cli_horo_explicit_depth(tmp_path, capsys):
    path = write_spec(tmp_path, "z.json", Z_SPEC)
    code, out = run_cli(capsys, "horo", path, "--radius", "3", "--depth", "30")
    assert code == 0
    report = json.loads(out)
    assert [row["depth"] for row in report["per_radius"]] == [30, 30, 30]
    assert report["counts"] == [2, 2, 2]


def test_cli_csv_format(tmp_path, capsys):
    path = write_spec(tmp_path, "z.json", Z_SPEC)
    code, out = run_cli(capsys, "growth", path, "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# schema=horoscope/1"
    assert lines[1] == "r,sphere_size,ball_size"
    assert lines[2] == "0,1,1"


def test_cli_deterministic(tmp_path, capsys):
    path = write_spec(tmp_path, "z.json", Z_SPEC)
    _, first = run_cli(capsys, "orbit", path)
    _, second = run_cli(capsys, "orbit", path)
    assert first == second
    _, third = run_cli(capsys, "reroot", path, "--seed", "5")
    _, fourth = run_cli(capsys, "reroot", path, "--seed", "5")
    assert third == fourth


def test_cli_out_file(tmp_path, capsys):
    path = write_spec(tmp_path, "z.json", Z_SPEC)
    dest = tmp_path / "report.json"
    code, out = run_cli(capsys, "growth", path, "--out", str(dest))
    assert code == 0
    assert out == ""
    assert json.loads(dest.read_text())["k"] == 2


def test_cli_exit_codes(tmp_path, capsys):
    missing = str(tmp_path / "nope.json")
    assert main(["growth", missing]) == 3
    z = write_spec(tmp_path, "z.json", Z_SPEC)
    assert main(["cover", z]) == 3                      # wrong kind
    assert main(["growth", z, "--budget", "-1"]) == 3   # bad flag value
    hall = write_spec(tmp_path, "hall.json", HALL_SPEC)
    assert main(["horo", hall]) == 3                    # layered where graph needed
    free2 = write_spec(tmp_path, "f.json", {"kind": "cayley", "family": "free-2"})
    assert main(["horo", free2, "--radius", "8", "--budget", "2000"]) == 4
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 2
