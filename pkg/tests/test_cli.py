import json

import pytest

from pslab import config
from pslab.framework import main


def run(args, tmp_path, name="report.json"):
    out = tmp_path / name
    code = main(args + ["--json", str(out), "--cache-dir", str(tmp_path / "cache")])
    return code, json.loads(out.read_text(encoding="utf-8")) if out.exists() else None


def test_hilbert_series(algebras_dir, tmp_path):
    code, report = run(["hilbert", "--alg", str(algebras_dir / "finite_points.toml"), "--max-deg", "5"], tmp_path)
    assert code == config.EXIT_OK
    assert report["summary"]["series"] == {"0": 1, "1": 3, "2": 5, "3": 4, "4": 2, "5": 2}
    assert report["algebra"] == "finite_points"
    assert report["config"]["degrees"] == [0, 1, 2, 3, 4, 5]
    assert all(entry["status"] == "ok" for entry in report["degrees"])
    assert "seconds" not in report["degrees"][0]


def test_reports_are_deterministic(algebras_dir, tmp_path):
    args = ["hilbert", "--alg", str(algebras_dir / "line_cycle.toml"), "--max-deg", "4"]
    run(args, tmp_path, "first.json")
    run(args, tmp_path, "second.json")
    assert (tmp_path / "first.json").read_bytes() == (tmp_path / "second.json").read_bytes()


def test_parallel_degrees_match_sequential(algebras_dir, tmp_path):
    args = ["hilbert", "--alg", str(algebras_dir / "finite_points.toml"), "--max-deg", "4"]
    _, sequential = run(args, tmp_path, "sequential.json")
    _, parallel = run(args + ["--jobs", "2"], tmp_path, "parallel.json")
    assert sequential["summary"] == parallel["summary"]


def test_tau_with_a_cover(algebras_dir, tmp_path):
    cover = []
    for word in ["x*x", "z*x", "y*y", "x*z"]:
        cover += ["--cover", word]
    code, report = run(["tau", "--alg", str(algebras_dir / "finite_points.toml"), "--min-deg", "2", "--max-deg", "2"]
                       + cover, tmp_path)
    assert code == config.EXIT_OK
    assert report["summary"]["not_surjective_at"] == [2]
    assert report["degrees"][0]["result"]["dim_H1"] == 1


def test_bseries_with_a_disjoint_cover(algebras_dir, tmp_path):
    cover = []
    for word in ["x*x", "z*x", "y*y", "x*z"]:
        cover += ["--cover", word]
    code, report = run(["bseries", "--alg", str(algebras_dir / "finite_points.toml"), "--min-deg", "2",
                        "--max-deg", "2"] + cover, tmp_path)
    assert code == config.EXIT_OK
    assert report["summary"] == {"series": {"2": 6}, "stable": True}
    assert report["degrees"][0]["result"]["method"] == "disjoint-sum"


def test_ud_dimensions(algebras_dir, tmp_path):
    code, report = run(["ud", "--alg", str(algebras_dir / "finite_points.toml"), "--min-deg", "2", "--max-deg", "2"],
                       tmp_path)
    assert code == config.EXIT_OK
    result = report["degrees"][0]["result"]
    assert result["balanced"][:2] == [1, 5]
    assert result["presentation"] == result["balanced"]
    assert result["w_variables"] == 5


def test_word_order_leaves_the_series_unchanged(algebras_dir, tmp_path):
    args = ["hilbert", "--alg", str(algebras_dir / "finite_points.toml"), "--max-deg", "4"]
    _, declared = run(args, tmp_path, "declared.json")
    code, reversed_order = run(args + ["--nc-order", "z<y<x"], tmp_path, "reversed.json")
    assert code == config.EXIT_OK
    assert reversed_order["summary"] == declared["summary"]
    assert reversed_order["config"]["nc_order"] == "z<y<x"


@pytest.mark.slow
def test_tau_kernel_in_a_word_order(algebras_dir, tmp_path):
    cover = []
    for word in ["x^3", "x^2*z", "x*z^2", "z^3", "y^3"]:
        cover += ["--cover", word]
    code, report = run(["tau", "--alg", str(algebras_dir / "line_cycle.toml"), "--min-deg", "3", "--max-deg", "3",
                        "--nc-order", "z<y<x", "--cech-k", "1", "--cech-m", "1"] + cover, tmp_path)
    assert code == config.EXIT_OK
    assert report["degrees"][0]["result"]["kernel"] == ["y*x*z"]


def test_word_order_must_name_every_generator(algebras_dir, tmp_path):
    code, report = run(["hilbert", "--alg", str(algebras_dir / "line_cycle.toml"), "--nc-order", "x<y"], tmp_path)
    assert code == config.EXIT_INPUT_ERROR
    assert report is None


def test_points(algebras_dir, tmp_path):
    code, report = run(["points", "--alg", str(algebras_dir / "finite_points.toml"), "--min-deg", "3", "--max-deg", "3"],
                       tmp_path)
    assert code == config.EXIT_OK
    result = report["degrees"][0]["result"]
    assert sorted(p["point"] for p in result["points"]) == ["(0:1:0)×(0:1:0)×(0:1:0)", "(1:0:-1)×(0:0:1)×(1:0:1)"]
    assert all(p["vanishing_check"] for p in result["points"])
    assert result["jd"]["source"] == "points"


def test_normalize_formula(algebras_dir, tmp_path):
    code, report = run(["normalize-formula", "--config", str(algebras_dir / "line_cycle_normalization_d3.toml")],
                       tmp_path)
    assert code == config.EXIT_OK
    assert report["degrees"][0]["result"]["value"] == 9


@pytest.mark.parametrize("args", [
    ["hilbert", "--max-deg", "3"],
    ["hilbert", "--alg", "x.toml", "--max-deg", "9"],
    ["tau", "--alg", "x.toml", "--min-deg", "3", "--max-deg", "2"],
    ["tau", "--alg", "x.toml", "--min-deg", "2", "--max-deg", "3", "--cover", "x*x"],
    ["normalize-formula"],
])
def test_argument_rules(args, tmp_path):
    code, report = run(args, tmp_path)
    assert code == config.EXIT_INPUT_ERROR
    assert report is None


def test_missing_algebra_file(tmp_path):
    code, _ = run(["hilbert", "--alg", str(tmp_path / "absent.toml")], tmp_path)
    assert code == config.EXIT_INPUT_ERROR


def test_unparsable_algebra(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text('[algebra]\ngenerators = ["x", "y"]\n\n[[relations]]\nexpr = "x y"\n', encoding="utf-8")
    code, _ = run(["hilbert", "--alg", str(bad)], tmp_path)
    assert code == config.EXIT_INPUT_ERROR


def test_cover_of_the_wrong_degree(algebras_dir, tmp_path):
    code, _ = run(["tau", "--alg", str(algebras_dir / "finite_points.toml"), "--min-deg", "2", "--max-deg", "2",
                   "--cover", "x*x*x"], tmp_path)
    assert code == config.EXIT_INPUT_ERROR


def test_failing_degree_is_recorded(algebras_dir, tmp_path):
    code, report = run(["ud", "--alg", str(algebras_dir / "finite_points.toml"), "--min-deg", "3", "--max-deg", "3",
                        "--max-pairs", "1"], tmp_path)
    assert code == config.EXIT_RESOURCE_LIMIT
    (entry,) = report["degrees"]
    assert entry["status"] == "failed"
    assert entry["error"]["type"] == "ResourceLimitError"
    assert report["exit_code"] == config.EXIT_RESOURCE_LIMIT


def test_unknown_command():
    with pytest.raises(SystemExit):
        main(["integrate"])
