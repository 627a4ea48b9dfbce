import numpy as np
import pytest

from plc import WorkspaceIndex, parse_robot_description
from plc.cli import main

SMALL_ROBOT = "segment_count: 2\n"


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("PLC_CACHE_DIR", str(tmp_path / "cache"))
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def robot_file(tmp_path, text=SMALL_ROBOT):
    path = tmp_path / "robot.yaml"
    path.write_text(text)
    return str(path)


def test_fk_default_robot(capsys):
    code, out, _ = run(capsys, "fk", "--robot", "default", "--config", "0,0,0,0,0")
    assert code == 0
    header, row = out.strip().splitlines()
    values = dict(zip(header.split(","), row.split(",")))
    assert float(values["y_mm"]) == 0.0
    assert float(values["z_mm"]) == pytest.approx(28.6478898, abs=1e-6)
    assert values["tip_x_mm"] == values["x_mm"]  # zero tool offset


def test_fk_rejects_wrong_length_config(capsys):
    code, _, err = run(capsys, "fk", "--robot", "default", "--config", "0,0")
    assert code == 2
    assert "joints" in err


def test_ik_requires_index(capsys):
    code, _, err = run(capsys, "ik", "--target", "1,2,3")
    assert code == 1
    assert "--index" in err


def test_unknown_subcommand(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 1
    assert err


def test_version(capsys):
    code, out, _ = run(capsys, "--version")
    assert code == 0


def test_missing_robot_file(capsys, tmp_path):
    code, _, err = run(capsys, "fk", "--robot", str(tmp_path / "nope.yaml"), "--config", "0")
    assert code == 3
    assert "i/o error" in err


def test_budget_exceeded(capsys, tmp_path):
    path = robot_file(tmp_path, "segment_count: 9\n")
    code, _, err = run(capsys, "workspace", "build", "--robot", path)
    assert code == 2
    assert "1000000000" in err


def test_workspace_build_and_export(capsys, tmp_path):
    robot = robot_file(tmp_path)
    index_path = tmp_path / "ws.plcw"
    code, _, err = run(capsys, "workspace", "build", "--robot", robot, "--out", str(index_path))
    assert code == 0 and index_path.exists()
    assert "100 configurations" in err

    desc = parse_robot_description(SMALL_ROBOT)
    index = WorkspaceIndex.load(index_path, desc)

    code, out, _ = run(
        capsys, "workspace", "export", "--robot", robot, "--index", str(index_path),
        "--format", "csv",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "x,y,z,bucket_size"
    assert len(lines) == index.point_count + 1
    assert sum(int(line.rsplit(",", 1)[1]) for line in lines[1:]) == 100

    code, ply, _ = run(
        capsys, "workspace", "export", "--robot", robot, "--index", str(index_path),
        "--format", "ply",
    )
    assert code == 0
    ply_lines = ply.splitlines()
    assert ply_lines[0] == "ply" and ply_lines[1] == "format ascii 1.0"
    assert f"element vertex {index.point_count}" in ply_lines
    assert len(ply_lines) == 7 + index.point_count

    # byte-identical on a second run
    code, ply2, _ = run(
        capsys, "workspace", "export", "--robot", robot, "--index", str(index_path),
        "--format", "ply",
    )
    assert ply2 == ply


def test_workspace_omnivariance_uses_cache(capsys, tmp_path):
    robot = robot_file(tmp_path)
    code, _, _ = run(capsys, "workspace", "build", "--robot", robot)
    assert code == 0
    code, out, _ = run(capsys, "workspace", "omnivariance", "--robot", robot)
    assert code == 0
    assert float(out.strip()) > 0.0


def test_workspace_local_omnivariance(capsys, tmp_path):
    robot = robot_file(tmp_path)
    code, out, _ = run(capsys, "workspace", "omnivariance", "--robot", robot, "--local", "8")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "x,y,z,local_omnivariance"
    assert len(lines) > 1


def test_workspace_accuracy(capsys, tmp_path):
    robot = robot_file(tmp_path)
    queries = tmp_path / "queries.csv"
    queries.write_text("x,y,z\n0,0,0\n10,10,40\n")
    code, out, _ = run(capsys, "workspace", "accuracy", "--robot", robot, "--queries", str(queries))
    assert code == 0
    assert float(out.strip()) > 0.0


def test_ik_end_to_end(capsys, tmp_path):
    robot = robot_file(tmp_path)
    index_path = tmp_path / "ws.plcw"
    run(capsys, "workspace", "build", "--robot", robot, "--out", str(index_path))
    desc = parse_robot_description(SMALL_ROBOT)
    index = WorkspaceIndex.load(index_path, desc)
    target = index.points[7]
    target_flag = "--target=" + ",".join(repr(float(v)) for v in target)
    code, out, _ = run(
        capsys, "ik", "--robot", robot, "--index", str(index_path), target_flag,
    )
    assert code == 0
    header, row = out.strip().splitlines()
    fields = dict(zip(header.split(","), row.split(",")))
    assert float(fields["error_mm"]) < 1e-6
    assert int(fields["candidate_count"]) >= 1
    assert len(fields["config"].split()) == 2


def test_ik_index_robot_mismatch(capsys, tmp_path):
    robot = robot_file(tmp_path)
    index_path = tmp_path / "ws.plcw"
    run(capsys, "workspace", "build", "--robot", robot, "--out", str(index_path))
    other = tmp_path / "other.yaml"
    other.write_text("segment_count: 2\ncurve_length: 31\n")
    code, _, err = run(
        capsys, "ik", "--robot", str(other), "--index", str(index_path), "--target", "1,2,3"
    )
    assert code == 2
    assert "different robot" in err


def test_plan_and_verify(capsys):
    code, out, _ = run(
        capsys, "plan", "--robot", "default", "--start", "0,0,0,0,0",
        "--goal", "0,9,0,2,0", "--verify",
    )
    assert code == 0
    assert out.splitlines() == [
        "unlock 2",
        "rotate -36",
        "lock 2",
        "unlock 4",
        "rotate +72",
        "lock 4",
        "final 0,9,0,2,0",
    ]
    code, out, _ = run(
        capsys, "plan", "--robot", "default", "--start", "1,1,1,1,1", "--goal", "1,1,1,1,1"
    )
    assert code == 0
    assert out == ""


def test_stiffness_firm_direction(capsys):
    code, out, _ = run(
        capsys, "stiffness", "firm", "--robot", "default", "--config", "0,0,0,0,0",
        "--direction", "0,0,1",
    )
    assert code == 0
    header, row = out.strip().splitlines()
    fields = dict(zip(header.split(","), row.split(",")))
    stiffness = float(fields["stiffness_n_per_mm"])
    assert stiffness > 0.0
    assert float(fields["compliance_mm_per_n"]) == pytest.approx(1.0 / stiffness, rel=1e-6)


def test_stiffness_firm_sphere(capsys):
    code, out, _ = run(
        capsys, "stiffness", "firm", "--robot", "default", "--config", "0,0,0,0,0",
        "--sphere", "12",
    )
    assert code == 0
    assert len(out.strip().splitlines()) == 13


def test_stiffness_curve(capsys):
    code, out, _ = run(
        capsys, "stiffness", "curve", "--robot", "default", "--config", "0,0,0,0,0",
        "--tension", "50", "--direction", "1,0,0",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "force_n,deflection_mm"
    forces = [float(line.split(",")[0]) for line in lines[1:]]
    deflections = [float(line.split(",")[1]) for line in lines[1:]]
    assert 30.0 in forces  # breakpoint for 50 N tension is sampled exactly
    assert all(b >= a for a, b in zip(deflections, deflections[1:]))


def test_stiffness_twist(capsys):
    code, spine_out, _ = run(
        capsys, "stiffness", "twist", "--robot", "default", "--spine", "--torque", "1000"
    )
    assert code == 0
    assert float(spine_out.strip()) == pytest.approx(1.75843825, abs=1e-6)
    code, skin_out, _ = run(
        capsys, "stiffness", "twist", "--robot", "default", "--skin", "--torque", "1000"
    )
    assert code == 0
    assert float(skin_out.strip()) > 0.0


def test_normalize_builtin_and_atomic_out(capsys, tmp_path):
    out_path = tmp_path / "table.csv"
    code, _, _ = run(capsys, "normalize", "--designs", "builtin", "--out", str(out_path))
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "name,k_max,k_max_normalized,k_min,k_min_normalized,ratio"
    assert lines[1].startswith("PLC (ours),8.07,NA,0.85,NA,9.494")
    assert len(lines) == 20

    bad = tmp_path / "bad.csv"
    bad.write_text("name,k_max,k_min\nx,1,2\n")  # k_min > k_max
    missing_out = tmp_path / "never.csv"
    code, _, err = run(capsys, "normalize", "--designs", str(bad), "--out", str(missing_out))
    assert code == 2
    assert not missing_out.exists()  # domain errors leave no partial output


def test_normalize_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "normalize", "--designs", str(tmp_path / "nope.csv"))
    assert code == 3
