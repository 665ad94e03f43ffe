import csv
import json
from pathlib import Path

from mclift.cli import COMPARE_COLUMNS, METRICS_COLUMNS, main
from mclift.io import read_dataset

FAST_FSE = ["--fse-tile", "8", "--fse-border", "8", "--fse-iters", "60"]


def run(*argv) -> int:
    return main([str(a) for a in argv])


def gen(tmp_path, kind, name="data", **kwargs) -> Path:
    sidecar = tmp_path / f"{name}.json"
    argv = ["gen-fixture", "--kind", kind, "--output", sidecar]
    for key, value in kwargs.items():
        argv += [f"--{key.replace('_', '-')}", str(value)]
    assert run(*argv) == 0
    return sidecar


def read_rows(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_gen_fixture_is_deterministic(tmp_path):
    a = gen(tmp_path, "translate", name="a", seed=9)
    b = gen(tmp_path, "translate", name="b", seed=9)
    assert (tmp_path / "a.raw").read_bytes() == (tmp_path / "b.raw").read_bytes()
    assert json.loads(a.read_text())["width"] == 128


def test_gen_fixture_constant_all_equal(tmp_path):
    sidecar = gen(tmp_path, "constant", width=32, height=32, frames=2)
    seq = read_dataset(sidecar)
    assert len(set(seq[0].samples.ravel().tolist())) == 1
    assert seq[0] == seq[1]


def test_gen_fixture_unknown_kind_is_usage_error(tmp_path):
    assert run("gen-fixture", "--kind", "wobble", "--output", tmp_path / "x.json") == 1


def test_missing_subcommand_is_usage_error():
    assert run() == 1


def test_analyze_then_synthesize_round_trip(tmp_path):
    sidecar = gen(tmp_path, "flash_disocclusion", width=96, height=96, frames=5, seed=4)
    container = tmp_path / "bands.mclf"
    assert run(
        "analyze", "--input", sidecar, "--output", container,
        "--mode", "block+fse", *FAST_FSE,
    ) == 0
    recon = tmp_path / "recon.raw"
    assert run("synthesize", "--input", container, "--output", recon, *FAST_FSE) == 0
    assert recon.read_bytes() == (tmp_path / "data.raw").read_bytes()
    meta = json.loads(Path(str(recon) + ".json").read_text())
    assert meta["frames"] == 5


def test_synthesize_hash_verification(tmp_path, capsys):
    sidecar = gen(tmp_path, "translate", width=64, height=48, frames=2)
    container = tmp_path / "bands.mclf"
    assert run("analyze", "--input", sidecar, "--output", container, "--mode", "block") == 0
    recon = tmp_path / "recon.raw"
    assert run("synthesize", "--input", container, "--output", recon) == 0
    digest = capsys.readouterr().out.strip().splitlines()[-1].split()[1]
    assert run(
        "synthesize", "--input", container, "--output", recon,
        "--expect-sha256", digest,
    ) == 0
    assert run(
        "synthesize", "--input", container, "--output", recon,
        "--expect-sha256", "0" * 64,
    ) == 3


def test_analyze_missing_input_is_data_error(tmp_path):
    assert run(
        "analyze", "--input", tmp_path / "nope.json", "--output", tmp_path / "o.mclf"
    ) == 2


def test_synthesize_corrupt_container_is_data_error(tmp_path):
    bad = tmp_path / "bad.mclf"
    bad.write_bytes(b"NOPE" + bytes(16))
    assert run("synthesize", "--input", bad, "--output", tmp_path / "r.raw") == 2


def test_analyze_writes_metrics_csv_with_infinite_psnr(tmp_path):
    sidecar = gen(tmp_path, "constant", width=48, height=48, frames=2)
    container = tmp_path / "c.mclf"
    assert run("analyze", "--input", sidecar, "--output", container, *FAST_FSE) == 0
    rows = read_rows(str(container) + ".metrics.csv")
    assert list(rows[0].keys()) == list(METRICS_COLUMNS)
    assert rows[0]["mean_lowpass_psnr_db"] == "inf"
    assert rows[0]["mode"] == "block+fse"


def test_threads_do_not_change_container(tmp_path):
    sidecar = gen(tmp_path, "flash_disocclusion", frames=6, seed=11)
    out1 = tmp_path / "t1.mclf"
    out3 = tmp_path / "t3.mclf"
    common = ["--input", sidecar, "--mode", "block+fse", *FAST_FSE]
    assert run("analyze", *common, "--output", out1, "--threads", "1") == 0
    assert run("analyze", *common, "--output", out3, "--threads", "3") == 0
    assert out1.read_bytes() == out3.read_bytes()


def test_compare_header_and_direction(tmp_path):
    sidecar = gen(tmp_path, "flash_disocclusion", seed=2)
    out = tmp_path / "cmp.csv"
    assert run(
        "compare", "--input", sidecar, "--output", out,
        "--modes", "block,block+fse", "--fse-iters", "300",
    ) == 0
    header = out.read_text().splitlines()[0]
    assert header == "mode,total_bytes,lowpass_bytes,highpass_bytes,motion_bytes,mean_lp_psnr_db,boundary_step"
    rows = {r["mode"]: r for r in read_rows(out)}
    assert set(rows) == {"block", "block+fse"}
    assert float(rows["block+fse"]["boundary_step"]) < float(rows["block"]["boundary_step"])
    assert int(rows["block+fse"]["lowpass_bytes"]) <= int(rows["block"]["lowpass_bytes"])
    assert list(read_rows(out)[0].keys()) == list(COMPARE_COLUMNS)


def test_compare_identical_frames_all_modes_equal(tmp_path):
    sidecar = gen(tmp_path, "constant", width=48, height=48, frames=4)
    out = tmp_path / "cmp.csv"
    assert run(
        "compare", "--input", sidecar, "--output", out,
        "--modes", "none,block,block+fse", *FAST_FSE,
    ) == 0
    rows = read_rows(out)
    assert len({r["total_bytes"] for r in rows}) == 1
    assert len({r["lowpass_bytes"] for r in rows}) == 1


def test_compare_requires_two_modes(tmp_path):
    sidecar = gen(tmp_path, "constant", width=32, height=32, frames=2)
    assert run(
        "compare", "--input", sidecar, "--output", tmp_path / "c.csv",
        "--modes", "block",
    ) == 1
    assert run(
        "compare", "--input", sidecar, "--output", tmp_path / "c.csv",
        "--modes", "block,warp",
    ) == 1


def test_dump_diagnostics_writes_images(tmp_path):
    sidecar = gen(tmp_path, "flash_disocclusion", seed=5, frames=2)
    container = tmp_path / "c.mclf"
    diag = tmp_path / "diag"
    assert run(
        "analyze", "--input", sidecar, "--output", container,
        "--dump-diagnostics", diag, "--fse-iters", "60",
    ) == 0
    names = {p.name for p in diag.iterdir()}
    assert {"conn_000.ppm", "update_000.ppm", "update_filled_000.ppm",
            "lowpass_000.pgm", "highpass_000.pgm", "fse_trace.csv"} <= names
    trace = read_rows(diag / "fse_trace.csv")
    assert {"pair", "tile_y", "tile_x", "iteration", "energy"} == set(trace[0].keys())
