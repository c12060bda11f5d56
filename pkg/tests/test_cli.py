import csv
import io
import json

import pytest

from surfsep.cli import CSV_COLUMNS, main, make_spec, parse_size, run_experiment, InputError
from surfsep.embedded import read_rot, to_rot
from surfsep.generators import InstanceSpec, gen_genus_sum


@pytest.fixture
def torus_file(tmp_path):
    path = tmp_path / "t.rot"
    assert main(["gen", "--family", "torus-grid", "--size", "8", "-o", str(path)]) == 0
    return path


def test_gen_round_trips(torus_file):
    G = read_rot(torus_file)
    assert (G.n, G.m, G.genus) == (64, 128, 1)
    assert to_rot(G) == torus_file.read_text().rstrip("\n") or to_rot(G) == torus_file.read_text()


def test_separate_then_verify(tmp_path, torus_file):
    out = tmp_path / "r.json"
    assert main(["separate", "-i", str(torus_file), "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["separator"] and doc["alpha"] == pytest.approx(2 / 3)
    assert main(["verify", "-i", str(torus_file), "-s", str(out), "-o", str(tmp_path / "v.json")]) == 0
    assert json.loads((tmp_path / "v.json").read_text())["passed"] is True


def test_verify_failure_exit_code(tmp_path, torus_file):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1 2\n")
    assert main(["verify", "-i", str(torus_file), "-s", str(bad), "-o", str(tmp_path / "v.json")]) == 1


def test_input_errors_exit_2(tmp_path, torus_file):
    assert main(["separate", "-i", str(tmp_path / "missing.rot")]) == 2
    garbage = tmp_path / "g.rot"
    garbage.write_text("this is not a rotation file\n")
    assert main(["separate", "-i", str(garbage)]) == 2
    assert main(["separate", "-i", str(torus_file), "--k", "2"]) == 2
    assert main(["separate", "-i", str(torus_file), "--alpha", "1.5"]) == 2
    assert main(["gen", "--family", "random-triangulation", "--size", "30"]) == 2
    assert main(["gen", "--family", "torus-grid", "--size", "2"]) == 2
    assert main(["bogus"]) == 2


def test_separate_with_fixed_k_and_frame_dump(tmp_path):
    path = tmp_path / "t16.rot"
    main(["gen", "--family", "torus-grid", "--size", "16", "-o", str(path)])
    dump = tmp_path / "frame.json"
    out = tmp_path / "r.json"
    assert main(["separate", "-i", str(path), "--k", "16", "--dump-frame", str(dump), "-o", str(out)]) == 0
    frames = json.loads(dump.read_text())
    assert len(frames) == 1 and frames[0]["frame_cycles"]
    assert frames[0]["report"]["two_connected"] is True


def test_trim_flag_shrinks(tmp_path):
    path = tmp_path / "t16.rot"
    main(["gen", "--family", "torus-grid", "--size", "16", "-o", str(path)])
    plain, trimmed = tmp_path / "a.json", tmp_path / "b.json"
    main(["separate", "-i", str(path), "-o", str(plain)])
    main(["separate", "-i", str(path), "--trim", "-o", str(trimmed)])
    a, b = json.loads(plain.read_text()), json.loads(trimmed.read_text())
    assert set(b["separator"]) <= set(a["separator"])
    assert b["constants"]["untrimmed_size"] == len(a["separator"])


def test_empty_experiment_is_header_only():
    text = run_experiment([])
    assert text == ",".join(CSV_COLUMNS) + "\n"


def test_experiment_rows_and_verify(tmp_path):
    specs = [InstanceSpec("torus-grid", (m, m)) for m in (8, 16, 32)]
    text = run_experiment(specs, verify=True)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [int(r["n"]) for r in rows] == [64, 256, 1024]
    assert all(float(r["balance"]) <= 2 / 3 for r in rows)
    assert all(r["wall_time"] for r in rows)


def test_experiment_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["experiment", "--family", "random-triangulation", "--sizes", "40,80", "--seed", "9", "--repeat", "2", "--no-time"]
    assert main(args + ["-o", str(a)]) == 0
    assert main(args + ["-o", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 5


def test_size_parsing():
    assert parse_size("16", "torus-grid") == (16, 16)
    assert parse_size("8x12", "planar-grid") == (8, 12)
    assert parse_size("2x8", "genus-sum") == (2, 8)
    with pytest.raises(InputError):
        parse_size("abc", "torus-grid")
    with pytest.raises(InputError):
        make_spec("klein-bottle", "4", None)


def test_genus_sum_generation_is_byte_identical():
    assert to_rot(gen_genus_sum(3)) == to_rot(gen_genus_sum(3))
    assert InstanceSpec("random-triangulation", (50,), 4).build() == InstanceSpec("random-triangulation", (50,), 4).build()
