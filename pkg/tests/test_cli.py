import json
import os

from chensieve.cli import main, to_json
from chensieve.primes import build_prime_table, save_cache


def run(tmp_path, *argv):
    out = tmp_path / "out.txt"
    code = main(list(argv) + ["-o", str(out)])
    return code, out.read_text() if out.exists() else ""


def test_json_writer_17_digits():
    text = to_json({"x": 1.0 / 3.0, "flag": True, "none": None, "list": [1, 2.5]})
    assert "0.33333333333333331" in text
    assert '"flag": true' in text
    payload = json.loads(text)
    assert payload["x"] == 1.0 / 3.0


def test_constants_json(tmp_path):
    code, text = run(
        tmp_path, "constants", "--table-limit", "200000", "--output-format", "json"
    )
    assert code == 0
    payload = json.loads(text)
    assert payload["schema"] == "chen-report/1"
    entries = {e["name"]: e for e in payload["entries"]}
    assert entries["c0"]["pass"] is True
    assert entries["c1"]["pass"] is True
    assert entries["c2"]["pass"] is True
    names = [e["name"] for e in payload["entries"]]
    assert names == sorted(names)


def test_constants_deterministic(tmp_path):
    _, first = run(tmp_path, "constants", "--table-limit", "200000")
    _, second = run(tmp_path, "constants", "--table-limit", "200000")
    assert first == second


def test_bounds_final_headline(tmp_path):
    code, text = run(
        tmp_path,
        "bounds",
        "--theorem",
        "final",
        "--loglogN",
        "36",
        "--epsilon",
        "9.4e-14",
    )
    assert code == 0
    payload = json.loads(text)
    (report,) = payload["reports"]
    assert report["theorem_id"] == "FINAL"
    assert report["total"]["value"] > 0.007
    assert report["annotations"]["clears_threshold"] is True


def test_bounds_all_reports(tmp_path):
    code, text = run(tmp_path, "bounds", "--theorem", "all", "--loglogN", "40")
    assert code == 0
    payload = json.loads(text)
    ids = [r["theorem_id"] for r in payload["reports"]]
    assert ids == ["T4_lower", "T5_upper", "T6_upper", "FINAL"]


def test_verify_single_N_text(tmp_path):
    code, text = run(
        tmp_path,
        "verify",
        "--N",
        "10",
        "--table-limit",
        "200000",
        "--output-format",
        "text",
    )
    assert code == 0
    assert "pi2=3" in text


def test_verify_csv_columns(tmp_path):
    code, text = run(
        tmp_path, "verify", "--N", "10000", "--table-limit", "200000", "--emit", "csv"
    )
    assert code == 0
    lines = text.strip().split("\n")
    assert lines[0] == "N,pi2,S_A,Sum_S_Aq,S_B,lemma41_margin,UN,ratio"
    cells = lines[1].split(",")
    assert cells[0] == "10000"
    assert int(cells[1]) >= 1


def test_verify_requires_exactly_one_target(tmp_path):
    code, _ = run(tmp_path, "verify")
    assert code == 2
    code, _ = run(tmp_path, "verify", "--N", "10", "--scan", "10")
    assert code == 2


def test_scan_csv_and_thread_determinism(tmp_path):
    args = [
        "scan", "--max", "5000", "--rows", "--emit", "csv",
        "--table-limit", "200000",
    ]
    _, out1 = run(tmp_path, *args, "--threads", "1")
    _, out4 = run(tmp_path, *args, "--threads", "4")
    _, out8 = run(tmp_path, *args, "--threads", "8")
    assert out1 == out4 == out8
    assert out1.startswith("N,pi2,UN,ratio\n")


def test_scan_floor_json(tmp_path):
    code, text = run(
        tmp_path, "scan", "--max", "3000", "--floor-only", "--table-limit", "200000"
    )
    assert code == 0
    payload = json.loads(text)
    assert payload["result"]["floor_holds"] is True


def test_sievefun_csv(tmp_path):
    code, text = run(tmp_path, "sievefun", "--s-max", "4", "--step", "0.1")
    assert code == 0
    lines = text.strip().split("\n")
    assert lines[0] == "s,f1,f1_radius,F1,F1_radius"
    assert len(lines) == 41


def test_cache_build_and_info(tmp_path, capsys):
    path = tmp_path / "pt.bin"
    code = main(
        ["cache", "build", "--table-limit", "50000", "--cache-file", str(path)]
    )
    assert code == 0 and path.exists()
    code = main(["cache", "info", "--cache-file", str(path), "--table-limit", "50000"])
    assert code == 0
    assert "limit=50000" in capsys.readouterr().out


def test_unreadable_cache_regenerates_with_warning(tmp_path, capsys):
    path = tmp_path / "pt.bin"
    path.write_bytes(b"garbage")
    code = main(
        [
            "constants",
            "--table-limit",
            "200000",
            "--cache-file",
            str(path),
            "-o",
            str(tmp_path / "out.json"),
        ]
    )
    assert code == 0
    assert "rebuilding" in capsys.readouterr().err


def test_cache_env_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("CHENSIEVE_CACHE_DIR", str(tmp_path / "cachedir"))
    code = main(["cache", "build", "--table-limit", "30000"])
    assert code == 0
    assert os.path.exists(tmp_path / "cachedir" / "pt_30000.bin")


def test_usage_error_exit_code(capsys):
    try:
        main(["bounds", "--theorem", "7"])
    except SystemExit as exc:
        assert exc.code == 2
    else:
        raise AssertionError("argparse should exit on bad choice")


def test_mismatched_cache_limit_warns(tmp_path, capsys):
    path = tmp_path / "pt.bin"
    save_cache(build_prime_table(10_000), path)
    code = main(
        [
            "verify",
            "--N",
            "10",
            "--table-limit",
            "200000",
            "--cache-file",
            str(path),
            "-o",
            str(tmp_path / "o.txt"),
        ]
    )
    assert code == 0
    assert "rebuilding" in capsys.readouterr().err
