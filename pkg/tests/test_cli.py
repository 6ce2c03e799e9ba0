import csv
import json

import pytest

from hetcomp import cli


def small_config(tmp_path, **experiments):
    cfg = cli.default_config_dict()
    cfg["experiments"].update({"delay_means_ms": [0, 40], "l_values": [0, 1, 2], "beta_db": [0, 10],
                               "renewal_blocks": 20000})
    cfg["experiments"].update(experiments)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return path


def read(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# config_digest=")
    return list(csv.reader(lines[1:]))


def run(*args):
    return cli.main([str(a) for a in args])


@pytest.mark.parametrize(
    "experiment, files, columns",
    [
        ("DelaySweep", ["delay_sweep_coverage.csv", "delay_sweep_throughput.csv"],
         ["mean_delay_ms", "metric", "value", "std_error", "baseline_value", "baseline_std_error", "trials", "seed"]),
        ("BoundsValidation", ["bounds_validation.csv"],
         ["beta", "empirical_cdf", "empirical_se", "upper_bound", "lower_bound_or_fault", "dominance_lhs",
          "dominance_rhs"]),
        ("LSweep", ["l_sweep_coverage.csv", "l_sweep_throughput.csv"], None),
        ("IntraTierLoss", ["intratier_loss_coverage.csv", "intratier_loss_throughput.csv"], None),
        ("TimeFractionReport", ["time_fractions.csv"], None),
    ],
)
def test_schemas(tmp_path, experiment, files, columns):
    cfg = small_config(tmp_path)
    out = tmp_path / "out"
    assert run("--config", cfg, "--experiment", experiment, "--trials", 500, "--out", out) == 0
    for name in files:
        rows = read(out / name)
        if columns:
            assert rows[0] == columns
        assert len(rows) > 1
    manifest = json.loads((out / f"{experiment}_manifest.json").read_text())
    assert manifest["experiment"] == experiment and manifest["trials"] == 500


def test_bounds_csv_reports_faults(tmp_path):
    out = tmp_path / "out"
    run("--config", small_config(tmp_path), "--experiment", "BoundsValidation", "--trials", 500, "--out", out)
    rows = read(out / "bounds_validation.csv")[1:]
    assert all(r[4].startswith("DomainFault") for r in rows)


def test_byte_identical_reruns(tmp_path):
    cfg = small_config(tmp_path)
    for d in ("a", "b"):
        assert run("--config", cfg, "--experiment", "DelaySweep", "--trials", 700, "--seed", 3, "--out", tmp_path / d) == 0
    for name in ("delay_sweep_coverage.csv", "delay_sweep_throughput.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_refuses_to_overwrite(tmp_path):
    cfg = small_config(tmp_path)
    out = tmp_path / "out"
    assert run("--config", cfg, "--experiment", "TimeFractionReport", "--out", out) == 0
    before = (out / "time_fractions.csv").read_bytes()
    assert run("--config", cfg, "--experiment", "TimeFractionReport", "--out", out) == 2
    assert (out / "time_fractions.csv").read_bytes() == before
    assert run("--config", cfg, "--experiment", "TimeFractionReport", "--out", out, "--force") == 0


def test_validation_failure_exit_code(tmp_path):
    cfg = cli.default_config_dict()
    cfg["network"]["num_coordinated"] = 8
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(cfg))
    assert run("--config", path, "--experiment", "DelaySweep", "--out", tmp_path / "o") == 1
    assert not (tmp_path / "o").exists() or not any((tmp_path / "o").iterdir())


def test_runtime_fault_exit_code(tmp_path):
    assert run("--config", tmp_path / "missing.json", "--experiment", "DelaySweep", "--out", tmp_path / "o") == 2


def test_config_round_trip():
    cfg = cli.parse_config(cli.default_config_dict())
    assert cfg.network.num_coordinated == 1
    assert cfg.coherence.mean_block == pytest.approx(0.080)
    assert cfg.coverage.target_sir == pytest.approx(10**0.3)


def test_print_default_config(capsys):
    assert cli.main(["--print-default-config"]) == 0
    assert json.loads(capsys.readouterr().out)["overhead"]["coherence_ms"] == 80.0
