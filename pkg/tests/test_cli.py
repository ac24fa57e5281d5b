import csv

import pytest

from sosnet.cli import main, read_reports
from sosnet.config import DEFAULT_FRACTIONS, SweepSpec, parse_config
from sosnet.errors import ConfigError
from sosnet.model import FusionVariant, ScenarioConfig
from sosnet.sim import Strategy
from sosnet.sim.metrics import CSV_HEADER
from sosnet.sweep import cell_means, rows_to_csv, run_sweep


def write(tmp_path, text, name="cfg.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_empty_file_gives_defaults(tmp_path):
    spec = parse_config(write(tmp_path, ""))
    assert spec.base == ScenarioConfig()
    assert spec.selfish_fractions == DEFAULT_FRACTIONS
    assert len(spec) == 2160


def test_two_fraction_sweep(tmp_path):
    spec = parse_config(write(tmp_path, "selfish_fractions = 0.04,0.25\n"))
    assert spec.selfish_fractions == (0.04, 0.25)


def test_sections_comments_and_types(tmp_path):
    text = """
    # scenario block
    [scenario]
    n_nodes = 30
    area = 300x200
    fusion_variant = eq21
    rd_centrality = false
    window_length = none
    [sweep]
    seeds = 0..2, 7
    strategies = SOS, NoIncentive
    pause_times = 0, 8   # trailing comment
    """
    spec = parse_config(write(tmp_path, text))
    assert spec.base.n_nodes == 30 and spec.base.area == (300.0, 200.0)
    assert spec.base.fusion_variant is FusionVariant.EQ21_LITERAL and spec.base.rd_centrality is False
    assert spec.seeds == (0, 1, 2, 7)
    assert spec.strategies == (Strategy.SOS, Strategy.NO_INCENTIVE)
    assert spec.pause_times == (0.0, 8.0)


def test_wrong_arity_coeffs_name_key_and_line(tmp_path):
    p = write(tmp_path, "n_nodes = 10\nweight_coeffs = 0.5,0.5\n")
    with pytest.raises(ConfigError) as exc:
        parse_config(p)
    assert exc.value.field == "weight_coeffs"
    assert f"{p}:2" in str(exc.value)


def test_unknown_key_rejected(tmp_path):
    with pytest.raises(ConfigError) as exc:
        parse_config(write(tmp_path, "colour = blue\n"))
    assert exc.value.field == "colour" and ":1" in str(exc.value)


def test_malformed_line_rejected(tmp_path):
    with pytest.raises(ConfigError) as exc:
        parse_config(write(tmp_path, "n_nodes 10\n"))
    assert ":1" in str(exc.value)


def test_constraint_violation_points_at_line(tmp_path):
    p = write(tmp_path, "\nselfish_fraction = 1.5\n")
    with pytest.raises(ConfigError) as exc:
        parse_config(p)
    assert exc.value.field == "selfish_fraction" and f"{p}:2" in str(exc.value)


def test_missing_file():
    with pytest.raises(ConfigError):
        parse_config("/nonexistent/sweep.ini")


def test_overrides_win(tmp_path):
    spec = parse_config(write(tmp_path, "seed = 3\nn_nodes = 12\n"), {"seed": "9", "n_nodes": 15})
    assert spec.base.seed == 9 and spec.base.n_nodes == 15


def test_empty_lists_rejected():
    with pytest.raises(ConfigError):
        SweepSpec(seeds=()).validate()


def _tiny():
    base = ScenarioConfig(n_nodes=15, sim_duration=30.0, election_period=15.0)
    return SweepSpec(base, (0.5,), tuple(float(p) for p in range(0, 17, 2)), (0,), (Strategy.SOS,))


def test_counting_nine_rows():
    assert len(run_sweep(_tiny()).rows) == 9


def test_parallel_matches_serial():
    spec = SweepSpec(ScenarioConfig(n_nodes=15, sim_duration=30.0, election_period=15.0),
                     (0.1, 0.5), (0.0, 4.0), (0, 1), (Strategy.SOS, Strategy.CAIS_LIKE))
    assert run_sweep(spec, 1).csv_text() == run_sweep(spec, 3).csv_text()


def test_csv_header_and_means():
    res = run_sweep(_tiny())
    text = rows_to_csv(res.rows)
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    assert text.splitlines()[0] == "strategy,selfish_pct,pause_time_s,seed,pdr,throughput_kbps,avg_delay_ms,avg_energy_j"
    assert len(cell_means(res.rows)) == 9


def test_cli_run_and_trace(tmp_path, capsys):
    out, trace = tmp_path / "m.csv", tmp_path / "t.csv"
    code = main(["run", "--set", "n_nodes=15", "--set", "sim_duration=30", "--seed", "2",
                 "--out", str(out), "--trace", str(trace), "--strategy", "SOS"])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 1 and rows[0]["seed"] == "2"
    assert trace.read_text().startswith("time,kind,node,detail\n")


def test_cli_sweep_outputs(tmp_path, capsys):
    cfg = write(tmp_path, "n_nodes = 12\nsim_duration = 20\nselfish_fractions = 0.25\n"
                          "pause_times = 0\nseeds = 0..1\nstrategies = SOS,NoIncentive\n")
    out, means = tmp_path / "s.csv", tmp_path / "means.csv"
    code = main(["sweep", "--config", str(cfg), "--out", str(out), "--means", str(means),
                 "--parallel", "2", "--check"])
    assert code == 0
    assert len(out.read_text().splitlines()) == 5
    assert means.read_text().startswith("strategy,selfish_pct,pause_time_s,runs,mean_pdr")
    assert "NoIncentive" in capsys.readouterr().out


def test_cli_config_error_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, "weight_coeffs = 0.5,0.5\n")
    assert main(["sweep", "--config", str(cfg)]) == 2
    assert "weight_coeffs" in capsys.readouterr().err


def test_cli_fuse_worked_example(tmp_path, capsys):
    p = write(tmp_path, "monitor,verdict,importance\n1,C,0.7\n2,S,0.3\n3,S,0.1\n4,S,0.4\n", "r.csv")
    assert main(["fuse", str(p)]) == 0
    out = capsys.readouterr().out
    assert "fused cooperative=0.582237" in out and "verdict Cooperative" in out


def test_fuse_reputation_column(tmp_path):
    p = write(tmp_path, "verdict,reputation\nCooperative,70\nSelfish,30\nSelfish,10\nSelfish,40\n", "r.csv")
    reports = read_reports(str(p))
    assert [round(f, 4) for _, f in reports] == [0.4667, 0.2, 0.0667, 0.2667]


def test_fuse_bad_verdict(tmp_path, capsys):
    p = write(tmp_path, "verdict,importance\nmaybe,0.5\nS,0.5\n", "r.csv")
    assert main(["fuse", str(p)]) == 2
