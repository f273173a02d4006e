import re

import numpy as np
import pytest

from shxga.cli import main
from shxga.engine import RunConfig
from shxga.harness import (
    ConfigError,
    ExperimentPlan,
    SummaryRow,
    compare_report,
    parse_config,
    parse_trace_filename,
    read_summary,
    read_trace,
    run_experiment,
    run_single,
    summarize,
    variant_label,
)

SMALL_PLAN = """\
# tiny grid for tests
functions = sphere
variants = BLX, SH-BLX_sequential
runs = 2
dim = 3
population = 12
candidates = 10
offspring = 5
generations = 3
archive_generations = 2
"""


def write(tmp_path, text, name="plan.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


def small_plan(tmp_path, extra="", name="plan.cfg"):
    return parse_config(write(tmp_path, SMALL_PLAN + extra, name))


# --- config parsing -----------------------------------------------------------

def test_empty_file_is_full_default_plan(tmp_path):
    plan = parse_config(write(tmp_path, "# nothing but comments\n\n"))
    assert isinstance(plan, ExperimentPlan)
    assert plan.functions == ["sphere", "rosenbrock", "rastrigin", "ackley1"]
    assert len(plan.variants) == 6
    assert plan.runs == 10
    assert plan.base_seed == 0
    base = plan.base
    assert (base.population, base.generations) == (100, 100)
    assert (base.candidates, base.offspring) == (180, 60)
    assert base.archive_generations == 30
    assert base.n_clusters == 900


def test_plan_overrides(tmp_path):
    plan = small_plan(tmp_path, "base_seed = 7\nclusters = auto\n")
    assert plan.functions == ["sphere"]
    assert plan.variants == ["BLX", "SH-BLX_sequential"]
    assert plan.runs == 2
    assert plan.base_seed == 7
    assert plan.base.n_clusters == 5  # auto: capacity 10 // 2


def test_single_run_config(tmp_path):
    cfg = parse_config(
        write(tmp_path, "function = Sphere\ncrossover = spx\nshx = true\nseed = 5\n")
    )
    assert isinstance(cfg, RunConfig)
    assert cfg.function == "sphere"
    assert cfg.crossover == "spx"
    assert cfg.shx is True
    assert cfg.seed == 5


def test_variant_names_case_insensitive(tmp_path):
    plan = parse_config(write(tmp_path, "variants = sh-blx_RANDOM, spx\n"))
    assert plan.variants == ["SH-BLX_random", "SPX"]


def test_constraint_violation_reports_keys(tmp_path):
    path = write(tmp_path, "candidates = 50\noffspring = 60\n")
    with pytest.raises(ConfigError) as err:
        parse_config(path)
    msg = str(err.value)
    assert "candidates" in msg and "offspring" in msg
    assert str(path) in msg


def test_unknown_key_has_line_context(tmp_path):
    path = write(tmp_path, "population = 10\nshiny = 3\n")
    with pytest.raises(ConfigError, match=rf"{re.escape(str(path))}:2.*shiny"):
        parse_config(path)


def test_unknown_function_lists_valid(tmp_path):
    with pytest.raises(ConfigError, match="sphere, rosenbrock, rastrigin, ackley1"):
        parse_config(write(tmp_path, "functions = sphere, griewank\n"))


def test_unknown_variant_lists_valid(tmp_path):
    with pytest.raises(ConfigError, match="SH-SPX_sequential"):
        parse_config(write(tmp_path, "variants = BLX, SH-BLX_fifo\n"))


def test_type_mismatch_has_key_and_line(tmp_path):
    path = write(tmp_path, "\npopulation = many\n")
    with pytest.raises(ConfigError, match=rf"{re.escape(str(path))}:2.*population"):
        parse_config(path)
    with pytest.raises(ConfigError, match="shx"):
        parse_config(write(tmp_path, "function = sphere\nshx = maybe\n", "b.cfg"))


def test_duplicate_key_rejected(tmp_path):
    with pytest.raises(ConfigError, match="duplicate key"):
        parse_config(write(tmp_path, "runs = 2\nruns = 3\n"))


def test_mode_key_clashes(tmp_path):
    with pytest.raises(ConfigError, match="not valid in a single-run"):
        parse_config(write(tmp_path, "function = sphere\nruns = 3\n"))
    with pytest.raises(ConfigError, match="not valid in a plan"):
        parse_config(write(tmp_path, "crossover = spx\n"))


def test_malformed_line(tmp_path):
    with pytest.raises(ConfigError, match="key = value"):
        parse_config(write(tmp_path, "population 10\n"))


def test_auto_and_explicit_epsilon(tmp_path):
    cfg = parse_config(write(tmp_path, "function = sphere\nepsilon = auto\n"))
    assert cfg.epsilon is None
    cfg = parse_config(write(tmp_path, "function = sphere\nepsilon = 2.5\n", "b.cfg"))
    assert cfg.epsilon == 2.5


# --- experiment execution -------------------------------------------------------

def test_zero_generation_cell(tmp_path):
    plan = ExperimentPlan(
        functions=["sphere"], variants=["BLX"], runs=2,
        base=RunConfig(generations=0),
    )
    outcomes = run_experiment(plan, tmp_path / "out")
    assert all(o.error is None for o in outcomes)
    traces = sorted((tmp_path / "out").glob("trace_*.csv"))
    assert [t.name for t in traces] == [
        "trace_sphere_BLX_0.csv", "trace_sphere_BLX_1.csv",
    ]
    for t in traces:
        rows = read_trace(t)
        assert len(rows) == 1
        assert rows[0][3] == 100  # fe_count = initial population


def test_trace_format_and_roundtrip(tmp_path):
    plan = small_plan(tmp_path)
    run_experiment(plan, tmp_path / "out")
    path = tmp_path / "out" / "trace_sphere_BLX_0.csv"
    lines = path.read_text().splitlines()
    assert lines[0] == "generation,best_fitness,mean_fitness,fe_count"
    assert len(lines) == 1 + 4  # header + generations 0..3
    sci = re.compile(r"^\d+,(\d\.\d{10}E[+-]\d{2,3}),(\d\.\d{10}E[+-]\d{2,3}),\d+$")
    for line in lines[1:]:
        m = sci.match(line)
        assert m, line
        for field in m.groups():
            assert ("%.10E" % float(field)) == field  # lossless round-trip


def test_summary_recomputes_exactly_from_traces(tmp_path):
    plan = small_plan(tmp_path)
    run_experiment(plan, tmp_path / "out")
    for row in read_summary(tmp_path / "out"):
        finals = []
        for path in (tmp_path / "out").glob(f"trace_{row.function}_{row.variant}_*.csv"):
            finals.append(read_trace(path)[-1][1])
        assert row.runs == len(finals) == 2
        assert row.mean == float("%.10E" % np.mean(finals))
        assert row.stddev == float("%.10E" % np.std(finals, ddof=1))


def test_fe_count_identical_across_variants(tmp_path):
    plan = ExperimentPlan(
        functions=["sphere"], runs=1,
        base=RunConfig(dim=3, population=12, candidates=10, offspring=5,
                       generations=2, archive_generations=2),
    )
    run_experiment(plan, tmp_path / "out")
    fe_columns = []
    for variant in plan.variants:
        rows = read_trace(tmp_path / "out" / f"trace_sphere_{variant}_0.csv")
        fe_columns.append([r[3] for r in rows])
    assert all(col == fe_columns[0] for col in fe_columns)


def test_rerun_is_byte_identical(tmp_path):
    plan = small_plan(tmp_path)
    run_experiment(plan, tmp_path / "a")
    run_experiment(plan, tmp_path / "b")
    a_files = sorted((tmp_path / "a").iterdir())
    b_files = sorted((tmp_path / "b").iterdir())
    assert [p.name for p in a_files] == [p.name for p in b_files]
    for pa, pb in zip(a_files, b_files):
        assert pa.read_bytes() == pb.read_bytes()


def test_workers_do_not_change_outputs(tmp_path):
    plan = small_plan(tmp_path)
    run_experiment(plan, tmp_path / "seq", workers=1)
    run_experiment(plan, tmp_path / "par", workers=2)
    for pa in sorted((tmp_path / "seq").iterdir()):
        assert pa.read_bytes() == (tmp_path / "par" / pa.name).read_bytes()


def test_seed_derivation_and_distinct_runs(tmp_path):
    plan = small_plan(tmp_path, "base_seed = 40\n")
    run_experiment(plan, tmp_path / "out")
    names = {p.name for p in (tmp_path / "out").glob("trace_sphere_BLX_*.csv")}
    assert names == {"trace_sphere_BLX_40.csv", "trace_sphere_BLX_41.csv"}
    a = (tmp_path / "out" / "trace_sphere_BLX_40.csv").read_bytes()
    b = (tmp_path / "out" / "trace_sphere_BLX_41.csv").read_bytes()
    assert a != b


def test_failing_cell_recorded_but_others_continue(tmp_path):
    # rosenbrock is undefined in 1-D: its runs fail, sphere's succeed
    plan = ExperimentPlan(
        functions=["sphere", "rosenbrock"], variants=["BLX"], runs=2,
        base=RunConfig(dim=1, population=6, candidates=4, offspring=2,
                       generations=1, archive_generations=2),
    )
    outcomes = run_experiment(plan, tmp_path / "out")
    errors = [o for o in outcomes if o.error]
    assert len(errors) == 2
    assert all(o.function == "rosenbrock" for o in errors)
    rows = read_summary(tmp_path / "out")
    assert [(r.function, r.runs) for r in rows] == [("sphere", 2)]


def test_variant_labels():
    assert variant_label(RunConfig(crossover="blx", shx=False)) == "BLX"
    assert variant_label(RunConfig(crossover="spx", shx=True, archive_update="random")) == "SH-SPX_random"
    label = variant_label(RunConfig(crossover="blx", shx=True, archive_update="sequential"))
    assert label == "SH-BLX_sequential"
    assert parse_trace_filename("trace_sphere_SH-BLX_sequential_3.csv") == (
        "sphere", "SH-BLX_sequential", 3,
    )


def test_run_single_writes_canonical_trace(tmp_path):
    cfg = RunConfig(function="rastrigin", dim=3, population=8, candidates=6,
                    offspring=3, generations=1, shx=True, archive_update="random",
                    archive_generations=2, seed=4)
    outcome = run_single(cfg, tmp_path)
    assert outcome.error is None
    assert (tmp_path / "trace_rastrigin_SH-BLX_random_4.csv").exists()
    assert (tmp_path / "summary.csv").exists()


# --- comparison report --------------------------------------------------------------

TABLE_ROWS = [
    SummaryRow("sphere", "SPX", 5.06e-03, 2.52e-03, 10),
    SummaryRow("sphere", "SH-SPX_random", 1.51e-03, 3.75e-04, 10),
    SummaryRow("sphere", "SH-SPX_sequential", 8.75e-04, 4.46e-04, 10),
    SummaryRow("rastrigin", "SPX", 3.78e01, 4.92e00, 10),
    SummaryRow("rastrigin", "SH-SPX_random", 1.11e01, 4.81e00, 10),
    SummaryRow("rastrigin", "SH-SPX_sequential", 8.32e00, 5.11e00, 10),
]


def test_report_ratios_and_best_flags():
    text = compare_report(TABLE_ROWS)
    assert "ratio 5.78x" in text  # 5.06e-3 / 8.75e-4
    assert "ratio 4.54x" in text  # 3.78e1 / 8.32e0
    best_lines = [line for line in text.splitlines() if "best in family" in line]
    assert all("SH-SPX_sequential" in line for line in best_lines)
    assert "sequential wins 2, random wins 0" in text


def test_report_tie_and_missing_cells():
    rows = [
        SummaryRow("sphere", "BLX", 2.0, 0.1, 10),
        SummaryRow("sphere", "SH-BLX_random", 2.0, 0.1, 10),
    ]
    text = compare_report(rows)
    assert "(tie)" in text
    assert "missing cells:" in text
    assert "sphere/SH-BLX_sequential" in text
    assert "sphere/SPX" in text


def test_report_counts_sequential_vs_random():
    rows = []
    for function, seq_better in (("sphere", True), ("rastrigin", False)):
        rows += [
            SummaryRow(function, "BLX", 5.0, 0.0, 10),
            SummaryRow(function, "SH-BLX_random", 3.0 if seq_better else 1.0, 0.0, 10),
            SummaryRow(function, "SH-BLX_sequential", 1.0 if seq_better else 3.0, 0.0, 10),
        ]
    text = compare_report(rows)
    assert "sequential wins 1, random wins 1, ties 0" in text


# --- CLI -------------------------------------------------------------------------------

def test_cli_run_summarize_report(tmp_path, capsys):
    cfg = write(tmp_path, SMALL_PLAN)
    out = tmp_path / "results"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "summary.csv").exists()
    assert main(["summarize", "--out", str(out)]) == 0
    assert main(["report", "--out", str(out)]) == 0
    captured = capsys.readouterr()
    assert "method comparison" in captured.out
    assert (out / "report.txt").exists()


def test_cli_seed_override(tmp_path):
    cfg = write(tmp_path, SMALL_PLAN)
    out = tmp_path / "results"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--seed", "30"]) == 0
    assert (out / "trace_sphere_BLX_31.csv").exists()


def test_cli_single_run_and_gnuplot(tmp_path):
    cfg = write(tmp_path, "function = sphere\ndim = 3\npopulation = 8\ncandidates = 6\noffspring = 3\ngenerations = 1\n")
    out = tmp_path / "res"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--gnuplot"]) == 0
    assert (out / "trace_sphere_BLX_0.csv").exists()
    script = (out / "plot_traces.gp").read_text()
    assert "plot" in script and "trace_sphere_BLX_0.csv" in script


def test_cli_config_error_exit_code(tmp_path):
    cfg = write(tmp_path, "candidates = 5\noffspring = 50\n")
    assert main(["run", "--config", str(cfg)]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_cli_failure_exit_code(tmp_path):
    cfg = write(
        tmp_path,
        "functions = rosenbrock\nvariants = BLX\nruns = 1\ndim = 1\n"
        "population = 6\ncandidates = 4\noffspring = 2\ngenerations = 1\n",
    )
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1


def test_cli_workers_flag(tmp_path):
    cfg = write(tmp_path, SMALL_PLAN)
    out = tmp_path / "res"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--workers", "2"]) == 0
    assert len(list(out.glob("trace_*.csv"))) == 4
