import csv
import io

import pytest

from srslearn import AdviceMode, InputError, LearnerConfig, shortest_counterexample
from srslearn.advice import find_witness
from srslearn.bench import CSV_FIELDS, SCENARIOS, bench, learn, make_instance, run_trial, summarize, to_csv


@pytest.mark.parametrize("scenario", ["idempotent", "bitadd", "partial-csrs", "conv-shared"])
def test_scenario_advice_is_consistent(scenario):
    for seed in range(3):
        inst = make_instance(scenario, seed)
        assert find_witness(inst.mode, inst.target) is None


def test_conv_scenarios_are_consistent():
    # instance construction only; learning these is covered by the acceptance suite
    for scenario in ("conv-pattern", "conv-random"):
        inst = make_instance(scenario, 0)
        assert find_witness(inst.mode, inst.target) is None
        assert inst.target.n_states > 1


def test_scenario_sizes():
    inst = make_instance("idempotent", 1)
    assert inst.target.n_states <= 300
    sizes = [make_instance("partial-csrs", s).mode.system for s in range(3)]
    assert all(len(c.rules) <= 20 for c in sizes)
    with pytest.raises(InputError):
        make_instance("nope", 0)


def test_paired_runs_share_target_and_config():
    row = run_trial("bitadd", 0, 5, LearnerConfig(), timing=False)
    assert row["target_states"] == 3
    assert row["mq_plain"] > row["mq_advice_asked"]
    assert row["wall_ms"] == 0
    assert set(row) == set(CSV_FIELDS)


def test_learn_reports_counts():
    inst = make_instance("idempotent", 2)
    learned, record = learn(inst.target, inst.mode, LearnerConfig(), 2, shadow=True)
    assert shortest_counterexample(learned, inst.target) is None
    assert record.mismatches == 0
    assert record.stats.mq_asked == record.teacher_stats.mq_asked


def test_negative_savings_are_data_not_errors():
    rows = bench("idempotent", 6, seed=0, timing=False)
    # whatever the sign of the savings, every trial produced a row
    assert [r["trial"] for r in rows] == list(range(6))
    assert all(isinstance(r["mq_decrease_pct"], float) for r in rows)


def test_summary_rows():
    rows = [{"scenario": "x", "mq_decrease_pct": v, "eq_decrease_pct": -v} for v in (1.0, 3.0)]
    lo, hi, avg = summarize(rows)
    assert (lo["trial"], hi["trial"], avg["trial"]) == ("min", "max", "mean")
    assert (lo["mq_decrease_pct"], hi["mq_decrease_pct"], avg["mq_decrease_pct"]) == (1.0, 3.0, 2.0)
    assert avg["eq_decrease_pct"] == -2.0


def test_parallel_rows_in_trial_order():
    serial = bench("partial-csrs", 3, seed=10, timing=False)
    parallel = bench("partial-csrs", 3, seed=10, jobs=2, timing=False)
    assert serial == parallel
    assert [r["seed"] for r in serial] == [10, 11, 12]
    table = list(csv.DictReader(io.StringIO(to_csv(serial))))
    assert [t["trial"] for t in table] == ["0", "1", "2", "min", "max", "mean"]


def test_bench_validation():
    with pytest.raises(InputError):
        bench("bitadd", 0)
    with pytest.raises(InputError):
        bench("unknown", 1)
    assert set(SCENARIOS) >= {"idempotent", "conv-pattern", "conv-random", "bitadd", "partial-csrs"}
