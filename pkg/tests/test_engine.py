import math

import pytest

from conftest import constant_trace, make_config, simple_workload
from embudget.carbon import CarbonIntensityTrace
from embudget.cluster import MEDIUM
from embudget.engine import PolicySpec, ScenarioError, run_matrix, run_scenario
from embudget.workload import Task

EXACT_RATE = 10_080.0 / 604_800.0

UNLIMITED = PolicySpec("unlimited")
FIXED = PolicySpec("fixed", rate_g_per_s=EXACT_RATE)
BUDGET = PolicySpec("greedy_budget", budget_total_g=10_080.0)


def saturating_tasks(n=200, cu=5.0, runtime=200.0, deadline=1e9):
    return [Task(i, 0, cu, runtime, deadline) for i in range(n)]


class TestSingleStep:
    def test_full_medium_at_unit_intensity(self):
        # CI of 3.6e6 g/kWh makes the conversion factor exactly 1 g/Ws
        trace = CarbonIntensityTrace("unit", 0, 3600, (3_600_000.0,))
        config = make_config("one", trace, 1, UNLIMITED,
                             tasks=[Task(0, 0, 100.0, 1.0, 100.0)],
                             cluster=(MEDIUM,), initial="medium")
        report = run_scenario(config)
        assert report.power_w[0] == 600.0
        assert report.emission_g[0] == 600.0


class TestZeroIntensity:
    def test_policies_agree_when_carbon_free(self):
        trace = constant_trace(0.0, hours=2)
        workload = simple_workload(base_rate=0.8, task_cu=3, task_runtime=8)
        counts = []
        for policy in (UNLIMITED, FIXED, BUDGET):
            report = run_scenario(make_config(policy.kind, trace, 7200, policy,
                                              workload=workload))
            counts.append(report.finished_tasks)
            assert math.fsum(report.emission_g) == 0.0
        assert counts[0] == counts[1] == counts[2] > 0


class TestFixedThrottling:
    def test_closed_form_total(self):
        trace = constant_trace(400.0)
        config = make_config("throttle", trace, 1000, FIXED,
                             tasks=saturating_tasks())
        report = run_scenario(config)
        total = math.fsum(report.emission_g)
        assert total == pytest.approx(EXACT_RATE * 1000, abs=1e-6)
        cap_w = EXACT_RATE / (400.0 / 3_600_000.0)
        for p in report.power_w:
            assert p == pytest.approx(cap_w, abs=1e-6)

    def test_per_step_rate_never_exceeded(self):
        trace = CarbonIntensityTrace("var", 0, 600, (100.0, 700.0, 1500.0, 2600.0, 50.0, 900.0))
        config = make_config("rate", trace, 3600, FIXED,
                             workload=simple_workload(base_rate=1.2, task_cu=4))
        report = run_scenario(config)
        for e in report.emission_g:
            assert e <= EXACT_RATE + 1e-9


class TestBudgetAccounting:
    def test_ledger_matches_step_emissions(self):
        trace = constant_trace(600.0)
        config = make_config("ledger", trace, 5000, BUDGET,
                             workload=simple_workload(base_rate=0.9, task_cu=4))
        report = run_scenario(config)
        assert report.budget_spent_g == pytest.approx(math.fsum(report.emission_g), abs=1e-9)

    def test_no_front_loading_over_run(self):
        trace = CarbonIntensityTrace("var", 0, 900, tuple([80.0, 950.0] * 4))
        config = make_config("nfl", trace, 7200, BUDGET,
                             workload=simple_workload(base_rate=1.5, task_cu=5))
        report = run_scenario(config)
        budget_rate = 10_080.0 / 7200  # budget is spread over this run's horizon
        spent = 0.0
        for t, e in enumerate(report.emission_g):
            spent += e
            assert spent <= budget_rate * (t + 1) + 1e-9

    def test_suspension_is_zero_power(self):
        # tiny budget + high intensity forces suspension quickly
        trace = constant_trace(2500.0)
        policy = PolicySpec("greedy_budget", budget_total_g=0.036)
        config = make_config("susp", trace, 600, policy,
                             tasks=saturating_tasks())
        report = run_scenario(config)
        suspended = [i for i in range(600) if report.action[i] == 2]
        assert suspended, "expected suspended steps"
        for i in suspended:
            assert report.power_w[i] == 0.0
            assert report.emission_g[i] == 0.0
            assert report.node_index[i] == -1


class TestStepRecordInvariants:
    def test_emission_identity_and_clock(self):
        trace = CarbonIntensityTrace("v", 0, 600, (120.0, 450.0, 899.0, 40.0, 1300.0, 777.0))
        config = make_config("ident", trace, 3600, FIXED,
                             workload=simple_workload(base_rate=1.0, task_cu=3))
        report = run_scenario(config)
        assert report.horizon == 3600 == len(report.power_w)
        for t in range(3600):
            ci_ws = trace.values[t // 600] / 3_600_000.0
            assert report.emission_g[t] == report.power_w[t] * ci_ws
        records = list(report.records())
        assert [r.t for r in records] == list(range(3600))


class TestWorkloadIsolation:
    def test_identical_task_lists_across_policies(self):
        from embudget.workload import generate_diurnal_trace
        workload = simple_workload(base_rate=0.7, amplitudes=(0.4, 0.2))
        a = generate_diurnal_trace(workload, 7200, 9)
        b = generate_diurnal_trace(workload, 7200, 9)
        assert a == b


class TestValidation:
    def test_horizon_beyond_trace(self):
        config = make_config("bad", constant_trace(100.0, hours=1), 7200, UNLIMITED,
                             workload=simple_workload())
        with pytest.raises(ScenarioError):
            run_scenario(config)

    def test_unknown_initial_node(self):
        config = make_config("bad", constant_trace(100.0), 100, UNLIMITED,
                             workload=simple_workload(), initial="huge")
        with pytest.raises(ScenarioError):
            run_scenario(config)

    def test_policy_spec_validation(self):
        with pytest.raises(ScenarioError):
            PolicySpec("fixed")
        with pytest.raises(ScenarioError):
            PolicySpec("greedy_budget", budget_total_g=-1.0)
        with pytest.raises(ScenarioError):
            PolicySpec("mystery")


class TestRunMatrix:
    def test_empty_matrix_rejected(self):
        with pytest.raises(ScenarioError):
            run_matrix([])

    def test_identical_configs_identical_reports(self):
        trace = constant_trace(300.0)
        workload = simple_workload(base_rate=0.6)
        configs = [make_config("same", trace, 1800, FIXED, workload=workload)
                   for _ in range(2)]
        r1, r2 = run_matrix(configs)
        assert r1.power_w == r2.power_w
        assert r1.emission_g == r2.emission_g
        assert r1.finished_tasks == r2.finished_tasks

    def test_error_names_scenario(self):
        bad = make_config("broken_label", constant_trace(100.0, hours=1), 999_999,
                          UNLIMITED, workload=simple_workload())
        with pytest.raises(ScenarioError, match="broken_label"):
            run_matrix([bad])

    def test_output_order_matches_input(self):
        trace = constant_trace(300.0)
        workload = simple_workload(base_rate=0.5)
        configs = [make_config(f"s{i}", trace, 600, UNLIMITED, workload=workload)
                   for i in range(3)]
        reports = run_matrix(configs)
        assert [r.label for r in reports] == ["s0", "s1", "s2"]


class TestDeterminism:
    def test_rerun_bit_identical(self):
        trace = CarbonIntensityTrace("v", 0, 900, (90.0, 410.0, 980.0, 220.0,
                                                   660.0, 130.0, 850.0, 310.0))
        workload = simple_workload(base_rate=1.1, amplitudes=(0.5, 0.3))
        for policy in (UNLIMITED, FIXED, BUDGET):
            c = make_config("det", trace, 7200, policy, workload=workload)
            r1 = run_scenario(c)
            r2 = run_scenario(c)
            assert r1.power_w == r2.power_w
            assert r1.emission_g == r2.emission_g
            assert r1.action == r2.action
