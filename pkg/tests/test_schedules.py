import math
import warnings

import numpy as np
import pytest

from conftest import random_spinner3
from tipsychase import chain, families, schedules
from tipsychase.errors import InvalidParameter, ScheduleOutOfRange


def cycle6(s):
    return families.cycle_chain(6, s)


class TestScheduleTypes:
    def test_builtin_time_schedules_start_fully_tipsy(self):
        assert schedules.TimeSchedule.hyperbolic().at(1) == 1.0
        assert schedules.TimeSchedule.exponential2().at(1) == 1.0

    def test_time_schedule_range_enforced(self):
        bad = schedules.TimeSchedule(lambda m: 1.5, "bad")
        with pytest.raises(ScheduleOutOfRange):
            bad.at(1)

    def test_custom_first_round_warns(self):
        sched = schedules.TimeSchedule(lambda m: 0.5 / m, "half")
        with pytest.warns(UserWarning):
            schedules.time_varying_survival(
                cycle6, schedules.SoberSplit(0.5), sched, "1", 2
            )

    def test_distance_schedule_builtins(self):
        lin = schedules.DistanceSchedule.linear(5)
        assert lin.at(1) == 0.0
        assert lin.at(5) == pytest.approx(0.8)
        exp = schedules.DistanceSchedule.exponential()
        assert exp.at(1) == 0.0
        assert exp.at(2) == pytest.approx((1 - 1 / 1.2) / (1 + 1 / 1.2))

    def test_sober_split_validation(self):
        with pytest.raises(InvalidParameter):
            schedules.SoberSplit(1.5)
        s = schedules.SoberSplit(0.3).spinner(0.4)
        assert (s.r, s.c) == (pytest.approx(0.18), pytest.approx(0.42))

    def test_parse_schedule_tokens(self):
        assert isinstance(schedules.parse_schedule("hyper:4,3"), schedules.TimeSchedule)
        assert isinstance(schedules.parse_schedule("exp2:4,2"), schedules.TimeSchedule)
        assert isinstance(
            schedules.parse_schedule("linear", max_distance=5), schedules.DistanceSchedule
        )
        assert isinstance(schedules.parse_schedule("exp12"), schedules.DistanceSchedule)
        with pytest.raises(InvalidParameter):
            schedules.parse_schedule("linear")
        with pytest.raises(InvalidParameter):
            schedules.parse_schedule("sigmoid")


class TestTimeVaryingSurvival:
    def test_reference_values_hyperbolic(self):
        sched = schedules.TimeSchedule.hyperbolic()
        got = schedules.time_varying_survival(
            cycle6, schedules.SoberSplit(0.5), sched, "1", 5
        )
        assert got == pytest.approx(0.2917, abs=5e-4)

    def test_reference_values_exponential(self):
        sched = schedules.TimeSchedule.exponential2()
        got = schedules.time_varying_survival(
            cycle6, schedules.SoberSplit(0.5), sched, "3", 5
        )
        assert got == pytest.approx(0.6000, abs=5e-4)

    def test_zero_rounds(self):
        sched = schedules.TimeSchedule.hyperbolic()
        assert schedules.time_varying_survival(
            cycle6, schedules.SoberSplit(0.2), sched, "2", 0
        ) == 1.0

    def test_constant_schedule_reproduces_static(self, rng):
        for _ in range(5):
            share = float(rng.uniform(0, 1))
            t0 = float(rng.uniform(0.05, 0.95))
            sched = schedules.TimeSchedule(lambda m: t0, "const", limit=t0)
            static = chain.extract_transient(
                cycle6(families.SpinnerThree.from_split(t0, share))
            )
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                for m in (1, 4, 9):
                    dyn = schedules.time_varying_survival(
                        cycle6, schedules.SoberSplit(share), sched, "2", m
                    )
                    assert dyn == pytest.approx(
                        chain.survival_probability(static, "2", m), abs=1e-12
                    )


class TestTimeVaryingExpectation:
    def test_reference_value_hyperbolic(self):
        res = schedules.time_varying_expectation(
            cycle6, schedules.SoberSplit(0.5), schedules.TimeSchedule.hyperbolic(),
            "1", tol=1e-10, n_max=1000,
        )
        assert res.value == pytest.approx(5.456, abs=0.005)
        assert res.converged

    def test_reference_value_exponential(self):
        res = schedules.time_varying_expectation(
            cycle6, schedules.SoberSplit(0.0), schedules.TimeSchedule.exponential2(),
            "3", tol=1e-10, n_max=500,
        )
        assert res.value == pytest.approx(4.093, abs=0.005)

    def test_all_sober_mass_to_robber_diverges(self):
        res = schedules.time_varying_expectation(
            cycle6, schedules.SoberSplit(1.0), schedules.TimeSchedule.hyperbolic(),
            "1", tol=1e-9, n_max=200,
        )
        assert res.is_infinite
        assert not res.converged

    def test_partial_sums_nondecreasing(self):
        values = [
            schedules.time_varying_expectation(
                cycle6, schedules.SoberSplit(0.8), schedules.TimeSchedule.hyperbolic(),
                "2", tol=1e-30, n_max=n,
            ).value
            for n in (10, 50, 200, 800)
        ]
        assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))

    def test_converged_implies_bound_below_tol(self):
        res = schedules.time_varying_expectation(
            cycle6, schedules.SoberSplit(0.3), schedules.TimeSchedule.hyperbolic(),
            "1", tol=1e-8, n_max=5000,
        )
        assert res.converged
        assert res.truncation_bound < 1e-8
        assert res.terms_used < 5000


class TestDistanceCycleChain:
    def test_reference_values_tables_mode(self):
        lin = schedules.DistanceSchedule.linear(5)
        c = schedules.distance_cycle_chain(
            10, schedules.SoberSplit(0.5), lin, boundary="tables"
        )
        ts = chain.extract_transient(c)
        assert chain.expected_rounds(ts, "1").value == pytest.approx(9.25, abs=0.01)
        assert chain.survival_probability(ts, "1", 20) == pytest.approx(0.148, abs=0.001)
        exp = schedules.DistanceSchedule.exponential()
        c2 = schedules.distance_cycle_chain(
            10, schedules.SoberSplit(0.5), exp, boundary="tables"
        )
        assert chain.expected_rounds(chain.extract_transient(c2), "5").value == pytest.approx(
            27.89, abs=0.01
        )

    def test_matrix_mode_follows_displayed_rows(self):
        # with every row at its own delta(d) the expectation solves to 82/9
        lin = schedules.DistanceSchedule.linear(5)
        c = schedules.distance_cycle_chain(10, schedules.SoberSplit(0.5), lin)
        ts = chain.extract_transient(c)
        assert chain.expected_rounds(ts, "1").value == pytest.approx(82 / 9, abs=1e-9)
        t5 = 4 / 5
        r5 = 0.5 * (1 - t5)
        np.testing.assert_allclose(
            c.P[5], [0, 0, 0, 0, (1 - t5) * 0.5 + t5, r5], atol=1e-15
        )

    def test_all_sober_mass_to_cop(self):
        lin = schedules.DistanceSchedule.linear(5)
        c = schedules.distance_cycle_chain(10, schedules.SoberSplit(0.0), lin)
        ts = chain.extract_transient(c)
        assert chain.expected_rounds(ts, "1").value == pytest.approx(1.0, abs=1e-12)

    def test_all_sober_mass_to_robber_diverges(self):
        lin = schedules.DistanceSchedule.linear(5)
        for boundary in ("matrix", "tables"):
            c = schedules.distance_cycle_chain(
                10, schedules.SoberSplit(1.0), lin, boundary=boundary
            )
            ts = chain.extract_transient(c)
            assert chain.expected_rounds(ts, "3").is_infinite
            assert chain.survival_probability(ts, "3", 20) == pytest.approx(1.0, abs=1e-12)

    def test_constant_delta_reproduces_static_chain(self, rng):
        for _ in range(5):
            t0 = float(rng.uniform(0.0, 0.9))
            share = float(rng.uniform(0, 1))
            const = schedules.DistanceSchedule(lambda d: t0, "const")
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                dyn = schedules.distance_cycle_chain(10, schedules.SoberSplit(share), const)
            static = families.cycle_chain(10, families.SpinnerThree.from_split(t0, share))
            np.testing.assert_allclose(dyn.P, static.P, atol=1e-12)

    def test_odd_cycle_boundary(self):
        lin = schedules.DistanceSchedule.linear(4)
        c = schedules.distance_cycle_chain(9, schedules.SoberSplit(0.5), lin)
        t4 = lin.at(4)
        s = schedules.SoberSplit(0.5).spinner(t4)
        assert c.P[4, 4] == pytest.approx(s.r + s.t / 2, abs=1e-15)
        assert c.P[4, 3] == pytest.approx(s.c + s.t / 2, abs=1e-15)

    def test_validates_across_shares(self):
        for sched in (
            schedules.DistanceSchedule.linear(5),
            schedules.DistanceSchedule.exponential(),
        ):
            for k in range(11):
                c = schedules.distance_cycle_chain(10, schedules.SoberSplit(k / 10), sched)
                chain.validate(c)


class TestDistanceTreeChain:
    def test_reference_values_linear(self):
        lin = schedules.DistanceSchedule.linear(10)
        c = schedules.distance_tree_chain(4, 10, schedules.SoberSplit(0.5), lin)
        ts = chain.extract_transient(c)
        assert chain.expected_rounds(ts, "1").value == pytest.approx(7.3, abs=0.05)
        assert chain.survival_probability(ts, "1", 30) == pytest.approx(0.045, abs=0.001)

    def test_reference_values_exponential_base2(self):
        exp2 = schedules.DistanceSchedule.exponential(base=2.0)
        c = schedules.distance_tree_chain(4, 10, schedules.SoberSplit(0.5), exp2)
        ts = chain.extract_transient(c)
        assert chain.expected_rounds(ts, "1").value == pytest.approx(6.6, abs=0.05)

    def test_all_sober_mass_to_cop_catches_immediately(self):
        lin = schedules.DistanceSchedule.linear(10)
        c = schedules.distance_tree_chain(4, 10, schedules.SoberSplit(0.0), lin)
        ts = chain.extract_transient(c)
        assert chain.expected_rounds(ts, "1").value == pytest.approx(1.0, abs=1e-12)

    def test_row_uses_current_state_tipsiness(self, rng):
        sched = schedules.DistanceSchedule.exponential()
        share = 0.4
        c = schedules.distance_tree_chain(3, 6, schedules.SoberSplit(share), sched)
        for d in range(1, 6):
            s = schedules.SoberSplit(share).spinner(sched.at(d))
            assert c.P[d, d + 1] == pytest.approx(s.r + s.t * 2 / 3, abs=1e-15)
            assert c.P[d, d - 1] == pytest.approx(s.c + s.t / 3, abs=1e-15)

    def test_constant_delta_reproduces_static_chain(self, rng):
        for _ in range(5):
            t0 = float(rng.uniform(0.0, 0.9))
            share = float(rng.uniform(0, 1))
            const = schedules.DistanceSchedule(lambda d: t0, "const")
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                dyn = schedules.distance_tree_chain(4, 8, schedules.SoberSplit(share), const)
            static = families.tree_chain(4, 8, families.SpinnerThree.from_split(t0, share))
            np.testing.assert_allclose(dyn.P, static.P, atol=1e-12)

    def test_validates_across_shares(self):
        for sched in (
            schedules.DistanceSchedule.linear(10),
            schedules.DistanceSchedule.exponential(),
            schedules.DistanceSchedule.exponential(base=2.0),
        ):
            for k in range(11):
                c = schedules.distance_tree_chain(4, 10, schedules.SoberSplit(k / 10), sched)
                chain.validate(c)
