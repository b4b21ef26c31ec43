import json
import math

import pytest

from approxop.analysis import Domain
from approxop.experiments import (
    BETA_CAP,
    DEFAULT_N_LIST,
    BetaSchedule,
    ExperimentReport,
    Row,
    default_moment_grid,
    run_convergence,
    run_fourth_moment_limit,
    run_moment_validation,
    run_voronovskaya,
    run_weighted,
)
from approxop.functions import parse_function
from approxop.report import COLUMNS, emit_report, to_csv, to_json
from approxop.weights import TruncationPolicy

TIGHT = TruncationPolicy(1e-14)
ZERO = BetaSchedule.constant(0.0)


class TestSchedule:
    def test_values(self):
        s = BetaSchedule(1.0, 2.0)
        assert s(10) == pytest.approx(0.01)
        assert BetaSchedule(2.0, 1.0)(1) == BETA_CAP

    def test_monotone_to_zero(self):
        s = BetaSchedule(0.5, 0.5)
        vals = [s(n) for n in DEFAULT_N_LIST]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert all(0 <= v < 1 for v in vals)

    def test_constant(self):
        assert BetaSchedule.constant(0.3)(10**6) == 0.3

    @pytest.mark.parametrize("c,p", [(-1.0, 1.0), (1.0, 0.0)])
    def test_invalid(self, c, p):
        with pytest.raises(ValueError):
            BetaSchedule(c, p)


class TestConvergence:
    def test_constant_function(self):
        rep = run_convergence(parse_function("poly:1"), BetaSchedule(), [10, 100], Domain(0, 2, 0.1))
        assert all(r.measured < 1e-12 for r in rep.rows)

    def test_identity_szasz(self):
        rep = run_convergence(parse_function("poly:0,1"), ZERO, [10, 100, 1000], Domain(0, 2, 0.1))
        assert all(r.measured < 1e-12 for r in rep.rows)

    def test_exp_decay_decreases(self):
        rep = run_convergence(parse_function("exp-decay"), BetaSchedule(1, 1), [10, 100, 1000, 10000],
                              Domain(0, 2, 0.05), TIGHT)
        errs = [r.measured for r in rep.rows]
        assert all(b < a for a, b in zip(errs, errs[1:]))
        assert rep.rows[0].order is None
        assert all(r.order > 0.9 for r in rep.rows[1:])

    def test_error_dominated_by_rate_bound(self):
        rep = run_convergence(parse_function("poly:0,0,1"), BetaSchedule(1, 1), [10, 100, 1000],
                              Domain(0, 1, 0.05))
        assert all(r.measured <= r.bound for r in rep.rows)

    def test_residual_mass_below_epsilon(self):
        rep = run_convergence(parse_function("sin"), BetaSchedule(1, 2), [10, 100], Domain(0, 3, 0.5))
        assert all(r.residual_mass < 1e-12 for r in rep.rows)

    @pytest.mark.parametrize("ns", [[], [10, 10], [100, 10]])
    def test_n_list_validation(self, ns):
        with pytest.raises(ValueError):
            run_convergence(parse_function("sin"), ZERO, ns, Domain(0, 1, 0.5))


class TestVoronovskaya:
    def test_square(self):
        rep = run_voronovskaya(parse_function("poly:0,0,1"), ZERO, [10, 1000], [0.5, 2.0])
        for r in rep.rows:
            assert r.measured == pytest.approx(r.reference, abs=1e-12 * r.n)
            assert r.reference == r.x

    def test_exp_decay(self):
        rep = run_voronovskaya(parse_function("exp-decay"), BetaSchedule(1, 2), [1000], [1.0],
                               TruncationPolicy(1e-15))
        (r,) = rep.rows
        assert abs(r.measured - 0.18394) / 0.18394 < 5e-3

    def test_cubic(self):
        rep = run_voronovskaya(parse_function("poly:0,0,0,1"), ZERO, [10, 100, 10000], [2.0], TIGHT)
        for r in rep.rows:
            assert r.reference == 12.0
            assert r.measured == pytest.approx(12 + 2 / r.n, rel=1e-9)

    def test_slow_schedule_drifts(self):
        # with n beta_n = sqrt(n) the shift term x n beta_n / (1 - beta_n) dominates
        rep = run_voronovskaya(parse_function("poly:0,0,1"), BetaSchedule(1, 0.5), [100, 10000], [1.0])
        gaps = [r.measured - r.reference for r in rep.rows]
        assert gaps[1] > 5 * gaps[0] > 0
        assert gaps[1] == pytest.approx(2 * 100, rel=0.05)

    def test_needs_second_derivative(self):
        with pytest.raises(ValueError):
            run_voronovskaya(parse_function("abs:1"), ZERO, [10], [1.0])


class TestFourthMoment:
    def test_szasz(self):
        (r,) = run_fourth_moment_limit(ZERO, [100], [1.0]).rows
        assert r.measured == pytest.approx(3.01, rel=1e-13)
        assert r.reference == 3.0

    def test_origin(self):
        rows = run_fourth_moment_limit(BetaSchedule(1, 2), [10, 100, 1000], [0.0]).rows
        assert [r.reference for r in rows] == [0.0] * 3
        assert rows[-1].measured < rows[0].measured < 1e-3

    def test_schedule(self):
        (r,) = run_fourth_moment_limit(BetaSchedule(1, 2), [1000], [2.0]).rows
        assert abs(r.measured - 12) / 12 < 1e-2


class TestWeighted:
    def test_constant(self):
        rep = run_weighted(parse_function("poly:1"), BetaSchedule(), [10, 100], step=5.0)
        assert all(r.measured < 1e-12 for r in rep.rows)

    def test_identity_szasz(self):
        rep = run_weighted(parse_function("poly:0,1"), ZERO, [10, 100], step=5.0)
        assert all(r.measured < 1e-12 for r in rep.rows)

    def test_square_decreases(self):
        rep = run_weighted(parse_function("poly:0,0,1"), BetaSchedule(1, 1), [10, 100, 1000], step=5.0)
        errs = [r.measured for r in rep.rows]
        assert all(b < a for a, b in zip(errs, errs[1:]))


@pytest.fixture(scope="module")
def report():
    return run_moment_validation(policy=TIGHT)


class TestMomentValidation:
    def test_grid_size(self, report):
        assert len(default_moment_grid()) == 48
        assert len(report) == 48 * 11

    def test_closed_forms(self, report):
        for r in report.select("raw:") + report.select("central:"):
            if r.reference == 0.0:
                assert abs(r.measured) < 1e-12
            else:
                assert abs(r.measured - r.reference) / abs(r.reference) < 1e-9

    def test_poisson_rows_tighter(self, report):
        for r in report.select("raw:"):
            if r.beta == 0.0 and r.reference != 0.0:
                assert abs(r.measured - r.reference) / abs(r.reference) < 1e-11

    def test_second_bound_dominates(self, report):
        rows = [r for r in report.select("bound:second") if 0 < r.beta < 1]
        assert rows and all(r.measured <= r.bound for r in rows)

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            run_moment_validation([])


class TestReport:
    def _rows(self):
        return [Row("b", 10, 0.1, 1.0, 0.1, 0.2), Row("a", 100, 0.0, 2.0, 1 / 3, 0.0, 2.5, 1e-15, 0.97),
                Row("a", 10, 0.5, 2.0, 1.0, 1.0), Row("a", 10, 0.2, 2.0, 1.0, 1.0)]

    def test_sorting_is_deterministic(self):
        rows = self._rows()
        assert to_csv(ExperimentReport(rows)) == to_csv(ExperimentReport(rows[::-1]))
        keys = [(r.experiment, r.n, r.beta) for r in ExperimentReport(rows).rows]
        assert keys == [("a", 10, 0.2), ("a", 10, 0.5), ("a", 100, 0.0), ("b", 10, 0.1)]

    def test_csv_header_only(self):
        assert to_csv(ExperimentReport([])) == ",".join(COLUMNS) + "\n"

    def test_csv_round_trip_precision(self):
        text = to_csv(ExperimentReport(self._rows()))
        line = text.splitlines()[3]
        assert float(line.split(",")[4]) == 1 / 3
        assert line.split(",")[:4] == ["a", "100", "0", "2"]
        assert text.splitlines()[1].endswith(",,0,")

    def test_json_one_row(self):
        doc = json.loads(to_json(ExperimentReport([Row("a", 1, 0.0, 0.5, math.pi, 3.0)])))
        assert doc["schema_version"] == 1
        assert len(doc["rows"]) == 1
        assert doc["rows"][0]["measured"] == math.pi

    def test_json_non_finite(self):
        doc = json.loads(to_json(ExperimentReport([Row("a", 1, 0.0, 0.5, math.inf, 3.0)])))
        assert doc["rows"][0]["measured"] is None

    def test_emit_to_file(self, tmp_path):
        path = tmp_path / "r.csv"
        assert emit_report(ExperimentReport([]), "csv", str(path)) == 0
        assert path.read_text() == ",".join(COLUMNS) + "\n"

    def test_emit_bad_path(self, tmp_path):
        with pytest.raises(OSError):
            emit_report(ExperimentReport([]), "csv", str(tmp_path / "missing" / "r.csv"))

    def test_emit_bad_format(self):
        with pytest.raises(ValueError):
            emit_report(ExperimentReport([]), "xml")
