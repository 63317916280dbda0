import numpy as np
import pytest

from cmrf.cnf import ConstraintSet, clause
from cmrf.metrics import (
    MetricReport,
    grad_error,
    map_at_10,
    resample_stats,
    save_histogram_csv,
    validity,
)
from cmrf.model import ModelParams
from cmrf.oracle import exact_distribution, exact_grad_log_partition, expected_resamples
from cmrf.samplers import AssignmentBatch, SamplerConfig, nelson_sample

import corpus


def _batch(rows):
    rows = np.asarray(rows, dtype=np.uint8)
    return AssignmentBatch(rows=rows, valid_flags=np.ones(rows.shape[0], dtype=bool))


class TestValidity:
    def test_all_valid(self, toy_cs):
        assert validity(_batch([[0, 1, 1], [1, 1, 1]]), toy_cs) == 1.0

    def test_none_valid(self, toy_cs):
        assert validity(_batch([[0, 0, 0], [1, 0, 0]]), toy_cs) == 0.0

    def test_three_of_four(self, toy_cs):
        batch = _batch([[0, 1, 1], [1, 0, 1], [1, 1, 1], [0, 0, 0]])
        assert validity(batch, toy_cs) == 0.75

    def test_empty_batch_rejected(self, toy_cs):
        with pytest.raises(ValueError, match="empty"):
            validity(_batch(np.zeros((0, 3))), toy_cs)

    def test_accepted_nelson_rows_always_valid(self):
        for name, cs in corpus.extremal_corpus()[:6]:
            m = corpus.uniform_params(cs)
            batch, _ = nelson_sample(cs, m, SamplerConfig(batch_size=3000, seed=2))
            accepted = AssignmentBatch(
                rows=batch.rows[batch.valid_flags],
                valid_flags=batch.valid_flags[batch.valid_flags],
            )
            assert validity(accepted, cs) == 1.0, name


def _assignments(n, codes):
    return [np.array([int(c) for c in format(code, f"0{n}b")]) for code in codes]


class TestMapAt10:
    def test_perfect_top_ten(self):
        theta = ModelParams(np.ones(4) * 2.0)
        preferred = _assignments(4, range(10, 16))  # heavy assignments
        # pad preferred so the union is >= 10 and top ten all preferred
        preferred += _assignments(4, (8, 9, 6, 7))
        unseen = _assignments(4, (0, 1, 2))
        assert map_at_10(theta, preferred, unseen) == pytest.approx(100.0)

    def test_worst_top_ten(self):
        theta = ModelParams(np.ones(4) * 2.0)
        preferred = _assignments(4, (0, 1))  # light assignments rank last
        unseen = _assignments(4, range(4, 16))
        assert map_at_10(theta, preferred, unseen) == 0.0

    def test_ranks_one_and_two(self):
        # preferred exactly at ranks 1 and 2 of a 12-candidate pool
        theta = ModelParams(np.array([8.0, 4.0, 2.0, 1.0]))  # potential == code value
        preferred = _assignments(4, (15, 14))
        unseen = _assignments(4, range(10))
        expected = (1.0 + 1.0 + sum(2.0 / k for k in range(3, 11))) / 10 * 100
        assert map_at_10(theta, preferred, unseen) == pytest.approx(expected)
        assert map_at_10(theta, preferred, unseen) == pytest.approx(48.5794, abs=1e-3)

    def test_too_few_candidates(self):
        theta = ModelParams(np.zeros(4))
        with pytest.raises(ValueError, match="10"):
            map_at_10(theta, _assignments(4, (0,)), _assignments(4, (1, 2)))

    def test_scale_invariance(self):
        theta = ModelParams(np.array([1.0, -0.5, 0.25, 2.0]))
        preferred = _assignments(4, (3, 5, 9))
        unseen = _assignments(4, (0, 1, 2, 4, 6, 7, 8, 10))
        base = map_at_10(theta, preferred, unseen)
        for c in (0.1, 3.0, 42.0):
            scaled = ModelParams(theta.theta * c)
            assert map_at_10(scaled, preferred, unseen) == pytest.approx(base)

    def test_deterministic_tie_break(self):
        theta = ModelParams(np.zeros(4))  # every potential ties at 0
        preferred = _assignments(4, (15, 14, 13))
        unseen = _assignments(4, range(10))
        first = map_at_10(theta, preferred, unseen)
        assert first == map_at_10(theta, preferred, unseen)
        # descending-bitstring tie break puts 1111, 1110, 1101 on top
        assert first == pytest.approx(100.0 * (1 + 1 + 1 + sum(3 / k for k in range(4, 11))) / 10)


class TestGradError:
    def test_forced_coordinate_contributes_zero(self):
        cs = ConstraintSet(n_vars=1, clauses=(clause(1),))
        err = grad_error(cs, ModelParams(np.zeros(1)), "nelson", m=64, seed=0)
        assert err == 0.0

    def test_toy_small_error_with_m2000(self, toy_cs, toy_uniform):
        err = grad_error(toy_cs, toy_uniform, "nelson", m=2000, seed=1)
        assert err <= 0.05

    def test_error_shrinks_with_m(self, toy_cs, toy_uniform):
        errs_small = [
            grad_error(toy_cs, toy_uniform, "nelson", m=500, seed=s) for s in range(10)
        ]
        errs_big = [
            grad_error(toy_cs, toy_uniform, "nelson", m=8000, seed=s) for s in range(10)
        ]
        assert np.median(errs_big) < np.median(errs_small)

    def test_full_support_exact_weights_recover_gradient(self, toy_cs, toy_uniform):
        # the oracle-as-sampler limit: weighting the whole support by the
        # exact probabilities reproduces the exact gradient identically
        dist = exact_distribution(toy_cs, toy_uniform)
        estimate = dist.probabilities @ dist.support.astype(np.float64)
        exact = exact_grad_log_partition(toy_cs, toy_uniform)
        assert np.abs(estimate - exact).sum() == pytest.approx(0.0, abs=1e-15)


class TestResampleStats:
    def test_all_first_round(self):
        cs = ConstraintSet(n_vars=2)
        batch_size = 300
        _, stats = nelson_sample(
            cs, ModelParams(np.zeros(2)), SamplerConfig(batch_size=batch_size, seed=0)
        )
        summary = resample_stats(stats)
        assert summary.histogram == {1: batch_size}
        assert summary.mean_rounds == 1.0
        assert summary.per_constraint.size == 0

    def test_toy_matches_oracle_expectations(self, toy_cs, toy_uniform):
        cfg = SamplerConfig(batch_size=100_000, seed=6)
        _, stats = nelson_sample(toy_cs, toy_uniform, cfg)
        summary = resample_stats(stats)
        expected = expected_resamples(toy_cs, toy_uniform).per_constraint_expected
        observed = summary.per_constraint / cfg.batch_size
        assert np.all(np.abs(observed - expected) / expected < 0.05)

    def test_histogram_csv(self, tmp_path):
        path = tmp_path / "hist.csv"
        save_histogram_csv({1: 5, 3: 2}, path)
        assert path.read_text().splitlines() == ["round,count", "1,5", "3,2"]


def test_metric_report_serialization():
    report = MetricReport(validity=1.0, map_at_10=50.0, resample_histogram={2: 7, 1: 3})
    payload = report.to_dict()
    assert payload["validity"] == 1.0
    assert "nll" not in payload
    assert list(payload["resample_histogram"]) == ["1", "2"]
