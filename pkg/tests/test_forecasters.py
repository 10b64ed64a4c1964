"""Dummy persistence-style forecasters, split evaluation, and the noise sweep."""
import numpy as np
import pytest

from scorecast.data import make_rolling_splits
from scorecast.forecasters import (
    DEFAULT_SIGMA_LIST,
    DUMMY_KINDS,
    DummyConfig,
    dummy_multivariate_forecast,
    dummy_univariate_forecast,
    ensemble_to_csv,
    evaluate_dummy_on_splits,
    make_dummy_forecast,
    sigma_sweep,
)


@pytest.fixture
def input_window():
    # last row is [1, 2, 3] -> per-dim anchors 1, 2, 3; row mean 2.0
    return np.array([[0.0, 0.0, 0.0], [1.0, 2.0, 3.0]])


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def test_dummy_config_defaults_and_echo():
    cfg = DummyConfig(kind="multivariate")
    assert cfg.sigma == 1e-4
    assert cfg.n_samples == 400
    assert cfg.seed == 0
    echo = cfg.to_dict()
    assert echo["kind"] == "multivariate" and echo["sigma"] == 1e-4


def test_dummy_config_validation():
    with pytest.raises(ValueError):
        DummyConfig(kind="persistence")
    with pytest.raises(ValueError):
        DummyConfig(kind="univariate", sigma=0.0)
    with pytest.raises(ValueError):
        DummyConfig(kind="univariate", n_samples=1)
    with pytest.raises(ValueError):
        DummyConfig(kind="univariate", seed=-3)
    assert DUMMY_KINDS == ("univariate", "multivariate")


# ---------------------------------------------------------------------------
# the two dummies
# ---------------------------------------------------------------------------

def test_univariate_dummy_anchors_every_dimension_to_the_row_mean(input_window):
    cfg = DummyConfig(kind="univariate", sigma=1e-6, n_samples=200, seed=8)
    ens = dummy_univariate_forecast(input_window, horizon=4, cfg=cfg)
    assert ens.shape == (200, 4, 3)
    # with sigma ~ 1e-6 every entry hugs the scalar anchor 2.0
    np.testing.assert_allclose(ens, 2.0, atol=1e-5)


def test_multivariate_dummy_anchors_each_dimension_separately(input_window):
    cfg = DummyConfig(kind="multivariate", sigma=1e-6, n_samples=200, seed=8)
    ens = dummy_multivariate_forecast(input_window, horizon=4, cfg=cfg)
    assert ens.shape == (200, 4, 3)
    np.testing.assert_allclose(ens.mean(axis=(0, 1)), [1.0, 2.0, 3.0], atol=1e-5)
    anchors = np.tile([1.0, 2.0, 3.0], (200, 1))
    np.testing.assert_allclose(ens[:, 2, :], anchors, atol=1e-5)


def test_dummy_noise_scale_is_respected(input_window):
    cfg = DummyConfig(kind="multivariate", sigma=0.5, n_samples=4000, seed=8)
    ens = dummy_multivariate_forecast(input_window, horizon=2, cfg=cfg)
    centered = ens - np.array([1.0, 2.0, 3.0])  # remove per-dim anchors
    assert centered.std() == pytest.approx(0.5, rel=0.05)


def test_dummies_are_deterministic(input_window):
    cfg = DummyConfig(kind="univariate", sigma=1e-3, n_samples=16, seed=21)
    a = dummy_univariate_forecast(input_window, 3, cfg)
    b = dummy_univariate_forecast(input_window, 3, cfg)
    np.testing.assert_array_equal(a, b)


def test_make_dummy_forecast_dispatch(input_window):
    uni = make_dummy_forecast(input_window, 2, DummyConfig(kind="univariate", seed=5))
    multi = make_dummy_forecast(input_window, 2, DummyConfig(kind="multivariate", seed=5))
    assert uni.shape == multi.shape == (400, 2, 3)
    # the two laws genuinely differ on a window whose last row is not constant
    assert abs(uni[:, 0, 0].mean() - multi[:, 0, 0].mean()) > 0.5


def test_dummy_horizon_validation(input_window):
    with pytest.raises(ValueError):
        dummy_univariate_forecast(input_window, 0, DummyConfig(kind="univariate"))
    with pytest.raises(ValueError):
        dummy_multivariate_forecast(np.zeros(3), 2, DummyConfig(kind="multivariate"))


def test_ensemble_csv_dump(tmp_path, rng):
    ens = rng.standard_normal((3, 2, 2))
    path = tmp_path / "dump.csv"
    ensemble_to_csv(ens, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "sample_id,t,dim,value"
    assert len(lines) == 1 + 3 * 2 * 2
    first = lines[1].split(",")
    assert [first[0], first[1], first[2]] == ["0", "0", "0"]
    assert float(first[3]) == ens[0, 0, 0]


# ---------------------------------------------------------------------------
# split evaluation and pooling
# ---------------------------------------------------------------------------

@pytest.fixture
def splits(synthetic_series):
    return make_rolling_splits(synthetic_series, n_batches=2, horizon=30, input_length=30)


def test_evaluate_produces_one_report_per_split(splits):
    cfg = DummyConfig(kind="multivariate", sigma=1e-4, n_samples=60, seed=0)
    per_split, pooled = evaluate_dummy_on_splits(splits, cfg)
    assert len(per_split) == 2
    for rep in per_split + [pooled]:
        assert rep.normalization_mode == "target-normalized"
        assert rep.crps_aggregate > 0
        assert rep.crps_sum > 0
        assert rep.energy_score > 0


def test_evaluate_is_deterministic(splits):
    cfg = DummyConfig(kind="univariate", sigma=1e-4, n_samples=40, seed=4)
    a_split, a_pool = evaluate_dummy_on_splits(splits, cfg)
    b_split, b_pool = evaluate_dummy_on_splits(splits, cfg)
    assert a_pool.to_dict() == b_pool.to_dict()
    assert [r.to_dict() for r in a_split] == [r.to_dict() for r in b_split]


def test_pooled_scores_weight_splits_by_target_magnitude(splits):
    """Pooling = total score mass / total target magnitude, which equals the
    denominator-weighted average of the per-split ratios."""
    cfg = DummyConfig(kind="multivariate", sigma=1e-3, n_samples=50, seed=2)
    per_split, pooled = evaluate_dummy_on_splits(splits, cfg)

    point_denoms = [np.abs(s.target_window).sum() for s in splits]
    sum_denoms = [np.abs(s.target_window.sum(axis=1)).sum() for s in splits]

    want_crps = sum(r.crps_aggregate * d for r, d in zip(per_split, point_denoms)) / sum(
        point_denoms
    )
    want_es = sum(r.energy_score * d for r, d in zip(per_split, point_denoms)) / sum(
        point_denoms
    )
    want_cs = sum(r.crps_sum * d for r, d in zip(per_split, sum_denoms)) / sum(sum_denoms)

    assert pooled.crps_aggregate == pytest.approx(want_crps, rel=1e-12)
    assert pooled.energy_score == pytest.approx(want_es, rel=1e-12)
    assert pooled.crps_sum == pytest.approx(want_cs, rel=1e-12)


def test_evaluate_raw_mode_pools_by_plain_mean(splits):
    cfg = DummyConfig(kind="multivariate", sigma=1e-3, n_samples=50, seed=2)
    per_split, pooled = evaluate_dummy_on_splits(splits, cfg, normalization="raw")
    # equal-length splits: pooled raw mean is the mean of per-split means
    assert pooled.crps_aggregate == pytest.approx(
        np.mean([r.crps_aggregate for r in per_split]), rel=1e-12
    )
    assert pooled.normalization_mode == "raw"


def test_evaluate_rejects_empty_split_list():
    with pytest.raises(ValueError):
        evaluate_dummy_on_splits([], DummyConfig(kind="univariate"))


# ---------------------------------------------------------------------------
# noise-scale sweep
# ---------------------------------------------------------------------------

def test_default_sigma_list_spans_twenty_decades():
    assert len(DEFAULT_SIGMA_LIST) == 20
    assert DEFAULT_SIGMA_LIST[0] == 1e-1
    assert DEFAULT_SIGMA_LIST[-1] == pytest.approx(1e-20)


def test_sigma_sweep_shares_random_streams(splits):
    """Repeated sigmas give exactly equal rows: the draw underlying each
    split does not depend on sigma."""
    rows = sigma_sweep("multivariate", [1e-4, 1e-4], splits, n_samples=30, seed=6)
    assert rows[0].crps_sum == rows[1].crps_sum
    assert rows[0].crps == rows[1].crps
    assert rows[0].es == rows[1].es


def test_sigma_sweep_scores_stabilize_for_small_noise(splits):
    """Once sigma is far below the data scale the scores stop moving."""
    rows = sigma_sweep(
        "multivariate", [1e-3, 1e-4, 1e-5, 1e-20], splits, n_samples=60, seed=0
    )
    by_sigma = {r.sigma: r for r in rows}
    for field in ("crps_sum", "crps", "es"):
        tiny = getattr(by_sigma[1e-5], field)
        tinier = getattr(by_sigma[1e-20], field)
        assert tiny == pytest.approx(tinier, rel=0.02)
        assert getattr(by_sigma[1e-3], field) == pytest.approx(
            getattr(by_sigma[1e-4], field), rel=0.10
        )


def test_sigma_sweep_univariate_kind(splits):
    rows = sigma_sweep("univariate", [1e-4], splits, n_samples=30, seed=1)
    assert len(rows) == 1 and rows[0].crps > 0
