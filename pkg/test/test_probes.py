import numpy as np
import pytest

from crhlab.crherrors import InsufficientDataError, ShapeError
from crhlab.netcore import (Activation, DenseLayer, LossKind, MlpModel, backward_capture, forward_capture,
                            init_mlp)
from crhlab.probes import (MomentAccumulator, MomentMode, StationarityTrace, bias_balance, conjugate_set,
                           conjugate_sets, local_min_balance, stationarity_residual, stationary_outer_balance)


def _tapes(model, seed=0, n=40):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, model.dims[0]))
    y = rng.standard_normal((n, model.dims[-1]))
    return backward_capture(model, forward_capture(model, x), y, LossKind.MSE)


def _ridge_model(gamma, bias, seed=0, n=200):
    """A linear layer at the exact minimum of its ridge objective on a fixed sample."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 5))
    y = x @ rng.standard_normal((5, 3)) + 0.3 * rng.standard_normal((n, 3)) + 0.5
    x_aug = np.hstack([x, np.ones((n, 1))]) if bias else x
    sigma = x_aug.T @ x_aug / n
    cross = y.T @ x_aug / n
    weight = np.linalg.solve((sigma + gamma * np.eye(sigma.shape[0])).T, cross.T).T
    layer = DenseLayer(weight=weight[:, :-1], bias=weight[:, -1]) if bias else DenseLayer(weight=weight)
    model = MlpModel(layers=[layer], activation=Activation.IDENTITY)
    tapes = backward_capture(model, forward_capture(model, x), y, LossKind.MSE)
    return model, tapes


def test_raw_moment_matches_numpy(rng):
    x = rng.standard_normal((50, 4))
    moment = MomentAccumulator(4).accumulate_batch(x).finalize()
    assert np.allclose(moment, x.T @ x / 50)


def test_centered_moment_matches_cov(rng):
    x = rng.standard_normal((50, 4)) + 2.0
    moment = MomentAccumulator(4, center=True).accumulate_batch(x).finalize()
    assert np.allclose(moment, np.cov(x.T, bias=True))


def test_streaming_equals_batch(rng):
    x = rng.standard_normal((30, 3))
    streamed = MomentAccumulator(3, center=True)
    for row in x:
        streamed.accumulate(row)
    assert np.allclose(streamed.finalize(), np.cov(x.T, bias=True))


def test_merge_equals_single_pass(rng):
    x = rng.standard_normal((40, 3)) + 1.0
    left = MomentAccumulator(3, normalize=True, center=True).accumulate_batch(x[:13])
    right = MomentAccumulator(3, normalize=True, center=True).accumulate_batch(x[13:])
    whole = MomentAccumulator(3, normalize=True, center=True).accumulate_batch(x)
    merged = left.merge(right)
    assert merged.count == 40
    assert np.allclose(merged.finalize(), whole.finalize())


def test_merge_rejects_different_options():
    with pytest.raises(ShapeError):
        MomentAccumulator(3).merge(MomentAccumulator(3, center=True))


def test_normalization_skips_zero_vectors():
    x = np.array([[3.0, 4.0], [0.0, 0.0], [0.0, 2.0]])
    acc = MomentAccumulator(2, normalize=True).accumulate_batch(x)
    assert acc.count == 2
    assert acc.skipped == 1
    expected = (np.outer([0.6, 0.8], [0.6, 0.8]) + np.outer([0.0, 1.0], [0.0, 1.0])) / 2.0
    assert np.allclose(acc.finalize(), expected)


def test_empty_accumulator_raises():
    with pytest.raises(InsufficientDataError):
        MomentAccumulator(2).finalize()


def test_accumulator_rejects_wrong_dim():
    with pytest.raises(ShapeError):
        MomentAccumulator(2).accumulate_batch(np.ones((3, 4)))


def test_conjugate_set_shapes_and_scalars():
    model = init_mlp([3, 4, 2], seed=1)
    tapes = _tapes(model)
    sets = conjugate_sets(model, tapes, MomentMode.RAW)
    assert len(sets) == 2
    first, second = sets
    assert first.H_a.shape == (4, 4) and first.H_b.shape == (4, 4)
    assert second.H_a.shape == (5, 5) and second.G_b.shape == (2, 2)
    assert first.Z_a.shape == first.H_a.shape and first.Z_b.shape == first.H_b.shape
    assert np.allclose(first.H_a, tapes[0].h_a.T @ tapes[0].h_a / 40)
    assert first.z_a == pytest.approx(np.mean(np.sum(tapes[0].g_b ** 2, axis=1)))
    assert first.z_b == pytest.approx(np.mean(np.sum(tapes[0].h_a ** 2, axis=1)))
    assert first.sample_count == 40
    for matrix in first.matrices().values():
        assert np.allclose(matrix, matrix.T)


def test_centered_set_has_raw_norm_scalars():
    model = init_mlp([3, 4, 2], seed=1)
    tapes = _tapes(model)
    raw = conjugate_set(model, tapes, 0, MomentMode.RAW)
    centered = conjugate_set(model, tapes, 0, MomentMode.CENTERED_NORMALIZED)
    assert centered.z_a == pytest.approx(raw.z_a)
    assert centered.z_b == pytest.approx(raw.z_b)
    assert np.trace(centered.H_b) <= 1.0 + 1e-12
    assert np.allclose(centered.Z_a, raw.Z_a)


def test_conjugate_set_without_samples():
    model = init_mlp([3, 4, 2], seed=1)
    with pytest.raises(InsufficientDataError):
        conjugate_set(model, _tapes(model), 5)


def test_stationarity_residual():
    model = init_mlp([3, 4, 2], seed=1)
    before = conjugate_set(model, _tapes(model, seed=0), 0, MomentMode.RAW)
    after = conjugate_set(model, _tapes(model, seed=1), 0, MomentMode.RAW)
    assert stationarity_residual(before, before).values() == (0.0,) * 6

    trace = StationarityTrace(layer_index=0)
    residual = stationarity_residual(after, before, step=10, trace=trace)
    assert residual.z_a == 0.0
    assert residual.h_a > 0.0
    with pytest.raises(ValueError):
        stationarity_residual(after, before, step=5, trace=trace)

    other = conjugate_set(model, _tapes(model), 1, MomentMode.RAW)
    with pytest.raises(ShapeError):
        stationarity_residual(other, before)


@pytest.mark.parametrize("bias", [False, True])
def test_local_min_balance_at_ridge_minimum(bias):
    model, tapes = _ridge_model(gamma=0.1, bias=bias)
    check = local_min_balance(conjugate_set(model, tapes, 0, MomentMode.RAW), 0.1)
    assert check.rel_err_f < 1e-8
    assert check.rel_err_b < 1e-8
    assert check.alpha_f == pytest.approx(1.0)
    assert check.alpha_b == pytest.approx(1.0)


def test_balance_needs_raw_moments():
    model, tapes = _ridge_model(gamma=0.1, bias=False)
    conj = conjugate_set(model, tapes, 0, MomentMode.CENTERED_NORMALIZED)
    with pytest.raises(ValueError):
        local_min_balance(conj, 0.1)
    with pytest.raises(ValueError):
        stationary_outer_balance(conj, 0.1)


def test_balance_without_decay_has_no_relative_error():
    model, tapes = _ridge_model(gamma=0.0, bias=False)
    check = stationary_outer_balance(conjugate_set(model, tapes, 0, MomentMode.RAW), 0.0)
    assert check.rel_err_f is None and check.rel_err_b is None


def test_bias_balance_at_ridge_minimum():
    model, tapes = _ridge_model(gamma=0.1, bias=True)
    check = bias_balance(model, tapes, 0, 0.1)
    assert check.rel_err < 1e-8
    assert check.within_bound

    plain, plain_tapes = _ridge_model(gamma=0.1, bias=False)
    with pytest.raises(ValueError):
        bias_balance(plain, plain_tapes, 0, 0.1)
