import numpy as np
import pytest

from crhlab.crherrors import ShapeError
from crhlab.crhkit import six_alignments
from crhlab.netcore import (Activation, DenseLayer, LossKind, MlpModel, backward_capture, forward_capture,
                            init_mlp)
from crhlab.phasemodel.table_phase_model import PhaseType, Relation
from crhlab.theoremlab import (LabeledDataset, build_collapse_model, check_canonical_subspace, check_redundancy,
                               check_shared_projector, invariance_check, master_suite, nc_check, nfa_check,
                               synth_canonical_instance, synth_phase_instance)
from crhlab.theoremlab.master import CANONICAL, POWER_LAW, PROJECTOR, REDUNDANCY


@pytest.mark.parametrize("phase", PhaseType.table_phases(), ids=lambda phase: phase.label)
@pytest.mark.parametrize("seed", [0, 7])
def test_assumed_relations_hold_exactly(phase, seed):
    instance = synth_phase_instance(phase, seed=seed)
    scores = instance.assumed_scores()
    assert scores
    assert all(score >= 1.0 - 1e-12 for score in scores.values())
    assert np.allclose(instance.H_b, instance.W @ instance.H_a @ instance.W.T)
    assert np.allclose(instance.Z_a, instance.W.T @ instance.W)


def test_instance_is_deterministic():
    first = synth_phase_instance(PhaseType.PHASE_6, seed=11)
    second = synth_phase_instance(PhaseType.PHASE_6, seed=11)
    assert np.array_equal(first.W, second.W)
    assert np.array_equal(first.G_b, second.G_b)


def test_instance_rejects_small_dims():
    with pytest.raises(ShapeError):
        synth_phase_instance(PhaseType.PHASE_1, d_in=3, d_out=12)


def test_instance_needs_table_phase():
    with pytest.raises(ValueError):
        synth_phase_instance(PhaseType.PARTIAL)


def test_master_suite_passes():
    checks = master_suite()
    assert len(checks) == 20 * len(PhaseType.table_phases())
    assert all(check.passed for check in checks), [(c.phase.label, c.seed) for c in checks if not c.passed]
    first = checks[0]
    assert set(first.parts) == {POWER_LAW, REDUNDANCY, CANONICAL, PROJECTOR}
    assert set(checks[1].parts) == {POWER_LAW}
    errors = [result.exponent_error for check in checks for result in check.parts[POWER_LAW]
              if result.exponent_error is not None]
    assert errors
    assert max(errors) < 0.05


@pytest.mark.parametrize("phase, side", [(PhaseType.BACK_CRH, 'a'), (PhaseType.FORW_CRH, 'b')])
def test_two_relations_imply_the_third(phase, side):
    implied, *given = Relation.for_side(side)
    instance = synth_phase_instance(phase, seed=4, assumed=tuple(given))
    assert set(instance.assumed) == set(given)
    assert six_alignments(instance.conjugate_set()).score(implied) >= 1.0 - 1e-12


def test_redundancy_reports_the_implied_relations():
    results = check_redundancy(12, 12, 0)
    assert [result.label for result in results] == ["H_a~G_a implied", "H_b~G_b implied"]
    assert results.all_passed()


def test_instance_needs_an_assumed_relation():
    with pytest.raises(ValueError):
        synth_phase_instance(PhaseType.BACK_CRH, assumed=())


def test_master_rows():
    check = master_suite(seeds=[0], phases=[PhaseType.PHASE_1])[0]
    rows = check.rows()
    assert rows
    assert set(rows[0]) == {'theorem', 'phase', 'seed', 'relation', 'alpha', 'expected_exponent',
                            'measured_exponent', 'passed'}
    assert all(row['phase'] == '1' for row in rows)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_theorem_parts(seed):
    assert check_redundancy(12, 12, seed).all_passed()
    assert check_canonical_subspace(12, 12, seed).all_passed()
    projector = check_shared_projector(12, 12, seed)
    assert projector.all_passed()
    assert projector.min_score() >= -1e-8


def test_canonical_instance_relations():
    instance = synth_canonical_instance(seed=0)
    report = six_alignments(instance.conjugate_set())
    for relation in (Relation.GWA_A, Relation.RWA_B, Relation.GWA_B):
        assert report.score(relation) >= 1.0 - 1e-12


def test_collapse_metrics():
    model, dataset = build_collapse_model(classes=4, dim=8, zeta=2.0, margin=0.5, seed=3)
    report = nc_check(model, dataset, loss=LossKind.MSE)
    assert report.nc1 == pytest.approx(0.0, abs=1e-20)
    assert report.nc2 <= 1e-10
    assert report.nc3 == pytest.approx(1.0)
    assert report.nc4 == 1.0
    assert report.zeta == pytest.approx(2.0)
    assert report.zeta_deviation == pytest.approx(0.0, abs=1e-12)
    assert report.b_isotropy == pytest.approx(1.0)
    assert report.class_means.shape == (4, 8)
    for relation, score in report.alignments.side_scores('a').items():
        assert score >= 1.0 - 1e-12, relation


def test_collapse_metrics_with_default_loss():
    model, dataset = build_collapse_model(seed=2)
    report = nc_check(model, dataset)
    assert report.nc1 == pytest.approx(0.0, abs=1e-20)
    assert report.nc4 == 1.0
    assert report.zeta == pytest.approx(2.0)
    assert report.class_means.shape == (4, 8)


def test_mse_without_targets_uses_one_hot_labels():
    model, dataset = build_collapse_model(seed=2)
    bare = LabeledDataset(x=dataset.x, labels=dataset.labels)
    report = nc_check(model, bare, loss=LossKind.MSE)
    assert report.nc4 == 1.0
    assert report.b_isotropy is not None


@pytest.mark.parametrize("seed", range(5))
def test_random_model_is_not_collapsed(seed):
    model = init_mlp([10, 64, 4], activation=Activation.TANH, bias=False, seed=seed)
    rng = np.random.default_rng([seed, 1])
    labels = np.tile(np.arange(4), 50)
    report = nc_check(model, LabeledDataset(x=rng.standard_normal((labels.size, 10)), labels=labels))
    assert report.nc1 > 5.0
    assert report.nc3 < 0.3


def test_collapse_model_needs_room():
    with pytest.raises(ShapeError):
        build_collapse_model(classes=5, dim=4)


@pytest.mark.parametrize("layer", [0, 1])
def test_feature_ansatz_forms_coincide_with_isotropic_output_moment(layer):
    model, dataset = build_collapse_model(classes=4, dim=8, seed=1)
    record = forward_capture(model, dataset.x)
    tapes = backward_capture(model, record, dataset.targets, LossKind.MSE)
    report = nfa_check(model, record, tapes, layer)
    assert report.b_isotropy >= 1.0 - 1e-8
    assert report.alpha_nfa >= 1.0 - 1e-8
    assert report.alpha_enfa_backward >= 1.0 - 1e-8
    assert report.alpha_enfa_forward >= 1.0 - 1e-8


def _linear_model(seed=0):
    rng = np.random.default_rng(seed)
    model = MlpModel(layers=[DenseLayer(weight=rng.standard_normal((3, 5)))], activation=Activation.IDENTITY)
    return model, rng


EPS = np.logspace(-6, -3, 7)


def test_invariance_slope_two_at_minimum():
    model, rng = _linear_model()
    x = rng.standard_normal((20, 5))
    targets = forward_capture(model, x).prediction
    direction = rng.standard_normal(5)
    direction /= np.linalg.norm(direction)
    report = invariance_check(model, x, targets, LossKind.MSE, 0, direction, EPS)
    assert report.slope == pytest.approx(2.0, abs=1e-3)
    assert report.r2 == pytest.approx(1.0, abs=1e-6)
    assert not report.kernel_direction


def test_invariance_slope_one_away_from_minimum():
    model, rng = _linear_model()
    x = rng.standard_normal((20, 5))
    targets = rng.standard_normal((20, 3))
    direction = rng.standard_normal(5)
    direction /= np.linalg.norm(direction)
    report = invariance_check(model, x, targets, LossKind.MSE, 0, direction, EPS)
    assert report.slope == pytest.approx(1.0, abs=0.05)


def test_kernel_direction_leaves_loss_unchanged():
    model, rng = _linear_model()
    _, _, vt = np.linalg.svd(model.layers[0].weight)
    direction = vt[-1]
    x = rng.standard_normal((20, 5))
    x -= np.outer(x @ direction, direction)
    targets = rng.standard_normal((20, 3))
    report = invariance_check(model, x, targets, LossKind.MSE, 0, direction, EPS)
    assert report.kernel_direction
    assert np.max(report.deviations) < 1e-12


def test_invariance_rejects_bad_arguments():
    model, rng = _linear_model()
    x = rng.standard_normal((4, 5))
    targets = np.zeros((4, 3))
    with pytest.raises(ValueError):
        invariance_check(model, x, targets, LossKind.MSE, 0, np.ones(5), EPS)
    with pytest.raises(ValueError):
        invariance_check(model, x, targets, LossKind.MSE, 0, np.eye(5)[0], [1e-3, 1e-2])
    with pytest.raises(ValueError):
        invariance_check(model, x, targets, LossKind.MSE, 1, np.eye(5)[0], EPS)
    with pytest.raises(ShapeError):
        invariance_check(model, x, targets, LossKind.MSE, 0, np.eye(4)[0], EPS)
