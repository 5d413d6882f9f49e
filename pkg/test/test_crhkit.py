import dataclasses

import numpy as np
import pytest
from hypothesis import given, strategies as st

from crhlab.crherrors import InsufficientDataError
from crhlab.crhkit import (AlignmentReport, Direction, PhaseLabel, classify_phase, fdt_residual, feature_drift,
                           null_alignment, pah_scan, rank_alignment_stats, six_alignments, verify_power_law)
from crhlab.phasemodel.table_phase_model import PhaseType, Relation
from crhlab.probes import ConjugateSet, MomentMode, local_min_balance
from crhlab.theoremlab import synth_phase_instance

from conftest import random_psd


def _report(**scores):
    values = {relation: scores.get(relation.name) for relation in Relation}
    return AlignmentReport(layer_index=0, step=0, scores=values)


def _conj(rng, dim=4, **matrices):
    base = {name: random_psd(rng, dim) for name in ('H_a', 'G_a', 'Z_a', 'H_b', 'G_b', 'Z_b')}
    base.update(matrices)
    return ConjugateSet(layer_index=0, z_a=1.0, z_b=1.0, cross_f=np.zeros((dim, dim)),
                        cross_b=np.zeros((dim, dim)), moment_mode=MomentMode.RAW, **base)


def test_six_alignments_on_exact_instance():
    report = six_alignments(synth_phase_instance(PhaseType.CRH, seed=1).conjugate_set())
    assert len(report.scores) == 6
    assert all(score >= 1.0 - 1e-12 for score in report.scores.values())


def test_six_alignments_undefined_for_constant_matrix(rng):
    conj = _conj(rng, G_a=np.ones((4, 4)))
    report = six_alignments(conj)
    assert report.score(Relation.RGA_A) is None
    assert report.score(Relation.GWA_A) is None
    assert report.score(Relation.RWA_A) is not None


@pytest.mark.parametrize("scores, phase", [
    (dict(RGA_A=1.0, RWA_A=1.0, GWA_A=1.0, RGA_B=1.0, RWA_B=1.0, GWA_B=1.0), PhaseType.CRH),
    (dict(RGA_A=0.95, RWA_A=0.95, GWA_A=0.95, RGA_B=0.2, RWA_B=0.1, GWA_B=0.92), PhaseType.BACK_CRH),
    (dict(RGA_A=0.1, RWA_A=0.3, GWA_A=0.0, RGA_B=0.91, RWA_B=0.99, GWA_B=0.97), PhaseType.FORW_CRH),
    (dict(RGA_A=0.95, RWA_A=0.2, GWA_A=0.1, RGA_B=0.3, RWA_B=0.95, GWA_B=0.4), PhaseType.PHASE_4),
    (dict(RGA_A=0.2, RWA_A=0.2, GWA_A=0.93, RGA_B=0.3, RWA_B=0.95, GWA_B=0.4), PhaseType.PHASE_9),
    (dict(RGA_A=0.95, RWA_A=0.2, GWA_A=0.1, RGA_B=0.3, RWA_B=0.5, GWA_B=0.4), PhaseType.PARTIAL),
    (dict(RGA_A=0.5, RWA_A=0.2, GWA_A=None, RGA_B=-0.9, RWA_B=0.5, GWA_B=0.4), PhaseType.NONE),
])
def test_classify_phase(scores, phase):
    assert classify_phase(_report(**scores)).phase is phase


def test_third_relation_within_margin_completes_direction():
    report = _report(RGA_A=0.95, RWA_A=0.93, GWA_A=0.86, RGA_B=0.95, RWA_B=0.95, GWA_B=0.99)
    label = classify_phase(report)
    assert label.phase is PhaseType.CRH
    assert not label.near_redundant


def test_near_redundant_pair_uses_top_relation():
    report = _report(RGA_A=0.95, RWA_A=0.93, GWA_A=0.5, RGA_B=0.1, RWA_B=0.2, GWA_B=0.97)
    label = classify_phase(report)
    assert label.phase is PhaseType.PHASE_6
    assert label.near_redundant
    assert label.held == frozenset({Relation.RGA_A, Relation.RWA_A, Relation.GWA_B})
    assert label.held_labels() == "H_a~G_a;H_a~Z_a;G_b~Z_b"


def test_tau_changes_label():
    report = _report(RGA_A=0.85, RWA_A=0.2, GWA_A=0.1, RGA_B=0.88, RWA_B=0.2, GWA_B=0.1)
    assert classify_phase(report).phase is PhaseType.NONE
    assert classify_phase(report, tau=0.8).phase is PhaseType.PHASE_1


@pytest.mark.parametrize("tau", [0.0, 1.0, -0.5, 1.5])
def test_classify_phase_rejects_tau(tau):
    with pytest.raises(ValueError):
        classify_phase(_report(), tau=tau)


@pytest.mark.parametrize("phase", PhaseType.table_phases(), ids=lambda phase: phase.label)
def test_verify_power_law_on_exact_instances(phase):
    instance = synth_phase_instance(phase, seed=3)
    results = verify_power_law(instance.conjugate_set(), PhaseLabel.for_phase(phase))
    assert len(results) >= 3
    assert results.all_passed(), results.failures()
    for result in results:
        if result.exponent_error is not None:
            assert result.exponent_error < 0.05, result.label


def test_phase_8_forward_exponent():
    instance = synth_phase_instance(PhaseType.PHASE_8, seed=0)
    results = verify_power_law(instance.conjugate_set(), PhaseLabel.for_phase(PhaseType.PHASE_8))
    match = next(result for result in results if result.label == "H~_b ~ Z~_b^2")
    assert match.expected_exponent == 2.0
    assert match.measured_exponent == pytest.approx(2.0, abs=0.05)
    assert match.r2 == pytest.approx(1.0, abs=1e-6)


def test_crh_spectra_are_flat():
    instance = synth_phase_instance(PhaseType.CRH, seed=0)
    results = verify_power_law(instance.conjugate_set(), PhaseLabel.for_phase(PhaseType.CRH))
    assert len(results) == 6
    for result in results:
        assert result.expected_exponent == 1.0
        assert result.measured_exponent is None
        assert 'flat' in result.note
        assert result.score >= 1.0 - 1e-12


@given(phase=st.sampled_from(PhaseType.table_phases()), seed=st.integers(min_value=0, max_value=19),
       scales=st.lists(st.floats(min_value=0.01, max_value=100.0), min_size=6, max_size=6))
def test_classify_phase_ignores_positive_rescaling(phase, seed, scales):
    conj = synth_phase_instance(phase, seed=seed).conjugate_set()
    names = ('H_a', 'G_a', 'Z_a', 'H_b', 'G_b', 'Z_b')
    scaled = dataclasses.replace(conj, **{name: c * getattr(conj, name) for name, c in zip(names, scales)})
    label = classify_phase(six_alignments(conj))
    rescaled = classify_phase(six_alignments(scaled))
    assert rescaled.phase is label.phase
    assert rescaled.held == label.held


def test_verify_power_law_needs_table_phase(rng):
    with pytest.raises(ValueError):
        verify_power_law(_conj(rng), PhaseLabel.for_phase(PhaseType.PARTIAL))


def test_fdt_forward_balance(rng):
    gamma, eta, z_b = 0.1, 0.05, 2.0
    conj = _conj(rng)
    cross_f = (2.0 * gamma * conj.H_b - eta * z_b ** 2 * conj.G_b) / (2.0 * z_b)
    conj = dataclasses.replace(conj, z_b=z_b, cross_f=cross_f)
    report = fdt_residual(conj, eta, gamma, Direction.FORWARD)
    assert report.relative_residual < 1e-12
    assert report.regularization_norm == pytest.approx(2.0 * gamma * np.linalg.norm(conj.H_b))


def test_fdt_backward_balance(rng):
    gamma, eta, z_a = 0.2, 0.01, 0.5
    conj = _conj(rng)
    cross_b = (2.0 * gamma * conj.G_a - eta * z_a ** 2 * conj.H_a) / (2.0 * z_a)
    conj = dataclasses.replace(conj, z_a=z_a, cross_b=cross_b)
    report = fdt_residual(conj, eta, gamma, Direction.BACKWARD)
    assert report.relative_residual < 1e-12
    assert report.direction is Direction.BACKWARD


def test_fdt_constants(rng):
    conj = _conj(rng)
    conj = dataclasses.replace(conj, Z_b=2.0 * conj.H_b - 0.5 * conj.G_b)
    report = fdt_residual(conj, 0.1, 0.0, Direction.FORWARD)
    assert report.constants == pytest.approx((0.5, 2.0))
    assert report.constant_fit_residual < 1e-10
    assert not report.violation

    violated = dataclasses.replace(conj, Z_b=conj.H_b + 0.5 * conj.G_b)
    assert fdt_residual(violated, 0.1, 0.0, Direction.FORWARD).violation


def test_fdt_rejects_bad_arguments(rng):
    conj = _conj(rng)
    with pytest.raises(ValueError):
        fdt_residual(conj, 0.0, 0.1, Direction.FORWARD)
    with pytest.raises(ValueError):
        fdt_residual(conj, 0.1, -0.1, Direction.FORWARD)
    with pytest.raises(ValueError):
        fdt_residual(dataclasses.replace(conj, moment_mode=MomentMode.CENTERED_NORMALIZED), 0.1, 0.1,
                     Direction.FORWARD)


def test_pah_scan_exponents():
    values = np.array([5.0, 4.0, 3.0, 2.0, 1.0])
    eye = np.eye(5)
    conj = ConjugateSet(layer_index=2, H_a=np.diag(values), G_a=np.diag(values ** 2), Z_a=np.diag(values ** 6),
                        H_b=eye, G_b=eye, Z_b=eye, z_a=1.0, z_b=1.0, cross_f=eye, cross_b=eye)
    entries = {entry.pair_label: entry for entry in pah_scan(conj)}
    assert len(entries) == 6
    assert entries['H_a:G_a'].exponent == pytest.approx(0.5)
    assert entries['H_a:G_a'].in_band
    assert entries['H_a:Z_a'].exponent == pytest.approx(1.0 / 6.0)
    assert not entries['H_a:Z_a'].in_band
    assert entries['G_a:Z_a'].exponent == pytest.approx(1.0 / 3.0)
    assert entries['H_b:G_b'].exponent is None
    assert entries['H_b:G_b'].in_band is None
    assert entries['H_a:G_a'].n_pairs == 5


def test_rank_alignment_stats():
    assert rank_alignment_stats([(1, 0.1), (2, 0.3), (3, 0.2), (4, 0.5), (5, 0.9)]) == pytest.approx(0.9)
    assert rank_alignment_stats([(5, 0.1), (4, 0.3), (3, 0.4), (2, 0.5), (1, 0.9)]) == pytest.approx(-1.0)
    assert rank_alignment_stats([(3, 0.1), (3, 0.3), (3, 0.4), (3, 0.5), (3, 0.9)]) == 0.0
    with pytest.raises(InsufficientDataError):
        rank_alignment_stats([(1, 0.1), (2, 0.3), (3, 0.2), (4, 0.5)])


def test_feature_drift_against_itself():
    conj = synth_phase_instance(PhaseType.PHASE_8, seed=0).conjugate_set()
    assert all(value == pytest.approx(1.0) for value in feature_drift(conj, conj).values())


def test_null_alignment_is_deterministic():
    first = null_alignment(20, seed=5, trials=40)
    second = null_alignment(20, seed=5, trials=40)
    assert first == second
    assert first.dim == 20
    assert -1.0 <= first.mean <= 1.0
    assert 0.0 < first.std
    assert first.max_abs <= 1.0


NULL_DIM = 50
NULL_DOF = 3


def _null_conj(seed):
    rng = np.random.default_rng(seed)
    matrices = {name: random_psd(rng, NULL_DIM, NULL_DOF) for name in ('H_a', 'G_a', 'Z_a', 'H_b', 'G_b', 'Z_b')}
    return ConjugateSet(layer_index=0, z_a=1.0, z_b=1.0, cross_f=random_psd(rng, NULL_DIM, NULL_DOF),
                        cross_b=random_psd(rng, NULL_DIM, NULL_DOF), moment_mode=MomentMode.RAW, **matrices)


def test_independent_wishart_matrices_do_not_align():
    assert null_alignment(NULL_DIM, seed=0, trials=100, dof=NULL_DOF).max_abs < 0.3
    for seed in range(100):
        scores = six_alignments(_null_conj(seed)).scores.values()
        assert all(abs(score) < 0.3 for score in scores), seed


def test_local_min_balance_under_null():
    for seed in range(100):
        check = local_min_balance(_null_conj(seed), gamma=0.1)
        assert abs(check.alpha_f) < 0.3, seed
        assert abs(check.alpha_b) < 0.3, seed
