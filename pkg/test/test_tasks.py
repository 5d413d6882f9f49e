import numpy as np
import pytest

from crhlab.crherrors import ChecksumError, NonFiniteError, ShapeError
from crhlab.tasks import (BLOCK_SIZE, EVAL_STREAM, ClassBlobSpec, InputMixSpec, TeacherNet, TeacherSpec,
                          class_blob_sample, dump_dataset, gaussian_rows, mixed_input_sample,
                          mixed_teacher_sample, teacher_sample)
from crhlab.utils.matrix_store import BLOCKS_FILE, read_blocks, write_blocks


def test_zero_readout_gives_zero_labels():
    net = TeacherSpec(input_dim=6, units=5, seed=2).build()
    silent = TeacherNet(weight=net.weight, bias=net.bias, readout=np.zeros_like(net.readout))
    _, y = teacher_sample(silent, 50, seed=0)
    assert np.all(y == 0.0)


def test_teacher_shapes():
    x, y = teacher_sample(TeacherSpec(input_dim=8, units=6, output_dim=3), 10, seed=1)
    assert x.shape == (10, 8)
    assert y.shape == (10, 3)


def test_sample_stream_is_partition_invariant():
    spec = TeacherSpec(input_dim=4, units=3)
    x, y = teacher_sample(spec, 3000, seed=5)
    x1, y1 = teacher_sample(spec, 1000, seed=5)
    x2, y2 = teacher_sample(spec, 2000, seed=5, start=1000)
    assert np.array_equal(x, np.vstack([x1, x2]))
    assert np.array_equal(y, np.vstack([y1, y2]))


def test_streams_and_seeds_differ():
    train = gaussian_rows(0, 0, 0, 5, 3)
    assert not np.array_equal(train, gaussian_rows(0, EVAL_STREAM, 0, 5, 3))
    assert not np.array_equal(train, gaussian_rows(1, 0, 0, 5, 3))
    assert np.array_equal(gaussian_rows(0, 0, BLOCK_SIZE - 2, 4, 3)[2:], gaussian_rows(0, 0, BLOCK_SIZE, 2, 3))


def test_gaussian_rows_rejects_negative_start():
    with pytest.raises(ValueError):
        gaussian_rows(0, 0, -1, 3, 2)


def test_bad_teacher_dims():
    with pytest.raises(ShapeError):
        TeacherSpec(input_dim=0).build()


def test_identity_mix_keeps_isotropic_inputs():
    mix = InputMixSpec(phi_x=1.0, input_dim=10)
    assert np.array_equal(mix.mixing_matrix(), np.eye(10))
    x = mixed_input_sample(mix, 20000, seed=3)
    assert np.max(np.abs(np.cov(x.T) - np.eye(10))) < 0.05


def test_mixing_matrix():
    mix = InputMixSpec(phi_x=0.5, input_dim=12, p=0.8, seed=4)
    z = (mix.mixing_matrix() - 0.5 * np.eye(12)) / 0.5
    assert set(np.unique(z)) <= {0.0, 1.0}
    assert np.array_equal(z, mix.zero_one())
    assert np.array_equal(InputMixSpec(phi_x=0.0, input_dim=12, seed=4).mixing_matrix(), mix.zero_one())


def test_mixed_teacher_labels_follow_mixed_inputs():
    mix = InputMixSpec(phi_x=0.3, input_dim=6)
    spec = TeacherSpec(input_dim=6, units=4, output_dim=2)
    x, y = mixed_teacher_sample(mix, spec, 20, seed=0)
    assert np.array_equal(x, mixed_input_sample(mix, 20, seed=0))
    assert np.allclose(y, spec.build().evaluate(x))


@pytest.mark.parametrize("values", [{'phi_x': 1.5}, {'phi_x': -0.1}, {'p': 2.0}])
def test_mix_spec_validation(values):
    with pytest.raises(ValueError):
        InputMixSpec(**values)


def test_blob_labels_are_balanced():
    spec = ClassBlobSpec(classes=4, input_dim=16)
    x, labels = class_blob_sample(spec, 25, seed=0)
    assert x.shape == (100, 16)
    assert np.array_equal(np.bincount(labels), [25, 25, 25, 25])


def test_blob_without_spread_sits_on_centers():
    spec = ClassBlobSpec(classes=3, input_dim=5, sigma=0.0)
    x, labels = class_blob_sample(spec, 4, seed=1)
    centers = spec.centers()
    assert np.allclose(x, centers[labels])
    assert np.allclose(centers @ centers.T, 9.0 * np.eye(3))


def test_blob_streams_differ():
    spec = ClassBlobSpec()
    train, _ = class_blob_sample(spec, 2, seed=0)
    held_out, _ = class_blob_sample(spec, 2, seed=0, stream=EVAL_STREAM)
    assert not np.array_equal(train, held_out)


@pytest.mark.parametrize("values, error", [
    ({'classes': 5, 'input_dim': 4}, ShapeError),
    ({'center_scale': 1.0, 'sigma': 0.5}, ValueError),
    ({'sigma': -1.0}, ValueError),
])
def test_blob_spec_validation(values, error):
    with pytest.raises(error):
        ClassBlobSpec(**values).centers()


def test_dataset_dump_round_trip(tmp_path):
    x, y = teacher_sample(TeacherSpec(input_dim=4, units=3), 7, seed=0)
    dump_dataset(tmp_path / 'data', x, y, task='teacher', seed=0)
    blocks, manifest = read_blocks(tmp_path / 'data')
    assert np.array_equal(blocks['X'], x)
    assert np.array_equal(blocks['Y'], y)
    assert manifest['dataset'] == {'task': 'teacher', 'seed': 0}


def test_corrupted_block_fails_checksum(tmp_path):
    write_blocks(tmp_path, {'A': np.eye(3)})
    path = tmp_path / BLOCKS_FILE
    data = bytearray(path.read_bytes())
    data[0] ^= 0xFF
    path.write_bytes(bytes(data))
    with pytest.raises(ChecksumError):
        read_blocks(tmp_path)
    blocks, _ = read_blocks(tmp_path, verify=False)
    assert blocks['A'].shape == (3, 3)


def test_non_finite_blocks_are_rejected(tmp_path):
    with pytest.raises(NonFiniteError):
        write_blocks(tmp_path, {'A': np.array([[np.inf]])})
