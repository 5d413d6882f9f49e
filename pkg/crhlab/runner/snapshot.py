import logging
import os
import shutil
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from crhlab.netcore import Activation, DenseLayer, MlpModel, OptimizerState
from crhlab.probes import MATRIX_KEYS, ConjugateSet, MomentMode
from crhlab.utils.matrix_store import read_blocks, write_blocks

logger = logging.getLogger(__name__)

SNAPSHOT_DIR = 'snapshots'
PARTIAL_SUFFIX = '.partial'
RUN_MANIFEST = 'manifest.yaml'
MODES = (MomentMode.RAW, MomentMode.CENTERED_NORMALIZED)


def snapshot_name(step: int) -> str:
    return f"step-{step:08d}"


@dataclass(eq=False)
class RunSnapshot:
    """
    State of one run at one step: conjugate sets per layer in both moment modes,
    the model, the optimizer buffers and the data cursor.
    """
    step: int
    sets: dict[MomentMode, list[ConjugateSet]]
    model: MlpModel
    optimizer: OptimizerState
    train_loss: float
    eval_loss: float
    cursor: int = 0
    path: Path | None = None
    extra: dict = field(default_factory=dict)

    def layer_set(self, layer: int, mode: MomentMode) -> ConjugateSet:
        return self.sets[mode][layer]

    @property
    def depth(self) -> int:
        return self.model.depth


def _set_blocks(conj: ConjugateSet) -> dict[str, np.ndarray]:
    prefix = f"layer-{conj.layer_index}/{conj.moment_mode.value}"
    return {f"{prefix}/{key}": matrix for key, matrix in conj.matrices().items()}


def write_snapshot(run_dir, snapshot: RunSnapshot) -> Path:
    """
    Write the snapshot under snapshots/step-N. Blocks go to a .partial directory that
    is renamed into place once its manifest exists.
    """
    root = Path(run_dir) / SNAPSHOT_DIR
    final = root / snapshot_name(snapshot.step)
    partial = root / (snapshot_name(snapshot.step) + PARTIAL_SUFFIX)
    if partial.exists():
        shutil.rmtree(partial)

    blocks = {}
    scalars = []
    for mode in MODES:
        for conj in snapshot.sets[mode]:
            blocks.update(_set_blocks(conj))
            scalars.append(conj.scalars())
    for index, layer in enumerate(snapshot.model.layers):
        blocks[f"model/layer-{index}/weight"] = layer.weight
        if layer.has_bias:
            blocks[f"model/layer-{index}/bias"] = layer.bias
    for index, buffers in enumerate(snapshot.optimizer.buffers):
        for name in sorted(buffers):
            blocks[f"optim/layer-{index}/{name}"] = buffers[name]

    extra = {
        'step': int(snapshot.step),
        'train_loss': float(snapshot.train_loss),
        'eval_loss': float(snapshot.eval_loss),
        'cursor': int(snapshot.cursor),
        'optimizer_step': int(snapshot.optimizer.step),
        'activation': snapshot.model.activation.value,
        'depth': snapshot.model.depth,
        'sets': scalars,
    }
    extra.update(snapshot.extra)
    write_blocks(partial, blocks, extra)
    if final.exists():
        shutil.rmtree(final)
    os.replace(partial, final)
    snapshot.path = final
    return final


def load_snapshot(path, verify: bool = True) -> RunSnapshot:
    path = Path(path)
    blocks, manifest = read_blocks(path, verify=verify)
    depth = int(manifest['depth'])

    sets = {mode: [None] * depth for mode in MODES}
    for scalars in manifest['sets']:
        mode = MomentMode.get_by_label(scalars['moment_mode'])
        layer = int(scalars['layer_index'])
        prefix = f"layer-{layer}/{mode.value}"
        matrices = {key: blocks[f"{prefix}/{key}"] for key in MATRIX_KEYS}
        sets[mode][layer] = ConjugateSet.from_parts(matrices, scalars)

    layers = []
    for index in range(depth):
        layers.append(DenseLayer(weight=blocks[f"model/layer-{index}/weight"],
                                 bias=blocks.get(f"model/layer-{index}/bias")))
    model = MlpModel(layers=layers, activation=Activation.get_by_label(manifest['activation']))

    state = OptimizerState(step=int(manifest['optimizer_step']))
    for key, matrix in blocks.items():
        if key.startswith('optim/'):
            _, layer_name, name = key.split('/')
            state.buffer(int(layer_name[len('layer-'):]), name, matrix.shape)[...] = matrix

    return RunSnapshot(step=int(manifest['step']), sets=sets, model=model, optimizer=state,
                       train_loss=float(manifest['train_loss']), eval_loss=float(manifest['eval_loss']),
                       cursor=int(manifest['cursor']), path=path)


def list_snapshots(run_dir) -> list[Path]:
    """Complete snapshot directories in step order."""
    root = Path(run_dir) / SNAPSHOT_DIR
    if not root.is_dir():
        return []
    found = [item for item in root.iterdir()
             if item.is_dir() and item.name.startswith('step-') and not item.name.endswith(PARTIAL_SUFFIX)]
    return sorted(found, key=lambda item: int(item.name[len('step-'):]))


def prune_incomplete(run_dir) -> int:
    """Remove snapshot directories left behind by an interrupted write."""
    root = Path(run_dir) / SNAPSHOT_DIR
    if not root.is_dir():
        return 0
    removed = 0
    for item in root.iterdir():
        if item.is_dir() and item.name.endswith(PARTIAL_SUFFIX):
            logger.warning("removing incomplete snapshot %s", item)
            shutil.rmtree(item)
            removed += 1
    return removed


def latest_snapshot(run_dir) -> RunSnapshot | None:
    paths = list_snapshots(run_dir)
    if not paths:
        return None
    return load_snapshot(paths[-1])


def write_run_manifest(run_dir, data: dict) -> Path:
    path = Path(run_dir) / RUN_MANIFEST
    tmp = path.with_name(path.name + '.tmp')
    tmp.write_text(yaml.safe_dump(data, sort_keys=False), encoding='utf-8')
    os.replace(tmp, path)
    return path


def read_run_manifest(run_dir) -> dict | None:
    path = Path(run_dir) / RUN_MANIFEST
    if not path.is_file():
        return None
    return yaml.safe_load(path.read_text(encoding='utf-8'))
