import dataclasses
import hashlib
import itertools
import logging
import math
import platform
import re
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy
from tqdm import tqdm

import crhlab
from crhlab.crherrors import ConfigError, DivergedRunError, NonFiniteError
from crhlab.crhstatus import CRHStatus, CRHStatusType
from crhlab.netcore import (LossKind, MlpModel, OptimizerState, backward_capture, forward_capture, init_mlp,
                            loss_eval, optimizer_step)
from crhlab.probes import conjugate_sets
from crhlab.runner.analysis import analyze_snapshot
from crhlab.runner.config import SWEEP_AXES, ExperimentConfig, config_to_dict, dump_config
from crhlab.runner.snapshot import (MODES, SNAPSHOT_DIR, RunSnapshot, list_snapshots, load_snapshot,
                                    prune_incomplete, read_run_manifest, write_run_manifest, write_snapshot)
from crhlab.runner.tables import TABLES, RunTables
from crhlab.tasks import (EVAL_STREAM, TRAIN_STREAM, ClassBlobSpec, InputMixSpec, TeacherSpec, class_blob_sample,
                          mixed_teacher_sample, teacher_sample)
from crhlab.utils.uri_generator import URIGenerator

logger = logging.getLogger(__name__)

RUN_FORMAT = 'crhlab-run-1'
BLOB_EPOCH_STREAM = 23


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec='seconds')


def _token(value) -> str:
    text = repr(value) if isinstance(value, float) else str(value)
    return re.sub(r'[^A-Za-z0-9.+-]', '_', text)


def expand_sweep(config: ExperimentConfig) -> list[ExperimentConfig]:
    """One config per grid point of the sweep axes, axes in fixed order."""
    if not config.sweep:
        return [config]
    axes = [axis for axis in SWEEP_AXES if axis in config.sweep]
    points = []
    for values in itertools.product(*(config.sweep[axis] for axis in axes)):
        sections = {'task': config.task, 'model': config.model, 'train': config.train}
        for axis, value in zip(axes, values):
            section, name = SWEEP_AXES[axis]
            sections[section] = dataclasses.replace(sections[section], **{name: value})
        suffix = '-'.join(f"{axis}{_token(value)}" for axis, value in zip(axes, values))
        points.append(dataclasses.replace(config, name=f"{config.name}-{suffix}", sweep={}, **sections))
    return points


class DataSource:
    """
    Training batches and the probe set of one run. Batch k covers positions
    k*B .. (k+1)*B of the training stream, so the data cursor follows from the step.
    """

    def __init__(self, config: ExperimentConfig):
        self.config = config
        task, train = config.task, config.train
        self.seed = train.seed
        self.batch_size = train.batch_size
        self.loss = train.loss
        self.teacher = None
        self.mix = None
        self.blobs = None
        self._permutations: dict[int, np.ndarray] = {}

        if task.kind in ('teacher', 'mixed-teacher'):
            self.teacher = TeacherSpec(input_dim=task.input_dim, units=task.units, output_dim=task.output_dim,
                                       seed=task.seed).build()
            if task.kind == 'mixed-teacher':
                self.mix = InputMixSpec(phi_x=task.phi_x, input_dim=task.input_dim, p=task.mix_p, seed=task.seed)
        else:
            self.blobs = ClassBlobSpec(classes=task.classes, input_dim=task.input_dim, sigma=task.sigma,
                                       center_scale=task.center_scale, seed=task.seed)
            self.train_x, self.train_labels = class_blob_sample(self.blobs, task.train_per_class, self.seed)

    def cursor(self, step: int) -> int:
        return step * self.batch_size

    def _targets(self, labels: np.ndarray) -> np.ndarray:
        if self.loss is LossKind.CROSS_ENTROPY:
            return labels
        return np.eye(self.blobs.classes)[labels]

    def _stream(self, start: int, count: int, stream: int) -> tuple[np.ndarray, np.ndarray]:
        if self.mix is not None:
            return mixed_teacher_sample(self.mix, self.teacher, count, self.seed, start, stream)
        return teacher_sample(self.teacher, count, self.seed, start, stream)

    def _permutation(self, epoch: int) -> np.ndarray:
        if epoch not in self._permutations:
            rng = np.random.default_rng([self.seed, BLOB_EPOCH_STREAM, epoch])
            self._permutations = {epoch: rng.permutation(self.train_x.shape[0])}
        return self._permutations[epoch]

    def train_batch(self, step: int) -> tuple[np.ndarray, np.ndarray]:
        start = self.cursor(step)
        if self.blobs is None:
            return self._stream(start, self.batch_size, TRAIN_STREAM)
        n = self.train_x.shape[0]
        index = np.array([self._permutation(p // n)[p % n] for p in range(start, start + self.batch_size)])
        return self.train_x[index], self._targets(self.train_labels[index])

    def eval_set(self) -> tuple[np.ndarray, np.ndarray]:
        count = self.config.probe.eval_samples
        holdout = self.config.probe.holdout
        if self.blobs is None:
            return self._stream(0, count, EVAL_STREAM if holdout else TRAIN_STREAM)
        if not holdout:
            return self.train_x[:count], self._targets(self.train_labels[:count])
        per_class = math.ceil(count / self.blobs.classes)
        x, labels = class_blob_sample(self.blobs, per_class, self.seed, stream=EVAL_STREAM)
        return x[:count], self._targets(labels[:count])


def build_model(config: ExperimentConfig) -> MlpModel:
    return init_mlp(config.model.dims(config.task), config.model.activation, bias=config.model.bias,
                    seed=config.train.seed)


def _file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class RunDriver:
    """Training loop of one run with scheduled snapshots; one writer per run directory."""

    def __init__(self, config: ExperimentConfig, run_dir, progress: bool = False):
        self.config = config
        self.run_dir = Path(run_dir)
        self.progress = progress
        self.tables = RunTables(self.run_dir)
        self.source = DataSource(config)
        self.eval_x, self.eval_y = self.source.eval_set()
        self.config_text = dump_config(config)
        self.digest = URIGenerator.config_digest(self.config_text)

    def _manifest(self, status: str, started: str, **fields) -> dict:
        manifest = {
            'format': RUN_FORMAT,
            'name': self.config.name,
            'uri': URIGenerator.generate_uri(self.digest),
            'config_digest': self.digest,
            'seed': self.config.train.seed,
            'status': status,
            'started': started,
            'versions': {'crhlab': crhlab.__version__, 'numpy': np.__version__, 'scipy': scipy.__version__,
                         'python': platform.python_version()},
            'config': config_to_dict(self.config),
        }
        manifest.update(fields)
        return manifest

    def _checksums(self) -> dict:
        sums = {name: _file_digest(self.tables.path(name)) for name in TABLES}
        for path in list_snapshots(self.run_dir):
            sums[f"{SNAPSHOT_DIR}/{path.name}"] = _file_digest(path / 'manifest.yaml')
        return sums

    def _diverged(self, started: str, step: int, message: str):
        write_run_manifest(self.run_dir, self._manifest('diverged', started, diverged_step=step,
                                                        finished=_now(), message=message))
        raise DivergedRunError(self.run_dir, step, message)

    def snapshot(self, step: int, model: MlpModel, state: OptimizerState, train_loss: float,
                 previous: RunSnapshot | None, started: str) -> RunSnapshot:
        loss = self.config.train.loss
        try:
            record = forward_capture(model, self.eval_x)
        except NonFiniteError as exc:
            self._diverged(started, step, str(exc))
        evaluation = loss_eval(record.prediction, self.eval_y, loss)
        if not math.isfinite(evaluation.value):
            self._diverged(started, step, 'non-finite eval loss')
        tapes = backward_capture(model, record, self.eval_y, loss, evaluation)
        sets = {mode: conjugate_sets(model, tapes, mode) for mode in MODES}
        snap = RunSnapshot(step=step, sets=sets, model=model, optimizer=state, train_loss=train_loss,
                           eval_loss=evaluation.value, cursor=self.source.cursor(step))
        write_snapshot(self.run_dir, snap)
        analyses = analyze_snapshot(snap, self.config, previous)
        self.tables.append(step, train_loss, evaluation.value, analyses)
        logger.info("%s step %d: train loss %.6g, eval loss %.6g, phases %s", self.config.name, step,
                    train_loss, evaluation.value, ' '.join(item.phase.phase.label for item in analyses))
        return snap

    def rebuild(self) -> RunSnapshot | None:
        """Rewrite the CSV files from the persisted snapshots; returns the latest one."""
        self.tables.reset()
        previous = None
        for path in list_snapshots(self.run_dir):
            snap = load_snapshot(path)
            analyses = analyze_snapshot(snap, self.config, previous)
            self.tables.append(snap.step, snap.train_loss, snap.eval_loss, analyses)
            previous = snap
        return previous

    def _fresh(self):
        shutil.rmtree(self.run_dir / SNAPSHOT_DIR, ignore_errors=True)
        self.tables.reset()

    def run(self, resume: bool = True) -> CRHStatus:
        config = self.config
        self.run_dir.mkdir(parents=True, exist_ok=True)
        existing = read_run_manifest(self.run_dir)
        if existing is not None and resume:
            if existing.get('config_digest') != self.digest:
                raise ConfigError('output_dir', f"{self.run_dir} holds a run with a different configuration")
            if existing.get('status') == 'complete':
                logger.info("%s already complete", config.name)
                return CRHStatus()
            if existing.get('status') == 'diverged':
                raise DivergedRunError(self.run_dir, int(existing.get('diverged_step', 0)),
                                       existing.get('message', 'non-finite loss'))

        (self.run_dir / 'config.yaml').write_text(self.config_text, encoding='utf-8')
        started = existing.get('started', _now()) if existing is not None and resume else _now()
        prune_incomplete(self.run_dir)
        latest = self.rebuild() if resume else None

        if latest is None:
            self._fresh()
            write_run_manifest(self.run_dir, self._manifest('running', started))
            model = build_model(config)
            state = OptimizerState()
            x, y = self.source.train_batch(0)
            train_loss = loss_eval(forward_capture(model, x).prediction, y, config.train.loss).value
            latest = self.snapshot(0, model, state, train_loss, None, started)
        else:
            logger.info("%s resuming from step %d", config.name, latest.step)
            write_run_manifest(self.run_dir, self._manifest('running', started))

        model, state, previous = latest.model, latest.optimizer, latest
        every = config.snapshot_every
        steps = range(latest.step, config.train.steps)
        for step in tqdm(steps, desc=config.name, disable=not self.progress, leave=False):
            x, y = self.source.train_batch(step)
            try:
                record = forward_capture(model, x)
                evaluation = loss_eval(record.prediction, y, config.train.loss)
                if not math.isfinite(evaluation.value):
                    raise NonFiniteError('non-finite training loss')
                tapes = backward_capture(model, record, y, config.train.loss, evaluation)
                model = optimizer_step(model, tapes, config.train, state)
            except NonFiniteError as exc:
                logger.error("%s diverged at step %d: %s", config.name, step + 1, exc)
                self._diverged(started, step + 1, str(exc))
            if (step + 1) % every == 0:
                previous = self.snapshot(step + 1, model, state, evaluation.value, previous, started)

        write_run_manifest(self.run_dir, self._manifest('complete', started, finished=_now(),
                                                        checksums=self._checksums()))
        return CRHStatus()


def train_run(config: ExperimentConfig, run_dir=None, resume: bool = True, progress: bool = False) -> CRHStatus:
    if config.sweep:
        raise ConfigError('sweep', "train_run takes a single grid point; use run_experiment")
    run_dir = Path(config.output_dir) / config.name if run_dir is None else run_dir
    return RunDriver(config, run_dir, progress).run(resume)


@dataclass(frozen=True)
class RunResult:
    run_dir: Path
    status: CRHStatus


def _run_point(config: ExperimentConfig, resume: bool, progress: bool) -> RunResult:
    run_dir = Path(config.output_dir) / config.name
    try:
        status = train_run(config, run_dir, resume=resume, progress=progress)
    except DivergedRunError as exc:
        status = CRHStatus(CRHStatusType.DIVERGED, str(exc))
    return RunResult(run_dir=run_dir, status=status)


def run_experiment(config: ExperimentConfig, jobs: int = 1, resume: bool = True,
                   progress: bool = False) -> list[RunResult]:
    """
    Train every grid point of the config; each point writes its own directory
    output_dir/<name>. Points run in a process pool when jobs > 1.
    """
    points = expand_sweep(config)
    logger.info("%s: %d run(s), %d job(s)", config.name, len(points), jobs)
    if jobs <= 1 or len(points) == 1:
        return [_run_point(point, resume, progress) for point in points]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_run_point, point, resume, False) for point in points]
        return [future.result() for future in futures]
