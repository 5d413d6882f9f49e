import dataclasses
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

import yaml

from crhlab.crherrors import ConfigError
from crhlab.netcore import Activation, LossKind, OptimizerKind, TrainConfig
from crhlab.probes import MomentMode

logger = logging.getLogger(__name__)

TASK_KINDS = ('teacher', 'mixed-teacher', 'class-blob')


@dataclass(frozen=True)
class TaskConfig:
    kind: str
    input_dim: int = 100
    units: int = 100
    output_dim: int = 1
    phi_x: float = 1.0
    mix_p: float = 0.8
    classes: int = 4
    sigma: float = 0.5
    center_scale: float = 3.0
    train_per_class: int = 250
    seed: int = 0


@dataclass(frozen=True)
class ModelConfig:
    width: int
    depth: int
    activation: Activation = Activation.RELU
    bias: bool = True

    def dims(self, task: TaskConfig) -> list[int]:
        output = task.classes if task.kind == 'class-blob' else task.output_dim
        return [task.input_dim] + [self.width] * self.depth + [output]


@dataclass(frozen=True)
class ProbeConfig:
    snapshot_every: int = 0
    eval_samples: int = 3000
    holdout: bool = True
    moment_mode: MomentMode = MomentMode.CENTERED_NORMALIZED


@dataclass(frozen=True)
class AnalysisConfig:
    tau: float = 0.9
    near_margin: float = 0.05
    rel_tol: float = 1e-10
    rank_tol: float = 1e-6
    pah_k: int = 10


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    task: TaskConfig
    model: ModelConfig
    train: TrainConfig
    probe: ProbeConfig = field(default_factory=ProbeConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    sweep: dict[str, list] = field(default_factory=dict)
    output_dir: str = 'runs'

    @property
    def snapshot_every(self) -> int:
        return self.probe.snapshot_every or self.train.steps


# sweep axis -> (section, field)
SWEEP_AXES = {
    'weight_decay': ('train', 'weight_decay'),
    'batch_size': ('train', 'batch_size'),
    'learning_rate': ('train', 'learning_rate'),
    'width': ('model', 'width'),
    'depth': ('model', 'depth'),
    'phi_x': ('task', 'phi_x'),
    'seed': ('train', 'seed'),
}

REQUIRED = {
    'task': ('kind',),
    'model': ('width', 'depth'),
    'train': ('learning_rate', 'batch_size', 'steps'),
}


def _coerce(value, kind, path: str):
    if isinstance(kind, type) and issubclass(kind, Enum):
        if isinstance(value, kind):
            return value
        try:
            return kind.get_by_label(str(value))
        except ValueError as exc:
            raise ConfigError(path, str(exc)) from None
    if kind is bool:
        if isinstance(value, bool):
            return value
        raise ConfigError(path, f"expected true/false, got {value!r}")
    if kind is int:
        if isinstance(value, bool):
            raise ConfigError(path, f"expected an integer, got {value!r}")
        try:
            number = float(value)
        except (TypeError, ValueError):
            raise ConfigError(path, f"expected an integer, got {value!r}") from None
        if not number.is_integer():
            raise ConfigError(path, f"expected an integer, got {value!r}")
        return int(number)
    if kind is float:
        if isinstance(value, bool):
            raise ConfigError(path, f"expected a number, got {value!r}")
        try:
            number = float(value)
        except (TypeError, ValueError):
            raise ConfigError(path, f"expected a number, got {value!r}") from None
        if not math.isfinite(number):
            raise ConfigError(path, "must be finite")
        return number
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(path, f"expected a string, got {value!r}")
        return value
    raise ConfigError(path, f"unsupported field type {kind}")


def _section(cls, data, path: str):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(path, "expected a mapping")
    known = {f.name: f for f in dataclasses.fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(f"{path}.{key}", "unknown key")
    for key in REQUIRED.get(path, ()):
        if key not in data:
            raise ConfigError(f"{path}.{key}", "missing required key")
    values = {key: _coerce(value, known[key].type, f"{path}.{key}") for key, value in data.items()}
    return cls(**values)


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError('<root>', "expected a mapping")
    sections = {'name', 'task', 'model', 'train', 'probe', 'analysis', 'sweep', 'output_dir'}
    for key in data:
        if key not in sections:
            raise ConfigError(key, "unknown key")
    for key in ('task', 'model', 'train'):
        if key not in data:
            raise ConfigError(key, "missing required section")

    task = _section(TaskConfig, data['task'], 'task')
    if task.kind not in TASK_KINDS:
        raise ConfigError('task.kind', f"must be one of {', '.join(TASK_KINDS)}")
    model = _section(ModelConfig, data['model'], 'model')
    if model.width <= 0 or model.depth < 0:
        raise ConfigError('model', "width must be positive and depth non-negative")
    train = _section(TrainConfig, data['train'], 'train')
    try:
        train.validate()
    except ValueError as exc:
        raise ConfigError('train', str(exc)) from None
    probe = _section(ProbeConfig, data.get('probe'), 'probe')
    analysis = _section(AnalysisConfig, data.get('analysis'), 'analysis')
    if not 0.0 < analysis.tau < 1.0:
        raise ConfigError('analysis.tau', "must be in (0, 1)")

    if probe.snapshot_every < 0:
        raise ConfigError('probe.snapshot_every', "must be non-negative")
    if probe.snapshot_every and train.steps % probe.snapshot_every != 0:
        raise ConfigError('probe.snapshot_every', f"must divide train.steps ({train.steps})")
    if probe.eval_samples <= 0:
        raise ConfigError('probe.eval_samples', "must be positive")

    sweep_data = data.get('sweep') or {}
    if not isinstance(sweep_data, dict):
        raise ConfigError('sweep', "expected a mapping of axis to list")
    sweep = {}
    for axis, values in sweep_data.items():
        if axis not in SWEEP_AXES:
            raise ConfigError(f"sweep.{axis}", "unknown sweep axis")
        if not isinstance(values, list) or not values:
            raise ConfigError(f"sweep.{axis}", "must be a non-empty list")
        section, name = SWEEP_AXES[axis]
        kind = {'task': TaskConfig, 'model': ModelConfig, 'train': TrainConfig}[section]
        field_type = {f.name: f.type for f in dataclasses.fields(kind)}[name]
        sweep[axis] = [_coerce(value, field_type, f"sweep.{axis}") for value in values]

    return ExperimentConfig(name=_coerce(data.get('name', 'run'), str, 'name'), task=task, model=model,
                            train=train, probe=probe, analysis=analysis, sweep=sweep,
                            output_dir=_coerce(data.get('output_dir', 'runs'), str, 'output_dir'))


def _plain(value):
    if isinstance(value, Enum):
        return value.value
    if dataclasses.is_dataclass(value):
        return {f.name: _plain(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {key: _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value


def config_to_dict(config: ExperimentConfig) -> dict:
    return _plain(config)


def dump_config(config: ExperimentConfig) -> str:
    return yaml.safe_dump(config_to_dict(config), sort_keys=False)


def parse_config(text: str) -> ExperimentConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError('<root>', f"invalid YAML: {exc}") from None
    return config_from_dict(data)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError('<file>', f"config file not found: {path}")
    return parse_config(path.read_text(encoding='utf-8'))


def preset_names() -> list[str]:
    folder = resources.files('crhlab').joinpath('presets')
    return sorted(item.name[:-len('.yaml')] for item in folder.iterdir() if item.name.endswith('.yaml'))


def load_preset(name: str) -> ExperimentConfig:
    resource = resources.files('crhlab').joinpath('presets', f'{name}.yaml')
    if not resource.is_file():
        raise ConfigError('<preset>', f"no preset named {name!r}; available: {', '.join(preset_names())}")
    return parse_config(resource.read_text(encoding='utf-8'))


def with_overrides(config: ExperimentConfig, seed: int | None = None, snapshot_every: int | None = None,
                   tau: float | None = None, output_dir: str | None = None) -> ExperimentConfig:
    data = config_to_dict(config)
    if seed is not None:
        data['train']['seed'] = seed
    if snapshot_every is not None:
        data['probe']['snapshot_every'] = snapshot_every
    if tau is not None:
        data['analysis']['tau'] = tau
    if output_dir is not None:
        data['output_dir'] = str(output_dir)
    return config_from_dict(data)
