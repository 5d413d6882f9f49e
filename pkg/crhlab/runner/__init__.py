from crhlab.runner.config import (TaskConfig, ModelConfig, ProbeConfig, AnalysisConfig, ExperimentConfig,
                                  config_from_dict, config_to_dict, dump_config, parse_config, load_config,
                                  load_preset, preset_names, with_overrides)
from crhlab.runner.snapshot import RunSnapshot, write_snapshot, load_snapshot, list_snapshots, latest_snapshot
from crhlab.runner.analysis import LayerAnalysis, analyze_layer, analyze_snapshot
from crhlab.runner.experiment import DataSource, RunDriver, RunResult, expand_sweep, train_run, run_experiment
from crhlab.runner.reports import emit_report, phase_scan

__all__ = [
    'TaskConfig', 'ModelConfig', 'ProbeConfig', 'AnalysisConfig', 'ExperimentConfig',
    'config_from_dict', 'config_to_dict', 'dump_config', 'parse_config', 'load_config',
    'load_preset', 'preset_names', 'with_overrides',
    'RunSnapshot', 'write_snapshot', 'load_snapshot', 'list_snapshots', 'latest_snapshot',
    'LayerAnalysis', 'analyze_layer', 'analyze_snapshot',
    'DataSource', 'RunDriver', 'RunResult', 'expand_sweep', 'train_run', 'run_experiment',
    'emit_report', 'phase_scan',
]
