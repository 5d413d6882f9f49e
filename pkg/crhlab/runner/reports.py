import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from crhlab.crherrors import InsufficientDataError
from crhlab.crhkit import PhaseLabel, classify_phase, rank_alignment_stats, six_alignments
from crhlab.linalg import eigh
from crhlab.probes import MomentMode
from crhlab.runner.analysis import LayerAnalysis, analyze_snapshot
from crhlab.runner.config import ExperimentConfig, config_from_dict
from crhlab.runner.snapshot import RunSnapshot, list_snapshots, load_snapshot, read_run_manifest
from crhlab.runner.tables import SCORE_COLUMNS, RunTables, alignment_row, format_cell, parse_float

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = (('run', 'weight_decay', 'batch_size', 'width', 'depth', 'phi_x', 'seed', 'layer', 'step')
                   + SCORE_COLUMNS
                   + ('phase', 'near_redundant', 'effective_rank', 'min_power_alpha', 'pah_exponent_b', 'pah_r2_b',
                      'fdt_forward', 'fdt_backward', 'train_loss', 'eval_loss'))
RANK_COLUMNS = ('scope', 'entries', 'rank_alpha_spearman', 'layer_alpha_spearman')
SPECTRA_KEYS = ('Ha', 'Ga', 'Za', 'Hb', 'Gb', 'Zb')


@dataclass(eq=False)
class RunRecord:
    """A completed run as read back from its directory."""
    run_dir: Path
    config: ExperimentConfig
    manifest: dict

    @property
    def name(self) -> str:
        return self.config.name

    def sort_key(self) -> tuple:
        train, model, task = self.config.train, self.config.model, self.config.task
        return (train.weight_decay, train.batch_size, model.width, model.depth, task.phi_x, self.name)


def load_run(run_dir) -> RunRecord:
    run_dir = Path(run_dir)
    manifest = read_run_manifest(run_dir)
    if manifest is None:
        raise FileNotFoundError(f"{run_dir}: no run manifest")
    return RunRecord(run_dir=run_dir, config=config_from_dict(manifest['config']), manifest=manifest)


def final_analysis(record: RunRecord) -> tuple[RunSnapshot, list[LayerAnalysis]]:
    paths = list_snapshots(record.run_dir)
    if not paths:
        raise InsufficientDataError(f"{record.run_dir}: no snapshots")
    previous = load_snapshot(paths[-2]) if len(paths) > 1 else None
    final = load_snapshot(paths[-1])
    return final, analyze_snapshot(final, record.config, previous)


def _pah_hg_b(item: LayerAnalysis):
    for entry in item.pah:
        if entry.side == 'b' and entry.pair == ('H', 'G'):
            return entry
    return None


def summary_rows(record: RunRecord, snapshot: RunSnapshot, analyses: list[LayerAnalysis]) -> list[dict]:
    config = record.config
    rows = []
    for item in analyses:
        scores = alignment_row(item)
        pah = _pah_hg_b(item)
        row = {'run': record.name, 'weight_decay': config.train.weight_decay,
               'batch_size': config.train.batch_size, 'width': config.model.width, 'depth': config.model.depth,
               'phi_x': config.task.phi_x, 'seed': config.train.seed, 'layer': item.layer_index,
               'step': item.step}
        row.update({column: scores[column] for column in SCORE_COLUMNS})
        row.update({'phase': item.phase.phase.label, 'near_redundant': item.phase.near_redundant,
                    'effective_rank': item.effective_rank, 'min_power_alpha': item.min_power_alpha,
                    'pah_exponent_b': None if pah is None else pah.exponent,
                    'pah_r2_b': None if pah is None else pah.r2,
                    'fdt_forward': item.fdt_forward.relative_residual,
                    'fdt_backward': item.fdt_backward.relative_residual,
                    'train_loss': snapshot.train_loss, 'eval_loss': snapshot.eval_loss})
        rows.append(row)
    return rows


def _spearman(pairs) -> float | None:
    pairs = [pair for pair in pairs if pair[1] is not None]
    try:
        return rank_alignment_stats(pairs)
    except InsufficientDataError:
        return None


def rank_rows(summary: list[dict]) -> list[dict]:
    """
    Spearman correlation of effective rank and of layer index with the final H_a/G_a
    alignment, per run and pooled over all runs and layers.
    """
    scopes = {}
    for row in summary:
        scopes.setdefault(row['run'], []).append(row)
    scopes['all'] = summary
    rows = []
    for scope, members in scopes.items():
        rows.append({'scope': scope, 'entries': len(members),
                     'rank_alpha_spearman': _spearman((row['effective_rank'], row['HG_a']) for row in members),
                     'layer_alpha_spearman': _spearman((row['layer'], row['HG_a']) for row in members)})
    return rows


def _write_csv(path: Path, columns, rows: list[dict]):
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.DictWriter(handle, fieldnames=columns, lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({key: format_cell(value) for key, value in row.items()})


def _dat_value(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return 'NaN'
    return format_cell(value)


def write_spectra(out_dir: Path, record: RunRecord, snapshot: RunSnapshot) -> list[Path]:
    """Raw eigen-spectra of the six conjugate matrices per layer, descending, one column each."""
    folder = out_dir / 'spectra'
    folder.mkdir(parents=True, exist_ok=True)
    paths = []
    for conj in snapshot.sets[MomentMode.RAW]:
        spectra = [eigh(matrix).eigenvalues for matrix in (conj.H_a, conj.G_a, conj.Z_a,
                                                            conj.H_b, conj.G_b, conj.Z_b)]
        length = max(len(values) for values in spectra)
        path = folder / f"{record.name}-layer-{conj.layer_index}.dat"
        lines = ['# index ' + ' '.join(SPECTRA_KEYS)]
        for index in range(length):
            cells = [_dat_value(float(values[index])) if index < len(values) else 'NaN' for values in spectra]
            lines.append(' '.join([str(index + 1)] + cells))
        path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
        paths.append(path)
    return paths


def write_alpha_steps(out_dir: Path, record: RunRecord) -> Path:
    """Alignment scores against step, one gnuplot index block per layer."""
    folder = out_dir / 'alpha_steps'
    folder.mkdir(parents=True, exist_ok=True)
    rows = RunTables(record.run_dir).read('alignments.csv')
    layers = sorted({int(row['layer']) for row in rows})
    lines = ['# step ' + ' '.join(SCORE_COLUMNS)]
    for layer in layers:
        lines.append(f"# layer {layer}")
        for row in rows:
            if int(row['layer']) == layer:
                lines.append(' '.join([row['step']] + [_dat_value(parse_float(row[c])) for c in SCORE_COLUMNS]))
        lines.extend(['', ''])
    path = folder / f"{record.name}.dat"
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return path


def write_alpha_gamma(out_dir: Path, summary: list[dict]) -> Path:
    layers = sorted({row['layer'] for row in summary})
    lines = ['# weight_decay ' + ' '.join(SCORE_COLUMNS)]
    for layer in layers:
        lines.append(f"# layer {layer}")
        for row in sorted((r for r in summary if r['layer'] == layer), key=lambda r: r['weight_decay']):
            lines.append(' '.join([_dat_value(row['weight_decay'])] + [_dat_value(row[c]) for c in SCORE_COLUMNS]))
        lines.extend(['', ''])
    path = out_dir / 'alpha_gamma.dat'
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return path


def _script(output: str, xlabel: str, ylabel: str, plots: list[str], logscale: str = '') -> str:
    lines = ["set terminal pngcairo size 900,650", f"set output '{output}'",
             f"set xlabel '{xlabel}'", f"set ylabel '{ylabel}'", "set key outside right"]
    if logscale:
        lines.append(f"set logscale {logscale}")
    lines.append('plot ' + ', \\\n     '.join(plots))
    return '\n'.join(lines) + '\n'


def write_scripts(out_dir: Path, spectra: list[Path], steps: list[Path], depth_by_run: dict[str, int],
                  layers: list[int]) -> list[Path]:
    """Gnuplot scripts for the spectra pairs, alpha against step and alpha against weight decay."""
    scripts = []

    plots = [f"'spectra/{path.name}' using 6:5 with linespoints title '{path.stem}'" for path in spectra]
    if plots:
        path = out_dir / 'spectra.gp'
        path.write_text(_script('spectra.png', 'eigenvalue of G_b', 'eigenvalue of H_b', plots, 'xy'),
                        encoding='utf-8')
        scripts.append(path)

    plots = []
    for path in steps:
        for layer in range(depth_by_run[path.stem]):
            plots.append(f"'alpha_steps/{path.name}' index {layer} using 1:2 with lines "
                         f"title '{path.stem} layer {layer}'")
    if plots:
        path = out_dir / 'alpha_steps.gp'
        path.write_text(_script('alpha_steps.png', 'step', 'alpha(H_a, G_a)', plots), encoding='utf-8')
        scripts.append(path)

    plots = [f"'alpha_gamma.dat' index {index} using 1:2 with linespoints title 'layer {layer}'"
             for index, layer in enumerate(layers)]
    path = out_dir / 'alpha_gamma.gp'
    path.write_text(_script('alpha_gamma.png', 'weight decay', 'alpha(H_a, G_a)', plots, 'x'), encoding='utf-8')
    scripts.append(path)
    return scripts


def emit_report(run_dirs, out_dir, render: bool = False) -> Path:
    """
    Cross-run summary of completed runs: summary.csv (final scores per layer, ordered by
    weight decay, batch size, width, depth, phi_x, name and layer), rank_stats.csv,
    spectra and alignment data files with gnuplot scripts, and PNG figures when render is set.
    Everything is recomputed from the persisted snapshots.
    """
    run_dirs = list(run_dirs)
    if not run_dirs:
        raise InsufficientDataError("no run directories given")
    records = []
    for run_dir in run_dirs:
        record = load_run(run_dir)
        if record.manifest.get('status') != 'complete':
            logger.warning("skipping %s: status %s", run_dir, record.manifest.get('status'))
            continue
        records.append(record)
    if not records:
        raise InsufficientDataError("no completed runs among the given directories")
    records.sort(key=RunRecord.sort_key)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary, spectra, steps = [], [], []
    finals = {}
    for record in records:
        snapshot, analyses = final_analysis(record)
        summary.extend(summary_rows(record, snapshot, analyses))
        spectra.extend(write_spectra(out_dir, record, snapshot))
        steps.append(write_alpha_steps(out_dir, record))
        finals[record.name] = snapshot

    _write_csv(out_dir / 'summary.csv', SUMMARY_COLUMNS, summary)
    _write_csv(out_dir / 'rank_stats.csv', RANK_COLUMNS, rank_rows(summary))
    write_alpha_gamma(out_dir, summary)
    layers = sorted({row['layer'] for row in summary})
    write_scripts(out_dir, spectra, steps, {name: snap.depth for name, snap in finals.items()}, layers)
    logger.info("report for %d run(s) written to %s", len(records), out_dir)

    if render:
        from crhlab.runner.plots import render_report
        alignments = {record.name: RunTables(record.run_dir).read('alignments.csv') for record in records}
        render_report(out_dir, summary, finals, alignments)
    return out_dir


def phase_scan(run_dir, tau: float | None = None) -> list[PhaseLabel]:
    """Phase labels of every layer at every snapshot, reclassified at threshold tau."""
    record = load_run(run_dir)
    settings = record.config.analysis
    tau = settings.tau if tau is None else tau
    mode = record.config.probe.moment_mode
    labels = []
    for path in list_snapshots(record.run_dir):
        snapshot = load_snapshot(path)
        for layer in range(snapshot.depth):
            report = six_alignments(snapshot.layer_set(layer, mode), step=snapshot.step)
            labels.append(classify_phase(report, tau, settings.near_margin))
    return labels


def stack_scores(rows: list[dict]) -> np.ndarray:
    return np.array([[parse_float(row[column]) for column in SCORE_COLUMNS] for row in rows])
