import csv
import logging
import math
from pathlib import Path

import numpy as np

from crhlab.phasemodel.table_phase_model import Relation
from crhlab.runner.analysis import LayerAnalysis

logger = logging.getLogger(__name__)

SCORE_COLUMNS = ('HG_a', 'HZ_a', 'GZ_a', 'HG_b', 'HZ_b', 'GZ_b')
SCORE_RELATIONS = dict(zip(SCORE_COLUMNS, (Relation.RGA_A, Relation.RWA_A, Relation.GWA_A,
                                           Relation.RGA_B, Relation.RWA_B, Relation.GWA_B)))

ALIGNMENT_COLUMNS = ('step', 'layer', 'mode') + SCORE_COLUMNS + ('cross_f', 'cross_b', 'effective_rank')
PHASE_COLUMNS = ('step', 'layer', 'phase', 'held', 'near_redundant', 'projector_a', 'projector_b',
                 'law_a', 'law_b', 'min_power_alpha')
FDT_COLUMNS = ('step', 'layer', 'direction', 'relative_residual', 'learning_norm', 'regularization_norm',
               'noise_norm', 'c_neg', 'c_pos', 'fit_residual', 'violation', 'balance_alpha', 'balance_rel_err')
PAH_COLUMNS = ('step', 'layer', 'side', 'pair', 'exponent', 'r2', 'n_pairs', 'in_band')
STATIONARITY_COLUMNS = ('step', 'layer', 'h_a', 'g_a', 'z_a', 'h_b', 'g_b', 'z_b')
LOSS_COLUMNS = ('step', 'train_loss', 'eval_loss')

TABLES = {
    'alignments.csv': ALIGNMENT_COLUMNS,
    'phases.csv': PHASE_COLUMNS,
    'fdt.csv': FDT_COLUMNS,
    'pah.csv': PAH_COLUMNS,
    'stationarity.csv': STATIONARITY_COLUMNS,
    'losses.csv': LOSS_COLUMNS,
}


def format_cell(value) -> str:
    """Floats by repr (exact round trip), None as empty, booleans as true/false."""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def parse_float(text: str) -> float:
    return float(text) if text not in ('', None) else math.nan


def _law_text(law) -> str | None:
    if law is None:
        return None
    return f"{law.h}:{law.z}:{law.g}"


def alignment_row(item: LayerAnalysis) -> dict:
    report = item.alignment
    row = {'step': item.step, 'layer': item.layer_index, 'mode': report.moment_mode.value}
    row.update({column: report.score(relation) for column, relation in SCORE_RELATIONS.items()})
    row.update({'cross_f': report.cross_f, 'cross_b': report.cross_b, 'effective_rank': item.effective_rank})
    return row


def phase_row(item: LayerAnalysis) -> dict:
    label = item.phase
    return {'step': item.step, 'layer': item.layer_index, 'phase': label.phase.label,
            'held': label.held_labels(), 'near_redundant': label.near_redundant,
            'projector_a': label.projector('a'), 'projector_b': label.projector('b'),
            'law_a': _law_text(label.predicted('a')), 'law_b': _law_text(label.predicted('b')),
            'min_power_alpha': item.min_power_alpha}


def fdt_rows(item: LayerAnalysis) -> list[dict]:
    rows = []
    pairs = ((item.fdt_forward, item.balance.alpha_f, item.balance.rel_err_f),
             (item.fdt_backward, item.balance.alpha_b, item.balance.rel_err_b))
    for report, alpha, rel_err in pairs:
        rows.append({'step': item.step, 'layer': item.layer_index, 'direction': report.direction.value,
                     'relative_residual': report.relative_residual, 'learning_norm': report.learning_norm,
                     'regularization_norm': report.regularization_norm, 'noise_norm': report.noise_norm,
                     'c_neg': report.constants[0], 'c_pos': report.constants[1],
                     'fit_residual': report.constant_fit_residual, 'violation': report.violation,
                     'balance_alpha': alpha, 'balance_rel_err': rel_err})
    return rows


def pah_rows(item: LayerAnalysis) -> list[dict]:
    return [{'step': item.step, 'layer': item.layer_index, 'side': entry.side, 'pair': entry.pair_label,
             'exponent': entry.exponent, 'r2': entry.r2, 'n_pairs': entry.n_pairs, 'in_band': entry.in_band}
            for entry in item.pah]


def stationarity_row(item: LayerAnalysis) -> dict | None:
    residual = item.stationarity
    if residual is None:
        return None
    row = {'step': item.step, 'layer': item.layer_index}
    row.update(zip(STATIONARITY_COLUMNS[2:], residual.values()))
    return row


class RunTables:
    """The append-only CSV files of one run directory."""

    def __init__(self, run_dir):
        self.run_dir = Path(run_dir)

    def path(self, name: str) -> Path:
        return self.run_dir / name

    def reset(self):
        for name, columns in TABLES.items():
            with open(self.path(name), 'w', newline='', encoding='utf-8') as handle:
                csv.writer(handle, lineterminator='\n').writerow(columns)

    def _append(self, name: str, rows: list[dict]):
        if not rows:
            return
        with open(self.path(name), 'a', newline='', encoding='utf-8') as handle:
            writer = csv.DictWriter(handle, fieldnames=TABLES[name], lineterminator='\n')
            for row in rows:
                writer.writerow({key: format_cell(value) for key, value in row.items()})

    def append(self, step: int, train_loss: float, eval_loss: float, analyses: list[LayerAnalysis]):
        self._append('alignments.csv', [alignment_row(item) for item in analyses])
        self._append('phases.csv', [phase_row(item) for item in analyses])
        self._append('fdt.csv', [row for item in analyses for row in fdt_rows(item)])
        self._append('pah.csv', [row for item in analyses for row in pah_rows(item)])
        self._append('stationarity.csv', [row for row in map(stationarity_row, analyses) if row is not None])
        self._append('losses.csv', [{'step': step, 'train_loss': train_loss, 'eval_loss': eval_loss}])

    def read(self, name: str) -> list[dict]:
        with open(self.path(name), 'r', newline='', encoding='utf-8') as handle:
            return list(csv.DictReader(handle))
