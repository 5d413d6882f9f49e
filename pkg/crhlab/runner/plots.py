import logging
from pathlib import Path

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from crhlab.linalg import eigh  # noqa: E402
from crhlab.probes import MomentMode  # noqa: E402
from crhlab.runner.reports import stack_scores  # noqa: E402
from crhlab.runner.snapshot import RunSnapshot  # noqa: E402

logger = logging.getLogger(__name__)


def _positive(values: np.ndarray) -> np.ndarray:
    return np.where(values > 0, values, np.nan)


def plot_spectra(path: Path, finals: dict[str, RunSnapshot]):
    fig, ax = plt.subplots(figsize=(8, 6))
    for name, snapshot in finals.items():
        for conj in snapshot.sets[MomentMode.RAW]:
            h_b = eigh(conj.H_b).eigenvalues
            g_b = eigh(conj.G_b).eigenvalues
            ax.loglog(_positive(g_b), _positive(h_b), marker='.', linewidth=0.8,
                      label=f"{name} layer {conj.layer_index}")
    ax.set_xlabel('eigenvalue of G_b')
    ax.set_ylabel('eigenvalue of H_b')
    ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_alpha_steps(path: Path, alignments: dict[str, list[dict]]):
    fig, ax = plt.subplots(figsize=(8, 6))
    for name, rows in alignments.items():
        for layer in sorted({int(row['layer']) for row in rows}):
            selected = [row for row in rows if int(row['layer']) == layer]
            steps = [int(row['step']) for row in selected]
            ax.plot(steps, stack_scores(selected)[:, 0], label=f"{name} layer {layer}")
    ax.set_xlabel('step')
    ax.set_ylabel('alpha(H_a, G_a)')
    ax.set_ylim(-1.05, 1.05)
    ax.legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_alpha_gamma(path: Path, summary: list[dict]):
    fig, ax = plt.subplots(figsize=(8, 6))
    for layer in sorted({row['layer'] for row in summary}):
        rows = sorted((row for row in summary if row['layer'] == layer), key=lambda row: row['weight_decay'])
        gammas = np.array([row['weight_decay'] for row in rows], dtype=np.float64)
        alphas = np.array([np.nan if row['HG_a'] is None else row['HG_a'] for row in rows], dtype=np.float64)
        ax.plot(gammas, alphas, marker='o', label=f"layer {layer}")
    if summary and min(row['weight_decay'] for row in summary) > 0:
        ax.set_xscale('log')
    ax.set_xlabel('weight decay')
    ax.set_ylabel('alpha(H_a, G_a)')
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report(out_dir, summary: list[dict], finals: dict[str, RunSnapshot],
                  alignments: dict[str, list[dict]]) -> list[Path]:
    out_dir = Path(out_dir)
    paths = [out_dir / 'spectra.png', out_dir / 'alpha_steps.png', out_dir / 'alpha_gamma.png']
    plot_spectra(paths[0], finals)
    plot_alpha_steps(paths[1], alignments)
    plot_alpha_gamma(paths[2], summary)
    logger.info("rendered %d figure(s) in %s", len(paths), out_dir)
    return paths
