import argparse
import csv
import logging
import sys
from pathlib import Path

from crhlab.crherrors import CRHError
from crhlab.crhstatus import CRHStatus, CRHStatusType
from crhlab.phasemodel.table_phase_model import PhaseType
from crhlab.runner.config import ExperimentConfig, load_config, load_preset, with_overrides
from crhlab.runner.experiment import run_experiment
from crhlab.runner.reports import emit_report, phase_scan
from crhlab.runner.snapshot import RUN_MANIFEST
from crhlab.runner.tables import format_cell
from crhlab.theoremlab import master_suite

logger = logging.getLogger(__name__)

THEOREM_COLUMNS = ('theorem', 'phase', 'seed', 'relation', 'alpha', 'expected_exponent', 'measured_exponent',
                   'passed')
PHASE_SCAN_COLUMNS = ('step', 'layer', 'phase', 'held', 'near_redundant')


class UsageError(Exception):
    pass


class CRHArgumentParser(argparse.ArgumentParser):
    """Reports usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(CRHStatusType.USAGE_ERROR.exit_code, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = CRHArgumentParser(prog='crhlab', description='Representation alignment laboratory')
    parser.add_argument('--verbose', action='store_true', help='debug logging')
    commands = parser.add_subparsers(dest='command', required=True, parser_class=CRHArgumentParser)

    train = commands.add_parser('train', help='train the runs of a config file or preset')
    train.add_argument('config', help='YAML config path or preset name')
    train.add_argument('--out', help='output directory (overrides output_dir)')
    train.add_argument('--seed', type=int, help='training seed')
    train.add_argument('--snapshot-every', type=int, help='steps between snapshots')
    train.add_argument('--tau', type=float, help='alignment threshold for phase labels')
    train.add_argument('--jobs', type=int, default=1, help='parallel runs for sweeps')
    train.add_argument('--no-resume', action='store_true', help='start over instead of resuming')
    train.add_argument('--progress', action='store_true', help='show a progress bar')

    report = commands.add_parser('report', help='summarize completed runs')
    report.add_argument('run_dirs', nargs='+', help='run directories or directories of runs')
    report.add_argument('--out', default='report', help='report directory')
    report.add_argument('--render', action='store_true', help='also render PNG figures')

    verify = commands.add_parser('verify-theorems', help='check the phase theorems on synthetic instances')
    verify.add_argument('--phase', help='phase label (CRH, 1..9); all phases when omitted')
    verify.add_argument('--seed', type=int, help='single seed; seeds 0..19 when omitted')
    verify.add_argument('--dims', type=int, nargs=2, default=(12, 12), metavar=('D_IN', 'D_OUT'))
    verify.add_argument('--out', default='.', help='directory for theorems.csv')

    scan = commands.add_parser('phase-scan', help='phase labels of a run at every snapshot')
    scan.add_argument('run_dir')
    scan.add_argument('--tau', type=float, help='alignment threshold')
    return parser


def _resolve_config(value: str) -> ExperimentConfig:
    path = Path(value)
    if path.is_file():
        return load_config(path)
    if path.suffix in ('.yaml', '.yml'):
        raise UsageError(f"config file not found: {value}")
    return load_preset(value)


def _run_dirs(values: list[str]) -> list[Path]:
    found = []
    for value in values:
        path = Path(value)
        if (path / RUN_MANIFEST).is_file():
            found.append(path)
        elif path.is_dir():
            found.extend(sorted(item for item in path.iterdir() if (item / RUN_MANIFEST).is_file()))
        else:
            raise UsageError(f"not a run directory: {value}")
    return found


def cmd_train(args) -> CRHStatus:
    config = with_overrides(_resolve_config(args.config), seed=args.seed, snapshot_every=args.snapshot_every,
                            tau=args.tau, output_dir=args.out)
    results = run_experiment(config, jobs=args.jobs, resume=not args.no_resume, progress=args.progress)
    diverged = [result for result in results if not result.status.status]
    for result in results:
        logger.info("%s: %s", result.run_dir, result.status.error_type.name)
    if diverged:
        return CRHStatus(CRHStatusType.DIVERGED, f"{len(diverged)} of {len(results)} run(s) diverged")
    return CRHStatus()


def cmd_report(args) -> CRHStatus:
    out = emit_report(_run_dirs(args.run_dirs), args.out, render=args.render)
    print(out / 'summary.csv')
    return CRHStatus()


def cmd_verify(args) -> CRHStatus:
    phases = None if args.phase is None else [PhaseType.get_by_label(args.phase)]
    seeds = range(20) if args.seed is None else [args.seed]
    d_in, d_out = args.dims
    checks = master_suite(seeds=seeds, d_in=d_in, d_out=d_out, phases=phases)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / 'theorems.csv', 'w', newline='', encoding='utf-8') as handle:
        writer = csv.DictWriter(handle, fieldnames=THEOREM_COLUMNS, lineterminator='\n')
        writer.writeheader()
        for check in checks:
            for row in check.rows():
                writer.writerow({key: format_cell(value) for key, value in row.items()})

    failed = [check for check in checks if not check.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} instance checks passed")
    if failed:
        return CRHStatus(CRHStatusType.VERIFICATION_FAILED,
                         ', '.join(f"phase {check.phase.label} seed {check.seed}" for check in failed))
    return CRHStatus()


def cmd_phase_scan(args) -> CRHStatus:
    writer = csv.DictWriter(sys.stdout, fieldnames=PHASE_SCAN_COLUMNS, lineterminator='\n')
    writer.writeheader()
    for label in phase_scan(args.run_dir, args.tau):
        writer.writerow({'step': label.step, 'layer': label.layer_index, 'phase': label.phase.label,
                         'held': label.held_labels(), 'near_redundant': format_cell(label.near_redundant)})
    return CRHStatus()


COMMANDS = {
    'train': cmd_train,
    'report': cmd_report,
    'verify-theorems': cmd_verify,
    'phase-scan': cmd_phase_scan,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')
    try:
        status = COMMANDS[args.command](args)
    except (UsageError, CRHError, ValueError, FileNotFoundError) as exc:
        status = CRHStatus(CRHStatusType.USAGE_ERROR, str(exc))
    if not status.status:
        logger.error("%s", status.message)
    return status.exit_code


if __name__ == '__main__':
    sys.exit(main())
