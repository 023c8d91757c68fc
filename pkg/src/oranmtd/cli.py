import argparse
import logging
from pathlib import Path

import pandas as pd

from . import __version__
from .adversary import PoisoningAttack
from .agent import train
from .errors import ConfigError, InvalidParameterError, NumericalError, OracleSizeError
from .harness import (ScenarioKind, TraceEvent, default_config, detect_and_prune, exact_admission_oracle,
                      first_fit_admissions, load_config, random_trace, sweep_arrival, sweep_departure)
from .logging import set_verbosity
from .mtd import train_ensemble
from .numerics import RandomStream
from .read_write import emit_csv, load_detection, save_detection, save_ensemble, save_policy, write_report
from .xai import render_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser():
    parser = argparse.ArgumentParser(prog='oranmtd', description='Slice admission control under poisoning, '
                                                                 'moving-target defense and XAI detection.')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    parser.add_argument('--config', type=Path, help='YAML experiment configuration')
    parser.add_argument('--seed', type=int, help='master seed (overrides experiment.seed)')
    parser.add_argument('--out', type=Path, help='output directory (overrides experiment.out_dir)')
    parser.add_argument('--scenario', choices=[k.value for k in ScenarioKind],
                        help='scenario kind (overrides experiment.scenario)')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='debug logging and progress bars')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='warnings only')
    sub = parser.add_subparsers(dest='command', required=True)

    sub.add_parser('train', help='train a policy (or an ensemble for mtd) and save the checkpoint')

    sweep = sub.add_parser('sweep', help='admission rate over the traffic grids, written as CSV')
    sweep.add_argument('--axis', choices=['arrival', 'departure', 'both'], default='both')
    sweep.add_argument('--all-scenarios', action='store_true', help='run baseline, attacked and mtd')

    sub.add_parser('detect', help='train an ensemble, detect the poisoned member and prune it')

    report = sub.add_parser('report', help='render the anomaly report of a saved detection')
    report.add_argument('--detection', type=Path, help='detection JSON written by detect')

    oracle = sub.add_parser('oracle', help='exact admission optimum against first-fit-decreasing')
    oracle.add_argument('--trace', type=Path, help='CSV with columns step,service,holding_steps')
    oracle.add_argument('--random', type=int, default=10, help='random tiny traces when no trace is given')
    oracle.add_argument('--horizon', type=int, default=6)
    return parser


def _load(args):
    config = load_config(args.config) if args.config else default_config()
    return config.with_overrides(seed=args.seed, out_dir=args.out, scenario=args.scenario)


def _cmd_train(config, verbose):
    out = Path(config.experiment.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stream = RandomStream(config.experiment.seed)
    scenario = config.experiment.scenario
    if scenario is ScenarioKind.MTD:
        ensemble = train_ensemble(config.env_factory(), config.ensemble_config(), config.attack,
                                  stream.substream('train/ensemble'), n_jobs=config.experiment.n_jobs,
                                  verbose=verbose)
        path = save_ensemble(ensemble, out / 'ensemble')
    else:
        attack = None
        if scenario is ScenarioKind.ATTACKED:
            attack = PoisoningAttack.seeded(config.attack, stream.substream('train'))
        result = train(config.env_factory(), config.policy, attack=attack, stream=stream.substream('train/policy'),
                       verbose=verbose)
        path = save_policy(result.policy, out / 'policy.ckpt')
        curve = pd.DataFrame({'mean_reward': result.curve.mean_reward,
                              'admission_rate': result.curve.admission_rate})
        curve.to_csv(out / 'learning_curve.csv', index_label='iteration', float_format='%.6f',
                     lineterminator='\n')
    print('saved {}'.format(path))


def _cmd_sweep(config, args, verbose):
    out = Path(config.experiment.out_dir)
    scenarios = list(ScenarioKind) if args.all_scenarios else [config.experiment.scenario]
    sweeps = []
    if args.axis in ('arrival', 'both'):
        sweeps.append(('fig_arrival.csv', sweep_arrival))
    if args.axis in ('departure', 'both'):
        sweeps.append(('fig_departure.csv', sweep_departure))
    for name, sweep in sweeps:
        rows = []
        for scenario in scenarios:
            rows += sweep(config, scenario, verbose)
        print('wrote {}'.format(emit_csv(rows, out / name)))


def _cmd_detect(config, verbose):
    out = Path(config.experiment.out_dir)
    result = detect_and_prune(config, verbose=verbose)
    write_report(result.report, out / 'report.txt')
    save_detection(result.detection, out / 'detection.json')
    print(result.report.to_text())
    print('ground truth: {}  correct: {}  admission before/after prune: {:.4f} / {:.4f}'.format(
        result.ground_truth, result.correct, result.before, result.after))


def _cmd_report(config, args, verbose):
    out = Path(config.experiment.out_dir)
    detection_config = config.detection
    if args.detection is not None:
        detection = load_detection(args.detection)
        report = render_report(detection, detection_config.generator, detection_config.endpoint,
                               detection_config.timeout, detection_config.window_length)
    else:
        report = detect_and_prune(config, verbose=verbose).report
    write_report(report, out / 'report.txt')
    print(report.to_text())


def _read_trace(path):
    frame = pd.read_csv(path)
    return [TraceEvent(int(r.step), int(r.service), int(r.holding_steps)) for r in frame.itertuples(index=False)]


def _cmd_oracle(config, args):
    topology = config.topology.build()
    if args.trace is not None:
        traces = [_read_trace(args.trace)]
    else:
        stream = RandomStream(config.experiment.seed).substream('oracle')
        traces = [random_trace(topology, stream, horizon=args.horizon) for _ in range(args.random)]
    for k, trace in enumerate(traces):
        best = exact_admission_oracle(topology, trace, args.horizon)
        greedy = first_fit_admissions(topology, trace, args.horizon)
        print('trace {}: {} requests, oracle {} admitted, first-fit-decreasing {}'.format(
            k, best.offered, best.admitted, greedy.admitted))


def main(argv=None):
    """Entry point of the ``oranmtd`` command; returns the exit code."""
    args = _build_parser().parse_args(argv)
    set_verbosity(logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO)
    verbose = args.verbose
    try:
        config = _load(args)
        if args.command == 'train':
            _cmd_train(config, verbose)
        elif args.command == 'sweep':
            _cmd_sweep(config, args, verbose)
        elif args.command == 'detect':
            _cmd_detect(config, verbose)
        elif args.command == 'report':
            _cmd_report(config, args, verbose)
        elif args.command == 'oracle':
            _cmd_oracle(config, args)
    except (ConfigError, InvalidParameterError, OracleSizeError) as err:
        logger.error('%s', err)
        return EXIT_CONFIG
    except NumericalError as err:
        logger.error('numerical failure: %s', err)
        return EXIT_NUMERICAL
    return EXIT_OK
