#!/usr/bin/env python
"""
vr: command-line front end of vrshuffle
"""
import sys
import logging
from argparse import ArgumentParser, RawDescriptionHelpFormatter

from ..errors import VRShuffleException, ParameterError
from ..utils import debugtimer, get_configfolder
from .configfile import VRConfig
from .output import FORMATS, write_report
from .commands import COMMANDS, MECHANISM_ARGS

logger = logging.getLogger(__name__)

EPILOG = '''commands:
  params        amplification parameters of a catalog mechanism or a matrix
  upper         numerical upper bound on the amplified eps
  lower         numerical lower bound from the worst-case input pair
  closed-form   analytic or asymptotic closed-form bound
  compose       privacy curve of K sequential rounds
  sweep         bounds over a range of eps0, n or beta
  oracle        upper bound by brute-force enumeration (small n)

exit codes:
  0 ok, 2 usage or parameter error, 3 unsupported regime or size limit,
  4 file error

notes:
  the default configuration file is vrshuffle.yaml in the folder
      {:s}
  or the file named by $VRSHUFFLE_CONFIG.
'''


def _count(text):
    "non-negative integer, accepting forms like 1e4"
    try:
        val = float(text)
    except ValueError:
        raise ParameterError(f"'{text}' is not a number")
    if val != int(val) or val < 0:
        raise ParameterError(f"'{text}' is not a non-negative integer")
    return int(val)


def _add_params_args(parser, skip_mechanism_args=()):
    grp = parser.add_argument_group('parameters')
    grp.add_argument('--mechanism', default=None,
                     help='catalog mechanism id (see: vr params --list)')
    for name in MECHANISM_ARGS:
        if name in skip_mechanism_args:
            continue
        grp.add_argument(f'--{name}', dest=f'mech_{name}', type=float, default=None,
                         help=f'mechanism argument {name}')
    grp.add_argument('--arg', action='append', default=None, metavar='NAME=VALUE',
                     help='mechanism argument, repeatable')
    grp.add_argument('--p', type=float, default=None, help='ratio bound p (inf allowed)')
    grp.add_argument('--beta', type=float, default=None, help='total variation bound')
    grp.add_argument('--q', type=float, default=None, help='blanket ratio q')
    grp.add_argument('--matrix-file', dest='matrix_file', default=None,
                     help='JSON file {"rows": [...], "blanket_rows": [...]}')
    grp.add_argument('--n', type=_count, default=None, help='number of users')
    grp.add_argument('--n-blanket', dest='n_blanket', type=_count, default=None,
                     help='number of blanket messages')
    grp.add_argument('--messages', type=_count, default=None,
                     help='messages per user (multi-message protocols)')


def _add_asymmetric_args(parser):
    parser.add_argument('--q0', type=float, default=None, help='blanket ratio for x0')
    parser.add_argument('--q1', type=float, default=None, help='blanket ratio for x1')


def _add_search_args(parser, multi_delta=False):
    parser.add_argument('--delta', type=float, action='append', default=None,
                        help='target delta' + (', repeatable' if multi_delta else ''))
    parser.add_argument('--iters', type=_count, default=None,
                        help='binary search iterations')


def build_parser():
    parser = ArgumentParser(prog='vr', description='shuffle-model privacy amplification',
                            epilog=EPILOG.format(get_configfolder()),
                            formatter_class=RawDescriptionHelpFormatter,
                            allow_abbrev=False)
    parser.add_argument('--format', choices=FORMATS, default=None,
                        help='output format [text]')
    parser.add_argument('--config', default=None, help='configuration file')
    parser.add_argument('--threads', type=_count, default=None,
                        help='worker threads for the divergence engine')
    parser.add_argument('--trunc-delta', dest='trunc_delta', type=float, default=None,
                        help='binomial tail mass that may be skipped')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='log to stderr (-v info, -vv debug)')
    parser.add_argument('--timing', action='store_true', default=False,
                        help='print a timing table to stderr')
    sub = parser.add_subparsers(dest='command', metavar='command')

    def add(name, text):
        return sub.add_parser(name, help=text, allow_abbrev=False)

    p_params = add('params', 'amplification parameters')
    p_params.add_argument('mechanism_pos', nargs='?', default=None, metavar='mechanism')
    p_params.add_argument('--list', action='store_true', default=False,
                          help='list catalog mechanisms')
    _add_params_args(p_params)

    p_upper = add('upper', 'numerical upper bound')
    _add_params_args(p_upper)
    _add_search_args(p_upper, multi_delta=True)

    p_lower = add('lower', 'numerical lower bound')
    _add_params_args(p_lower)
    _add_asymmetric_args(p_lower)
    _add_search_args(p_lower)
    p_lower.add_argument('--mode', choices=('lower', 'tight-upper'), default='lower')

    p_closed = add('closed-form', 'closed-form bounds')
    p_closed.add_argument('form', choices=('analytic', 'asymptotic'))
    _add_params_args(p_closed)
    p_closed.add_argument('--delta', type=float, action='append', default=None)

    p_compose = add('compose', 'sequential composition')
    _add_params_args(p_compose, skip_mechanism_args=('k',))
    p_compose.add_argument('--k', type=_count, default=1, help='number of rounds [1]')
    p_compose.add_argument('--eps-error', dest='eps_error', type=float, default=None)
    p_compose.add_argument('--delta-error', dest='delta_error', type=float, default=None)
    p_compose.add_argument('--gamma', type=float, default=None,
                           help='Poisson subsampling rate per round')
    p_compose.add_argument('--mesh', type=float, default=None, help='PLD grid spacing')
    p_compose.add_argument('--eps-upper', dest='eps_upper', type=float, default=None,
                           help='PLD grid half-width')
    p_compose.add_argument('--points', type=_count, default=None,
                           help='eps values in the output curve')
    p_compose.add_argument('--target-delta', dest='target_delta', type=float, default=None,
                           help='print the eps of the composed curve at this delta')
    p_compose.add_argument('--generic', action='store_true', default=False,
                           help='convolve round by round, no repeated squaring')

    p_sweep = add('sweep', 'bounds over a parameter range')
    _add_params_args(p_sweep)
    p_sweep.add_argument('--vary', choices=('eps0', 'n', 'beta'), required=True)
    p_sweep.add_argument('--range', required=True, metavar='A:B:STEPS')
    p_sweep.add_argument('--log', action='store_true', default=False,
                         help='geometric spacing of the range')
    p_sweep.add_argument('--out', default=None, help='CSV output file')
    _add_search_args(p_sweep)

    p_oracle = add('oracle', 'brute-force upper bound')
    _add_params_args(p_oracle)
    _add_asymmetric_args(p_oracle)
    _add_search_args(p_oracle)
    p_oracle.add_argument('--max-n', dest='max_n', type=_count, default=None,
                          help='enumeration cap on n_blanket [5000]')
    return parser


def _setup_logging(verbose):
    if verbose <= 0:
        return
    level = logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, force=True,
                        format='%(levelname)s %(name)s: %(message)s')


def _error(exc):
    print(f"error[{exc.reason}]: {exc}", file=sys.stderr)
    return exc.exit_code


def main(argv=None):
    """run the vr command line, returning the exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except VRShuffleException as exc:
        return _error(exc)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2

    _setup_logging(args.verbose)
    timer = debugtimer('start')
    try:
        conf = VRConfig(args.config)
        conf.override(format=args.format, threads=args.threads,
                      trunc_delta=args.trunc_delta)
        fmt = conf.config['format']
        if fmt not in FORMATS:
            raise ParameterError(f"unknown output format '{fmt}'")
        timer.add('config')
        report = COMMANDS[args.command](args, conf, timer)
        if report is not None:
            write_report(report, fmt)
    except VRShuffleException as exc:
        return _error(exc)
    timer.add('output')
    if args.timing:
        timer.show(file=sys.stderr)
    return 0
