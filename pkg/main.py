#!/usr/bin/python

# Copyright 2025 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License

"""Command-line front end of ClrLab.

Subcommands: count, bound, verify, kernel, witness, lt, sweep, report.
Every subcommand prints one JSON envelope on standard output. Values may
come from a `--config FILE` with an `[inputs]` section whose keys are the
long flag names; explicit flags override the file.

Exit codes: 0 success, 1 dominance violated, 2 usage or validation error,
3 numerical or resource error.
"""

import sys
import argparse
from core_wrappers import (
    pre_validation_checks, cmd_count, cmd_bound, cmd_verify, cmd_kernel,
    cmd_witness, cmd_lt, cmd_sweep, cmd_report)
from errors import ClrLabError
from utils import parse_config, serialize_report
from base_logger import logger, EXEC_INFO

COMMANDS = {
    'count': cmd_count,
    'bound': cmd_bound,
    'verify': cmd_verify,
    'kernel': cmd_kernel,
    'witness': cmd_witness,
    'lt': cmd_lt,
    'sweep': cmd_sweep,
    'report': cmd_report,
}
TRUE_VALUES = ('1', 'true', 'yes', 'on')


def _number(text):
    """int when the text is integral, float otherwise."""
    try:
        return int(text)
    except ValueError:
        return float(text)


def _split(text, sep=','):
    return [s.strip() for s in str(text).split(sep) if s.strip()]


def _numbers(text):
    return [_number(s) for s in _split(text)]


def _floats(text):
    return [float(s) for s in _split(text)]


def _names(text):
    return _split(text)


def _words(text):
    return str(text).split()


def _pairs(text):
    """`k:l,k:l` → [(k, l), ...]."""
    pairs = []
    for item in _split(text):
        k, _, l = item.partition(':')
        if not l:
            raise argparse.ArgumentTypeError(f'expected k:l, got {item!r}')
        pairs.append((int(k), int(l)))
    return pairs


def _operator_flags():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--family', type=str,
                        help='Operator family, for example lattice1d, '
                             'lattice2d, continuum1d, fractional1d, bessel.')
    parser.add_argument('--potential', type=str,
                        help='Potential descriptor, family:key=value,...')
    parser.add_argument('--box', type=_number,
                        help='Truncation half-width.')
    parser.add_argument('--schedule', type=_numbers,
                        help='Strictly increasing half-widths, 64,96,128.')
    parser.add_argument('--alpha', type=float)
    parser.add_argument('--d', type=float, help='Bessel dimension.')
    parser.add_argument('--boundary', type=str,
                        help='dirichlet | neumann | none')
    parser.add_argument('--step', type=float,
                        help='Grid step of continuum truncations.')
    parser.add_argument('--killing-site', dest='killing_site', type=int)
    parser.add_argument('--Lambda', dest='Lambda', type=float,
                        help='Declared upper bound of the potential.')
    return parser


def _common_flags():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--config', type=str,
                        help='Configuration file with an [inputs] section.')
    parser.add_argument('--canonical', action='store_true',
                        help='Omit the timestamp and sort keys.')
    return parser


def build_parser():
    """Builds the argparse parser with one subparser per command."""
    parser = argparse.ArgumentParser(
        prog='clr-lab',
        description='Eigenvalue-count bounds for discrete and continuum '
                    'Schrödinger operators.',
        usage='use "%(prog)s <command> --help" for more information',
        formatter_class=argparse.RawTextHelpFormatter)
    subparsers = parser.add_subparsers(dest='command', required=True)
    common = _common_flags()
    operator = _operator_flags()

    count = subparsers.add_parser('count', parents=[common, operator],
                                  help='Exact eigenvalue counts.')
    count.add_argument('--energies', type=_floats,
                       help='Energies E for N_E, 0,0.5')
    count.add_argument('--gammas', type=_floats,
                       help='Exponents of the Lieb-Thirring sums.')
    count.add_argument('--eigenvalues', action='store_true',
                       help='Include the negative eigenvalues.')

    bound = subparsers.add_parser('bound', parents=[common, operator],
                                  help='One eigenvalue-count bound.')
    bound.add_argument('--bound', type=str, help="""
        bargmann_1d, refined_bargmann_1d, barggen, clr, lattice_2d_clr,
        refined_2d, fractional, bessel
                       """)
    bound.add_argument('--sigma', type=float)
    bound.add_argument('--sigmas', type=_floats)
    bound.add_argument('--optimize-sigma', dest='optimize_sigma',
                       action='store_true')
    bound.add_argument('--x0', type=_number,
                       help='Killing point of one-dimensional bounds.')
    bound.add_argument('--x0s', type=_numbers,
                       help='Candidate centres of the generalized '
                            'Bargmann bound.')
    bound.add_argument('--C1', dest='C1', type=float)
    bound.add_argument('--C2', dest='C2', type=float)

    verify = subparsers.add_parser('verify', parents=[common],
                                   help='Seeded dominance suites.')
    verify.add_argument('--suite', type=str, help="""
        one of or comma separated list of
        bargmann1d, lattice2d, fractional, bessel, continuum1d, lt1d
        or all
                        """)
    verify.add_argument('--n', type=int, help='Instances per suite.')
    verify.add_argument('--seed', type=int)
    verify.add_argument('--workers', type=int)
    verify.add_argument('--output-dir', dest='output_dir', type=str)

    kernel = subparsers.add_parser('kernel', parents=[common],
                                   help='Heat-kernel and resolvent tables.')
    kernel.add_argument('--family', type=str)
    kernel.add_argument('--t', type=_floats, help='Times, 0.5,1,2')
    kernel.add_argument('--range', type=int, help='Largest site or radius.')
    kernel.add_argument('--lambdas', type=_floats,
                        help='Spectral parameters of resolvent tables.')
    kernel.add_argument('--dimension', type=int)
    kernel.add_argument('--alpha', type=float)
    kernel.add_argument('--d', type=float)
    kernel.add_argument('--boundary', type=str)
    kernel.add_argument('--q', type=float)

    witness = subparsers.add_parser('witness', parents=[common],
                                    help='Lower-bound witness certificates.')
    witness.add_argument('--family', type=str,
                         help='dyadic1d | layer2d | sparse_delta')
    witness.add_argument('--potential', type=str)
    witness.add_argument('--Lambda', dest='Lambda', type=float)
    witness.add_argument('--kmin', type=int)
    witness.add_argument('--kmax', type=int)
    witness.add_argument('--mode', type=str, help='lattice | continuum')
    witness.add_argument('--half-width', dest='half_width', type=int)
    witness.add_argument('--scales', type=_pairs,
                         help='Layer pairs, 1:8,16:32')
    witness.add_argument('--alphas', type=_floats)
    witness.add_argument('--gamma', type=float)
    witness.add_argument('--lattice', type=str,
                         help='lattice1d | lattice2d')
    witness.add_argument('--check-inertia', dest='check_inertia',
                         action='store_true')

    lieb_thirring = subparsers.add_parser(
        'lt', parents=[common], help='Lieb-Thirring bounds.')
    lieb_thirring.add_argument('--gamma', type=float)
    lieb_thirring.add_argument('--potential', type=str)
    lieb_thirring.add_argument('--Lambda', dest='Lambda', type=float)
    lieb_thirring.add_argument('--mode', type=str,
                               help='continuum | lattice')
    lieb_thirring.add_argument('--variants', type=_names)
    lieb_thirring.add_argument('--sigma', type=float)
    lieb_thirring.add_argument('--x0', type=_number)
    lieb_thirring.add_argument('--box', type=_number)
    lieb_thirring.add_argument('--step', type=float)
    lieb_thirring.add_argument('--a1', type=float,
                               help='Fitted constant term of lt_2d.')
    lieb_thirring.add_argument('--a2', type=float,
                               help='Fitted integral coefficient of lt_2d.')

    sweep = subparsers.add_parser('sweep', parents=[common, operator],
                                  help='Counts and bounds over a sweep.')
    sweep.add_argument('--potentials', type=_words,
                       help='Whitespace separated potential descriptors.')
    sweep.add_argument('--scales', type=_floats)
    sweep.add_argument('--random-kinds', dest='random_kinds', type=_names,
                       help='Seeded random families, bumps:10,deltas:5')
    sweep.add_argument('--bounds', type=_names)
    sweep.add_argument('--sigmas', type=_floats)
    sweep.add_argument('--gammas', type=_floats)
    sweep.add_argument('--seed', type=int)
    sweep.add_argument('--fit', action='store_true',
                       help='Fit the 2D structural constants.')
    sweep.add_argument('--output', type=str)
    sweep.add_argument('--csv', type=str)

    report = subparsers.add_parser('report', parents=[common],
                                   help='Verification workbook.')
    report.add_argument('--input-dir', dest='input_dir', type=str)
    report.add_argument('--output-dir', dest='output_dir', type=str)
    report.add_argument('--suite', type=str)
    report.add_argument('--n', type=int)
    report.add_argument('--seed', type=int)
    return parser


def apply_config(subparser, config_file):
    """Installs `[inputs]` values of a config file as subparser defaults.

    Keys are long flag names with '-' or '_'. String defaults go through
    the flag's type on parse; boolean flags accept true/false.

    Raises:
        ValidationError: If the file is missing or has no sections.
    """
    cfg = parse_config(config_file)
    if not cfg.has_section('inputs'):
        return
    actions = {a.dest.lower(): a for a in subparser._actions}  # noqa pylint: disable=W0212
    defaults = {}
    for key, value in cfg.items('inputs'):
        action = actions.get(key.replace('-', '_'))
        if action is None or action.dest in ('config', 'help'):
            logger.warning(f"Ignoring unknown config key {key}")  # noqa pylint: disable=W1203
            continue
        if isinstance(action.const, bool):
            value = value.strip().lower() in TRUE_VALUES
        defaults[action.dest] = value
    subparser.set_defaults(**defaults)


def parse_arguments(parser, argv):
    """Parses argv, applying a `--config` file beneath explicit flags."""
    args = parser.parse_args(argv)
    if args.config:
        subparser = parser._subparsers._group_actions[0].choices[args.command]  # noqa pylint: disable=W0212,C0301
        apply_config(subparser, args.config)
        args = parser.parse_args(argv)
    return args


def main(argv=None):
    """Runs one subcommand and returns its exit code.

    Args:
        argv (list, optional): Arguments without the program name;
            defaults to sys.argv[1:].

    Returns:
        int: 0 success, 1 dominance violated, 2 usage, 3 numerical.
    """
    parser = build_parser()
    try:
        args = parse_arguments(parser, argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    except ClrLabError as error:
        print(f"error: {error}", file=sys.stderr)
        return error.exit_code

    options = {k: v for k, v in vars(args).items()
               if k not in ('command', 'config', 'canonical')}
    if not pre_validation_checks(args.command, options):
        logger.error("Pre validation checks failed. Please, check...")
        print(f"error: missing required options for {args.command}",
              file=sys.stderr)
        return 2

    try:
        operator, result = COMMANDS[args.command](options)
    except ClrLabError as error:
        logger.error(f"{args.command} failed: {error}", exc_info=EXEC_INFO)  # noqa pylint: disable=W1203
        print(f"error: {error}", file=sys.stderr)
        return error.exit_code

    print(serialize_report(args.command, operator, result,
                           seed=options.get('seed'),
                           canonical=args.canonical))
    if args.command == 'verify' and not result['passed']:
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
