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


"""Provides the command functions behind the ClrLab command line.

Each `cmd_*` function takes the merged option dictionary of one
subcommand (config file values overridden by flags) and returns a pair
(operator description, result) that `main.py` wraps in the JSON envelope.

Key Functions:

- `pre_validation_checks`: Checks that a subcommand has its required keys.
- `cmd_count`: Exact eigenvalue counts with the box-convergence protocol.
- `cmd_bound`: One bound, optionally σ-optimized and compared.
- `cmd_verify`: Seeded dominance suites.
- `cmd_kernel`: Heat-kernel and resolvent tables.
- `cmd_witness`: Lower-bound witness certificates.
- `cmd_lt`: Lieb-Thirring bounds against exact sums.
- `cmd_sweep`: Counts and bounds over a SweepConfig.
- `cmd_report`: Verification workbook.
"""

import glob
import os
from dataclasses import dataclass, field, replace
import numpy as np
from bounds import (LT_VARIANTS, bargmann_1d, barggen, bessel_bounds,
                    clr_heat_kernel_bound, fit_structural_constants,
                    fractional_bounds, lattice_2d_clr, lt_bounds,
                    minimize_sigma, refined_2d, refined_bargmann_1d,
                    sigma_scan, validate_structural_constants)
from errors import ArgumentError
from kernels import (KERNEL_FAMILIES, ContinuumHalfLineTail,
                     LatticeKilled1DTail, bessel_diagonal_slope, kernel_table,
                     resolvent_cross_checks, resolvent_table)
from operators import OperatorSpec, assemble
from potentials import parse_potential, random_potential
from spectra import box_convergence, spectral_report
from suite_mapping.suites import SUITE_NAMES
from utils import (create_dir, load_backend_config, parse_json, run_parallel,
                   worker_count, write_json, write_table_csv)
from validator import DominanceValidator
from verification_report import VerificationReport
from witnesses import (certify_inertia, dyadic_witnesses_1d,
                       layer_witnesses_2d, sparse_delta_construction)
from base_logger import logger

BOUND_NAMES = ('bargmann_1d', 'refined_bargmann_1d', 'barggen', 'clr',
               'lattice_2d_clr', 'refined_2d', 'fractional', 'bessel')
SIGMA_FREE = ('bargmann_1d', 'barggen')
RESOLVENT_FAMILIES = ('lattice1d_closed', 'lattice2d_quadrature')
WITNESS_FAMILIES = ('dyadic1d', 'layer2d', 'sparse_delta')

REQUIRED_KEYS = {
    'count': ['family', 'potential', 'box'],
    'bound': ['bound', 'family', 'potential'],
    'verify': ['suite', 'seed'],
    'kernel': ['family'],
    'witness': ['family'],
    'lt': ['gamma', 'potential'],
    'sweep': ['family', 'schedule'],
    'report': [],
}


def pre_validation_checks(command, options):
    """Performs pre-validation checks on the merged options.

    Args:
        command (str): Subcommand name.
        options (dict): Flag and config-file values.

    Returns:
        bool: True if all required keys are present, False otherwise.
    """
    logger.info(
        "------------------- Pre Validation Checks -----------------------")
    if command not in REQUIRED_KEYS:
        logger.error(f"Unknown command {command}")  # noqa pylint: disable=W1203
        return False
    missing_keys = [key for key in REQUIRED_KEYS[command]
                    if options.get(key) is None]
    if missing_keys:
        logger.error("Missing required options:")
        for key in missing_keys:
            logger.error(f" - --{key.replace('_', '-')}")  # noqa pylint: disable=W1203
        return False
    logger.info(f"All required options are present for {command}")  # noqa pylint: disable=W1203
    return True


def _operator_spec(options, half_width=None):
    return OperatorSpec(family=options['family'],
                        half_width=half_width or options.get('box'),
                        alpha=options.get('alpha'), d=options.get('d'),
                        boundary=options.get('boundary') or 'dirichlet',
                        step=options.get('step'),
                        killing_site=options.get('killing_site'))


def _potential(options):
    return parse_potential(options['potential'], bound=options.get('Lambda'))


def exact_report(spec, V, schedule=None, energies=(), gammas=(),
                 extract=False):
    """SpectralReport on the largest truncation, with the box protocol."""
    counts, flag = None, False
    if schedule:
        counts, flag = box_convergence(
            lambda R: assemble(replace(spec, half_width=R), V), schedule)
        spec = replace(spec, half_width=schedule[-1])
    report = spectral_report(assemble(spec, V), energies=energies,
                             gammas=gammas, extract=extract or bool(gammas),
                             truncation={'box_counts': counts})
    report.convergence_flag = flag
    return report


def cmd_count(options):
    """Exact counts N_E on the configured truncation."""
    logger.info('------------------- Count -----------------------')
    spec = _operator_spec(options)
    V = _potential(options)
    report = exact_report(spec, V, options.get('schedule'),
                          energies=options.get('energies') or (),
                          gammas=options.get('gammas') or (),
                          extract=bool(options.get('eigenvalues')))
    logger.info(f"N0 = {report.n0} on {spec.family}")  # noqa pylint: disable=W1203
    return {'spec': spec.to_dict(), 'potential': V.to_dict()}, report.to_dict()


def evaluate_bound(name, family, V, sigma, options):
    """Dispatches a bound name to its evaluator.

    Raises:
        ArgumentError: For an unknown bound or a family it does not cover.
    """
    mode = 'lattice' if family in ('lattice1d', 'lattice2d') else 'continuum'
    x0 = options.get('x0') or 0
    if name == 'bargmann_1d':
        return bargmann_1d(V, mode=mode, x0=x0)
    if name == 'refined_bargmann_1d':
        return refined_bargmann_1d(V, sigma, mode=mode, x0=x0)
    if name == 'barggen':
        return barggen(V, family, x0s=options.get('x0s') or (0,),
                       alpha=options.get('alpha'))
    if name == 'clr':
        if family == 'lattice1d':
            return clr_heat_kernel_bound(V, LatticeKilled1DTail(), sigma,
                                         mode='lattice1d', x0=x0)
        if family == 'lattice2d':
            return lattice_2d_clr(V, sigma)
        if family == 'continuum1d':
            return clr_heat_kernel_bound(V, ContinuumHalfLineTail(), sigma,
                                         mode='continuum1d', x0=x0)
        raise ArgumentError('clr covers lattice1d, lattice2d and continuum1d',
                            {'family': family})
    if name == 'lattice_2d_clr':
        return lattice_2d_clr(V, sigma)
    if name == 'refined_2d':
        constants = None
        if options.get('C1') is not None and options.get('C2') is not None:
            constants = {'C1': options['C1'], 'C2': options['C2']}
        return refined_2d(V, sigma, mode=mode, constants=constants)
    if name == 'fractional':
        return fractional_bounds(options.get('alpha'), V, sigma)
    if name == 'bessel':
        return bessel_bounds(options.get('d'), V, sigma,
                             boundary=options.get('boundary') or 'dirichlet')
    raise ArgumentError('unknown bound', {'bound': name,
                                          'known': ', '.join(BOUND_NAMES)})


def cmd_bound(options):
    """A bound at fixed σ, over a σ grid or at the optimal σ."""
    logger.info('------------------- Bound -----------------------')
    name, family = options['bound'], options['family']
    V = _potential(options)

    def evaluator(sigma):
        return evaluate_bound(name, family, V, sigma, options)

    scan = None
    if name in SIGMA_FREE:
        report = evaluator(None)
    elif options.get('optimize_sigma'):
        report = minimize_sigma(evaluator)
    elif options.get('sigmas'):
        reports, report = sigma_scan(evaluator, options['sigmas'])
        scan = [{'sigma': r.sigma, 'value': r.value} for r in reports]
    else:
        report = evaluator(options.get('sigma') or 1.0)
    if scan is not None:
        report.diagnostics['sigma_scan'] = scan
    if options.get('box') is not None:
        exact = exact_report(_operator_spec(options), V,
                             options.get('schedule'))
        report.compare(exact.n0)
        report.diagnostics['box_converged'] = exact.convergence_flag
    logger.info(f"{report.name} = {report.value} ({report.status})")  # noqa pylint: disable=W1203
    return {'family': family, 'potential': V.to_dict()}, report.to_dict()


def cmd_verify(options):
    """Seeded dominance suites; the result lists every violation."""
    logger.info('------------------- Verify -----------------------')
    names = _suite_names(options['suite'])
    validator = DominanceValidator(options['seed'], n=options.get('n') or 200,
                                   workers=options.get('workers'))
    summaries = validator.run(names)
    output_dir = options.get('output_dir')
    if output_dir:
        create_dir(output_dir)
        for name, summary in summaries.items():
            write_json(os.path.join(output_dir, f'verify_{name}.json'),
                       summary)
    result = {
        'suites': {name: {k: v for k, v in s.items() if k != 'records'}
                   for name, s in summaries.items()},
        'violations': validator.ledger,
        'passed': validator.passed}
    logger.info(f"violations: {len(validator.ledger)}")  # noqa pylint: disable=W1203
    return {'suites': names, 'n': validator.n}, result


def _suite_names(text):
    names = [s.strip() for s in str(text).split(',') if s.strip()]
    if names == ['all']:
        return list(SUITE_NAMES)
    unknown = [s for s in names if s not in SUITE_NAMES]
    if unknown or not names:
        raise ArgumentError('unknown verification suite',
                            {'suite': ', '.join(unknown) or text})
    return names


def _kernel_sites(options):
    family = options['family']
    radius = int(options.get('range') or 10)
    if family in ('p_bessel', 'p1_continuum_1d', 'p1_continuum_2d_diag'):
        return [float(r) for r in range(1, radius + 1)]
    if (options.get('dimension') or 1) == 2:
        return [(i, j) for i in range(radius + 1) for j in range(i + 1)]
    return list(range(-radius, radius + 1))


def cmd_kernel(options):
    """Kernel or resolvent table over the configured grid."""
    logger.info('------------------- Kernel -----------------------')
    family = options['family']
    if family in RESOLVENT_FAMILIES:
        lambdas = options.get('lambdas') or [1.0, 0.1, 0.01]
        radius = int(options.get('range') or 4)
        origin = 0 if family == 'lattice1d_closed' else (0, 0)
        sites = range(radius + 1) if family == 'lattice1d_closed' \
            else [(i, 0) for i in range(radius + 1)]
        table = resolvent_table(family, lambdas,
                                [(x, origin) for x in sites])
        result = table.to_dict()
        checks = resolvent_cross_checks(family, lambdas, list(sites))
        result.update(checks)
        result['violations'] = len(table.check()) + len(checks['mismatches'])
        return {'family': family}, result
    if family not in KERNEL_FAMILIES:
        raise ArgumentError('unknown kernel family', {'family': family})
    if not options.get('t'):
        raise ArgumentError('kernel tables need --t')
    params = {k: options[k] for k in ('alpha', 'd', 'boundary', 'q')
              if options.get(k) is not None}
    table = kernel_table(family, options['t'], _kernel_sites(options),
                         **params)
    result = table.to_dict()
    values = table.values()
    result['negative_values'] = int(np.count_nonzero(values < 0))
    result['violations'] = len(table.violations())
    if family == 'p_bessel':
        result['diagonal_slopes'] = {
            repr(float(t)): bessel_diagonal_slope(
                params['d'], t, boundary=params.get('boundary', 'none'))
            for t in options['t']}
    logger.info(f"{family}: {len(table.points)} points, {result['negative_values']} negative")  # noqa pylint: disable=W1203,C0301
    return {'family': family, 'parameters': params}, result


def cmd_witness(options):
    """Witness certificate, optionally checked against the exact count."""
    logger.info('------------------- Witness -----------------------')
    family = options['family']
    total = None
    if family == 'dyadic1d':
        V = _potential(options)
        kmin = int(options.get('kmin') or 1)
        certificate = dyadic_witnesses_1d(
            V, range(kmin, int(options.get('kmax') or 17) + 1),
            mode=options.get('mode') or 'lattice')
        dimension = 1
    elif family == 'layer2d':
        V = _potential(options)
        certificate = layer_witnesses_2d(
            V, scales=options.get('scales'),
            half_width=int(options.get('half_width') or 4096))
        dimension = 2
    elif family == 'sparse_delta':
        lattice = options.get('lattice') or 'lattice1d'
        V, certificate, total = sparse_delta_construction(
            options.get('alphas') or [4.0 ** -n for n in range(1, 5)],
            options.get('gamma') or 0.5, family=lattice)
        dimension = 2 if lattice == 'lattice2d' else 1
    else:
        raise ArgumentError('unknown witness family',
                            {'family': family,
                             'known': ', '.join(WITNESS_FAMILIES)})
    if options.get('check_inertia'):
        certify_inertia(certificate, V, dimension)
    result = certificate.to_dict()
    if total is not None:
        result['potential_sum'] = total
    return {'family': family, 'potential': V.to_dict()}, result


def cmd_lt(options):
    """Lieb-Thirring bounds, compared with the exact S_γ when a box is set."""
    logger.info('------------------- Lieb-Thirring -----------------------')
    gamma = options['gamma']
    V = _potential(options)
    mode = options.get('mode') or 'continuum'
    variants = options.get('variants') or [
        v for v in LT_VARIANTS if v != 'lt_2d'
        and (mode == 'continuum' or v in ('rebarg11', 'lit9'))
        and (v not in ('bargmann_lt', 'gamma_lt_half') or 0 < gamma < 0.5)]
    constants = None
    if options.get('a1') is not None and options.get('a2') is not None:
        constants = {'a1': options['a1'], 'a2': options['a2']}
    reports = {}
    for variant in variants:
        reports[variant] = lt_bounds(gamma, V, variant,
                                     Lambda=options.get('Lambda'),
                                     sigma=options.get('sigma') or 1.0,
                                     mode=mode, x0=options.get('x0') or 0,
                                     constants=constants)
    exact = None
    if options.get('box') is not None:
        family = 'lattice1d' if mode == 'lattice' else 'continuum1d'
        spec = OperatorSpec(family, half_width=options['box'],
                            step=options.get('step') or 0.05)
        exact = exact_report(spec, V, gammas=[gamma]).lt_sums[float(gamma)]
        for report in reports.values():
            report.compare(exact)
    return ({'mode': mode, 'gamma': gamma, 'potential': V.to_dict()},
            {'bounds': {k: r.to_dict() for k, r in reports.items()},
             'exact': exact})


@dataclass
class SweepConfig():
    """A parameter sweep over potentials, boxes and σ.

    Attributes:
        family (str): Operator family.
        schedule (list): Strictly increasing box half-widths.
        potentials (list): Potential descriptors.
        scales (list): Multipliers applied to every descriptor.
        random_kinds (list): Seeded random families, `kind:count`.
        bounds (list): Bound names evaluated per instance.
        sigmas (list): σ grid; the best value is kept.
        gammas (list): Exponents of the exact Lieb-Thirring sums.
        seed (int): Root seed, required with random_kinds.
        alpha, d, boundary, step: Operator parameters.
        fit (bool): Fit and validate the 2D structural constants.
        output (str): JSON output path.
        csv (str): CSV output path.
    """

    family: str
    schedule: list
    potentials: list = field(default_factory=list)
    scales: list = field(default_factory=lambda: [1.0])
    random_kinds: list = field(default_factory=list)
    bounds: list = field(default_factory=list)
    sigmas: list = field(default_factory=lambda: [1.0])
    gammas: list = field(default_factory=list)
    seed: int = None
    alpha: float = None
    d: float = None
    boundary: str = 'dirichlet'
    step: float = None
    fit: bool = False
    output: str = None
    csv: str = None

    def __post_init__(self):
        schedule = list(self.schedule or [])
        if not schedule or any(b <= a for a, b in zip(schedule, schedule[1:])):
            raise ArgumentError('box schedule must be strictly increasing',
                                {'schedule': schedule})
        if self.random_kinds and self.seed is None:
            raise ArgumentError('randomized sweeps need --seed')
        if not self.potentials and not self.random_kinds:
            raise ArgumentError('sweep needs potentials or random kinds')

    @classmethod
    def from_options(cls, options):
        keys = cls.__dataclass_fields__.keys()  # pylint: disable=E1101
        return cls(**{k: options[k] for k in keys
                      if options.get(k) is not None})

    def spec(self):
        return OperatorSpec(self.family, half_width=self.schedule[-1],
                            alpha=self.alpha, d=self.d,
                            boundary=self.boundary, step=self.step)

    def instances(self):
        """(label, Potential) pairs in a deterministic order."""
        items = []
        for text in self.potentials:
            base = parse_potential(text)
            for scale in self.scales:
                items.append((f'{text}*{scale:g}', base.scaled(scale)))
        dimension = 2 if self.family == 'lattice2d' else 1
        for entry in self.random_kinds:
            kind, _, count = entry.partition(':')
            children = np.random.SeedSequence(
                [self.seed, len(items)]).spawn(int(count or 1))
            for i, child in enumerate(children):
                V = random_potential(kind, np.random.default_rng(child),
                                     dimension=dimension)
                items.append((f'{kind}#{i}', V))
        return items


def _sweep_instance(args):
    config, label, V = args
    exact = exact_report(config.spec(), V, config.schedule,
                         gammas=config.gammas)
    row = {'label': label, 'potential': V.to_dict(), 'n0': exact.n0,
           'converged': exact.convergence_flag,
           'box_counts': exact.truncation.get('box_counts'),
           'lt_sums': {repr(g): s for g, s in exact.lt_sums.items()},
           'bounds': {}}
    options = {'alpha': config.alpha, 'd': config.d,
               'boundary': config.boundary}
    for name in config.bounds:
        if name in SIGMA_FREE:
            report = evaluate_bound(name, config.family, V, None, options)
        else:
            _, report = sigma_scan(
                lambda s, n=name: evaluate_bound(n, config.family, V, s,
                                                 options), config.sigmas)
        if report is None:
            continue
        report.compare(exact.n0)
        row['bounds'][name] = {'value': report.value, 'sigma': report.sigma,
                               'status': report.status,
                               'components': report.components}
    if config.fit:
        split = refined_2d(V, config.sigmas[0])
        row['structural'] = dict(split.components, exact=exact.n0)
    return row


def cmd_sweep(options):
    """Counts and bounds over a SweepConfig; writes JSON and CSV."""
    logger.info('------------------- Sweep -----------------------')
    config = SweepConfig.from_options(options)
    items = config.instances()
    rows = run_parallel(_sweep_instance,
                        [(config, label, V) for label, V in items],
                        workers=worker_count(load_backend_config()),
                        max_retries=0)
    for row in rows:
        if isinstance(row, Exception):
            raise row
    result = {'rows': rows}
    if config.fit:
        records = [r['structural'] for r in rows]
        constants = fit_structural_constants(records[0::2])
        result['fit'] = {'constants': constants,
                         'validation': validate_structural_constants(
                             records[1::2], constants)}
    if config.output:
        write_json(config.output, result)
    if config.csv:
        write_table_csv(config.csv, rows)
    logger.info(f"Sweep finished: {len(rows)} instances")  # noqa pylint: disable=W1203
    return {'spec': config.spec().to_dict()}, result


def cmd_report(options):
    """Verification workbook from saved verify outputs or fresh suites."""
    logger.info('------------------- Report -----------------------')
    backend_cfg = load_backend_config()
    input_dir = options.get('input_dir') or backend_cfg.get(
        'report', 'REPORT_DIR')
    summaries = {}
    for file in sorted(glob.glob(os.path.join(input_dir, 'verify_*.json'))):
        data = parse_json(file)
        if data.get('suite'):
            summaries[data['suite']] = data
    if not summaries:
        if options.get('seed') is None:
            raise ArgumentError('no verify outputs found; pass --seed to run '
                                'the suites', {'dir': input_dir})
        validator = DominanceValidator(options['seed'],
                                       n=options.get('n') or 20)
        summaries = validator.run(_suite_names(options.get('suite') or 'all'))  # noqa pylint: disable=C0301
    output_dir = options.get('output_dir') or backend_cfg.get(
        'report', 'REPORT_DIR')
    create_dir(output_dir)
    workbook = os.path.join(output_dir, backend_cfg.get(
        'report', 'WORKBOOK_NAME'))
    report = VerificationReport(workbook, summaries)
    report.write()
    report.close()
    return {'input_dir': input_dir}, {
        'workbook': workbook,
        'suites': {k: not v.get('violations') for k, v in summaries.items()}}
