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


"""Seeded dominance checks of the certified bounds.

A suite draws `n` potentials from its seeded families, computes the exact
count (or Lieb-Thirring sum) on a schedule of truncations, evaluates every
certified bound of the suite and records a violation whenever a bound
falls below the exact value. Lattice and fractional truncations are
compressions of the full operator, so the count on the largest box is a
lower bound for N₀ and a violation against it is a genuine one.
"""

import numpy as np
from bounds import (LATTICE_CUTOFF, bargmann_1d, barggen, bessel_bounds,
                    clr_heat_kernel_bound, fractional_bounds, lattice_2d_clr,
                    lt_bounds, refined_bargmann_1d)
from errors import ArgumentError, ClrLabError
from kernels import LatticeKilled1DTail
from operators import OperatorSpec, assemble
from potentials import Potential, random_potential
from spectra import (box_convergence, count_nonpositive, oscillation_count_1d,
                     spectral_report)
from suite_mapping.suites import suites
from utils import load_backend_config, run_parallel, worker_count
from base_logger import logger

LT_TOLERANCE = 1e-9


def _radial_potential(kind, rng, radius, max_amp):
    if kind == 'radial_step':
        value = float(rng.uniform(0.05, max_amp))
        return Potential('radial_step', {'r0': float(rng.uniform(0.5, radius / 2)),  # noqa pylint: disable=C0301
                                         'value': value}, bound=value)
    terms = int(rng.integers(1, 4))
    heights = [float(h) for h in rng.uniform(0.05, max_amp, size=terms)]
    return Potential('bumps', {
        'centers': [float(c) for c in rng.uniform(1.0, radius, size=terms)],
        'heights': heights,
        'widths': [float(w) for w in rng.uniform(0.3, 1.5, size=terms)]},
        bound=float(sum(heights)))


def draw_instance(suite, rng):
    """Potential and case (α, or d with boundary) of one seeded instance."""
    kind = suite['kinds'][int(rng.integers(len(suite['kinds'])))]
    case = {}
    if suite['family'] == 'fractional':
        case['alpha'] = suite['alphas'][int(rng.integers(len(suite['alphas'])))]  # noqa pylint: disable=C0301
    if suite['family'] == 'bessel':
        case = dict(suite['cases'][int(rng.integers(len(suite['cases'])))])
        return _radial_potential(kind, rng, suite['radius'],
                                 suite['max_amp']), case
    V = random_potential(kind, rng, dimension=suite['dimension'],
                         radius=suite['radius'], max_amp=suite['max_amp'])
    return V, case


def exact_counts(suite, V, case):
    """Counts over the suite's truncations; returns (counts, converged).

    For the radial and continuum families the counts run over the grid
    steps and only feed the convergence flag.
    """
    family = suite['family']
    if family in ('bessel', 'continuum1d'):
        boundary = case.get('boundary', 'dirichlet')
        boundary = 'neumann' if boundary == 'none' else boundary
        counts = []
        for step in suite['steps']:
            spec = OperatorSpec(family, half_width=suite['outer'], step=step,
                                d=case.get('d'), boundary=boundary)
            counts.append(count_nonpositive(assemble(spec, V)))
        return counts, len(set(counts)) == 1

    def build(half_width):
        return assemble(OperatorSpec(family, half_width=half_width,
                                     alpha=case.get('alpha')), V)

    return box_convergence(build, suite['schedule'])


def exact_target(suite, V, counts):
    """Exact N₀ that the suite's bounds must dominate.

    The continuum problem on [−L, L] is counted by its oscillation number;
    radial grids take the smallest count over the steps and lattice boxes
    the count on the largest box.
    """
    family = suite['family']
    if family == 'continuum1d':
        exact = oscillation_count_1d(V, suite['outer'])
        if exact not in counts:
            logger.warning(f"Oscillation count {exact} differs from grid counts {counts} for {V.family}")  # noqa pylint: disable=W1203,C0301
        return exact
    if family == 'bessel':
        return min(counts)
    return counts[-1]


def exact_lt_sums(suite, V):
    """S_γ on the largest box of a lattice suite."""
    spec = OperatorSpec(suite['family'], half_width=suite['schedule'][-1])
    report = spectral_report(assemble(spec, V), gammas=suite['gammas'])
    return report.lt_sums


def evaluate_bounds(suite, V, case):
    """Certified bound reports of a suite, keyed by check name.

    Bounds that cannot be evaluated on the instance are returned as the
    error message instead of a report.
    """
    sigma = suite['sigmas'][0]
    family = suite['family']
    tasks = {}
    for name in suite['bounds']:
        if name == 'bargmann_1d':
            mode = 'continuum' if family == 'continuum1d' else 'lattice'
            tasks[name] = lambda m=mode: bargmann_1d(V, mode=m)
        elif name == 'refined_bargmann_1d':
            mode = 'continuum' if family == 'continuum1d' else 'lattice'
            tasks[name] = lambda m=mode: refined_bargmann_1d(V, sigma, mode=m)
        elif name == 'refined_display':
            tasks[name] = lambda: refined_bargmann_1d(V, sigma, mode='continuum')  # noqa pylint: disable=C0301
        elif name == 'barggen':
            tasks[name] = lambda: barggen(V, family)
        elif name == 'clr_lattice1d':
            tasks[name] = lambda: clr_heat_kernel_bound(
                V, LatticeKilled1DTail(), sigma, mode='lattice1d',
                cutoff=LATTICE_CUTOFF[1])
        elif name == 'lattice_2d_clr':
            if V.family in suite.get('clr_kinds', []):
                tasks[name] = lambda: lattice_2d_clr(V, sigma)
        elif name == 'fractional':
            tasks[name] = lambda: fractional_bounds(case['alpha'], V, sigma)
        elif name == 'bessel':
            tasks[name] = lambda: bessel_bounds(case['d'], V, sigma,
                                                boundary=case['boundary'])
        elif name.startswith('lt_'):
            for gamma in suite['gammas']:
                tasks[f'{name}@{gamma:g}'] = lambda g=gamma, v=name[3:]: \
                    lt_bounds(g, V, v, sigma=sigma, mode='lattice')
        else:
            raise ArgumentError('unknown bound in suite', {'bound': name})
    reports = {}
    for name, task in tasks.items():
        try:
            reports[name] = task()
        except ClrLabError as error:
            logger.warning(f"Bound {name} skipped on {V.family}: {error}")  # noqa pylint: disable=W1203
            reports[name] = str(error)
    return reports


def _checked_value(name, report):
    if name == 'refined_display':
        return report.components.get('display_value')
    if report.value is None or not report.certified:
        return None
    return report.value


def check_instance(args):
    """Runs one seeded instance; returns its ledger record."""
    suite_name, index, seed_seq = args
    suite = suites[suite_name]
    rng = np.random.default_rng(seed_seq)
    V, case = draw_instance(suite, rng)
    record = {'suite': suite_name, 'index': index, 'potential': V.to_dict(),
              'case': case, 'bounds': {}, 'errors': {}, 'violations': []}
    counts, converged = exact_counts(suite, V, case)
    exact = exact_target(suite, V, counts)
    record.update({'counts': counts, 'converged': converged, 'exact': exact})
    lt_sums = exact_lt_sums(suite, V) if 'gammas' in suite else {}
    for name, report in evaluate_bounds(suite, V, case).items():
        if isinstance(report, str):
            record['errors'][name] = report
            continue
        value = _checked_value(name, report)
        target = exact
        if '@' in name:
            target = lt_sums[float(name.split('@')[1])]
        record['bounds'][name] = {'value': value, 'status': report.status,
                                  'exact': target}
        if value is None:
            continue
        slack = LT_TOLERANCE * max(1.0, target) if '@' in name else 0.0
        if value < target - slack:
            record['violations'].append({'bound': name, 'value': value,
                                         'exact': target})
    return record


class DominanceValidator():
    """Runs seeded dominance suites and keeps the violation ledger.

    Instance generators are spawned from one SeedSequence per suite, so a
    run depends on the seed only, never on the worker count.
    """

    def __init__(self, seed, n=200, workers=None):
        """Initializes DominanceValidator.

        Args:
            seed (int): Root seed of every suite.
            n (int): Instances per suite.
            workers (int, optional): Process count; defaults to the
                backend setting capped by CLR_LAB_THREADS.
        """
        if seed is None:
            raise ArgumentError('randomized suites need a seed')
        if n < 1:
            raise ArgumentError('suite size must be positive', {'n': n})
        self.seed = int(seed)
        self.n = int(n)
        self.workers = workers or worker_count(load_backend_config())
        self.ledger = []

    def run_suite(self, name):
        """Runs one suite.

        Returns:
            dict: instances, checks, unconverged count, errors, violations
            and the per-instance records.
        """
        if name not in suites or not suites[name]:
            raise ArgumentError('unknown verification suite', {'suite': name})
        children = np.random.SeedSequence(self.seed).spawn(self.n)
        logger.info(f"Suite {name}: {self.n} instances, seed {self.seed}")  # noqa pylint: disable=W1203
        records = run_parallel(check_instance,
                               [(name, i, c) for i, c in enumerate(children)],
                               workers=self.workers, max_retries=0)
        for record in records:
            if isinstance(record, Exception):
                raise record
        violations = [dict(v, suite=name, index=r['index'],
                           potential=r['potential'], case=r['case'])
                      for r in records for v in r['violations']]
        self.ledger.extend(violations)
        summary = {
            'suite': name, 'seed': self.seed, 'instances': self.n,
            'checks': sum(1 for r in records for b in r['bounds'].values()
                          if b['value'] is not None),
            'unconverged': sum(1 for r in records if not r['converged']),
            'errors': sum(len(r['errors']) for r in records),
            'violations': violations, 'records': records}
        logger.info(f"Suite {name}: violations: {len(violations)}")  # noqa pylint: disable=W1203
        return summary

    def run(self, names):
        return {name: self.run_suite(name) for name in names}

    @property
    def passed(self):
        return not self.ledger
