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

import numpy as np
import pytest

import validator
from errors import ArgumentError
from operators import OperatorSpec, assemble
from potentials import Potential
from spectra import count_nonpositive, eigenvalues_below, oscillation_count_1d
from suite_mapping.suites import SUITE_NAMES, suites


def test_every_suite_is_loaded():
    for name in SUITE_NAMES:
        assert suites[name]['family']
        assert suites[name]['bounds']


def test_draw_instance_depends_on_seed_only():
    suite = suites['bargmann1d']
    first, _ = validator.draw_instance(suite, np.random.default_rng(5))
    second, _ = validator.draw_instance(suite, np.random.default_rng(5))
    assert first.to_dict() == second.to_dict()


def test_fractional_and_bessel_cases():
    _, case = validator.draw_instance(suites['fractional'],
                                      np.random.default_rng(1))
    assert case['alpha'] in suites['fractional']['alphas']
    _, case = validator.draw_instance(suites['bessel'],
                                      np.random.default_rng(1))
    assert case in suites['bessel']['cases']


def test_check_instance_record():
    seed = np.random.SeedSequence(11).spawn(1)[0]
    record = validator.check_instance(('bargmann1d', 0, seed))
    assert record['exact'] == record['counts'][-1]
    assert set(record['bounds']) | set(record['errors']) == set(
        suites['bargmann1d']['bounds'])
    assert record['violations'] == []
    for check in record['bounds'].values():
        if check['value'] is not None:
            assert check['value'] >= check['exact']


def test_lieb_thirring_checks_are_keyed_by_gamma():
    seed = np.random.SeedSequence(3).spawn(1)[0]
    record = validator.check_instance(('lt1d', 0, seed))
    assert 'lt_rebarg11@0.5' in record['bounds']
    assert 'lt_lit9@1' in record['bounds']
    assert record['violations'] == []


def test_suite_summary_and_ledger():
    checker = validator.DominanceValidator(seed=2, n=3, workers=1)
    summary = checker.run_suite('bargmann1d')
    assert summary['instances'] == 3
    assert len(summary['records']) == 3
    assert summary['checks'] > 0
    assert summary['violations'] == []
    assert checker.passed


def test_suite_does_not_depend_on_worker_count():
    single = validator.DominanceValidator(seed=4, n=2, workers=1)
    pooled = validator.DominanceValidator(seed=4, n=2, workers=2)
    assert single.run_suite('lattice2d')['records'] == \
        pooled.run_suite('lattice2d')['records']


def test_validator_arguments():
    with pytest.raises(ArgumentError):
        validator.DominanceValidator(seed=None)
    with pytest.raises(ArgumentError):
        validator.DominanceValidator(seed=1, n=0)
    with pytest.raises(ArgumentError):
        validator.DominanceValidator(seed=1, n=1, workers=1).run_suite('nope')


def test_continuum_target_is_the_oscillation_count():
    seed = np.random.SeedSequence(9).spawn(1)[0]
    record = validator.check_instance(('continuum1d', 0, seed))
    V = Potential.from_dict(record['potential'])
    assert record['exact'] == oscillation_count_1d(V, suites['continuum1d']['outer'])  # noqa pylint: disable=C0301
    assert len(record['counts']) == len(suites['continuum1d']['steps'])
    assert record['violations'] == []


@pytest.mark.slow
def test_oscillation_count_agrees_with_inertia():
    suite = suites['continuum1d']
    for seed in np.random.SeedSequence(2024).spawn(20):
        V, case = validator.draw_instance(suite, np.random.default_rng(seed))
        A = assemble(OperatorSpec('continuum1d', half_width=suite['outer'],
                                  step=0.01), V)
        fd = count_nonpositive(A)
        oscillation = oscillation_count_1d(V, suite['outer'])
        if oscillation != fd:
            # only a level inside the grid error of zero may move
            assert abs(oscillation - fd) == 1
            assert any(abs(v) < 1e-3 for v in eigenvalues_below(A, 1e-3))
        assert case == {}
