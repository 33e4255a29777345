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

import math
import numpy as np
import pytest

import bounds
from bounds import BoundReport
from errors import ArgumentError, DomainError, NumericalError
from kernels import LatticeKilled1DTail
from operators import OperatorSpec, assemble
from potentials import parse_potential
from spectra import count_nonpositive, oscillation_count_1d, spectral_report
import validator


@pytest.fixture
def square_well():
    return parse_potential('constant_on_set:radius=1,value=4', bound=4.0)


def test_bound_report_rejects_negative_values():
    with pytest.raises(NumericalError):
        BoundReport(name='x', value=-1.0)
    with pytest.raises(ArgumentError):
        BoundReport(name='x', value=1.0, status='guess')
    report = BoundReport(name='x', value=float('nan'))
    assert math.isinf(report.value)
    assert report.compare(3)['dominates']


def test_uncertified_statuses_clear_the_certified_flag():
    for status in ('structural', 'fitted'):
        assert not BoundReport(name='x', value=1.0, status=status).certified
    assert BoundReport(name='x', value=1.0,
                       status='certified-up-to-tail').certified


def test_bargmann_and_barggen_on_shifted_delta():
    V = parse_potential('delta:site=4,amp=3')
    assert bounds.bargmann_1d(V).value == 13.0
    report = bounds.barggen(V, 'lattice1d')
    assert report.components['f1'] == 13.0
    assert report.components['f2'] == 2.0
    assert report.value == 2.0
    exact = count_nonpositive(assemble(OperatorSpec('lattice1d', half_width=64), V))  # noqa pylint: disable=C0301
    assert exact == 1


def test_barggen_two_dimensional_nearest_neighbour():
    V = parse_potential('delta:site=1|0,amp=2')
    report = bounds.barggen(V, 'lattice2d')
    assert report.components['f1'] == pytest.approx(2.0, abs=1e-9)


def test_barggen_picks_best_killing_site():
    V = parse_potential('delta:site=10,amp=0.5')
    report = bounds.barggen(V, 'lattice1d', x0s=(0, 10))
    assert report.components['x0'] == '10'
    assert report.value == 1.0


def test_dyadic_divergence_threshold():
    k = np.arange(1, 21, dtype=float)
    assert bounds.dyadic_divergence(1.0 / k)['divergent']
    converging = bounds.dyadic_divergence(k ** -2.0)
    assert not converging['divergent']
    assert converging['tail_estimate'] == pytest.approx(1.0 / 20.0, rel=0.1)


def test_bargmann_diverges_for_inverse_square_tail():
    V = parse_potential('power:p=2')
    report = bounds.bargmann_1d(V)
    assert math.isinf(report.value)
    assert report.diagnostics['divergent']


def test_clr_lattice_dominates_count():
    V = parse_potential('delta:site=4;-3,amp=3')
    exact = count_nonpositive(assemble(OperatorSpec('lattice1d', half_width=64), V))  # noqa pylint: disable=C0301
    for sigma in (0.1, 1.0, 5.0):
        report = bounds.clr_heat_kernel_bound(V, LatticeKilled1DTail(), sigma)
        assert report.value >= exact
        assert report.components['c_sigma'] == pytest.approx(
            bounds.c_sigma(sigma))


def test_clr_at_killing_site_is_rank_one(single_delta):
    report = bounds.clr_heat_kernel_bound(single_delta, LatticeKilled1DTail(),
                                          1.0)
    assert report.value == 1.0


def test_continuum_bounds_on_square_well(square_well):
    exact = oscillation_count_1d(square_well, 20.0)
    assert exact == 2
    assert bounds.bargmann_1d(square_well, mode='continuum').value == \
        pytest.approx(5.0, rel=1e-9)
    refined = bounds.refined_bargmann_1d(square_well, 1.0)
    assert refined.value >= exact
    assert refined.components['display_value'] >= refined.value * (1 - 1e-9)


def test_continuum_bounds_need_a_density(single_delta):
    with pytest.raises(ArgumentError):
        bounds.bargmann_1d(single_delta, mode='continuum')


def test_sigma_search():
    def evaluator(sigma):
        return BoundReport(name='q', value=math.log(sigma) ** 2 + 1.0,
                           sigma=sigma)

    best = bounds.minimize_sigma(evaluator)
    assert best.sigma == pytest.approx(1.0, rel=1e-2)
    reports, best = bounds.sigma_scan(evaluator, [0.5, 1.0, 4.0])
    assert len(reports) == 3 and best.sigma == 1.0
    with pytest.raises(ArgumentError):
        bounds.minimize_sigma(evaluator, bracket=(1.0, 0.5))


def test_refined_2d_structural_and_fitted():
    V = parse_potential('delta:site=0|0;5|0,amp=0.2')
    report = bounds.refined_2d(V, 1.0)
    assert report.status == 'structural' and report.value is None
    fitted = bounds.refined_2d(V, 1.0, constants={'C1': 1.0, 'C2': 1.0})
    first = report.components['first']
    second = report.components['second']
    assert fitted.value == pytest.approx(first + second + 1.0)
    assert fitted.status == 'fitted'


def test_fit_structural_constants_cover_training_records():
    records = [{'first': 1.0, 'second': 0.0, 'n_strong': 0, 'exact': 3},
               {'first': 0.0, 'second': 2.0, 'n_strong': 1, 'exact': 4}]
    constants = bounds.fit_structural_constants(records, safety=1.0)
    assert constants['C1'] == pytest.approx(2.0, abs=1e-7)
    assert constants['C2'] == pytest.approx(1.0, abs=1e-7)
    check = bounds.validate_structural_constants(records, constants)
    assert check['violations'] == []


def test_fractional_bounds():
    V = parse_potential('delta:site=7,amp=0.5')
    transient = bounds.fractional_bounds(0.25, V)
    assert transient.name == 'fractional_transient'
    assert transient.value > 0
    half = bounds.fractional_bounds(0.5, V)
    assert half.components['asymptotic_term'] == pytest.approx(
        0.5 * math.log(7.0) / math.pi)
    one = bounds.fractional_bounds(1.0, V)
    assert one.components['c_alpha'] == pytest.approx(1.0, rel=1e-8)
    assert one.components['f1'] == pytest.approx(0.5 * 7.0 + 1.0, rel=1e-8)
    with pytest.raises(ArgumentError):
        bounds.fractional_bounds(1.5, V)


def test_bessel_three_dimensional_bound():
    V = parse_potential('radial_step:r0=1,value=30')
    report = bounds.bessel_bounds(3.0, V)
    assert report.components['structural_integral'] == pytest.approx(
        30.0 ** 1.5 / 3.0, rel=1e-8)
    assert report.value >= 2
    with pytest.raises(ArgumentError):
        bounds.bessel_bounds(2.0, V)


def test_lieb_thirring_variants(square_well):
    rebarg = bounds.lt_bounds(1.0, square_well, 'rebarg11')
    assert rebarg.value == pytest.approx(4.0 + 16.0, rel=1e-9)
    spec = OperatorSpec('continuum1d', half_width=20.0, step=0.02)
    exact = spectral_report(assemble(spec, square_well), gammas=[1.0]).lt_sums[1.0]  # noqa pylint: disable=C0301
    for variant in ('rebarg11', 'lit9', 'lithi9', 'one_to_one'):
        assert bounds.lt_bounds(1.0, square_well, variant).value >= exact
    with pytest.raises(ArgumentError):
        bounds.lt_bounds(1.0, square_well, 'bargmann_lt')
    with pytest.raises(DomainError):
        bounds.lt_bounds(1.0, square_well, 'rebarg11', Lambda=1.0)


def test_small_gamma_variants(square_well):
    for variant in ('bargmann_lt', 'gamma_lt_half'):
        report = bounds.lt_bounds(0.25, square_well, variant)
        assert report.value > square_well.sup() ** 0.25


def test_two_dimensional_lieb_thirring_components():
    V = parse_potential('constant_on_set:center=0|0,radius=1,value=0.5')
    report = bounds.lt_bounds(0.5, V, 'lt_2d')
    assert report.status == 'structural'
    assert report.components['potential_integral'] > 0
    assert report.components['killed_integral'] >= \
        report.components['disk_integral']


def test_lieb_thirring_statuses(square_well):
    for variant in ('rebarg11', 'lit9', 'one_to_one'):
        report = bounds.lt_bounds(1.0, square_well, variant)
        assert report.status == 'certified' and report.certified
    tail = bounds.lt_bounds(1.0, parse_potential('power:p=3,amp=0.5'),
                            'rebarg11')
    assert tail.status == 'certified-up-to-tail'
    assert tail.diagnostics['truncated']
    assert math.isfinite(tail.value)


def test_fitted_two_dimensional_lieb_thirring_is_not_certified():
    V = parse_potential('constant_on_set:center=0|0,radius=1,value=0.5')
    report = bounds.lt_bounds(0.5, V, 'lt_2d',
                              constants={'a1': 2.0, 'a2': 3.0})
    assert report.status == 'fitted' and not report.certified
    assert report.value == pytest.approx(
        2.0 + 3.0 * report.components['potential_integral'])
    assert validator._checked_value('lt_lt_2d@0.5', report) is None  # pylint: disable=W0212
    with pytest.raises(ArgumentError):
        bounds.lt_bounds(0.5, V, 'lt_2d', constants={'a1': -1.0, 'a2': 1.0})


def test_gamma_weight():
    np.testing.assert_allclose(bounds.gamma_weight([0.5, 1.0, math.e]),
                               [1.0, 1.0, math.e ** 2])
