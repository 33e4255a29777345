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
import networkx as nx
import numpy as np
import pytest
from scipy import integrate

import kernels
from errors import ArgumentError


def test_free_lattice_kernel_values():
    assert kernels.p0_lattice(1.0, 0) == pytest.approx(0.3085083, abs=1e-7)
    for n in (0, 1, 5):
        assert kernels.p0_lattice(1.0, n) == pytest.approx(
            kernels.p0_lattice_quadrature(1.0, n), abs=1e-12)
    assert kernels.p0_lattice(2.0, (1, 2)) == pytest.approx(
        kernels.p0_lattice(2.0, 1) * kernels.p0_lattice(2.0, 2))
    assert kernels.p0_lattice(0.0, 0) == 1.0


def test_killed_lattice_diagonal_two_ways():
    for t in (0.5, 3.0, 40.0):
        for n in (1, 4):
            assert kernels._p1_lattice_1d_diag(t, n) == pytest.approx(  # pylint: disable=W0212
                kernels.p1_lattice_1d(t, n, n), rel=1e-10)


def test_p_alpha_at_order_one_is_lattice_kernel():
    for n in (0, 1, 3):
        assert kernels.p_alpha(1.0, n, 1.0) == pytest.approx(
            kernels.p0_lattice(1.0, n), abs=1e-11)


def test_p_alpha_above_one_takes_negative_values():
    values = [kernels.p_alpha(1.0, n, 1.5) for n in range(21)]
    assert min(values) < 0
    assert values[0] > 0


def test_bessel_three_dimensional_kernel_is_elementary():
    for t, a, r in ((0.5, 1.0, 1.5), (2.0, 0.3, 2.0)):
        assert kernels.p_bessel(t, a, r, 3.0) == pytest.approx(
            kernels.p_bessel_d3_elementary(t, a, r), rel=1e-10)
    with pytest.raises(ArgumentError):
        kernels.p_bessel(1.0, 1.0, 1.0, 3.0, boundary='dirichlet')


def test_killed_bessel_diagonal_exponent():
    for d in (1.5, 1.2):
        assert kernels.bessel_diagonal_slope(d, 1e7) == pytest.approx(
            4 - 2 * d, abs=1e-3)
    assert kernels.bessel_diagonal_slope(3.0, 1e7, boundary='none') == \
        pytest.approx(0.0, abs=1e-3)


def test_half_line_time_integral():
    assert kernels.p1_continuum_1d_time_integral(3.0, 0.0) == 3.0
    tail = kernels.ContinuumHalfLineTail()
    assert tail.weighted_tail(2.0, 1.0, 0.0).value == pytest.approx(
        tail.tail(2.0, 1.0).value, rel=1e-9)


def test_lattice_killed_tail():
    tail = kernels.LatticeKilled1DTail()
    assert tail.tail(5, 0.0).value == 5.0
    values = [tail.tail(5, s).value for s in (1.0, 10.0, 100.0, 5000.0)]
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert 0.0 < values[-1] < 5.0


def test_one_dimensional_resolvent():
    lam = 0.3
    for n in (0, 1, 7):
        assert kernels.resolvent_lattice_1d(lam, n) == pytest.approx(
            kernels.resolvent_lattice_1d_printed(lam, n), rel=1e-12)
    assert kernels.killed_resolvent_identity(
        lambda x, y: kernels.resolvent_lattice_1d(lam, x, y), 4) == \
        pytest.approx(kernels.killed_resolvent_lattice_1d(lam, 4), rel=1e-12)
    assert kernels.resolvent_row_sum(0.5, 1, 200) == pytest.approx(-2.0)
    with pytest.raises(ArgumentError):
        kernels.resolvent_lattice_1d(0.0, 1)


def test_two_dimensional_resolvent_against_oracle():
    for site in ((0, 0), (1, 0), (2, 1)):
        value, _ = kernels.resolvent_lattice_2d(1.0, site)
        oracle, _ = kernels.resolvent_lattice_2d_oracle(1.0, site)
        assert value == pytest.approx(oracle, rel=1e-8)


def test_two_dimensional_logarithmic_singularity():
    lam = 1e-6
    value, _ = kernels.resolvent_lattice_2d(lam, (0, 0))
    expected = -math.log(32.0) / (4.0 * math.pi)
    assert value - math.log(lam) / (4.0 * math.pi) == pytest.approx(
        expected, abs=1e-3)
    constant, _ = kernels.green_constant_2d()
    assert constant == pytest.approx(expected, abs=5e-3)


def test_regularized_resolvents():
    assert kernels.regularized_resolvent('lattice1d', 7) == 7.0
    assert kernels.regularized_resolvent('lattice2d', (1, 0)) == \
        pytest.approx(0.5, abs=1e-9)
    assert kernels.regularized_resolvent('lattice2d', (0, 1)) == \
        pytest.approx(0.5, abs=1e-9)
    with pytest.raises(ArgumentError):
        kernels.regularized_resolvent('fractional', 3, alpha=0.3)


def test_graph_resistance_on_a_path():
    laplacian = nx.laplacian_matrix(nx.path_graph(5)).astype(float)
    values = kernels.regularized_resolvent_graph(laplacian, 0)
    assert values == pytest.approx({k: float(k) for k in range(5)})


def test_transient_tails_are_finite():
    fractional = kernels.FractionalTail(0.25)
    assert 0.0 < fractional.tail(0, 1.0).value < fractional.total()
    bessel = kernels.BesselTail(1.5, 'dirichlet')
    assert 0.0 < bessel.tail(1.0, 0.5).value < math.inf
    with pytest.raises(ArgumentError):
        kernels.FractionalTail(0.5)


def test_resolvent_table_checks_sign_and_norm():
    table = kernels.resolvent_table('lattice1d_closed', [1.0, 0.1],
                                    [(x, 0) for x in range(4)])
    assert table.check() == []
    assert table.half_value['(3,)'] == 1.5


def test_kernel_table_reports_negative_fractional_values():
    table = kernels.kernel_table('p_alpha', [1.0], list(range(-20, 21)),
                                 alpha=1.5)
    assert np.count_nonzero(table.values() < 0) > 0
    assert table.violations()
    restored = kernels.KernelTable.from_dict(table.to_dict())
    assert restored.points == table.points


def test_killed_walk_streams_do_not_depend_on_workers():
    first = kernels.simulate_killed_walks((1, 0), 2.0, 600, seed=11,
                                          chunk_size=200, workers=1)
    second = kernels.simulate_killed_walks((1, 0), 2.0, 600, seed=11,
                                           chunk_size=200, workers=2)
    np.testing.assert_array_equal(first, second)


@pytest.mark.slow
def test_survival_matches_killed_mass():
    t, x = 5.0, (1, 0)
    result = kernels.survival_probability(t, x, n_walks=20000, seed=3)
    exact = kernels.killed_mass(t, x)
    assert abs(result['estimate'] - exact) < 5 * result['stderr']


def test_free_kernel_chapman_kolmogorov():
    for s, t, x, z in ((0.7, 1.3, 2, -1), (4.0, 2.5, 0, 5)):
        total = sum(kernels.p0_lattice(s, x, y) * kernels.p0_lattice(t, y, z)
                    for y in range(-80, 81))
        assert total == pytest.approx(kernels.p0_lattice(s + t, x, z),
                                      abs=1e-12)
    # the half-line kernel composes over the sites it keeps
    total = sum(kernels.p1_lattice_1d(1.0, 3, y) * kernels.p1_lattice_1d(2.0, y, 2)  # noqa pylint: disable=C0301
                for y in range(1, 81))
    assert total == pytest.approx(kernels.p1_lattice_1d(3.0, 3, 2), abs=1e-12)


def test_free_kernel_is_stochastic():
    for t in (0.5, 5.0, 30.0):
        total = sum(kernels.p0_lattice(t, n) for n in range(-200, 201))
        assert total == pytest.approx(1.0, abs=1e-10)
    masses = [kernels.killed_mass(t, (1, 0)) for t in (0.5, 2.0, 8.0)]
    assert 1.0 > masses[0] > masses[1] > masses[2] > 0.0


def test_laplace_transform_of_kernel_is_resolvent():
    lam = 0.5
    for n in (0, 3):
        value, _ = integrate.quad(
            lambda t, m=n: math.exp(-lam * t) * kernels.p0_lattice(t, m),
            0.0, math.inf, epsabs=1e-13, epsrel=1e-11, limit=400)
        assert value == pytest.approx(-kernels.resolvent_lattice_1d(lam, n),
                                      abs=1e-8)
    value, _ = integrate.quad(
        lambda t: math.exp(-t) * kernels.p0_lattice(t, (1, 0)),
        0.0, math.inf, epsabs=1e-13, epsrel=1e-11, limit=400)
    resolvent, _ = kernels.resolvent_lattice_2d(1.0, (1, 0))
    assert value == pytest.approx(-resolvent, abs=1e-6)


@pytest.mark.parametrize('alpha', [0.3, 0.5, 1.0])
def test_p_alpha_is_positive_up_to_order_one(alpha):
    for t in (0.5, 5.0):
        assert min(kernels.p_alpha(t, n, alpha) for n in range(11)) > 0


@pytest.mark.parametrize('alpha', [0.6, 0.8, 1.0])
def test_p_alpha_diagonal_tail_law(alpha):
    t = 1e4
    scaled = kernels.p_alpha(t, 0, alpha) * t ** (0.5 / alpha)
    assert scaled == pytest.approx(kernels.p_alpha_asymptotic_constant(alpha),
                                   rel=0.02)


def test_hitting_ratio_gives_killed_resolvent():
    for lam in (0.5, 0.01):
        origin = kernels.resolvent_lattice_1d(lam, 0)
        for x in (1, 3, 8):
            ratio = kernels.hitting_laplace_ratio(lam, x)
            assert origin * (1.0 - ratio ** 2) == pytest.approx(
                kernels.killed_resolvent_lattice_1d(lam, x), rel=1e-12)
    ratios = [kernels.hitting_laplace_ratio(lam, (1, 0), dimension=2)
              for lam in (1.0, 1e-2, 1e-4)]
    assert 0.0 < ratios[0] < ratios[1] < ratios[2] < 1.0
    checks = kernels.resolvent_cross_checks('lattice1d_closed', [1.0, 0.1],
                                            range(5))
    assert checks['mismatches'] == []
    assert checks['hitting']['1.0']['0'] == 1.0


def test_regularized_limit_matches_direct_value():
    for site in ((1, 0), (2, 1)):
        limit, _ = kernels.regularized_resolvent_limit_2d(site)
        assert limit == pytest.approx(
            kernels.regularized_resolvent('lattice2d', site), abs=1e-3)
    checks = kernels.resolvent_cross_checks('lattice2d_quadrature', [0.5],
                                            [(0, 0), (1, 0)])
    assert checks['mismatches'] == []
    assert checks['regularized_limit']['(1, 0)']['direct'] == \
        pytest.approx(0.5, abs=1e-9)


def test_disk_well_kernel():
    free, error = kernels.p1_continuum_2d_diag(1.0, 2.0, q=0.0)
    assert free == pytest.approx(1.0 / (4.0 * math.pi), rel=1e-2)
    assert error < 1e-6
    values = [kernels.p1_continuum_2d_diag(2.0, 1.5, q=q)[0]
              for q in (0.0, 1.0, 4.0)]
    assert values[0] > values[1] > values[2] > 0.0
    with pytest.raises(ArgumentError):
        kernels.p1_continuum_2d_diag(1.0, 0.0)


def test_killed_diagonal_from_hitting_times():
    t, x = 3.0, (1, 0)
    taus = kernels.simulate_killed_walks(x, t, 5000, seed=8)
    estimate, stderr = kernels.killed_diagonal_from_hitting(t, x, taus)
    assert abs(estimate - kernels.p1_lattice_2d(t, x)) < 5 * stderr + 1e-6


@pytest.mark.slow
def test_survival_follows_logarithmic_tail():
    s, x = 1e6, (10, 0)
    result = kernels.survival_probability(s, x, n_walks=20000, seed=5)
    ratio = result['estimate'] / (2.0 * math.log(10.0) / math.log(s))
    assert 0.6 <= ratio <= 1.6
    assert result['seed'] == 5


def test_hitting_ratio_matches_simulated_hitting_times():
    lam, x = 1.0, (1, 0)
    taus = kernels.simulate_killed_walks(x, 30.0, 5000, seed=21)
    discounts = np.exp(-lam * taus)
    estimate = float(np.mean(discounts))
    stderr = float(np.std(discounts, ddof=1) / math.sqrt(taus.size))
    expected = kernels.hitting_laplace_ratio(lam, x, dimension=2)
    assert abs(estimate - expected) < 5 * stderr
