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

import special
from errors import ArgumentError


def test_c_sigma_matches_exponential_integral():
    assert special.c_sigma(1.0) == pytest.approx(0.148495, abs=1e-6)
    for sigma in (0.1, 0.5, 2.0, 7.0):
        assert special.c_sigma(sigma) == pytest.approx(
            special.exp_integral_c_sigma(sigma), rel=1e-9)


def test_c_sigma_at_zero_and_negative():
    assert special.c_sigma(0.0) == 1.0
    with pytest.raises(ArgumentError):
        special.c_sigma(-0.1)


def test_f_gamma_profile():
    assert special.F_gamma(0.0) == 1.0
    assert special.F_gamma(4.0) <= 1.0 / math.sqrt(4.0 * math.pi)
    for gamma in (0.01, 0.3, 1.0, 4.0, 25.0):
        value = special.F_gamma(gamma)
        assert 0.0 < value <= 1.0
        assert value <= 1.0 / math.sqrt(math.pi * gamma)
        assert value == pytest.approx(special.F_gamma_quadrature(gamma),
                                      rel=1e-8)


def test_weighted_tail_profile_diverges_for_large_weight():
    assert math.isinf(special.weighted_tail_profile(math.inf, 0.5))
    assert special.weighted_tail_profile(0.0, 0.2) == 0.0


def test_beta_gamma_closed_form():
    for gamma in (0.1, 0.25, 0.4):
        assert special.beta_gamma(gamma) == pytest.approx(
            special.beta_gamma_closed(gamma), rel=1e-8)
    with pytest.raises(ArgumentError):
        special.beta_gamma(0.5)


def test_c_alpha_normalisation():
    assert special.c_alpha_closed(1.0) == pytest.approx(1.0)
    assert special.c_alpha(1.0) == pytest.approx(1.0, rel=1e-8)
    assert special.c_alpha(0.75) == pytest.approx(
        special.c_alpha_closed(0.75), rel=1e-7)
    assert special.c_alpha_printed(1.0) == pytest.approx(2.0, rel=1e-8)
    with pytest.raises(ArgumentError):
        special.c_alpha(0.5)


def test_fractional_coefficients_recurrence():
    h = special.fractional_coefficients(0.5, 4)
    assert h[0] == pytest.approx(4.0 / math.pi)
    assert h[1] == pytest.approx(-4.0 / (3.0 * math.pi))
    for n in range(5):
        assert h[n] == pytest.approx(
            special.fractional_coefficient_quadrature(0.5, n), abs=1e-10)


def test_fractional_coefficients_integer_alpha_is_laplacian():
    np.testing.assert_allclose(special.fractional_coefficients(1.0, 3),
                               [2.0, -1.0, 0.0, 0.0], atol=1e-15)


def test_periodic_trapezoid_bessel_integral():
    value, _ = special.periodic_trapezoid(lambda p: np.exp(2.0 * np.cos(p)))
    assert value / (2.0 * math.pi) == pytest.approx(
        float(special.bessel_i(0, 2.0)), rel=1e-12)
    assert float(special.bessel_i(0, 2.0, scaled=True)) == pytest.approx(
        0.3085083, abs=1e-7)


def test_richardson_recovers_constant_term():
    lambdas = np.array([1e-2, 1e-3, 1e-4, 1e-5])
    u = 1.0 / np.log(lambdas)
    value, err = special.richardson_log_lambda(lambdas, 0.7 + 0.3 * u)
    assert value == pytest.approx(0.7, abs=1e-10)
    assert err < 1e-8


def test_quadrature_spec_rejects_unknown_rule():
    with pytest.raises(ArgumentError):
        special.QuadratureSpec(rule='simpson')


def test_elementary_special_functions():
    assert float(special.bessel_j0(0.0)) == 1.0
    assert float(special.bessel_j0(2.404825557695773)) == pytest.approx(
        0.0, abs=1e-12)
    assert float(special.gamma_fn(0.5)) == pytest.approx(math.sqrt(math.pi))
    assert float(special.bessel_k0(1.0)) == pytest.approx(0.4210244382,
                                                          rel=1e-9)
    with pytest.raises(ArgumentError):
        special.bessel_k0(0.0)
    with pytest.raises(ArgumentError):
        special.gamma_fn(-1.0)
