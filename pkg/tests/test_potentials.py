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

from errors import ArgumentError, DomainError
from potentials import Potential, parse_potential, random_potential


def test_parse_single_delta():
    V = parse_potential('delta:site=0,amp=3')
    assert V.family == 'delta'
    assert V.site_table() == {0: 3.0}
    np.testing.assert_allclose(V.sample(np.array([-1, 0, 1])), [0.0, 3.0, 0.0])


def test_parse_two_dimensional_sites():
    V = parse_potential('delta:site=1|0;0|2,amp=2')
    assert V.site_table() == {(1, 0): 2.0, (0, 2): 2.0}
    values = V.sample(np.array([[1, 0], [0, 2], [0, 0]]))
    np.testing.assert_allclose(values, [2.0, 2.0, 0.0])


def test_inv_linear_and_power_agree():
    coords = np.arange(-5, 6)
    np.testing.assert_allclose(parse_potential('inv_linear')(coords),
                               parse_potential('power:p=1')(coords))


def test_log_corrected_supremum_at_origin():
    V = parse_potential('log_corrected:amp=1,q=1')
    assert V.sup() == pytest.approx(1.0 / math.log(2.0))
    assert V(np.array([0.0]))[0] == pytest.approx(V.sup())


def test_dyadic_block_values():
    V = parse_potential('dyadic_block:values=1;2;3')
    np.testing.assert_allclose(V(np.array([0.5, 1.0, 2.5, 7.0, 8.0])),
                               [0.0, 1.0, 2.0, 3.0, 0.0])
    assert V.support_radius() == 8.0


def test_scaled_potential_scales_values_and_bound():
    V = parse_potential('constant_on_set:radius=2,value=1.5', bound=1.5)
    W = V.scaled(2.0)
    assert W.bound == 3.0
    np.testing.assert_allclose(W(np.array([0.0, 3.0])), [3.0, 0.0])


def test_sample_rejects_values_above_bound():
    V = parse_potential('delta:site=0,amp=3', bound=1.0)
    with pytest.raises(DomainError):
        V.sample(np.array([0]))


def test_parse_errors():
    with pytest.raises(ArgumentError):
        parse_potential('')
    with pytest.raises(ArgumentError):
        parse_potential('coulomb:amp=1')
    with pytest.raises(ArgumentError):
        parse_potential('delta:amp=1')
    with pytest.raises(ArgumentError):
        parse_potential('power:p')


def test_from_dict_restores_two_dimensional_sites():
    V = parse_potential('delta:site=1|0;0|2,amp=2')
    data = {'family': 'delta', 'bound': None,
            'params': {'sites': [[1, 0], [0, 2]], 'amps': [2.0]}}
    assert Potential.from_dict(data).site_table() == V.site_table()


@pytest.mark.parametrize('kind', ['deltas', 'bumps', 'step'])
@pytest.mark.parametrize('dimension', [1, 2])
def test_random_potential_is_seeded_and_non_negative(kind, dimension):
    first = random_potential(kind, np.random.default_rng(3), dimension=dimension)
    second = random_potential(kind, np.random.default_rng(3), dimension=dimension)
    assert first == second
    coords = np.arange(-10, 11) if dimension == 1 else         np.array([[i, j] for i in range(-3, 4) for j in range(-3, 4)])
    assert np.all(first.sample(coords) >= 0)


def test_random_potential_unknown_kind(rng):
    with pytest.raises(ArgumentError):
        random_potential('coulomb', rng)
