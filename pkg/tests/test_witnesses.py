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

import witnesses
from errors import ArgumentError, ClrLabError, ResourceError
from operators import LatticeBox, OperatorSpec, assemble_lattice
from potentials import parse_potential


@pytest.fixture
def inverse_linear():
    return parse_potential('inv_linear')


def test_quadratic_form_matches_matrix_in_1d(inverse_linear):
    lo, hi = witnesses.dyadic_block(3)
    trial = witnesses.TrialFunction(
        'sine-block', (lo,), witnesses._sine_values(lo, hi),  # pylint: disable=W0212
        {'kind': 'interval', 'lo': lo + 1, 'hi': hi - 1})
    form = witnesses.LatticeQuadraticForm(inverse_linear, 1)
    matrix = assemble_lattice(OperatorSpec('lattice1d'), LatticeBox(1, 40),
                              inverse_linear)
    assert witnesses.rayleigh_quotient(form, trial) == pytest.approx(
        witnesses.rayleigh_quotient(matrix, trial), abs=1e-12)


def test_layer_quotient_three_ways(inverse_linear):
    k, l = 1, 4
    trial = witnesses.layer_trial(k, l)
    form = witnesses.LatticeQuadraticForm(inverse_linear, 2)
    matrix = assemble_lattice(OperatorSpec('lattice2d'), LatticeBox(2, 9),
                              inverse_linear)
    shells = witnesses.layer_quotient(inverse_linear, k, l)['quotient']
    assert witnesses.rayleigh_quotient(form, trial) == pytest.approx(
        shells, abs=1e-12)
    assert witnesses.rayleigh_quotient(matrix, trial) == pytest.approx(
        shells, abs=1e-12)


def test_layer_taper_is_harmonic_off_the_diagonals():
    for k, l in ((1, 4), (2, 8), (16, 32)):
        assert witnesses.taper_defect(k, l) == 0
    with pytest.raises(ArgumentError):
        witnesses.layer_profile(4, 4)


def test_layer_kinetic_energy_of_the_taper():
    result = witnesses.layer_quotient(parse_potential('zero'), 16, 32)
    assert result['kinetic'] == pytest.approx(8 * 16 + 4 + 12)
    assert result['quotient'] > 0


def test_vanishing_trial_function_rejected():
    trial = witnesses.TrialFunction('sine-block', (0,), np.zeros(5),
                                    {'kind': 'interval', 'lo': 0, 'hi': 4})
    with pytest.raises(ArgumentError):
        witnesses.rayleigh_quotient(
            witnesses.LatticeQuadraticForm(None, 1), trial)


def test_support_disjointness():
    first = {'kind': 'interval', 'lo': 1, 'hi': 7}
    assert witnesses.supports_disjoint(first, {'kind': 'interval', 'lo': 8, 'hi': 9})  # noqa pylint: disable=C0301
    assert not witnesses.supports_disjoint(first, {'kind': 'interval', 'lo': 7, 'hi': 9})  # noqa pylint: disable=C0301
    shell = {'kind': 'shell', 'inner': 2, 'outer': 15}
    assert witnesses.supports_disjoint(shell, {'kind': 'shell', 'inner': 17, 'outer': 63})  # noqa pylint: disable=C0301
    box = {'kind': 'box', 'center': (0, 0), 'radius': 3}
    assert not witnesses.supports_disjoint(box, {'kind': 'box', 'center': (6, 0), 'radius': 3})  # noqa pylint: disable=C0301
    with pytest.raises(ArgumentError):
        witnesses.supports_disjoint(first, shell)


def test_dyadic_witnesses_for_inverse_linear_decay(inverse_linear):
    certificate = witnesses.dyadic_witnesses_1d(inverse_linear, range(1, 18))
    assert certificate.certified_count >= 5
    assert certificate.disjointness_checked
    ks = [w['k'] for w in certificate.witnesses]
    assert all(b - a >= witnesses.BLOCK_SPACING for a, b in zip(ks, ks[1:]))
    assert certificate.diagnostics['hypothesis']['divergent']


def test_dyadic_witnesses_continuum_mode(inverse_linear):
    certificate = witnesses.dyadic_witnesses_1d(inverse_linear, range(2, 12),
                                                mode='continuum')
    assert certificate.certified_count >= 3
    with pytest.raises(ArgumentError):
        witnesses.dyadic_witnesses_1d(inverse_linear, mode='radial')


def test_zero_potential_has_no_witnesses():
    zero = parse_potential('zero')
    assert witnesses.dyadic_witnesses_1d(zero, range(1, 10)).certified_count == 0  # noqa pylint: disable=C0301
    assert witnesses.layer_witnesses_2d(zero, half_width=64).certified_count == 0  # noqa pylint: disable=C0301


def test_explicit_layer_scales(inverse_linear):
    certificate = witnesses.layer_witnesses_2d(
        inverse_linear, scales=[(1, 8), (4, 12), (16, 32)], half_width=64)
    pairs = [(w['k'], w['l']) for w in certificate.witnesses]
    assert (1, 8) in pairs and (16, 32) in pairs
    assert (4, 12) not in pairs
    assert certificate.disjointness_checked


@pytest.mark.slow
def test_automatic_layers_for_inverse_linear_decay():
    V = parse_potential('inv_linear')
    certificate = witnesses.layer_witnesses_2d(V, half_width=1024)
    assert certificate.certified_count >= 4
    assert certificate.disjointness_checked


def test_binding_radius_single_well():
    radius, lam, quotient = witnesses.binding_radius(3.0)
    assert lam == pytest.approx(math.sqrt(13) - 2, rel=1e-10)
    assert quotient < -lam / 2
    with pytest.raises(ResourceError):
        witnesses.binding_radius(1.0 / 256, capacity=64)
    assert radius >= 1


def test_sparse_delta_construction_in_1d():
    alphas = [4.0 ** -n for n in range(1, 5)]
    V, certificate, total = witnesses.sparse_delta_construction(alphas, 0.5)
    assert total == pytest.approx(15.0 / 16.0)
    assert certificate.certified_count == 4
    assert certificate.disjointness_checked
    count = witnesses.certify_inertia(certificate, V, 1)
    assert count >= 4
    assert certificate.inertia_count == count


def test_sparse_delta_construction_in_2d():
    V, certificate, _ = witnesses.sparse_delta_construction(
        [4.0, 2.0], 1.0, family='lattice2d')
    assert certificate.certified_count == 2
    assert witnesses.certify_inertia(certificate, V, 2) >= 2


def test_sparse_delta_capacity():
    with pytest.raises(ResourceError):
        witnesses.sparse_delta_construction([0.5, 0.25, 0.125], 0.5,
                                            capacity=16)
    with pytest.raises(ArgumentError):
        witnesses.sparse_delta_construction([1.0, 0.0], 0.5)


def test_inertia_check_rejects_inflated_certificate():
    certificate = witnesses.WitnessCertificate(
        'dyadic1d', [{'support': {'kind': 'interval', 'lo': 1, 'hi': 7}}])
    with pytest.raises(ClrLabError):
        witnesses.certify_inertia(certificate, parse_potential('zero'), 1)
    assert certificate.inertia_count == 0


def test_certificate_dict_keeps_count():
    certificate = witnesses.WitnessCertificate(
        'layer2d', [{'support': {'kind': 'shell', 'inner': 2, 'outer': 15}}],
        disjointness_checked=True)
    data = certificate.to_dict()
    assert data['certified_count'] == 1
    restored = witnesses.WitnessCertificate.from_dict(data)
    assert restored.certified_count == 1
    assert restored.enclosing_half_width() == 16
