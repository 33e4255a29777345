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

from errors import ArgumentError, DomainError, ValidationError
from operators import (LatticeBox, OperatorSpec, RadialGrid, assemble,
                       assemble_general_graph, assemble_lattice,
                       validate_graph_weights)


def test_lattice_box_indexing_2d():
    box = LatticeBox(2, 3)
    assert box.n == 49
    for index in (0, 17, 48):
        assert box.index(box.site(index)) == index
    with pytest.raises(ArgumentError):
        box.index((4, 0))


def test_lattice_1d_is_tridiagonal(single_delta):
    A = assemble(OperatorSpec('lattice1d', half_width=4), single_delta)
    diag, off = A.tridiagonal()
    assert A.storage == 'banded'
    np.testing.assert_allclose(diag, [2, 2, 2, 2, -1, 2, 2, 2, 2])
    np.testing.assert_allclose(off, -np.ones(8))


def test_lattice_2d_laplacian_diagonal():
    A = assemble(OperatorSpec('lattice2d', half_width=2))
    assert A.storage == 'sparse-symmetric'
    np.testing.assert_allclose(A.matrix.diagonal(), 4.0)
    assert A.symmetry_residual() == 0.0


def test_killing_site_removes_row():
    spec = OperatorSpec('lattice1d', half_width=3, killing_site=0)
    A = assemble(spec)
    assert A.n == 6
    assert 0 not in A.sites
    with pytest.raises(ArgumentError):
        assemble(OperatorSpec('lattice1d', half_width=3, killing_site=5))


def test_fractional_alpha_one_matches_lattice():
    frac = assemble(OperatorSpec('fractional', half_width=5, alpha=1.0))
    lattice = assemble(OperatorSpec('lattice1d', half_width=5))
    np.testing.assert_allclose(frac.to_dense(), lattice.to_dense(), atol=1e-14)
    with pytest.raises(ArgumentError):
        OperatorSpec('fractional', half_width=5, alpha=2.5)


def test_bessel_weighted_form_is_symmetric():
    spec = OperatorSpec('bessel', half_width=5.0, d=3.0, step=0.1)
    A = assemble(spec)
    assert A.weight is not None
    assert A.symmetry_residual() == 0.0
    grid = RadialGrid.covering(5.0, 0.1)
    assert grid.outer >= 5.0 - 1e-12


def test_continuum_grid_requires_whole_cells():
    A = assemble(OperatorSpec('continuum1d', half_width=1.0, step=0.25))
    assert A.n == 7
    with pytest.raises(ArgumentError):
        assemble(OperatorSpec('continuum1d', half_width=1.0, step=0.3))


def test_negative_potential_array_rejected():
    with pytest.raises(DomainError):
        assemble_lattice(OperatorSpec('lattice1d', half_width=1),
                         LatticeBox(1, 1), np.array([0.0, -1.0, 0.0]))


def test_graph_from_networkx_cycle():
    A = assemble_general_graph(nx.cycle_graph(6), V=np.full(6, 0.5))
    assert A.metadata['max_diagonal'] == 2.0
    np.testing.assert_allclose(A.matrix.diagonal(), 1.5)


def test_graph_weight_validation():
    asymmetric = np.array([[1.0, -1.0], [-0.5, 0.5]])
    with pytest.raises(ValidationError):
        validate_graph_weights(asymmetric)
    disconnected = np.zeros((2, 2))
    with pytest.raises(ValidationError):
        validate_graph_weights(disconnected)
    path = nx.laplacian_matrix(nx.path_graph(3)).toarray()
    with pytest.raises(ValidationError):
        validate_graph_weights(path, c0=1.5)
    assert validate_graph_weights(path) == 2.0


def test_unknown_family_and_missing_box():
    with pytest.raises(ArgumentError):
        OperatorSpec('lattice3d')
    with pytest.raises(ArgumentError):
        assemble(OperatorSpec('lattice1d'))
    assert math.isinf(OperatorSpec('lattice1d').c0)
