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

"""Symmetric matrix representations of H = H₀ − V on finite truncations.

Supported operator families:

- `lattice1d`, `lattice2d`: the lattice Laplacian Δψ(x) = Σ_{|x'−x|=1}
  (ψ(x') − ψ(x)) without a 1/(2d) factor, Dirichlet outside the box.
- `fractional`: (−Δ)^α on Z as a dense symmetric Toeplitz matrix.
- `bessel`: the radial operator −(1/r^{d−1})(r^{d−1}ψ')' on a uniform grid,
  stored as a symmetric stiffness matrix plus the weight r^{d−1}h.
- `continuum1d`: the second difference on [−L, L], Dirichlet at ±L.
- `graph`: an explicit finite weighted graph, H₀ψ(x) = Σ h(x,y)ψ(y).

Every family can be killed at a site (Dirichlet point condition), which
removes the matching row and column.
"""

import math
from dataclasses import dataclass, field
import numpy as np
import networkx as nx
from scipy import sparse
from scipy.linalg import toeplitz
from scipy.sparse.csgraph import connected_components
from errors import ArgumentError, DomainError, ValidationError
from potentials import Potential
from special import fractional_coefficients
from base_logger import logger

FAMILIES = ('lattice1d', 'lattice2d', 'fractional', 'bessel',
            'continuum1d', 'graph')
BOUNDARIES = ('dirichlet', 'neumann', 'none')
DEFAULT_FRACTIONAL_CUTOFF = 1e-14


@dataclass(frozen=True)
class LatticeBox():
    """Sites x ∈ Z^d with max-norm ≤ R, indexed lexicographically."""

    dimension: int
    half_width: int

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ArgumentError('lattice dimension must be 1 or 2',
                                {'dimension': self.dimension})
        if int(self.half_width) != self.half_width or self.half_width < 1:
            raise ArgumentError('box half-width must be a positive integer',
                                {'half_width': self.half_width})

    @property
    def side(self):
        return 2 * self.half_width + 1

    @property
    def n(self):
        return self.side ** self.dimension

    def coords(self):
        """Site coordinates in index order: (n,) in 1D, (n, 2) in 2D."""
        axis = np.arange(-self.half_width, self.half_width + 1)
        if self.dimension == 1:
            return axis
        x1, x2 = np.meshgrid(axis, axis, indexing='ij')
        return np.column_stack([x1.ravel(), x2.ravel()])

    def contains(self, site):
        site = np.atleast_1d(site)
        return site.size == self.dimension and bool(
            np.all(np.abs(site) <= self.half_width))

    def index(self, site):
        """Row index of a site."""
        if not self.contains(site):
            raise ArgumentError('site outside the box',
                                {'site': str(site), 'half_width': self.half_width})  # noqa pylint: disable=C0301
        site = np.atleast_1d(site).astype(int) + self.half_width
        if self.dimension == 1:
            return int(site[0])
        return int(site[0] * self.side + site[1])

    def site(self, index):
        """Site of a row index."""
        if not 0 <= index < self.n:
            raise ArgumentError('index outside the box', {'index': index})
        if self.dimension == 1:
            return int(index) - self.half_width
        return (int(index) // self.side - self.half_width,
                int(index) % self.side - self.half_width)


@dataclass(frozen=True)
class RadialGrid():
    """Uniform radial grid r_j = j·h, j = 1..n, Dirichlet at r_{n+1}."""

    step: float
    n: int

    def __post_init__(self):
        if self.step <= 0 or self.n < 1:
            raise ArgumentError('radial grid needs step > 0 and n >= 1',
                                {'step': self.step, 'n': self.n})

    @classmethod
    def covering(cls, radius, step):
        """Grid with step h whose Dirichlet end sits at or beyond radius."""
        return cls(step=step, n=max(1, int(math.ceil(radius / step)) - 1))

    def nodes(self):
        return self.step * np.arange(1, self.n + 1)

    @property
    def outer(self):
        return self.step * (self.n + 1)


@dataclass(frozen=True)
class OperatorSpec():
    """Operator family plus its discretization and truncation parameters.

    Attributes:
        family (str): One of FAMILIES.
        half_width (float): Lattice box R, or L of the continuum interval.
        alpha (float): Fractional order in (0, 2].
        d (float): Bessel dimension parameter, d > 0.
        boundary (str): Bessel inner boundary, dirichlet | neumann | none.
        step (float): Grid step h (continuum1d, bessel).
        killing_site: Optional site with a Dirichlet point condition.
        c0 (float): Upper bound for graph diagonals h(x,x).
    """

    family: str
    half_width: float = None
    alpha: float = None
    d: float = None
    boundary: str = 'dirichlet'
    step: float = None
    killing_site: object = None
    c0: float = math.inf

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ArgumentError('unknown operator family',
                                {'family': self.family})
        if self.family == 'fractional' and (
                self.alpha is None or not 0.0 < self.alpha <= 2.0):
            raise ArgumentError('fractional order must lie in (0, 2]',
                                {'alpha': self.alpha})
        if self.family == 'bessel':
            if self.d is None or self.d <= 0:
                raise ArgumentError('Bessel family needs d > 0', {'d': self.d})
            if self.boundary not in BOUNDARIES:
                raise ArgumentError('unknown boundary',
                                    {'boundary': self.boundary})
        if self.family in ('continuum1d', 'bessel') and self.step is not None \
                and self.step <= 0:
            raise ArgumentError('grid step must be positive',
                                {'step': self.step})

    @property
    def dimension(self):
        return 2 if self.family == 'lattice2d' else 1

    def to_dict(self):
        return {k: v for k, v in self.__dict__.items()
                if v is not None and not (k == 'c0' and math.isinf(v))}


@dataclass
class SymmetricOperatorMatrix():
    """A symmetric matrix, optionally paired with a positive weight.

    `matrix` holds the symmetric form: the operator itself, or for weighted
    families the stiffness K with operator W⁻¹K. The eigenvalues are those
    of the pencil K − μW.

    Attributes:
        matrix: scipy.sparse CSR matrix or dense numpy array.
        storage (str): banded | sparse-symmetric | dense-Toeplitz-symmetric
            | dense.
        weight (numpy.ndarray): Optional weight vector w.
        sites (numpy.ndarray): Coordinates of the rows.
        metadata (dict): Family and truncation bookkeeping.
    """

    matrix: object
    storage: str
    weight: np.ndarray = None
    sites: np.ndarray = None
    metadata: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def is_sparse(self):
        return sparse.issparse(self.matrix)

    def symmetric_form(self):
        """W^{−1/2} K W^{−1/2}, or the matrix itself when unweighted."""
        if self.weight is None:
            return self.matrix
        scale = 1.0 / np.sqrt(self.weight)
        if self.is_sparse:
            d = sparse.diags(scale)
            return (d @ self.matrix @ d).tocsr()
        return self.matrix * np.outer(scale, scale)

    def operator(self):
        """The weighted operator W⁻¹K as a matrix."""
        if self.weight is None:
            return self.matrix
        if self.is_sparse:
            return (sparse.diags(1.0 / self.weight) @ self.matrix).tocsr()
        return self.matrix / self.weight[:, None]

    def tridiagonal(self):
        """(diagonal, off-diagonal) of the symmetric form, banded storage only."""
        if self.storage != 'banded':
            raise ArgumentError('matrix is not tridiagonal',
                                {'storage': self.storage})
        form = sparse.csr_matrix(self.symmetric_form())
        return (np.asarray(form.diagonal(), dtype=float),
                np.asarray(form.diagonal(1), dtype=float))

    def to_dense(self):
        form = self.symmetric_form()
        return form.toarray() if sparse.issparse(form) else np.asarray(form)

    def norm_inf(self):
        form = self.symmetric_form()
        if sparse.issparse(form):
            return float(abs(form).sum(axis=1).max()) if form.nnz else 0.0
        return float(np.max(np.sum(np.abs(form), axis=1))) if form.size else 0.0

    def symmetry_residual(self):
        """max |K_ij − K_ji| of the stored symmetric form."""
        if self.is_sparse:
            diff = self.matrix - self.matrix.T
            return float(abs(diff).max()) if diff.nnz else 0.0
        return float(np.max(np.abs(self.matrix - self.matrix.T))) \
            if self.matrix.size else 0.0


def _potential_values(V, coords):
    if V is None:
        return np.zeros(len(coords))
    if isinstance(V, Potential):
        return V.sample(coords)
    values = np.asarray(V, dtype=float)
    if values.shape[0] != len(coords):
        raise ArgumentError('potential length does not match the operator',
                            {'expected': len(coords), 'got': values.shape[0]})
    if np.any(values < 0):
        raise DomainError('potential takes negative values',
                          {'min': float(values.min())})
    return values


def _kill(matrix, keep):
    if sparse.issparse(matrix):
        return matrix[keep][:, keep].tocsr()
    return matrix[np.ix_(keep, keep)]


def _apply_killing(matrix, sites, weight, killing_index):
    if killing_index is None:
        return matrix, sites, weight
    keep = np.ones(matrix.shape[0], dtype=bool)
    keep[killing_index] = False
    weight = None if weight is None else weight[keep]
    return _kill(matrix, keep), sites[keep], weight


def _second_difference(n, diag=2.0, off=-1.0):
    return sparse.diags([np.full(n - 1, off), np.full(n, diag),
                         np.full(n - 1, off)], [-1, 0, 1], format='csr')


def assemble_lattice(spec, box, V=None):
    """Matrix of −Δ − V on a lattice box with Dirichlet truncation.

    Args:
        spec (OperatorSpec): Family lattice1d or lattice2d.
        box (LatticeBox): Truncation box of matching dimension.
        V: Potential or array of site values.

    Returns:
        SymmetricOperatorMatrix: Banded (1D) or sparse (2D) storage.

    Raises:
        ArgumentError: Wrong family or killing site outside the box.
        DomainError: Negative potential values.
    """
    if spec.family not in ('lattice1d', 'lattice2d'):
        raise ArgumentError('assemble_lattice needs a lattice family',
                            {'family': spec.family})
    if box.dimension != spec.dimension:
        raise ArgumentError('box dimension does not match the family',
                            {'family': spec.family, 'dimension': box.dimension})
    sites = box.coords()
    values = _potential_values(V, sites)
    chain = _second_difference(box.side)
    if box.dimension == 1:
        laplacian = chain
        storage = 'banded'
    else:
        eye = sparse.identity(box.side, format='csr')
        laplacian = (sparse.kron(chain, eye) + sparse.kron(eye, chain)).tocsr()
        storage = 'sparse-symmetric'
    matrix = (laplacian - sparse.diags(values)).tocsr()
    killing_index = None
    if spec.killing_site is not None:
        killing_index = box.index(spec.killing_site)
    matrix, sites, _ = _apply_killing(matrix, sites, None, killing_index)
    logger.debug(f"Assembled {spec.family} on R={box.half_width}: n={matrix.shape[0]}")  # noqa pylint: disable=W1203
    return SymmetricOperatorMatrix(
        matrix=matrix, storage=storage, sites=sites,
        metadata={'family': spec.family, 'half_width': box.half_width,
                  'killing_site': spec.killing_site})


def assemble_fractional(alpha, box, V=None, cutoff=DEFAULT_FRACTIONAL_CUTOFF,
                        killing_site=None):
    """Dense Toeplitz matrix of (−Δ)^α − V on a 1D box.

    Entries are the Fourier coefficients h_α(x−y) of (4 sin²(φ/2))^α;
    off-diagonal entries with |h| below `cutoff` are set to zero.

    Args:
        alpha (float): Order in (0, 2].
        box (LatticeBox): One-dimensional box.
        V: Potential or array of site values.
        cutoff (float): Tail truncation threshold.
        killing_site (int, optional): Site removed from the matrix.

    Returns:
        SymmetricOperatorMatrix: dense-Toeplitz-symmetric storage.
    """
    if not 0.0 < alpha <= 2.0:
        raise ArgumentError('fractional order must lie in (0, 2]',
                            {'alpha': alpha})
    if box.dimension != 1:
        raise ArgumentError('fractional family is one-dimensional')
    sites = box.coords()
    values = _potential_values(V, sites)
    column = fractional_coefficients(alpha, box.n - 1)
    tail = np.abs(column) < cutoff
    tail[0] = False
    column = np.where(tail, 0.0, column)
    matrix = toeplitz(column) - np.diag(values)
    killing_index = None if killing_site is None else box.index(killing_site)
    matrix, sites, _ = _apply_killing(matrix, sites, None, killing_index)
    return SymmetricOperatorMatrix(
        matrix=matrix, storage='dense-Toeplitz-symmetric', sites=sites,
        metadata={'family': 'fractional', 'alpha': alpha,
                  'half_width': box.half_width, 'cutoff': cutoff,
                  'truncated_entries': int(np.count_nonzero(tail)),
                  'killing_site': killing_site})


def bessel_stiffness(d, grid, boundary='dirichlet'):
    """Symmetric stiffness K and weight w of −B_d on a radial grid.

    K couples j and j+1 through −r_{j+1/2}^{d−1}/h; w_j = r_j^{d−1}h.
    Dirichlet keeps the r_{1/2} flux in K₁₁, Neumann drops it.
    """
    if d <= 0:
        raise ArgumentError('Bessel family needs d > 0', {'d': d})
    if boundary not in BOUNDARIES:
        raise ArgumentError('unknown boundary', {'boundary': boundary})
    h = grid.step
    nodes = grid.nodes()
    half = h * (np.arange(0, grid.n + 1) + 0.5)
    flux = half ** (d - 1.0) / h
    diag = flux[:-1] + flux[1:]
    if boundary != 'dirichlet':
        diag[0] = flux[1]
    off = -flux[1:-1]
    weight = nodes ** (d - 1.0) * h
    return diag, off, weight


def assemble_bessel(d, grid, boundary='dirichlet', V=None):
    """Tridiagonal discretization of −B_d − V, symmetric in L²(r^{d−1}dr).

    Args:
        d (float): Dimension parameter, d > 0.
        grid (RadialGrid): Uniform grid, Dirichlet at the outer end.
        boundary (str): `dirichlet` or `neumann` at r = 0 (`none` is
            treated as neumann).
        V: Radial potential or array of node values.

    Returns:
        SymmetricOperatorMatrix: banded storage with weight w_j = r_j^{d−1}h.
    """
    if not isinstance(grid, RadialGrid):
        raise ArgumentError('assemble_bessel needs a uniform RadialGrid')
    diag, off, weight = bessel_stiffness(d, grid, boundary)
    nodes = grid.nodes()
    values = _potential_values(V, nodes)
    diag = diag - values * weight
    matrix = sparse.diags([off, diag, off], [-1, 0, 1], format='csr')
    return SymmetricOperatorMatrix(
        matrix=matrix, storage='banded', weight=weight, sites=nodes,
        metadata={'family': 'bessel', 'd': d, 'boundary': boundary,
                  'step': grid.step, 'outer': grid.outer})


def assemble_continuum_1d(step, half_width, V=None):
    """Second-difference matrix of −d²/dx² − V on [−L, L], Dirichlet at ±L.

    Nodes are x_j = −L + j·h, j = 1..N−1 with N = 2L/h.
    """
    if step <= 0:
        raise ArgumentError('grid step must be positive', {'step': step})
    if half_width <= 0:
        raise ArgumentError('half-width must be positive',
                            {'half_width': half_width})
    cells = int(round(2.0 * half_width / step))
    if cells < 2 or abs(cells * step - 2.0 * half_width) > 1e-9 * half_width:
        raise ArgumentError('2L must be a multiple of h of at least two steps',
                            {'step': step, 'half_width': half_width})
    nodes = -half_width + step * np.arange(1, cells)
    values = _potential_values(V, nodes)
    inv = 1.0 / step ** 2
    matrix = (_second_difference(cells - 1, 2.0 * inv, -inv)
              - sparse.diags(values)).tocsr()
    return SymmetricOperatorMatrix(
        matrix=matrix, storage='banded', sites=nodes,
        metadata={'family': 'continuum1d', 'step': step,
                  'half_width': half_width})


def graph_weights(graph, weight='weight'):
    """H₀ = graph Laplacian of a networkx graph, as a sparse matrix.

    Returns:
        tuple: (CSR matrix, node list in row order).
    """
    nodes = list(graph.nodes())
    laplacian = nx.laplacian_matrix(graph, nodelist=nodes, weight=weight)
    return sparse.csr_matrix(laplacian, dtype=float), nodes


def validate_graph_weights(weights, c0=math.inf, tol=1e-12):
    """Checks h(x,y) = h(y,x) ≤ 0, zero row sums, h(x,x) ≤ c₀, connectivity.

    Returns:
        float: max h(x,x), recorded in the operator metadata.

    Raises:
        ValidationError: On the first violated condition.
    """
    matrix = sparse.csr_matrix(weights, dtype=float)
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise ValidationError('graph weights must be square',
                              {'shape': matrix.shape})
    scale = max(1.0, float(abs(matrix).max()) if matrix.nnz else 1.0)
    asym = matrix - matrix.T
    if asym.nnz and float(abs(asym).max()) > tol * scale:
        raise ValidationError('graph weights are not symmetric',
                              {'max_asymmetry': float(abs(asym).max())})
    off = matrix - sparse.diags(matrix.diagonal())
    if off.nnz and float(off.max()) > 0:
        raise ValidationError('off-diagonal weights must be <= 0',
                              {'max_off_diagonal': float(off.max())})
    row_sums = np.asarray(matrix.sum(axis=1)).ravel()
    if np.any(np.abs(row_sums) > tol * scale * max(1, n)):
        raise ValidationError('row sums of graph weights must vanish',
                              {'max_row_sum': float(np.max(np.abs(row_sums)))})
    max_diag = float(matrix.diagonal().max()) if n else 0.0
    if max_diag > c0:
        raise ValidationError('diagonal weight exceeds c0',
                              {'max_diagonal': max_diag, 'c0': c0})
    components, _ = connected_components(off != 0, directed=False)
    if components != 1:
        raise ValidationError('graph is not connected',
                              {'components': int(components)})
    return max_diag


def assemble_general_graph(weights, V=None, c0=math.inf, killing_site=None):
    """Matrix H₀ − diag(V) for an explicit finite graph.

    Args:
        weights: Square array-like h(x,y), or a networkx graph.
        V: Potential (sampled at vertex indices) or array of vertex values.
        c0 (float): Bound on the diagonal h(x,x).
        killing_site (int, optional): Vertex index removed from the matrix.

    Returns:
        SymmetricOperatorMatrix: sparse-symmetric storage.

    Raises:
        ValidationError: On asymmetric, sign-violating, unbalanced or
            disconnected weights.
    """
    nodes = None
    if isinstance(weights, nx.Graph):
        weights, nodes = graph_weights(weights)
    matrix = sparse.csr_matrix(weights, dtype=float)
    max_diag = validate_graph_weights(matrix, c0=c0)
    sites = np.arange(matrix.shape[0])
    values = _potential_values(V, sites)
    matrix = (matrix - sparse.diags(values)).tocsr()
    if killing_site is not None and not 0 <= killing_site < len(sites):
        raise ArgumentError('killing vertex outside the graph',
                            {'killing_site': killing_site})
    matrix, sites, _ = _apply_killing(matrix, sites, None, killing_site)
    return SymmetricOperatorMatrix(
        matrix=matrix, storage='sparse-symmetric', sites=sites,
        metadata={'family': 'graph', 'max_diagonal': max_diag, 'c0': c0,
                  'nodes': None if nodes is None else [str(v) for v in nodes],
                  'killing_site': killing_site})


def assemble(spec, V=None, graph=None):
    """Builds the matrix of any family from an OperatorSpec.

    Args:
        spec (OperatorSpec): Family and truncation.
        V: Potential or array of values.
        graph: Weights or networkx graph for the `graph` family.

    Returns:
        SymmetricOperatorMatrix: The assembled operator.
    """
    if spec.family in ('lattice1d', 'lattice2d'):
        if spec.half_width is None:
            raise ArgumentError('lattice family needs a box half-width')
        return assemble_lattice(spec, LatticeBox(spec.dimension,
                                                 int(spec.half_width)), V)
    if spec.family == 'fractional':
        if spec.half_width is None:
            raise ArgumentError('fractional family needs a box half-width')
        return assemble_fractional(spec.alpha, LatticeBox(1, int(spec.half_width)),  # noqa pylint: disable=C0301
                                   V, killing_site=spec.killing_site)
    if spec.family == 'bessel':
        if spec.half_width is None or spec.step is None:
            raise ArgumentError('Bessel family needs step and outer radius')
        grid = RadialGrid.covering(spec.half_width, spec.step)
        return assemble_bessel(spec.d, grid, spec.boundary, V)
    if spec.family == 'continuum1d':
        if spec.half_width is None or spec.step is None:
            raise ArgumentError('continuum family needs step and half-width')
        return assemble_continuum_1d(spec.step, spec.half_width, V)
    if graph is None:
        raise ArgumentError('graph family needs explicit weights')
    return assemble_general_graph(graph, V, c0=spec.c0,
                                  killing_site=spec.killing_site)
