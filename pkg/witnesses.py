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

"""Lower bounds on N₀ from disjoint test functions.

By the variational principle, k finitely supported functions with pairwise
disjoint supports and (Hψ,ψ) < 0 force at least k non-positive
eigenvalues. Three constructions are provided:

* sine blocks on the dyadic intervals [2^{k−1}, 2^{k+2}] of Z or R,
* square layers in Z² equal to 1 on Q_l∖Q_k and tapering linearly to 0
  on Q_{2l}∖Q_l,
* truncated rank-one eigenfunctions around widely spaced point wells,
  whose coupling sequence has Σα^γ small while every well binds.
"""

import math
from dataclasses import dataclass, field
import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve
from errors import ArgumentError, ClrLabError, ResourceError
from kernels import resolvent_lattice_1d, resolvent_lattice_2d
from operators import (LatticeBox, OperatorSpec, SymmetricOperatorMatrix,
                       assemble_lattice)
from potentials import Potential
from spectra import count_nonpositive, rank_one_eigenvalue
from special import adaptive_quad
from utils import load_backend_config, run_parallel, worker_count
from bounds import dyadic_divergence
from base_logger import logger

_BACKEND = load_backend_config()
CAPACITY_1D = _BACKEND.getint('witnesses', 'CAPACITY_1D', fallback=65536)
CAPACITY_2D = _BACKEND.getint('witnesses', 'CAPACITY_2D', fallback=256)
LAYER_HALF_WIDTH = _BACKEND.getint('witnesses', 'LAYER_HALF_WIDTH', fallback=4096)  # noqa pylint: disable=C0301

BLOCK_SPACING = 3


@dataclass
class TrialFunction():
    """A finitely supported function on Z or Z².

    Attributes:
        family (str): sine-block | layer | truncated-resolvent.
        origin (tuple): Lattice coordinates of values[0] (or values[0, 0]).
        values (numpy.ndarray): Function values on the window.
        support (dict): Support descriptor used in disjointness checks.
    """

    family: str
    origin: tuple
    values: np.ndarray
    support: dict

    @property
    def dimension(self):
        return np.ndim(self.values)

    def coords(self):
        """Coordinates of every window site, in values.ravel() order."""
        if self.dimension == 1:
            return self.origin[0] + np.arange(self.values.size)
        n1, n2 = self.values.shape
        x1, x2 = np.meshgrid(self.origin[0] + np.arange(n1),
                             self.origin[1] + np.arange(n2), indexing='ij')
        return np.column_stack([x1.ravel(), x2.ravel()])


class LatticeQuadraticForm():
    """Matrix-free evaluation of (Hψ,ψ) for H = −Δ − V on Z or Z²."""

    def __init__(self, V, dimension):
        if dimension not in (1, 2):
            raise ArgumentError('lattice dimension must be 1 or 2',
                                {'dimension': dimension})
        self.V = V if V is not None else Potential('zero')
        self.dimension = dimension

    def kinetic(self, values):
        """Σ over edges (ψ(x) − ψ(y))², the window padded by zeros."""
        padded = np.pad(np.asarray(values, dtype=float), 1)
        return float(sum(np.sum(np.diff(padded, axis=axis) ** 2)
                         for axis in range(padded.ndim)))

    def potential(self, trial):
        weights = trial.values.ravel() ** 2
        mask = weights > 0
        if not np.any(mask):
            return 0.0
        coords = trial.coords()[mask]
        return float(np.dot(self.V.sample(coords), weights[mask]))

    def terms(self, trial):
        """(kinetic, potential, norm²) of a trial function."""
        if trial.dimension != self.dimension:
            raise ArgumentError('trial function dimension does not match',
                                {'expected': self.dimension,
                                 'got': trial.dimension})
        norm = float(np.sum(trial.values ** 2))
        return self.kinetic(trial.values), self.potential(trial), norm


def _matrix_quotient(matrix, trial):
    rows = {(tuple(np.atleast_1d(s).astype(int))): i
            for i, s in enumerate(matrix.sites)}
    vector = np.zeros(matrix.n)
    for site, value in zip(trial.coords(), trial.values.ravel()):
        if value == 0:
            continue
        key = tuple(np.atleast_1d(site).astype(int))
        if key not in rows:
            raise ArgumentError('trial function leaves the truncation box',
                                {'site': str(key)})
        vector[rows[key]] = value
    form = matrix.symmetric_form()
    return float(vector @ (form @ vector)), float(vector @ vector)


def rayleigh_quotient(operator, trial):
    """(Hψ,ψ)/(ψ,ψ) of a finitely supported trial function.

    Args:
        operator: LatticeQuadraticForm (matrix-free) or an unweighted
            SymmetricOperatorMatrix whose sites cover the support.
        trial (TrialFunction): The test function ψ.

    Returns:
        float: The quotient.

    Raises:
        ArgumentError: If ψ ≡ 0 or the operator cannot evaluate it.
    """
    if not np.any(trial.values):
        raise ArgumentError('trial function vanishes identically',
                            {'family': trial.family})
    if isinstance(operator, SymmetricOperatorMatrix):
        if operator.weight is not None:
            raise ArgumentError('weighted operators are not supported',
                                {'storage': operator.storage})
        energy, norm = _matrix_quotient(operator, trial)
        return energy / norm
    kinetic, potential, norm = operator.terms(trial)
    return (kinetic - potential) / norm


@dataclass
class WitnessCertificate():
    """Disjoint negative test functions certifying N₀ ≥ certified_count.

    Attributes:
        family (str): dyadic1d | layer2d | sparse_delta.
        witnesses (list): One dict per test function with support,
            family tag and quotient.
        disjointness_checked (bool): Pairwise disjointness verified.
        diagnostics (dict): Rejected candidates and hypothesis checks.
        inertia_count (int): Exact N₀ on an enclosing box, once checked.
    """

    family: str
    witnesses: list = field(default_factory=list)
    disjointness_checked: bool = False
    diagnostics: dict = field(default_factory=dict)
    inertia_count: int = None

    @property
    def certified_count(self):
        return len(self.witnesses)

    def enclosing_half_width(self):
        """Smallest box half-width containing every support."""
        radius = 0
        for w in self.witnesses:
            radius = max(radius, support_extent(w['support']))
        return radius + 1

    def to_dict(self):
        return {'family': self.family, 'witnesses': self.witnesses,
                'certified_count': self.certified_count,
                'disjointness_checked': self.disjointness_checked,
                'diagnostics': self.diagnostics,
                'inertia_count': self.inertia_count}

    @classmethod
    def from_dict(cls, data):
        return cls(family=data['family'],
                   witnesses=list(data.get('witnesses', [])),
                   disjointness_checked=bool(data.get('disjointness_checked')),
                   diagnostics=dict(data.get('diagnostics', {})),
                   inertia_count=data.get('inertia_count'))


def support_extent(support):
    """Max-norm radius of a support descriptor."""
    if support['kind'] == 'interval':
        return max(abs(support['lo']), abs(support['hi']))
    if support['kind'] == 'shell':
        return support['outer']
    return max(abs(c) for c in support['center']) + support['radius']


def supports_disjoint(first, second):
    """Exact integer test that two support descriptors do not intersect.

    Raises:
        ArgumentError: On descriptors of different kinds.
    """
    kind = first['kind']
    if kind != second['kind']:
        raise ArgumentError('cannot compare supports of different kinds',
                            {'first': kind, 'second': second['kind']})
    if kind == 'interval':
        return first['hi'] < second['lo'] or second['hi'] < first['lo']
    if kind == 'shell':
        return first['outer'] < second['inner'] \
            or second['outer'] < first['inner']
    gap = max(abs(int(a) - int(b))
              for a, b in zip(first['center'], second['center']))
    return gap > first['radius'] + second['radius']


def check_disjoint(witnesses):
    """True when all supports are pairwise disjoint."""
    for i, first in enumerate(witnesses):
        for second in witnesses[i + 1:]:
            if not supports_disjoint(first['support'], second['support']):
                return False
    return True


def certify_inertia(certificate, V, dimension, half_width=None):
    """Exact N₀ on a box containing all supports; must be ≥ the count.

    Args:
        certificate (WitnessCertificate): Certificate to check.
        V (Potential): The potential the witnesses were built for.
        dimension (int): 1 or 2.
        half_width (int, optional): Box half-width, at least the enclosing
            one.

    Returns:
        int: The inertia count, also stored on the certificate.

    Raises:
        ClrLabError: When the count falls below certified_count.
    """
    half_width = max(half_width or 0, certificate.enclosing_half_width())
    spec = OperatorSpec('lattice2d' if dimension == 2 else 'lattice1d')
    matrix = assemble_lattice(spec, LatticeBox(dimension, half_width), V)
    count = count_nonpositive(matrix)
    certificate.inertia_count = count
    if count < certificate.certified_count:
        raise ClrLabError('witness certificate exceeds the exact count',
                          {'certified': certificate.certified_count,
                           'inertia': count, 'half_width': half_width})
    logger.info(f"Certificate {certificate.family}: {certificate.certified_count} witnesses, N0={count} on R={half_width}")  # noqa pylint: disable=W1203,C0301
    return count


def _sine_values(lo, hi):
    length = hi - lo
    return np.sin(math.pi * np.arange(length + 1) / length)


def dyadic_block(k):
    """Endpoints (a, b) of L_k = [2^{k−1}, 2^{k+2}]."""
    if k < 1:
        raise ArgumentError('dyadic blocks start at k = 1', {'k': k})
    return 2 ** (k - 1), 2 ** (k + 2)


def _block_quotient(args):
    V, k, mode = args
    lo, hi = dyadic_block(k)
    length = hi - lo
    if mode == 'continuum':
        kinetic = math.pi ** 2 / (2.0 * length)
        norm = length / 2.0

        def integrand(x):
            weight = math.sin(math.pi * (x - lo) / length) ** 2
            return float(V(np.array([x]))[0]) * weight

        points = [p for p in V.breakpoints() if lo < p < hi]
        potential, _ = adaptive_quad(integrand, lo, hi, points=points)
        return (kinetic - potential) / norm
    trial = TrialFunction('sine-block', (lo,), _sine_values(lo, hi),
                          {'kind': 'interval', 'lo': lo + 1, 'hi': hi - 1})
    return rayleigh_quotient(LatticeQuadraticForm(V, 1), trial)


def _raise_failures(results):
    for result in results:
        if isinstance(result, Exception):
            raise result
    return results


def dyadic_witnesses_1d(V, k_range=range(1, 18), mode='lattice'):
    """Sine blocks on L_k with negative quotient, greedily disjoint.

    Blocks are taken by increasing k and kept when the quotient is
    negative and k exceeds the last kept index by at least 3.

    Args:
        V (Potential): Non-negative potential on Z (lattice) or R
            (continuum).
        k_range: Block indices k ≥ 1.
        mode (str): lattice | continuum.

    Returns:
        WitnessCertificate: Family dyadic1d.
    """
    if mode not in ('lattice', 'continuum'):
        raise ArgumentError('mode must be lattice or continuum',
                            {'mode': mode})
    ks = sorted(set(int(k) for k in k_range))
    quotients = _raise_failures(run_parallel(
        _block_quotient, [(V, k, mode) for k in ks],
        workers=worker_count(_BACKEND), max_retries=0))
    witnesses, rejected = [], []
    last = None
    for k, quotient in zip(ks, quotients):
        if quotient >= 0 or (last is not None and k - last < BLOCK_SPACING):
            rejected.append({'k': k, 'quotient': quotient})
            continue
        lo, hi = dyadic_block(k)
        support = {'kind': 'interval', 'lo': lo + 1, 'hi': hi - 1} \
            if mode == 'lattice' else {'kind': 'interval', 'lo': lo, 'hi': hi}
        witnesses.append({'k': k, 'family': 'sine-block',
                          'support': support, 'quotient': quotient})
        last = k
    certificate = WitnessCertificate(
        'dyadic1d', witnesses, check_disjoint(witnesses),
        {'rejected': rejected, 'mode': mode,
         'hypothesis': dyadic_hypothesis_1d(V, ks[-1] if ks else 1)})
    logger.info(f"Dyadic witnesses: {certificate.certified_count} of {len(ks)} blocks")  # noqa pylint: disable=W1203
    return certificate


def dyadic_hypothesis_1d(V, kmax, epsilon=0.1):
    """Block sums of |x|V(x)/ln^{1+ε}(1+|x|) over [2^k, 2^{k+1}), x > 0.

    Returns the raw block sums and the divergence verdict.
    """
    blocks = []
    for k in range(kmax + 1):
        x = np.arange(2 ** k, 2 ** (k + 1), dtype=float)
        blocks.append(float(np.sum(x * V(x) / np.log1p(x) ** (1 + epsilon))))
    return {'epsilon': epsilon, 'blocks': blocks,
            **dyadic_divergence(blocks)}


def layer_profile(k, l):
    """Integer values l·φ on [−2l, 2l]² of the (k, l) square layer.

    φ(x) = 0 for |x|∞ ≤ k, 1 for k < |x|∞ ≤ l and (2l − |x|∞)/l up to 2l.
    """
    if not 0 <= k < l:
        raise ArgumentError('layer needs 0 <= k < l', {'k': k, 'l': l})
    axis = np.arange(-2 * l, 2 * l + 1)
    m = np.maximum(np.abs(axis)[:, None], np.abs(axis)[None, :])
    return np.where(m <= k, 0, np.where(m <= l, l, 2 * l - m)).astype(np.int64)


def taper_defect(k, l):
    """max |Δ(l·φ)| over the taper points off the diagonals (integer)."""
    profile = np.pad(layer_profile(k, l), 1)
    laplacian = (profile[2:, 1:-1] + profile[:-2, 1:-1] + profile[1:-1, 2:]
                 + profile[1:-1, :-2] - 4 * profile[1:-1, 1:-1])
    axis = np.abs(np.arange(-2 * l, 2 * l + 1))
    a1, a2 = axis[:, None], axis[None, :]
    m = np.maximum(a1, a2)
    interior = (m > l) & (m < 2 * l) & (a1 != a2)
    return int(np.max(np.abs(laplacian[interior]))) if np.any(interior) else 0


def layer_trial(k, l):
    """The (k, l) layer as a TrialFunction, for small layers."""
    return TrialFunction('layer', (-2 * l, -2 * l), layer_profile(k, l) / l,
                         {'kind': 'shell', 'inner': k + 1, 'outer': 2 * l - 1})


def shell_sums(V, upper, lower=1):
    """Σ_{|x|∞ = m} V(x) for m = lower..upper."""
    sums = []
    for m in range(lower, upper + 1):
        side = np.arange(-m, m + 1)
        inner = np.arange(-m + 1, m)
        coords = np.concatenate([
            np.column_stack([side, np.full(side.size, m)]),
            np.column_stack([side, np.full(side.size, -m)]),
            np.column_stack([np.full(inner.size, m), inner]),
            np.column_stack([np.full(inner.size, -m), inner])])
        sums.append(float(np.sum(V.sample(coords))))
    return np.array(sums)


def layer_quotient(V, k, l):
    """Quotient of the (k, l) layer from shell sums, plus its components.

    φ depends on m = |x|∞ only, and 8m + 4 edges join shells m and m + 1.
    """
    m = np.arange(0, 2 * l + 1)
    profile = np.where(m <= k, 0.0, np.where(m <= l, 1.0, (2 * l - m) / l))
    jumps = np.diff(profile)
    kinetic = float(np.sum((8 * m[:-1] + 4) * jumps ** 2))
    shells = np.where(m == 0, 1, 8 * m)
    norm = float(np.sum(shells * profile ** 2))
    sums = shell_sums(V, 2 * l - 1, k + 1)
    weights = profile[k + 1:2 * l] ** 2
    potential = float(np.dot(sums, weights))
    interior = float(np.sum(sums[:l - k]))
    return {'quotient': (kinetic - potential) / norm, 'kinetic': kinetic,
            'potential': potential, 'norm': norm, 'interior_sum': interior,
            'sufficient': interior > kinetic}


def _layer_task(args):
    V, k, l = args
    return layer_quotient(V, k, l)


def _layer_witness(k, l, result):
    return {'k': k, 'l': l, 'family': 'layer',
            'support': {'kind': 'shell', 'inner': k + 1, 'outer': 2 * l - 1},
            'quotient': result['quotient'], 'form_cost': result['kinetic'],
            'interior_sum': result['interior_sum'],
            'sufficient': result['sufficient']}


def _auto_layers(V, half_width):
    witnesses, tried = [], []
    k = 1
    while 4 * k <= half_width:
        l = 2 * k
        accepted = None
        while 2 * l <= half_width:
            result = layer_quotient(V, k, l)
            tried.append({'k': k, 'l': l, 'quotient': result['quotient']})
            if result['quotient'] < 0:
                accepted = result
                break
            l *= 2
        if accepted is None:
            break
        witnesses.append(_layer_witness(k, l, accepted))
        k = 2 * l
    return witnesses, tried


def layer_witnesses_2d(V, scales=None, half_width=LAYER_HALF_WIDTH):
    """Square-layer witnesses on Z².

    With `scales` None the layers are built inductively: k starts at 1,
    l doubles from 2k until the quotient is negative, and the next k is
    2l so that earlier supports sit strictly inside Q_k.

    Args:
        V (Potential): Non-negative potential on Z².
        scales (list, optional): Candidate (k, l) pairs.
        half_width (int): Layers must satisfy 2l ≤ half_width.

    Returns:
        WitnessCertificate: Family layer2d.
    """
    if scales is None:
        witnesses, tried = _auto_layers(V, half_width)
    else:
        pairs = [(int(k), int(l)) for k, l in scales if 2 * l <= half_width]
        for k, l in pairs:
            if not 0 <= k < l:
                raise ArgumentError('layer needs 0 <= k < l', {'k': k, 'l': l})
        results = _raise_failures(run_parallel(
            _layer_task, [(V, k, l) for k, l in pairs],
            workers=worker_count(_BACKEND), max_retries=0))
        tried = [{'k': k, 'l': l, 'quotient': r['quotient']}
                 for (k, l), r in zip(pairs, results)]
        witnesses = []
        for (k, l), result in sorted(zip(pairs, results)):
            candidate = _layer_witness(k, l, result)
            if result['quotient'] < 0 and all(
                    supports_disjoint(candidate['support'], w['support'])
                    for w in witnesses):
                witnesses.append(candidate)
    certificate = WitnessCertificate(
        'layer2d', witnesses, check_disjoint(witnesses),
        {'tried': tried, 'half_width': half_width})
    logger.info(f"Layer witnesses: {certificate.certified_count} layers within R={half_width}")  # noqa pylint: disable=W1203,C0301
    return certificate


def _resolvent_diag(family):
    if family == 'lattice1d':
        return lambda lam: resolvent_lattice_1d(lam, 0, 0)
    return lambda lam: resolvent_lattice_2d(lam, (0, 0))[0]


def _truncated_eigenfunction(family, lam, radius):
    if family == 'lattice1d':
        q = resolvent_lattice_1d(lam, 1) / resolvent_lattice_1d(lam, 0)
        return q ** np.abs(np.arange(-radius, radius + 1))
    box = LatticeBox(2, radius)
    free = assemble_lattice(OperatorSpec('lattice2d'), box).matrix
    rhs = np.zeros(box.n)
    rhs[box.index((0, 0))] = 1.0
    psi = spsolve((free + lam * sparse.identity(box.n, format='csr')).tocsc(),
                  rhs)
    return psi.reshape(box.side, box.side)


def _centered_trial(family, values, center, radius):
    if family == 'lattice1d':
        return TrialFunction('truncated-resolvent', (center - radius,),
                             values, {'kind': 'box', 'center': (center,),
                                      'radius': radius})
    return TrialFunction('truncated-resolvent',
                         (center - radius, -radius), values,
                         {'kind': 'box', 'center': (center, 0),
                          'radius': radius})


def binding_radius(alpha, family='lattice1d', capacity=None):
    """Smallest doubled radius r whose truncated eigenfunction has quotient
    below −λ₀/2 for H₀ − αδ₀.

    Returns:
        tuple: (r, λ₀, quotient).

    Raises:
        ResourceError: If r would exceed the capacity.
    """
    capacity = capacity or (CAPACITY_1D if family == 'lattice1d'
                            else CAPACITY_2D)
    dimension = 1 if family == 'lattice1d' else 2
    lam = rank_one_eigenvalue(_resolvent_diag(family), alpha)
    origin = 0 if dimension == 1 else (0, 0)
    form = LatticeQuadraticForm(
        Potential('delta', {'sites': [origin], 'amps': [alpha]}), dimension)
    radius = 1
    while radius <= capacity:
        values = _truncated_eigenfunction(family, lam, radius)
        quotient = rayleigh_quotient(
            form, _centered_trial(family, values, 0, radius))
        if quotient < -lam / 2.0:
            return radius, lam, quotient
        radius *= 2
    raise ResourceError('binding radius exceeds capacity',
                        {'alpha': alpha, 'capacity': capacity, 'lambda': lam})


def sparse_delta_construction(alphas, gamma, family='lattice1d',
                              capacity=None):
    """Point wells with Σα^γ bounded but one bound state per well.

    Wells sit on the first axis at x₁ = 0 and x_{n+1} = x_n + r_n +
    r_{n+1} + 1, so the truncated eigenfunctions have disjoint supports.

    Args:
        alphas: Couplings α_n > 0.
        gamma (float): Exponent of the reported sum Σα_n^γ.
        family (str): lattice1d | lattice2d.
        capacity (int, optional): Largest admissible coordinate.

    Returns:
        tuple: (Potential, WitnessCertificate, Σα_n^γ).

    Raises:
        ResourceError: If the wells do not fit inside the capacity.
    """
    if family not in ('lattice1d', 'lattice2d'):
        raise ArgumentError('family must be lattice1d or lattice2d',
                            {'family': family})
    alphas = [float(a) for a in alphas]
    if not alphas or min(alphas) <= 0:
        raise ArgumentError('couplings must be positive', {'alphas': alphas})
    capacity = capacity or (CAPACITY_1D if family == 'lattice1d'
                            else CAPACITY_2D)
    radii, lams = [], []
    for alpha in alphas:
        radius, lam, _ = binding_radius(alpha, family, capacity)
        radii.append(radius)
        lams.append(lam)
    centers = [0]
    for previous, current in zip(radii[:-1], radii[1:]):
        centers.append(centers[-1] + previous + current + 1)
    if centers[-1] + radii[-1] > capacity:
        raise ResourceError('wells do not fit in the box',
                            {'needed': centers[-1] + radii[-1],
                             'capacity': capacity, 'count': len(alphas)})
    sites = centers if family == 'lattice1d' else [(c, 0) for c in centers]
    V = Potential('delta', {'sites': sites, 'amps': alphas})
    form = LatticeQuadraticForm(V, 1 if family == 'lattice1d' else 2)
    witnesses = []
    for alpha, lam, center, radius in zip(alphas, lams, centers, radii):
        trial = _centered_trial(
            family, _truncated_eigenfunction(family, lam, radius), center,
            radius)
        witnesses.append({'alpha': alpha, 'lambda0': lam,
                          'family': 'truncated-resolvent',
                          'support': trial.support,
                          'quotient': rayleigh_quotient(form, trial)})
    certificate = WitnessCertificate(
        'sparse_delta', [w for w in witnesses if w['quotient'] < 0],
        diagnostics={'radii': radii, 'centers': centers, 'gamma': gamma})
    certificate.disjointness_checked = check_disjoint(certificate.witnesses)
    total = math.fsum(a ** gamma for a in alphas)
    logger.info(f"Sparse wells: {certificate.certified_count} witnesses, sum alpha^gamma={total:.6g}")  # noqa pylint: disable=W1203,C0301
    return V, certificate, total
