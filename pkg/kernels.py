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

"""Heat kernels, resolvents and killed random walks.

The evaluators here feed every bound in `bounds.py`:

* free lattice kernels p₀ (scaled Bessel products) and the fractional
  kernel p_α (oscillatory quadrature of the symbol),
* Bessel-process kernels p_d for the radial operators,
* killed kernels p₁: images on the half-line, matrix exponentials of the
  killed generator on a box in 2D, and angular-mode synthesis for the
  disk-well continuum problem,
* lattice resolvents R_λ, the regularized resolvent R̃ and effective
  resistances on finite graphs,
* a seeded Monte Carlo of the continuous-time walk on Z² killed at 0.

Tail accessors wrap the time integrals ∫_s^∞ p(t,x,x)dt that the
CLR-type bounds consume; each returns a `TailValue` with an error estimate
and a rigour flag.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
import numpy as np
from scipy import integrate, sparse
from scipy import special as sp
from scipy.linalg import eigh_tridiagonal
from scipy.sparse.linalg import expm_multiply, splu
from errors import ArgumentError, NumericalError, TruncationError
from operators import (LatticeBox, OperatorSpec, RadialGrid, assemble_lattice,
                       bessel_stiffness)
from special import (QUAD_LIMIT, QuadratureSpec, adaptive_quad, F_gamma,
                     periodic_trapezoid, periodic_trapezoid_2d,
                     richardson_log_lambda, weighted_tail_profile)
from utils import load_backend_config, run_parallel, worker_count
from base_logger import logger

_BACKEND = load_backend_config()
CHUNK_SIZE = _BACKEND.getint('montecarlo', 'CHUNK_SIZE', fallback=25000)
MAX_WALKS = _BACKEND.getint('montecarlo', 'MAX_WALKS', fallback=1000000)
KERNEL_ERROR_LIMIT = _BACKEND.getfloat('numerics', 'KERNEL_ERROR_LIMIT', fallback=0.01)  # noqa pylint: disable=C0301
CROSS_CHECK_TOLERANCE = _BACKEND.getfloat('numerics', 'CROSS_CHECK_TOLERANCE', fallback=1e-6)  # noqa pylint: disable=C0301

MAX_BOX_HALF_WIDTH = 300
HEAD_BOX_HALF_WIDTH = 160
MAX_RADIAL_NODES = 400000
TIGHT_QUAD = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-11)
KERNEL_FAMILIES = ('p0_lattice', 'p1_lattice', 'p_alpha', 'p_bessel',
                   'p1_continuum_1d', 'p1_continuum_2d_diag')


def _symbol(phi):
    """4 sin²(φ/2), accurate near φ = 0."""
    return 4.0 * np.sin(0.5 * phi) ** 2


def _theta(lam):
    """Decay rate θ of the 1D resolvent: cosh θ = 1 + λ/2."""
    return 2.0 * np.arcsinh(0.5 * np.sqrt(lam))


def _geometric_points(center, lower, upper, ratio=4.0, count=8):
    pts = [center * ratio ** k for k in range(-count, count + 1)]
    return [p for p in pts if lower < p < upper]


def _as_site(x, dimension=None):
    site = np.atleast_1d(np.asarray(x, dtype=int))
    if dimension is not None and site.size != dimension:
        raise ArgumentError('site dimension mismatch',
                            {'site': str(x), 'dimension': dimension})
    return site


@dataclass(frozen=True)
class TailValue():
    """∫_s^∞ p(t,x,x)dt with its error estimate.

    Attributes:
        value (float): The tail integral (an upper bound when rigorous).
        error (float): Absolute error estimate.
        rigorous (bool): False for estimates without a proven error bound.
        method (str): Evaluation route.
    """

    value: float
    error: float
    rigorous: bool = True
    method: str = 'quadrature'

    @property
    def upper(self):
        return self.value + self.error


@dataclass
class KernelTable():
    """Kernel values on a grid of (t, x, y) points, with per-point errors."""

    family: str
    points: list = field(default_factory=list)
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise ArgumentError('unknown kernel family', {'family': self.family})

    def add(self, t, x, value, error=0.0, y=None, method='closed-form'):
        self.points.append({'t': float(t), 'x': x, 'y': y,
                            'value': float(value), 'error': float(error),
                            'method': method})

    def values(self):
        return np.array([p['value'] for p in self.points])

    def violations(self):
        """Points whose value lies below −(method error)."""
        return [p for p in self.points if p['value'] < -p['error']]

    def to_dict(self):
        return {'family': self.family, 'parameters': dict(self.parameters),
                'points': [dict(p) for p in self.points]}

    @classmethod
    def from_dict(cls, data):
        return cls(family=data['family'], points=list(data.get('points', [])),
                   parameters=dict(data.get('parameters', {})))


@dataclass
class ResolventTable():
    """Lattice resolvent values R_λ(x, y) over a λ grid and site pairs."""

    family: str
    lambdas: list
    pairs: list
    values: list = field(default_factory=list)
    extrapolated: dict = field(default_factory=dict)
    half_value: dict = field(default_factory=dict)

    def check(self):
        """Returns the (λ, pair) entries violating R < 0 or |R| ≤ 1/λ."""
        bad = []
        for lam, row in zip(self.lambdas, self.values):
            for pair, value in zip(self.pairs, row):
                if not value < 0 or abs(value) > 1.0 / lam * (1 + 1e-12):
                    bad.append((lam, pair, value))
        return bad

    def to_dict(self):
        return {'family': self.family, 'lambdas': list(self.lambdas),
                'pairs': [list(np.atleast_1d(p[0]).tolist()) +
                          list(np.atleast_1d(p[1]).tolist())
                          for p in self.pairs],
                'values': [list(r) for r in self.values],
                'extrapolated': dict(self.extrapolated),
                'half_value': dict(self.half_value)}

    @classmethod
    def from_dict(cls, data):
        return cls(family=data['family'], lambdas=list(data['lambdas']),
                   pairs=[tuple(p) for p in data['pairs']],
                   values=[list(r) for r in data.get('values', [])],
                   extrapolated=dict(data.get('extrapolated', {})),
                   half_value=dict(data.get('half_value', {})))


# --------------------------------------------------------------------------
# Free lattice and fractional kernels
# --------------------------------------------------------------------------

def p0_lattice(t, x, y=0):
    """Free lattice heat kernel e^{−2dt}∏ I_{|x_i−y_i|}(2t).

    Args:
        t (float): Time, t ≥ 0.
        x, y: Sites (int in 1D, pairs in 2D).

    Returns:
        float: p₀(t, x, y).
    """
    if t < 0:
        raise ArgumentError('time must be non-negative', {'t': t})
    x = _as_site(x)
    y = np.broadcast_to(_as_site(y), x.shape)
    diff = np.abs(x - y)
    if t == 0:
        return float(np.all(diff == 0))
    return float(np.prod(sp.ive(diff, 2.0 * t)))


def p0_lattice_quadrature(t, n):
    """1D p₀(t, n, 0) from its Fourier integral, used as an oracle."""
    value, _ = periodic_trapezoid(
        lambda phi: np.exp(-t * _symbol(phi)) * np.cos(n * phi))
    return value / (2.0 * math.pi)


def p1_lattice_1d(t, x, y):
    """Half-line lattice kernel killed at 0, by images."""
    return p0_lattice(t, x, y) - p0_lattice(t, x, -int(y))


def _p1_lattice_1d_diag(t, n):
    """p₁(t, n, n) = I₀ − I_{2n} at 2t, as a positive Bessel sum for small n."""
    if t <= 0:
        return 0.0
    n = abs(int(n))
    if n == 0:
        return 0.0
    if n <= 256:
        orders = 2 * np.arange(1, n + 1) - 1
        return float(np.sum(orders / t * sp.ive(orders, 2.0 * t)))
    return float(sp.ive(0, 2.0 * t) - sp.ive(2 * n, 2.0 * t))


def p_alpha(t, n, alpha):
    """Fractional lattice kernel (1/π)∫₀^π e^{−tS^α}cos(nφ)dφ, S = 4sin²(φ/2).

    Args:
        t (float): Time, t ≥ 0.
        n (int): Separation x − y.
        alpha (float): Order in (0, 2].

    Returns:
        float: p_α(t, n).
    """
    if not 0.0 < alpha <= 2.0:
        raise ArgumentError('fractional order must lie in (0, 2]',
                            {'alpha': alpha})
    if t < 0:
        raise ArgumentError('time must be non-negative', {'t': t})
    n = abs(int(n))
    if t == 0:
        return float(n == 0)
    # e^{−tS^α} < 1e-323 beyond this angle since S ≥ (2φ/π)²
    upper = min(math.pi, 0.5 * math.pi * (745.0 / t) ** (0.5 / alpha))
    scale = t ** (-0.5 / alpha)
    points = _geometric_points(scale, 0.0, upper)

    def integrand(phi):
        return math.exp(-t * _symbol(phi) ** alpha)

    if n == 0:
        value, _ = adaptive_quad(integrand, 0.0, upper, spec=TIGHT_QUAD,
                                 points=points)
    else:
        value, _ = adaptive_quad(integrand, 0.0, upper, spec=TIGHT_QUAD,
                                 points=points, weight='cos', wvar=n)
    return value / math.pi


def p_alpha_asymptotic_constant(alpha):
    """Γ(1/(2α))/(2πα), the limit of p_α(t,0,0)·t^{1/(2α)}."""
    return math.gamma(0.5 / alpha) / (2.0 * math.pi * alpha)


# --------------------------------------------------------------------------
# Bessel process kernels
# --------------------------------------------------------------------------

def _bessel_order(d, boundary):
    if boundary == 'none':
        if d < 2:
            raise ArgumentError('the boundary-free Bessel kernel needs d >= 2',
                                {'d': d})
        return 0.5 * d - 1.0
    if boundary not in ('dirichlet', 'neumann'):
        raise ArgumentError('unknown boundary', {'boundary': boundary})
    if not 0.0 < d < 2.0:
        raise ArgumentError('Dirichlet and Neumann Bessel kernels need 0 < d < 2',  # noqa pylint: disable=C0301
                            {'d': d, 'boundary': boundary})
    return 1.0 - 0.5 * d if boundary == 'dirichlet' else 0.5 * d - 1.0


def p_bessel(t, a, r, d, boundary='none'):
    """Transition density of the Bessel process w.r.t. r^{d−1}dr.

    (2t)⁻¹(ar)^{1−d/2}e^{−(a²+r²)/4t}I_ν(ar/2t) with ν = d/2 − 1, or
    ν = 1 − d/2 for the process killed at the origin.
    """
    nu = _bessel_order(d, boundary)
    if t <= 0 or a <= 0 or r <= 0:
        raise ArgumentError('Bessel kernel needs t, a, r > 0',
                            {'t': t, 'a': a, 'r': r})
    z = a * r / (2.0 * t)
    return float((a * r) ** (1.0 - 0.5 * d)
                 * math.exp(-(a - r) ** 2 / (4.0 * t))
                 * sp.ive(nu, z) / (2.0 * t))


def p_bessel_d3_elementary(t, a, r):
    """d = 3 kernel from I_{1/2}(z) = √(2/πz)·sinh z."""
    gauss = math.exp(-(a - r) ** 2 / (4.0 * t)) \
        - math.exp(-(a + r) ** 2 / (4.0 * t))
    return 0.5 * gauss / (math.sqrt(math.pi * t) * a * r)


def bessel_diagonal_slope(d, t, radii=(2, 4, 8, 16, 32), boundary='dirichlet'):
    """Least-squares slope of log p_d(t, r, r) against log r.

    For the killed kernel at t ≫ r² the diagonal behaves like r^{4−2d}.
    """
    radii = np.asarray(radii, dtype=float)
    values = np.array([p_bessel(t, r, r, d, boundary) for r in radii])
    slope, _ = np.polyfit(np.log(radii), np.log(values), 1)
    return float(slope)


def _bessel_decay(d, boundary):
    return 2.0 - 0.5 * d if boundary == 'dirichlet' else 0.5 * d


def time_tail(func, s, decay, scale, spec=None):
    """∫_s^∞ f(t)dt for f(t) ~ C t^{−decay}.

    The head [s, max(s, scale)] is integrated directly; beyond it the
    substitution u = 1/t turns the tail into an algebraic-weight integral
    over [0, 1/split].

    Returns:
        tuple: (value, error); (inf, 0) when decay ≤ 1.
    """
    if decay <= 1.0:
        return math.inf, 0.0
    spec = spec or TIGHT_QUAD
    split = max(s, scale, 1e-12)
    head, head_err = 0.0, 0.0
    if s < split:
        head, head_err = adaptive_quad(
            func, s, split, spec=spec,
            points=_geometric_points(math.sqrt(max(s, 1e-12) * split), s, split))  # noqa pylint: disable=C0301
    floor = 1e-8 / split

    def folded(u):
        u = max(u, floor)
        return func(1.0 / u) * u ** (-decay)

    tail, tail_err = integrate.quad(folded, 0.0, 1.0 / split,
                                    weight='alg', wvar=(decay - 2.0, 0.0),
                                    epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                                    limit=QUAD_LIMIT)
    return head + tail, head_err + tail_err


def bessel_time_tail(r, s, d, boundary='none'):
    """∫_s^∞ p_d(t,r,r)dt; infinite for recurrent (d, boundary)."""
    decay = _bessel_decay(d, boundary)
    _bessel_order(d, boundary)
    return time_tail(lambda t: p_bessel(t, r, r, d, boundary), s, decay,
                     scale=r * r)


# --------------------------------------------------------------------------
# Killed kernels
# --------------------------------------------------------------------------

def p1_continuum_1d(t, x):
    """Half-line Brownian kernel diagonal (1 − e^{−x²/t})/√(4πt)."""
    if t <= 0:
        raise ArgumentError('time must be positive', {'t': t})
    return -math.expm1(-x * x / t) / math.sqrt(4.0 * math.pi * t)


def p1_continuum_1d_time_integral(x, s):
    """∫_s^∞ p₁(t,x,x)dt = |x|·F(s/x²); equals |x| at s = 0."""
    if s < 0:
        raise ArgumentError('lower limit must be non-negative', {'s': s})
    if x == 0:
        return 0.0
    return abs(x) * F_gamma(s / (x * x))


@lru_cache(maxsize=64)
def _killed_box(dimension, half_width):
    family = 'lattice1d' if dimension == 1 else 'lattice2d'
    origin = 0 if dimension == 1 else (0, 0)
    box = LatticeBox(dimension, half_width)
    spec = OperatorSpec(family=family, half_width=half_width,
                        killing_site=origin)
    matrix = assemble_lattice(spec, box).matrix.tocsc()
    return box, matrix


def _killed_index(box, site):
    idx = box.index(site)
    origin = box.index(np.zeros(box.dimension, dtype=int))
    if idx == origin:
        raise ArgumentError('site coincides with the killing site')
    return idx - 1 if idx > origin else idx


def _default_half_width(site, t):
    return int(np.max(np.abs(site))) + int(math.ceil(10.0 * math.sqrt(t))) + 20


def killed_propagate(t, x, half_width=None):
    """e^{−tH₁}δ_x for the lattice walk killed at 0, on a Dirichlet box.

    Args:
        t (float): Time.
        x: Starting site (int or pair), x ≠ 0.
        half_width (int, optional): Box half-width; by default wide enough
            that the box boundary is not felt.

    Returns:
        tuple: (vector over the killed box, LatticeBox, row of x).

    Raises:
        TruncationError: If the required box exceeds MAX_BOX_HALF_WIDTH.
    """
    site = _as_site(x)
    if t < 0:
        raise ArgumentError('time must be non-negative', {'t': t})
    half_width = half_width or _default_half_width(site, t)
    if half_width > MAX_BOX_HALF_WIDTH:
        raise TruncationError('killed-walk box too large for the horizon',
                              {'t': t, 'half_width': half_width})
    box, matrix = _killed_box(site.size, half_width)
    row = _killed_index(box, site if site.size > 1 else int(site[0]))
    start = np.zeros(matrix.shape[0])
    start[row] = 1.0
    if t == 0:
        return start, box, row
    return expm_multiply(-t * matrix, start), box, row


def p1_lattice_box(t, x, y=None, half_width=None):
    """Killed kernel p₁(t, x, y) by matrix exponential (1D or 2D)."""
    vec, box, row = killed_propagate(t, x, half_width)
    if y is None:
        return float(vec[row])
    return float(vec[_killed_index(box, y)])


def p1_lattice_2d(t, x, half_width=None):
    """Diagonal p₁(t, x, x) of the walk on Z² killed at 0."""
    site = _as_site(x, 2)
    return p1_lattice_box(t, tuple(site), half_width=half_width)


def killed_mass(t, x, half_width=None):
    """Σ_y p₁(t, x, y), the survival probability computed on the box."""
    vec, _, _ = killed_propagate(t, x, half_width)
    return float(np.sum(vec))


@lru_cache(maxsize=4096)
def _killed_head_2d(k1, k2, s):
    """∫₀^s p₁^{box}(t,x,x)dt = [H⁻¹(δ_x − e^{−sH}δ_x)]_x on a capped box."""
    half_width = min(_default_half_width(np.array([k1, k2]), s),
                     HEAD_BOX_HALF_WIDTH)
    half_width = max(half_width, max(k1, k2) + 2)
    box, matrix = _killed_box(2, half_width)
    row = _killed_index(box, (k1, k2))
    start = np.zeros(matrix.shape[0])
    start[row] = 1.0
    propagated = expm_multiply(-s * matrix, start)
    solved = splu(matrix).solve(start - propagated)
    return float(solved[row]), half_width


def killed_resolvent_lattice_1d(lam, x):
    """Diagonal of the resolvent killed at 0: −(1 − e^{−2|x|θ})/√(λ²+4λ)."""
    _check_lambda(lam)
    return float(np.expm1(-2.0 * abs(x) * _theta(lam))
                 / math.sqrt(lam * (lam + 4.0)))


def killed_resolvent_identity(resolvent, x, x0=0):
    """R(x,x) − R(x,x₀)²/R(x₀,x₀) for any resolvent callable R(x, y)."""
    return resolvent(x, x) - resolvent(x, x0) ** 2 / resolvent(x0, x0)


# --------------------------------------------------------------------------
# Resolvents and regularized resolvents
# --------------------------------------------------------------------------

def _check_lambda(lam):
    if not lam > 0:
        raise ArgumentError('resolvent needs λ > 0', {'lambda': lam})


def resolvent_lattice_1d(lam, x, y=0):
    """R_λ(x, y) = −e^{−|x−y|θ}/√(λ²+4λ) on Z."""
    _check_lambda(lam)
    n = abs(int(x) - int(y))
    return -math.exp(-n * _theta(lam)) / math.sqrt(lam * (lam + 4.0))


def resolvent_lattice_1d_printed(lam, x, y=0):
    """The same resolvent in the a-form a^{1−|x−y|}/(2−(2+λ)a)."""
    _check_lambda(lam)
    a = (2.0 + lam + math.sqrt(lam * lam + 4.0 * lam)) / 2.0
    return a ** (1 - abs(int(x) - int(y))) / (2.0 - (2.0 + lam) * a)


def _ordered_offsets(x, y):
    diff = np.abs(_as_site(x, 2) - _as_site(y, 2))
    return int(diff.min()), int(diff.max())


def _oscillation_points(n1, lower, upper, cap=64):
    if n1 == 0:
        return []
    step = math.pi / n1
    count = min(int(upper / step), cap)
    return [k * step for k in range(1, count + 1) if lower < k * step < upper]


def resolvent_lattice_2d(lam, x, y=(0, 0), spec=None):
    """R_λ(x, y) on Z², the φ₂ integral done in closed form.

    R = −(1/π)∫₀^π cos(n₁φ)e^{−|n₂|θ(A)}/√(A²+4A)dφ with A = λ + 4sin²(φ/2),
    taking n₁ the smaller offset.

    Returns:
        tuple: (value, error estimate).
    """
    _check_lambda(lam)
    n1, n2 = _ordered_offsets(x, y)

    def integrand(phi):
        big_a = lam + _symbol(phi)
        return math.cos(n1 * phi) * math.exp(-n2 * _theta(big_a)) \
            / math.sqrt(big_a * (big_a + 4.0))

    points = _geometric_points(math.sqrt(lam), 0.0, math.pi) \
        + _oscillation_points(n1, 0.0, math.pi)
    value, err = adaptive_quad(integrand, 0.0, math.pi,
                               spec=spec or TIGHT_QUAD, points=points)
    return -value / math.pi, err / math.pi


def resolvent_lattice_2d_oracle(lam, x, y=(0, 0)):
    """Double periodic-trapezoid evaluation of (1/(2π)²)∬−cos(n·φ)/(λ+S)."""
    _check_lambda(lam)
    n = _as_site(x, 2) - _as_site(y, 2)

    def integrand(phi1, phi2):
        return -np.cos(n[0] * phi1 + n[1] * phi2) \
            / (lam + _symbol(phi1) + _symbol(phi2))

    value, err = periodic_trapezoid_2d(integrand)
    return value / (2.0 * math.pi) ** 2, err / (2.0 * math.pi) ** 2


def green_constant_2d(lambdas=(1e-2, 1e-3, 1e-4, 1e-5, 1e-6)):
    """Extrapolates u₀ = lim R_λ(0,0) − (1/4π)ln λ in powers of 1/ln λ."""
    values = [resolvent_lattice_2d(lam, (0, 0))[0]
              - math.log(lam) / (4.0 * math.pi) for lam in lambdas]
    return richardson_log_lambda(lambdas, values)


def hitting_laplace_ratio(lam, x, dimension=1):
    """E_x e^{−λτ} = R_λ(x,0)/R_λ(0,0), τ the hitting time of 0."""
    if dimension == 1:
        return math.exp(-abs(int(x)) * _theta(lam))
    origin = resolvent_lattice_2d(lam, (0, 0))[0]
    return resolvent_lattice_2d(lam, x)[0] / origin


def resolvent_row_sum(lam, dimension, half_width):
    """Σ_{|x|∞ ≤ R} R_λ(x, 0); tends to −1/λ as R grows."""
    _check_lambda(lam)
    if dimension == 1:
        q = math.exp(-_theta(lam))
        geometric = (1.0 + q - 2.0 * q ** (half_width + 1)) / (1.0 - q)
        return -geometric / math.sqrt(lam * (lam + 4.0))
    if dimension != 2:
        raise ArgumentError('dimension must be 1 or 2', {'dimension': dimension})  # noqa pylint: disable=C0301

    def integrand(phi):
        big_a = lam + _symbol(phi)
        q = math.exp(-_theta(big_a))
        rows = (1.0 + q - 2.0 * q ** (half_width + 1)) / (1.0 - q)
        half = math.sin(0.5 * phi)
        dirichlet = (math.sin((half_width + 0.5) * phi) / half
                     if half > 1e-300 else 2.0 * half_width + 1.0)
        return dirichlet * rows / math.sqrt(big_a * (big_a + 4.0))

    points = _geometric_points(math.sqrt(lam), 0.0, math.pi) \
        + _oscillation_points(half_width + 1, 0.0, math.pi, cap=400)
    value, _ = adaptive_quad(integrand, 0.0, math.pi, points=points)
    return -value / math.pi


def resolvent_table(family, lambdas, pairs):
    """Tabulates lattice resolvents and the λ → 0 quantities of the family."""
    table = ResolventTable(family=family, lambdas=list(lambdas),
                           pairs=list(pairs))
    for lam in lambdas:
        if family == 'lattice1d_closed':
            row = [resolvent_lattice_1d(lam, x, y) for x, y in pairs]
        elif family == 'lattice2d_quadrature':
            row = [resolvent_lattice_2d(lam, x, y)[0] for x, y in pairs]
        else:
            raise ArgumentError('unknown resolvent family', {'family': family})
        table.values.append(row)
    for x, y in pairs:
        key = str(tuple(np.atleast_1d(np.asarray(x) - np.asarray(y)).tolist()))
        kind = 'lattice1d' if family == 'lattice1d_closed' else 'lattice2d'
        value = regularized_resolvent(kind, x, y)
        table.extrapolated[key] = value
        table.half_value[key] = 0.5 * value
    if family == 'lattice2d_quadrature':
        constant, err = green_constant_2d()
        table.extrapolated['green_constant'] = constant
        table.extrapolated['green_constant_error'] = err
    return table


@lru_cache(maxsize=65536)
def _regularized_2d(n1, n2):
    """(1/π)∫₀^π [1 − cos(n₁φ)e^{−n₂θ(S)}]/√(S²+4S)dφ, the half value."""
    if n1 == 0 and n2 == 0:
        return 0.0, 0.0

    def integrand(phi):
        s = _symbol(phi)
        damp = -math.expm1(-n2 * _theta(s))
        numerator = 2.0 * math.sin(0.5 * n1 * phi) ** 2 \
            + math.cos(n1 * phi) * damp
        return numerator / math.sqrt(s * (s + 4.0))

    cut = math.pi if n1 <= 40 else 40.0 * math.pi / n1
    head, head_err = adaptive_quad(
        integrand, 0.0, cut, spec=TIGHT_QUAD,
        points=_oscillation_points(n1, 0.0, cut)
        + _geometric_points(1.0 / max(n2, 1), 0.0, cut))
    tail, tail_err = 0.0, 0.0
    if cut < math.pi:
        def smooth(phi):
            s = _symbol(phi)
            return 1.0 / math.sqrt(s * (s + 4.0))

        def damped(phi):
            s = _symbol(phi)
            return math.exp(-n2 * _theta(s)) / math.sqrt(s * (s + 4.0))

        plain, plain_err = adaptive_quad(smooth, cut, math.pi)
        wave, wave_err = adaptive_quad(damped, cut, math.pi,
                                       weight='cos', wvar=n1)
        tail, tail_err = plain - wave, plain_err + wave_err
    return (head + tail) / math.pi, (head_err + tail_err) / math.pi


def _regularized_fractional(k, alpha):
    """(2/π)∫₀^π sin²(kφ/2)/S^α dφ, the half value."""
    if k == 0:
        return 0.0, 0.0

    def integrand(phi):
        return math.sin(0.5 * k * phi) ** 2 / _symbol(phi) ** alpha

    cut = math.pi if k <= 40 else 40.0 * math.pi / k
    head, head_err = adaptive_quad(integrand, 0.0, cut, spec=TIGHT_QUAD,
                                   points=_oscillation_points(k, 0.0, cut))
    tail, tail_err = 0.0, 0.0
    if cut < math.pi:
        def power(phi):
            return 0.5 / _symbol(phi) ** alpha

        plain, plain_err = adaptive_quad(power, cut, math.pi)
        wave, wave_err = adaptive_quad(power, cut, math.pi,
                                       weight='cos', wvar=k)
        tail, tail_err = plain - wave, plain_err + wave_err
    return 2.0 * (head + tail) / math.pi, 2.0 * (head_err + tail_err) / math.pi


def regularized_resolvent(family, x, x0=0, alpha=None, error=False):
    """R̃(x, x₀) = 2 lim_{λ→0}[R_λ(x,x₀) − R_λ(x₀,x₀)] ≥ 0.

    Args:
        family (str): lattice1d | continuum1d | lattice2d | fractional.
        x, x0: Sites.
        alpha (float): Fractional order, α ≥ 1/2 for the recurrent case.
        error (bool): Also return the quadrature error estimate.

    Returns:
        float, or (float, float) when error is set.

    Raises:
        ArgumentError: Transient family or unknown family.
    """
    if family in ('lattice1d', 'continuum1d'):
        value, err = float(abs(np.asarray(x) - np.asarray(x0)).sum()), 0.0
    elif family == 'lattice2d':
        origin = (0, 0) if np.ndim(x0) == 0 and x0 == 0 else x0
        n1, n2 = _ordered_offsets(x, origin)
        half, half_err = _regularized_2d(n1, n2)
        value, err = 2.0 * half, 2.0 * half_err
    elif family == 'fractional':
        if alpha is None or not 0.5 <= alpha <= 2.0:
            raise ArgumentError('regularized resolvent needs a recurrent order α ≥ 1/2',  # noqa pylint: disable=C0301
                                {'alpha': alpha})
        half, half_err = _regularized_fractional(abs(int(x) - int(x0)), alpha)
        value, err = 2.0 * half, 2.0 * half_err
    else:
        raise ArgumentError('regularized resolvent needs a recurrent family',
                            {'family': family})
    return (value, err) if error else value


def regularized_resolvent_limit_2d(x, lambdas=(1e-5, 1e-6, 1e-7, 1e-8)):
    """Cross-check of the 2D R̃ by extrapolating 2[R_λ(x,0) − R_λ(0,0)].

    The difference converges to R̃ like λ ln λ.

    Returns:
        tuple: (value, error estimate).
    """
    values = [2.0 * (resolvent_lattice_2d(lam, x)[0]
                     - resolvent_lattice_2d(lam, (0, 0))[0])
              for lam in lambdas]
    return richardson_log_lambda(lambdas, values)


def _resolvent_value(family, lam, x, y):
    if family == 'lattice1d_closed':
        return resolvent_lattice_1d(lam, x, y)
    return resolvent_lattice_2d(lam, x, y)[0]


def resolvent_cross_checks(family, lambdas, sites):
    """Independent checks of a resolvent table over the same grid.

    The killed diagonal is compared with R_λ(0,0)(1 − h²), h the
    hitting-time Laplace ratio. The quadrature family also compares the
    λ → 0 extrapolation of 2[R_λ(x,0) − R_λ(0,0)] with the direct R̃.

    Args:
        family (str): `lattice1d_closed` or `lattice2d_quadrature`.
        lambdas: λ grid.
        sites: Sites x; the killing site is the origin.

    Returns:
        dict: `hitting` ratios per λ, `regularized_limit` entries and the
        `mismatches` beyond CROSS_CHECK_TOLERANCE.
    """
    if family not in ('lattice1d_closed', 'lattice2d_quadrature'):
        raise ArgumentError('unknown resolvent family', {'family': family})
    dimension = 1 if family == 'lattice1d_closed' else 2
    origin = 0 if dimension == 1 else (0, 0)
    checks = {'hitting': {}, 'regularized_limit': {}, 'mismatches': []}
    for lam in lambdas:
        diagonal = _resolvent_value(family, lam, origin, origin)
        ratios = {}
        for x in sites:
            ratio = hitting_laplace_ratio(lam, x, dimension)
            ratios[str(x)] = ratio
            if dimension == 1:
                expected = killed_resolvent_lattice_1d(lam, x)
            else:
                expected = killed_resolvent_identity(
                    lambda a, b, s=lam: _resolvent_value(family, s, a, b),
                    x, origin)
            value = diagonal * (1.0 - ratio ** 2)
            if abs(value - expected) > CROSS_CHECK_TOLERANCE * max(1.0, abs(expected)):  # noqa pylint: disable=C0301
                checks['mismatches'].append(
                    {'check': 'hitting', 'lambda': lam, 'site': str(x),
                     'value': value, 'expected': expected})
        checks['hitting'][repr(float(lam))] = ratios
    if dimension == 2:
        for x in sites:
            limit, err = regularized_resolvent_limit_2d(x)
            direct, direct_err = regularized_resolvent('lattice2d', x, error=True)  # noqa pylint: disable=C0301
            checks['regularized_limit'][str(x)] = {
                'extrapolated': limit, 'error': err, 'direct': direct}
            if abs(limit - direct) > max(1e3 * CROSS_CHECK_TOLERANCE,
                                         10.0 * (err + direct_err)):
                checks['mismatches'].append(
                    {'check': 'regularized_limit', 'site': str(x),
                     'value': limit, 'expected': direct})
    logger.debug(f"Resolvent cross-checks {family}: {len(checks['mismatches'])} mismatches")  # noqa pylint: disable=W1203,C0301
    return checks


def regularized_resolvent_graph(matrix, x0, sites=None):
    """Diagonal of (H₀ with row and column x₀ removed)⁻¹ on a finite graph.

    On a connected graph this is the effective resistance between x and x₀.

    Args:
        matrix: Generator H₀ (scipy.sparse or dense), rows indexed 0..n−1.
        x0 (int): Killing index.
        sites (iterable, optional): Indices to evaluate; all by default.

    Returns:
        dict: index → R̃(x, x₀), with R̃(x₀, x₀) = 0.
    """
    generator = sparse.csc_matrix(matrix)
    n = generator.shape[0]
    if not 0 <= x0 < n:
        raise ArgumentError('killing index outside the graph', {'x0': x0})
    keep = np.array([i for i in range(n) if i != x0])
    reduced = generator[keep][:, keep].tocsc()
    try:
        lu = splu(reduced)
    except RuntimeError as exc:
        raise NumericalError('killed graph generator is singular',
                             {'x0': x0}) from exc
    wanted = range(n) if sites is None else sites
    values = {}
    for idx in wanted:
        if idx == x0:
            values[idx] = 0.0
            continue
        row = int(np.searchsorted(keep, idx))
        rhs = np.zeros(n - 1)
        rhs[row] = 1.0
        values[idx] = float(lu.solve(rhs)[row])
    return values


# --------------------------------------------------------------------------
# Disk-well continuum kernel
# --------------------------------------------------------------------------

def p1_continuum_2d_diag(t, rho, q=1.0, step=0.05, max_modes=200,
                         r_max=None):
    """Diagonal heat kernel of −Δ + q·1{|x|<1} on R² at radius ρ.

    Angular mode m contributes ε_m/(2π)·Σ e^{−λt}f(ρ)² over the radial
    eigenpairs with λ ≤ 40/t on [0, R_max] with Dirichlet at R_max
    (ε₀ = 1, ε_m = 2). Modes are added until one contributes less than
    1e-12 of the running total.

    Returns:
        tuple: (value, truncation error estimate).

    Raises:
        TruncationError: If the radial grid would exceed MAX_RADIAL_NODES.
    """
    if t <= 0 or rho <= 0:
        raise ArgumentError('disk-well kernel needs t > 0 and ρ > 0',
                            {'t': t, 'rho': rho})
    r_max = r_max or rho + 12.0 * math.sqrt(t) + 5.0
    grid = RadialGrid.covering(r_max, step)
    if grid.n > MAX_RADIAL_NODES:
        raise TruncationError('radial grid too large for the horizon',
                              {'t': t, 'nodes': grid.n})
    diag, off, weight = bessel_stiffness(2.0, grid, 'neumann')
    nodes = grid.nodes()
    killing = np.where(nodes < 1.0, q, 0.0)
    killing[np.isclose(nodes, 1.0)] = 0.5 * q
    off_sym = off / np.sqrt(weight[:-1] * weight[1:])
    cut = 40.0 / t
    total = 0.0
    dropped = 0
    for m in range(max_modes + 1):
        diag_sym = diag / weight + m * m / nodes ** 2 + killing
        if diag_sym.min() > cut:
            break
        vals, vecs = eigh_tridiagonal(diag_sym, off_sym, select='v',
                                      select_range=(-1.0, cut))
        if vals.size == 0:
            break
        profile = vecs ** 2 / weight[:, None]
        at_rho = np.array([np.interp(rho, nodes, profile[:, k])
                           for k in range(vals.size)])
        contribution = (1.0 if m == 0 else 2.0) / (2.0 * math.pi) \
            * float(np.sum(np.exp(-vals * t) * at_rho))
        total += contribution
        dropped += vals.size
        if m > 0 and contribution < 1e-12 * total:
            break
    boundary = math.exp(-(r_max - rho) ** 2 / (4.0 * t)) / (4.0 * math.pi * t)
    error = boundary + math.exp(-40.0) * dropped / (2.0 * math.pi)
    logger.debug(f"Disk-well kernel t={t} rho={rho}: {total} (modes up to {m})")  # noqa pylint: disable=W1203
    return total, error


# --------------------------------------------------------------------------
# Killed walks on Z²
# --------------------------------------------------------------------------

def _simulate_chunk(args):
    """Hitting times of 0 for one chunk of walks (see simulate_killed_walks)."""
    start, horizon, size, seed_seq = args
    rng = np.random.default_rng(seed_seq)
    jumps = rng.poisson(4.0 * horizon, size)
    pos = np.tile(np.asarray(start, dtype=np.int64), (size, 1))
    done = np.zeros(size, dtype=np.int64)
    hit = np.zeros(size, dtype=np.int64)
    active = np.flatnonzero(jumps > 0)
    while active.size:
        here = pos[active]
        # a leap shorter than the L1 distance cannot visit the origin
        leap = np.maximum(np.abs(here).sum(axis=1) - 1, 1)
        leap = np.minimum(leap, jumps[active] - done[active])
        horizontal = rng.binomial(leap, 0.5)
        vertical = leap - horizontal
        here = here + np.column_stack([
            2 * rng.binomial(horizontal, 0.5) - horizontal,
            2 * rng.binomial(vertical, 0.5) - vertical])
        pos[active] = here
        done[active] += leap
        at_origin = (here[:, 0] == 0) & (here[:, 1] == 0)
        hit[active[at_origin]] = done[active[at_origin]]
        active = active[~at_origin & (done[active] < jumps[active])]
    taus = np.full(size, np.inf)
    killed = hit > 0
    # jump times are uniform order statistics given the jump count
    taus[killed] = horizon * rng.beta(hit[killed],
                                      jumps[killed] - hit[killed] + 1)
    return taus


def simulate_killed_walks(x, horizon, n_walks, seed, chunk_size=None,
                          workers=None):
    """Hitting times of 0 for the rate-4 nearest-neighbour walk from x.

    Walks are simulated by exact leaps: from L1 distance D the next D − 1
    jumps cannot reach the origin, so their net displacement is drawn at
    once from binomials. Chunks draw from independent streams spawned from
    `seed`, so results do not depend on the worker count.

    Args:
        x: Starting site on Z², x ≠ 0.
        horizon (float): Time horizon.
        n_walks (int): Number of walks, at most MAX_WALKS.
        seed (int): Root seed.
        chunk_size (int, optional): Walks per task.
        workers (int, optional): Process count, CLR_LAB_THREADS by default.

    Returns:
        numpy.ndarray: Hitting times, inf for walks alive at the horizon.
    """
    start = _as_site(x, 2)
    if not np.any(start):
        raise ArgumentError('walks must start away from the killing site')
    if horizon <= 0 or n_walks < 1:
        raise ArgumentError('need a positive horizon and at least one walk',
                            {'horizon': horizon, 'n_walks': n_walks})
    if n_walks > MAX_WALKS:
        raise ArgumentError('walk budget exceeded',
                            {'n_walks': n_walks, 'max': MAX_WALKS})
    chunk_size = chunk_size or CHUNK_SIZE
    sizes = [chunk_size] * (n_walks // chunk_size)
    if n_walks % chunk_size:
        sizes.append(n_walks % chunk_size)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    args = [(tuple(start.tolist()), float(horizon), size, child)
            for size, child in zip(sizes, children)]
    workers = worker_count() if workers is None else workers
    logger.info(f"Simulating {n_walks} killed walks from {tuple(start)} to t={horizon} in {len(args)} chunks")  # noqa pylint: disable=C0301,W1203
    results = run_parallel(_simulate_chunk, args, workers=workers,
                           max_retries=0)
    failed = [r for r in results if isinstance(r, Exception)]
    if failed:
        raise NumericalError('killed-walk simulation failed',
                             {'error': str(failed[0])})
    return np.concatenate(results)


def survival_probability(t, x, n_walks=100000, seed=0, taus=None,
                         rel_precision=0.05):
    """P_x{τ > t} by Monte Carlo, with its standard error.

    Returns:
        dict: estimate, stderr, precision_warning, n_walks, seed.
    """
    if taus is None:
        taus = simulate_killed_walks(x, t, n_walks, seed)
    alive = float(np.mean(taus > t))
    stderr = math.sqrt(max(alive * (1.0 - alive), 0.0) / taus.size)
    warning = stderr > rel_precision * max(alive, 1e-300)
    if warning:
        logger.warning(f"Survival estimate {alive:.4g} has standard error {stderr:.2g} above the requested precision")  # noqa pylint: disable=C0301,W1203
    return {'estimate': alive, 'stderr': stderr, 'precision_warning': warning,
            'n_walks': int(taus.size), 'seed': seed}


def killed_diagonal_from_hitting(t, x, taus):
    """p₀(t,x,x) − E[1{τ<t}p₀(t−τ,x,0)], the killed diagonal from hitting times.

    Returns:
        tuple: (estimate, standard error).
    """
    site = np.abs(_as_site(x, 2))
    early = taus[taus < t]
    lag = 2.0 * (t - early)
    samples = np.zeros(taus.size)
    samples[:early.size] = sp.ive(site[0], lag) * sp.ive(site[1], lag)
    estimate = p0_lattice(t, site, site) - float(np.mean(samples))
    return estimate, float(np.std(samples, ddof=1) / math.sqrt(taus.size))


def kernel_table(family, times, sites, **params):
    """Evaluates a kernel family on the product grid times × sites."""
    table = KernelTable(family=family, parameters=dict(params))
    for t in times:
        for x in sites:
            error = 0.0
            method = 'closed-form'
            if family == 'p0_lattice':
                value = p0_lattice(t, x, params.get('y', 0 if np.ndim(x) == 0 else (0, 0)))  # noqa pylint: disable=C0301
            elif family == 'p1_lattice':
                if np.ndim(x) == 0:
                    value = p1_lattice_1d(t, x, x)
                else:
                    value = p1_lattice_2d(t, x)
                    method = 'expm-box'
            elif family == 'p_alpha':
                value = p_alpha(t, x, params['alpha'])
                method = 'quadrature'
            elif family == 'p_bessel':
                value = p_bessel(t, params.get('a', x), x, params['d'],
                                 params.get('boundary', 'none'))
            elif family == 'p1_continuum_1d':
                value = p1_continuum_1d(t, x)
            else:
                value, error = p1_continuum_2d_diag(t, x, params.get('q', 1.0))  # noqa pylint: disable=C0301
                method = 'mode-synthesis'
            table.add(t, x, value, error=error, method=method)
    return table


# --------------------------------------------------------------------------
# Tail accessors
# --------------------------------------------------------------------------

class ContinuumHalfLineTail():
    """∫_s^∞ p₁ for Brownian motion on the half-line killed at 0."""

    name = 'continuum_half_line'

    def tail(self, x, s):
        return TailValue(p1_continuum_1d_time_integral(x, s), 0.0,
                         method='closed-form')

    def weighted_tail(self, x, s, g):
        """∫_s^∞ t^{−g}p₁(t,x,x)dt = |x|^{1−2g}·profile(x²/s, g)."""
        if x == 0:
            return TailValue(0.0, 0.0, method='closed-form')
        ax = abs(x)
        upper = math.inf if s == 0 else ax * ax / s
        value = ax ** (1.0 - 2.0 * g) * weighted_tail_profile(upper, g)
        return TailValue(value, 0.0, method='closed-form')

    def total(self, x):
        return float(abs(x))


class LatticeKilled1DTail():
    """∫_s^∞ p₁ for the walk on Z killed at 0: |x| minus the head integral."""

    name = 'lattice_killed_1d'

    def tail(self, x, s):
        n = abs(int(x))
        if n == 0:
            return TailValue(0.0, 0.0, method='closed-form')
        if s <= 0:
            return TailValue(float(n), 0.0, method='closed-form')
        if s > 64.0 * n * n and n <= 256:
            value, err = time_tail(lambda t: _p1_lattice_1d_diag(t, n), s,
                                   decay=1.5, scale=s)
            return TailValue(value, err, method='tail-quadrature')
        points = _geometric_points(float(n * n), 0.0, s)
        head, err = adaptive_quad(lambda t: _p1_lattice_1d_diag(t, n), 0.0,
                                  s, spec=TIGHT_QUAD, points=points)
        return TailValue(max(n - head, 0.0), err, method='head-subtraction')

    def total(self, x):
        return float(abs(int(x)))


class LatticeKilled2DTail():
    """∫_s^∞ p₁ on Z² killed at 0 as R̃(x) − ∫₀^{s'} p₁^{box}.

    The head uses a Dirichlet box and s' = min(s, max_head_time), both of
    which lower it, so the value is an upper bound.
    """

    name = 'lattice_killed_2d'

    def __init__(self, max_head_time=200.0):
        self.max_head_time = max_head_time

    def tail(self, x, s):
        n1, n2 = _ordered_offsets(x, (0, 0))
        if n1 == 0 and n2 == 0:
            return TailValue(0.0, 0.0, method='closed-form')
        total, err = regularized_resolvent('lattice2d', (n1, n2), (0, 0),
                                           error=True)
        head_time = min(s, self.max_head_time)
        head, half_width = (0.0, 0) if head_time <= 0 else \
            _killed_head_2d(n1, n2, float(head_time))
        method = 'resistance-minus-box-head'
        if head_time < s or half_width >= HEAD_BOX_HALF_WIDTH:
            method += '-loose'
        return TailValue(max(total - head, 0.0), err + 1e-10, method=method)

    def total(self, x):
        return regularized_resolvent('lattice2d', x, (0, 0))


class BesselTail():
    """∫_s^∞ p_d(t,r,r)dt for the Bessel process."""

    name = 'bessel'

    def __init__(self, d, boundary='none'):
        _bessel_order(d, boundary)
        self.d = d
        self.boundary = boundary

    def tail(self, r, s):
        value, err = bessel_time_tail(r, s, self.d, self.boundary)
        return TailValue(value, err, method='tail-quadrature')


class FractionalTail():
    """∫_s^∞ p_α(t,x,x)dt = (1/π)∫₀^π e^{−sS^α}S^{−α}dφ, transient α < 1/2."""

    name = 'fractional'

    def __init__(self, alpha):
        if not 0.0 < alpha < 0.5:
            raise ArgumentError('fractional tail is finite only for α < 1/2',
                                {'alpha': alpha})
        self.alpha = alpha
        self._total = None

    def tail(self, x, s):  # pylint: disable=W0613
        alpha = self.alpha
        if s < 0:
            raise ArgumentError('lower limit must be non-negative', {'s': s})

        def regular(phi):
            # S^{−α} = φ^{−2α}·(S/φ²)^{−α}; the φ^{−2α} factor is the weight
            ratio = (math.sin(0.5 * phi) / (0.5 * phi)) ** 2 if phi > 0 else 1.0  # noqa pylint: disable=C0301
            return math.exp(-s * _symbol(phi) ** alpha) * ratio ** (-alpha)

        cut = math.pi if s <= 1.0 else min(math.pi, s ** (-0.5 / alpha))
        value, err = integrate.quad(regular, 0.0, cut, weight='alg',
                                    wvar=(-2.0 * alpha, 0.0),
                                    epsabs=1e-13, epsrel=1e-11,
                                    limit=QUAD_LIMIT)
        if cut < math.pi:
            rest, rest_err = adaptive_quad(
                lambda phi: math.exp(-s * _symbol(phi) ** alpha)
                / _symbol(phi) ** alpha,
                cut, math.pi, spec=TIGHT_QUAD,
                points=_geometric_points(cut, cut, math.pi))
            value, err = value + rest, err + rest_err
        return TailValue(value / math.pi, err / math.pi, method='fourier')

    def total(self, x=0):  # pylint: disable=W0613
        if self._total is None:
            self._total = self.tail(0, 0.0).upper
        return self._total
