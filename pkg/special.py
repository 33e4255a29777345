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

"""Special functions, bound constants and quadrature engines.

Bessel, Gamma and exponential-integral values come from `scipy.special`;
the constants of the eigenvalue bounds (c(σ), F(γ), β(γ), c_α) are computed
by quadrature here, each with an independent closed form kept as a second
oracle.

Key Functions:

- `c_sigma`: the CLR constant c(σ) = e^{−σ}∫₀^∞ z e^{−z}/(z+σ) dz.
- `F_gamma`: tail profile of the half-line killed heat kernel.
- `beta_gamma`: constant of the Bargmann-type Lieb-Thirring bound.
- `c_alpha`: asymptotic constant of the fractional regularized resolvent.
- `fractional_coefficients`: Toeplitz entries of the fractional
  lattice Laplacian.
- `periodic_trapezoid`, `adaptive_quad`, `tail_split_quad`,
  `richardson_log_lambda`: quadrature and extrapolation engines.
"""

import math
from dataclasses import dataclass
import numpy as np
from scipy import integrate, special
from errors import ArgumentError, NumericalError

QUAD_LIMIT = 400
RULES = ('periodic-trapezoid', 'adaptive-Gauss', 'tail-split')


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and rule selection for a quadrature call."""

    rule: str = 'adaptive-Gauss'
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_refinements: int = 14

    def __post_init__(self):
        if self.rule not in RULES:
            raise ArgumentError('unknown quadrature rule', {'rule': self.rule})
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ArgumentError('quadrature tolerances must be positive')
        if self.max_refinements < 1:
            raise ArgumentError('max_refinements must be >= 1')


DEFAULT_QUAD = QuadratureSpec()


def periodic_trapezoid(func, spec=None, n0=16):
    """Integrates a 2π-periodic function over [−π, π] by node doubling.

    The trapezoid rule is spectrally accurate for smooth periodic
    integrands; each doubling reuses the previous nodes.

    Args:
        func: Vectorized callable of φ.
        spec (QuadratureSpec): Tolerances and refinement budget.
        n0 (int): Initial node count.

    Returns:
        tuple: (value, error estimate).

    Raises:
        NumericalError: If the budget is exhausted before convergence.
    """
    spec = spec or QuadratureSpec(rule='periodic-trapezoid')
    n = int(n0)
    nodes = -math.pi + 2.0 * math.pi * np.arange(n) / n
    total = float(np.sum(func(nodes)))
    value = 2.0 * math.pi * total / n
    for _ in range(spec.max_refinements):
        mids = nodes + math.pi / n
        total += float(np.sum(func(mids)))
        nodes = np.sort(np.concatenate([nodes, mids]))
        n *= 2
        new_value = 2.0 * math.pi * total / n
        err = abs(new_value - value)
        value = new_value
        if err <= max(spec.abs_tol, spec.rel_tol * abs(value)):
            return value, err
    raise NumericalError('periodic trapezoid did not converge',
                         {'nodes': n, 'last_change': err})


def periodic_trapezoid_2d(func, spec=None, n0=32):
    """Integrates a doubly periodic function over [−π, π]² by node doubling.

    Used as an independent oracle for the reduced one-dimensional
    lattice Green function quadratures.
    """
    spec = spec or QuadratureSpec(rule='periodic-trapezoid', max_refinements=6)
    n = int(n0)
    value = None
    err = math.inf
    for _ in range(spec.max_refinements + 1):
        grid = -math.pi + 2.0 * math.pi * np.arange(n) / n
        phi1, phi2 = np.meshgrid(grid, grid, indexing='ij')
        new_value = (2.0 * math.pi / n) ** 2 * float(np.sum(func(phi1, phi2)))
        if value is not None:
            err = abs(new_value - value)
            if err <= max(spec.abs_tol, spec.rel_tol * abs(new_value)):
                return new_value, err
        value = new_value
        n *= 2
    raise NumericalError('2D periodic trapezoid did not converge',
                         {'nodes': n, 'last_change': err})


def adaptive_quad(func, a, b, spec=None, points=None, weight=None, wvar=None):
    """Adaptive Gauss–Kronrod quadrature with explicit breakpoints.

    Breakpoints split [a, b] into subintervals integrated separately, which
    also works for infinite endpoints and weighted (QAWO/QAWS/QAWF) rules.

    Args:
        func: Scalar callable.
        a, b: Interval endpoints (b may be inf).
        spec (QuadratureSpec): Tolerances.
        points (list, optional): Interior breakpoints.
        weight, wvar: Passed to scipy.integrate.quad.

    Returns:
        tuple: (value, error estimate).
    """
    spec = spec or DEFAULT_QUAD
    edges = [a] + sorted(p for p in (points or []) if a < p < b) + [b]
    value, error = 0.0, 0.0
    for left, right in zip(edges[:-1], edges[1:]):
        kwargs = {'epsabs': spec.abs_tol, 'epsrel': spec.rel_tol,
                  'limit': QUAD_LIMIT}
        if weight is not None:
            kwargs.update({'weight': weight, 'wvar': wvar})
            if math.isinf(right):
                kwargs.pop('epsrel')
                kwargs.pop('limit')
        part, part_err = integrate.quad(func, left, right, **kwargs)
        value += part
        error += part_err
    return value, error


def tail_split_quad(func, a, split, tail, spec=None, points=None):
    """Integrates over [a, ∞) as a numerical head plus a supplied tail.

    Args:
        func: Integrand on [a, split].
        a, split: Head interval.
        tail: Callable returning (value, error) of the integral beyond split.
        spec, points: As in adaptive_quad.

    Returns:
        tuple: (value, error estimate).
    """
    head, head_err = adaptive_quad(func, a, split, spec=spec, points=points)
    tail_value, tail_err = tail(split)
    return head + tail_value, head_err + tail_err


def richardson_log_lambda(lambdas, values):
    """Extrapolates λ → 0 for expansions in powers of 1/ln λ.

    Fits values = v₀ + Σ c_k (1/ln λ)^k with the full polynomial degree the
    data allow and compares with one degree less for the error estimate.

    Args:
        lambdas: Positive λ grid (at least two points).
        values: Values at those λ.

    Returns:
        tuple: (v₀, error estimate).
    """
    lambdas = np.asarray(lambdas, dtype=float)
    values = np.asarray(values, dtype=float)
    if lambdas.size < 2 or np.any(lambdas <= 0) or np.any(lambdas >= 1):
        raise ArgumentError('need at least two λ values in (0, 1)')
    u = 1.0 / np.log(lambdas)
    deg = lambdas.size - 1
    fine = np.polyval(np.polyfit(u, values, deg), 0.0)
    coarse = np.polyval(np.polyfit(u, values, deg - 1), 0.0)
    return float(fine), float(abs(fine - coarse))


def c_sigma(sigma):
    """The constant c(σ) = e^{−σ}∫₀^∞ z e^{−z}/(z+σ) dz of the CLR bound.

    Args:
        sigma (float): σ ≥ 0.

    Returns:
        float: c(σ); exactly 1 at σ = 0.
    """
    if sigma < 0:
        raise ArgumentError('sigma must be non-negative', {'sigma': sigma})
    if sigma == 0:
        return 1.0
    spec = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-13)

    def integrand(z):
        return z * math.exp(-z) / (z + sigma)

    def tail(split):
        return integrate.quad(integrand, split, math.inf, epsabs=1e-18)[:2]

    value, _ = tail_split_quad(integrand, 0.0, 40.0, tail, spec=spec,
                               points=[1.0, 5.0, 15.0])
    return math.exp(-sigma) * value


def exp_integral_c_sigma(sigma):
    """Closed form e^{−σ} − σE₁(σ) of c(σ), the second oracle."""
    if sigma < 0:
        raise ArgumentError('sigma must be non-negative', {'sigma': sigma})
    if sigma == 0:
        return 1.0
    if sigma > 700:
        return 0.0
    return math.exp(-sigma) * (1.0 - sigma * math.exp(sigma) * special.exp1(sigma))  # noqa pylint: disable=C0301


def F_gamma(gamma):  # pylint: disable=C0103
    """Tail profile F(γ) = ∫_γ^∞ (1 − e^{−1/τ})/√(4πτ) dτ.

    For the half-line killed at 0, ∫_s^∞ p₁(t,x,x)dt = |x|·F(s/x²).
    Closed form: erf(1/√γ) − √(γ/π)(1 − e^{−1/γ}); F(0) = 1,
    F ≤ 1 and F(γ) ≤ 1/√(πγ).
    """
    if gamma < 0:
        raise ArgumentError('gamma must be non-negative', {'gamma': gamma})
    if gamma == 0:
        return 1.0
    if math.isinf(gamma):
        return 0.0
    return (math.erf(1.0 / math.sqrt(gamma))
            + math.sqrt(gamma / math.pi) * math.expm1(-1.0 / gamma))


def F_gamma_quadrature(gamma):  # pylint: disable=C0103
    """Independent quadrature of F(γ) in the variable u = 1/τ."""
    if gamma < 0:
        raise ArgumentError('gamma must be non-negative', {'gamma': gamma})
    upper = math.inf if gamma == 0 else 1.0 / gamma
    return weighted_tail_profile(upper, 0.0)


def weighted_tail_profile(upper, g):
    """(1/√(4π))∫₀^U u^{g−3/2}(1 − e^{−u}) du, the t^{−g}-weighted tail profile.

    With U = x²/s this equals |x|^{2g−1}∫_s^∞ t^{−g} p₁(t,x,x) dt for the
    half-line killed kernel (g = 0 gives F(s/x²)).
    """
    if g < 0:
        raise ArgumentError('weight exponent must be non-negative', {'g': g})
    if upper <= 0:
        return 0.0
    if math.isinf(upper) and g >= 0.5:
        return math.inf

    def smooth(u):
        return -math.expm1(-u) / u if u > 0 else 1.0

    head_end = min(upper, 1.0)
    value = integrate.quad(smooth, 0.0, head_end, weight='alg',
                           wvar=(g - 0.5, 0.0), epsabs=1e-14,
                           epsrel=1e-12)[0]
    if upper > 1.0:
        value += integrate.quad(lambda u: u ** (g - 1.5) * -math.expm1(-u),
                                1.0, upper, epsabs=1e-14, epsrel=1e-12,
                                limit=QUAD_LIMIT)[0]
    return value / math.sqrt(4.0 * math.pi)


def beta_gamma(gamma):
    """β(γ) = π^{−1/2} γΓ(γ) ∫₀^∞ (1 − e^{−1/s})/s^{1/2+γ} ds for 0 < γ < 1/2."""
    if not 0.0 < gamma < 0.5:
        raise ArgumentError('beta_gamma needs 0 < gamma < 1/2', {'gamma': gamma})
    head = integrate.quad(lambda s: -math.expm1(-1.0 / s) if s > 0 else 1.0,
                          0.0, 1.0, weight='alg', wvar=(-0.5 - gamma, 0.0),
                          epsabs=1e-14, epsrel=1e-12)[0]
    tail = integrate.quad(lambda s: -math.expm1(-1.0 / s) * s ** (-0.5 - gamma),  # noqa pylint: disable=C0301
                          1.0, math.inf, epsabs=1e-14, epsrel=1e-12,
                          limit=QUAD_LIMIT)[0]
    return special.gamma(gamma + 1.0) / math.sqrt(math.pi) * (head + tail)


def beta_gamma_closed(gamma):
    """Γ(γ+1)Γ(γ+½)/(√π(½−γ)), the closed form of β(γ)."""
    if not 0.0 < gamma < 0.5:
        raise ArgumentError('beta_gamma needs 0 < gamma < 1/2', {'gamma': gamma})
    return (special.gamma(gamma + 1.0) * special.gamma(gamma + 0.5)
            / (math.sqrt(math.pi) * (0.5 - gamma)))


def _sin2_moment(alpha, split_periods=20):
    """∫₀^∞ sin²z / z^{2α} dz with the oscillatory tail handled analytically."""
    big = split_periods * math.pi
    head, _ = adaptive_quad(lambda z: math.sin(z) ** 2 * z ** (-2.0 * alpha)
                            if z > 0 else 0.0, 0.0, big,
                            spec=QuadratureSpec(abs_tol=1e-13, rel_tol=1e-12),
                            points=[math.pi * k for k in range(1, split_periods)])  # noqa pylint: disable=C0301
    smooth_tail = big ** (1.0 - 2.0 * alpha) / (2.0 * (2.0 * alpha - 1.0))
    osc_tail = integrate.quad(lambda z: z ** (-2.0 * alpha), big, math.inf,
                              weight='cos', wvar=2.0, epsabs=1e-13)[0]
    return head + smooth_tail - 0.5 * osc_tail


def c_alpha(alpha):
    """Asymptotic constant of the fractional regularized resolvent.

    R̃(x,0) ∼ c_α |x|^{2α−1} for 1/2 < α ≤ 1 with the factor-2 convention,
    c_α = (8/π)4^{−α}∫₀^∞ sin²z/z^{2α} dz, so that c₁ = 1.
    """
    if not 0.5 < alpha <= 1.0:
        raise ArgumentError('c_alpha needs 1/2 < alpha <= 1', {'alpha': alpha})
    return 8.0 / math.pi * 4.0 ** (-alpha) * _sin2_moment(alpha)


def c_alpha_printed(alpha):
    """(4/π)∫₀^∞ sin²z/z^{2α} dz, the unnormalized form, reported alongside."""
    if not 0.5 < alpha <= 1.0:
        raise ArgumentError('c_alpha needs 1/2 < alpha <= 1', {'alpha': alpha})
    return 4.0 / math.pi * _sin2_moment(alpha)


def c_alpha_closed(alpha):
    """1/(Γ(2α) sin(π(α − 1/2))), the closed form of c_alpha."""
    if not 0.5 < alpha <= 1.0:
        raise ArgumentError('c_alpha needs 1/2 < alpha <= 1', {'alpha': alpha})
    return 1.0 / (special.gamma(2.0 * alpha) * math.sin(math.pi * (alpha - 0.5)))  # noqa pylint: disable=C0301


def lt_half_constants(gamma, sigma):
    """Constants (c₁, c₂) of the γ < 1/2 Lieb-Thirring bound."""
    if sigma <= 0:
        raise ArgumentError('sigma must be positive', {'sigma': sigma})
    c1 = beta_gamma(gamma)
    c2 = 2.0 / ((1.0 + 2.0 * gamma) * math.sqrt(sigma ** (1.0 + 2.0 * gamma) * math.pi))  # noqa pylint: disable=C0301
    return c1, c2


def fractional_coefficients(alpha, n_max):
    """Fourier coefficients h_α(n), n = 0..n_max, of (4 sin²(φ/2))^α.

    Uses h(0) = Γ(2α+1)/Γ(α+1)² and h(n+1) = h(n)(n−α)/(n+α+1); integer α
    gives exact zeros beyond n = α.
    """
    if not 0.0 < alpha <= 2.0:
        raise ArgumentError('alpha must lie in (0, 2]', {'alpha': alpha})
    n = np.arange(int(n_max), dtype=float)
    ratios = (n - alpha) / (n + alpha + 1.0)
    h0 = math.exp(special.gammaln(2.0 * alpha + 1.0) - 2.0 * special.gammaln(alpha + 1.0))  # noqa pylint: disable=C0301
    return h0 * np.concatenate([[1.0], np.cumprod(ratios)])


def fractional_coefficient_quadrature(alpha, n):
    """(1/π)∫₀^π (4 sin²(φ/2))^α cos(nφ) dφ by weighted quadrature."""
    value = integrate.quad(lambda p: (4.0 * math.sin(p / 2.0) ** 2) ** alpha,
                           0.0, math.pi, weight='cos', wvar=float(n),
                           epsabs=1e-14, epsrel=1e-12, limit=QUAD_LIMIT)[0]
    return value / math.pi


def bessel_i(nu, z, scaled=False):
    """Modified Bessel I_ν(z) for real order ν > −1 and z ≥ 0.

    Args:
        nu (float): Order.
        z: Argument (scalar or array), non-negative.
        scaled (bool): Return e^{−z}I_ν(z).

    Raises:
        NumericalError: On overflow of the unscaled value.
    """
    z = np.asarray(z, dtype=float)
    if nu <= -1:
        raise ArgumentError('order must exceed -1', {'nu': nu})
    if np.any(z < 0):
        raise ArgumentError('argument must be non-negative')
    if scaled:
        return special.ive(nu, z)
    value = special.iv(nu, z)
    if np.any(np.isinf(value)):
        raise NumericalError('bessel_i overflow, use scaled=True',
                             {'nu': nu, 'z_max': float(np.max(z))})
    return value


def bessel_k0(z):
    """Modified Bessel K₀(z), z > 0."""
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise ArgumentError('bessel_k0 needs z > 0')
    return special.k0(z)


def bessel_j0(z):
    """Bessel J₀(z), z ≥ 0."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ArgumentError('bessel_j0 needs z >= 0')
    return special.j0(z)


def gamma_fn(x):
    """Gamma function for x > 0."""
    if np.any(np.asarray(x) <= 0):
        raise ArgumentError('gamma_fn needs x > 0')
    return special.gamma(x)
