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

"""Exact eigenvalue counting and extraction on finite truncations.

Counts come from Sylvester's law of inertia: the number of negative pivots
of a symmetric triangular factorization of A − sI equals the number of
eigenvalues below s. Three backends are used:

- Sturm sequences for tridiagonal (banded) matrices,
- Bunch-Kaufman LDLᵀ (`scipy.linalg.ldl`) for dense matrices,
- SuperLU with symmetric diagonal pivoting for large sparse matrices.

Eigenvalues below a threshold are extracted by LAPACK bisection for
tridiagonal and dense matrices and by inertia bisection for sparse ones,
so the reported list always agrees with the count.
"""

import math
from dataclasses import dataclass, field
import numpy as np
from scipy import linalg, sparse, special
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from scipy.sparse.csgraph import reverse_cuthill_mckee
from scipy.sparse.linalg import splu
from errors import (ArgumentError, NumericalError, ResourceError,
                    RootNotFoundError)
from utils import load_backend_config
from base_logger import logger

_BACKEND = load_backend_config()
TAU_ZERO_FACTOR = _BACKEND.getfloat('numerics', 'TAU_ZERO_FACTOR', fallback=1e-12)  # noqa pylint: disable=C0301
EIGEN_CAP = _BACKEND.getint('numerics', 'EIGEN_CAP', fallback=5000)
DENSE_CUTOFF = _BACKEND.getint('numerics', 'DENSE_CUTOFF', fallback=500)
PIVOT_BUDGET = _BACKEND.getint('numerics', 'PIVOT_PERTURBATION_BUDGET', fallback=3)  # noqa pylint: disable=C0301
DENSE_FALLBACK_LIMIT = 6000


@dataclass
class SpectralReport():
    """Exact eigenvalue data of one truncated operator.

    Attributes:
        n0 (int): Number of eigenvalues ≤ 0 (within τ_zero).
        n_below (dict): E → number of eigenvalues ≤ −E.
        eigenvalues (list): Sorted eigenvalues < 0, when extracted.
        lt_sums (dict): γ → S_γ.
        truncation (dict): Box or grid metadata.
        convergence_flag (bool): Count unchanged over the last two box
            enlargements.
    """

    n0: int
    n_below: dict = field(default_factory=dict)
    eigenvalues: list = None
    lt_sums: dict = field(default_factory=dict)
    truncation: dict = field(default_factory=dict)
    convergence_flag: bool = False

    def to_dict(self):
        return {'n0': self.n0,
                'n_below': {repr(float(k)): v for k, v in self.n_below.items()},
                'eigenvalues': self.eigenvalues,
                'lt_sums': {repr(float(k)): v for k, v in self.lt_sums.items()},
                'truncation': self.truncation,
                'convergence_flag': self.convergence_flag}

    @classmethod
    def from_dict(cls, data):
        return cls(n0=data['n0'],
                   n_below={float(k): v for k, v in data.get('n_below', {}).items()},  # noqa pylint: disable=C0301
                   eigenvalues=data.get('eigenvalues'),
                   lt_sums={float(k): v for k, v in data.get('lt_sums', {}).items()},  # noqa pylint: disable=C0301
                   truncation=data.get('truncation', {}),
                   convergence_flag=data.get('convergence_flag', False))


def tau_zero(A):
    """Zero-classification threshold τ = TAU_ZERO_FACTOR·‖A‖∞."""
    return TAU_ZERO_FACTOR * A.norm_inf()


def sturm_count(diag, off, shift):
    """Number of eigenvalues ≤ shift of a symmetric tridiagonal matrix.

    A zero pivot is perturbed to a tiny negative value so that an
    eigenvalue exactly at the shift is counted.
    """
    diag = np.asarray(diag, dtype=float).tolist()
    off2 = (np.asarray(off, dtype=float) ** 2).tolist()
    scale = max(1.0, max((abs(v) for v in diag), default=0.0))
    tiny = np.finfo(float).tiny * 1e4 * scale
    count = 0
    q = 1.0
    for i, d in enumerate(diag):
        q = d - shift - (off2[i - 1] / q if i else 0.0)
        if q <= 0:
            count += 1
            if q == 0:
                q = -tiny
    return count


def ldl_inertia(dense):
    """(negative, zero, positive) pivot counts of a Bunch-Kaufman LDLᵀ."""
    _, block_diag, _ = linalg.ldl(dense, lower=True)
    n = block_diag.shape[0]
    neg = zero = pos = 0
    i = 0
    while i < n:
        if i + 1 < n and block_diag[i + 1, i] != 0.0:
            for value in np.linalg.eigvalsh(block_diag[i:i + 2, i:i + 2]):
                neg, zero, pos = _tally(value, neg, zero, pos)
            i += 2
        else:
            neg, zero, pos = _tally(block_diag[i, i], neg, zero, pos)
            i += 1
    return neg, zero, pos


def _tally(value, neg, zero, pos):
    if value < 0:
        return neg + 1, zero, pos
    if value == 0:
        return neg, zero + 1, pos
    return neg, zero, pos + 1


def _sparse_negative_pivots(matrix, ordering='mmd'):
    permc_spec = 'MMD_AT_PLUS_A'
    if ordering == 'rcm':
        perm = reverse_cuthill_mckee(sparse.csr_matrix(matrix), symmetric_mode=True)  # noqa pylint: disable=C0301
        matrix = sparse.csr_matrix(matrix)[perm][:, perm]
        permc_spec = 'NATURAL'
    lu = splu(sparse.csc_matrix(matrix), permc_spec=permc_spec,
              diag_pivot_thresh=0.0, options={'SymmetricMode': True})
    if not np.array_equal(lu.perm_r, lu.perm_c):
        raise NumericalError('factorization left the symmetric pivot order')
    pivots = lu.U.diagonal()
    if np.any(pivots == 0) or not np.all(np.isfinite(pivots)):
        raise NumericalError('zero or non-finite pivot')
    return int(np.count_nonzero(pivots < 0))


def count_below(A, shift):
    """Number of eigenvalues of A that are ≤ shift (zero pivots included).

    Args:
        A (SymmetricOperatorMatrix): The operator.
        shift (float): Spectral point.

    Returns:
        int: The inertia count.

    Raises:
        NumericalError: If the sparse factorization breaks down after the
            pivot perturbation budget.
    """
    if A.n == 0:
        return 0
    if A.storage == 'banded':
        diag, off = A.tridiagonal()
        return sturm_count(diag, off, shift)
    form = A.symmetric_form()
    if not sparse.issparse(form) or A.n <= DENSE_CUTOFF:
        dense = form.toarray() if sparse.issparse(form) else np.asarray(form)
        neg, zero, _ = ldl_inertia(dense - shift * np.eye(A.n))
        return neg + zero
    eye = sparse.identity(A.n, format='csr')
    slack = max(tau_zero(A), np.finfo(float).eps * max(A.norm_inf(), 1.0))
    last_error = None
    for attempt in range(PIVOT_BUDGET + 1):
        # perturbed shifts stay inside the zero window
        nudged = shift + slack * (1.0 - 2.0 ** (1 - attempt)) if attempt > 1 else shift  # noqa pylint: disable=C0301
        ordering = 'mmd' if attempt == 0 else 'rcm'
        try:
            return _sparse_negative_pivots(form - nudged * eye, ordering)
        except (NumericalError, RuntimeError) as error:
            last_error = error
            logger.debug(f"Sparse inertia attempt {attempt} failed: {error}")  # noqa pylint: disable=W1203
    if A.n <= DENSE_FALLBACK_LIMIT:
        logger.warning(f"Sparse inertia fell back to dense LDL on n={A.n}")  # noqa pylint: disable=W1203
        neg, zero, _ = ldl_inertia(form.toarray() - shift * np.eye(A.n))
        return neg + zero
    raise NumericalError('inertia factorization broke down',
                         {'n': A.n, 'shift': shift, 'error': str(last_error)})


def count_nonpositive(A, E=0.0):
    """Number of eigenvalues ≤ −E + τ_zero.

    Args:
        A (SymmetricOperatorMatrix): The operator.
        E (float): Non-negative energy shift.

    Returns:
        int: N_E, or N₀ for E = 0.
    """
    if E < 0:
        raise ArgumentError('energy shift must be non-negative', {'E': E})
    return count_below(A, -E + tau_zero(A))


def _lower_bound(A):
    return -A.norm_inf() - 1.0


def eigenvalues_below(A, threshold, cap=None, rel_tol=1e-10):
    """All eigenvalues strictly below threshold, sorted ascending.

    Args:
        A (SymmetricOperatorMatrix): The operator.
        threshold (float): Upper end of the spectral window.
        cap (int, optional): Largest admissible number of eigenvalues.
        rel_tol (float): Relative accuracy of each eigenvalue.

    Returns:
        list: Eigenvalues < threshold.

    Raises:
        ResourceError: If more than `cap` eigenvalues lie below threshold.
    """
    cap = EIGEN_CAP if cap is None else cap
    if A.n == 0:
        return []
    expected = count_below(A, np.nextafter(threshold, -math.inf))
    if expected > cap:
        raise ResourceError('too many eigenvalues below threshold',
                            {'count': expected, 'cap': cap})
    if expected == 0:
        return []
    lower = _lower_bound(A)
    if A.storage == 'banded':
        diag, off = A.tridiagonal()
        values = linalg.eigvalsh_tridiagonal(
            diag, off, select='v', select_range=(lower, threshold),
            lapack_driver='stebz')
    elif not A.is_sparse or A.n <= DENSE_FALLBACK_LIMIT:
        values = linalg.eigh(A.to_dense(), eigvals_only=True,
                             subset_by_value=(lower, threshold))
    else:
        values = _bisect_eigenvalues(A, lower, threshold, expected, rel_tol)
    values = sorted(float(v) for v in values if v < threshold)
    if len(values) != expected:
        logger.warning(f"Eigenvalue extraction found {len(values)} values, inertia says {expected}")  # noqa pylint: disable=W1203,C0301
        values = _bisect_eigenvalues(A, lower, threshold, expected, rel_tol)
    return values


def _bisect_eigenvalues(A, lower, upper, expected, rel_tol):
    """Isolates and refines every eigenvalue in (lower, upper) by inertia."""
    found = []
    stack = [(lower, upper, 0, expected)]
    while stack:
        lo, hi, count_lo, count_hi = stack.pop()
        inside = count_hi - count_lo
        if inside <= 0:
            continue
        width = hi - lo
        if width <= rel_tol * max(abs(lo), abs(hi), 1e-300) or width < 1e-300:
            found.extend([0.5 * (lo + hi)] * inside)
            continue
        mid = 0.5 * (lo + hi)
        count_mid = count_below(A, mid)
        stack.append((lo, mid, count_lo, count_mid))
        stack.append((mid, hi, count_mid, count_hi))
    return sorted(found)


def lieb_thirring_sum(eigenvalues, gamma):
    """S_γ = Σ|λ_i|^γ over non-positive eigenvalues; γ = 0 gives the count."""
    if gamma < 0:
        raise ArgumentError('gamma must be non-negative', {'gamma': gamma})
    values = np.asarray(list(eigenvalues), dtype=float)
    if np.any(values > 0):
        raise ArgumentError('Lieb-Thirring sums take non-positive eigenvalues',
                            {'max': float(values.max())})
    if gamma == 0:
        return float(values.size)
    return float(np.sum(np.abs(values) ** gamma))


def lt_from_counting(eigenvalues, gamma):
    """S_γ = γ∫₀^∞ E^{γ−1} N_E dE, evaluated exactly for a step function N_E."""
    energies = np.sort(np.abs(np.asarray(list(eigenvalues), dtype=float)))
    if gamma == 0:
        return float(energies.size)
    counts = energies.size - np.arange(energies.size)
    edges = np.concatenate([[0.0], energies])
    return float(np.sum(counts * (edges[1:] ** gamma - edges[:-1] ** gamma)))


def spectral_report(A, energies=(), gammas=(), extract=True, truncation=None):
    """Counts, eigenvalues and Lieb-Thirring sums of one truncated operator."""
    n0 = count_nonpositive(A)
    n_below = {0.0: n0}
    for E in energies:
        n_below[float(E)] = count_nonpositive(A, float(E))
    eigenvalues = None
    lt_sums = {}
    if extract:
        eigenvalues = eigenvalues_below(A, tau_zero(A))
        eigenvalues = [min(v, 0.0) for v in eigenvalues]
        for gamma in gammas:
            lt_sums[float(gamma)] = lieb_thirring_sum(eigenvalues, gamma)
    meta = dict(A.metadata)
    meta.update(truncation or {})
    meta['n'] = A.n
    meta['tau_zero'] = tau_zero(A)
    return SpectralReport(n0=n0, n_below=n_below, eigenvalues=eigenvalues,
                          lt_sums=lt_sums, truncation=meta)


def box_convergence(build, schedule, E=0.0):
    """Counts on a strictly increasing box schedule.

    Args:
        build: Callable half_width → SymmetricOperatorMatrix.
        schedule (list): Strictly increasing half-widths.
        E (float): Energy shift.

    Returns:
        tuple: (counts per box, convergence flag). The flag is true when
        the last two enlargements leave the count unchanged.
    """
    schedule = list(schedule)
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ArgumentError('box schedule must be strictly increasing',
                            {'schedule': schedule})
    counts = [count_nonpositive(build(R), E) for R in schedule]
    flag = len(counts) >= 3 and counts[-1] == counts[-2] == counts[-3]
    return counts, flag


def rank_one_eigenvalue(resolvent_diag, alpha, tol=1e-10, max_expansions=200):
    """Root λ₀ > 0 of −α·R_λ(y,y) = 1; the eigenvalue of H₀ − αδ_y is −λ₀.

    Args:
        resolvent_diag: Callable λ > 0 → R_λ(y,y) < 0.
        alpha (float): Coupling α > 0.
        tol (float): Admissible residual |−αR − 1|.
        max_expansions (int): Bracket expansion budget.

    Returns:
        float: λ₀.

    Raises:
        RootNotFoundError: If no sign change is found.
        NumericalError: If the residual exceeds tol.
    """
    if alpha <= 0:
        raise ArgumentError('coupling must be positive', {'alpha': alpha})

    def residual(lam):
        return -alpha * resolvent_diag(lam) - 1.0

    hi = 1.0
    for _ in range(max_expansions):
        if residual(hi) < 0:
            break
        hi *= 2.0
    else:
        raise RootNotFoundError('no upper bracket for the rank-one equation',
                                {'alpha': alpha, 'lambda': hi})
    lo = hi / 2.0
    for _ in range(max_expansions):
        if residual(lo) > 0:
            break
        lo /= 4.0
    else:
        raise RootNotFoundError('no sign change: H0 may be transient with '
                                'coupling below threshold',
                                {'alpha': alpha, 'lambda': lo})
    root = brentq(residual, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                  maxiter=1000)
    if abs(residual(root)) > tol:
        raise NumericalError('rank-one residual above tolerance',
                             {'lambda': root, 'residual': residual(root)})
    return float(root)


def _potential_on(V, x):
    return float(np.asarray(V(np.array([x])), dtype=float)[0])


def oscillation_count_1d(V, half_width, breakpoints=None, rtol=1e-10):
    """Number of Dirichlet eigenvalues ≤ 0 of −d²/dx² − V on [−L, L].

    Integrates the Prüfer angle θ' = cos²θ + V sin²θ of u'' = −Vu with
    u(−L) = 0, u'(−L) = 1; the count is the number of zeros of u in
    (−L, L], i.e. floor(θ(L)/π).

    Args:
        V: Potential (callable on arrays of points), V ≥ 0.
        half_width (float): L.
        breakpoints (list, optional): Discontinuities of V.
        rtol (float): Integrator relative tolerance.

    Returns:
        int: The oscillation count.

    Raises:
        NumericalError: On integrator failure (step underflow).
    """
    if half_width <= 0:
        raise ArgumentError('half-width must be positive',
                            {'half_width': half_width})
    if breakpoints is None and hasattr(V, 'breakpoints'):
        breakpoints = V.breakpoints()
    edges = sorted({-half_width, half_width,
                    *[b for b in (breakpoints or []) if -half_width < b < half_width]})  # noqa pylint: disable=C0301
    samples = np.linspace(-half_width, half_width, 4001)
    v_max = max(1.0, float(np.max(V(samples))))
    max_step = (math.pi / 8.0) / v_max

    def rhs(x, theta):
        s = math.sin(theta[0])
        c = math.cos(theta[0])
        return [c * c + _potential_on(V, x) * s * s]

    theta = 0.0
    for left, right in zip(edges[:-1], edges[1:]):
        solution = solve_ivp(rhs, (left, right), [theta], method='DOP853',
                             rtol=rtol, atol=1e-12, max_step=max_step)
        if solution.status != 0:
            raise NumericalError('oscillation integrator failed',
                                 {'message': solution.message,
                                  'interval': (left, right)})
        theta = float(solution.y[0, -1])
    return int(math.floor(theta / math.pi + 1e-12))


def _disk_matching(lam, m, q):
    k = math.sqrt(q + lam)
    kappa = math.sqrt(-lam)
    log_k = special.kvp(m, kappa) / special.kv(m, kappa)
    return k * special.jvp(m, k) - kappa * log_k * special.jv(m, k)


def disk_well_mode_roots(m, q=1.0, samples=4000):
    """Roots λ ∈ (−q, 0) of the J_m/K_m matching condition at r = 1."""
    grid = -q + q * (np.arange(1, samples) / samples)
    values = np.array([_disk_matching(lam, m, q) for lam in grid])
    roots = []
    for i in np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]:
        roots.append(float(brentq(_disk_matching, grid[i], grid[i + 1],
                                  args=(m, q), xtol=1e-14, rtol=1e-14)))
    return roots


def disk_well_eigenvalues(q=1.0, max_modes=200):
    """Negative eigenvalues of −Δ − q·1{|x|<1} on R², with multiplicity.

    Angular modes m = 0, 1, ... are scanned until one has no root; every
    m ≥ 1 root is listed twice (cos mθ and sin mθ).

    Returns:
        list: Eigenvalues in ascending order.

    Raises:
        NumericalError: If the mode scan does not terminate.
    """
    values = []
    for m in range(max_modes + 1):
        roots = disk_well_mode_roots(m, q)
        if not roots:
            return sorted(values)
        logger.debug(f"Disk well roots m={m}: {roots}")  # noqa pylint: disable=W1203
        values.extend(roots * (1 if m == 0 else 2))
    raise NumericalError('disk well mode scan did not terminate',
                         {'q': q, 'max_modes': max_modes})


def disk_well_eigencount(q=1.0):
    """Bound-state count of −Δ − q·1{|x|<1} on R² and its ground energy.

    Returns:
        tuple: (count over all angular modes, lowest eigenvalue).

    Raises:
        NumericalError: If no root is bracketed.
    """
    values = disk_well_eigenvalues(q)
    if not values:
        raise NumericalError('disk well root not bracketed', {'q': q})
    return len(values), values[0]
