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

"""Non-negative potentials V for the Schrödinger operators H₀ − V.

A `Potential` is a named closed-form family plus its parameters. It is
evaluated pointwise at site coordinates (1D integers or reals, 2D integer
pairs, radial distances) without cell averaging.

Families:

- `zero`
- `delta`: point masses, `sites` and `amps`.
- `power`: amp·(1+|x|)^{−p}; `inv_linear` is p = 1.
- `log_corrected`: amp/((1+|x|²)·ln^q(2+|x|)).
- `dyadic_block`: value v_k on 2^k ≤ |x| < 2^{k+1}.
- `constant_on_set`: value on a ball (max or euclid norm) around a center.
- `bumps`: sum of Gaussian bumps.
- `sampled`: explicit site → value table.
- `radial_step`: value on r < r0, half value at r = r0.

Every family accepts an overall `scale` multiplier.
"""

import math
from dataclasses import dataclass, field, replace
import numpy as np
from errors import ArgumentError, DomainError

FAMILIES = ('zero', 'delta', 'power', 'inv_linear', 'log_corrected',
            'dyadic_block', 'constant_on_set', 'bumps', 'sampled',
            'radial_step')


def _site_key(site):
    if isinstance(site, (list, tuple, np.ndarray)):
        values = tuple(int(round(float(s))) for s in site)
        return values[0] if len(values) == 1 else values
    return int(round(float(site)))


def _norm(coords, norm='euclid'):
    coords = np.asarray(coords, dtype=float)
    if coords.ndim == 1:
        return np.abs(coords)
    if norm == 'max':
        return np.max(np.abs(coords), axis=1)
    return np.sqrt(np.sum(coords ** 2, axis=1))


@dataclass(frozen=True)
class Potential():
    """A non-negative potential from a named family.

    Attributes:
        family (str): One of FAMILIES.
        params (dict): Family parameters.
        bound (float, optional): Known sup Λ; sampling checks V ≤ Λ.
    """

    family: str
    params: dict = field(default_factory=dict)
    bound: float = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ArgumentError('unknown potential family',
                                {'family': self.family})
        if self.bound is not None and self.bound < 0:
            raise DomainError('potential bound must be non-negative',
                              {'bound': self.bound})

    @property
    def scale(self):
        return float(self.params.get('scale', 1.0))

    def scaled(self, factor):
        """The potential factor·V."""
        if factor < 0:
            raise DomainError('scale factor must be non-negative',
                              {'factor': factor})
        params = dict(self.params)
        params['scale'] = self.scale * factor
        bound = None if self.bound is None else self.bound * factor
        return replace(self, params=params, bound=bound)

    def __call__(self, coords):
        return self.scale * self._raw(coords)

    def _raw(self, coords):  # noqa pylint: disable=R0911,R0912
        coords = np.asarray(coords, dtype=float)
        n = coords.shape[0] if coords.ndim else 1
        coords = coords.reshape(n) if coords.ndim <= 1 else coords
        p = self.params
        if self.family == 'zero':
            return np.zeros(n)
        if self.family in ('delta', 'sampled'):
            table = self.site_table()
            keys = [_site_key(c) for c in coords]
            offset = np.abs(coords - np.round(coords)) < 1e-12
            exact = offset if coords.ndim == 1 else np.all(offset, axis=1)
            return np.array([table.get(k, 0.0) if ok else 0.0
                             for k, ok in zip(keys, np.atleast_1d(exact))])
        r = _norm(coords, p.get('norm', 'euclid'))
        amp = float(p.get('amp', 1.0))
        if self.family == 'power':
            return amp * (1.0 + r) ** (-float(p.get('p', 1.0)))
        if self.family == 'inv_linear':
            return amp / (1.0 + r)
        if self.family == 'log_corrected':
            q = float(p.get('q', 2.0))
            return amp / ((1.0 + r ** 2) * np.log(2.0 + r) ** q)
        if self.family == 'dyadic_block':
            values = np.asarray(p.get('values', []), dtype=float)
            out = np.zeros(n)
            mask = r >= 1.0
            k = np.floor(np.log2(np.where(mask, r, 1.0))).astype(int)
            inside = mask & (k < values.size)
            out[inside] = values[k[inside]]
            return out
        if self.family == 'constant_on_set':
            center = np.asarray(p.get('center', 0.0), dtype=float)
            dist = _norm(coords - center, p.get('norm', 'max'))
            return np.where(dist <= float(p.get('radius', 0.0)) + 1e-12,
                            float(p.get('value', 1.0)), 0.0)
        if self.family == 'bumps':
            out = np.zeros(n)
            for c, h, w in zip(p.get('centers', []), p.get('heights', []),
                               p.get('widths', [])):
                c = np.asarray(c, dtype=float)
                dist = _norm(coords - c)
                out += float(h) * np.exp(-dist ** 2 / (2.0 * float(w) ** 2))
            return out
        # radial_step
        r0 = float(p.get('r0', 1.0))
        value = float(p.get('value', 1.0))
        out = np.where(r < r0, value, 0.0)
        edge = np.abs(r - r0) <= 1e-12 * max(r0, 1.0)
        out[edge] = 0.5 * value
        return out

    def site_table(self):
        """Site → value table of the `delta` and `sampled` families."""
        p = self.params
        if self.family == 'delta':
            sites = p.get('sites', [])
            amps = p.get('amps', [1.0] * len(sites))
            if len(amps) == 1 and len(sites) > 1:
                amps = list(amps) * len(sites)
            table = {}
            for s, a in zip(sites, amps):
                key = _site_key(s)
                table[key] = table.get(key, 0.0) + float(a)
            return table
        if self.family == 'sampled':
            return {_site_key(s): float(v) for s, v in p.get('values', [])}
        return {}

    def sample(self, coords):
        """Evaluates V at coordinates and checks 0 ≤ V ≤ Λ.

        Args:
            coords: (n,) or (n, 2) array of site coordinates.

        Returns:
            numpy.ndarray: Potential values.

        Raises:
            DomainError: On a negative value or a value above the bound.
        """
        values = np.asarray(self(coords), dtype=float)
        if np.any(values < 0) or np.any(np.isnan(values)):
            raise DomainError('potential takes negative values',
                              {'family': self.family,
                               'min': float(np.nanmin(values))})
        if self.bound is not None and np.any(values > self.bound * (1 + 1e-12)):
            raise DomainError('potential exceeds its declared bound',
                              {'bound': self.bound,
                               'max': float(np.max(values))})
        return values

    def support_radius(self):
        """Radius outside which V vanishes, or inf."""
        p = self.params
        if self.family == 'zero':
            return 0.0
        if self.family in ('delta', 'sampled'):
            table = self.site_table()
            if not table:
                return 0.0
            return max(float(np.max(np.abs(np.atleast_1d(k)))) for k in table)
        if self.family == 'constant_on_set':
            center = np.atleast_1d(np.asarray(p.get('center', 0.0), dtype=float))
            return float(np.max(np.abs(center))) + float(p.get('radius', 0.0))
        if self.family == 'radial_step':
            return float(p.get('r0', 1.0))
        if self.family == 'dyadic_block':
            return 2.0 ** len(p.get('values', []))
        return math.inf

    def breakpoints(self):
        """Points where V is not smooth, for composite quadrature in 1D."""
        p = self.params
        if self.family == 'constant_on_set':
            c = float(np.atleast_1d(p.get('center', 0.0))[0])
            radius = float(p.get('radius', 0.0))
            return [c - radius, c + radius]
        if self.family == 'radial_step':
            return [float(p.get('r0', 1.0))]
        if self.family == 'dyadic_block':
            return [2.0 ** k for k in range(len(p.get('values', [])) + 1)]
        if self.family in ('power', 'inv_linear', 'log_corrected'):
            return [0.0]
        return []

    def sup(self):
        """Best known supremum: the declared bound or a family maximum."""
        if self.bound is not None:
            return self.bound
        p = self.params
        if self.family == 'zero':
            return 0.0
        if self.family in ('delta', 'sampled'):
            table = self.site_table()
            return self.scale * max(table.values(), default=0.0)
        if self.family in ('power', 'inv_linear'):
            return self.scale * float(p.get('amp', 1.0))
        if self.family == 'log_corrected':
            return self.scale * float(p.get('amp', 1.0)) / math.log(2.0) ** float(p.get('q', 2.0))  # noqa pylint: disable=C0301
        if self.family == 'dyadic_block':
            return self.scale * max(p.get('values', [0.0]), default=0.0)
        if self.family in ('constant_on_set', 'radial_step'):
            return self.scale * float(p.get('value', 1.0))
        return self.scale * sum(float(h) for h in p.get('heights', []))

    def to_dict(self):
        return {'family': self.family, 'params': self.params,
                'bound': self.bound}

    @classmethod
    def from_dict(cls, data):
        params = dict(data.get('params', {}))
        for key in ('sites', 'centers'):
            if key in params:
                params[key] = [tuple(s) if isinstance(s, list) else s
                               for s in params[key]]
        if 'values' in params and data['family'] == 'sampled':
            params['values'] = [(tuple(s) if isinstance(s, list) else s, v)
                                for s, v in params['values']]
        return cls(family=data['family'], params=params,
                   bound=data.get('bound'))


def _parse_number(text):
    return float(text)


def _parse_site(text):
    parts = text.split('|')
    if len(parts) == 1:
        return int(float(parts[0]))
    return tuple(int(float(v)) for v in parts)


def parse_potential(text, bound=None):
    """Parses `family:key=value,...` into a Potential.

    Sites are `;`-separated and the coordinates of a 2D site are joined by
    `|`, e.g. `delta:site=1|0;0|2,amp=2`. List-valued parameters (`amp`,
    `values`, `heights`, `widths`, `centers`) are `;`-separated.

    Args:
        text (str): Potential descriptor.
        bound (float, optional): Declared sup Λ.

    Returns:
        Potential: The parsed potential.

    Raises:
        ArgumentError: On malformed text or an unknown family.
    """
    if not text or not text.strip():
        raise ArgumentError('empty potential descriptor')
    family, _, rest = text.strip().partition(':')
    family = family.strip()
    if family not in FAMILIES:
        raise ArgumentError('unknown potential family', {'family': family})
    raw = {}
    for item in filter(None, (s.strip() for s in rest.split(','))):
        key, sep, value = item.partition('=')
        if not sep:
            raise ArgumentError('malformed potential parameter',
                                {'item': item})
        raw[key.strip()] = value.strip()
    params = {}
    try:
        for key, value in raw.items():
            if key in ('site', 'sites'):
                params['sites'] = [_parse_site(s) for s in value.split(';')]
            elif key in ('amp', 'amps') and family == 'delta':
                params['amps'] = [float(v) for v in value.split(';')]
            elif key in ('values', 'heights', 'widths'):
                params[key] = [float(v) for v in value.split(';')]
            elif key == 'centers':
                params['centers'] = [_parse_site(s) if '|' in s else float(s)
                                     for s in value.split(';')]
            elif key == 'center':
                params['center'] = [float(v) for v in value.split('|')] \
                    if '|' in value else float(value)
            elif key == 'norm':
                params['norm'] = value
            elif key == 'table':
                pairs = [p.split('@') for p in value.split(';')]
                params['values'] = [(_parse_site(s), float(v)) for v, s in pairs]
            else:
                params[key] = _parse_number(value)
    except ValueError as error:
        raise ArgumentError('malformed potential parameter',
                            {'text': text, 'error': str(error)}) from error
    if family == 'delta' and 'sites' not in params:
        raise ArgumentError('delta potential needs site=...')
    return Potential(family=family, params=params, bound=bound)


def random_potential(kind, rng, dimension=1, radius=20, max_amp=3.0,
                     max_terms=4):
    """Seeded random potential for verification sweeps.

    Args:
        kind (str): `deltas`, `bumps`, `step` or `mixed`.
        rng (numpy.random.Generator): Source of randomness.
        dimension (int): 1 or 2.
        radius (float): Coordinates are drawn within this max-norm radius.
        max_amp (float): Largest amplitude of a single term.
        max_terms (int): Largest number of terms.

    Returns:
        Potential: A non-negative potential.
    """
    if kind == 'mixed':
        kind = ('deltas', 'bumps', 'step')[int(rng.integers(3))]
    terms = int(rng.integers(1, max_terms + 1))
    if kind == 'deltas':
        lim = int(radius)
        if dimension == 1:
            sites = [int(v) for v in rng.integers(-lim, lim + 1, size=terms)]
        else:
            sites = [tuple(int(v) for v in rng.integers(-lim, lim + 1, size=2))
                     for _ in range(terms)]
        amps = [float(a) for a in rng.uniform(0.05, max_amp, size=terms)]
        return Potential('delta', {'sites': sites, 'amps': amps})
    if kind == 'bumps':
        if dimension == 1:
            centers = [float(c) for c in rng.uniform(-radius, radius, size=terms)]
        else:
            centers = [tuple(float(v) for v in rng.uniform(-radius, radius, 2))
                       for _ in range(terms)]
        heights = [float(h) for h in rng.uniform(0.05, max_amp, size=terms)]
        widths = [float(w) for w in rng.uniform(0.3, max(0.5, radius / 4), size=terms)]  # noqa pylint: disable=C0301
        return Potential('bumps', {'centers': centers, 'heights': heights,
                                   'widths': widths},
                         bound=float(sum(heights)))
    if kind == 'step':
        value = float(rng.uniform(0.05, max_amp))
        half = float(rng.uniform(0.5, max(1.0, radius / 2)))
        if dimension == 1:
            center = float(rng.uniform(-radius / 2, radius / 2))
        else:
            center = [float(v) for v in rng.integers(-int(radius) // 2, int(radius) // 2 + 1, 2)]  # noqa pylint: disable=C0301
        return Potential('constant_on_set', {'center': center, 'radius': half,
                                             'value': value}, bound=value)
    raise ArgumentError('unknown random potential kind', {'kind': kind})
