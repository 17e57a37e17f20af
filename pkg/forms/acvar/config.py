# MIT License

# Copyright (c) 2026 acvar developers

# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.

# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.



"""
Run configuration: YAML files with nested sections or flat dotted keys,
validated at parse time, echoed canonically as sorted flat keys
Author: acvar developers
"""

import logging

import numpy as np
import yaml

from acvar.core.exceptions import ConfigError
from acvar.core.calculus import DegreeMask
from acvar.core.geometry import (make_flat_torus, make_warped_torus, make_sphere_chart, make_constant_ac,
                                 make_perturbed_ac, make_s6_octonionic_ac, make_alpha, parse_expression,
                                 standard_complex_structure)
from acvar.core.variational import FAMILIES, PATH_KINDS, FunctionalVariant, canonical_extension, make_path

logger = logging.getLogger(__name__)

COMMANDS = ('verify', 'classify', 'functional', 'flow', 'probe')
SUITES = ('algebra', 'calculus', 'integration', 'variational', 'lattice')

# commands and suites that integrate over the manifold
_INTEGRATING_COMMANDS = ('functional', 'flow', 'probe')
_INTEGRATING_SUITES = ('integration', 'variational')

DEFAULTS = {
    'manifold.kind': 'flat_torus',
    'manifold.n': 4,
    'manifold.res': 6,
    'manifold.cutoff': 0.5,
    'manifold.center': None,
    'manifold.amplitude': 0.2,
    'structure.kind': 'constant',
    'structure.matrix': None,
    'structure.epsilon': 0.1,
    'structure.seed': 0,
    'structure.extension': 'zero',
    'structure.extension_scale': 0.1,
    'alpha.kind': 'none',
    'alpha.axis': 0,
    'alpha.expr': None,
    'variant.family': 'quasi_alpha',
    'variant.mask': None,
    'flow.steps': 20,
    'flow.dt': 1e-3,
    'probe.path': 'constant',
    'probe.t': [0., 0.25, 0.5, 0.75, 1.],
    'probe.seed': 0,
    'probe.epsilon': 0.1,
    'probe.breakpoint': 1.,
    'output.dir': '.',
    'output.prefix': '',
    'tolerances.scale': 1e-3,
    'tolerances.ac': 1e-10,
    'tolerances.projection': 1e-8,
    'tolerances.first_variation': 1e-5,
}

_CHOICES = {
    'manifold.kind': ('flat_torus', 'warped_torus', 'sphere_chart'),
    'structure.kind': ('constant', 'octonionic', 'perturbed'),
    'structure.extension': ('zero', 'random'),
    'alpha.kind': ('none', 'axis', 'gradient'),
    'variant.family': FAMILIES,
    'probe.path': PATH_KINDS,
}

_INTS = ('manifold.n', 'manifold.res', 'structure.seed', 'alpha.axis', 'flow.steps', 'probe.seed')
_FLOATS = ('manifold.cutoff', 'manifold.amplitude', 'structure.epsilon', 'structure.extension_scale', 'flow.dt',
           'probe.epsilon', 'probe.breakpoint', 'tolerances.scale', 'tolerances.ac', 'tolerances.projection',
           'tolerances.first_variation')


def _flatten(tree, prefix=''):
    flat = {}
    for key, value in tree.items():
        name = prefix + str(key)
        if isinstance(value, dict):
            for sub, sub_value in _flatten(value, name + '.').items():
                if sub in flat:
                    raise ConfigError('duplicate config key {}'.format(sub))
                flat[sub] = sub_value
        else:
            if name in flat:
                raise ConfigError('duplicate config key {}'.format(name))
            flat[name] = value
    return flat


def _coerce(key, value):
    if value is None:
        return None
    try:
        if key in _INTS:
            if isinstance(value, bool) or float(value) != int(value):
                raise ValueError
            return int(value)
        if key in _FLOATS:
            if isinstance(value, bool):
                raise ValueError
            return float(value)
    except (TypeError, ValueError):
        raise ConfigError('{} expects a {}, got {!r}'.format(key, 'integer' if key in _INTS else 'number', value))
    return value


class RunConfig(object):
    """
    Validated run configuration

    Data Members:
        command (str): command the config was validated for
        suite (str or None): verification suite
        values (dict str -> object): flat dotted keys with defaults filled in
    """

    def __init__(self, values, command='verify', suite=None):
        self.command = command
        self.suite = suite
        self.values = values
        self._validate()

    @classmethod
    def from_text(cls, text, command='verify', suite=None):
        """
        Parse YAML (or JSON) text

        Args:
            text (str): config file contents
            command (str, default='verify'): command to validate against
            suite (str, default=None): suite for the verify command

        Returns:
            config (RunConfig): validated config

        Raises:
            ConfigError: malformed text, unknown keys, bad values or unsupported combinations
        """
        try:
            tree = yaml.safe_load(text)
        except yaml.YAMLError as ex:
            raise ConfigError('cannot parse config: {}'.format(ex))
        if tree is None:
            tree = {}
        if not isinstance(tree, dict):
            raise ConfigError('config must be a mapping, got {}'.format(type(tree).__name__))
        flat = _flatten(tree)
        unknown = sorted(set(flat) - set(DEFAULTS))
        if unknown:
            raise ConfigError('unknown config keys: {}'.format(', '.join(unknown)))
        values = dict(DEFAULTS)
        for key, value in flat.items():
            values[key] = _coerce(key, value)
        return cls(values, command, suite)

    @classmethod
    def from_file(cls, path, command='verify', suite=None):
        try:
            with open(path, 'r') as stream:
                text = stream.read()
        except OSError as ex:
            raise ConfigError('cannot read config {}: {}'.format(path, ex))
        return cls.from_text(text, command, suite)

    def __getitem__(self, key):
        return self.values[key]

    def to_text(self):
        """Canonical echo, sorted flat dotted keys, parsing it gives the same config"""
        return yaml.safe_dump(self.values, sort_keys=True, default_flow_style=None)

    def _validate(self):
        v = self.values
        for key, choices in _CHOICES.items():
            if v[key] not in choices:
                raise ConfigError('{} must be one of {}, got {!r}'.format(key, choices, v[key]))
        if self.command not in COMMANDS:
            raise ConfigError('unknown command {!r}'.format(self.command))
        if self.command == 'verify' and self.suite not in SUITES:
            raise ConfigError('verify needs a suite in {}, got {!r}'.format(SUITES, self.suite))

        n, res = v['manifold.n'], v['manifold.res']
        kind = v['manifold.kind']
        if kind == 'sphere_chart':
            if n not in (2, 6):
                raise ConfigError('sphere_chart needs n in (2, 6), got {}'.format(n))
            if res < 3:
                raise ConfigError('sphere_chart needs res >= 3, got {}'.format(res))
            if not v['manifold.cutoff'] > 0.:
                raise ConfigError('manifold.cutoff must be positive')
            if v['manifold.center'] is not None and len(v['manifold.center']) != n:
                raise ConfigError('manifold.center needs {} entries'.format(n))
            if self.command in _INTEGRATING_COMMANDS or (self.command == 'verify' and self.suite in _INTEGRATING_SUITES):
                raise ConfigError('integration unsupported on non-periodic chart')
        else:
            if n not in (2, 4, 6):
                raise ConfigError('{} needs n in (2, 4, 6), got {}'.format(kind, n))
            if res < 4:
                raise ConfigError('{} needs res >= 4, got {}'.format(kind, res))

        if v['structure.kind'] == 'octonionic' and not (kind == 'sphere_chart' and n == 6):
            raise ConfigError('octonionic structure needs a six-dimensional sphere_chart')
        matrix = v['structure.matrix']
        if matrix is not None:
            J0 = np.asarray(matrix, dtype=np.float64)
            if J0.shape != (n, n):
                raise ConfigError('structure.matrix must be {0}x{0}'.format(n))
            if np.linalg.norm(J0 @ J0 + np.eye(n), ord=2) > 1e-12:
                raise ConfigError('structure.matrix does not square to -Id')

        alpha_kind = v['alpha.kind']
        if alpha_kind == 'axis' and not 0 <= v['alpha.axis'] < n:
            raise ConfigError('alpha.axis out of range for n = {}'.format(n))
        if alpha_kind == 'gradient':
            if not v['alpha.expr']:
                raise ConfigError('alpha.kind gradient needs alpha.expr')
            try:
                parse_expression(str(v['alpha.expr']), n)
            except ValueError as ex:
                raise ConfigError(str(ex))

        family = v['variant.family']
        try:
            mask = self.mask
            FunctionalVariant.ALLOWED_MASKS[family].index(mask)
        except ValueError:
            raise ConfigError('variant.mask {!r} is not licensed for the {} family'.format(v['variant.mask'], family))
        needs_alpha = self.command == 'classify' or (self.command in _INTEGRATING_COMMANDS and family != 'plain')
        if needs_alpha and alpha_kind == 'none':
            raise ConfigError('{} needs an auxiliary 1-form (alpha.kind axis or gradient)'.format(
                self.command if self.command == 'classify' else 'the {} family'.format(family)))

        if v['flow.steps'] < 0:
            raise ConfigError('flow.steps must be non-negative')
        if not v['flow.dt'] > 0.:
            raise ConfigError('flow.dt must be positive')
        t = v['probe.t']
        try:
            t = [float(x) for x in t]
        except (TypeError, ValueError):
            raise ConfigError('probe.t must be a list of numbers')
        if len(t) < 2 or any(b <= a for a, b in zip(t, t[1:])):
            raise ConfigError('probe.t needs at least two strictly increasing samples')
        v['probe.t'] = t

    @property
    def mask(self):
        text = self.values['variant.mask']
        if text is None:
            return DegreeMask.bracket(1) if self.values['variant.family'] == 'plain' else DegreeMask.none()
        try:
            return DegreeMask.parse(text)
        except ValueError:
            raise ConfigError('cannot parse variant.mask {!r}'.format(text))

    def build_geometry(self):
        v = self.values
        kind, n, res = v['manifold.kind'], v['manifold.n'], v['manifold.res']
        if kind == 'flat_torus':
            return make_flat_torus(n, res)
        if kind == 'warped_torus':
            return make_warped_torus(n, res, v['manifold.amplitude'])
        center = None if v['manifold.center'] is None else np.asarray(v['manifold.center'], dtype=np.float64)
        return make_sphere_chart(n, res, v['manifold.cutoff'], center)

    def base_matrix(self, n):
        matrix = self.values['structure.matrix']
        return standard_complex_structure(n) if matrix is None else np.asarray(matrix, dtype=np.float64)

    def build_structure(self, geom):
        v = self.values
        kind = v['structure.kind']
        if kind == 'constant':
            return make_constant_ac(geom, self.base_matrix(geom.n))
        if kind == 'perturbed':
            return make_perturbed_ac(geom, self.base_matrix(geom.n), v['structure.epsilon'], v['structure.seed'])
        return make_s6_octonionic_ac(geom)

    def build_alpha(self, geom):
        v = self.values
        if v['alpha.kind'] == 'axis':
            return make_alpha(geom, axis=v['alpha.axis'])
        if v['alpha.kind'] == 'gradient':
            return make_alpha(geom, function=str(v['alpha.expr']))
        return None

    def build_variant(self, alpha):
        return FunctionalVariant(self.values['variant.family'], self.mask, alpha)

    def build_extension(self, A):
        v = self.values
        return canonical_extension(A, v['structure.extension'], v['structure.seed'], v['structure.extension_scale'])

    def build_path(self, geom):
        v = self.values
        return make_path(v['probe.path'], geom, self.base_matrix(geom.n), v['probe.seed'], v['probe.epsilon'],
                         v['probe.breakpoint'])
