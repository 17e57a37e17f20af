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
Prototype of chart-sampled manifolds: grids, metrics, torsion-free connections,
example almost-complex structures and auxiliary closed 1-forms
Author: acvar developers
"""

import copy
import logging
import re
from functools import lru_cache
from tokenize import TokenError

import numpy as np
from numba import njit
from scipy.linalg import expm
import sympy
from sympy import lambdify
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

from acvar.core.exceptions import DimensionMismatchError, NotAlmostComplexError, TrivialFormError, IntegrationUnsupportedError
from acvar.core.exterior_core import FormField, SCALAR, TANGENT, n_components

logger = logging.getLogger(__name__)

# acceptance threshold for A o A = -Id
AC_TOLERANCE = 1e-10

# imaginary octonion triples (i, j, k) with e_i e_j = e_k, 1-based
OCTONION_TRIPLES = ((1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5))


@njit(cache=True)
def compensated_sum(values):
    """
    Neumaier summation in a fixed order

    Args:
        values (np.ndarray (m, )): summands

    Returns:
        total (float): compensated sum
    """
    total = 0.
    correction = 0.
    for i in range(values.shape[0]):
        v = values[i]
        t = total + v
        if abs(total) >= abs(v):
            correction += (total - t) + v
        else:
            correction += (v - t) + total
        total = t
    return total + correction


class ChartGeometry(object):
    """
    Grid-sampled coordinate chart with a Riemannian metric and a torsion-free connection

    Data Members:
        n (int): dimension
        res (tuple of int): nodes per axis
        periodic (tuple of bool): periodic flag per axis
        lower, upper (np.ndarray (n, )): coordinate range per axis
        spacing (np.ndarray (n, )): grid step per axis
        coords (np.ndarray (N, n)): node coordinates, C-order over the axes
        metric (np.ndarray (N, n, n)): g_ij
        christoffel (np.ndarray (N, n, n, n)): Gamma^k_ij stored as [node, k, i, j]
        vol_density (np.ndarray (N, )): sqrt(det g)
        weights (np.ndarray (N, ) or None): trapezoid weights, None when integration is disabled
        valid (np.ndarray (N, ), bool): nodes where geometry samples are defined
        levi_civita (bool): whether christoffel is the Levi-Civita connection of metric
        name (str): fixture name used in reports
    """

    def __init__(self, res, periodic, lower, upper, metric=None, christoffel=None, levi_civita=True, name='chart'):
        self.n = len(res)
        self.res = tuple(int(r) for r in res)
        self.periodic = tuple(bool(p) for p in periodic)
        self.lower = np.asarray(lower, dtype=np.float64)
        self.upper = np.asarray(upper, dtype=np.float64)
        self.name = name

        axes = []
        spacing = []
        for r, p, lo, hi in zip(self.res, self.periodic, self.lower, self.upper):
            if p:
                axes.append(lo + (hi - lo)*np.arange(r)/r)
                spacing.append((hi - lo)/r)
            else:
                axes.append(np.linspace(lo, hi, r))
                spacing.append((hi - lo)/(r - 1) if r > 1 else 1.)
        self.spacing = np.array(spacing)
        mesh = np.meshgrid(*axes, indexing='ij')
        self.coords = np.stack([m.reshape(-1) for m in mesh], axis=1)
        N = self.coords.shape[0]

        if metric is None:
            metric = np.broadcast_to(np.eye(self.n), (N, self.n, self.n)).copy()
        elif callable(metric):
            metric = metric(self.coords)
        self.metric = np.asarray(metric, dtype=np.float64)
        if christoffel is None:
            christoffel = np.zeros((N, self.n, self.n, self.n))
        elif callable(christoffel):
            christoffel = christoffel(self.coords)
        self.christoffel = np.asarray(christoffel, dtype=np.float64)
        self.levi_civita = levi_civita
        self.valid = np.ones(N, dtype=bool)
        self._cache = {}
        self._validate()

        self.inverse_metric = np.linalg.inv(self.metric)
        self.vol_density = np.sqrt(np.linalg.det(self.metric))
        if self.integrable:
            self.weights = np.full(N, float(np.prod(self.spacing)))
        else:
            self.weights = None

    def _validate(self):
        if self.metric.shape != (self.num_nodes, self.n, self.n):
            raise DimensionMismatchError('metric samples have shape {}'.format(self.metric.shape))
        if np.max(np.abs(self.metric - self.metric.transpose(0, 2, 1))) > 1e-12*max(1., np.max(np.abs(self.metric))):
            raise ValueError('metric is not symmetric')
        min_eig = np.min(np.linalg.eigvalsh(self.metric))
        if not min_eig > 0.:
            raise ValueError('metric is not positive-definite (min eigenvalue {:.3e})'.format(min_eig))
        if self.christoffel.shape != (self.num_nodes, self.n, self.n, self.n):
            raise DimensionMismatchError('christoffel samples have shape {}'.format(self.christoffel.shape))
        torsion = np.max(np.abs(self.christoffel - self.christoffel.transpose(0, 1, 3, 2))) if self.christoffel.size else 0.
        if torsion > 1e-12*max(1., np.max(np.abs(self.christoffel))):
            raise ValueError('connection has torsion {:.3e}'.format(torsion))

    @classmethod
    def point(cls, n):
        """Single-node flat geometry, pointwise operations lifted to it are the operations themselves"""
        return cls((1,)*n, (False,)*n, np.zeros(n), np.zeros(n), name='point')

    @property
    def num_nodes(self):
        return self.coords.shape[0]

    @property
    def integrable(self):
        return all(self.periodic)

    def replace(self, **changes):
        """Shallow copy with some sampled members swapped out (a new geometry handle)"""
        other = copy.copy(self)
        other._cache = {}
        for key, value in changes.items():
            setattr(other, key, value)
        other._validate()
        return other

    def shift(self, array, axis, step):
        """
        Values at the neighbouring node, array[node + step*e_axis], wrapped around the grid

        Args:
            array (np.ndarray (N, ...)): node-major samples
            axis (int): grid axis
            step (int): offset along the axis

        Returns:
            shifted (np.ndarray (N, ...)): shifted samples
        """
        grid = array.reshape(self.res + array.shape[1:])
        return np.roll(grid, -step, axis=axis).reshape(array.shape)

    def central_difference(self, array, axis):
        return (self.shift(array, axis, 1) - self.shift(array, axis, -1))/(2.*self.spacing[axis])

    def stencil_valid(self, valid, axis):
        """
        Nodes whose central-difference stencil along axis only touches valid nodes

        Args:
            valid (np.ndarray (N, ), bool): input validity
            axis (int): grid axis

        Returns:
            valid (np.ndarray (N, ), bool): output validity, boundary nodes of non-periodic axes dropped
        """
        out = valid & self.shift(valid, axis, 1) & self.shift(valid, axis, -1)
        if not self.periodic[axis]:
            index = np.indices(self.res)[axis].reshape(-1)
            out &= (index > 0) & (index < self.res[axis] - 1)
        return out

    def require_integration(self):
        if not self.integrable:
            raise IntegrationUnsupportedError()

    def integrate(self, density):
        """
        Trapezoid quadrature of a sampled scalar density against vol_g

        Args:
            density (np.ndarray (N, )): integrand samples

        Returns:
            value (float): sum of weights * sqrt(det g) * density, compensated

        Raises:
            IntegrationUnsupportedError: geometry is not periodic in every axis
        """
        self.require_integration()
        return float(compensated_sum(np.ascontiguousarray(self.weights*self.vol_density*density)))


def _conformal_samples(n, dphi):
    # Gamma^k_ij = d_ik dphi_j + d_jk dphi_i - d_ij dphi_k for g = exp(2 phi) delta
    eye = np.eye(n)
    return (np.einsum('ki,Nj->Nkij', eye, dphi) + np.einsum('kj,Ni->Nkij', eye, dphi)
            - np.einsum('ij,Nk->Nkij', eye, dphi))


def _check_even(n, allowed):
    if n % 2:
        raise ValueError('dimension must be even, got n = {}'.format(n))
    if n not in allowed:
        raise ValueError('dimension n = {} not supported here, expected one of {}'.format(n, allowed))


def make_flat_torus(n, res):
    """
    Periodic box [0, 2 pi)^n with the flat metric

    Args:
        n (int): even dimension in {2, 4, 6}
        res (int or tuple of int): nodes per axis, at least 4, one entry per axis for anisotropic grids

    Returns:
        geom (ChartGeometry): flat torus, g = Id, Gamma = 0
    """
    _check_even(n, (2, 4, 6))
    res = (int(res),)*n if np.ndim(res) == 0 else tuple(int(r) for r in res)
    if len(res) != n or min(res) < 4:
        raise ValueError('torus resolution must be at least 4 on each of the {} axes, got {}'.format(n, res))
    return ChartGeometry(res, (True,)*n, np.zeros(n), np.full(n, 2.*np.pi), name='flat_torus')


def make_warped_torus(n, res, amplitude=0.2):
    """
    Periodic box with the conformal metric exp(2 phi) delta,
    phi = amplitude * sum_i sin(x_i) cos(x_{i+1}), and its Levi-Civita connection

    Args:
        n (int): even dimension in {2, 4, 6}
        res (int): nodes per axis, at least 4
        amplitude (float, default=0.2): size of the conformal factor

    Returns:
        geom (ChartGeometry): warped torus
    """
    _check_even(n, (2, 4, 6))
    if res < 4:
        raise ValueError('torus resolution must be at least 4, got {}'.format(res))

    def phi(x):
        return amplitude*np.sum(np.sin(x)*np.cos(np.roll(x, -1, axis=1)), axis=1)

    def dphi(x):
        return amplitude*(np.cos(x)*np.cos(np.roll(x, -1, axis=1)) - np.sin(np.roll(x, 1, axis=1))*np.sin(x))

    def metric(x):
        return np.exp(2.*phi(x))[:, None, None]*np.eye(n)

    def christoffel(x):
        return _conformal_samples(n, dphi(x))

    return ChartGeometry((res,)*n, (True,)*n, np.zeros(n), np.full(n, 2.*np.pi), metric, christoffel, name='warped_torus')


def make_sphere_chart(n, res, radius_cutoff, center=None):
    """
    Stereographic chart of the round unit sphere on the box center + [-R, R]^n

    Args:
        n (int): 2 or 6
        res (int): nodes per axis, at least 3
        radius_cutoff (float): half-width R of the box
        center (np.ndarray (n, ), default=None): box center, origin when None

    Returns:
        geom (ChartGeometry): non-periodic chart, g = 4 delta / (1 + |x|^2)^2, integration disabled
    """
    _check_even(n, (2, 6))
    if res < 3:
        raise ValueError('sphere chart resolution must be at least 3, got {}'.format(res))
    center = np.zeros(n) if center is None else np.asarray(center, dtype=np.float64)

    def metric(x):
        return (4./(1. + np.sum(x**2, axis=1))**2)[:, None, None]*np.eye(n)

    def christoffel(x):
        return _conformal_samples(n, -2.*x/(1. + np.sum(x**2, axis=1))[:, None])

    return ChartGeometry((res,)*n, (False,)*n, center - radius_cutoff, center + radius_cutoff, metric, christoffel, name='sphere_chart')


def christoffel_from_metric(geom):
    """
    Levi-Civita symbols of the sampled metric by central differences

    Args:
        geom (ChartGeometry): geometry whose metric samples are used

    Returns:
        christoffel (np.ndarray (N, n, n, n)): Gamma^k_ij as [node, k, i, j]
        valid (np.ndarray (N, ), bool): nodes with a complete stencil

    Raises:
        ValueError: singular metric sample
    """
    det = np.linalg.det(geom.metric)
    if np.any(np.abs(det) < 1e-300):
        raise ValueError('metric is singular at {} nodes'.format(int(np.sum(np.abs(det) < 1e-300))))
    valid = geom.valid.copy()
    # dg[node, l, i, j] = d_l g_ij
    dg = np.stack([geom.central_difference(geom.metric, l) for l in range(geom.n)], axis=1)
    for l in range(geom.n):
        valid = geom.stencil_valid(valid, l)
    first_kind = 0.5*(dg.transpose(0, 3, 1, 2) + dg.transpose(0, 3, 2, 1) - dg)
    christoffel = np.einsum('Nkl,Nlij->Nkij', np.linalg.inv(geom.metric), first_kind)
    return christoffel, valid


def with_connection(geom, christoffel):
    """
    Same grid and metric with an injected torsion-free connection

    Args:
        geom (ChartGeometry): base geometry
        christoffel (np.ndarray (N, n, n, n)): Gamma^k_ij samples, symmetrized in (i, j)

    Returns:
        geom (ChartGeometry): new geometry handle with levi_civita False
    """
    christoffel = np.asarray(christoffel, dtype=np.float64)
    symmetric = 0.5*(christoffel + christoffel.transpose(0, 1, 3, 2))
    return geom.replace(christoffel=symmetric, levi_civita=False, name=geom.name + '+connection')


def _trig_modes(coords, rng, shape, scale, axes=None):
    # a0 + sum_m (a_m sin x_m + b_m cos x_m) with random coefficient blocks, m over axes
    axes = range(coords.shape[1]) if axes is None else axes
    out = np.broadcast_to(rng.standard_normal(shape), (coords.shape[0],) + shape).copy()
    for m in axes:
        a = rng.standard_normal(shape)
        b = rng.standard_normal(shape)
        s = np.sin(coords[:, m]).reshape((-1,) + (1,)*len(shape))
        c = np.cos(coords[:, m]).reshape((-1,) + (1,)*len(shape))
        out += s*a + c*b
    return scale*out


def random_connection(geom, seed=0, scale=0.3):
    """
    Smooth periodic random torsion-free connection on the grid of geom

    Args:
        geom (ChartGeometry): base geometry
        seed (int, default=0): random seed
        scale (float, default=0.3): coefficient size

    Returns:
        geom (ChartGeometry): geometry carrying the random symmetric connection
    """
    rng = np.random.default_rng(seed)
    n = geom.n
    return with_connection(geom, _trig_modes(geom.coords, rng, (n, n, n), scale))


def random_smooth_field(geom, degree, kind, seed=0, scale=1., axes=None):
    """
    Random low-mode trigonometric field, smooth and periodic on tori

    Args:
        geom (ChartGeometry): sampling grid
        degree (int): form degree
        kind (ValueKind): value type
        seed (int, default=0): random seed
        scale (float, default=1.): coefficient size
        axes (sequence of int, default=None): coordinates the field depends on, all when None

    Returns:
        field (FormField): sampled field
    """
    rng = np.random.default_rng(seed)
    shape = (n_components(geom.n, degree), kind.fiber_dim(geom.n))
    return FormField(geom, degree, kind, _trig_modes(geom.coords, rng, shape, scale, axes))


def matrices_to_field(geom, matrices):
    """Degree-1 tangent field with A(e_i)^a = matrices[node, a, i]"""
    return FormField(geom, 1, TANGENT, np.ascontiguousarray(np.asarray(matrices).transpose(0, 2, 1)))


def field_to_matrices(A):
    """Endomorphism matrices [node, a, i] = A^a_i of a degree-1 tangent field"""
    return A.coeffs.transpose(0, 2, 1)


def check_ac(A):
    """
    Max-node operator norm of A o A + Id

    Args:
        A (FormField): degree-1 tangent-valued field

    Returns:
        residual (float): 0 for an almost-complex structure
    """
    if A.degree != 1 or A.kind != TANGENT:
        raise DimensionMismatchError('check_ac needs a degree-1 tangent field, got degree {} {}'.format(A.degree, A.kind))
    mats = field_to_matrices(A)
    defect = mats @ mats + np.eye(A.n)
    norms = np.linalg.norm(defect, ord=2, axis=(1, 2))
    if not np.any(A.valid):
        return 0.
    return float(np.max(norms[A.valid]))


class ACStructure(object):
    """
    Almost-complex structure: degree-1 tangent field with A o A = -Id

    Data Members:
        field (FormField): the degree-1 tangent-valued form A
        residual (float): max-node operator norm of A o A + Id
    """

    def __init__(self, field, tol=AC_TOLERANCE, t=None):
        self.residual = check_ac(field)
        if not self.residual <= tol:
            raise NotAlmostComplexError(self.residual, t)
        self.field = field

    @property
    def geometry(self):
        return self.field.geometry

    @property
    def matrices(self):
        return field_to_matrices(self.field)


def standard_complex_structure(n):
    """Block-diagonal J with [[0, -1], [1, 0]] blocks"""
    J = np.zeros((n, n))
    for b in range(0, n, 2):
        J[b + 1, b] = 1.
        J[b, b + 1] = -1.
    return J


def make_constant_ac(geom, J0):
    """
    Constant almost-complex structure A(x) = J0

    Args:
        geom (ChartGeometry): sampling grid
        J0 (np.ndarray (n, n)): matrix with J0^2 = -Id

    Returns:
        A (ACStructure): constant structure, special and integrable on flat tori

    Raises:
        NotAlmostComplexError: J0^2 differs from -Id by more than 1e-12
    """
    J0 = np.asarray(J0, dtype=np.float64)
    if J0.shape != (geom.n, geom.n):
        raise DimensionMismatchError('J0 must be {0}x{0}, got {1}'.format(geom.n, J0.shape))
    residual = np.linalg.norm(J0 @ J0 + np.eye(geom.n), ord=2)
    if residual > 1e-12:
        raise NotAlmostComplexError(residual)
    return ACStructure(matrices_to_field(geom, np.broadcast_to(J0, (geom.num_nodes, geom.n, geom.n))))


def make_perturbed_ac(geom, J0=None, epsilon=0.1, seed=0, axes=None):
    """
    Conjugated structure A = exp(-eps S) J0 exp(eps S) for a smooth random matrix field S

    Args:
        geom (ChartGeometry): sampling grid
        J0 (np.ndarray (n, n), default=None): base structure, standard when None
        epsilon (float, default=0.1): perturbation size
        seed (int, default=0): random seed of S
        axes (sequence of int, default=None): coordinates S depends on, all when None

    Returns:
        A (ACStructure): almost-complex by construction, generically not integrable
    """
    n = geom.n
    J0 = standard_complex_structure(n) if J0 is None else np.asarray(J0, dtype=np.float64)
    rng = np.random.default_rng(seed)
    S = _trig_modes(geom.coords, rng, (n, n), 1./np.sqrt(n), axes)
    E = expm(epsilon*S)
    return ACStructure(matrices_to_field(geom, np.linalg.solve(E, J0 @ E)))


@lru_cache(maxsize=None)
def octonion_structure_constants():
    """
    Totally antisymmetric eps[i, j, k] with (x cross y)_k = sum eps[i, j, k] x_i y_j on Im(O) = R^7
    """
    eps = np.zeros((7, 7, 7))
    for triple in OCTONION_TRIPLES:
        i, j, k = (t - 1 for t in triple)
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            eps[a, b, c] = 1.
            eps[b, a, c] = -1.
    eps.setflags(write=False)
    return eps


def octonion_multiply(x, y):
    """
    Octonion product of (real, imaginary) 8-vectors

    Args:
        x, y (np.ndarray (..., 8)): octonions, component 0 is the real part

    Returns:
        xy (np.ndarray (..., 8)): product
    """
    eps = octonion_structure_constants()
    a0, a = x[..., :1], x[..., 1:]
    b0, b = y[..., :1], y[..., 1:]
    real = a0*b0 - np.sum(a*b, axis=-1, keepdims=True)
    imag = a0*b + b0*a + np.einsum('ijk,...i,...j->...k', eps, a, b)
    return np.concatenate([real, imag], axis=-1)


def inverse_stereographic(coords):
    """
    Sphere points and Jacobian of the inverse stereographic projection R^n -> S^n

    Args:
        coords (np.ndarray (N, n)): chart coordinates

    Returns:
        p (np.ndarray (N, n + 1)): points on the unit sphere, pole coordinate last
        jac (np.ndarray (N, n + 1, n)): dp/dx
    """
    N, n = coords.shape
    r2 = np.sum(coords**2, axis=1)
    denom = 1. + r2
    p = np.concatenate([2.*coords, (r2 - 1.)[:, None]], axis=1)/denom[:, None]
    jac = np.zeros((N, n + 1, n))
    jac[:, :n, :] = 2.*np.eye(n)/denom[:, None, None] - 4.*coords[:, :, None]*coords[:, None, :]/denom[:, None, None]**2
    jac[:, n, :] = 4.*coords/denom[:, None]**2
    return p, jac


def make_s6_octonionic_ac(geom):
    """
    Octonionic almost-complex structure J_p(v) = p x v on S^6, pulled back to the stereographic chart

    Args:
        geom (ChartGeometry): six-dimensional sphere chart

    Returns:
        A (ACStructure): chart representative of J, orthogonal for the round metric
    """
    if geom.n != 6:
        raise DimensionMismatchError('octonionic structure lives on S^6, got n = {}'.format(geom.n))
    p, jac = inverse_stereographic(geom.coords)
    cross = np.einsum('ijk,Ni->Nkj', octonion_structure_constants(), p)
    lam2 = 4./(1. + np.sum(geom.coords**2, axis=1))**2
    mats = np.einsum('Nai,Nab,Nbj->Nij', jac, cross, jac)/lam2[:, None, None]
    return ACStructure(matrices_to_field(geom, mats))


class AuxiliaryOneForm(object):
    """
    Non-trivial closed scalar 1-form

    Data Members:
        field (FormField): scalar 1-form
        closedness_residual (float): sup-norm of d(alpha)
        nontrivial (bool): sup-norm above zero
    """

    def __init__(self, field, closedness_residual):
        self.field = field
        self.closedness_residual = float(closedness_residual)
        self.nontrivial = field.sup_norm() > 1e-12
        if not self.nontrivial:
            raise TrivialFormError('auxiliary 1-form vanishes identically')


_EXPRESSION_TOKEN = re.compile(r'\d*\.?\d+(?:[eE][-+]?\d+)?|\w+|\S')
_NUMBER = re.compile(r'\d*\.?\d+(?:[eE][-+]?\d+)?$')
_COORDINATE = re.compile(r'x(\d+)$')
_OPERATORS = frozenset('+-*()')
_FUNCTIONS = {'sin': sympy.sin, 'cos': sympy.cos}


def parse_expression(text, n=None):
    """
    Compile an expression over coordinates x0 ... x{n-1} built from numbers,
    + - *, unary minus, sin and cos

    Args:
        text (str): the expression, e.g. 'sin(x0)*cos(x1) + 0.5*x2'
        n (int, default=None): dimension used to range-check coordinate names

    Returns:
        func (callable): maps coords (np.ndarray (N, n)) to values (np.ndarray (N, ))

    Raises:
        ValueError: text outside the grammar
    """
    tokens = _EXPRESSION_TOKEN.findall(text)
    size = 0
    for prev, token in zip([None] + tokens, tokens):
        coordinate = _COORDINATE.match(token)
        if coordinate:
            axis = int(coordinate.group(1))
            if n is not None and axis >= n:
                raise ValueError('coordinate {} out of range for n = {}'.format(token, n))
            size = max(size, axis + 1)
        elif token == '*' and prev == '*':
            raise ValueError('unsupported construct in expression {!r}: power'.format(text))
        elif not (_NUMBER.match(token) or token in _OPERATORS or token in _FUNCTIONS):
            raise ValueError('unsupported construct in expression {!r}: {!r}'.format(text, token))
    if not tokens:
        raise ValueError('empty expression')
    coords = sympy.symbols(['x{}'.format(axis) for axis in range(size)])
    local_dict = dict(_FUNCTIONS, **{str(sym): sym for sym in coords})
    try:
        expr = parse_expr(text, local_dict=local_dict, transformations=standard_transformations)
    except (SyntaxError, TypeError, TokenError) as ex:
        raise ValueError('cannot parse expression {!r}: {}'.format(text, ex))
    if not isinstance(expr, sympy.Expr):
        raise ValueError('expression {!r} is not a scalar term'.format(text))
    if not expr.free_symbols <= set(coords):
        raise ValueError('unsupported names in expression {!r}: {}'.format(text, sorted(map(str, expr.free_symbols - set(coords)))))
    logger.debug('compiled expression %s over %d coordinates', expr, size)
    compiled = lambdify(coords, expr, 'numpy')

    def func(x):
        x = np.asarray(x, dtype=np.float64)
        values = compiled(*x.T[:size])
        return np.broadcast_to(np.asarray(values, dtype=np.float64), (x.shape[0],)).copy()

    return func


def make_alpha(geom, axis=None, function=None):
    """
    Auxiliary closed 1-form, either a coordinate differential dx_axis or the gradient of a sampled function

    Args:
        geom (ChartGeometry): sampling grid
        axis (int, default=None): coordinate axis for alpha = dx_axis
        function (callable, str or np.ndarray, default=None): f for alpha = df,
            a vectorized function of coords, an expression string, or samples (N, )

    Returns:
        alpha (AuxiliaryOneForm): closed non-trivial 1-form

    Raises:
        TrivialFormError: alpha vanishes identically (f constant)
    """
    from acvar.core.calculus import dnabla

    if (axis is None) == (function is None):
        raise ValueError('give exactly one of axis or function')
    if axis is not None:
        if not 0 <= axis < geom.n:
            raise IndexError('axis {} out of range for n = {}'.format(axis, geom.n))
        coeffs = np.zeros((geom.num_nodes, geom.n, 1))
        coeffs[:, axis, 0] = 1.
        field = FormField(geom, 1, SCALAR, coeffs)
    else:
        if isinstance(function, str):
            function = parse_expression(function, geom.n)
        samples = function(geom.coords) if callable(function) else np.asarray(function, dtype=np.float64)
        samples = np.broadcast_to(samples, (geom.num_nodes,)).reshape(-1, 1, 1)
        f = FormField(geom, 0, SCALAR, samples)
        field = dnabla(f)
    residual = dnabla(field).sup_norm()
    logger.debug('auxiliary 1-form closedness residual %.3e', residual)
    return AuxiliaryOneForm(field, residual)
