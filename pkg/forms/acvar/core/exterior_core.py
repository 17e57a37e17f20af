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
Prototype of pointwise exterior algebra for bundle-valued differential forms
Dense storage over sorted multi-indices, shuffle-enumerated products and actions,
and the lift of pointwise operations to grid-sampled fields
Author: acvar developers
"""

import itertools
import logging
import math
from functools import lru_cache

import numpy as np
from numba import njit, prange

from acvar.core.exceptions import DimensionMismatchError, UnsupportedKindError, GeometryMismatchError

logger = logging.getLogger(__name__)

# largest polyvector degree carried as a value
MAX_POLYVECTOR = 2


class ValueKind(object):
    """
    Fiber type of a bundle-valued form

    Data Members:
        name (str): 'scalar', 'tangent', 'polyvector' or 'endomorphism'
        q (int or None): polyvector degree (0 for scalars, 1 for tangent vectors)
    """

    def __init__(self, name, q):
        self.name = name
        self.q = q

    def fiber_dim(self, n):
        if self.name == 'endomorphism':
            return n*n
        return math.comb(n, self.q)

    @property
    def is_polyvector(self):
        return self.name in ('tangent', 'polyvector')

    def __eq__(self, other):
        return isinstance(other, ValueKind) and self.name == other.name and self.q == other.q

    def __hash__(self):
        return hash((self.name, self.q))

    def __repr__(self):
        if self.name == 'polyvector':
            return 'Polyvector({})'.format(self.q)
        return self.name.capitalize()


SCALAR = ValueKind('scalar', 0)
TANGENT = ValueKind('tangent', 1)
ENDOMORPHISM = ValueKind('endomorphism', None)


def polyvector(q):
    """
    Polyvector value kind, Polyvector(1) is the tangent kind itself

    Args:
        q (int): polyvector degree, 1 <= q <= MAX_POLYVECTOR

    Returns:
        kind (ValueKind): the value kind

    Raises:
        UnsupportedKindError: q outside the supported range
    """
    if q == 1:
        return TANGENT
    if q < 1 or q > MAX_POLYVECTOR:
        raise UnsupportedKindError('polyvector values limited to 1 <= q <= {}, got q = {}'.format(MAX_POLYVECTOR, q))
    return ValueKind('polyvector', q)


def n_components(n, k):
    """Number of sorted multi-indices of length k over n axes, 0 outside 0 <= k <= n"""
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


@lru_cache(maxsize=None)
def multi_indices(n, k):
    """
    Sorted multi-indices of length k in lexicographic order

    Args:
        n (int): ambient dimension
        k (int): form degree

    Returns:
        indices (tuple of tuples): the C(n, k) strictly increasing index tuples
    """
    if k < 0 or k > n:
        return ()
    return tuple(itertools.combinations(range(n), k))


@lru_cache(maxsize=None)
def index_of(n, k):
    return {axes: pos for pos, axes in enumerate(multi_indices(n, k))}


@njit(cache=True)
def count_inversions(axes):
    """
    Number of out-of-order pairs in an integer sequence

    Args:
        axes (np.ndarray (k, )): integer sequence

    Returns:
        count (int): number of pairs i < j with axes[i] > axes[j]
    """
    count = 0
    for i in range(axes.shape[0]):
        for j in range(i+1, axes.shape[0]):
            if axes[i] > axes[j]:
                count += 1
    return count


def canonicalize(axes, n):
    """
    Sort an arbitrary axis tuple, tracking the sign of the sorting permutation

    Args:
        axes (sequence of int): axes in argument order
        n (int): ambient dimension

    Returns:
        sorted_axes (tuple): ascending axes (repeats kept when present)
        sign (int): signature of the sorting permutation, 0 on a repeated axis

    Raises:
        IndexError: an axis outside [0, n)
    """
    axes = tuple(int(a) for a in axes)
    for a in axes:
        if a < 0 or a >= n:
            raise IndexError('axis {} out of range for n = {}'.format(a, n))
    if len(set(axes)) < len(axes):
        return tuple(sorted(axes)), 0
    inversions = count_inversions(np.array(axes, dtype=np.int64))
    return tuple(sorted(axes)), -1 if inversions % 2 else 1


@lru_cache(maxsize=None)
def concat_table(n, k, l):
    """
    Shuffle table for concatenating a k-index with an l-index

    Each row (out, left, right, sign) says that the sorted union of left index
    'left' and right index 'right' is output index 'out', reached with the
    given permutation sign. Only disjoint pairs appear.

    Args:
        n (int): ambient dimension
        k, l (int): lengths of the left and right multi-indices

    Returns:
        out, left, right (np.ndarray (m, ), int): positions in the sorted bases
        sign (np.ndarray (m, ), float): permutation signs
    """
    rows = []
    if k >= 0 and l >= 0 and k + l <= n:
        target = index_of(n, k + l)
        for left, I in enumerate(multi_indices(n, k)):
            for right, J in enumerate(multi_indices(n, l)):
                K, sign = canonicalize(I + J, n)
                if sign != 0:
                    rows.append((target[K], left, right, sign))
    logger.debug('concat table n=%d k=%d l=%d: %d rows', n, k, l, len(rows))
    return _freeze_table(rows)


def _freeze_table(rows):
    if rows:
        table = np.array(rows, dtype=np.float64)
    else:
        table = np.zeros((0, 4))
    idx = [np.ascontiguousarray(table[:, c].astype(np.int64)) for c in range(3)]
    return idx[0], idx[1], idx[2], np.ascontiguousarray(table[:, 3])


@lru_cache(maxsize=None)
def scalar_value_table(dim):
    """Value table for a scalar times a dim-dimensional value"""
    return _freeze_table([(c, 0, c, 1.) for c in range(dim)])


@lru_cache(maxsize=None)
def compose_value_table(n):
    """Value table for S o T on row-major n x n endomorphisms"""
    return _freeze_table([(p*n + q, p*n + r, r*n + q, 1.) for p in range(n) for q in range(n) for r in range(n)])


@lru_cache(maxsize=None)
def apply_value_table(n):
    """Value table for S(v)"""
    return _freeze_table([(p, p*n + r, r, 1.) for p in range(n) for r in range(n)])


@lru_cache(maxsize=None)
def polyvector_value_table(n, j, l):
    """Value table for the wedge of a j-vector with an l-vector"""
    return concat_table(n, j, l)


@lru_cache(maxsize=None)
def contraction_value_table(n, j):
    """Value table feeding a j-vector to the (R, c)-flattened Hom(Lambda^j T, T) fiber"""
    return _freeze_table([(c, R*n + c, R, 1.) for R in range(math.comb(n, j)) for c in range(n)])


@lru_cache(maxsize=None)
def pairing_value_table(dim):
    """Value table for the plain dot product of two dim-dimensional values"""
    return _freeze_table([(0, r, r, 1.) for r in range(dim)])


@njit(parallel=True, cache=True)
def shuffle_kernel(a, b, out_idx, left_idx, right_idx, signs, v_out, v_a, v_b, v_coef, num_out, out_dim, scale):
    """
    Node-batched bilinear shuffle product

    Args:
        a (np.ndarray (N, Ca, fa)): left coefficients
        b (np.ndarray (N, Cb, fb)): right coefficients
        out_idx, left_idx, right_idx, signs (np.ndarray (m, )): shuffle table
        v_out, v_a, v_b, v_coef (np.ndarray (v, )): sparse bilinear value map
        num_out (int): number of output multi-indices
        out_dim (int): output fiber dimension
        scale (float): normalization factor

    Returns:
        out (np.ndarray (N, num_out, out_dim)): product coefficients
    """
    num_nodes = a.shape[0]
    out = np.zeros((num_nodes, num_out, out_dim))
    # each node writes only its own slice of out
    for node in prange(num_nodes):
        for t in range(out_idx.shape[0]):
            s = scale*signs[t]
            K = out_idx[t]
            I = left_idx[t]
            J = right_idx[t]
            for v in range(v_out.shape[0]):
                out[node, K, v_out[v]] += s*v_coef[v]*a[node, I, v_a[v]]*b[node, J, v_b[v]]
    return out


class PointValue(object):
    """
    Value of a bundle-valued form on a list of vectors

    Data Members:
        kind (ValueKind): fiber type
        data (np.ndarray (fiber_dim, )): components in the coordinate fiber basis
    """

    def __init__(self, kind, data, n):
        data = np.asarray(data, dtype=np.float64).reshape(-1)
        if data.shape[0] != kind.fiber_dim(n):
            raise DimensionMismatchError('{} value in n = {} needs {} components, got {}'.format(kind, n, kind.fiber_dim(n), data.shape[0]))
        self.kind = kind
        self.data = data
        self.n = n

    def as_matrix(self):
        if self.kind != ENDOMORPHISM:
            raise UnsupportedKindError('only endomorphism values have a matrix form')
        return self.data.reshape(self.n, self.n)


class _FormData(object):
    # shared arithmetic for PointForm and FormField

    def _check_compatible(self, other):
        if type(other) is not type(self):
            raise DimensionMismatchError('cannot combine {} with {}'.format(type(self).__name__, type(other).__name__))
        if other.n != self.n or other.degree != self.degree or other.kind != self.kind:
            raise DimensionMismatchError('operands differ: (n={}, deg={}, {}) vs (n={}, deg={}, {})'.format(
                self.n, self.degree, self.kind, other.n, other.degree, other.kind))

    def __add__(self, other):
        self._check_compatible(other)
        return self._like(self.coeffs + other.coeffs, other)

    def __sub__(self, other):
        self._check_compatible(other)
        return self._like(self.coeffs - other.coeffs, other)

    def __neg__(self):
        return self._like(-self.coeffs)

    def __mul__(self, scalar):
        return self._like(float(scalar)*self.coeffs)

    __rmul__ = __mul__


class PointForm(_FormData):
    """
    Bundle-valued alternating form at a single point

    Data Members:
        n (int): ambient dimension
        degree (int): form degree k
        kind (ValueKind): value type
        coeffs (np.ndarray (C(n, k), fiber_dim)): values on sorted basis tuples
    """

    def __init__(self, n, degree, kind, coeffs):
        coeffs = np.asarray(coeffs, dtype=np.float64)
        expected = (n_components(n, degree), kind.fiber_dim(n))
        if coeffs.shape != expected:
            raise DimensionMismatchError('point form shape {} does not match {}'.format(coeffs.shape, expected))
        self.n = n
        self.degree = degree
        self.kind = kind
        self.coeffs = coeffs

    @classmethod
    def zeros(cls, n, degree, kind):
        return cls(n, degree, kind, np.zeros((n_components(n, degree), kind.fiber_dim(n))))

    def _like(self, coeffs, other=None):
        return PointForm(self.n, self.degree, self.kind, coeffs)

    def component(self, axes):
        """
        Value on basis vectors in the given (arbitrary) order

        Args:
            axes (sequence of int): k axes

        Returns:
            value (np.ndarray (fiber_dim, )): sign times the stored coefficient
        """
        if len(axes) != self.degree:
            raise DimensionMismatchError('{} axes given to a {}-form'.format(len(axes), self.degree))
        sorted_axes, sign = canonicalize(axes, self.n)
        if sign == 0:
            return np.zeros(self.kind.fiber_dim(self.n))
        return sign*self.coeffs[index_of(self.n, self.degree)[sorted_axes]]

    def evaluate(self, vectors):
        return evaluate(self, vectors)


def evaluate(form, vectors):
    """
    Alternating evaluation of a point form on arbitrary vectors

    Args:
        form (PointForm): degree k form
        vectors (sequence of k np.ndarray (n, )): arguments in order

    Returns:
        value (PointValue): form(v_1, ..., v_k)
    """
    vectors = [np.asarray(v, dtype=np.float64) for v in vectors]
    if len(vectors) != form.degree:
        raise DimensionMismatchError('{} vectors given to a {}-form'.format(len(vectors), form.degree))
    if form.degree == 0:
        return PointValue(form.kind, form.coeffs[0], form.n)
    V = np.stack(vectors, axis=1)
    minors = np.array([np.linalg.det(V[list(I), :]) for I in multi_indices(form.n, form.degree)])
    return PointValue(form.kind, minors @ form.coeffs, form.n)


def _operands(*forms):
    """
    Node-batched coefficient arrays of the operands plus a rewrapping callable

    Point forms become single-node batches. Grid fields must share one geometry.
    """
    first = forms[0]
    for f in forms[1:]:
        if f.n != first.n:
            raise DimensionMismatchError('operands live in different dimensions {} and {}'.format(first.n, f.n))
    if isinstance(first, PointForm):
        if not all(isinstance(f, PointForm) for f in forms):
            raise GeometryMismatchError('cannot mix point forms and grid fields; lift the point form first')

        def wrap(degree, kind, data):
            return PointForm(first.n, degree, kind, data[0])
        return first.n, [np.ascontiguousarray(f.coeffs[None]) for f in forms], wrap

    for f in forms[1:]:
        if not isinstance(f, FormField) or f.geometry is not first.geometry:
            raise GeometryMismatchError('operands are sampled on different geometries')
    valid = np.logical_and.reduce([f.valid for f in forms])

    def wrap(degree, kind, data):
        return FormField(first.geometry, degree, kind, data, valid)
    return first.n, [np.ascontiguousarray(f.coeffs) for f in forms], wrap


def shuffle_product(left, right, kind, value_table, scale=1.):
    """
    Generic bilinear product of two forms with shuffle normalization 1/(k! l!)

    Args:
        left, right (PointForm or FormField): operands of degree k and l
        kind (ValueKind): kind of the result
        value_table (tuple): sparse bilinear map on the fibers
        scale (float, default=1.): extra normalization factor

    Returns:
        product (PointForm or FormField): degree k + l result, the zero form when k + l > n
    """
    n, (a, b), wrap = _operands(left, right)
    degree = left.degree + right.degree
    table = concat_table(n, left.degree, right.degree)
    data = shuffle_kernel(a, b, *table, *value_table, n_components(n, degree), kind.fiber_dim(n), float(scale))
    return wrap(degree, kind, data)


def _require_kind(form, kind, name):
    if form.kind != kind:
        raise DimensionMismatchError('{} must be {}-valued, got {}'.format(name, kind, form.kind))


def wedge_scalar(beta, B):
    """
    Ordinary form acting on a bundle-valued form, (beta ^ B)

    Args:
        beta (PointForm or FormField): scalar k-form
        B (PointForm or FormField): l-form with any value kind

    Returns:
        product (same type): (k + l)-form with the value kind of B
    """
    _require_kind(beta, SCALAR, 'beta')
    return shuffle_product(beta, B, B.kind, scalar_value_table(B.kind.fiber_dim(B.n)))


def wedge_end(alpha, beta):
    """
    Product of endomorphism-valued forms, values combined by composition alpha(...) o beta(...)
    """
    _require_kind(alpha, ENDOMORPHISM, 'alpha')
    _require_kind(beta, ENDOMORPHISM, 'beta')
    return shuffle_product(alpha, beta, ENDOMORPHISM, compose_value_table(alpha.n))


def act_end(alpha, rho):
    """
    Left action of endomorphism-valued forms on tangent-valued forms

    Args:
        alpha (PointForm or FormField): End-valued k-form
        rho (PointForm or FormField): tangent-valued s-form

    Returns:
        product (same type): tangent-valued (k + s)-form
    """
    _require_kind(alpha, ENDOMORPHISM, 'alpha')
    _require_kind(rho, TANGENT, 'rho')
    return shuffle_product(alpha, rho, TANGENT, apply_value_table(alpha.n))


def wedge_poly(gamma, theta):
    """
    Product of polyvector-valued forms with the extra 1/2 normalization,
    so that (A ^ A)(X, Y) = A(X) ^ A(Y) for a tangent-valued 1-form A

    Args:
        gamma (PointForm or FormField): Polyvector(j)-valued i-form
        theta (PointForm or FormField): Polyvector(l)-valued k-form

    Returns:
        product (same type): Polyvector(j + l)-valued (i + k)-form

    Raises:
        UnsupportedKindError: j + l above MAX_POLYVECTOR
    """
    if not (gamma.kind.is_polyvector and theta.kind.is_polyvector):
        raise DimensionMismatchError('wedge_poly needs polyvector values, got {} and {}'.format(gamma.kind, theta.kind))
    j, l = gamma.kind.q, theta.kind.q
    kind = polyvector(j + l)
    return shuffle_product(gamma, theta, kind, polyvector_value_table(gamma.n, j, l), scale=0.5)


def hom_reinterpret(a, n, s, j):
    """
    View tangent-valued s-form coefficients as an (s - j)-form with values in Hom(Lambda^j T, T)

    Args:
        a (np.ndarray (N, C(n, s), n)): node-batched coefficients
        n (int): ambient dimension
        s (int): form degree
        j (int): number of trailing slots fed by a j-vector

    Returns:
        hom (np.ndarray (N, C(n, s - j), C(n, j)*n)): fiber flattened as (R, c)
    """
    out, free, fed, sign = concat_table(n, s - j, j)
    table = np.zeros((n_components(n, s - j), n_components(n, j), n_components(n, s)))
    table[free, fed, out] = sign
    hom = np.einsum('PRI,NIc->NPRc', table, a, optimize=True)
    return np.ascontiguousarray(hom.reshape(a.shape[0], table.shape[0], table.shape[1]*n))


def act_poly(rho, gamma):
    """
    Right action of polyvector-valued forms on tangent-valued forms

    The last j slots of rho eat the j-vector value of gamma through
    Hom(Lambda^j T, T) = Lambda^j T* (x) T, normalization 1/((s - j)! i!).

    Args:
        rho (PointForm or FormField): tangent-valued s-form
        gamma (PointForm or FormField): Polyvector(j)-valued i-form

    Returns:
        product (same type): tangent-valued (s - j + i)-form, zero when s < j
    """
    _require_kind(rho, TANGENT, 'rho')
    if not gamma.kind.is_polyvector:
        raise DimensionMismatchError('act_poly needs a polyvector-valued right operand, got {}'.format(gamma.kind))
    n, (a, b), wrap = _operands(rho, gamma)
    s, j, i = rho.degree, gamma.kind.q, gamma.degree
    degree = s - j + i
    if s < j:
        return wrap(degree, TANGENT, np.zeros((a.shape[0], n_components(n, degree), n)))
    hom = hom_reinterpret(a, n, s, j)
    table = concat_table(n, s - j, i)
    data = shuffle_kernel(hom, b, *table, *contraction_value_table(n, j), n_components(n, degree), n, 1.)
    return wrap(degree, TANGENT, data)


def left_right_associator(beta, rho, gamma):
    """
    Defect (beta ^ rho) ^ gamma - beta ^ (rho ^ gamma) between the left action of
    scalar forms and the right polyvector action; nonzero in general since beta
    also lands in the slots that eat gamma

    Args:
        beta (PointForm or FormField): scalar form
        rho (PointForm or FormField): tangent-valued form
        gamma (PointForm or FormField): polyvector-valued form

    Returns:
        defect (same type): tangent-valued form
    """
    return act_poly(wedge_scalar(beta, rho), gamma) - wedge_scalar(beta, act_poly(rho, gamma))


# pointwise operations with a node-vectorized implementation
_VECTORIZED = frozenset((wedge_scalar, wedge_end, wedge_poly, act_end, act_poly, left_right_associator))


class FormField(_FormData):
    """
    Grid-sampled bundle-valued differential form

    Data Members:
        geometry (ChartGeometry): sampling grid, shared by identity
        degree (int): form degree k
        kind (ValueKind): value type
        coeffs (np.ndarray (N, C(n, k), fiber_dim)): per-node coefficients
        valid (np.ndarray (N, ), bool): nodes where the samples are defined
    """

    def __init__(self, geometry, degree, kind, coeffs, valid=None):
        n = geometry.n
        coeffs = np.asarray(coeffs, dtype=np.float64)
        expected = (geometry.num_nodes, n_components(n, degree), kind.fiber_dim(n))
        if coeffs.shape != expected:
            raise DimensionMismatchError('field shape {} does not match {}'.format(coeffs.shape, expected))
        self.geometry = geometry
        self.degree = degree
        self.kind = kind
        self.coeffs = coeffs
        self.valid = geometry.valid.copy() if valid is None else np.asarray(valid, dtype=bool)

    @property
    def n(self):
        return self.geometry.n

    @property
    def num_nodes(self):
        return self.geometry.num_nodes

    @classmethod
    def zeros(cls, geometry, degree, kind):
        return cls(geometry, degree, kind, np.zeros((geometry.num_nodes, n_components(geometry.n, degree), kind.fiber_dim(geometry.n))))

    @classmethod
    def from_function(cls, geometry, degree, kind, func):
        """
        Sample a field from a vectorized function of the node coordinates

        Args:
            geometry (ChartGeometry): sampling grid
            degree (int): form degree
            kind (ValueKind): value type
            func (callable): maps coords (np.ndarray (N, n)) to (N, C(n, k), fiber_dim)

        Returns:
            field (FormField): sampled field
        """
        return cls(geometry, degree, kind, func(geometry.coords))

    def _check_compatible(self, other):
        super()._check_compatible(other)
        if other.geometry is not self.geometry:
            raise GeometryMismatchError('fields are sampled on different geometries')

    def _like(self, coeffs, other=None):
        valid = self.valid if other is None else self.valid & other.valid
        return FormField(self.geometry, self.degree, self.kind, coeffs, valid)

    def with_coeffs(self, coeffs, valid=None):
        return FormField(self.geometry, self.degree, self.kind, coeffs, self.valid if valid is None else valid)

    def at(self, node):
        return PointForm(self.n, self.degree, self.kind, self.coeffs[node])

    def node_norms(self):
        return np.sqrt(np.sum(self.coeffs**2, axis=(1, 2)))

    def sup_norm(self):
        """Max over valid nodes of the Euclidean norm of the coefficient block"""
        if not np.any(self.valid) or self.coeffs.size == 0:
            return 0.
        return float(np.max(self.node_norms()[self.valid]))


def lift(op, fields):
    """
    Apply a pointwise operation node by node over grid fields

    Args:
        op (callable): pointwise operation on PointForms returning a PointForm
        fields (list of FormField): operands on one shared geometry

    Returns:
        result (FormField): field on the input geometry

    Raises:
        GeometryMismatchError: operands sampled on different geometries
    """
    fields = list(fields)
    geometry = fields[0].geometry
    for f in fields[1:]:
        if f.geometry is not geometry:
            raise GeometryMismatchError('lift operands are sampled on different geometries')
    if op in _VECTORIZED:
        return op(*fields)
    valid = np.logical_and.reduce([f.valid for f in fields])
    results = [op(*[f.at(node) for f in fields]) for node in range(geometry.num_nodes)]
    data = np.stack([r.coeffs for r in results])
    return FormField(geometry, results[0].degree, results[0].kind, data, valid)

