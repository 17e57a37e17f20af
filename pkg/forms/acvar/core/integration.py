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
Prototype of fiber metrics, the metric pairing of polyvector-valued forms,
the extended Hodge star, L2 products and the codifferential
Author: acvar developers
"""

import logging

import numpy as np

from acvar.core.exceptions import DimensionMismatchError, GeometryMismatchError, UnsupportedKindError, MetricConnectionError
from acvar.core.exterior_core import (FormField, SCALAR, ENDOMORPHISM, n_components, multi_indices,
                                      concat_table, shuffle_product, pairing_value_table)
from acvar.core.geometry import compensated_sum
from acvar.core.calculus import dnabla

logger = logging.getLogger(__name__)


def compound(M, k):
    """
    k-th compound matrices, minors det(M[I, J]) over sorted index tuples

    Args:
        M (np.ndarray (N, n, n)): stacked matrices
        k (int): minor size

    Returns:
        C (np.ndarray (N, C(n, k), C(n, k))): compound matrices, ones for k = 0
    """
    N, n = M.shape[0], M.shape[1]
    indices = multi_indices(n, k)
    if k == 0:
        return np.ones((N, 1, 1))
    out = np.empty((N, len(indices), len(indices)))
    for a, I in enumerate(indices):
        rows = M[:, list(I), :]
        for b, J in enumerate(indices):
            out[:, a, b] = np.linalg.det(rows[:, :, list(J)])
    return out


def _value_degree(kind):
    if kind == ENDOMORPHISM:
        raise UnsupportedKindError('fiber metric not defined here for endomorphism values')
    return kind.q


class FiberGram(object):
    """
    Induced metric on Lambda^p T_M in the sorted coordinate polyvector basis,
    g(v_1 ^ ... ^ v_p, w_1 ^ ... ^ w_p) = det(g(v_i, w_j))

    Data Members:
        p (int): polyvector degree, 0 for scalars
        matrices (np.ndarray (N, C(n, p), C(n, p))): per-node Gram matrices
    """

    def __init__(self, geometry, p):
        if p < 0 or p > 2:
            raise UnsupportedKindError('fiber metric limited to p <= 2, got p = {}'.format(p))
        self.p = p
        self.matrices = compound(geometry.metric, p)


def fiber_gram(geometry, p):
    key = ('gram', p)
    if key not in geometry._cache:
        geometry._cache[key] = FiberGram(geometry, p)
    return geometry._cache[key]


def _coform_gram(geometry, k):
    # induced metric on scalar k-forms
    key = ('coform_gram', k)
    if key not in geometry._cache:
        geometry._cache[key] = compound(geometry.inverse_metric, k)
    return geometry._cache[key]


class OrthonormalFrame(object):
    """
    Cholesky-derived orthonormal frame E with E^T g E = Id

    Data Members:
        E (np.ndarray (N, n, n)): columns are the frame vectors in coordinates
        E_inv (np.ndarray (N, n, n)): inverse of E, rows are the dual coframe
    """

    def __init__(self, geometry):
        self.geometry = geometry
        L = np.linalg.cholesky(geometry.metric)
        self.E_inv = np.ascontiguousarray(L.transpose(0, 2, 1))
        self.E = np.linalg.inv(self.E_inv)

    def orthonormality_residual(self):
        eye = np.eye(self.geometry.n)
        return float(np.max(np.abs(np.einsum('Nai,Nab,Nbj->Nij', self.E, self.geometry.metric, self.E) - eye)))

    def fiber_transform(self, degree, kind):
        """
        Coordinate-to-orthonormal change of basis on the fiber of (degree, kind) forms

        Args:
            degree (int): form degree k
            kind (ValueKind): scalar, tangent or Polyvector(2)

        Returns:
            F (np.ndarray (N, C(n, k)*f, C(n, k)*f)): acts on coefficients flattened as [I, v],
                F^T F is the pointwise fiber Gram matrix
        """
        key = ('frame', degree, kind)
        cache = self.geometry._cache
        if key in cache:
            return cache[key]
        p = _value_degree(kind)
        form_part = compound(self.E, degree).transpose(0, 2, 1)
        if p == 0:
            value_part = np.ones((self.E.shape[0], 1, 1))
        else:
            value_part = compound(self.E_inv, p)
        F = np.einsum('NIJ,Nab->NIaJb', form_part, value_part)
        N, C, f = F.shape[0], form_part.shape[1], value_part.shape[1]
        F = F.reshape(N, C*f, C*f)
        cache[key] = F
        return F


def orthonormal_frame(geometry):
    if 'frame' not in geometry._cache:
        geometry._cache['frame'] = OrthonormalFrame(geometry)
    return geometry._cache['frame']


def _require_pairable(alpha, beta):
    if not (alpha.kind.is_polyvector or alpha.kind == SCALAR) or alpha.kind != beta.kind:
        raise DimensionMismatchError('metric pairing needs matching polyvector values, got {} and {}'.format(alpha.kind, beta.kind))


def lower_values(field):
    """Values mapped through the fiber Gram matrix, v_r -> sum_s G[r, s] v_s"""
    G = fiber_gram(field.geometry, _value_degree(field.kind)).matrices
    return field.with_coeffs(np.einsum('Nrs,NIs->NIr', G, field.coeffs))


def wedge_g(alpha, beta):
    """
    Metric pairing of polyvector-valued forms,
    (alpha ^_g beta) = sum (a ^ b) g(v, w) over value components

    Args:
        alpha (FormField): Polyvector(p)-valued k-form, tangent counts as p = 1
        beta (FormField): Polyvector(p)-valued l-form

    Returns:
        paired (FormField): scalar (k + l)-form

    Raises:
        DimensionMismatchError: value kinds differ
    """
    _require_pairable(alpha, beta)
    dim = alpha.kind.fiber_dim(alpha.n)
    return shuffle_product(alpha, lower_values(beta), SCALAR, pairing_value_table(dim))


def fiber_inner(alpha, sigma):
    """
    Pointwise inner product <alpha, sigma>_g of two forms of equal degree and kind

    Args:
        alpha, sigma (FormField): k-forms with the same value kind

    Returns:
        inner (FormField): scalar 0-form
    """
    _require_pairable(alpha, sigma)
    if alpha.degree != sigma.degree:
        raise DimensionMismatchError('fiber_inner needs equal degrees, got {} and {}'.format(alpha.degree, sigma.degree))
    geom = alpha.geometry
    forms = _coform_gram(geom, alpha.degree)
    values = fiber_gram(geom, _value_degree(alpha.kind)).matrices
    data = np.einsum('NIr,NIJ,Nrs,NJs->N', alpha.coeffs, forms, values, sigma.coeffs, optimize=True)
    return FormField(geom, 0, SCALAR, data[:, None, None], alpha.valid & sigma.valid)


def hodge_star(alpha):
    """
    Hodge star on the form part, identity on the values,
    (*a)_J = sqrt(det g) sum_I a^I sign(I, J) with a^I raised by the induced coform metric

    Args:
        alpha (FormField): k-form of any kind

    Returns:
        star (FormField): (n - k)-form of the same kind
    """
    geom = alpha.geometry
    n, k = geom.n, alpha.degree
    raised = np.einsum('NIJ,NJv->NIv', _coform_gram(geom, k), alpha.coeffs)
    _, left, right, signs = concat_table(n, k, n - k)
    data = np.zeros((geom.num_nodes, n_components(n, n - k), alpha.coeffs.shape[2]))
    # complements pair up one to one
    data[:, right, :] = signs[None, :, None]*raised[:, left, :]
    data *= geom.vol_density[:, None, None]
    return FormField(geom, n - k, alpha.kind, data, alpha.valid)


def _integrate_top(form):
    geom = form.geometry
    geom.require_integration()
    return float(compensated_sum(np.ascontiguousarray(geom.weights*form.coeffs[:, 0, 0])))


def degree_inner(a, b, path='star'):
    """
    L2 product of two forms of one degree, integral of a ^_g *b

    Args:
        a, b (FormField): k-forms of the same kind
        path (str, default='star'): 'star' through ^_g and *, 'fiber' through fiber_inner and vol_g

    Returns:
        value (float): trapezoid quadrature

    Raises:
        IntegrationUnsupportedError: non-periodic chart
    """
    a.geometry.require_integration()
    if a.degree != b.degree:
        raise DimensionMismatchError('degree_inner needs equal degrees, got {} and {}'.format(a.degree, b.degree))
    if a.coeffs.shape[1] == 0:
        return 0.
    if path == 'star':
        return _integrate_top(wedge_g(a, hodge_star(b)))
    if path == 'fiber':
        return a.geometry.integrate(fiber_inner(a, b).coeffs[:, 0, 0])
    raise ValueError('unknown integration path {!r}'.format(path))


def _components(field):
    if isinstance(field, FormField):
        return {field.degree: field}
    return dict(field.components)


def l2_inner(A, B, path='star'):
    """
    Total L2 product, the sum over degrees of the degree-wise products

    Args:
        A, B (GradedField or FormField): missing degrees count as zero

    Returns:
        value (float): <<A, B>>
    """
    a, b = _components(A), _components(B)
    A.geometry.require_integration()
    if B.geometry is not A.geometry:
        raise GeometryMismatchError('L2 operands are sampled on different geometries')
    total = 0.
    for degree in sorted(set(a) & set(b)):
        total += degree_inner(a[degree], b[degree], path)
    return total


def l2_norm(A):
    return float(np.sqrt(max(l2_inner(A, A), 0.)))


def codifferential(gamma, mask=None):
    """
    Formal adjoint of the covariant exterior derivative, -* d * in even dimension

    Args:
        gamma (FormField): k-form
        mask (DegreeMask, default=None): codifferential vanishes on degrees whose d is masked

    Returns:
        delta_gamma (FormField): (k - 1)-form of the same kind

    Raises:
        MetricConnectionError: connection is not the Levi-Civita one
    """
    geom = gamma.geometry
    if not geom.levi_civita:
        raise MetricConnectionError()
    if geom.n % 2:
        raise DimensionMismatchError('codifferential implemented for even dimension, got n = {}'.format(geom.n))
    k = gamma.degree
    if k < 1 or k > geom.n or (mask is not None and mask.kills_delta(k)):
        return FormField(geom, k - 1, gamma.kind,
                         np.zeros((geom.num_nodes, n_components(geom.n, k - 1), gamma.kind.fiber_dim(geom.n))), gamma.valid)
    return -hodge_star(dnabla(hodge_star(gamma)))


def _basis_field(geometry, degree, kind, flat_index):
    f = kind.fiber_dim(geometry.n)
    coeffs = np.zeros((geometry.num_nodes, n_components(geometry.n, degree)*f))
    coeffs[:, flat_index] = 1.
    return FormField(geometry, degree, kind, coeffs.reshape(geometry.num_nodes, -1, f))


def pointwise_matrix(linear_map, geometry, in_degree, in_kind):
    """
    Per-node matrix of a pointwise linear bundle map from its images of constant basis fields

    Args:
        linear_map (callable): FormField (in_degree, in_kind) -> FormField
        geometry (ChartGeometry): sampling grid
        in_degree (int): source degree
        in_kind (ValueKind): source value kind

    Returns:
        matrix (np.ndarray (N, out_dim, in_dim)): coordinate matrices
        out_degree (int), out_kind (ValueKind): target type
    """
    in_dim = n_components(geometry.n, in_degree)*in_kind.fiber_dim(geometry.n)
    columns = []
    out_degree, out_kind = None, None
    for m in range(in_dim):
        image = linear_map(_basis_field(geometry, in_degree, in_kind, m))
        out_degree, out_kind = image.degree, image.kind
        columns.append(image.coeffs.reshape(geometry.num_nodes, -1))
    if not columns:
        return np.zeros((geometry.num_nodes, 0, 0)), None, None
    return np.stack(columns, axis=2), out_degree, out_kind


def pointwise_adjoint(linear_map, in_degree, in_kind, eta):
    """
    Metric adjoint of a pointwise linear bundle map, the transpose of its matrix in orthonormal fiber bases

    Args:
        linear_map (callable): FormField (in_degree, in_kind) -> FormField of eta's type
        in_degree (int): source degree
        in_kind (ValueKind): source value kind
        eta (FormField): element of the target

    Returns:
        adjoint (FormField): (in_degree, in_kind) field with <<L x, eta>> = <<x, L* eta>>
    """
    geom = eta.geometry
    zero = FormField.zeros(geom, in_degree, in_kind)
    if zero.coeffs.shape[1] == 0 or eta.coeffs.shape[1] == 0:
        return zero
    matrix, out_degree, out_kind = pointwise_matrix(linear_map, geom, in_degree, in_kind)
    if out_degree != eta.degree or out_kind != eta.kind:
        raise DimensionMismatchError('map lands in degree {} {}, eta is degree {} {}'.format(out_degree, out_kind, eta.degree, eta.kind))
    frame = orthonormal_frame(geom)
    F_in = frame.fiber_transform(in_degree, in_kind)
    F_out = frame.fiber_transform(eta.degree, eta.kind)
    # orthonormal matrix F_out M F_in^-1, transposed and mapped back
    ortho = np.linalg.solve(F_in.transpose(0, 2, 1), (F_out @ matrix).transpose(0, 2, 1)).transpose(0, 2, 1)
    y = np.einsum('Nab,Nb->Na', F_out, eta.coeffs.reshape(geom.num_nodes, -1))
    x = np.linalg.solve(F_in, np.einsum('Nba,Nb->Na', ortho, y)[..., None])[..., 0]
    return FormField(geom, in_degree, in_kind, x.reshape(zero.coeffs.shape), eta.valid)
