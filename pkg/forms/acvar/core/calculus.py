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
Prototype of differential operators on grid-sampled forms: central differences,
Lie bracket, Nijenhuis tensor, covariant exterior derivative and its degree masks
Author: acvar developers
"""

import logging

import numpy as np

from acvar.core.exceptions import DimensionMismatchError, UnsupportedKindError
from acvar.core.exterior_core import (FormField, SCALAR, TANGENT, ENDOMORPHISM, polyvector, n_components,
                                      multi_indices, index_of, canonicalize, concat_table, wedge_scalar,
                                      wedge_poly, act_poly, left_right_associator)

logger = logging.getLogger(__name__)


class DegreeMask(object):
    """
    Degrees on which the covariant exterior derivative is forced to zero

    d[k] zeroes degree k - 1, d[1, 3] zeroes {0, 2}; the matching codifferential
    vanishes on degree d exactly when d - 1 is zeroed.

    Data Members:
        zeroed (frozenset of int): input degrees mapped to zero by d
    """

    def __init__(self, zeroed=()):
        self.zeroed = frozenset(int(z) for z in zeroed)

    @classmethod
    def none(cls):
        return cls()

    @classmethod
    def bracket(cls, *ks):
        """Mask of d[k_1, ..., k_m]"""
        return cls(k - 1 for k in ks)

    @classmethod
    def parse(cls, text):
        """'none', '5', '1,3' or '[1, 3]'"""
        text = str(text).strip().strip('[]')
        if text.lower() in ('', 'none'):
            return cls.none()
        return cls.bracket(*(int(t) for t in text.split(',')))

    def kills_d(self, degree):
        return degree in self.zeroed

    def kills_delta(self, degree):
        return degree - 1 in self.zeroed

    @property
    def label(self):
        if not self.zeroed:
            return 'none'
        return ','.join(str(z + 1) for z in sorted(self.zeroed))

    def __eq__(self, other):
        return isinstance(other, DegreeMask) and self.zeroed == other.zeroed

    def __hash__(self):
        return hash(self.zeroed)

    def __repr__(self):
        return 'DegreeMask[{}]'.format(self.label)


class FDScheme(object):
    """
    Second order central differences on the grid of a geometry

    Data Members:
        h (np.ndarray (n, )): step per axis
        order (int): stencil order, always 2
    """

    order = 2

    def __init__(self, geometry):
        self.geometry = geometry
        self.h = geometry.spacing

    def apply(self, coeffs, valid, axis):
        geom = self.geometry
        return geom.central_difference(coeffs, axis), geom.stencil_valid(valid, axis)


def partial(field, axis):
    """
    Componentwise central difference along a coordinate axis

    Args:
        field (FormField): any degree and kind
        axis (int): coordinate axis

    Returns:
        derivative (FormField): same degree and kind, boundary nodes of non-periodic axes invalid
    """
    if not 0 <= axis < field.n:
        raise IndexError('axis {} out of range for n = {}'.format(axis, field.n))
    data, valid = FDScheme(field.geometry).apply(field.coeffs, field.valid, axis)
    return field.with_coeffs(data, valid)


def _vector_samples(X, name):
    if X.degree != 0 or X.kind != TANGENT:
        raise DimensionMismatchError('{} must be a vector field (degree-0 tangent), got degree {} {}'.format(name, X.degree, X.kind))
    return X.coeffs[:, 0, :]


def _structure_field(A):
    return getattr(A, 'field', A)


def coordinate_field(geom, axis):
    """Constant vector field d/dx_axis"""
    coeffs = np.zeros((geom.num_nodes, 1, geom.n))
    coeffs[:, 0, axis] = 1.
    return FormField(geom, 0, TANGENT, coeffs)


def lie_bracket(X, Y):
    """
    Lie bracket [X, Y]^k = X^j d_j Y^k - Y^j d_j X^k

    Args:
        X, Y (FormField): vector fields on one geometry

    Returns:
        bracket (FormField): vector field
    """
    x = _vector_samples(X, 'X')
    y = _vector_samples(Y, 'Y')
    dX = [partial(X, j) for j in range(X.n)]
    dY = [partial(Y, j) for j in range(Y.n)]
    valid = X.valid & Y.valid
    for f in dX + dY:
        valid = valid & f.valid
    dx = np.stack([f.coeffs[:, 0, :] for f in dX], axis=1)
    dy = np.stack([f.coeffs[:, 0, :] for f in dY], axis=1)
    data = np.einsum('Nj,Njk->Nk', x, dy) - np.einsum('Nj,Njk->Nk', y, dx)
    return FormField(X.geometry, 0, TANGENT, data[:, None, :], valid)


def apply_structure(A, X):
    """Pointwise image A(X) of a vector field"""
    A = _structure_field(A)
    data = np.einsum('Nia,Ni->Na', A.coeffs, _vector_samples(X, 'X'))
    return FormField(X.geometry, 0, TANGENT, data[:, None, :], A.valid & X.valid)


def compose_values(A, form):
    """
    Pointwise A applied to the tangent values of a form, (A o rho)(X_1, ..., X_k) = A(rho(X_1, ..., X_k))

    Args:
        A (ACStructure or FormField): degree-1 tangent field read as endomorphisms
        form (FormField): tangent-valued form

    Returns:
        composed (FormField): same degree as form
    """
    A = _structure_field(A)
    if form.kind != TANGENT:
        raise DimensionMismatchError('compose_values needs tangent values, got {}'.format(form.kind))
    data = np.einsum('Nia,NKi->NKa', A.coeffs, form.coeffs)
    return form.with_coeffs(data, form.valid & A.valid)


def nijenhuis(A, X, Y):
    """
    N_A(X, Y) = [AX, AY] - A([AX, Y] + [X, AY]) - [X, Y]

    Args:
        A (ACStructure): almost-complex structure
        X, Y (FormField): vector fields

    Returns:
        N (FormField): vector field
    """
    AX = apply_structure(A, X)
    AY = apply_structure(A, Y)
    mixed = lie_bracket(AX, Y) + lie_bracket(X, AY)
    return lie_bracket(AX, AY) - apply_structure(A, mixed) - lie_bracket(X, Y)


def nijenhuis_tensor(A):
    """
    Nijenhuis tensor as a tangent-valued 2-form, N_ij = N_A(d_i, d_j)

    Args:
        A (ACStructure): almost-complex structure

    Returns:
        N (FormField): degree-2 tangent-valued field
    """
    field = _structure_field(A)
    geom = field.geometry
    coords = [coordinate_field(geom, i) for i in range(geom.n)]
    data = np.zeros((geom.num_nodes, n_components(geom.n, 2), geom.n))
    valid = field.valid.copy()
    for pos, (i, j) in enumerate(multi_indices(geom.n, 2)):
        N_ij = nijenhuis(A, coords[i], coords[j])
        data[:, pos, :] = N_ij.coeffs[:, 0, :]
        valid &= N_ij.valid
    return FormField(geom, 2, TANGENT, data, valid)


def induced_connection(geom, kind):
    """
    Value-connection matrices per coordinate axis

    Args:
        geom (ChartGeometry): geometry carrying Gamma
        kind (ValueKind): scalar, tangent or Polyvector(2)

    Returns:
        conn (np.ndarray (N, n, f, f)): conn[node, i] maps fiber coefficients to those of nabla_{d_i}
    """
    key = ('connection', kind)
    if key in geom._cache:
        return geom._cache[key]
    N, n = geom.num_nodes, geom.n
    gamma = geom.christoffel
    if kind == SCALAR:
        conn = np.zeros((N, n, 1, 1))
    elif kind == TANGENT:
        # conn[node, i, a, b] = Gamma^a_{ib}
        conn = np.ascontiguousarray(gamma.transpose(0, 2, 1, 3))
    elif kind == polyvector(2):
        # Leibniz rule on decomposables e_c ^ e_d
        pos = index_of(n, 2)
        conn = np.zeros((N, n, n_components(n, 2), n_components(n, 2)))
        for P, (c, d) in enumerate(multi_indices(n, 2)):
            for a in range(n):
                for axes, coeff in (((a, d), gamma[:, a, :, c]), ((c, a), gamma[:, a, :, d])):
                    R, sign = canonicalize(axes, n)
                    if sign:
                        conn[:, :, pos[R], P] += sign*coeff
    else:
        raise UnsupportedKindError('covariant exterior derivative not available for {} values'.format(kind))
    geom._cache[key] = conn
    return conn


def covariant_partial(field, axis):
    """nabla_{d_axis} acting on the values of a form, slots untouched"""
    conn = induced_connection(field.geometry, field.kind)
    d = partial(field, axis)
    if field.kind == SCALAR:
        return d
    return d.with_coeffs(d.coeffs + np.einsum('Nab,NIb->NIa', conn[:, axis], field.coeffs))


def dnabla(gamma, mask=None):
    """
    Covariant exterior derivative in the coordinate frame,
    (d gamma)_{i_0 ... i_k} = sum_j (-1)^j (nabla_{d_{i_j}} gamma)(... omit i_j ...)

    Args:
        gamma (FormField): scalar, tangent or Polyvector(2)-valued k-form
        mask (DegreeMask, default=None): degrees forced to zero

    Returns:
        d_gamma (FormField): (k + 1)-form of the same kind
    """
    geom = gamma.geometry
    n, k = geom.n, gamma.degree
    if gamma.kind == ENDOMORPHISM:
        raise UnsupportedKindError('covariant exterior derivative not available for endomorphism values')
    if (mask is not None and mask.kills_d(k)) or k < 0 or k + 1 > n:
        return FormField(geom, k + 1, gamma.kind,
                         np.zeros((geom.num_nodes, n_components(n, k + 1), gamma.kind.fiber_dim(n))), gamma.valid)
    out_idx, axis_idx, in_idx, signs = concat_table(n, 1, k)
    data = np.zeros((geom.num_nodes, n_components(n, k + 1), gamma.kind.fiber_dim(n)))
    valid = gamma.valid.copy()
    for i in range(n):
        D_i = covariant_partial(gamma, i)
        valid &= D_i.valid
        rows = axis_idx == i
        # each output index appears once per axis
        data[:, out_idx[rows], :] += signs[rows][None, :, None]*D_i.coeffs[:, in_idx[rows], :]
    return FormField(geom, k + 1, gamma.kind, data, valid)


def cov_derivative(A):
    """
    Covariant derivative of a degree-1 tangent field viewed as endomorphisms,
    (nabla_i A)^k_j = d_i A^k_j + Gamma^k_il A^l_j - Gamma^l_ij A^k_l

    Args:
        A (ACStructure or FormField): degree-1 tangent field

    Returns:
        nabla_A (np.ndarray (N, n, n, n)): [node, i, k, j]
        valid (np.ndarray (N, ), bool): nodes with complete stencils
    """
    field = _structure_field(A)
    geom = field.geometry
    mats = field.coeffs.transpose(0, 2, 1)
    valid = field.valid.copy()
    dA = []
    for i in range(geom.n):
        data, valid_i = FDScheme(geom).apply(mats, field.valid, i)
        dA.append(data)
        valid &= valid_i
    gamma = geom.christoffel
    nabla_A = (np.stack(dA, axis=1) + np.einsum('Nkil,Nlj->Nikj', gamma, mats)
               - np.einsum('Nlij,Nkl->Nikj', gamma, mats))
    return nabla_A, valid


def coordinate_differential(geom, axis):
    """Scalar 1-form dx_axis"""
    coeffs = np.zeros((geom.num_nodes, geom.n, 1))
    coeffs[:, axis, 0] = 1.
    return FormField(geom, 1, SCALAR, coeffs)


def associator_defect(sigma, P):
    """
    sum_m [(dx^m ^ nabla_m sigma) ^ P - dx^m ^ (nabla_m sigma ^ P)]: the part of d(sigma ^ P)
    that the naive rule d sigma ^ P + (-1)^(s-j) sigma ^ d P misses

    Args:
        sigma (FormField): tangent-valued s-form
        P (FormField): polyvector-valued form

    Returns:
        defect (FormField): tangent-valued form of degree s - j + i + 1
    """
    geom = sigma.geometry
    total = None
    for m in range(geom.n):
        term = left_right_associator(coordinate_differential(geom, m), covariant_partial(sigma, m), P)
        total = term if total is None else total + term
    return total


def _accumulate(buckets, field):
    if field.coeffs.shape[1] == 0:
        return
    if field.degree in buckets:
        buckets[field.degree] = buckets[field.degree] + field
    else:
        buckets[field.degree] = field


def exactness_residual(rho, alpha):
    """
    Compare d((alpha ^ rho) ^ (rho ^ rho) - alpha ^ rho) with
    -I^alpha_rho + (1 - (-1)^k) (alpha ^ rho) ^ (d rho ^ rho), with and without the associator correction

    Args:
        rho (FormField): tangent-valued k-form
        alpha (AuxiliaryOneForm or FormField): closed scalar 1-form

    Returns:
        naive (float): sup-norm residual of the uncorrected identity
        corrected (float): sup-norm residual once associator_defect(alpha ^ rho, rho ^ rho) is added back
    """
    alpha = getattr(alpha, 'field', alpha)
    k = rho.degree
    sigma = wedge_scalar(alpha, rho)
    P = wedge_poly(rho, rho)
    d_rho = dnabla(rho)
    a_d_rho = wedge_scalar(alpha, d_rho)

    lhs = {}
    _accumulate(lhs, dnabla(act_poly(sigma, P)))
    _accumulate(lhs, -dnabla(sigma))

    rhs = {}
    _accumulate(rhs, -act_poly(a_d_rho, P))
    _accumulate(rhs, a_d_rho)
    _accumulate(rhs, (1. - (-1.)**k)*act_poly(sigma, wedge_poly(d_rho, rho)))

    defect = associator_defect(sigma, P)
    naive = 0.
    corrected = 0.
    for degree in sorted(set(lhs) | set(rhs)):
        diff = lhs.get(degree)
        if degree in rhs:
            diff = -rhs[degree] if diff is None else diff - rhs[degree]
        naive = max(naive, diff.sup_norm())
        if degree == defect.degree and defect.coeffs.shape[1]:
            diff = diff + defect
        corrected = max(corrected, diff.sup_norm())
    logger.debug('exactness residual k=%d: naive %.3e corrected %.3e', k, naive, corrected)
    return naive, corrected
