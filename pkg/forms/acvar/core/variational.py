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
Prototype of the integrability quantities, the cubic functionals on graded
tangent-valued fields, their Euler-Lagrange derivatives and gradient flows,
the structure classifier and the stability probe
Author: acvar developers
"""

import logging

import numpy as np
from scipy.linalg import expm
from scipy.sparse.linalg import LinearOperator, cg

from acvar.core.exceptions import (DimensionMismatchError, GeometryMismatchError, ProjectionError,
                                   FlowDivergenceError, ProbePathError)
from acvar.core.exterior_core import FormField, TANGENT, wedge_scalar, wedge_poly, act_poly
from acvar.core.geometry import (AC_TOLERANCE, ACStructure, check_ac, matrices_to_field, make_perturbed_ac,
                                 random_smooth_field, standard_complex_structure)
from acvar.core.calculus import DegreeMask, dnabla, cov_derivative
from acvar.core.integration import (l2_inner, l2_norm, codifferential, pointwise_adjoint, orthonormal_frame)

logger = logging.getLogger(__name__)

FAMILIES = ('quasi_alpha', 'alpha', 'plain')
FORM_VARIANTS = ('plain', 'quasi_alpha', 'alpha_left')

# integrability quantity summed by each functional
_FORM_OF_FAMILY = {'quasi_alpha': 'quasi_alpha', 'alpha': 'alpha_left', 'plain': 'plain'}


class GradedField(object):
    """
    Sum of tangent-valued forms over degrees 0..n, absent degrees are zero

    Data Members:
        geometry (ChartGeometry): shared sampling grid
        components (dict int -> FormField): non-empty components by degree
    """

    def __init__(self, geometry, components=None):
        self.geometry = geometry
        self.components = {}
        for degree, field in (components or {}).items():
            if field.geometry is not geometry:
                raise GeometryMismatchError('graded component of degree {} lives on another geometry'.format(degree))
            if field.degree != degree or field.kind != TANGENT:
                raise DimensionMismatchError('graded component {} is a degree {} {} form'.format(degree, field.degree, field.kind))
            if 0 <= degree <= geometry.n:
                self.components[degree] = field

    @classmethod
    def from_fields(cls, geometry, fields):
        """Collect fields, adding the ones that share a degree"""
        out = cls(geometry)
        for field in fields:
            out = out + cls(geometry, {field.degree: field})
        return out

    @property
    def n(self):
        return self.geometry.n

    @property
    def degrees(self):
        return sorted(self.components)

    def component(self, degree):
        if degree in self.components:
            return self.components[degree]
        return FormField.zeros(self.geometry, degree, TANGENT)

    def has(self, degree):
        return degree in self.components

    def with_component(self, degree, field):
        comps = dict(self.components)
        comps[degree] = field
        return GradedField(self.geometry, comps)

    def without(self, *degrees):
        return GradedField(self.geometry, {k: f for k, f in self.components.items() if k not in degrees})

    def _combine(self, other, sign):
        if other.geometry is not self.geometry:
            raise GeometryMismatchError('graded fields live on different geometries')
        comps = dict(self.components)
        for degree, field in other.components.items():
            if degree in comps:
                comps[degree] = comps[degree] + field if sign > 0 else comps[degree] - field
            else:
                comps[degree] = field if sign > 0 else -field
        return GradedField(self.geometry, comps)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return GradedField(self.geometry, {k: -f for k, f in self.components.items()})

    def __mul__(self, scalar):
        return GradedField(self.geometry, {k: scalar*f for k, f in self.components.items()})

    __rmul__ = __mul__

    def sup_norm(self):
        return max([f.sup_norm() for f in self.components.values()], default=0.)

    def is_finite(self):
        return all(np.all(np.isfinite(f.coeffs)) for f in self.components.values())


class FunctionalVariant(object):
    """
    One of the three cubic functionals with its degree mask

    Data Members:
        family (str): 'quasi_alpha', 'alpha' or 'plain'
        mask (DegreeMask): none or [5] for the alpha families, [1] or [1, 3] for plain
        alpha (FormField or None): closed scalar 1-form, required by the alpha families
    """

    ALLOWED_MASKS = {
        'quasi_alpha': (DegreeMask.none(), DegreeMask.bracket(5)),
        'alpha': (DegreeMask.none(), DegreeMask.bracket(5)),
        'plain': (DegreeMask.bracket(1), DegreeMask.bracket(1, 3)),
    }

    def __init__(self, family, mask=None, alpha=None):
        if family not in FAMILIES:
            raise ValueError('unknown functional family {!r}, expected one of {}'.format(family, FAMILIES))
        if mask is None:
            mask = DegreeMask.bracket(1) if family == 'plain' else DegreeMask.none()
        if mask not in self.ALLOWED_MASKS[family]:
            raise ValueError('mask {} is not licensed for the {} family'.format(mask.label, family))
        if family != 'plain' and alpha is None:
            raise ValueError('the {} family needs an auxiliary 1-form'.format(family))
        self.family = family
        self.mask = mask
        self.alpha = getattr(alpha, 'field', alpha)

    @property
    def form_variant(self):
        return _FORM_OF_FAMILY[self.family]

    @property
    def label(self):
        return '{}[{}]'.format(self.family, self.mask.label)

    def target_degree(self, k):
        """Degree of the cubic term built from a degree-k component"""
        return 3*k - 1 if self.family == 'plain' else 3*k

    def linear_degree(self, k):
        """Degree of the linear term built from a degree-k component"""
        return k + 1 if self.family == 'plain' else k + 2

    def forbidden_degrees(self):
        return (2,) if self.family == 'plain' else (3, 9)

    def coclosed_degrees(self):
        if self.family == 'plain':
            return (3,) if self.mask == DegreeMask.bracket(1) else ()
        return (5,) if self.mask == DegreeMask.none() else ()

    def __repr__(self):
        return 'FunctionalVariant({})'.format(self.label)


def _field(A):
    return getattr(A, 'field', A)


def _cubic_and_linear(rho, variant, mask, alpha):
    D = dnabla(rho, mask)
    P = wedge_poly(rho, rho)
    if variant == 'plain':
        return act_poly(D, P), D
    if alpha is None:
        raise ValueError('integrability variant {} needs an auxiliary 1-form'.format(variant))
    aD = wedge_scalar(alpha, D)
    if variant == 'quasi_alpha':
        return act_poly(aD, P), aD
    if variant == 'alpha_left':
        return wedge_scalar(alpha, act_poly(D, P)), aD
    raise ValueError('unknown integrability variant {!r}, expected one of {}'.format(variant, FORM_VARIANTS))


def integrability_form(rho, variant, mask=None, alpha=None):
    """
    Integrability quantity of a tangent-valued form

    plain:       d rho ^ (rho ^ rho) - d rho
    quasi_alpha: (alpha ^ d rho) ^ (rho ^ rho) - alpha ^ d rho
    alpha_left:  alpha ^ (d rho ^ (rho ^ rho) - d rho)

    Args:
        rho (FormField or ACStructure): tangent-valued k-form
        variant (str): 'plain', 'quasi_alpha' or 'alpha_left'
        mask (DegreeMask, default=None): mask applied to d
        alpha (AuxiliaryOneForm or FormField, default=None): required by the alpha variants

    Returns:
        I (GradedField): cubic term in degree 3k - 1 (plain) or 3k, linear term in degree k + 1 or k + 2;
            degrees above n drop out
    """
    rho = _field(rho)
    cubic, linear = _cubic_and_linear(rho, variant, mask, _field(alpha))
    return GradedField.from_fields(rho.geometry, [f for f in (cubic, -linear) if f.coeffs.shape[1]])


def decomposition_check(A, alpha):
    """
    Residuals of I_{alpha, A} = 1/3 I^alpha_A - 2/3 alpha ^ d A and of
    alpha ^ (dA ^ (A ^ A)) = 1/3 (alpha ^ dA) ^ (A ^ A)

    Both residual fields coincide identically; they vanish when dA = 0 or
    when A is a multiple of the identity, not for general A.

    Args:
        A (ACStructure or FormField): degree-1 tangent field
        alpha (AuxiliaryOneForm or FormField): closed scalar 1-form

    Returns:
        decomposition (float): sup-norm residual of the decomposition
        product_rule (float): sup-norm residual of the product identity
    """
    A = _field(A)
    alpha = _field(alpha)
    D = dnabla(A)
    P = wedge_poly(A, A)
    aD = wedge_scalar(alpha, D)
    mixed = act_poly(aD, P)
    left = wedge_scalar(alpha, act_poly(D, P))
    I_alpha_left = left - aD
    I_quasi = mixed - aD
    decomposition = I_alpha_left - ((1./3.)*I_quasi - (2./3.)*aD)
    product_rule = left - (1./3.)*mixed
    return decomposition.sup_norm(), product_rule.sup_norm()


def graded_integrability(gamma, variant, split=False):
    """
    Degree-wise sum of the integrability quantity of the family

    Args:
        gamma (GradedField): graded field
        variant (FunctionalVariant): family, mask and alpha
        split (bool, default=False): drop the cubic term of even-degree components,
            which vanishes since even-degree forms square to zero

    Returns:
        I (GradedField): mixed-degree result
    """
    total = GradedField(gamma.geometry)
    for k in gamma.degrees:
        rho = gamma.component(k)
        if split and k % 2 == 0:
            _, linear = _cubic_and_linear(rho, variant.form_variant, variant.mask, variant.alpha)
            if linear.coeffs.shape[1]:
                total = total - GradedField(gamma.geometry, {linear.degree: linear})
            continue
        total = total + integrability_form(rho, variant.form_variant, variant.mask, variant.alpha)
    return total


def functional_value(gamma, variant):
    """
    <<I_gamma, gamma>> for the family of variant

    Args:
        gamma (GradedField): graded field on a torus
        variant (FunctionalVariant): functional

    Returns:
        value (float): functional value

    Raises:
        IntegrationUnsupportedError: non-periodic chart
    """
    gamma.geometry.require_integration()
    return l2_inner(graded_integrability(gamma, variant), gamma)


class LinearizedMaps(object):
    """
    Pointwise linear bundle maps of the variation of one degree-k component

    L(x): the cubic term as a function of x = d gamma_k, degree k + 1 -> target
    M(b): the cubic term as a function of b entering (gamma_k ^ gamma_k), degree k -> target
    N(x): the linear term as a function of x = d gamma_k, degree k + 1 -> k + 1 or k + 2

    Data Members:
        degree (int): source degree k
        target (int): degree of the cubic term
    """

    def __init__(self, gamma_k, variant):
        self.degree = gamma_k.degree
        self.target = variant.target_degree(self.degree)
        self.family = variant.family
        self.alpha = variant.alpha
        self.gamma_k = gamma_k
        self.D = dnabla(gamma_k, variant.mask)
        self.P = wedge_poly(gamma_k, gamma_k)

    def _cubic(self, x, P):
        if self.family == 'plain':
            return act_poly(x, P)
        if self.family == 'quasi_alpha':
            return act_poly(wedge_scalar(self.alpha, x), P)
        return wedge_scalar(self.alpha, act_poly(x, P))

    def L(self, x):
        return self._cubic(x, self.P)

    def M(self, b):
        return self._cubic(self.D, wedge_poly(b, self.gamma_k) + wedge_poly(self.gamma_k, b))

    def N(self, x):
        if self.family == 'plain':
            return x
        return wedge_scalar(self.alpha, x)


def el_derivative(gamma, variant):
    """
    L2 gradient of the functional,
    grad_k = [I_gamma]_k + delta(L* gamma_q) + M* gamma_q - delta(N* gamma_r)
    with q the cubic and r the linear target degree of a degree-k component

    Args:
        gamma (GradedField): graded field on a torus with the Levi-Civita connection
        variant (FunctionalVariant): functional

    Returns:
        gradient (GradedField): components in every degree 0..n

    Raises:
        IntegrationUnsupportedError: non-periodic chart
        MetricConnectionError: non-metric connection
    """
    geom = gamma.geometry
    geom.require_integration()
    mask = variant.mask
    I = graded_integrability(gamma, variant)
    grad = {}
    for k in range(geom.n + 1):
        maps = LinearizedMaps(gamma.component(k), variant)
        term = I.component(k)
        if gamma.has(maps.target) and gamma.has(k):
            eta = gamma.component(maps.target)
            term = term + codifferential(pointwise_adjoint(maps.L, k + 1, TANGENT, eta), mask)
            term = term + pointwise_adjoint(maps.M, k, TANGENT, eta)
        r = variant.linear_degree(k)
        if gamma.has(r):
            eta = gamma.component(r)
            if variant.family != 'plain':
                eta = pointwise_adjoint(maps.N, k + 1, TANGENT, eta)
            term = term - codifferential(eta, mask)
        grad[k] = term
    return GradedField(geom, grad)


def richardson(steps, estimates):
    """
    Extrapolate central-difference estimates with error expansion in t^2 to t = 0

    Args:
        steps (sequence of float): distinct step sizes
        estimates (sequence of float): estimates at those steps

    Returns:
        value (float): extrapolated estimate
    """
    h = np.asarray(steps, dtype=np.float64)**2
    table = [float(e) for e in estimates]
    for level in range(1, len(table)):
        table = [(h[i]*table[i + 1] - h[i + level]*table[i])/(h[i] - h[i + level]) for i in range(len(table) - 1)]
    return table[0]


def first_variation_check(gamma, beta, variant, steps=(1e-2, 5e-3)):
    """
    Compare <<grad, beta>> with extrapolated central differences of the functional along beta

    Args:
        gamma, beta (GradedField): base point and direction
        variant (FunctionalVariant): functional
        steps (sequence of float, default=(1e-2, 5e-3)): step sizes

    Returns:
        analytic (float): <<el_derivative(gamma), beta>>
        numeric (float): Richardson-extrapolated difference quotient
        rel_err (float): relative discrepancy
    """
    if beta.sup_norm() == 0.:
        return 0., 0., 0.
    analytic = l2_inner(el_derivative(gamma, variant), beta)
    estimates = []
    for t in steps:
        plus = functional_value(gamma + t*beta, variant)
        minus = functional_value(gamma - t*beta, variant)
        estimates.append((plus - minus)/(2.*t))
    numeric = richardson(steps, estimates)
    scale = max(abs(analytic), abs(numeric))
    rel_err = abs(analytic - numeric)/scale if scale > 0. else 0.
    logger.debug('first variation %s: analytic %.12e numeric %.12e rel %.3e', variant.label, analytic, numeric, rel_err)
    return analytic, numeric, rel_err


def _weight_matrices(geometry, degree, kind):
    # quadrature weight times the pointwise fiber Gram matrix
    F = orthonormal_frame(geometry).fiber_transform(degree, kind)
    return (geometry.weights*geometry.vol_density)[:, None, None]*np.einsum('Nab,Nac->Nbc', F, F)


def project_coclosed(field, tol=1e-8, maxiter=200):
    """
    Remove the d-exact part of a form so that its codifferential vanishes,
    field - d u with delta d u = delta field solved by conjugate gradients

    Args:
        field (FormField): k-form on a torus
        tol (float, default=1e-8): sup-norm tolerance on the codifferential of the result
        maxiter (int, default=200): iteration cap

    Returns:
        projected (FormField): co-closed k-form

    Raises:
        ProjectionError: tolerance not reached
    """
    geom = field.geometry
    geom.require_integration()
    start = codifferential(field)
    if start.sup_norm() <= tol:
        return field
    shape = start.coeffs.shape
    W = _weight_matrices(geom, field.degree - 1, field.kind)

    def weighted(coeffs):
        return np.einsum('Nab,Nb->Na', W, coeffs.reshape(shape[0], -1)).reshape(-1)

    def matvec(x):
        u = FormField(geom, field.degree - 1, field.kind, np.asarray(x).reshape(shape))
        return weighted(codifferential(dnabla(u)).coeffs)

    size = int(np.prod(shape))
    operator = LinearOperator((size, size), matvec=matvec, dtype=np.float64)
    iterations = [0]

    def count(_):
        iterations[0] += 1

    solution, info = cg(operator, weighted(start.coeffs), rtol=1e-12, maxiter=maxiter, callback=count)
    u = FormField(geom, field.degree - 1, field.kind, solution.reshape(shape))
    projected = field - dnabla(u)
    residual = codifferential(projected).sup_norm()
    logger.debug('co-closed projection of degree %d: %d iterations, info %d, residual %.3e',
                 field.degree, iterations[0], info, residual)
    if residual > tol:
        raise ProjectionError(residual, iterations[0])
    return projected


def restrict_domain(gamma, variant, tol=1e-8, maxiter=200):
    """
    Map a graded field into the intermediary domain of the variant:
    forbidden degrees zeroed, co-closed degrees projected onto the kernel of the codifferential

    Args:
        gamma (GradedField): graded field
        variant (FunctionalVariant): functional
        tol (float, default=1e-8): projection tolerance
        maxiter (int, default=200): conjugate gradient cap

    Returns:
        restricted (GradedField): field satisfying the constraints
    """
    out = gamma.without(*variant.forbidden_degrees())
    for degree in variant.coclosed_degrees():
        if out.has(degree):
            out = out.with_component(degree, project_coclosed(out.component(degree), tol, maxiter))
    return out


def domain_residual(gamma, variant):
    """Largest violation of the domain constraints of variant"""
    residual = 0.
    for degree in variant.forbidden_degrees():
        if gamma.has(degree):
            residual = max(residual, gamma.component(degree).sup_norm())
    for degree in variant.coclosed_degrees():
        if gamma.has(degree):
            residual = max(residual, codifferential(gamma.component(degree)).sup_norm())
    return residual


class FlowState(object):
    """
    Snapshot of a gradient flow

    Data Members:
        step (int): step index, 0 for the initial state
        field (GradedField): current field
        value (float): functional value
        residual (float): L2 norm of the gradient that produced this state
    """

    def __init__(self, step, field, value, residual):
        self.step = step
        self.field = field
        self.value = value
        self.residual = residual


def flow_step(gamma, variant, dt, step=1, restrict=False):
    """
    One explicit Euler step gamma - dt grad

    Args:
        gamma (GradedField): current field
        variant (FunctionalVariant): functional
        dt (float): non-negative step size
        step (int, default=1): step index reported on divergence
        restrict (bool, default=False): map the result back into the intermediary domain

    Returns:
        state (FlowState): new field, its functional value and the gradient norm

    Raises:
        FlowDivergenceError: non-finite values
    """
    if dt < 0.:
        raise ValueError('flow step needs dt >= 0, got {}'.format(dt))
    with np.errstate(over='ignore', invalid='ignore'):
        grad = el_derivative(gamma, variant)
        if not grad.is_finite():
            raise FlowDivergenceError(step)
        new = gamma - dt*grad
        if not new.is_finite():
            raise FlowDivergenceError(step)
        if restrict:
            new = restrict_domain(new, variant)
        value = functional_value(new, variant)
        residual = l2_norm(grad)
    if not (np.isfinite(value) and np.isfinite(residual)):
        raise FlowDivergenceError(step)
    return FlowState(step, new, value, residual)


def flow(gamma, variant, dt, steps, restrict=True):
    """
    Explicit Euler gradient flow

    Args:
        gamma (GradedField): initial field, restricted first when restrict is set
        variant (FunctionalVariant): functional
        dt (float): step size
        steps (int): number of steps
        restrict (bool, default=True): stay in the intermediary domain

    Returns:
        trace (list of FlowState): initial state followed by one state per step
    """
    if restrict:
        gamma = restrict_domain(gamma, variant)
    trace = [FlowState(0, gamma, functional_value(gamma, variant), float('nan'))]
    for step in range(1, steps + 1):
        state = flow_step(trace[-1].field, variant, dt, step, restrict)
        logger.info('flow %s step %d: value %.6e gradient %.3e', variant.label, step, state.value, state.residual)
        trace.append(state)
    return trace


class ClassificationReport(object):
    """
    Residuals and verdicts of the structure classes of an almost-complex structure

    Data Members:
        residuals (dict str -> float): sup-norm residual per class
        l2_residuals (dict str -> float or None): L2 residuals on tori, None elsewhere
        tolerance (float): verdict threshold
        verdicts (dict str -> bool): residual <= tolerance
        lattice_violations (list of str): implications that fail on the verdicts
    """

    NAMES = ('special', 'alpha_special', 'integrable', 'alpha_integrable', 'quasi_alpha_integrable',
             'kahler', 'orthogonal')

    # (premises, conclusion) on verdicts
    IMPLICATIONS = (
        (('kahler',), 'special'),
        (('special',), 'alpha_special'),
        (('special',), 'quasi_alpha_integrable'),
        (('special',), 'integrable'),
        (('special',), 'alpha_integrable'),
        (('alpha_special',), 'quasi_alpha_integrable'),
        (('alpha_special',), 'alpha_integrable'),
        (('quasi_alpha_integrable', 'alpha_integrable'), 'alpha_special'),
        (('integrable',), 'alpha_integrable'),
    )

    def __init__(self, residuals, l2_residuals, tolerance):
        self.residuals = residuals
        self.l2_residuals = l2_residuals
        self.tolerance = tolerance
        self.verdicts = {name: bool(residuals[name] <= tolerance) for name in self.NAMES}
        self.lattice_violations = []
        for premises, conclusion in self.IMPLICATIONS:
            if all(self.verdicts[p] for p in premises) and not self.verdicts[conclusion]:
                self.lattice_violations.append('{} => {}'.format(' & '.join(premises), conclusion))
        for violation in self.lattice_violations:
            logger.warning('lattice implication fails on computed verdicts: %s', violation)

    def to_dict(self):
        return {
            'tolerance': self.tolerance,
            'residuals': dict(self.residuals),
            'l2_residuals': dict(self.l2_residuals),
            'verdicts': dict(self.verdicts),
            'lattice_violations': list(self.lattice_violations),
        }


def classification_tolerance(geometry, scale=1e-3):
    return max(1e-8, scale*float(np.max(geometry.spacing))**2)


def _node_residual_norm(samples, valid, geometry):
    norms = np.sqrt(np.sum(samples.reshape(samples.shape[0], -1)**2, axis=1))
    sup = float(np.max(norms[valid])) if np.any(valid) else 0.
    l2 = float(np.sqrt(geometry.integrate(norms**2))) if geometry.integrable else None
    return sup, l2


def classify(A, alpha, geom=None, tol_scale=1e-3):
    """
    Residuals of every structure class and the verdicts at tolerance max(1e-8, tol_scale h^2)

    Args:
        A (ACStructure): almost-complex structure
        alpha (AuxiliaryOneForm): closed scalar 1-form
        geom (ChartGeometry, default=None): geometry of A, checked for identity when given
        tol_scale (float, default=1e-3): constant in front of h^2

    Returns:
        report (ClassificationReport): residuals, verdicts and lattice violations
    """
    field = _field(A)
    geometry = field.geometry
    if geom is not None and geom is not geometry:
        raise GeometryMismatchError('structure is sampled on another geometry')
    a = _field(alpha)
    D = dnabla(field)
    quantities = {
        'special': GradedField(geometry, {D.degree: D}),
        'alpha_special': GradedField.from_fields(geometry, [wedge_scalar(a, D)]),
        'integrable': integrability_form(field, 'plain'),
        'alpha_integrable': integrability_form(field, 'alpha_left', alpha=a),
        'quasi_alpha_integrable': integrability_form(field, 'quasi_alpha', alpha=a),
    }
    residuals = {}
    l2_residuals = {}
    for name, value in quantities.items():
        residuals[name] = value.sup_norm()
        l2_residuals[name] = l2_norm(value) if geometry.integrable else None

    nabla_A, valid = cov_derivative(field)
    residuals['kahler'], l2_residuals['kahler'] = _node_residual_norm(nabla_A, valid, geometry)
    mats = field.coeffs.transpose(0, 2, 1)
    defect = np.einsum('Nai,Nab,Nbj->Nij', mats, geometry.metric, mats) - geometry.metric
    residuals['orthogonal'], l2_residuals['orthogonal'] = _node_residual_norm(defect, field.valid, geometry)

    report = ClassificationReport(residuals, l2_residuals, classification_tolerance(geometry, tol_scale))
    logger.info('classified %s: %s', geometry.name, report.verdicts)
    return report


def canonical_extension(A, kind='zero', seed=0, scale=0.1):
    """
    Graded field with A in degree 1

    Args:
        A (ACStructure or FormField): degree-1 tangent field
        kind (str, default='zero'): 'zero' leaves every other degree empty,
            'random' fills them with smooth random fields
        seed (int, default=0): seed of the random extension
        scale (float, default=0.1): size of the random extension

    Returns:
        gamma (GradedField): the extension
    """
    field = _field(A)
    geom = field.geometry
    comps = {1: field}
    if kind == 'random':
        for k in range(geom.n + 1):
            if k != 1:
                comps[k] = random_smooth_field(geom, k, TANGENT, seed + 101*k, scale)
    elif kind != 'zero':
        raise ValueError('unknown extension kind {!r}'.format(kind))
    return GradedField(geom, comps)


PATH_KINDS = ('constant', 'conjugation', 'perturbation', 'dilation')


def make_path(kind, geom, J0=None, seed=0, epsilon=0.1, breakpoint=1.):
    """
    Sampled path t -> A_t of degree-1 tangent fields

    constant:     A_t = J0
    conjugation:  A_t = P_t J0 P_t^-1, P_t = exp(t K) for a random constant K
    perturbation: A_t = exp(-t eps S) J0 exp(t eps S)
    dilation:     A_t = s(t) J0 with s = 1 up to breakpoint, growing after it (leaves the structures)

    Args:
        kind (str): one of PATH_KINDS
        geom (ChartGeometry): sampling grid
        J0 (np.ndarray (n, n), default=None): base structure, standard when None
        seed (int, default=0): seed of K or S
        epsilon (float, default=0.1): perturbation rate
        breakpoint (float, default=1.): dilation onset

    Returns:
        path (callable): t -> FormField
    """
    n = geom.n
    J0 = standard_complex_structure(n) if J0 is None else np.asarray(J0, dtype=np.float64)

    def constant_field(M):
        return matrices_to_field(geom, np.broadcast_to(M, (geom.num_nodes, n, n)))

    if kind == 'constant':
        return lambda t: constant_field(J0)
    if kind == 'conjugation':
        K = 0.3*np.random.default_rng(seed).standard_normal((n, n))

        def conjugation(t):
            P = expm(t*K)
            return constant_field(P @ J0 @ np.linalg.inv(P))
        return conjugation
    if kind == 'perturbation':
        return lambda t: make_perturbed_ac(geom, J0, t*epsilon, seed).field
    if kind == 'dilation':
        return lambda t: constant_field((1. + max(0., t - breakpoint))*J0)
    raise ValueError('unknown path kind {!r}, expected one of {}'.format(kind, PATH_KINDS))


class ProbeTable(object):
    """
    Functional values and derivative estimates along a path of structures

    Data Members:
        t (np.ndarray (m, )): path parameters
        values (np.ndarray (m, )): functional of the extension at each t
        derivatives (np.ndarray (m, )): central-difference estimates of d/dt
        trend (str): 'increasing', 'flat' or 'decreasing' from the last derivative
        nonnegative_tail (bool): last derivative >= -tol
    """

    def __init__(self, t, values, derivatives, tol):
        self.t = t
        self.values = values
        self.derivatives = derivatives
        last = float(derivatives[-1])
        if last > tol:
            self.trend = 'increasing'
        elif last < -tol:
            self.trend = 'decreasing'
        else:
            self.trend = 'flat'
        self.nonnegative_tail = last >= -tol

    def rows(self):
        return list(zip(self.t.tolist(), self.values.tolist(), self.derivatives.tolist()))


def stability_probe(path, variant, t_samples, extension='zero', seed=0, scale=0.1, tol=1e-10, ac_tol=AC_TOLERANCE):
    """
    Exploratory probe of the asymptotic slope of the functional along a path of structures

    Args:
        path (callable): t -> FormField or ACStructure
        variant (FunctionalVariant): functional
        t_samples (sequence of float): strictly increasing, at least two
        extension (str, default='zero'): extension kind, the same seed at every t
        seed (int, default=0): extension seed
        scale (float, default=0.1): extension size
        tol (float, default=1e-10): slope below which the trend counts as flat
        ac_tol (float, default=AC_TOLERANCE): accepted A o A + Id residual

    Returns:
        table (ProbeTable): values, derivative estimates and tail trend

    Raises:
        ProbePathError: a sample is not almost-complex
    """
    t = np.asarray(t_samples, dtype=np.float64)
    if t.ndim != 1 or t.shape[0] < 2 or np.any(np.diff(t) <= 0.):
        raise ValueError('probe needs at least two strictly increasing t samples')
    values = []
    for ti in t:
        field = _field(path(float(ti)))
        residual = check_ac(field)
        if not residual <= ac_tol:
            raise ProbePathError(float(ti), residual)
        gamma = restrict_domain(canonical_extension(ACStructure(field, ac_tol, float(ti)), extension, seed, scale), variant)
        values.append(functional_value(gamma, variant))
        logger.info('probe %s t=%.6g value %.6e', variant.label, ti, values[-1])
    values = np.array(values)
    return ProbeTable(t, values, np.gradient(values, t), tol)
