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
Tests for the cubic functionals, their gradient flow, classification and the stability probe
Author: acvar developers
"""

import unittest

import numpy as np

from acvar.core.exceptions import (FlowDivergenceError, ProbePathError, GeometryMismatchError,
                                   IntegrationUnsupportedError)
from acvar.core.exterior_core import TANGENT
from acvar.core.geometry import (make_flat_torus, make_sphere_chart, random_smooth_field, standard_complex_structure,
                                 make_constant_ac, make_perturbed_ac, make_s6_octonionic_ac, make_alpha,
                                 matrices_to_field)
from acvar.core.calculus import DegreeMask
from acvar.core.integration import l2_norm, codifferential
from acvar.core.variational import (GradedField, FunctionalVariant, decomposition_check, functional_value,
                                    el_derivative, richardson, first_variation_check, project_coclosed,
                                    restrict_domain, domain_residual, flow, flow_step, classify,
                                    canonical_extension, make_path, stability_probe)
from acvar.verify import all_variants


class GradedFieldTests(unittest.TestCase):
    def setUp(self):
        self.geom = make_flat_torus(4, 4)
        self.a = random_smooth_field(self.geom, 1, TANGENT, seed=0)
        self.b = random_smooth_field(self.geom, 3, TANGENT, seed=1)

    def test_arithmetic(self):
        x = GradedField(self.geom, {1: self.a})
        y = GradedField(self.geom, {3: self.b})
        total = x + y
        self.assertEqual(total.degrees, [1, 3])
        self.assertEqual((total - y).component(3).sup_norm(), 0.)
        self.assertTrue(np.allclose((2.*total).component(1).coeffs, 2.*self.a.coeffs))
        self.assertTrue(np.allclose((-total).component(3).coeffs, -self.b.coeffs))
        self.assertEqual(total.without(1).degrees, [3])

    def test_missing_degree_is_zero(self):
        x = GradedField(self.geom, {1: self.a})
        self.assertFalse(x.has(2))
        self.assertEqual(x.component(2).sup_norm(), 0.)
        self.assertEqual(GradedField(self.geom).sup_norm(), 0.)

    def test_from_fields_adds(self):
        x = GradedField.from_fields(self.geom, [self.a, self.a])
        self.assertTrue(np.allclose(x.component(1).coeffs, 2.*self.a.coeffs))

    def test_geometry_checked(self):
        other = make_flat_torus(4, 4)
        with self.assertRaises(GeometryMismatchError):
            GradedField(self.geom, {1: self.a}) + GradedField(other, {1: random_smooth_field(other, 1, TANGENT, 0)})


class VariantTests(unittest.TestCase):
    def setUp(self):
        self.alpha = make_alpha(make_flat_torus(4, 4), axis=0)

    def test_masks_licensed(self):
        self.assertEqual(FunctionalVariant('plain').mask, DegreeMask.bracket(1))
        self.assertEqual(FunctionalVariant('alpha', alpha=self.alpha).mask, DegreeMask.none())
        with self.assertRaises(ValueError):
            FunctionalVariant('plain', DegreeMask.none())
        with self.assertRaises(ValueError):
            FunctionalVariant('quasi_alpha', DegreeMask.bracket(1), self.alpha)
        with self.assertRaises(ValueError):
            FunctionalVariant('quasi_alpha')
        with self.assertRaises(ValueError):
            FunctionalVariant('cubic')

    def test_degrees(self):
        plain = FunctionalVariant('plain')
        quasi = FunctionalVariant('quasi_alpha', alpha=self.alpha)
        self.assertEqual((plain.target_degree(1), plain.linear_degree(1)), (2, 2))
        self.assertEqual((quasi.target_degree(1), quasi.linear_degree(1)), (3, 3))
        self.assertEqual(plain.forbidden_degrees(), (2,))
        self.assertEqual(quasi.forbidden_degrees(), (3, 9))
        self.assertEqual(plain.coclosed_degrees(), (3,))
        self.assertEqual(FunctionalVariant('plain', DegreeMask.bracket(1, 3)).coclosed_degrees(), ())
        self.assertEqual(quasi.coclosed_degrees(), (5,))
        self.assertEqual(FunctionalVariant('alpha', DegreeMask.bracket(5), self.alpha).coclosed_degrees(), ())
        self.assertEqual(plain.label, 'plain[1]')


class DecompositionTests(unittest.TestCase):
    def setUp(self):
        self.geom = make_flat_torus(4, 6)
        self.alpha = make_alpha(self.geom, function='sin(x0) + 0.5*cos(x2)')

    def test_residuals_coincide(self):
        A = make_perturbed_ac(self.geom, epsilon=0.2, seed=5)
        decomposition, product_rule = decomposition_check(A, self.alpha)
        self.assertGreater(decomposition, 1e-6)
        self.assertLessEqual(abs(decomposition - product_rule), 1e-12*max(1., decomposition))

    def test_special_structure(self):
        J = make_constant_ac(self.geom, standard_complex_structure(4))
        self.assertEqual(decomposition_check(J, self.alpha), (0., 0.))

    def test_multiple_of_identity(self):
        x = self.geom.coords
        f = 1. + 0.3*np.sin(x[:, 1])
        A = matrices_to_field(self.geom, f[:, None, None]*np.eye(4))
        decomposition, product_rule = decomposition_check(A, self.alpha)
        self.assertLessEqual(decomposition, 1e-12)
        self.assertLessEqual(product_rule, 1e-12)


class FunctionalTests(unittest.TestCase):
    def setUp(self):
        self.geom = make_flat_torus(4, 6)
        self.alpha = make_alpha(self.geom, axis=0)
        self.A = make_perturbed_ac(self.geom, epsilon=0.2, seed=1)

    def test_degree_one_only_vanishes(self):
        gamma = canonical_extension(self.A)
        for variant in all_variants(self.alpha):
            self.assertEqual(functional_value(gamma, variant), 0.)

    def test_random_extension(self):
        gamma = canonical_extension(self.A, 'random', seed=3, scale=0.3)
        variant = FunctionalVariant('quasi_alpha', alpha=self.alpha)
        value = functional_value(gamma, variant)
        self.assertTrue(np.isfinite(value))
        self.assertNotEqual(value, 0.)
        self.assertEqual(functional_value(canonical_extension(self.A, 'random', seed=3, scale=0.3), variant), value)

    def test_sphere_rejected(self):
        geom = make_sphere_chart(6, 3, 0.2, np.full(6, 0.3))
        gamma = canonical_extension(make_s6_octonionic_ac(geom))
        with self.assertRaises(IntegrationUnsupportedError):
            functional_value(gamma, FunctionalVariant('plain'))

    def test_unknown_extension(self):
        with self.assertRaises(ValueError):
            canonical_extension(self.A, 'gaussian')


class GradientTests(unittest.TestCase):
    def setUp(self):
        self.geom = make_flat_torus(4, 6)
        self.alpha = make_alpha(self.geom, axis=0)

    def test_richardson_exact_on_even_polynomial(self):
        steps = (0.1, 0.05)
        estimates = [3. + 7.*t**2 for t in steps]
        self.assertAlmostEqual(richardson(steps, estimates), 3., places=12)

    def test_first_variation(self):
        A = make_perturbed_ac(self.geom, epsilon=0.2, seed=2)
        gamma = canonical_extension(A, 'random', seed=2, scale=0.3)
        beta = canonical_extension(random_smooth_field(self.geom, 1, TANGENT, seed=3, scale=0.3), 'random', 4, 0.3)
        for variant in all_variants(self.alpha):
            analytic, numeric, rel = first_variation_check(gamma, beta, variant)
            self.assertLessEqual(rel, 1e-5, msg='{}: {} vs {}'.format(variant.label, analytic, numeric))

    def test_zero_direction(self):
        gamma = canonical_extension(make_perturbed_ac(self.geom, epsilon=0.2, seed=2))
        self.assertEqual(first_variation_check(gamma, GradedField(self.geom), FunctionalVariant('plain')),
                         (0., 0., 0.))

    def test_constant_structure_is_critical(self):
        J = canonical_extension(make_constant_ac(self.geom, standard_complex_structure(4)))
        for variant in all_variants(self.alpha):
            self.assertLessEqual(el_derivative(J, variant).sup_norm(), 1e-8, msg=variant.label)

    def test_perturbed_structure_is_not_critical(self):
        A = canonical_extension(make_perturbed_ac(self.geom, epsilon=0.2, seed=2))
        self.assertGreater(l2_norm(el_derivative(A, FunctionalVariant('plain'))), 1e-3)


class DomainTests(unittest.TestCase):
    def setUp(self):
        self.geom = make_flat_torus(4, 6)

    def test_project_coclosed(self):
        field = random_smooth_field(self.geom, 3, TANGENT, seed=6)
        projected = project_coclosed(field, tol=1e-10)
        self.assertLessEqual(codifferential(projected).sup_norm(), 1e-10)
        self.assertGreater((projected - field).sup_norm(), 1e-6)
        again = project_coclosed(projected, tol=1e-10)
        self.assertLessEqual((again - projected).sup_norm(), 1e-8)

    def test_restrict_plain(self):
        gamma = canonical_extension(make_perturbed_ac(self.geom, epsilon=0.2, seed=7), 'random', seed=7, scale=0.3)
        variant = FunctionalVariant('plain')
        self.assertGreater(domain_residual(gamma, variant), 1e-3)
        restricted = restrict_domain(gamma, variant)
        self.assertFalse(restricted.has(2))
        self.assertLessEqual(domain_residual(restricted, variant), 1e-8)
        self.assertTrue(np.array_equal(restricted.component(1).coeffs, gamma.component(1).coeffs))

    def test_restrict_quasi(self):
        alpha = make_alpha(self.geom, axis=1)
        gamma = canonical_extension(make_perturbed_ac(self.geom, epsilon=0.2, seed=8), 'random', seed=8, scale=0.3)
        restricted = restrict_domain(gamma, FunctionalVariant('quasi_alpha', alpha=alpha))
        self.assertEqual(restricted.degrees, [0, 1, 2, 4])


class FlowTests(unittest.TestCase):
    def setUp(self):
        self.geom = make_flat_torus(4, 6)
        self.alpha = make_alpha(self.geom, axis=0)
        A = make_perturbed_ac(self.geom, epsilon=0.2, seed=9)
        self.gamma = canonical_extension(A, 'random', seed=9, scale=0.3)

    def test_energy_decreases(self):
        dt = 1e-3
        for family in ('quasi_alpha', 'alpha', 'plain'):
            variant = FunctionalVariant(family, alpha=self.alpha)
            trace = flow(self.gamma, variant, dt, 20)
            self.assertEqual(len(trace), 21)
            self.assertTrue(np.isnan(trace[0].residual))
            values = np.array([state.value for state in trace])
            self.assertTrue(np.all(np.diff(values) <= 10.*dt**2), msg=family)
            self.assertLessEqual(domain_residual(trace[-1].field, variant), 1e-8)

    def test_zero_step_is_identity(self):
        variant = FunctionalVariant('plain')
        state = flow_step(self.gamma, variant, 0.)
        self.assertEqual((state.field - self.gamma).sup_norm(), 0.)

    def test_negative_step_rejected(self):
        with self.assertRaises(ValueError):
            flow_step(self.gamma, FunctionalVariant('plain'), -1e-3)

    def test_divergence_reported(self):
        variant = FunctionalVariant('quasi_alpha', alpha=self.alpha)
        with self.assertRaises(FlowDivergenceError) as ctx:
            flow(self.gamma, variant, 1e6, 50, restrict=False)
        self.assertGreaterEqual(ctx.exception.step, 1)


class ClassifyTests(unittest.TestCase):
    def test_constant_structure(self):
        geom = make_flat_torus(4, 6)
        report = classify(make_constant_ac(geom, standard_complex_structure(4)), make_alpha(geom, axis=0), geom)
        self.assertTrue(all(report.verdicts.values()))
        self.assertEqual(report.lattice_violations, [])
        self.assertEqual(sorted(report.to_dict()['verdicts']), sorted(report.NAMES))

    def test_perturbed_structure(self):
        geom = make_flat_torus(4, 6)
        report = classify(make_perturbed_ac(geom, epsilon=0.2, seed=1), make_alpha(geom, axis=0))
        self.assertFalse(report.verdicts['special'])
        self.assertFalse(report.verdicts['kahler'])
        self.assertFalse(report.verdicts['integrable'])
        self.assertIsNotNone(report.l2_residuals['integrable'])

    def test_octonionic_sphere(self):
        geom = make_sphere_chart(6, 5, 0.1, np.full(6, 0.3))
        report = classify(make_s6_octonionic_ac(geom), make_alpha(geom, axis=0))
        self.assertFalse(report.verdicts['integrable'])
        self.assertTrue(report.verdicts['orthogonal'])
        self.assertIsNone(report.l2_residuals['special'])

    def test_geometry_checked(self):
        geom = make_flat_torus(4, 6)
        with self.assertRaises(GeometryMismatchError):
            classify(make_constant_ac(geom, standard_complex_structure(4)), make_alpha(geom, axis=0),
                     make_flat_torus(4, 6))


class ProbeTests(unittest.TestCase):
    def setUp(self):
        self.geom = make_flat_torus(4, 6)
        self.variant = FunctionalVariant('quasi_alpha', alpha=make_alpha(self.geom, axis=0))

    def test_constant_path_flat(self):
        table = stability_probe(make_path('constant', self.geom), self.variant, [0., 0.5, 1.])
        self.assertTrue(np.all(table.derivatives == 0.))
        self.assertEqual(table.trend, 'flat')
        self.assertTrue(table.nonnegative_tail)
        self.assertEqual(len(table.rows()), 3)

    def test_conjugation_deterministic(self):
        t = [0., 0.25, 0.5]
        first = stability_probe(make_path('conjugation', self.geom, seed=4), self.variant, t, 'random', 4, 0.2)
        second = stability_probe(make_path('conjugation', self.geom, seed=4), self.variant, t, 'random', 4, 0.2)
        self.assertTrue(np.array_equal(first.values, second.values))
        self.assertTrue(np.all(np.isfinite(first.derivatives)))

    def test_dilation_leaves_structures(self):
        path = make_path('dilation', self.geom, breakpoint=0.5)
        with self.assertRaises(ProbePathError) as ctx:
            stability_probe(path, self.variant, [0., 0.25, 0.5, 0.75])
        self.assertEqual(ctx.exception.t, 0.75)

    def test_samples_checked(self):
        path = make_path('constant', self.geom)
        with self.assertRaises(ValueError):
            stability_probe(path, self.variant, [0.])
        with self.assertRaises(ValueError):
            stability_probe(path, self.variant, [0., 0.5, 0.5])
        with self.assertRaises(ValueError):
            make_path('spiral', self.geom)


if __name__ == '__main__':
    unittest.main()
