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
Tests for metric pairings, the Hodge star, L2 products and the codifferential
Author: acvar developers
"""

import unittest

import numpy as np

from acvar.core.exceptions import (IntegrationUnsupportedError, MetricConnectionError, GeometryMismatchError,
                                   DimensionMismatchError)
from acvar.core.exterior_core import FormField, SCALAR, TANGENT, polyvector, wedge_scalar
from acvar.core.geometry import (make_flat_torus, make_warped_torus, make_sphere_chart, random_connection,
                                 random_smooth_field)
from acvar.core.calculus import DegreeMask
from acvar.core.integration import (compound, fiber_gram, orthonormal_frame, wedge_g, fiber_inner, hodge_star,
                                    degree_inner, l2_inner, l2_norm, codifferential, pointwise_adjoint)
from acvar.verify import adjointness_error, order_check


class CompoundTests(unittest.TestCase):
    def test_cauchy_binet(self):
        rng = np.random.default_rng(0)
        A, B = rng.standard_normal((2, 3, 4, 4))
        for k in (0, 1, 2, 3):
            self.assertTrue(np.allclose(compound(A @ B, k), compound(A, k) @ compound(B, k)))
        self.assertTrue(np.allclose(compound(A, 1), A))

    def test_gram_limits(self):
        geom = make_flat_torus(2, 4)
        self.assertTrue(np.allclose(fiber_gram(geom, 2).matrices, 1.))
        self.assertIs(fiber_gram(geom, 2), fiber_gram(geom, 2))


class HodgeTests(unittest.TestCase):
    def setUp(self):
        self.geom = make_warped_torus(4, 6, amplitude=0.3)

    def test_frame_orthonormal(self):
        frame = orthonormal_frame(self.geom)
        self.assertLessEqual(frame.orthonormality_residual(), 1e-12)

    def test_frame_transform_gram(self):
        a = random_smooth_field(self.geom, 2, TANGENT, seed=1)
        b = random_smooth_field(self.geom, 2, TANGENT, seed=2)
        F = orthonormal_frame(self.geom).fiber_transform(2, TANGENT)
        fa = np.einsum('Nab,Nb->Na', F, a.coeffs.reshape(self.geom.num_nodes, -1))
        fb = np.einsum('Nab,Nb->Na', F, b.coeffs.reshape(self.geom.num_nodes, -1))
        self.assertTrue(np.allclose(np.sum(fa*fb, axis=1), fiber_inner(a, b).coeffs[:, 0, 0]))

    def test_defining_property(self):
        for trial in range(10):
            k = trial % 5
            kind = (SCALAR, TANGENT, polyvector(2))[trial % 3]
            a = random_smooth_field(self.geom, k, kind, seed=10 + trial)
            b = random_smooth_field(self.geom, k, kind, seed=20 + trial)
            top = wedge_g(a, hodge_star(b)).coeffs[:, 0, 0]
            expected = fiber_inner(a, b).coeffs[:, 0, 0]*self.geom.vol_density
            self.assertLessEqual(np.max(np.abs(top - expected)), 1e-10*max(1., np.max(np.abs(expected))))

    def test_double_star(self):
        for k in range(5):
            a = random_smooth_field(self.geom, k, TANGENT, seed=k)
            sign = (-1.)**(k*(4 - k))
            self.assertLessEqual((hodge_star(hodge_star(a)) - sign*a).sup_norm(), 1e-10*max(1., a.sup_norm()))

    def test_paths_agree(self):
        a = random_smooth_field(self.geom, 3, TANGENT, seed=3)
        b = random_smooth_field(self.geom, 3, TANGENT, seed=4)
        star = degree_inner(a, b, 'star')
        self.assertAlmostEqual(star, degree_inner(a, b, 'fiber'), delta=1e-10*max(1., abs(star)))
        with self.assertRaises(ValueError):
            degree_inner(a, b, 'spectral')

    def test_pairing_kind_mismatch(self):
        a = random_smooth_field(self.geom, 1, TANGENT, seed=5)
        b = random_smooth_field(self.geom, 1, SCALAR, seed=6)
        with self.assertRaises(DimensionMismatchError):
            wedge_g(a, b)


class L2Tests(unittest.TestCase):
    def test_norm_of_constant(self):
        geom = make_flat_torus(2, 6)
        one = FormField(geom, 0, SCALAR, np.ones((geom.num_nodes, 1, 1)))
        self.assertAlmostEqual(l2_norm(one), 2.*np.pi, places=12)

    def test_sphere_rejected(self):
        geom = make_sphere_chart(2, 5, 0.5)
        a = random_smooth_field(geom, 1, TANGENT, seed=0)
        with self.assertRaises(IntegrationUnsupportedError) as ctx:
            l2_inner(a, a)
        self.assertIn('integration unsupported', str(ctx.exception))

    def test_geometry_mismatch(self):
        a = random_smooth_field(make_flat_torus(2, 6), 1, TANGENT, seed=0)
        b = random_smooth_field(make_flat_torus(2, 6), 1, TANGENT, seed=0)
        with self.assertRaises(GeometryMismatchError):
            l2_inner(a, b)

    def test_missing_degrees_count_as_zero(self):
        geom = make_flat_torus(2, 6)
        a = random_smooth_field(geom, 1, TANGENT, seed=0)
        b = random_smooth_field(geom, 2, TANGENT, seed=1)
        self.assertEqual(l2_inner(a, b), 0.)


class CodifferentialTests(unittest.TestCase):
    def test_exact_adjoint_on_flat_torus(self):
        geom = make_flat_torus(4, 6)
        for k in (1, 2, 3, 4):
            self.assertLessEqual(adjointness_error(geom, k, seed=k), 1e-12)

    def test_adjoint_order_on_warped_torus(self):
        errors = [adjointness_error(make_warped_torus(4, res), 2, seed=7) for res in (8, 16)]
        self.assertTrue(order_check('adjointness on warped torus', *errors).passed)

    def test_delta_squared(self):
        geom = make_flat_torus(4, 6)
        b = random_smooth_field(geom, 3, TANGENT, seed=2)
        self.assertLessEqual(codifferential(codifferential(b)).sup_norm(), 1e-10)

    def test_mask_and_range(self):
        geom = make_flat_torus(4, 6)
        b = random_smooth_field(geom, 3, TANGENT, seed=2)
        self.assertEqual(codifferential(b, DegreeMask.bracket(3)).sup_norm(), 0.)
        self.assertGreater(codifferential(b, DegreeMask.bracket(5)).sup_norm(), 0.)
        zero = codifferential(random_smooth_field(geom, 0, TANGENT, seed=2))
        self.assertEqual(zero.degree, -1)
        self.assertEqual(zero.coeffs.shape[1], 0)

    def test_requires_metric_connection(self):
        geom = random_connection(make_flat_torus(2, 6), seed=0)
        with self.assertRaises(MetricConnectionError):
            codifferential(random_smooth_field(geom, 1, TANGENT, seed=0))


class AdjointTests(unittest.TestCase):
    def test_pointwise_adjoint(self):
        geom = make_warped_torus(4, 5)
        beta = random_smooth_field(geom, 1, SCALAR, seed=1)

        def L(x):
            return wedge_scalar(beta, x)
        x = random_smooth_field(geom, 1, TANGENT, seed=2)
        eta = random_smooth_field(geom, 2, TANGENT, seed=3)
        left = degree_inner(L(x), eta)
        right = degree_inner(x, pointwise_adjoint(L, 1, TANGENT, eta))
        self.assertAlmostEqual(left, right, delta=1e-10*max(1., abs(left)))

    def test_adjoint_type_checked(self):
        geom = make_flat_torus(2, 4)
        beta = random_smooth_field(geom, 1, SCALAR, seed=1)
        eta = random_smooth_field(geom, 2, TANGENT, seed=3)
        with self.assertRaises(DimensionMismatchError):
            pointwise_adjoint(lambda x: wedge_scalar(beta, x), 0, TANGENT, eta)


if __name__ == '__main__':
    unittest.main()
