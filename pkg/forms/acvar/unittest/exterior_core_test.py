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
Tests for the pointwise algebra of bundle-valued forms
Author: acvar developers
"""

import unittest
import time

import numba
import numpy as np

from acvar.core.exceptions import DimensionMismatchError, UnsupportedKindError, GeometryMismatchError
from acvar.core.exterior_core import (PointForm, FormField, SCALAR, TANGENT, ENDOMORPHISM, polyvector, n_components,
                                      multi_indices, canonicalize, evaluate, wedge_scalar, wedge_end, act_end,
                                      wedge_poly, act_poly, left_right_associator, lift)
from acvar.core.geometry import make_flat_torus, random_smooth_field
from acvar.verify import (product_oracle_errors, anticommutation_error, even_square_norm, module_axiom_witness,
                          batch_geometry, random_batch, oracle_act_poly)


class CombinatoricsTests(unittest.TestCase):
    def test_multi_indices(self):
        self.assertEqual(multi_indices(4, 2), ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))
        self.assertEqual(n_components(4, 5), 0)
        self.assertEqual(multi_indices(3, 0), ((),))

    def test_canonicalize(self):
        self.assertEqual(canonicalize((2, 0, 1), 3), ((0, 1, 2), 1))
        self.assertEqual(canonicalize((1, 0), 3), ((0, 1), -1))
        self.assertEqual(canonicalize((1, 1), 3)[1], 0)

    def test_canonicalize_out_of_range(self):
        with self.assertRaises(IndexError):
            canonicalize((0, 3), 3)

    def test_value_kinds(self):
        self.assertIs(polyvector(1), TANGENT)
        self.assertEqual(polyvector(2).fiber_dim(4), 6)
        self.assertEqual(ENDOMORPHISM.fiber_dim(4), 16)
        with self.assertRaises(UnsupportedKindError):
            polyvector(3)


class PointFormTests(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(12345)
        self.n = 4

    def test_shape_checked(self):
        with self.assertRaises(DimensionMismatchError):
            PointForm(self.n, 2, TANGENT, np.zeros((5, 4)))

    def test_component_antisymmetry(self):
        form = PointForm(self.n, 2, TANGENT, self.rng.standard_normal((6, 4)))
        self.assertTrue(np.allclose(form.component((2, 1)), -form.component((1, 2))))
        self.assertTrue(np.allclose(form.component((3, 3)), 0.))

    def test_evaluate_multilinear(self):
        form = PointForm(self.n, 2, SCALAR, self.rng.standard_normal((6, 1)))
        v, w, u = self.rng.standard_normal((3, self.n))
        left = evaluate(form, [2.*v + u, w]).data
        right = 2.*evaluate(form, [v, w]).data + evaluate(form, [u, w]).data
        self.assertTrue(np.allclose(left, right, atol=1e-12))
        self.assertTrue(np.allclose(evaluate(form, [v, v]).data, 0., atol=1e-12))
        self.assertTrue(np.allclose(evaluate(form, [np.eye(4)[0], np.eye(4)[2]]).data, form.coeffs[1]))

    def test_endomorphism_value_matrix(self):
        form = PointForm(self.n, 1, ENDOMORPHISM, self.rng.standard_normal((4, 16)))
        value = evaluate(form, [np.eye(4)[3]])
        self.assertTrue(np.allclose(value.as_matrix(), form.coeffs[3].reshape(4, 4)))
        with self.assertRaises(UnsupportedKindError):
            evaluate(PointForm.zeros(self.n, 1, TANGENT), [np.ones(4)]).as_matrix()

    def test_evaluate_wrong_arity(self):
        form = PointForm.zeros(self.n, 2, SCALAR)
        with self.assertRaises(DimensionMismatchError):
            evaluate(form, [np.ones(4)])

    def test_arithmetic_checks_degree(self):
        a = PointForm.zeros(self.n, 1, TANGENT)
        b = PointForm.zeros(self.n, 2, TANGENT)
        with self.assertRaises(DimensionMismatchError):
            a + b

    def test_square_of_one_form(self):
        # (A ^ A)(X, Y) = A(X) ^ A(Y) as a bivector
        A = PointForm(self.n, 1, TANGENT, self.rng.standard_normal((4, 4)))
        square = wedge_poly(A, A)
        X, Y = A.coeffs[0], A.coeffs[2]
        expected = np.array([X[c]*Y[d] - X[d]*Y[c] for c, d in multi_indices(self.n, 2)])
        self.assertTrue(np.allclose(square.component((0, 2)), expected, atol=1e-12))

    def test_degree_overflow_is_zero_form(self):
        a = PointForm(self.n, 3, SCALAR, self.rng.standard_normal((4, 1)))
        b = PointForm(self.n, 2, TANGENT, self.rng.standard_normal((6, 4)))
        product = wedge_scalar(a, b)
        self.assertEqual(product.degree, 5)
        self.assertEqual(product.coeffs.shape, (0, 4))

    def test_kind_checks(self):
        a = PointForm.zeros(self.n, 1, TANGENT)
        with self.assertRaises(DimensionMismatchError):
            wedge_scalar(a, a)
        with self.assertRaises(DimensionMismatchError):
            wedge_end(a, a)
        with self.assertRaises(DimensionMismatchError):
            act_end(PointForm.zeros(self.n, 1, ENDOMORPHISM), PointForm.zeros(self.n, 1, SCALAR))

    def test_polyvector_overflow(self):
        a = PointForm.zeros(self.n, 1, polyvector(2))
        with self.assertRaises(UnsupportedKindError):
            wedge_poly(a, PointForm.zeros(self.n, 1, TANGENT))

    def test_act_poly_below_slots(self):
        rho = PointForm(self.n, 1, TANGENT, self.rng.standard_normal((4, 4)))
        gamma = PointForm(self.n, 1, polyvector(2), self.rng.standard_normal((4, 6)))
        product = act_poly(rho, gamma)
        self.assertEqual(product.degree, 0)
        self.assertTrue(np.allclose(product.coeffs, 0.))

    def test_endomorphism_identity_acts_trivially(self):
        eye = PointForm(self.n, 0, ENDOMORPHISM, np.eye(self.n).reshape(1, -1))
        rho = PointForm(self.n, 2, TANGENT, self.rng.standard_normal((6, 4)))
        self.assertTrue(np.allclose(act_end(eye, rho).coeffs, rho.coeffs, atol=1e-14))


class OracleTests(unittest.TestCase):
    def test_products_match_permutation_sums(self):
        start = time.time()
        for n in (2, 3, 4):
            errors = product_oracle_errors(n, instances=100, seed=n)
            for name, err in errors.items():
                self.assertLessEqual(err, 1e-12, msg='{} in n = {}'.format(name, n))
        print('oracle sweep took', time.time() - start, 's')

    def test_act_poly_bivector_oracle(self):
        rng = np.random.default_rng(3)
        geom = batch_geometry(4, 100)
        rho = random_batch(geom, 3, TANGENT, rng)
        gamma = random_batch(geom, 2, polyvector(2), rng)
        self.assertLessEqual(np.max(np.abs(act_poly(rho, gamma).coeffs - oracle_act_poly(rho, gamma))), 1e-12)

    def test_anticommutation(self):
        for n in (2, 3, 4):
            self.assertLessEqual(anticommutation_error(n), 1e-12)

    def test_even_degree_squares_vanish(self):
        for n in (2, 4):
            self.assertLessEqual(even_square_norm(n), 1e-14)

    def test_module_axiom_fails(self):
        self.assertGreater(module_axiom_witness(), 1e-6)

    def test_left_right_associator_nonzero(self):
        rng = np.random.default_rng(11)
        beta = PointForm(4, 1, SCALAR, rng.standard_normal((4, 1)))
        rho = PointForm(4, 2, TANGENT, rng.standard_normal((6, 4)))
        gamma = PointForm(4, 1, TANGENT, rng.standard_normal((4, 4)))
        self.assertGreater(np.max(np.abs(left_right_associator(beta, rho, gamma).coeffs)), 1e-6)


class ThreadingTests(unittest.TestCase):
    def setUp(self):
        self.saved_threads = numba.get_num_threads()
        geom = make_flat_torus(4, 6)
        self.rho = random_smooth_field(geom, 2, TANGENT, seed=5)
        self.gamma = random_smooth_field(geom, 1, TANGENT, seed=6)
        self.beta = random_smooth_field(geom, 1, SCALAR, seed=7)

    def tearDown(self):
        numba.set_num_threads(self.saved_threads)

    def _products(self):
        return [wedge_poly(self.gamma, self.gamma).coeffs, act_poly(self.rho, self.gamma).coeffs,
                wedge_scalar(self.beta, self.rho).coeffs]

    def test_products_independent_of_thread_count(self):
        numba.set_num_threads(1)
        serial = self._products()
        numba.set_num_threads(numba.config.NUMBA_NUM_THREADS)
        threaded = self._products()
        for left, right in zip(serial, threaded):
            self.assertTrue(np.array_equal(left, right))


class FieldTests(unittest.TestCase):
    def setUp(self):
        self.geom = make_flat_torus(2, 5)
        self.beta = random_smooth_field(self.geom, 1, SCALAR, seed=1)
        self.B = random_smooth_field(self.geom, 1, TANGENT, seed=2)

    def test_lift_matches_vectorized(self):
        lifted = lift(lambda beta, B: wedge_scalar(beta, B), [self.beta, self.B])
        self.assertTrue(np.allclose(lifted.coeffs, wedge_scalar(self.beta, self.B).coeffs, atol=1e-14))

    def test_geometry_identity(self):
        other = make_flat_torus(2, 5)
        with self.assertRaises(GeometryMismatchError):
            wedge_scalar(self.beta, random_smooth_field(other, 1, TANGENT, seed=2))
        with self.assertRaises(GeometryMismatchError):
            self.B + random_smooth_field(other, 1, TANGENT, seed=2)

    def test_mixing_point_and_field(self):
        with self.assertRaises(GeometryMismatchError):
            wedge_scalar(self.beta.at(0), self.B)

    def test_at_and_sup_norm(self):
        self.assertTrue(np.allclose(self.B.at(3).coeffs, self.B.coeffs[3]))
        self.assertAlmostEqual(self.B.sup_norm(), float(np.max(self.B.node_norms())))
        self.assertEqual(FormField.zeros(self.geom, 2, TANGENT).sup_norm(), 0.)


if __name__ == '__main__':
    unittest.main()
