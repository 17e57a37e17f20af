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
Tests for the verification helpers and suites
Author: acvar developers
"""

import unittest

from acvar.config import RunConfig
from acvar.verify import CheckResult, observed_order, order_check, run_suite, ROUNDING_FLOOR, ORDER_THRESHOLD


class CheckTests(unittest.TestCase):
    def test_check_result(self):
        check = CheckResult('identity', 1e-13, 1e-12)
        self.assertTrue(check.passed)
        self.assertEqual(check.to_dict(), {'name': 'identity', 'residual': 1e-13, 'tolerance': 1e-12, 'passed': True})
        self.assertFalse(CheckResult('identity', 2., 1.).passed)
        self.assertTrue(CheckResult('witness', 2., 1., passed=True).passed)

    def test_observed_order(self):
        self.assertAlmostEqual(observed_order(4e-4, 1e-4), 2.)
        self.assertEqual(observed_order(0., 1e-4), float('inf'))

    def test_order_check(self):
        self.assertTrue(order_check('second order', 4e-4, 1e-4).passed)
        self.assertFalse(order_check('first order', 2e-4, 1e-4).passed)
        floor = order_check('rounding', ROUNDING_FLOOR/2., ROUNDING_FLOOR/4.)
        self.assertTrue(floor.passed)
        self.assertEqual(floor.tolerance, ROUNDING_FLOOR)


class SuiteTests(unittest.TestCase):
    def test_algebra_suite(self):
        checks = run_suite('algebra', RunConfig.from_text('manifold: {n: 2}', 'verify', 'algebra'))
        self.assertTrue(all(check.passed for check in checks))
        self.assertEqual(len(set(check.name for check in checks)), len(checks))

    def test_calculus_suite_sphere_chart(self):
        text = ('manifold: {kind: sphere_chart, n: 6, res: 5, cutoff: 0.1, center: [0.3, 0.3, 0.3, 0.3, 0.3, 0.3]}\n'
                'structure: {kind: octonionic}')
        checks = run_suite('calculus', RunConfig.from_text(text, 'verify', 'calculus'))
        self.assertEqual([check.name for check in checks],
                         ['N_A vs A o I_A convergence order on the sphere chart', 'octonionic structure is not integrable'])
        self.assertTrue(all(check.passed for check in checks))

    def test_calculus_suite_has_no_loose_tolerances(self):
        checks = run_suite('calculus', RunConfig.from_text('structure: {kind: perturbed}', 'verify', 'calculus'))
        self.assertTrue(all(check.passed for check in checks))
        for check in checks:
            self.assertLessEqual(check.tolerance, ORDER_THRESHOLD, msg=check.name)

    def test_lattice_suite(self):
        config = RunConfig.from_text('structure: {kind: perturbed, epsilon: 0.2}', 'verify', 'lattice')
        checks = run_suite('lattice', config)
        self.assertEqual(checks[0].name, 'lattice implications hold')
        self.assertEqual(checks[0].passed, len(checks) == 1)


if __name__ == '__main__':
    unittest.main()
