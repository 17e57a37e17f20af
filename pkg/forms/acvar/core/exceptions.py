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
Error types raised by the acvar core modules
"""


class DimensionMismatchError(ValueError):
    """Operands disagree on ambient dimension, degree or value kind"""


class UnsupportedKindError(ValueError):
    """Value kind not handled by the requested operation"""


class GeometryMismatchError(ValueError):
    """Fields sampled on different chart geometries"""


class NotAlmostComplexError(ValueError):
    """
    Degree-1 tangent field fails A o A = -Id

    Data Members:
        residual (float): max-node operator norm of A o A + Id
        t (float or None): path parameter of the offending sample, if any
    """

    def __init__(self, residual, t=None):
        self.residual = float(residual)
        self.t = t
        msg = 'A o A + Id has residual {:.3e}'.format(self.residual)
        if t is not None:
            msg += ' at t = {}'.format(t)
        super().__init__(msg)


class TrivialFormError(ValueError):
    """Auxiliary 1-form vanishes identically"""


class IntegrationUnsupportedError(ValueError):
    def __init__(self, msg='integration unsupported on non-periodic chart'):
        super().__init__(msg)


class MetricConnectionError(ValueError):
    def __init__(self, msg='formal adjoint implemented for metric connections only'):
        super().__init__(msg)


class ProjectionError(RuntimeError):
    """
    Conjugate gradient projection did not reach tolerance

    Data Members:
        residual (float): sup-norm of the codifferential after the last iterate
    """

    def __init__(self, residual, iterations):
        self.residual = float(residual)
        self.iterations = iterations
        super().__init__('co-closed projection stalled after {} iterations, residual {:.3e}'.format(iterations, self.residual))


class FlowDivergenceError(RuntimeError):
    """
    Non-finite values appeared during gradient flow

    Data Members:
        step (int): index of the step that produced non-finite values
    """

    def __init__(self, step):
        self.step = step
        super().__init__('flow diverged at step {}'.format(step))


class ProbePathError(ValueError):
    """
    A stability probe path sample left the almost-complex structures

    Data Members:
        t (float): offending path parameter
        residual (float): A o A + Id residual at t
    """

    def __init__(self, t, residual):
        self.t = t
        self.residual = float(residual)
        super().__init__('path sample at t = {} is not almost-complex (residual {:.3e})'.format(t, self.residual))


class ConfigError(ValueError):
    """Invalid run configuration or command line usage"""
