"""opfun: operator-function calculus on finite Hermitian matrices.

Multiple operator integrals (bounded and resolvent-weighted), higher-order
directional derivatives of t -> f(H + tV), Taylor expansions with certified
remainder bounds, spectral shift functions of every order, and a numerical
verification harness for the underlying operator identities.
"""

from .linalg import (
    HermitianMatrix,
    SpectralDecomposition,
    eigendecompose,
    matrix_function,
    resolvent,
    schatten_norm,
    operator_norm,
)
from .functions import (
    ScalarFunction,
    RationalFunction,
    GaussianFunction,
    PolynomialFunction,
    BumpFunction,
    ProductFunction,
    divided_difference,
    function_from_config,
)
from .piecewise import PiecewisePolynomial, divided_difference_density

__version__ = "0.1.0"
