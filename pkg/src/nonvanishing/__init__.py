"""Numerical laboratory for real zeros of quadratic Dirichlet L-functions.

Modules: ``arith`` (characters, sieves, Gauss sums), ``special`` (Gamma,
zeta, quadrature, Euler products), ``lfun`` (L, xi, the smoothed kernel and
the approximate functional equation), ``selberg`` (weighted zero counts),
``mollify`` (mollifier tables and averages over d), ``theory`` (main terms
and the bound constant) and ``cli``.
"""
from .errors import BudgetExceeded, ConvergenceError, DomainError, NonvanishingError
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "BudgetExceeded", "ConvergenceError", "DomainError",
           "NonvanishingError", "__version__"]
