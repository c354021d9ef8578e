"""Numerical toolkit for the logarithmic Laplacian in low dimensions."""
from .specfun import (
    EULER_GAMMA,
    DomainError,
    LogConstants,
    SingularityError,
    UnsupportedOrderError,
    bessel_j,
    digamma,
    gamma_fn,
    hankel1,
    log_constants,
    riesz_constant,
    sphere_area,
)
from .quadrature import DEFAULT_SPEC, DivergenceError, IntegralResult, QuadratureSpec

__version__ = "0.1.0"
