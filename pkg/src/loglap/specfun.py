"""Special functions and the dimensional constants of the logarithmic Laplacian.

Bessel functions use a two-branch scheme: the ascending power series (summed
in extended precision) below ``SERIES_SWITCH`` and the Hankel asymptotic
expansion above it.  Only a small, auditable set of orders is exposed through
:func:`bessel_j` and :func:`hankel1`; the private ``_jv``/``_yv`` helpers accept
any real order that is not a negative integer and are used by the quadrature
code for zero finding and integration-by-parts chains.

Constants (50 digits, truncated to double on use):

* Euler-Mascheroni  0.57721566490153286060651209008240243104215933593992
* pi                3.14159265358979323846264338327950288419716939937510
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.57721566490153286060651209008240243
PI = 3.14159265358979323846264338327950288

_LD = np.longdouble
_EULER_LD = _LD("0.57721566490153286060651209008240243104215933593992")
_PI_LD = _LD("3.14159265358979323846264338327950288419716939937510")

# Above this argument the asymptotic expansion is used.  The series loses
# about log10(e^z / sqrt(2 pi z)) digits to cancellation, which extended
# precision absorbs up to z ~ 17; the asymptotic expansion's smallest term
# is ~e^{-2z}, already below 1e-14 there.
SERIES_SWITCH = 17.0
_SERIES_TERMS = 70
_ASYMPTOTIC_TERMS = 30

SUPPORTED_ORDERS = frozenset({-0.5, 0.0, 0.5, 1.0, 1.5, 2.0})


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


class UnsupportedOrderError(ValueError):
    """Bessel order outside the audited set."""


class SingularityError(ValueError):
    """Evaluation at a pole or branch point."""


def gamma_fn(x: float) -> float:
    """Gamma function for positive real arguments."""
    if not x > 0:
        raise DomainError(f"gamma_fn requires x > 0, got {x!r}")
    return math.gamma(x)


# B_{2k} / (2k) for the digamma asymptotic series
_DIGAMMA_COEFFS = (
    1.0 / 12,
    -1.0 / 120,
    1.0 / 252,
    -1.0 / 240,
    1.0 / 132,
    -691.0 / 32760,
    1.0 / 12,
)


def digamma(x: float) -> float:
    """psi(x) = Gamma'(x)/Gamma(x) for x > 0.

    Shifts the argument above 10 with psi(x) = psi(x+1) - 1/x and then sums
    the Stirling-type expansion ln x - 1/(2x) - sum B_2k / (2k x^2k).
    """
    if not x > 0:
        raise DomainError(f"digamma requires x > 0, got {x!r}")
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for c in _DIGAMMA_COEFFS:
        series += c * power
        power *= inv2
    return acc + math.log(x) - 0.5 / x - series


def _check_order(nu: float) -> float:
    nu = float(nu)
    if nu not in SUPPORTED_ORDERS:
        raise UnsupportedOrderError(
            f"order {nu} not supported; choose one of {sorted(SUPPORTED_ORDERS)}"
        )
    return nu


def _jv_series(nu: float, z: np.ndarray) -> np.ndarray:
    zl = z.astype(_LD)
    half = zl / 2
    q = -half * half
    term = np.ones_like(zl) / _LD(math.gamma(nu + 1.0))
    total = term.copy()
    for k in range(1, _SERIES_TERMS):
        term = term * q / (_LD(k) * (_LD(k) + _LD(nu)))
        total += term
    with np.errstate(divide="ignore"):
        prefactor = np.power(half, _LD(nu))
    return (prefactor * total).astype(float)


def _yn_series(n: int, z: np.ndarray) -> np.ndarray:
    """Integer-order Y_n from the logarithmic power series."""
    zl = z.astype(_LD)
    half = zl / 2
    q = -half * half
    # J_n in extended precision, reused for the logarithmic term
    term = np.ones_like(zl) / _LD(math.factorial(n))
    jsum = term.copy()
    # psi(k+1) + psi(n+k+1) with psi(m+1) = -gamma + H_m
    hk = _LD(0)
    hnk = sum((_LD(1) / _LD(j) for j in range(1, n + 1)), _LD(0))
    ysum = term * (-2 * _EULER_LD + hk + hnk)
    for k in range(1, _SERIES_TERMS):
        term = term * q / (_LD(k) * _LD(k + n))
        jsum += term
        hk += _LD(1) / _LD(k)
        hnk += _LD(1) / _LD(k + n)
        ysum += term * (-2 * _EULER_LD + hk + hnk)
    jn = jsum * half**n
    finite = _LD(0)
    for k in range(n):
        finite = finite + _LD(math.factorial(n - k - 1)) / _LD(math.factorial(k)) * half ** (2 * k - n)
    y = (2 / _PI_LD) * jn * np.log(half) - finite / _PI_LD - ysum * half**n / _PI_LD
    return y.astype(float)


def _hankel_asymptotic(nu: float, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (J_nu, Y_nu) from the Hankel expansion; z must be large."""
    mu = 4.0 * nu * nu
    p = np.ones_like(z)
    q = np.zeros_like(z)
    a = 1.0
    zk = np.ones_like(z)
    for k in range(1, _ASYMPTOTIC_TERMS):
        a *= (mu - (2 * k - 1) ** 2) / (8.0 * k)
        zk = zk * z
        if a == 0.0:
            break
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q = q + sign * a / zk
        else:
            p = p + sign * a / zk
    chi = z - (0.5 * nu + 0.25) * PI
    amp = np.sqrt(2.0 / (PI * z))
    c, s = np.cos(chi), np.sin(chi)
    return amp * (p * c - q * s), amp * (p * s + q * c)


def _jv(nu: float, z):
    """J_nu(z) for real nu (not a negative integer) and z >= 0, vectorized."""
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    small = z <= SERIES_SWITCH
    if np.any(small):
        out[small] = _jv_series(nu, z[small])
    if np.any(~small):
        out[~small] = _hankel_asymptotic(nu, z[~small])[0]
    return out[0] if scalar else out


def _yv(nu: float, z):
    """Y_nu(z) for integer or half-integer nu and z > 0, vectorized."""
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    small = z <= SERIES_SWITCH
    if np.any(small):
        zs = z[small]
        if float(nu).is_integer():
            n = int(nu)
            ys = _yn_series(abs(n), zs)
            out[small] = ys if n >= 0 or n % 2 == 0 else -ys
        elif (2 * nu) % 2 == 1:
            n = int(math.floor(nu))
            out[small] = (-1) ** (n + 1) * _jv_series(-nu, zs)
        else:
            raise UnsupportedOrderError(f"Y_nu needs integer or half-integer order, got {nu}")
    if np.any(~small):
        out[~small] = _hankel_asymptotic(nu, z[~small])[1]
    return out[0] if scalar else out


def bessel_j(nu: float, z):
    """Bessel function of the first kind J_nu(z) on the supported orders."""
    nu = _check_order(nu)
    za = np.asarray(z, dtype=float)
    if np.any(za < 0):
        raise DomainError("bessel_j requires z >= 0")
    if nu < 0 and np.any(za == 0):
        raise SingularityError("J_{-1/2} is singular at z = 0")
    return _jv(nu, za)


def hankel1(nu: float, z):
    """Hankel function of the first kind, J_nu(z) + i Y_nu(z)."""
    nu = _check_order(nu)
    za = np.asarray(z, dtype=float)
    if np.any(za <= 0):
        raise SingularityError("hankel1 requires z > 0")
    return _jv(nu, za) + 1j * _yv(nu, za)


@dataclass(frozen=True)
class LogConstants:
    d: int
    gamma_d: float
    rho_d: float
    omega: float


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere S^{d-1} in R^d."""
    return 2.0 * PI ** (d / 2) / math.gamma(d / 2)


def log_constants(d: int) -> LogConstants:
    """gamma_d = 2/omega_{d-1} and rho_d = 2 log 2 + psi(d/2) - gamma_E."""
    if int(d) != d or d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d!r}")
    d = int(d)
    omega = sphere_area(d)
    return LogConstants(
        d=d,
        gamma_d=2.0 / omega,
        rho_d=2.0 * math.log(2.0) + digamma(d / 2) - EULER_GAMMA,
        omega=omega,
    )


def riesz_constant(d: int, alpha: float) -> float:
    """Normalisation of the Riesz potential of order alpha in R^d."""
    if not 0 < alpha < d:
        raise DomainError(f"riesz_constant requires 0 < alpha < d, got alpha={alpha}, d={d}")
    return math.gamma((d - alpha) / 2) / (PI ** (d / 2) * 2.0**alpha * math.gamma(alpha / 2))


def normalized_bessel(nu: float, t):
    """Gamma(nu+1) (2/t)^nu J_nu(t), equal to 1 at t = 0.

    For nu = (d-2)/2 this is the spherical mean kernel c_d: the average of a
    unit-eigenvalue eigenfunction over a sphere of radius t, relative to its
    value at the centre.  d = 1 gives cos t, d = 3 gives sin t / t.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.empty_like(t)
    tiny = t < 1e-3
    if np.any(tiny):
        q = -(t[tiny] ** 2) / 4
        # three terms of the series give full precision below 1e-3
        out[tiny] = 1 + q / (nu + 1) + q * q / (2 * (nu + 1) * (nu + 2))
    big = ~tiny
    if np.any(big):
        tb = t[big]
        out[big] = math.gamma(nu + 1) * (2 / tb) ** nu * _jv(nu, tb)
    return out[0] if scalar else out
