"""The logarithmic Laplacian of radial functions.

Two independent evaluation routes are provided:

* :func:`apply_integral_form` -- the singular-integral representation

      log(-Lap) f(x) = g_d int_{|z|<=1} (f(x) - f(x+z)) |z|^-d dz
                       - g_d int_{|z|>1} f(x+z) |z|^-d dz + rho_d f(x),

  reduced to one-dimensional radial integrals of spherical means of f
  around x.  The window term is regular after averaging because the odd
  first-order part of f(x+z) - f(x) cancels over each sphere.

* :func:`apply_spectral_radial` -- multiply the Fourier profile by
  2 log s and invert the radial Fourier transform.

Pointwise validity of the integral form needs some regularity of f; this
module restricts itself to Dini-smooth radial profiles that are either
Schwartz-class or unit-eigenvalue eigenfunctions of -Lap (the
``bounded_oscillatory`` class), whose far integral is only conditionally
convergent and is evaluated through the spherical-mean kernel c_d.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .quadrature import (
    DEFAULT_SPEC,
    DivergenceError,
    IntegralResult,
    QuadratureSpec,
    combine,
    geometric_points,
    integrate_adaptive,
    integrate_osc_bessel,
)
from .specfun import log_constants, normalized_bessel, sphere_area

DECAY_CLASSES = ("schwartz", "bounded_oscillatory", "compact_support")


@dataclass(frozen=True)
class RadialProfile:
    """A radial function of r >= 0, evaluated on numpy arrays.

    ``support`` optionally gives the interval outside which the profile
    vanishes; it lets integrators skip empty ranges.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    smooth_at_origin: bool = True
    decay_class: str = "schwartz"
    support: tuple[float, float] | None = None
    name: str = ""

    def __post_init__(self):
        if self.decay_class not in DECAY_CLASSES:
            raise ValueError(f"decay_class must be one of {DECAY_CLASSES}")

    def __call__(self, r):
        return self.eval(np.asarray(r, dtype=float))

    def scaled(self, factor: float) -> "RadialProfile":
        return RadialProfile(lambda r: factor * self.eval(r), self.smooth_at_origin,
                             self.decay_class, self.support, self.name)


def add_profiles(a: RadialProfile, b: RadialProfile, alpha: float = 1.0, beta: float = 1.0) -> RadialProfile:
    """alpha*a + beta*b, keeping the weaker of the two decay classes."""
    rank = {"compact_support": 0, "schwartz": 1, "bounded_oscillatory": 2}
    decay = max(a.decay_class, b.decay_class, key=rank.__getitem__)
    support = None
    if a.support and b.support:
        support = (min(a.support[0], b.support[0]), max(a.support[1], b.support[1]))
    return RadialProfile(lambda r: alpha * a.eval(r) + beta * b.eval(r),
                         a.smooth_at_origin and b.smooth_at_origin, decay, support)


def gaussian_profile() -> RadialProfile:
    return RadialProfile(lambda r: np.exp(-0.5 * r * r), name="gaussian")


def gaussian_fourier_profile(d: int) -> RadialProfile:
    """Fourier transform of exp(-|x|^2/2) in R^d: (2 pi)^{d/2} exp(-s^2/2)."""
    c = (2 * math.pi) ** (d / 2)
    return RadialProfile(lambda s: c * np.exp(-0.5 * s * s), name="gaussian_hat")


@dataclass(frozen=True)
class SphericalMeanKernel:
    """c_d(rho) = Gamma(d/2) (2/rho)^{(d-2)/2} J_{(d-2)/2}(rho).

    Averaging a solution of -Lap u = u over the sphere of radius rho about x
    gives u(x) c_d(rho).
    """

    d: int

    def __call__(self, rho):
        return normalized_bessel((self.d - 2) / 2, rho)


def eigenfunction_profile(d: int) -> RadialProfile:
    """The radial unit-eigenvalue eigenfunction: cos r, J_0(r), sin r / r."""
    return RadialProfile(SphericalMeanKernel(d), decay_class="bounded_oscillatory",
                         name="eigenfunction")


_ANGULAR_NODES = {2: 128, 3: 48}


def spherical_mean(f: Callable, r: float, rho, d: int, nodes: int | None = None) -> np.ndarray:
    """Average of the radial function f over the sphere |y - x| = rho, |x| = r.

    d = 1 averages the two points x +- rho; d = 2 uses the periodic
    trapezoid rule in the angle (spectrally accurate); d = 3 uses
    Gauss-Legendre in the cosine of the polar angle.
    """
    rho = np.asarray(rho, dtype=float)
    if r == 0.0:
        return np.asarray(f(np.abs(rho)), dtype=float)
    if d == 1:
        return 0.5 * (f(np.abs(r + rho)) + f(np.abs(r - rho)))
    if d == 2:
        n = max(64, nodes or _ANGULAR_NODES[2])
        cos_t = np.cos(2 * math.pi * np.arange(n) / n)
        q = r * r + rho[..., None] ** 2 + 2 * r * rho[..., None] * cos_t
        return np.mean(f(np.sqrt(np.maximum(q, 0.0))), axis=-1)
    if d == 3:
        n = max(32, nodes or _ANGULAR_NODES[3])
        mu, w = np.polynomial.legendre.leggauss(n)
        q = r * r + rho[..., None] ** 2 + 2 * r * rho[..., None] * mu
        return 0.5 * (f(np.sqrt(np.maximum(q, 0.0))) @ w)
    raise ValueError(f"spherical means implemented for d in (1, 2, 3), got {d}")


@dataclass(frozen=True)
class OperatorValue:
    """Pointwise value of log(-Lap) f with its error budget."""

    value: float
    err_estimate: float
    tail_bound: float
    converged: bool
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def __float__(self) -> float:
        return self.value


def _check_eigenfunction(f: RadialProfile, r: float, d: int) -> None:
    kernel = SphericalMeanKernel(d)
    fx = float(f(r))
    rho = np.array([0.5, 1.7, 3.1])
    means = spherical_mean(f, r, rho, d)
    if np.max(np.abs(means - fx * kernel(rho))) > 1e-8 * max(1.0, abs(fx)):
        raise ValueError("bounded_oscillatory profiles must be unit-eigenvalue eigenfunctions of -Lap")


def _eigen_tail(d: int, spec: QuadratureSpec) -> IntegralResult:
    """int_1^inf c_d(rho) / rho d rho as an oscillatory Bessel integral."""
    nu = (d - 2) / 2
    c = math.gamma(d / 2) * 2.0**nu
    return integrate_osc_bessel(lambda p: c * p ** (-nu - 1), nu, 1.0, 1.0, spec)


def _majorant_tail(f: RadialProfile, r: float, R: float, spec: QuadratureSpec) -> float:
    """int_R^inf |f(p - r)| / p dp over doubling intervals, stopping once negligible."""
    total, lo = 0.0, R
    for _ in range(60):
        piece = integrate_adaptive(lambda p: np.abs(f(p - r)) / p, lo, 2 * lo, spec).value
        total += piece
        if piece <= 1e-3 * total or piece < 1e-300:
            break
        lo *= 2
    # once pieces shrink at least geometrically by 2, the rest is below the last one
    return total + piece


def apply_integral_form(
    f: RadialProfile,
    r: float,
    d: int,
    R_max: float = 40.0,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> OperatorValue:
    """log(-Lap) f at a point of radius r via the singular-integral form."""
    if d not in (1, 2, 3):
        raise ValueError("apply_integral_form supports d in (1, 2, 3)")
    if R_max < 10:
        raise ValueError("R_max must be at least 10")
    consts = log_constants(d)
    fx = float(f(r))
    warnings: list[str] = []
    if r == 0.0 and not f.smooth_at_origin:
        warnings.append("profile is not smooth at the origin; window-term cancellation may fail")

    near = integrate_adaptive(
        lambda p: (fx - spherical_mean(f, r, p, d)) / p, 0.0, 1.0, spec,
        points=geometric_points(1.0, 12),
    )
    tail_bound = 0.0
    if f.decay_class == "bounded_oscillatory":
        _check_eigenfunction(f, r, d)
        far = _eigen_tail(d, spec).scaled(fx)
    else:
        far = integrate_adaptive(
            lambda p: spherical_mean(f, r, p, d) / p, 1.0, R_max, spec,
            points=list(np.arange(2.0, R_max, 2.0)) + [r],
        )
        # every point of a sphere of radius p >= R_max lies at distance >= p - r
        # from the origin; assumes |f| is nonincreasing out there
        if R_max > r:
            tail_bound = consts.gamma_d * consts.omega * _majorant_tail(f, r, R_max, spec)
        else:
            warnings.append("R_max does not exceed |x|; no tail bound available")
            tail_bound = math.inf
    total = combine([near, far], [consts.gamma_d * consts.omega, -consts.gamma_d * consts.omega])
    value = float(total.value) + consts.rho_d * fx
    return OperatorValue(value, total.err_estimate, float(tail_bound), total.converged, tuple(warnings))


def _zero_points(r: float, upper: float, limit: int = 4000) -> list[float]:
    if r <= 0:
        return []
    step = math.pi / r
    n = min(int(upper / step), limit)
    return [step * k for k in range(1, n + 1)]


def _support_upper(g: RadialProfile, scale_hint: float = 1.0) -> float:
    if g.support is not None:
        return float(g.support[1])
    if g.decay_class == "bounded_oscillatory":
        raise DivergenceError("profile does not decay; the radial Fourier integral diverges")
    grid = np.linspace(1e-3, 10.0, 400)
    scale = max(1e-300, float(np.max(np.abs(g(grid)))))
    upper = 10.0
    while upper < 2000.0:
        s = np.linspace(upper, 2 * upper, 64)
        if np.max(np.abs(g(s)) * s**scale_hint) < 1e-18 * scale:
            return upper
        upper *= 2
    raise DivergenceError("profile does not decay fast enough for the radial Fourier integral")


def radial_transform(
    g: RadialProfile,
    d: int,
    direction: str,
    r: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> IntegralResult:
    """Radial Fourier transform with error estimate.

    forward: omega_{d-1} int_0^inf g(t) c_d(s t) t^{d-1} dt
    inverse: the same with an extra factor (2 pi)^{-d}

    This is (2 pi)^{d/2} s^{-(d-2)/2} int g(t) J_{(d-2)/2}(s t) t^{d/2} dt
    rewritten with the normalised kernel so that s = 0 needs no limit.
    """
    if direction not in ("forward", "inverse"):
        raise ValueError("direction must be 'forward' or 'inverse'")
    upper = _support_upper(g, d)
    lower = float(g.support[0]) if g.support is not None else 0.0
    kernel = SphericalMeanKernel(d)
    pts = [1.0] + geometric_points(min(1.0, upper), 20) + _zero_points(r, upper)
    res = integrate_adaptive(lambda t: g(t) * kernel(t * r) * t ** (d - 1), lower, upper, spec, pts)
    factor = sphere_area(d)
    if direction == "inverse":
        factor /= (2 * math.pi) ** d
    return res.scaled(factor)


def radial_fourier(
    g: RadialProfile,
    d: int,
    direction: str,
    r: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> complex:
    """Forward or inverse radial Fourier transform of g evaluated at radius r.

    Convention: F f(xi) = int e^{-i x.xi} f(x) dx, inverse with (2 pi)^{-d}.
    d = 1 reduces to the cosine transform.
    """
    return complex(radial_transform(g, d, direction, r, spec).value)


def apply_spectral_radial(
    fhat: RadialProfile,
    r: float,
    d: int,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> IntegralResult:
    """log(-Lap) f at radius r from its Fourier profile: invert 2 log(s) fhat(s)."""
    if fhat.decay_class == "bounded_oscillatory":
        raise DivergenceError("spectral route needs a decaying Fourier profile")
    with np.errstate(divide="ignore"):
        multiplied = RadialProfile(lambda s: 2.0 * np.log(s) * fhat.eval(s),
                                   fhat.smooth_at_origin, fhat.decay_class, fhat.support)
    return radial_transform(multiplied, d, "inverse", r, spec)


def eigenfunction_identity_terms(d: int, spec: QuadratureSpec = DEFAULT_SPEC):
    """(window, tail) = (int_0^1 (1 - c_d)/rho, int_1^inf c_d/rho)."""
    kernel = SphericalMeanKernel(d)
    window = integrate_adaptive(lambda p: (1.0 - kernel(p)) / p, 0.0, 1.0, spec)
    return window, _eigen_tail(d, spec)


def eigenfunction_identity_residual(d: int, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """|2 (window - tail) + rho_d|, zero because eigenfunctions are log-harmonic."""
    if d not in (1, 2, 3):
        raise ValueError("eigenfunction identity implemented for d in (1, 2, 3)")
    window, tail = eigenfunction_identity_terms(d, spec)
    return abs(2.0 * (window.value - tail.value) + log_constants(d).rho_d)
