"""Closed-form predictions for the transfer statistics.

Collects every analytic result the simulations are compared against: local
level spacing and minimal resonance distances, the extreme-value statistics
of the direct coupling, the Cauchy law of the bulk-induced level shifts, the
folded two-lobe distribution of the inverse transfer time, its exceedance
probabilities with large-N asymptotics, and the doublet acceptance
probability.

Conventions:  N is the full network size, xi the disorder scale, and
coupling_norm_sq_mean (written cns in the formulas below) the ensemble mean
of the squared bulk-coupling norm of a transfer level.  The inverse-time
distribution is parameterized by

    s0 = cns * N * e / (4 pi xi^2)      (width of the central lobe)
    x0 = cns / (2 xi^2)                 (shift of the lobe center, 1 + x0)

and its fixed-coupling variant replaces s0 by
gamma = cns / (2 V xi sqrt(N/2 - 1)).

Special functions are evaluated by the package's own series and
continued-fraction implementations; quadratures use adaptive Gauss-Kronrod
integration from scipy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from ._special import betainc, erfc, log_beta

_E = math.e
_PI = math.pi

_erfc_vec = np.vectorize(erfc, otypes=[float])


@dataclass(frozen=True)
class CauchyParams:
    location: float
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class TheoryParams:
    """Bundle of the derived scales for one parameter point."""

    n: int
    xi: float
    coupling_norm_sq_mean: float
    delta_loc: float
    v_bar: float
    d_min: float
    s0_width: float
    x0_shift: float
    gamma_fixed: float


def _check_n(n: int, minimum: int = 4) -> None:
    if n < minimum:
        raise ValueError(f"network size must be >= {minimum}, got {n}")


def _check_positive(**kwargs) -> None:
    for name, value in kwargs.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")


def delta_loc(n: int, xi: float) -> float:
    """Mean level spacing in the bulk neighborhood of a transfer level."""
    _check_n(n)
    _check_positive(xi=xi)
    return 2.0 * _PI * xi / math.sqrt(n / 2.0 - 1.0)


def d_min(n: int, xi: float) -> float:
    """Smallest typical distance between a transfer level and the bulk."""
    _check_n(n)
    _check_positive(xi=xi)
    return _PI * xi / math.sqrt(n / 2.0 - 1.0)


def d_min_constrained(coupling_norm_sq_mean: float, alpha: float, n: int) -> float:
    """Closest bulk approach compatible with doublet weight above alpha."""
    _check_n(n)
    _check_positive(coupling_norm_sq_mean=coupling_norm_sq_mean)
    if not alpha < 1.0:
        raise ValueError(f"alpha must be below 1, got {alpha}")
    if not alpha > 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return math.sqrt(2.0 * _PI * coupling_norm_sq_mean) / math.sqrt(
        (1.0 - alpha) * (n / 2.0 - 1.0))


def alpha_from_coupling(coupling_norm_sq_mean: float, xi: float) -> float:
    """Doublet threshold sustaining a given mean bulk coupling."""
    _check_positive(xi=xi)
    if coupling_norm_sq_mean < 0:
        raise ValueError("coupling_norm_sq_mean must be nonnegative")
    alpha = 1.0 - 2.0 * coupling_norm_sq_mean / (_PI * xi * xi)
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"resulting alpha {alpha:g} outside (0, 1]")
    return alpha


def coupling_from_alpha(alpha: float, xi: float) -> float:
    """Inverse of alpha_from_coupling."""
    _check_positive(xi=xi)
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    return _PI * xi * xi * (1.0 - alpha) / 2.0


def min_coupling_pdf(v, n: int, xi: float):
    """Density of the weakest of the N/2 mirror-pair couplings.

    Each coupling magnitude is half-normal with variance 2 xi^2 / N; the
    minimum of N/2 of them has density
    N^{3/2} / (2 sqrt(pi) xi) * exp(-N v^2 / 4 xi^2) * erfc(sqrt(N) v / 2 xi)^{N/2-1}.
    """
    _check_n(n, minimum=2)
    _check_positive(xi=xi)
    v = np.asarray(v, dtype=float)
    if np.any(v < 0):
        raise ValueError("couplings are nonnegative by convention")
    z = math.sqrt(n) * v / (2.0 * xi)
    pref = n ** 1.5 / (2.0 * math.sqrt(_PI) * xi)
    out = pref * np.exp(-z * z) * _erfc_vec(z) ** (n / 2.0 - 1.0)
    return out if out.ndim else float(out)


def min_coupling_cdf(v, n: int, xi: float):
    """Distribution function of the weakest coupling: 1 - erfc(...)^{N/2}."""
    _check_n(n, minimum=2)
    _check_positive(xi=xi)
    v = np.asarray(v, dtype=float)
    z = math.sqrt(n) * v / (2.0 * xi)
    out = 1.0 - _erfc_vec(z) ** (n / 2.0)
    return out if out.ndim else float(out)


def vbar_exact(n: int, xi: float) -> float:
    """Mean weakest coupling by quadrature of the survival function."""
    _check_n(n, minimum=2)
    _check_positive(xi=xi)
    half = n / 2.0
    root = math.sqrt(n) / (2.0 * xi)

    def survival(v):
        return erfc(root * v) ** half

    value, _ = integrate.quad(survival, 0.0, np.inf, epsabs=0.0, epsrel=1e-8,
                              limit=200)
    return value


def vbar_asymptotic(n: int, xi: float) -> float:
    """Laplace-approximation estimate of the mean weakest coupling."""
    _check_n(n)
    _check_positive(xi=xi)
    return 2.0 * _PI * xi / (_E * n * math.sqrt(n / 2.0 - 1.0))


def cauchy_pdf(x, params: CauchyParams):
    x = np.asarray(x, dtype=float)
    s = params.scale
    out = s / (_PI * ((x - params.location) ** 2 + s * s))
    return out if out.ndim else float(out)


def shift_pdf(s, sigma: float, location: float = 0.0):
    """Cauchy density of a single transfer-level shift."""
    _check_positive(sigma=sigma)
    return cauchy_pdf(s, CauchyParams(location=location, scale=sigma))


def delta_s_params(n: int, xi: float, coupling_norm_sq_mean: float,
                   v: float) -> CauchyParams:
    """Cauchy parameters of the shift difference s+ - s- at direct coupling v."""
    _check_n(n)
    _check_positive(xi=xi, coupling_norm_sq_mean=coupling_norm_sq_mean, v=v)
    location = v * coupling_norm_sq_mean / (xi * xi)
    scale = 2.0 * _PI * coupling_norm_sq_mean / ((n / 2.0 - 1.0) * delta_loc(n, xi))
    return CauchyParams(location=location, scale=scale)


def s0_width(n: int, xi: float, coupling_norm_sq_mean: float) -> float:
    """Lobe width of the inverse-transfer-time distribution."""
    _check_n(n)
    _check_positive(xi=xi, coupling_norm_sq_mean=coupling_norm_sq_mean)
    return coupling_norm_sq_mean * n * _E / (4.0 * _PI * xi * xi)


def x0_shift(xi: float, coupling_norm_sq_mean: float) -> float:
    """Displacement of the lobe center from x = 1."""
    _check_positive(xi=xi, coupling_norm_sq_mean=coupling_norm_sq_mean)
    return coupling_norm_sq_mean / (2.0 * xi * xi)


def gamma_fixed(v: float, n: int, xi: float, coupling_norm_sq_mean: float) -> float:
    """Lobe width at fixed direct coupling v."""
    _check_n(n)
    _check_positive(xi=xi, coupling_norm_sq_mean=coupling_norm_sq_mean, v=v)
    return coupling_norm_sq_mean / (2.0 * v * xi * math.sqrt(n / 2.0 - 1.0))


def _folded_two_lobe_pdf(x, width: float, shift: float):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("the inverse-time ratio is nonnegative")
    center = 1.0 + shift
    lobe = width / ((x - center) ** 2 + width * width)
    mirror = width / ((x + center) ** 2 + width * width)
    out = (lobe + mirror) / _PI
    return out if out.ndim else float(out)


def _folded_two_lobe_cdf(x, width: float, shift: float):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("the inverse-time ratio is nonnegative")
    center = 1.0 + shift
    out = (np.arctan((x - center) / width) + np.arctan((x + center) / width)) / _PI
    return out if out.ndim else float(out)


def transfer_time_pdf(x, n: int, xi: float, coupling_norm_sq_mean: float):
    """Density of x = T_R / t after averaging over the direct coupling.

    A Cauchy lobe of width s0 centered at 1 + x0, folded onto x >= 0
    together with its reflected image.
    """
    return _folded_two_lobe_pdf(x, s0_width(n, xi, coupling_norm_sq_mean),
                                x0_shift(xi, coupling_norm_sq_mean))


def transfer_time_cdf(x, n: int, xi: float, coupling_norm_sq_mean: float):
    """Distribution function matching transfer_time_pdf."""
    return _folded_two_lobe_cdf(x, s0_width(n, xi, coupling_norm_sq_mean),
                                x0_shift(xi, coupling_norm_sq_mean))


def transfer_time_pdf_fixedv(x, v: float, n: int, xi: float,
                             coupling_norm_sq_mean: float):
    """Density of T_R / t when the direct coupling is pinned to v."""
    return _folded_two_lobe_pdf(x, gamma_fixed(v, n, xi, coupling_norm_sq_mean),
                                x0_shift(xi, coupling_norm_sq_mean))


def transfer_time_cdf_fixedv(x, v: float, n: int, xi: float,
                             coupling_norm_sq_mean: float):
    """Distribution function matching transfer_time_pdf_fixedv."""
    return _folded_two_lobe_cdf(x, gamma_fixed(v, n, xi, coupling_norm_sq_mean),
                                x0_shift(xi, coupling_norm_sq_mean))


def prob_faster_than_rabi(n: int, xi: float, coupling_norm_sq_mean: float) -> float:
    """Probability that the transfer beats the bare Rabi time.

    Single-lobe estimate 1 - arctan((1 - x0)/s0)/pi; it ignores the mass of
    the reflected lobe beyond x = 1 and therefore sits slightly below the
    full integral of transfer_time_pdf (see prob_faster_than_rabi_exact).
    """
    s0 = s0_width(n, xi, coupling_norm_sq_mean)
    x0 = x0_shift(xi, coupling_norm_sq_mean)
    return 1.0 - math.atan((1.0 - x0) / s0) / _PI


def prob_faster_than_rabi_exact(n: int, xi: float,
                                coupling_norm_sq_mean: float) -> float:
    """Both-lobe exceedance: exactly 1 - transfer_time_cdf(1)."""
    s0 = s0_width(n, xi, coupling_norm_sq_mean)
    x0 = x0_shift(xi, coupling_norm_sq_mean)
    return 1.0 - (math.atan(-x0 / s0) + math.atan((2.0 + x0) / s0)) / _PI


def prob_faster_than_rabi_asymptotic(n: int, xi: float,
                                     coupling_norm_sq_mean: float) -> float:
    """Large-N limit of prob_faster_than_rabi."""
    _check_n(n)
    _check_positive(xi=xi, coupling_norm_sq_mean=coupling_norm_sq_mean)
    return 1.0 - 4.0 * xi * xi / (coupling_norm_sq_mean * n * _E)


def prob_faster_than_rabi_fixedv(v: float, n: int, xi: float,
                                 coupling_norm_sq_mean: float) -> float:
    """Exceedance probability at pinned direct coupling v."""
    g = gamma_fixed(v, n, xi, coupling_norm_sq_mean)
    x0 = x0_shift(xi, coupling_norm_sq_mean)
    return 1.0 - math.atan((1.0 - x0) / g) / _PI


def prob_faster_than_rabi_fixedv_asymptotic(v: float, n: int, xi: float,
                                            coupling_norm_sq_mean: float) -> float:
    """Large-N limit of the pinned-coupling exceedance, approaching 1/2."""
    _check_n(n)
    _check_positive(xi=xi, coupling_norm_sq_mean=coupling_norm_sq_mean, v=v)
    return 0.5 + coupling_norm_sq_mean / (_PI * v * xi * math.sqrt(2.0 * n))


def avg_return_population(n: int) -> float:
    """Ensemble-averaged long-time population of the input site, 3/(2+N)."""
    if n < 1:
        raise ValueError(f"network size must be >= 1, got {n}")
    return 3.0 / (2.0 + n)


def doublet_probability(n: int, alpha: float) -> float:
    """Chance that a raw draw carries a doublet of weight above alpha.

    Treats the squared eigenvector components as independent Beta variables:
    (1 - I_alpha(1/2, N/4 - 1/2)^{N/2})^2.
    """
    _check_n(n)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    b = n / 4.0 - 0.5
    if not b > 0:
        raise ValueError("doublet probability needs N > 2")
    tail = 1.0 - betainc(0.5, b, alpha) ** (n / 2.0)
    return tail * tail


def eigenvector_component_pdf(y, n: int):
    """Density of one squared eigenvector component, Beta(1/2, (N-1)/2)."""
    if n < 2:
        raise ValueError(f"network size must be >= 2, got {n}")
    y = np.asarray(y, dtype=float)
    if np.any((y <= 0) | (y >= 1)):
        raise ValueError("squared components live strictly inside (0, 1)")
    lognorm = log_beta(0.5, (n - 1) / 2.0)
    out = np.exp(-0.5 * np.log(y) + ((n - 3) / 2.0) * np.log1p(-y) - lognorm)
    return out if out.ndim else float(out)


def eigenvector_component_cdf(y, n: int):
    """Distribution function of a squared eigenvector component."""
    if n < 2:
        raise ValueError(f"network size must be >= 2, got {n}")
    arr = np.asarray(y, dtype=float)
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError("argument outside [0, 1]")
    flat = np.array([betainc(0.5, (n - 1) / 2.0, t) for t in np.ravel(arr)])
    out = flat.reshape(arr.shape)
    return out if out.ndim else float(out)


def efficiency_lower_bound(alpha: float) -> float:
    """Transfer efficiency guaranteed by a doublet of weight alpha."""
    if not 0.5 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (1/2, 1], got {alpha}")
    return 2.0 * alpha - 1.0


def sector_bulk_radius(n: int, xi: float) -> float:
    """Semicircle radius of a sector bulk block (dimension N/2 - 1)."""
    _check_n(n)
    _check_positive(xi=xi)
    return 2.0 * xi * math.sqrt((n - 2.0) / n)


def semicircle_pdf(lam, radius: float):
    """Normalized semicircle density on [-radius, radius]."""
    _check_positive(radius=radius)
    lam = np.asarray(lam, dtype=float)
    out = np.where(np.abs(lam) < radius,
                   2.0 * np.sqrt(np.maximum(radius * radius - lam * lam, 0.0))
                   / (_PI * radius * radius),
                   0.0)
    return out if out.ndim else float(out)


def theory_params(n: int, xi: float,
                  coupling_norm_sq_mean: Optional[float] = None,
                  alpha: Optional[float] = None,
                  v: Optional[float] = None) -> TheoryParams:
    """Assemble all derived scales for one parameter point.

    The mean squared coupling can be given directly (e.g. extracted from a
    run) or inferred from the doublet threshold alpha; the pinned coupling
    for gamma_fixed defaults to the asymptotic mean weakest coupling.
    """
    _check_n(n)
    _check_positive(xi=xi)
    if coupling_norm_sq_mean is None:
        if alpha is None:
            raise ValueError("need either coupling_norm_sq_mean or alpha")
        coupling_norm_sq_mean = coupling_from_alpha(alpha, xi)
    if v is None:
        v = vbar_asymptotic(n, xi)
    return TheoryParams(
        n=n, xi=xi, coupling_norm_sq_mean=coupling_norm_sq_mean,
        delta_loc=delta_loc(n, xi), v_bar=vbar_exact(n, xi),
        d_min=d_min(n, xi),
        s0_width=s0_width(n, xi, coupling_norm_sq_mean),
        x0_shift=x0_shift(xi, coupling_norm_sq_mean),
        gamma_fixed=gamma_fixed(v, n, xi, coupling_norm_sq_mean))
