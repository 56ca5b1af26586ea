"""Accuracy metrics and the heat-capacity functional.

The sup-Gaussian metric probes an estimate against every Gaussian test
function of width sigma centered in the spectral interval: the exact side
sums the kernel over eigenvalues, the approximate side integrates the
estimate by trapezoid. Lp distances compare two estimates directly. The heat
capacity treats eigenvalues as squared phonon frequencies and weights the
density with the standard lattice heat-capacity kernel.
"""

from dataclasses import dataclass

import numpy as np

from .density import RegularizationKernel, SpectralDensityEstimate
from .lanczos import RitzQuadrature
from .reference import ExactSpectrum

DEFAULT_SUP_CENTERS = 1000

# grid spacing above sigma/8 is refused: quadrature error would masquerade
# as method error
SUP_GAUSSIAN_POINTS_PER_SIGMA = 8


@dataclass(frozen=True)
class ErrorReport:
    """One metric evaluation: metric kind, value, parameter (sigma or p)."""

    kind: str
    value: float
    parameter: float
    grid_points: int


def _trapezoid_weights(grid):
    w = np.zeros_like(grid)
    d = np.diff(grid)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def error_sup_gaussian(spectrum, estimate, sigma, centers=None,
                       n_centers=DEFAULT_SUP_CENTERS):
    """Worst Gaussian-test-function discrepancy between exact and estimate.

    Centers default to a uniform sweep of the estimate's spectral interval.
    Refuses estimates whose grid is coarser than sigma/8: the trapezoid
    quadrature against the kernel would no longer be trustworthy.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    lam = estimate.lambda_grid
    spacing = float(np.max(np.diff(lam)))
    if spacing > sigma / SUP_GAUSSIAN_POINTS_PER_SIGMA:
        raise ValueError(
            f"estimate grid spacing {spacing:.3g} is too coarse for sigma={sigma:g}; "
            f"need at least {SUP_GAUSSIAN_POINTS_PER_SIGMA} points per sigma"
        )
    if centers is None:
        centers = np.linspace(
            estimate.interval.lambda_lb, estimate.interval.lambda_ub, n_centers
        )
    centers = np.asarray(centers, dtype=float)
    kernel = RegularizationKernel("gaussian", sigma)

    exact_side = np.zeros_like(centers)
    eig = spectrum.eigenvalues
    for start in range(0, len(eig), 512):
        chunk = eig[start : start + 512]
        exact_side += kernel(chunk[None, :] - centers[:, None]).sum(axis=1)
    exact_side /= spectrum.n

    weighted = _trapezoid_weights(lam) * estimate.density
    approx_side = np.zeros_like(centers)
    for start in range(0, len(lam), 2048):
        sl = slice(start, start + 2048)
        approx_side += kernel(lam[None, sl] - centers[:, None]) @ weighted[sl]

    return ErrorReport(
        kind="sup_gaussian",
        value=float(np.max(np.abs(exact_side - approx_side))),
        parameter=float(sigma),
        grid_points=len(lam),
    )


def error_lp(reference, approx, p):
    """Discrete Lp distance on the reference grid, resampling if needed."""
    if p not in (1, 2) and not np.isinf(p):
        raise ValueError("p must be 1, 2, or inf")
    ref_grid = reference.lambda_grid
    app_grid = approx.lambda_grid
    lo = max(ref_grid[0], app_grid[0])
    hi = min(ref_grid[-1], app_grid[-1])
    if lo >= hi:
        raise ValueError("estimates live on non-overlapping grids")
    keep = (ref_grid >= lo) & (ref_grid <= hi)
    grid = ref_grid[keep]
    ref_vals = reference.density[keep]
    if len(app_grid) == len(grid) and np.array_equal(app_grid, grid):
        app_vals = approx.density
    else:
        app_vals = np.interp(grid, app_grid, approx.density)
    diff = np.abs(ref_vals - app_vals)
    if np.isinf(p):
        value = float(np.max(diff))
    else:
        value = float(np.trapezoid(diff**p, grid) ** (1.0 / p))
    return ErrorReport(kind="lp", value=value, parameter=float(p),
                       grid_points=len(grid))


# ---------------------------------------------------------------------------
# Heat capacity

@dataclass(frozen=True)
class PhysicalConstants:
    """Constants for the heat-capacity kernel; defaults are natural units."""

    k_B: float = 1.0
    hbar: float = 1.0
    c: float = 1.0


def phonon_heat_weight(omega, temperature, constants=PhysicalConstants()):
    """Per-mode heat capacity k_B x^2 e^{-x} / (1 - e^{-x})^2, x = hbar c w / k_B T."""
    omega = np.asarray(omega, dtype=float)
    x = constants.hbar * constants.c * omega / (constants.k_B * temperature)
    out = np.ones_like(x)
    big = x >= 1e-8
    xb = x[big]
    out[big] = xb * xb * np.exp(-xb) / np.expm1(-xb) ** 2
    return constants.k_B * out


def _frequencies(lam, what):
    lam = np.asarray(lam, dtype=float)
    scale = max(float(np.max(np.abs(lam))), 1.0) if lam.size else 1.0
    if np.any(lam < -1e-8 * scale):
        raise ValueError(
            f"negative {what} beyond tolerance: frequencies are sqrt(eigenvalue)"
        )
    return np.sqrt(np.clip(lam, 0.0, None))


def heat_capacity(obj, temperatures, constants=PhysicalConstants(),
                  normalize=True):
    """Heat capacity over a temperature sweep, normalized to peak 1.

    Accepts an ExactSpectrum (sum over modes), a SpectralDensityEstimate
    (trapezoid integral; grid points below zero are treated as zero-frequency,
    since only blur leakage puts density there), or a RitzQuadrature (weighted
    sum over nodes).
    """
    temperatures = np.asarray(temperatures, dtype=float)
    if np.any(temperatures <= 0):
        raise ValueError("temperatures must be positive")

    if isinstance(obj, ExactSpectrum):
        omega = _frequencies(obj.eigenvalues, "eigenvalue")
        curve = np.array([
            float(np.mean(phonon_heat_weight(omega, t, constants)))
            for t in temperatures
        ])
    elif isinstance(obj, RitzQuadrature):
        omega = _frequencies(obj.theta, "Ritz value")
        curve = np.array([
            float(obj.tau_sq @ phonon_heat_weight(omega, t, constants))
            for t in temperatures
        ])
    elif isinstance(obj, SpectralDensityEstimate):
        lam = obj.lambda_grid
        omega = np.sqrt(np.clip(lam, 0.0, None))
        curve = np.array([
            float(np.trapezoid(phonon_heat_weight(omega, t, constants) * obj.density, lam))
            for t in temperatures
        ])
    else:
        raise TypeError(f"cannot compute heat capacity from {type(obj).__name__}")

    if normalize:
        peak = float(np.max(np.abs(curve)))
        if peak > 0:
            curve = curve / peak
    return curve


def default_temperatures(t_min=0.05, t_max=5.0, n_pts=40):
    """Log-spaced temperature sweep covering the quantum-to-classical range."""
    if not 0 < t_min < t_max:
        raise ValueError("need 0 < t_min < t_max")
    return np.geomspace(t_min, t_max, n_pts)
