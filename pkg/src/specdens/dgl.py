"""Delta-Gauss-Legendre estimator.

A Gaussian bump centered at t is expanded in Legendre polynomials on [-1, 1]:
gamma_k(t) = integral of L_k(s) exp(-((s - t)/sigma)^2 / 2) ds. The gamma obey
a recurrence seeded by an erf formula, coupled to partial sums psi_k; it is
numerically unstable once the coefficients have decayed, so it halts at the
first k >= 1 with |gamma_{k-1}| + |gamma_k| <= k * tol. Combining gamma with
Legendre moments of the mapped operator evaluates the Gaussian-regularized
density at each center with one shared moment sequence.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .density import SpectralDensityEstimate, unit_grid
from .errors import NumericalFailure
from .kpm import MomentSequence  # noqa: F401  (type used by callers)

DEFAULT_DGL_TOL = 1e-6


@dataclass(frozen=True)
class DGLCoefficients:
    """Gamma and psi sequences for one expansion center, up to the cutoff."""

    gamma: np.ndarray
    psi: np.ndarray
    effective_degree: int
    center: float
    sigma: float


def gamma_zero(t, sigma):
    """gamma_0(t): the Gaussian bump's mass over [-1, 1], via erf."""
    t = np.asarray(t, dtype=float)
    s = np.sqrt(2.0) * sigma
    return sigma * np.sqrt(np.pi / 2.0) * (erf((1.0 - t) / s) + erf((1.0 + t) / s))


def _dgl_gamma_table(centers, sigma, max_degree, tol):
    """Vectorized gamma recurrence over many centers at once.

    Returns (gamma, psi, effective_degree) with gamma of shape
    (max_degree + 1, n_centers); rows past a center's cutoff are zero, so
    truncated sums over k need no masking.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if max_degree < 0:
        raise ValueError("max degree must be non-negative")
    t = np.asarray(centers, dtype=float)
    gamma = np.zeros((max_degree + 1, t.size))
    psi = np.zeros((max_degree + 1, t.size))
    gamma[0] = gamma_zero(t, sigma)
    effective = np.full(t.size, max_degree)
    active = np.ones(t.size, dtype=bool)

    exp_lo = np.exp(-0.5 * ((1.0 - t) / sigma) ** 2)
    exp_hi = np.exp(-0.5 * ((1.0 + t) / sigma) ** 2)
    psi_k = np.zeros(t.size)        # psi_0
    psi_next = gamma[0].copy()      # psi_1
    if max_degree >= 1:
        psi[1] = psi_next

    for k in range(max_degree):
        if k >= 1:
            halted = active & (np.abs(gamma[k - 1]) + np.abs(gamma[k]) <= k * tol)
            effective[halted] = k
            active &= ~halted
            if not active.any():
                break
        boundary_term = exp_lo - (-1.0) ** k * exp_hi
        gamma_prev = gamma[k - 1] if k >= 1 else 0.0
        nxt = ((2 * k + 1) / (k + 1.0)
               * (sigma * sigma * (psi_k - boundary_term) + t * gamma[k])
               - k / (k + 1.0) * gamma_prev)
        if not np.all(np.isfinite(nxt[active])):
            raise NumericalFailure(f"gamma recurrence lost stability at k={k + 1}")
        gamma[k + 1, active] = nxt[active]
        j = k + 1
        psi_k, psi_next = psi_next, (2 * j + 1) * gamma[j] + psi_k
        if j + 1 <= max_degree:
            psi[j + 1, active] = psi_next[active]
    return gamma, psi, effective


def compute_dgl_coefficients(t, sigma, max_degree, tol=DEFAULT_DGL_TOL):
    """Gamma coefficients for one center, truncated at the stability cutoff."""
    if not -1.0 < t < 1.0:
        raise ValueError("expansion center must lie inside (-1, 1)")
    gamma, psi, effective = _dgl_gamma_table(
        np.array([t]), sigma, max_degree, tol
    )
    k = int(effective[0])
    return DGLCoefficients(
        gamma=gamma[: k + 1, 0].copy(),
        psi=psi[: k + 1, 0].copy(),
        effective_degree=k,
        center=float(t),
        sigma=float(sigma),
    )


def evaluate_dgl_dos(moments, interval, sigma, grid=None, tol=DEFAULT_DGL_TOL):
    """Gaussian-regularized density from Legendre moments.

    phi(t_i) = (1/n) (2 pi sigma_m^2)^{-1/2} sum_k (k + 1/2) gamma_k(t_i) zeta_k
    in mapped coordinates, where sigma is given in original coordinates and
    sigma_m = sigma / d. One gamma table serves every center; each center's
    sum self-truncates at its cutoff because later gamma rows are zero.
    """
    if moments.basis != "legendre":
        raise ValueError("DGL evaluation needs legendre moments")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    t = unit_grid() if grid is None else np.asarray(grid, dtype=float)
    if np.any(np.abs(t) >= 1.0):
        raise ValueError("evaluation points must lie inside (-1, 1)")
    sigma_m = sigma / interval.halfwidth
    gamma, _, effective = _dgl_gamma_table(t, sigma_m, moments.degree, tol)
    k = np.arange(moments.degree + 1)
    weighted = (k + 0.5) * moments.zeta
    values = (weighted @ gamma) / (moments.n * np.sqrt(2.0 * np.pi) * sigma_m)
    return SpectralDensityEstimate.from_mapped(
        t, values, interval, method="dgl",
        params={"degree": moments.degree, "sigma": sigma,
                "effective_degree": int(effective.max())},
    )
