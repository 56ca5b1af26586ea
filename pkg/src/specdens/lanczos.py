"""Lanczos tridiagonalization and the Ritz-value density estimators.

An M-step run from a probe v0 produces the factorization
A V_M = V_M T_M + f_M e_M^T; the eigenpairs of T_M give a Gaussian quadrature
rule (theta_k, tau_k^2) for the probe-weighted spectral measure. Three closely
related estimators build on it: a Gaussian blur of the Ritz nodes, the
continued-fraction resolvent with a Lorentzian width, and a monotone-spline
derivative of the cumulative staircase.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.linalg import eigh_tridiagonal

from .density import (
    DEFAULT_GRID_POINTS,
    RegularizationKernel,
    SpectralDensityEstimate,
    interval_grid,
)
from .errors import NumericalFailure
from .stochastic import map_probes

# beta below this fraction of the tridiagonal scale means an invariant
# subspace was found (happy breakdown)
BREAKDOWN_RTOL = 1e-13

REORTH_MODES = ("full", "selective", "none")


@dataclass
class TridiagonalFactorization:
    """Output of an M-step Lanczos run: T_M plus the residual coupling.

    ``alpha`` is the diagonal (length M), ``beta`` the off-diagonal (length
    M-1), and ``beta_next`` the norm of the residual f_M, i.e. what would have
    become the next off-diagonal entry. ``basis`` holds the Lanczos vectors
    column-wise.
    """

    alpha: np.ndarray
    beta: np.ndarray
    beta_next: float
    basis: np.ndarray = None
    breakdown: bool = False

    @property
    def steps(self):
        return len(self.alpha)


@dataclass
class RitzQuadrature:
    """Gaussian quadrature rule for the probe spectral measure.

    ``tau_sq`` are the squared first components of the tridiagonal
    eigenvectors; they sum to 1.
    """

    theta: np.ndarray
    tau_sq: np.ndarray
    probe_index: int = None


def lanczos_factorize(op, v0, steps, reorth="full"):
    """Run ``steps`` Lanczos iterations from v0 with reorthogonalization.

    ``reorth``: "full" reorthogonalizes against the whole basis every step
    (two passes), "selective" only subtracts components that exceed the
    semi-orthogonality threshold sqrt(eps), "none" keeps the bare three-term
    recurrence. Breakdown (residual below BREAKDOWN_RTOL relative to the
    tridiagonal scale) truncates the factorization and is flagged.
    """
    if reorth not in REORTH_MODES:
        raise ValueError(f"unknown reorth mode {reorth!r}, expected one of {REORTH_MODES}")
    if steps < 1:
        raise ValueError("need at least one Lanczos step")
    if steps > op.dim:
        raise ValueError(f"steps={steps} exceeds matrix dimension {op.dim}")
    v0 = np.asarray(v0, dtype=float)
    nrm = np.linalg.norm(v0)
    if nrm == 0.0:
        raise ValueError("starting vector must be nonzero")

    dim = op.dim
    basis = np.empty((dim, steps))
    basis[:, 0] = v0 / nrm
    alpha = np.empty(steps)
    beta = np.empty(max(steps - 1, 0))
    sqrt_eps = np.sqrt(np.finfo(float).eps)
    beta_next = 0.0
    tscale = 0.0

    for j in range(steps):
        w = op.matvec(basis[:, j])
        if j > 0:
            w = w - beta[j - 1] * basis[:, j - 1]
        a = float(basis[:, j] @ w)
        w -= a * basis[:, j]
        alpha[j] = a
        if reorth == "full":
            for _ in range(2):
                w -= basis[:, : j + 1] @ (basis[:, : j + 1].T @ w)
        elif reorth == "selective":
            overlaps = basis[:, : j + 1].T @ w
            big = np.abs(overlaps) > sqrt_eps * np.linalg.norm(w)
            if big.any():
                w -= basis[:, : j + 1][:, big] @ overlaps[big]
        b = float(np.linalg.norm(w))
        if not (np.isfinite(a) and np.isfinite(b)):
            raise NumericalFailure(f"non-finite Lanczos recurrence at step {j + 1}")
        tscale = max(tscale, abs(a), b)
        if j == steps - 1:
            beta_next = b
        elif b <= BREAKDOWN_RTOL * max(tscale, 1.0):
            # invariant subspace found: truncate to the j+1 steps that exist
            return TridiagonalFactorization(
                alpha=alpha[: j + 1],
                beta=beta[:j],
                beta_next=0.0,
                basis=basis[:, : j + 1],
                breakdown=True,
            )
        else:
            beta[j] = b
            basis[:, j + 1] = w / b
    return TridiagonalFactorization(
        alpha=alpha, beta=beta, beta_next=beta_next, basis=basis
    )


def prefix_factorization(fact, steps):
    """The factorization the first ``steps`` Lanczos iterations would give.

    The three-term recurrence makes shorter runs exact prefixes of longer
    ones, so sweeps over several step counts can factorize once at the
    largest and slice.
    """
    m = min(steps, fact.steps)
    if m == fact.steps:
        return fact
    return TridiagonalFactorization(
        alpha=fact.alpha[:m].copy(),
        beta=fact.beta[: m - 1].copy(),
        beta_next=float(fact.beta[m - 1]),
        basis=None if fact.basis is None else fact.basis[:, :m],
    )


def ritz_quadrature(fact, probe_index=None):
    """Eigen-decompose T_M into Ritz values and first-component weights."""
    if fact.steps == 1:
        return RitzQuadrature(
            theta=fact.alpha.copy(), tau_sq=np.ones(1), probe_index=probe_index
        )
    theta, y = eigh_tridiagonal(fact.alpha, fact.beta)
    return RitzQuadrature(theta=theta, tau_sq=y[0, :] ** 2, probe_index=probe_index)


def ritz_residual_bounds(fact):
    """Ritz values with their residual bounds beta_next * |last component|."""
    if fact.steps == 1:
        return fact.alpha.copy(), np.array([abs(fact.beta_next)])
    theta, y = eigh_tridiagonal(fact.alpha, fact.beta)
    return theta, abs(fact.beta_next) * np.abs(y[-1, :])


def pool_ritz_quadratures(quads):
    """Union of per-probe quadrature nodes with weights averaged over probes."""
    if not quads:
        raise ValueError("no quadratures to pool")
    theta = np.concatenate([q.theta for q in quads])
    tau = np.concatenate([q.tau_sq for q in quads]) / len(quads)
    order = np.argsort(theta)
    return RitzQuadrature(theta=theta[order], tau_sq=tau[order])


def blur_nodes(theta, weights, grid, kernel, block=512):
    """Sum of weighted kernel bumps, chunked so large node sets stay in cache."""
    out = np.zeros_like(grid, dtype=float)
    for start in range(0, len(theta), block):
        th = theta[start : start + block]
        wt = weights[start : start + block]
        out += kernel(grid[None, :] - th[:, None]).T @ wt
    return out


def _probe_quadratures(op, steps, source, n_vec, threads, reorth):
    def one(l):
        fact = lanczos_factorize(op, source.draw(l), steps, reorth=reorth)
        return ritz_quadrature(fact, probe_index=l)

    return map_probes(one, n_vec, threads)


def lanczos_dos(op, interval, steps, source, n_vec, sigma, grid=None,
                threads=None, reorth="full"):
    """Gaussian-blurred average of per-probe Ritz quadratures.

    Works directly on the original operator (no spectral map needed); the
    output is non-negative by construction.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if grid is None:
        grid = interval_grid(interval, DEFAULT_GRID_POINTS)
    grid = np.asarray(grid, dtype=float)
    pooled = pool_ritz_quadratures(
        _probe_quadratures(op, steps, source, n_vec, threads, reorth)
    )
    kernel = RegularizationKernel("gaussian", sigma)
    density = blur_nodes(pooled.theta, pooled.tau_sq, grid, kernel)
    return SpectralDensityEstimate.from_original(
        grid, density, interval, method="lanczos",
        params={"M": steps, "n_vec": n_vec, "sigma": sigma,
                "ritz_nodes": pooled.theta, "ritz_weights": pooled.tau_sq},
    )


def continued_fraction_resolvent(alpha, beta, z):
    """Bottom-up continued fraction for e1^T (zI - T)^{-1} e1, vectorized in z."""
    z = np.asarray(z, dtype=complex)
    f = 1.0 / (z - alpha[-1])
    for j in range(len(alpha) - 2, -1, -1):
        f = 1.0 / (z - alpha[j] - beta[j] ** 2 * f)
    return f


def tridiagonal_resolvent_first(alpha, beta, z):
    """Solve (zI - T) w = e1 by the Thomas algorithm, vectorized in z.

    Returns (w_0, w_{M-1}): the first entry cross-checks the continued
    fraction, the last feeds the truncation diagnostic beta_next * |w_{M-1}|.
    """
    z = np.asarray(z, dtype=complex)
    m = len(alpha)
    if m == 1:
        w = 1.0 / (z - alpha[0])
        return w, w
    nz = z.shape
    cp = np.empty((m - 1,) + nz, dtype=complex)
    dp = np.empty((m,) + nz, dtype=complex)
    denom = z - alpha[0]
    cp[0] = -beta[0] / denom
    dp[0] = 1.0 / denom
    for j in range(1, m):
        denom = (z - alpha[j]) + beta[j - 1] * cp[j - 1]
        if j < m - 1:
            cp[j] = -beta[j] / denom
        dp[j] = beta[j - 1] * dp[j - 1] / denom
    w_last = dp[m - 1]
    w = w_last
    w_first = None
    for j in range(m - 2, -1, -1):
        w = dp[j] - cp[j] * w
        if j == 0:
            w_first = w
    return w_first, w_last


def haydock_dos(op, interval, steps, source, n_vec, eta=None, grid=None,
                threads=None, reorth="full"):
    """Lorentzian-regularized DOS from the (1,1) resolvent continued fraction.

    ``eta`` defaults to half a grid spacing, (lambda_ub - lambda_lb)/(2 n_pts),
    so the default resolution tracks the grid. The neglected truncation term
    is reported as params["truncation_indicator"] = max beta_next * |w_{M-1}|.
    """
    if grid is None:
        grid = interval_grid(interval, DEFAULT_GRID_POINTS)
    grid = np.asarray(grid, dtype=float)
    if eta is None:
        eta = interval.width / (2.0 * len(grid))
    if not eta > 0:
        raise ValueError("eta must be positive")
    z = grid + 1j * eta

    def one(l):
        fact = lanczos_factorize(op, source.draw(l), steps, reorth=reorth)
        f = continued_fraction_resolvent(fact.alpha, fact.beta, z)
        _, w_last = tridiagonal_resolvent_first(fact.alpha, fact.beta, z)
        trunc = fact.beta_next * float(np.max(np.abs(w_last)))
        return -np.imag(f) / np.pi, trunc

    results = map_probes(one, n_vec, threads)
    density = np.mean([r[0] for r in results], axis=0)
    return SpectralDensityEstimate.from_original(
        grid, density, interval, method="haydock",
        params={"M": steps, "n_vec": n_vec, "eta": eta,
                "truncation_indicator": max(r[1] for r in results)},
    )


def cdos_refine(quad, interval, grid=None, merge_rtol=1e-10):
    """Differentiate a monotone spline through the cumulative staircase.

    The pooled quadrature defines a staircase CDOS with jump tau_k^2 at
    theta_k; a shape-preserving cubic through the stair midpoints (anchored at
    zero/total mass on the interval ends) gives the CDF. Each grid point gets
    the mean derivative over its cell, (cdf(right) - cdf(left)) / width, so
    spline ramps narrower than a cell (pooled runs put near-converged Ritz
    values from different probes arbitrarily close together) keep their mass
    instead of aliasing. Nodes closer than merge_rtol * interval width are
    merged at their weighted mean first.
    """
    if grid is None:
        grid = interval_grid(interval, DEFAULT_GRID_POINTS)
    grid = np.asarray(grid, dtype=float)
    theta = np.asarray(quad.theta, dtype=float)
    tau = np.asarray(quad.tau_sq, dtype=float)
    order = np.argsort(theta)
    theta, tau = theta[order], tau[order]

    tol = merge_rtol * interval.width
    nodes, weights = [], []
    for th, wt in zip(theta, tau):
        if nodes and th - nodes[-1] <= tol:
            total = weights[-1] + wt
            nodes[-1] = (nodes[-1] * weights[-1] + th * wt) / total
            weights[-1] = total
        else:
            nodes.append(th)
            weights.append(wt)
    if len(nodes) < 2:
        raise ValueError("need at least 2 distinct Ritz nodes for the spline")
    nodes = np.asarray(nodes)
    weights = np.asarray(weights)
    total = weights.sum()

    # stair midpoints: cumulative mass just before the node plus half the jump
    cumulative = np.cumsum(weights)
    midpoints = cumulative - 0.5 * weights
    lo = min(interval.lambda_lb, nodes[0] - tol - np.finfo(float).tiny)
    hi = max(interval.lambda_ub, nodes[-1] + tol + np.finfo(float).tiny)
    xs = np.concatenate([[lo], nodes, [hi]])
    ys = np.concatenate([[0.0], midpoints, [total]])
    cdf = PchipInterpolator(xs, ys)
    if grid.size < 2:
        density = np.clip(cdf.derivative()(grid), 0.0, None)
    else:
        edges = np.concatenate([
            [grid[0] - 0.5 * (grid[1] - grid[0])],
            0.5 * (grid[1:] + grid[:-1]),
            [grid[-1] + 0.5 * (grid[-1] - grid[-2])],
        ])
        # the spline is only a CDF inside [lo, hi]; it is flat beyond
        vals = cdf(np.clip(edges, lo, hi))
        density = np.clip(np.diff(vals) / np.diff(edges), 0.0, None)
    return SpectralDensityEstimate.from_original(
        grid, density, interval, method="cdos",
        params={"cdf": cdf, "nodes": nodes, "node_weights": weights},
    )


def cdos_dos(op, interval, steps, source, n_vec, grid=None, threads=None,
             reorth="full"):
    """Pool per-probe Ritz quadratures and refine the cumulative staircase."""
    pooled = pool_ritz_quadratures(
        _probe_quadratures(op, steps, source, n_vec, threads, reorth)
    )
    est = cdos_refine(pooled, interval, grid=grid)
    est.params.update(
        {"M": steps, "n_vec": n_vec,
         "ritz_nodes": pooled.theta, "ritz_weights": pooled.tau_sq}
    )
    return est
