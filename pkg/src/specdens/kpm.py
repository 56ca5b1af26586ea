"""Kernel polynomial method family on the mapped operator B = (A - cI)/d.

Raw moments zeta_k = (1/n_vec) sum_l v0^T P_k(B) v0 estimate Tr P_k(B) for
Chebyshev or Legendre polynomials P_k. The evaluators turn them into density
estimates on the unit interval: plain KPM (optionally Jackson damped), the
half-top-coefficient spectroscopic variant, per-point-degree Delta-Chebyshev,
and the Legendre-basis KPML. A product-formula moment path halves the MATVEC
count for the Chebyshev moments.
"""

from dataclasses import dataclass

import numpy as np

from .density import (
    DEFAULT_GRID_POINTS,
    EDGE_GUARD,
    SpectralDensityEstimate,
    unit_grid,
)
from .errors import NumericalFailure
from .stochastic import map_probes

MOMENT_BASES = ("chebyshev", "legendre")

SPECTRUM_ESCAPE_HINT = (
    "the recurrence produced non-finite moments, which usually means the "
    "spectrum escapes the mapped interval [-1, 1]; widen the spectral "
    "interval (larger safety margin or more Lanczos steps for the bounds)"
)


@dataclass(frozen=True)
class MomentSequence:
    """Averaged raw moments zeta_k for k = 0..degree in a polynomial basis."""

    zeta: np.ndarray
    degree: int
    n_vec: int
    basis: str
    n: int

    def __post_init__(self):
        if self.basis not in MOMENT_BASES:
            raise ValueError(f"unknown moment basis {self.basis!r}")
        if len(self.zeta) != self.degree + 1:
            raise ValueError("moment array length must be degree + 1")

    def truncated(self, degree):
        """The moments a lower-degree run would have produced (exact prefix)."""
        if degree > self.degree:
            raise ValueError(f"cannot extend degree {self.degree} to {degree}")
        return MomentSequence(
            zeta=self.zeta[: degree + 1],
            degree=degree,
            n_vec=self.n_vec,
            basis=self.basis,
            n=self.n,
        )


@dataclass(frozen=True)
class DampingKernel:
    """Coefficient damping: identity or the Jackson kernel."""

    kind: str = "none"

    def __post_init__(self):
        if self.kind not in ("none", "jackson"):
            raise ValueError(f"unknown damping kind {self.kind!r}")

    def coefficients(self, degree):
        if self.kind == "none":
            return np.ones(degree + 1)
        return jackson_damping(degree)


def _as_damping(damping):
    if isinstance(damping, DampingKernel):
        return damping
    return DampingKernel(kind=damping)


def jackson_damping(degree):
    """Jackson damping factors g_k for k = 0..degree.

    g_0 = 1 and the factors decrease monotonically; damping a truncated
    Chebyshev expansion with them suppresses the Gibbs oscillation.
    """
    k = np.arange(degree + 1)
    a = np.pi / (degree + 2)
    return ((1.0 - k / (degree + 2)) * np.sin(a) * np.cos(k * a)
            + np.sin(k * a) * np.cos(a) / (degree + 2)) / np.sin(a)


def _chebyshev_probe_moments(op, degree, v0):
    zeta = np.empty(degree + 1)
    zeta[0] = v0 @ v0
    if degree == 0:
        return zeta
    v_prev = v0
    v_cur = op.matvec(v0)
    zeta[1] = v0 @ v_cur
    for k in range(2, degree + 1):
        v_cur, v_prev = 2.0 * op.matvec(v_cur) - v_prev, v_cur
        zeta[k] = v0 @ v_cur
    return zeta


def _legendre_probe_moments(op, degree, v0):
    zeta = np.empty(degree + 1)
    zeta[0] = v0 @ v0
    if degree == 0:
        return zeta
    v_prev = v0
    v_cur = op.matvec(v0)
    zeta[1] = v0 @ v_cur
    for k in range(1, degree):
        v_cur, v_prev = (
            ((2 * k + 1) * op.matvec(v_cur) - k * v_prev) / (k + 1.0),
            v_cur,
        )
        zeta[k + 1] = v0 @ v_cur
    return zeta


def _average_moments(op, degree, source, n_vec, threads, probe_fn, basis):
    if n_vec < 1:
        raise ValueError("need at least one probe vector")
    if degree < 0:
        raise ValueError("degree must be non-negative")
    per_probe = map_probes(
        lambda l: probe_fn(op, degree, source.draw(l)), n_vec, threads
    )
    zeta = np.mean(per_probe, axis=0)
    if not np.all(np.isfinite(zeta)):
        raise NumericalFailure(SPECTRUM_ESCAPE_HINT)
    return MomentSequence(
        zeta=zeta, degree=degree, n_vec=n_vec, basis=basis, n=op.dim
    )


def compute_chebyshev_moments(op, degree, source, n_vec, threads=None):
    """Chebyshev moments via the three-term recurrence: degree MATVECs/probe."""
    return _average_moments(
        op, degree, source, n_vec, threads, _chebyshev_probe_moments, "chebyshev"
    )


def compute_legendre_moments(op, degree, source, n_vec, threads=None):
    """Legendre moments via (k+1)L_{k+1} = (2k+1)tL_k - kL_{k-1}."""
    return _average_moments(
        op, degree, source, n_vec, threads, _legendre_probe_moments, "legendre"
    )


def moments_via_product_formula(op, degree, source, n_vec, threads=None,
                                max_stored_vectors=None):
    """Chebyshev moments from half the MATVECs.

    Runs the recurrence only up to p = ceil(degree/2), storing the vectors,
    and recovers the upper half from T_{a+b} = 2 T_a T_b - T_{|a-b|}:
    zeta_{a+b} = 2 v_a^T v_b - zeta_{a-b}. Costs p MATVECs and p+1 stored
    vectors per probe.
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    p = (degree + 1) // 2
    if max_stored_vectors is not None and p + 1 > max_stored_vectors:
        raise ValueError(
            f"product formula needs {p + 1} stored vectors, cap is {max_stored_vectors}"
        )

    def one(l):
        v0 = source.draw(l)
        stored = np.empty((p + 1, len(v0)))
        stored[0] = v0
        if p >= 1:
            stored[1] = op.matvec(stored[0])
        for j in range(2, p + 1):
            stored[j] = 2.0 * op.matvec(stored[j - 1]) - stored[j - 2]
        zeta = np.empty(degree + 1)
        for k in range(0, p + 1):
            zeta[k] = v0 @ stored[k]
        for k in range(p + 1, degree + 1):
            a = (k + 1) // 2
            b = k - a
            zeta[k] = 2.0 * (stored[a] @ stored[b]) - zeta[a - b]
        return zeta

    if n_vec < 1:
        raise ValueError("need at least one probe vector")
    zeta = np.mean(map_probes(one, n_vec, threads), axis=0)
    if not np.all(np.isfinite(zeta)):
        raise NumericalFailure(SPECTRUM_ESCAPE_HINT)
    return MomentSequence(
        zeta=zeta, degree=degree, n_vec=n_vec, basis="chebyshev", n=op.dim
    )


def moments_to_coefficients(moments, damping="none"):
    """Chebyshev expansion coefficients mu_k = (2 - delta_k0)/(n pi) zeta_k g_k."""
    if moments.basis != "chebyshev":
        raise ValueError("expansion coefficients need chebyshev moments")
    g = _as_damping(damping).coefficients(moments.degree)
    prefactor = np.full(moments.degree + 1, 2.0 / (moments.n * np.pi))
    prefactor[0] = 1.0 / (moments.n * np.pi)
    return prefactor * moments.zeta * g


def evaluate_chebyshev_series(coeffs, t):
    """Clenshaw evaluation of sum_k coeffs[k] T_k(t), vectorized over t."""
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    for c in coeffs[:0:-1]:
        b1, b2 = 2.0 * t * b1 - b2 + c, b1
    return t * b1 - b2 + coeffs[0]


def evaluate_legendre_series(coeffs, t):
    """Forward-recurrence evaluation of sum_k coeffs[k] L_k(t)."""
    acc = coeffs[0] * np.ones_like(t)
    if len(coeffs) == 1:
        return acc
    l_prev = np.ones_like(t)
    l_cur = np.asarray(t, dtype=float)
    acc = acc + coeffs[1] * l_cur
    for k in range(1, len(coeffs) - 1):
        l_cur, l_prev = ((2 * k + 1) * t * l_cur - k * l_prev) / (k + 1.0), l_cur
        acc += coeffs[k + 1] * l_cur
    return acc


def _checked_unit_points(grid):
    t = unit_grid(DEFAULT_GRID_POINTS) if grid is None else np.asarray(grid, dtype=float)
    if np.any(np.abs(t) > 1.0 - EDGE_GUARD):
        raise ValueError(
            f"evaluation points must satisfy |t| <= 1 - {EDGE_GUARD} "
            "(the Chebyshev weight is singular at the interval edges)"
        )
    return t


def evaluate_kpm_dos(coeffs, interval, grid=None):
    """KPM density sum_k mu_k T_k(t) / sqrt(1 - t^2) on a unit-interval grid."""
    t = _checked_unit_points(grid)
    values = evaluate_chebyshev_series(coeffs, t) / np.sqrt(1.0 - t * t)
    return SpectralDensityEstimate.from_mapped(
        t, values, interval, method="kpm", params={"degree": len(coeffs) - 1}
    )


def spectroscopic_dos(moments, interval, grid=None):
    """Undamped KPM with the top coefficient halved.

    Pointwise the deviation from plain KPM is exactly
    -mu_M T_M(t) / (2 sqrt(1 - t^2)).
    """
    coeffs = moments_to_coefficients(moments, damping="none")
    if moments.degree >= 1:
        coeffs = coeffs.copy()
        coeffs[-1] *= 0.5
    est = evaluate_kpm_dos(coeffs, interval, grid=grid)
    est.method = "spectroscopic"
    return est


def delta_chebyshev_dos(moments, interval, grid=None, degrees=None):
    """Per-point-degree truncations of the undamped Chebyshev expansion.

    ``degrees`` gives the truncation degree at each grid point (default: the
    full moment degree everywhere, which reproduces undamped KPM exactly).
    Points sharing a degree are evaluated together through the same Clenshaw
    kernel as KPM, so the uniform case is bit-identical to it.
    """
    t = _checked_unit_points(grid)
    if degrees is None:
        degrees = np.full(len(t), moments.degree, dtype=int)
    degrees = np.asarray(degrees, dtype=int)
    if degrees.shape != t.shape:
        raise ValueError("degrees must match the grid point for point")
    if np.any(degrees < 0) or np.any(degrees > moments.degree):
        raise ValueError(f"per-point degrees must lie in [0, {moments.degree}]")
    coeffs = moments_to_coefficients(moments, damping="none")
    values = np.empty_like(t)
    for d in np.unique(degrees):
        mask = degrees == d
        ts = t[mask]
        values[mask] = evaluate_chebyshev_series(coeffs[: d + 1], ts) / np.sqrt(
            1.0 - ts * ts
        )
    return SpectralDensityEstimate.from_mapped(
        t, values, interval, method="delta-cheb",
        params={"degree": moments.degree, "degrees": degrees},
    )


def evaluate_kpml_dos(moments, interval, grid=None):
    """Legendre-basis density sum_k (k + 1/2) zeta_k/n L_k(t) (no edge weight)."""
    if moments.basis != "legendre":
        raise ValueError("KPML evaluation needs legendre moments")
    t = _checked_unit_points(grid)
    k = np.arange(moments.degree + 1)
    coeffs = (k + 0.5) * moments.zeta / moments.n
    values = evaluate_legendre_series(coeffs, t)
    return SpectralDensityEstimate.from_mapped(
        t, values, interval, method="kpml", params={"degree": moments.degree}
    )
