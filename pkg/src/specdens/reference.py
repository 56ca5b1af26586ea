"""Dense ground-truth oracles for tests and desk-scale acceptance runs."""

from dataclasses import dataclass

import numpy as np

from .density import SpectralDensityEstimate, SpectralInterval
from .errors import OracleCapExceeded

DENSE_ORACLE_CAP = 2000


@dataclass(frozen=True)
class ExactSpectrum:
    """Sorted eigenvalues (and optionally eigenvectors) of a symmetric matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = None

    @property
    def n(self):
        return len(self.eigenvalues)


def _as_dense(a):
    if isinstance(a, np.ndarray):
        return a
    if hasattr(a, "toarray"):
        return a.toarray()
    # operator exposed only through matvec: apply to identity columns
    dim = a.dim
    cols = np.empty((dim, dim))
    eye = np.eye(dim)
    for j in range(dim):
        cols[:, j] = a.matvec(eye[:, j])
    return cols


def dense_eigensolve(a, n_cap=DENSE_ORACLE_CAP, want_vectors=False):
    """Full symmetric eigendecomposition, refused above the size cap."""
    dense = _as_dense(a)
    n = dense.shape[0]
    if n > n_cap:
        raise OracleCapExceeded(
            f"dense reference eigensolve requested for n={n}, cap is {n_cap}"
        )
    if want_vectors:
        w, u = np.linalg.eigh(dense)
        return ExactSpectrum(eigenvalues=w, eigenvectors=u)
    return ExactSpectrum(eigenvalues=np.linalg.eigvalsh(dense))


def spectrum_interval(spectrum, margin=0.0):
    """The tight interval around the spectrum, optionally widened."""
    lo = float(spectrum.eigenvalues[0])
    hi = float(spectrum.eigenvalues[-1])
    if hi <= lo:
        pad = max(abs(lo), 1.0) * 1e-8
        lo, hi = lo - pad, hi + pad
    return SpectralInterval(lo, hi).widened(margin)


def exact_regularized_dos(spectrum, kernel, grid, interval=None):
    """The blurred density phi(t) = (1/n) sum_j kernel(t - lambda_j)."""
    grid = np.asarray(grid, dtype=float)
    lam = spectrum.eigenvalues
    values = np.zeros_like(grid)
    for start in range(0, len(lam), 512):
        chunk = lam[start : start + 512]
        values += kernel(grid[None, :] - chunk[:, None]).sum(axis=0)
    values /= spectrum.n
    if interval is None:
        interval = spectrum_interval(spectrum)
    return SpectralDensityEstimate.from_original(
        grid, values, interval, method="exact",
        params={"kernel": kernel.kind, "width": kernel.width},
    )


def eigenvalue_count(spectrum, a, b):
    """Number of eigenvalues in the closed interval [a, b]."""
    if a > b:
        raise ValueError("interval must satisfy a <= b")
    lam = spectrum.eigenvalues
    return int(np.searchsorted(lam, b, side="right") - np.searchsorted(lam, a, side="left"))


def histogram_dos(spectrum, n_bins, interval=None):
    """Binned density counts/(n * binwidth); integrates to 1 exactly.

    Returns (bin_edges, density).
    """
    if n_bins < 1:
        raise ValueError("need at least one bin")
    if interval is None:
        interval = spectrum_interval(spectrum)
    edges = np.linspace(interval.lambda_lb, interval.lambda_ub, n_bins + 1)
    counts, _ = np.histogram(spectrum.eigenvalues, bins=edges)
    width = edges[1] - edges[0]
    return edges, counts / (spectrum.n * width)
