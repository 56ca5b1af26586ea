"""Shared value types: spectral intervals, regularization kernels, density estimates.

Every density in this package is normalized so that it integrates to 1 over the
spectrum: the exact density of an n x n matrix puts mass 1/n on each eigenvalue,
and all estimators target that convention.
"""

from dataclasses import dataclass, field

import numpy as np

# Grid points are kept strictly inside (-1, 1); closer than this to the edge the
# inverse-sqrt Chebyshev weight is evaluated at the clamped distance instead.
EDGE_GUARD = 1e-6

DEFAULT_GRID_POINTS = 200


@dataclass(frozen=True)
class SpectralInterval:
    """An interval [lambda_lb, lambda_ub] known to contain the spectrum."""

    lambda_lb: float
    lambda_ub: float

    def __post_init__(self):
        if not self.lambda_lb < self.lambda_ub:
            raise ValueError(
                f"empty spectral interval: [{self.lambda_lb}, {self.lambda_ub}]"
            )

    @property
    def center(self):
        return 0.5 * (self.lambda_lb + self.lambda_ub)

    @property
    def halfwidth(self):
        return 0.5 * (self.lambda_ub - self.lambda_lb)

    @property
    def width(self):
        return self.lambda_ub - self.lambda_lb

    def widened(self, margin):
        """Return the interval widened symmetrically by a relative margin."""
        h = (1.0 + margin) * self.halfwidth
        return SpectralInterval(self.center - h, self.center + h)

    def to_unit(self, lam):
        """Map original coordinates onto [-1, 1]."""
        return (np.asarray(lam, dtype=float) - self.center) / self.halfwidth

    def from_unit(self, t):
        """Map unit coordinates back to original coordinates."""
        return self.center + self.halfwidth * np.asarray(t, dtype=float)


@dataclass(frozen=True)
class RegularizationKernel:
    """A unit-mass blurring kernel, Gaussian or Lorentzian, of a given width."""

    kind: str  # "gaussian" | "lorentzian"
    width: float

    def __post_init__(self):
        if self.kind not in ("gaussian", "lorentzian"):
            raise ValueError(f"unknown kernel kind: {self.kind!r}")
        if not self.width > 0:
            raise ValueError("kernel width must be positive")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        w = self.width
        if self.kind == "gaussian":
            return np.exp(-0.5 * (x / w) ** 2) / np.sqrt(2.0 * np.pi * w * w)
        return (w / np.pi) / (x * x + w * w)


def unit_grid(n_pts=DEFAULT_GRID_POINTS):
    """Cell-centered uniform grid strictly inside (-1, 1).

    The half-cell inset keeps the endpoints away from the inverse-sqrt
    singularity of the Chebyshev weight, which uniform-endpoint grids would
    sample at enormous values.
    """
    if n_pts < 2:
        raise ValueError("need at least 2 grid points")
    h = 2.0 / n_pts
    return -1.0 + (np.arange(n_pts) + 0.5) * h


def interval_grid(interval, n_pts=DEFAULT_GRID_POINTS, pad=0.0):
    """Cell-centered uniform grid over the interval, optionally padded."""
    lo = interval.lambda_lb - pad
    hi = interval.lambda_ub + pad
    h = (hi - lo) / n_pts
    return lo + (np.arange(n_pts) + 0.5) * h


@dataclass
class SpectralDensityEstimate:
    """A spectral density estimate on a grid, in mapped and original coordinates.

    ``grid``/``values`` live in the coordinates the estimator worked in (unit
    coordinates for the polynomial methods, original coordinates otherwise);
    ``lambda_grid``/``density`` are always in original coordinates, rescaled so
    that the density integrates against d(lambda).
    """

    grid: np.ndarray
    values: np.ndarray
    lambda_grid: np.ndarray
    density: np.ndarray
    method: str
    interval: SpectralInterval
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("grid", "lambda_grid"):
            g = getattr(self, name)
            if np.any(np.diff(g) <= 0):
                raise ValueError(f"{name} must be strictly increasing")

    @classmethod
    def from_mapped(cls, grid, values, interval, method, params=None):
        """Build an estimate computed on the unit interval, unmapping by 1/d."""
        d = interval.halfwidth
        return cls(
            grid=np.asarray(grid, dtype=float),
            values=np.asarray(values, dtype=float),
            lambda_grid=interval.from_unit(grid),
            density=np.asarray(values, dtype=float) / d,
            method=method,
            interval=interval,
            params=dict(params or {}),
        )

    @classmethod
    def from_original(cls, lambda_grid, density, interval, method, params=None):
        """Build an estimate computed directly in original coordinates."""
        lam = np.asarray(lambda_grid, dtype=float)
        den = np.asarray(density, dtype=float)
        return cls(
            grid=lam,
            values=den,
            lambda_grid=lam,
            density=den,
            method=method,
            interval=interval,
            params=dict(params or {}),
        )

    def mass(self):
        """Trapezoidal integral of the density over its lambda grid."""
        return float(np.trapezoid(self.density, self.lambda_grid))
