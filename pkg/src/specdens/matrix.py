"""Sparse symmetric matrices, the model problem generator, and spectral intervals.

Operators throughout the package are duck-typed: anything with a ``dim``
attribute and a ``matvec(x)`` method works. This module provides the concrete
matrix type, the affine spectral map B = (A - cI)/d, a matvec counter, and
Lanczos-based eigenvalue bounds.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .density import SpectralInterval
from .errors import NumericalFailure

# Bump parameters (cx, cy, height, width) for the bundled 30 x 25 test problem.
# Tuned once against the dense oracle and frozen so every run sees the same
# matrix: the shallow well at (4,5) pulls a handful of eigenvalues next to
# zero (lambda_min ~ 5e-3, a hard region for polynomial expansions of
# functions of omega = sqrt(lambda)), the sharp barrier at (25,15) splits
# localized states off the top of the band, and the fine-resolution DOS
# shows a few dozen sharp peaks.
DEFAULT_BUMP_HEIGHT = 5.0
DEFAULT_BUMP_WIDTH = 1.5
DEFAULT_BUMPS = (
    (4.0, 5.0, -0.13, 4.0),
    (25.0, 15.0, DEFAULT_BUMP_HEIGHT, DEFAULT_BUMP_WIDTH),
)

DEFAULT_LANCZOS_STEPS = 20
DEFAULT_INTERVAL_MARGIN = 0.01


@dataclass
class SparseSymmetricMatrix:
    """A real symmetric matrix in CSR form (both triangles stored).

    ``symmetric_storage`` records whether the source supplied only one
    triangle; the stored CSR is always the expanded, exactly symmetric matrix.
    """

    csr: sp.csr_array
    symmetric_storage: bool = False

    @classmethod
    def from_coo(cls, n, rows, cols, vals, symmetric_storage=False):
        """Assemble from coordinate triplets; duplicates are summed.

        With ``symmetric_storage`` the triplets describe one triangle and the
        transposed off-diagonal entries are added. Without it, the given data
        must already be exactly symmetric.
        """
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        if rows.size and (rows.min() < 0 or cols.min() < 0
                          or rows.max() >= n or cols.max() >= n):
            raise ValueError("coordinate index out of range")
        if symmetric_storage:
            off = rows != cols
            rows, cols = (np.concatenate([rows, cols[off]]),
                          np.concatenate([cols, rows[off]]))
            vals = np.concatenate([vals, vals[off]])
        a = sp.coo_array((vals, (rows, cols)), shape=(n, n)).tocsr()
        a.sum_duplicates()
        mat = cls(csr=a, symmetric_storage=symmetric_storage)
        if not mat.is_symmetric():
            raise ValueError("matrix data is not symmetric")
        return mat

    @classmethod
    def from_dense(cls, a):
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("dense input must be square")
        if not np.array_equal(a, a.T):
            raise ValueError("dense input must be exactly symmetric")
        return cls(csr=sp.csr_array(a))

    @property
    def n(self):
        return self.csr.shape[0]

    @property
    def dim(self):
        return self.csr.shape[0]

    @property
    def row_ptr(self):
        return self.csr.indptr

    @property
    def col_idx(self):
        return self.csr.indices

    @property
    def values(self):
        return self.csr.data

    def matvec(self, x):
        return self.csr @ x

    def toarray(self):
        return self.csr.toarray()

    def is_symmetric(self):
        # exact equality: expansion duplicates values bit-for-bit
        return (self.csr != self.csr.T).nnz == 0


class MappedOperator:
    """The affine map B = (A - cI)/d of an operator onto the unit interval."""

    def __init__(self, op, interval):
        self.op = op
        self.interval = interval
        self.c = interval.center
        self.d = interval.halfwidth

    @property
    def dim(self):
        return self.op.dim

    def matvec(self, x):
        return (self.op.matvec(x) - self.c * x) / self.d


class MatvecCounter:
    """Wrap an operator and count matvec calls (for cost reporting)."""

    def __init__(self, op):
        self.op = op
        self.count = 0

    @property
    def dim(self):
        return self.op.dim

    def matvec(self, x):
        self.count += 1
        return self.op.matvec(x)


class _DenseOperator:
    def __init__(self, a):
        self.a = np.asarray(a, dtype=float)
        self.dim = self.a.shape[0]

    def matvec(self, x):
        return self.a @ x

    def toarray(self):
        return self.a


def as_operator(obj):
    """Adapt a matrix-like object to the operator protocol."""
    if hasattr(obj, "matvec") and hasattr(obj, "dim"):
        return obj
    if isinstance(obj, np.ndarray):
        return _DenseOperator(obj)
    if sp.issparse(obj):
        return SparseSymmetricMatrix(csr=sp.csr_array(obj))
    raise TypeError(f"cannot interpret {type(obj).__name__} as a linear operator")


def apply_spectral_map(op, interval):
    """Return the operator (A - cI)/d without copying the matrix."""
    return MappedOperator(as_operator(op), interval)


def generate_modified_laplacian_2d(nx, ny, bumps=DEFAULT_BUMPS):
    """Five-point Laplacian on an nx x ny unit grid plus a Gaussian potential.

    Zero Dirichlet boundaries; node (i, j) sits at coordinates (i+1, j+1).
    Each bump (cx, cy, height, width) adds
    height * exp(-((x-cx)^2 + (y-cy)^2) / (2 width^2)) to the diagonal.
    """
    if nx < 1 or ny < 1:
        raise ValueError("grid must have at least one point per dimension")

    def lap1d(m):
        return sp.diags_array(
            [-np.ones(m - 1), 2.0 * np.ones(m), -np.ones(m - 1)],
            offsets=[-1, 0, 1],
        )

    lap = sp.kron(sp.eye_array(ny), lap1d(nx)) + sp.kron(lap1d(ny), sp.eye_array(nx))

    x = np.arange(1, nx + 1, dtype=float)
    y = np.arange(1, ny + 1, dtype=float)
    xx, yy = np.meshgrid(x, y)  # row-major: index p = i + nx*j
    v = np.zeros(nx * ny)
    for cx, cy, height, width in bumps:
        if width <= 0:
            raise ValueError("bump width must be positive")
        r2 = (xx - cx) ** 2 + (yy - cy) ** 2
        v += (height * np.exp(-r2 / (2.0 * width**2))).ravel()

    a = (lap + sp.diags_array([v], offsets=[0])).tocsr()
    # symmetrize bit-exactly: kron/diags assembly is symmetric up to layout
    a = (a + a.T) * 0.5
    return SparseSymmetricMatrix(csr=sp.csr_array(a))


def estimate_spectral_interval(op, lanczos_steps=DEFAULT_LANCZOS_STEPS,
                               margin=DEFAULT_INTERVAL_MARGIN, v0=None, seed=0):
    """Lanczos-based eigenvalue bounds, widened by a relative safety margin.

    Runs ``lanczos_steps`` iterations from a Gaussian probe, takes the extreme
    Ritz values +/- their residual bounds, and widens the result by ``margin``
    relative to the half-width.
    """
    from .lanczos import lanczos_factorize, ritz_residual_bounds
    from .stochastic import INTERVAL_STREAM, ProbeVectorSource

    if lanczos_steps < 2:
        raise ValueError("interval estimation needs at least 2 Lanczos steps")
    op = as_operator(op)
    steps = min(lanczos_steps, op.dim)
    src = ProbeVectorSource("gaussian", seed=seed, dim=op.dim, stream=INTERVAL_STREAM)
    if v0 is None:
        v0 = src.draw(0)
    v0 = np.asarray(v0, dtype=float)
    if np.linalg.norm(v0) == 0.0:
        # resample once, then give up
        v0 = src.draw(1)
        if np.linalg.norm(v0) == 0.0:
            raise NumericalFailure("starting vector for interval estimation is zero")

    fact = lanczos_factorize(op, v0, steps)
    theta, resid = ritz_residual_bounds(fact)
    lb = theta[0] - resid[0]
    ub = theta[-1] + resid[-1]
    if not np.isfinite(lb) or not np.isfinite(ub):
        raise NumericalFailure("non-finite eigenvalue bounds")
    if ub <= lb:  # single-point spectrum; open it up so the map is defined
        half = max(abs(ub), 1.0) * 1e-8
        lb, ub = lb - half, ub + half
    return SpectralInterval(lb, ub).widened(margin)


# ---------------------------------------------------------------------------
# Matrix Market coordinate IO (real symmetric)

def load_matrix_market(path):
    """Read a real coordinate Matrix Market file into a symmetric matrix.

    Accepts ``symmetric`` headers (one stored triangle, expanded here) and
    ``general`` headers whose data must then be exactly symmetric. Duplicate
    entries are summed. Complex fields, non-coordinate formats, skew or
    hermitian symmetry, non-square sizes, and out-of-range indices are errors.
    """
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) < 5 or header[0] != "%%MatrixMarket":
            raise ValueError("not a Matrix Market file (missing %%MatrixMarket header)")
        _, obj, fmt, field_kind, symmetry = (tok.lower() for tok in header[:5])
        if obj != "matrix":
            raise ValueError(f"unsupported Matrix Market object: {obj}")
        if fmt != "coordinate":
            raise ValueError(f"unsupported Matrix Market format: {fmt}")
        if field_kind == "complex":
            raise ValueError("complex matrices are not supported")
        if field_kind not in ("real", "integer"):
            raise ValueError(f"unsupported Matrix Market field: {field_kind}")
        if symmetry not in ("symmetric", "general"):
            raise ValueError(f"unsupported Matrix Market symmetry: {symmetry}")

        line = fh.readline()
        while line and (line.lstrip().startswith("%") or not line.strip()):
            line = fh.readline()
        size = line.split()
        if len(size) != 3:
            raise ValueError("malformed Matrix Market size line")
        try:
            m, n, nnz = (int(tok) for tok in size)
        except ValueError as exc:
            raise ValueError("malformed Matrix Market size line") from exc
        if m != n:
            raise ValueError(f"matrix must be square, got {m} x {n}")
        if n < 1 or nnz < 0:
            raise ValueError("invalid Matrix Market dimensions")

        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz, dtype=np.float64)
        k = 0
        for line in fh:
            s = line.strip()
            if not s or s.startswith("%"):
                continue
            parts = s.split()
            if len(parts) != 3:
                raise ValueError(f"malformed coordinate entry: {s!r}")
            if k >= nnz:
                raise ValueError("more entries than declared in size line")
            try:
                i = int(parts[0])
                j = int(parts[1])
                v = float(parts[2])
            except ValueError as exc:
                raise ValueError(f"malformed coordinate entry: {s!r}") from exc
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValueError(f"coordinate index out of range: ({i}, {j})")
            rows[k], cols[k], vals[k] = i - 1, j - 1, v
            k += 1
        if k != nnz:
            raise ValueError(f"expected {nnz} entries, found {k}")

    try:
        return SparseSymmetricMatrix.from_coo(
            n, rows, cols, vals, symmetric_storage=(symmetry == "symmetric")
        )
    except ValueError as exc:
        if "not symmetric" in str(exc):
            raise ValueError(
                "file declares general symmetry but its data is not symmetric"
            ) from exc
        raise


def save_matrix_market(mat, path):
    """Write the lower triangle as a real symmetric coordinate file."""
    coo = sp.tril(mat.csr).tocoo()
    with open(path, "w", encoding="ascii") as fh:
        fh.write("%%MatrixMarket matrix coordinate real symmetric\n")
        fh.write(f"{mat.n} {mat.n} {coo.nnz}\n")
        for i, j, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{i + 1} {j + 1} {float(v)!r}\n")
