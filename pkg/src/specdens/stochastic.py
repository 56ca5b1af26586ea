"""Probe vectors for stochastic trace estimation, plus a threading helper.

Probes are unnormalized: E[v] = 0 and E[v v^T] = I, so v^T f(A) v is an
unbiased estimate of Tr f(A). The ``basis`` kind is deterministic, returning
sqrt(n) e_index; sweeping index over 0..n-1 makes averages exact.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

PROBE_KINDS = ("gaussian", "rademacher", "basis")

# stream id reserved for eigenvalue-bound estimation so it never collides
# with user-facing probe streams (which count up from zero)
INTERVAL_STREAM = 0xB0


@dataclass(frozen=True)
class ProbeVectorSource:
    """Reproducible probe vectors: kind, seed, dimension, and stream id.

    Each (stream, index) pair gets an independent generator, so probe i is
    the same no matter how many probes were drawn before it or on how many
    threads.
    """

    kind: str
    seed: int
    dim: int
    stream: int = 0

    def __post_init__(self):
        if self.kind not in PROBE_KINDS:
            raise ValueError(f"unknown probe kind {self.kind!r}, expected one of {PROBE_KINDS}")
        if self.dim < 1:
            raise ValueError("probe dimension must be positive")

    def draw(self, index):
        """Return probe vector ``index`` (deterministic in (seed, stream, index))."""
        if self.kind == "basis":
            if not 0 <= index < self.dim:
                raise ValueError(
                    f"basis probe index {index} out of range for dimension {self.dim}"
                )
            v = np.zeros(self.dim)
            v[index] = np.sqrt(self.dim)
            return v
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream, index))
        rng = np.random.Generator(np.random.Philox(ss))
        if self.kind == "gaussian":
            return rng.standard_normal(self.dim)
        return rng.integers(0, 2, self.dim) * 2.0 - 1.0

    @property
    def is_exhaustive(self):
        return self.kind == "basis"

    def with_stream(self, stream):
        return ProbeVectorSource(self.kind, self.seed, self.dim, stream)


def map_probes(fn, n_vec, threads=None):
    """Apply ``fn`` to probe indices 0..n_vec-1, optionally on a thread pool.

    Results come back in index order either way, so reductions over them are
    bit-identical to the serial run.
    """
    indices = range(n_vec)
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, indices))
    return [fn(i) for i in indices]


@dataclass(frozen=True)
class TraceEstimate:
    """Stochastic trace estimate with its sample statistics.

    ``sample_variance`` is the unbiased (ddof=1) variance of the per-probe
    quadratic forms, zero when only one sample was drawn.
    """

    value: float
    n_samples: int
    sample_variance: float

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("a trace estimate needs at least one sample")
        if self.sample_variance < 0.0:
            raise ValueError("sample variance cannot be negative")


def estimate_trace_quadratic(op, source, n_vec, threads=None):
    """Hutchinson estimate of Tr A: the average of v^T (A v) over probes."""
    if n_vec < 1:
        raise ValueError("need at least one probe vector")

    def one(l):
        v = source.draw(l)
        return float(v @ op.matvec(v))

    terms = np.asarray(map_probes(one, n_vec, threads))
    var = float(np.var(terms, ddof=1)) if n_vec > 1 else 0.0
    return TraceEstimate(value=float(np.mean(terms)), n_samples=n_vec,
                         sample_variance=var)
