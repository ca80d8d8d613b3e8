"""Covariance kernels on [0, 1] and exact Gaussian sampling on a grid.

Supported kernels: Brownian motion min(s, t); fractional Brownian motion
(s^{2H} + t^{2H} - |t - s|^{2H}) / 2 with 0 < H < 1; and tabulated kernels
given by node values on their own grid, extended by bilinear interpolation
(which is exactly the covariance of the piecewise-linearly interpolated
process).

Sampling draws d independent components per path from the exact joint law on
the grid via a Cholesky factor.  Nodes with (numerically) zero variance are
deterministic and excluded from the factorization; they are filled with
zeros.  If the reduced matrix still fails to factor, the diagonal is jittered
once by 1e-12 times its mean and the factorization retried; persistent
failure raises DataError.

Reproducibility contract: draw k of a call with seed s uses the generator
``np.random.default_rng([s, k])``, so each draw has its own substream and
results are independent of batching or evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .path_lift import SamplePath, TimeGrid

__all__ = [
    "DataError",
    "CovKernel",
    "CovMatrix",
    "kernel_eval",
    "cov_matrix",
    "sample",
]

_PSD_TOL = 1e-10
_ZERO_VAR_TOL = 1e-14
_JITTER = 1e-12


class DataError(RuntimeError):
    """Numerical or data failure: non-PSD covariance, failed factorization."""


@dataclass(frozen=True)
class CovKernel:
    """Covariance kernel of a centered scalar Gaussian process on [0, 1]."""

    kind: str
    hurst: float | None = None
    table_times: np.ndarray | None = None
    table_values: np.ndarray | None = None

    def __post_init__(self):
        if self.kind == "brownian":
            pass
        elif self.kind == "fbm":
            if self.hurst is None or not 0.0 < self.hurst < 1.0:
                raise ValueError("fbm requires 0 < hurst < 1")
        elif self.kind == "table":
            t = np.asarray(self.table_times, dtype=float)
            v = np.asarray(self.table_values, dtype=float)
            TimeGrid(t)
            if v.shape != (t.size, t.size):
                raise ValueError("table values must be square over the table grid")
            if np.max(np.abs(v - v.T), initial=0.0) > 1e-12:
                raise ValueError("table values must be symmetric")
            object.__setattr__(self, "table_times", t)
            object.__setattr__(self, "table_values", v)
        else:
            raise ValueError(f"unknown kernel kind {self.kind!r}")

    @classmethod
    def brownian(cls) -> "CovKernel":
        return cls("brownian")

    @classmethod
    def fbm(cls, hurst: float) -> "CovKernel":
        return cls("fbm", hurst=hurst)

    @classmethod
    def from_table(cls, times: np.ndarray, values: np.ndarray) -> "CovKernel":
        return cls("table", table_times=times, table_values=values)


def _bilinear(times: np.ndarray, values: np.ndarray, s: np.ndarray, t: np.ndarray) -> np.ndarray:
    cell_s = np.clip(np.searchsorted(times, s, side="right") - 1, 0, times.size - 2)
    cell_t = np.clip(np.searchsorted(times, t, side="right") - 1, 0, times.size - 2)
    ws = (s - times[cell_s]) / (times[cell_s + 1] - times[cell_s])
    wt = (t - times[cell_t]) / (times[cell_t + 1] - times[cell_t])
    v00 = values[cell_s, cell_t]
    v10 = values[cell_s + 1, cell_t]
    v01 = values[cell_s, cell_t + 1]
    v11 = values[cell_s + 1, cell_t + 1]
    return (
        (1 - ws) * (1 - wt) * v00
        + ws * (1 - wt) * v10
        + (1 - ws) * wt * v01
        + ws * wt * v11
    )


def kernel_eval(kernel: CovKernel, s, t):
    """Evaluate R(s, t); broadcasts over array arguments."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s < 0) or np.any(s > 1) or np.any(t < 0) or np.any(t > 1):
        raise ValueError("kernel arguments must lie in [0, 1]")
    if kernel.kind == "brownian":
        out = np.minimum(s, t)
    elif kernel.kind == "fbm":
        h2 = 2.0 * kernel.hurst
        out = 0.5 * (s**h2 + t**h2 - np.abs(t - s) ** h2)
    else:
        s, t = np.broadcast_arrays(s, t)
        out = _bilinear(kernel.table_times, kernel.table_values, s, t)
    return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class CovMatrix:
    """Kernel evaluated on a grid: entries[i, j] = R(t_i, t_j), validated PSD."""

    grid: TimeGrid
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        n = self.grid.n_nodes
        if e.shape != (n, n):
            raise ValueError("entries must be square over the grid nodes")
        object.__setattr__(self, "entries", e)


def cov_matrix(kernel: CovKernel, grid: TimeGrid) -> CovMatrix:
    """Evaluate a kernel on a grid and check positive semidefiniteness.

    Raises DataError when the smallest eigenvalue is below -1e-10 times the
    largest (table kernels can be arbitrarily bad; the analytic ones cannot).
    """
    t = grid.times
    entries = kernel_eval(kernel, t[:, None], t[None, :])
    entries = 0.5 * (entries + entries.T)
    w = np.linalg.eigvalsh(entries)
    scale = max(float(w[-1]), 0.0)
    if float(w[0]) < -_PSD_TOL * max(scale, 1.0):
        raise DataError(f"covariance is not PSD: min eigenvalue {w[0]:.3e}")
    return CovMatrix(grid, entries)


def _cholesky_reduced(entries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Factor the sub-block of nodes with positive variance.

    Returns (active node mask, lower factor of the active block).
    """
    diag = np.diag(entries)
    scale = max(float(np.max(diag, initial=0.0)), 1.0)
    active = diag > _ZERO_VAR_TOL * scale
    block = entries[np.ix_(active, active)]
    if block.size == 0:
        return active, np.zeros((0, 0))
    try:
        return active, np.linalg.cholesky(block)
    except np.linalg.LinAlgError:
        pass
    jitter = _JITTER * float(np.mean(np.diag(block)))
    try:
        return active, np.linalg.cholesky(block + jitter * np.eye(block.shape[0]))
    except np.linalg.LinAlgError as err:
        raise DataError("covariance factorization failed after jitter retry") from err


def _sample_values(r: CovMatrix, dim: int, count: int, seed: int, first: int = 0) -> np.ndarray:
    """Stacked draws first..first+count-1, shape (count, dim, n_nodes).

    Components are independent; draw indices address substreams, so a chunked
    caller reproduces one big call exactly.
    """
    active, chol = _cholesky_reduced(r.entries)
    n = r.grid.n_nodes
    out = np.zeros((count, dim, n))
    n_active = int(np.count_nonzero(active))
    if n_active == 0 or count == 0:
        return out
    z = np.stack(
        [
            np.random.default_rng([seed, first + k]).standard_normal((dim, n_active))
            for k in range(count)
        ]
    )
    out[:, :, active] = (z.reshape(count * dim, n_active) @ chol.T).reshape(
        count, dim, n_active
    )
    return out


def sample(r: CovMatrix, dim: int, count: int, seed: int) -> list[SamplePath]:
    """Draw paths with d iid components from the exact grid law."""
    if dim < 1 or count < 0:
        raise ValueError("need dim >= 1 and count >= 0")
    values = _sample_values(r, dim, count, seed)
    return [SamplePath(r.grid, values[k]) for k in range(count)]
