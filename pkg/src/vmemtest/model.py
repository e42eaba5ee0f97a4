"""GARCH-type vector multiplicative error process.

An observed non-negative vector series ``x_t`` is modelled as the Hadamard
product of a conditional-mean vector ``mu_t`` and a unit-mean positive
innovation vector, where ``mu_t`` follows the linear recursion

    mu_t = alpha0 + sum_j A_j x_{t-j} + sum_k B_k mu_{t-k}.

This module holds the data containers, the recursion (filtering given
observations, simulation given innovations), residual extraction and the
CSV serialisation of series.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
from numba import njit

from .rng import SeedLike, as_generator

__all__ = [
    "ObservationSeries",
    "VmemParams",
    "MeanSeries",
    "ResidualSeries",
    "InitPolicy",
    "SAMPLE_MEAN_INIT",
    "filter_means",
    "simulate_vmem",
    "compute_residuals",
    "read_series_csv",
    "write_series_csv",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(np.asarray(a, dtype=float))
    a.flags.writeable = False
    return a


def _require_positive_matrix(data: np.ndarray, what: str) -> np.ndarray:
    if data.ndim != 2:
        raise ValueError(f"{what} must be a T x d matrix, got shape {data.shape}")
    if data.shape[0] < 1 or data.shape[1] < 1:
        raise ValueError(f"{what} must have T >= 1 and d >= 1")
    if not np.all(np.isfinite(data)):
        raise ValueError(f"{what} contains non-finite entries")
    if np.any(data <= 0.0):
        t, j = np.argwhere(data <= 0.0)[0]
        raise ValueError(f"{what} must be strictly positive; entry [{t}, {j}] is {data[t, j]}")
    return data


@dataclass(frozen=True, eq=False)
class ObservationSeries:
    """A strictly positive T x d series of observations.

    Zeros are rejected at construction: the fitting log-density divides by
    the data, so one positivity rule is enforced for every consumer.
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        data = _readonly(self.data)
        _require_positive_matrix(data, "observation series")
        object.__setattr__(self, "data", data)

    @property
    def T(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def sample_mean(self) -> np.ndarray:
        return self.data.mean(axis=0)


@dataclass(frozen=True, eq=False)
class VmemParams:
    """Dynamic parameters (alpha0, A_1..A_p, B_1..B_q) of the recursion.

    Parameters
    ----------
    alpha0 : ndarray, shape (d,)
        Intercept, strictly positive.
    A : ndarray, shape (p, d, d)
        Coefficients on lagged observations, non-negative entries.
    B : ndarray, shape (q, d, d)
        Coefficients on lagged means, non-negative entries.
    b_diagonal : bool
        Declares that every B_k is diagonal (off-diagonal entries must be
        exactly zero).
    """

    alpha0: np.ndarray
    A: np.ndarray
    B: np.ndarray
    b_diagonal: bool = False

    def __post_init__(self) -> None:
        alpha0 = _readonly(np.atleast_1d(self.alpha0))
        if alpha0.ndim != 1 or alpha0.size < 1:
            raise ValueError("alpha0 must be a d-vector")
        if not np.all(np.isfinite(alpha0)) or np.any(alpha0 <= 0.0):
            raise ValueError("alpha0 entries must be finite and strictly positive")
        d = alpha0.size
        A = _readonly(np.asarray(self.A, dtype=float).reshape(-1, d, d))
        B = _readonly(np.asarray(self.B, dtype=float).reshape(-1, d, d))
        for name, M in (("A", A), ("B", B)):
            if not np.all(np.isfinite(M)) or np.any(M < 0.0):
                raise ValueError(f"{name} matrices must be finite with non-negative entries")
        if self.b_diagonal and B.size:
            off = B.copy()
            for k in range(B.shape[0]):
                np.fill_diagonal(off[k], 0.0)
            if np.any(off != 0.0):
                raise ValueError("b_diagonal=True requires exactly zero off-diagonal B entries")
        object.__setattr__(self, "alpha0", alpha0)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def d(self) -> int:
        return self.alpha0.size

    @property
    def p(self) -> int:
        return self.A.shape[0]

    @property
    def q(self) -> int:
        return self.B.shape[0]

    @property
    def n_free(self) -> int:
        """Number of free dynamic parameters under the declared structure."""
        d = self.d
        nb = self.q * (d if self.b_diagonal else d * d)
        return d + self.p * d * d + nb

    def persistence_matrix(self) -> np.ndarray:
        return self.A.sum(axis=0) + self.B.sum(axis=0) if (self.p or self.q) else np.zeros((self.d, self.d))

    def spectral_radius(self) -> float:
        m = self.persistence_matrix()
        return float(np.max(np.abs(np.linalg.eigvals(m)))) if m.size else 0.0

    def unconditional_mean(self) -> np.ndarray:
        """Fixed point of the recursion under unit-mean innovations."""
        if self.spectral_radius() >= 1.0:
            raise ValueError("unconditional mean undefined: spectral radius >= 1")
        return np.linalg.solve(np.eye(self.d) - self.persistence_matrix(), self.alpha0)


@dataclass(frozen=True)
class InitPolicy:
    """Convention for the pre-sample values of ``x_t`` and ``mu_t``.

    ``sample-mean`` (the default) sets both to the sample mean of the
    observed series, ``stationary`` to the unconditional mean implied by
    the parameters, and ``fixed`` to an explicitly supplied vector.  The
    policy is an explicit, recorded input so that fitting and bootstrap
    replication use the same convention.
    """

    kind: str = "sample-mean"
    values: Optional[tuple] = None

    def __post_init__(self) -> None:
        if self.kind not in ("sample-mean", "stationary", "fixed"):
            raise ValueError(f"unknown init policy kind {self.kind!r}")
        if self.kind == "fixed" and self.values is None:
            raise ValueError("fixed init policy requires values")
        if self.values is not None:
            object.__setattr__(self, "values", tuple(float(v) for v in np.atleast_1d(self.values)))

    def resolve(self, series: ObservationSeries, params: VmemParams) -> np.ndarray:
        """Return the d-vector used for all pre-sample x and mu values."""
        if self.kind == "sample-mean":
            return series.sample_mean()
        if self.kind == "stationary":
            return params.unconditional_mean()
        vec = np.asarray(self.values, dtype=float)
        if vec.size != params.d:
            raise ValueError("fixed init values have wrong dimension")
        if np.any(vec <= 0.0):
            raise ValueError("fixed init values must be strictly positive")
        return vec


SAMPLE_MEAN_INIT = InitPolicy("sample-mean")


@dataclass(frozen=True, eq=False)
class MeanSeries:
    """Conditional means produced by the recursion, with the init record."""

    data: np.ndarray
    init_policy: InitPolicy = SAMPLE_MEAN_INIT
    init_values: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        data = _readonly(self.data)
        _require_positive_matrix(data, "mean series")
        object.__setattr__(self, "data", data)
        if self.init_values is not None:
            object.__setattr__(self, "init_values", _readonly(np.atleast_1d(self.init_values)))

    @property
    def T(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True, eq=False)
class ResidualSeries:
    """Elementwise ratios x_t / mu_t, strictly positive."""

    data: np.ndarray

    def __post_init__(self) -> None:
        data = _readonly(self.data)
        _require_positive_matrix(data, "residual series")
        object.__setattr__(self, "data", data)

    @property
    def T(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


@njit(cache=True)
def _filter_kernel(x, alpha0, A, B, x_init, mu_init):  # pragma: no cover - numba
    T, d = x.shape
    p = A.shape[0]
    q = B.shape[0]
    mu = np.empty((T, d))
    for t in range(T):
        for i in range(d):
            mu[t, i] = alpha0[i]
        for j in range(p):
            s = t - 1 - j
            for i in range(d):
                acc = 0.0
                if s >= 0:
                    for m in range(d):
                        acc += A[j, i, m] * x[s, m]
                else:
                    for m in range(d):
                        acc += A[j, i, m] * x_init[m]
                mu[t, i] += acc
        for k in range(q):
            s = t - 1 - k
            for i in range(d):
                acc = 0.0
                if s >= 0:
                    for m in range(d):
                        acc += B[k, i, m] * mu[s, m]
                else:
                    for m in range(d):
                        acc += B[k, i, m] * mu_init[m]
                mu[t, i] += acc
    return mu


@njit(cache=True)
def _simulate_kernel(eps, alpha0, A, B, x_init, mu_init):  # pragma: no cover - numba
    n, d = eps.shape
    p = A.shape[0]
    q = B.shape[0]
    x = np.empty((n, d))
    mu = np.empty((n, d))
    for t in range(n):
        for i in range(d):
            mu[t, i] = alpha0[i]
        for j in range(p):
            s = t - 1 - j
            for i in range(d):
                acc = 0.0
                if s >= 0:
                    for m in range(d):
                        acc += A[j, i, m] * x[s, m]
                else:
                    for m in range(d):
                        acc += A[j, i, m] * x_init[m]
                mu[t, i] += acc
        for k in range(q):
            s = t - 1 - k
            for i in range(d):
                acc = 0.0
                if s >= 0:
                    for m in range(d):
                        acc += B[k, i, m] * mu[s, m]
                else:
                    for m in range(d):
                        acc += B[k, i, m] * mu_init[m]
                mu[t, i] += acc
        for i in range(d):
            x[t, i] = mu[t, i] * eps[t, i]
    return x, mu


def filter_means(
    series: ObservationSeries,
    params: VmemParams,
    init: InitPolicy = SAMPLE_MEAN_INIT,
) -> MeanSeries:
    """Run the mean recursion over an observed series.

    Pre-sample values of both ``x`` and ``mu`` are replaced by the vector
    the init policy resolves to.  Only warns on non-stationary parameters
    because fitting routinely evaluates near-boundary iterates.

    Parameters
    ----------
    series : ObservationSeries
    params : VmemParams
    init : InitPolicy

    Returns
    -------
    MeanSeries
    """
    if series.d != params.d:
        raise ValueError(f"dimension mismatch: series d={series.d}, params d={params.d}")
    if params.spectral_radius() >= 1.0:
        warnings.warn("persistence spectral radius >= 1; filtered means may diverge", RuntimeWarning)
    start = init.resolve(series, params)
    mu = _filter_kernel(series.data, params.alpha0, params.A, params.B, start, start)
    if not np.all(np.isfinite(mu)) or np.any(mu <= 0.0):
        raise FloatingPointError("mean recursion produced non-finite or non-positive values")
    return MeanSeries(mu, init_policy=init, init_values=start)


def simulate_vmem(
    params: VmemParams,
    law,
    T: int,
    burn_in: int = 200,
    seed: SeedLike = 0,
    return_details: bool = False,
):
    """Simulate a stationary stretch of the process.

    ``T + burn_in`` steps of the recursion are generated from i.i.d.
    innovations drawn from ``law`` (any object with a
    ``sample(n, rng) -> (n, d) array`` method), starting from the
    unconditional mean; the first ``burn_in`` steps are discarded.

    Parameters
    ----------
    params : VmemParams
        Must be stationary (spectral radius < 1).
    law : innovation law
    T : int
        Length of the returned series.
    burn_in : int
        Number of warm-up steps dropped from the front.
    seed : int or numpy.random.Generator
    return_details : bool
        If True, also return the conditional means and the innovations of
        the retained window.

    Returns
    -------
    ObservationSeries, or (ObservationSeries, MeanSeries, ResidualSeries)
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    if params.spectral_radius() >= 1.0:
        raise ValueError("cannot simulate: spectral radius of persistence matrix >= 1")
    rng = as_generator(seed)
    eps = np.asarray(law.sample(T + burn_in, rng), dtype=float)
    if eps.shape != (T + burn_in, params.d):
        raise ValueError(f"law produced sample of shape {eps.shape}, expected {(T + burn_in, params.d)}")
    if np.any(eps <= 0.0) or not np.all(np.isfinite(eps)):
        raise ValueError("innovation law produced non-positive or non-finite draws")
    start = params.unconditional_mean()
    x, mu = _simulate_kernel(eps, params.alpha0, params.A, params.B, start, start)
    if not np.all(np.isfinite(x)):
        raise FloatingPointError("simulation diverged to non-finite values")
    series = ObservationSeries(x[burn_in:])
    if not return_details:
        return series
    means = MeanSeries(mu[burn_in:], init_policy=InitPolicy("stationary"), init_values=start)
    return series, means, ResidualSeries(eps[burn_in:])


def compute_residuals(series: ObservationSeries, means: MeanSeries) -> ResidualSeries:
    """Elementwise division of observations by conditional means."""
    if series.data.shape != means.data.shape:
        raise ValueError(
            f"shape mismatch: series {series.data.shape} vs means {means.data.shape}"
        )
    return ResidualSeries(series.data / means.data)


def write_series_csv(series: ObservationSeries, path: Union[str, Path]) -> None:
    """Write a series as headered CSV with columns t, x1..xd.

    Values are serialised with 17 significant digits so a round trip is
    bit-exact.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"x{j + 1}" for j in range(series.d)])
        for t in range(series.T):
            writer.writerow([t + 1] + [format(v, ".17g") for v in series.data[t]])


def read_series_csv(path: Union[str, Path]) -> ObservationSeries:
    """Read a headered t, x1..xd CSV into an ObservationSeries.

    Raises ``ValueError`` naming the offending row on malformed, missing,
    non-finite or non-positive entries.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if len(header) < 2 or header[0].strip().lower() != "t":
            raise ValueError(f"{path}: expected header 't,x1,...,xd', got {header!r}")
        d = len(header) - 1
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != d + 1:
                raise ValueError(f"{path}: row {lineno} has {len(row)} fields, expected {d + 1}")
            try:
                vals = [float(v) for v in row[1:]]
            except ValueError:
                raise ValueError(f"{path}: row {lineno} contains a non-numeric value") from None
            for j, v in enumerate(vals):
                if not np.isfinite(v) or v <= 0.0:
                    raise ValueError(f"{path}: row {lineno} column x{j + 1} is {v}; entries must be positive")
            rows.append(vals)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return ObservationSeries(np.asarray(rows))
