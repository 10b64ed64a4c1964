"""Simulation studies: correlated-Gaussian sampling, the correlation
sensitivity grid for CRPS-Sum / Energy Score, and the CRPS estimator
convergence benchmark.

All randomness flows through numpy Generators derived from explicit seeds;
every grid cell and every study configuration gets its own independent
stream (via SeedSequence spawn keys), so results are reproducible and do not
depend on execution order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from .crps import crps_empirical_cdf, crps_quantile, crps_sample_estimate

__all__ = [
    "GaussianSpec",
    "bivariate_correlation_spec",
    "sample_gaussian",
    "relative_change",
    "CellScores",
    "run_sensitivity_cell",
    "SensitivityConfig",
    "GridCell",
    "SensitivityGridReport",
    "run_sensitivity_grid",
    "ConvergenceRow",
    "ConvergenceReport",
    "run_convergence_study",
]

RngLike = Union[int, np.random.Generator, np.random.SeedSequence, None]

# Paper-scale and reduced desk-scale experiment sizes (windows, ensemble).
SCALES = {
    "paper": (2**14, 2**9),
    "desk": (2**12, 2**7),
}

# Default correlation grids: data correlation in steps of 0.2, model
# correlation in steps of 0.1, both spanning [-1, 1].
DEFAULT_RHO_GRID = tuple(round(-1.0 + 0.2 * k, 10) for k in range(11))
DEFAULT_VARRHO_GRID = tuple(round(-1.0 + 0.1 * k, 10) for k in range(21))


# --------------------------------------------------------------------------
# Gaussian sampling
# --------------------------------------------------------------------------

@dataclass
class GaussianSpec:
    """Multivariate normal specification (possibly singular covariance)."""

    mu: NDArray[np.float64]  # (D,)
    cov: NDArray[np.float64]  # (D, D), symmetric positive semi-definite

    def __post_init__(self) -> None:
        self.mu = np.asarray(self.mu, dtype=np.float64).reshape(-1)
        self.cov = np.asarray(self.cov, dtype=np.float64)
        d = self.mu.shape[0]
        if self.cov.shape != (d, d):
            raise ValueError(
                f"covariance shape {self.cov.shape} does not match mean length {d}"
            )
        if not (np.all(np.isfinite(self.mu)) and np.all(np.isfinite(self.cov))):
            raise ValueError("non-finite entries in mean or covariance")
        if not np.allclose(self.cov, self.cov.T, atol=1e-12):
            raise ValueError("covariance matrix must be symmetric")
        scale = max(1.0, float(np.abs(self.cov).max()))
        if np.linalg.eigvalsh(self.cov).min() < -1e-9 * scale:
            raise ValueError("covariance matrix must be positive semi-definite")

    def factor(self) -> NDArray[np.float64]:
        """Square-root factor A with A @ A.T == cov.

        Uses the eigendecomposition so that singular covariances (perfect
        correlation) are handled exactly: zero eigenvalues produce exact
        linear constraints in the samples instead of a Cholesky failure.
        """
        eigvals, eigvecs = np.linalg.eigh(self.cov)
        eigvals = np.clip(eigvals, 0.0, None)
        return eigvecs * np.sqrt(eigvals)


def bivariate_correlation_spec(rho: float) -> GaussianSpec:
    """Standard bivariate normal with correlation rho in [-1, 1]."""
    rho = float(rho)
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"correlation must lie in [-1, 1], got {rho}")
    return GaussianSpec(np.zeros(2), np.array([[1.0, rho], [rho, 1.0]]))


def _as_generator(seed: RngLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_gaussian(spec: GaussianSpec, n: int, seed: RngLike = None) -> NDArray[np.float64]:
    """Draw n samples from the given Gaussian, shape (n, D).

    Degenerate correlations are exact: with a singular covariance the linear
    constraints hold to the last bit (e.g. for a bivariate correlation of -1
    the two coordinates of every sample sum to exactly 0.0).
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"sample count must be positive, got {n}")
    rng = _as_generator(seed)
    z = rng.standard_normal((n, spec.mu.shape[0]))
    return spec.mu + z @ spec.factor().T


def relative_change(score_mean: float, reference_mean: float) -> float:
    """Relative deviation (score - reference) / reference of a score mean.

    The reference must be strictly positive (the mean score of a
    non-degenerate process is positive); otherwise the ratio is undefined.
    """
    score_mean = float(score_mean)
    reference_mean = float(reference_mean)
    if not (math.isfinite(score_mean) and math.isfinite(reference_mean)):
        raise ValueError("score means must be finite")
    if reference_mean <= 0.0:
        raise ValueError(
            f"reference mean must be strictly positive, got {reference_mean}"
        )
    return (score_mean - reference_mean) / reference_mean


# --------------------------------------------------------------------------
# Vectorized batch scoring helpers (validated against the scalar estimators
# in the test suite; used only to keep the grid study fast)
# --------------------------------------------------------------------------

def _crps_quantile_batch(
    samples: NDArray[np.float64], obs: NDArray[np.float64], n_quantiles: int
) -> NDArray[np.float64]:
    """Quantile-based CRPS for a batch: samples (n, w), obs (n,) -> (n,)."""
    alphas = (np.arange(1, n_quantiles + 1) - 0.5) / n_quantiles
    q = np.quantile(samples, alphas, axis=1, method="linear")  # (N, n)
    x = obs[None, :]
    losses = (alphas[:, None] - (x < q)) * (x - q)
    return 2.0 * losses.mean(axis=0)


def _energy_batch(
    samples: NDArray[np.float64],
    obs: NDArray[np.float64],
    beta: float = 1.0,
    chunk: Optional[int] = None,
) -> NDArray[np.float64]:
    """Energy scores for a batch: samples (n, w, D), obs (n, D) -> (n,).

    The O(w^2) pairwise term is computed in chunks of experiments to bound
    peak memory.
    """
    n, w, _ = samples.shape
    if chunk is None:
        chunk = max(1, int(8_000_000 // (w * w)))

    obs_dist = np.linalg.norm(samples - obs[:, None, :], axis=2)
    if beta != 1.0:
        obs_dist = obs_dist**beta
    term_obs = obs_dist.mean(axis=1)

    term_pair = np.empty(n)
    for start in range(0, n, chunk):
        block = samples[start : start + chunk]  # (m, w, D)
        sq = np.zeros((block.shape[0], w, w))
        for d in range(block.shape[2]):
            diff = block[:, :, None, d] - block[:, None, :, d]
            sq += diff * diff
        dist = np.sqrt(sq, out=sq)
        if beta != 1.0:
            dist = dist**beta
        term_pair[start : start + chunk] = dist.mean(axis=(1, 2))

    return np.maximum(0.0, term_obs - 0.5 * term_pair)


# --------------------------------------------------------------------------
# Sensitivity study
# --------------------------------------------------------------------------

@dataclass
class CellScores:
    """Monte Carlo score summary of one (rho, varrho) grid cell."""

    rho: float
    varrho: float
    crps_sum_mean: float
    es_mean: float
    crps_sum_stderr: float
    es_stderr: float
    n_windows: int
    window_size: int


def run_sensitivity_cell(
    rho: float,
    varrho: float,
    n_windows: int,
    window_size: int,
    seed: RngLike = None,
    n_quantiles: int = 20,
    beta: float = 1.0,
) -> CellScores:
    """Monte Carlo estimate of CRPS-Sum and ES for one grid cell.

    Each of the ``n_windows`` experiments draws one observation from the
    bivariate data distribution (correlation rho) and an ensemble of
    ``window_size`` samples from the model distribution (correlation varrho),
    then scores the ensemble: CRPS-Sum on the coordinate-summed signal with
    the quantile estimator, ES with the Euclidean energy distance.
    """
    n_windows = int(n_windows)
    window_size = int(window_size)
    if n_windows < 2:
        raise ValueError(f"need at least 2 windows, got {n_windows}")
    if window_size < 2:
        raise ValueError(f"ensemble size must be at least 2, got {window_size}")

    rng = _as_generator(seed)
    data_factor = bivariate_correlation_spec(rho).factor()
    model_factor = bivariate_correlation_spec(varrho).factor()

    obs = rng.standard_normal((n_windows, 2)) @ data_factor.T
    z = rng.standard_normal((n_windows, window_size, 2))
    samples = z @ model_factor.T

    cs_values = _crps_quantile_batch(samples.sum(axis=2), obs.sum(axis=1), n_quantiles)
    es_values = _energy_batch(samples, obs, beta=beta)

    return CellScores(
        rho=float(rho),
        varrho=float(varrho),
        crps_sum_mean=float(cs_values.mean()),
        es_mean=float(es_values.mean()),
        crps_sum_stderr=float(cs_values.std(ddof=1) / math.sqrt(n_windows)),
        es_stderr=float(es_values.std(ddof=1) / math.sqrt(n_windows)),
        n_windows=n_windows,
        window_size=window_size,
    )


@dataclass
class SensitivityConfig:
    """Configuration of the full correlation-sensitivity grid."""

    rho_list: Sequence[float] = DEFAULT_RHO_GRID  # data correlations
    varrho_list: Sequence[float] = DEFAULT_VARRHO_GRID  # model correlations
    n_windows: Optional[int] = None  # experiments per cell; None -> from scale
    window_size: Optional[int] = None  # ensemble size; None -> from scale
    seed: int = 0
    scale: str = "desk"  # {desk, paper}
    n_quantiles: int = 20
    beta: float = 1.0

    def __post_init__(self) -> None:
        if self.scale not in SCALES:
            raise ValueError(f"unknown scale {self.scale!r}; choose from {sorted(SCALES)}")
        default_windows, default_size = SCALES[self.scale]
        if self.n_windows is None:
            self.n_windows = default_windows
        if self.window_size is None:
            self.window_size = default_size
        self.n_windows = int(self.n_windows)
        self.window_size = int(self.window_size)
        if self.n_windows < 1:
            raise ValueError(f"n_windows must be positive, got {self.n_windows}")
        if self.window_size < 2:
            raise ValueError(f"window_size must be at least 2, got {self.window_size}")
        self.rho_list = tuple(float(r) for r in self.rho_list)
        self.varrho_list = tuple(float(v) for v in self.varrho_list)
        if not self.rho_list or not self.varrho_list:
            raise ValueError("rho_list and varrho_list must be non-empty")
        for value in self.rho_list + self.varrho_list:
            if not -1.0 <= value <= 1.0:
                raise ValueError(f"correlations must lie in [-1, 1], got {value}")
        if int(self.seed) < 0:
            raise ValueError("seed must be non-negative")
        self.seed = int(self.seed)

    def to_dict(self) -> dict:
        return {
            "rho_list": list(self.rho_list),
            "varrho_list": list(self.varrho_list),
            "n_windows": self.n_windows,
            "window_size": self.window_size,
            "seed": self.seed,
            "scale": self.scale,
            "n_quantiles": self.n_quantiles,
            "beta": self.beta,
        }


@dataclass
class GridCell:
    """One row of the sensitivity report."""

    rho: float
    varrho: float
    crps_sum_mean: float
    es_mean: float
    delta_rel_crps_sum: float  # NaN when the reference CRPS-Sum is degenerate
    delta_rel_es: float
    stderr_crps_sum: float
    stderr_es: float
    n_windows: int
    window_size: int
    seed: int


CSV_COLUMNS_SENSITIVITY = (
    "rho", "varrho", "crps_sum_mean", "es_mean", "delta_rel_crps_sum",
    "delta_rel_es", "stderr_crps_sum", "stderr_es", "n_windows",
    "window_size", "seed",
)


@dataclass
class SensitivityGridReport:
    """All grid cells plus the configuration that produced them."""

    config: SensitivityConfig
    cells: list[GridCell] = field(default_factory=list)

    def cell(self, rho: float, varrho: float) -> GridCell:
        for c in self.cells:
            if np.isclose(c.rho, rho, atol=1e-9) and np.isclose(c.varrho, varrho, atol=1e-9):
                return c
        raise KeyError(f"no cell at rho={rho}, varrho={varrho}")

    def row(self, rho: float) -> list[GridCell]:
        got = [c for c in self.cells if np.isclose(c.rho, rho, atol=1e-9)]
        if not got:
            raise KeyError(f"no cells at rho={rho}")
        return got

    def rows(self) -> list[tuple]:
        return [
            tuple(getattr(c, name) for name in CSV_COLUMNS_SENSITIVITY)
            for c in self.cells
        ]

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "cells": [dict(zip(CSV_COLUMNS_SENSITIVITY, r)) for r in self.rows()],
        }


def _cell_seed(master_seed: int, rho_index: int, varrho_index: int) -> np.random.SeedSequence:
    """Independent per-cell stream derived from the master seed and the
    cell's grid indices (order-independent reproducibility)."""
    return np.random.SeedSequence(entropy=(master_seed, rho_index, varrho_index))


# Index used to derive the stream of an off-grid reference cell.
_REFERENCE_INDEX = 1 << 20


def run_sensitivity_grid(config: SensitivityConfig) -> SensitivityGridReport:
    """Run every (rho, varrho) cell and attach relative changes.

    The reference for each data correlation rho is the matched-model cell
    varrho == rho (computed as an extra cell if rho is absent from
    varrho_list).  The relative change of the reference cell itself is 0 by
    construction; when a reference mean is not strictly positive (a
    degenerate summed signal at rho == -1 has CRPS-Sum exactly 0) the
    relative change is reported as NaN.
    """
    report = SensitivityGridReport(config=config)

    for i, rho in enumerate(config.rho_list):
        cells: list[CellScores] = []
        ref: Optional[CellScores] = None
        ref_j: Optional[int] = None
        for j, varrho in enumerate(config.varrho_list):
            cell = run_sensitivity_cell(
                rho, varrho, config.n_windows, config.window_size,
                seed=_cell_seed(config.seed, i, j),
                n_quantiles=config.n_quantiles, beta=config.beta,
            )
            cells.append(cell)
            if np.isclose(varrho, rho, atol=1e-9):
                ref, ref_j = cell, j
        if ref is None:
            ref = run_sensitivity_cell(
                rho, rho, config.n_windows, config.window_size,
                seed=_cell_seed(config.seed, i, _REFERENCE_INDEX),
                n_quantiles=config.n_quantiles, beta=config.beta,
            )

        for j, cell in enumerate(cells):
            if j == ref_j:
                d_cs, d_es = 0.0, 0.0
            else:
                d_cs = (
                    relative_change(cell.crps_sum_mean, ref.crps_sum_mean)
                    if ref.crps_sum_mean > 0.0
                    else float("nan")
                )
                d_es = (
                    relative_change(cell.es_mean, ref.es_mean)
                    if ref.es_mean > 0.0
                    else float("nan")
                )
            report.cells.append(
                GridCell(
                    rho=cell.rho,
                    varrho=cell.varrho,
                    crps_sum_mean=cell.crps_sum_mean,
                    es_mean=cell.es_mean,
                    delta_rel_crps_sum=d_cs,
                    delta_rel_es=d_es,
                    stderr_crps_sum=cell.crps_sum_stderr,
                    stderr_es=cell.es_stderr,
                    n_windows=cell.n_windows,
                    window_size=cell.window_size,
                    seed=config.seed,
                )
            )
    return report


# --------------------------------------------------------------------------
# Estimator convergence study
# --------------------------------------------------------------------------

CONVERGENCE_ESTIMATORS = ("ecdf", "quantile", "sample")
DEFAULT_SAMPLE_SIZES = (200, 500, 1000, 2000, 5000)


@dataclass
class ConvergenceRow:
    estimator: str
    sample_size: int
    n_quantiles: Optional[int]  # None for estimators that take no quantile count
    mean: float
    std: float


CSV_COLUMNS_CONVERGENCE = ("estimator", "sample_size", "n_quantiles", "mean", "std")


@dataclass
class ConvergenceReport:
    rows: list[ConvergenceRow]
    repeats: int
    seed: int

    def row(self, estimator: str, sample_size: int, n_quantiles: Optional[int] = None) -> ConvergenceRow:
        for r in self.rows:
            if (
                r.estimator == estimator
                and r.sample_size == sample_size
                and (n_quantiles is None or r.n_quantiles == n_quantiles)
            ):
                return r
        raise KeyError(f"no row for {estimator}, size {sample_size}, N={n_quantiles}")

    def to_dict(self) -> dict:
        return {
            "repeats": self.repeats,
            "seed": self.seed,
            "rows": [
                {
                    "estimator": r.estimator,
                    "sample_size": r.sample_size,
                    "n_quantiles": r.n_quantiles,
                    "mean": r.mean,
                    "std": r.std,
                }
                for r in self.rows
            ],
        }


def run_convergence_study(
    estimators: Sequence[str] = CONVERGENCE_ESTIMATORS,
    sample_sizes: Sequence[int] = DEFAULT_SAMPLE_SIZES,
    n_quantiles: Sequence[int] = (20,),
    repeats: int = 50,
    seed: int = 0,
) -> ConvergenceReport:
    """Convergence of the CRPS estimators on a known Gaussian target.

    For every configuration (estimator, sample size, and quantile count for
    the quantile estimator) and every repeat, a fresh batch of samples is
    drawn from N(0, 1) and scored against the observation x = 0, whose exact
    CRPS is analytic (about 0.2337).  Each configuration uses its own derived
    random stream, so rows are reproducible independently of which other
    configurations run.
    """
    repeats = int(repeats)
    if repeats < 2:
        raise ValueError(f"need at least 2 repeats, got {repeats}")
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be non-negative")
    for est in estimators:
        if est not in CONVERGENCE_ESTIMATORS:
            raise ValueError(
                f"unknown estimator {est!r}; choose from {CONVERGENCE_ESTIMATORS}"
            )
    sizes = [int(s) for s in sample_sizes]
    if any(s < 2 for s in sizes):
        raise ValueError("sample sizes must be at least 2")
    quantile_counts = [int(n) for n in n_quantiles]
    if any(n < 1 for n in quantile_counts):
        raise ValueError("quantile counts must be positive")

    def draw(est_index: int, size: int, nq: int, repeat: int) -> NDArray[np.float64]:
        ss = np.random.SeedSequence(entropy=(seed, est_index, size, nq, repeat))
        return np.random.default_rng(ss).standard_normal(size)

    rows: list[ConvergenceRow] = []
    for est in estimators:
        est_index = CONVERGENCE_ESTIMATORS.index(est)
        nq_values: Sequence[Optional[int]] = quantile_counts if est == "quantile" else [None]
        for size in sizes:
            for nq in nq_values:
                values = np.empty(repeats)
                for r in range(repeats):
                    s = draw(est_index, size, nq or 0, r)
                    if est == "ecdf":
                        values[r] = crps_empirical_cdf(s, 0.0)
                    elif est == "sample":
                        values[r] = crps_sample_estimate(s, 0.0)
                    else:
                        values[r] = crps_quantile(s, 0.0, nq)
                rows.append(
                    ConvergenceRow(
                        estimator=est,
                        sample_size=size,
                        n_quantiles=nq,
                        mean=float(values.mean()),
                        std=float(values.std(ddof=1)),
                    )
                )
    return ConvergenceReport(rows=rows, repeats=repeats, seed=seed)
