"""Monte Carlo homodyne verification with finite ensembles.

Each ensemble member yields one x and one p outcome per mode, drawn from the
state's Gaussian Wigner function (plus optional white detector noise). The
linear combinations are then formed "electronically" from these records and
their variances are compared against the separability bounds with a
three-sigma rule.

Sampling is split into fixed-size chunks; chunk ``i`` draws from its own
Philox stream keyed by ``(seed, i)``, so the samples do not depend on how
many workers process the chunks.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .criteria import (
    ModePartition,
    QuadCombination,
    bipartitions,
    genuine_threshold,
    partition_bound,
    require_enumerable,
)
from .errors import DimensionError, DomainError, NumericError
from .gaussian import CovarianceMatrix, is_physical

RNG_ALGORITHM = "numpy.Philox4x64-10/SeedSequence(seed,spawn_key=(chunk,))"
CHUNK_SIZE = 1 << 16
SIGMAS = 3.0

Verdict = Literal["violated", "consistent", "inconclusive"]


@dataclass(frozen=True)
class EnsembleConfig:
    n_samples: int
    seed: int = 0
    detector_noise: float = 0.0
    chunk_size: int = CHUNK_SIZE
    workers: int = 1

    def __post_init__(self):
        if self.n_samples < 2:
            raise DomainError("need at least two samples")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        if self.detector_noise < 0:
            raise DomainError("detector noise must be nonnegative")
        if self.chunk_size < 1 or self.workers < 1:
            raise DomainError("chunk_size and workers must be positive")


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_quadratures(v: CovarianceMatrix, cfg: EnsembleConfig) -> np.ndarray:
    """Draw ``cfg.n_samples`` rows of ``(x1, p1, ..., xN, pN)`` outcomes.

    Raises:
        NumericError: If ``V + noise * I`` has no Cholesky factor.
        DomainError: If ``v`` is not a physical state.
    """
    dim = 2 * v.n_modes
    try:
        chol = np.linalg.cholesky(v.entries + cfg.detector_noise * np.eye(dim))
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"Cholesky factorisation failed: {exc}") from None
    if not is_physical(v):
        raise DomainError("cannot sample an unphysical covariance matrix")

    starts = range(0, cfg.n_samples, cfg.chunk_size)

    def draw(index: int) -> np.ndarray:
        size = min(cfg.chunk_size, cfg.n_samples - starts[index])
        return _chunk_rng(cfg.seed, index).standard_normal((size, dim)) @ chol.T

    if cfg.workers == 1 or len(starts) == 1:
        chunks = [draw(i) for i in range(len(starts))]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(draw, range(len(starts))))
    return np.concatenate(chunks, axis=0)


@dataclass(frozen=True)
class EstimatedVerdict:
    estimate: float
    std_error: float
    bound: float

    @property
    def sigmas_below_bound(self) -> float:
        return (self.bound - self.estimate) / self.std_error

    @property
    def verdict(self) -> Verdict:
        if self.estimate + SIGMAS * self.std_error < self.bound:
            return "violated"
        if self.estimate - SIGMAS * self.std_error > self.bound:
            return "consistent"
        return "inconclusive"

    def against(self, bound: float) -> "EstimatedVerdict":
        return EstimatedVerdict(self.estimate, self.std_error, bound)

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "std_error": self.std_error,
            "bound": self.bound,
            "sigmas_below_bound": self.sigmas_below_bound,
            "verdict": self.verdict,
        }


def estimate_from_samples(
    samples: np.ndarray, c: QuadCombination, bound: float | None = None
) -> EstimatedVerdict:
    """Total-variance estimate and its Gaussian-theory standard error.

    With sample variances ``s_u^2``, ``s_v^2`` and covariance ``c_uv``, the
    standard error is ``sqrt((2 s_u^4 + 2 s_v^4 + 4 c_uv^2) / (n - 1))``.
    """
    n, dim = samples.shape
    if dim != 2 * c.n_modes:
        raise DimensionError(f"samples have {dim // 2} modes, combination has {c.n_modes}")
    u = samples[:, 0::2] @ np.asarray(c.h)
    w = samples[:, 1::2] @ np.asarray(c.g)
    cov = np.cov(u, w, ddof=1)
    s2u, s2v, cuv = float(cov[0, 0]), float(cov[1, 1]), float(cov[0, 1])
    se = math.sqrt((2 * s2u**2 + 2 * s2v**2 + 4 * cuv**2) / (n - 1))
    if bound is None:
        bound = genuine_threshold(c)
    return EstimatedVerdict(s2u + s2v, se, bound)


def estimate_condition(
    v: CovarianceMatrix,
    c: QuadCombination,
    cfg: EnsembleConfig,
    bound: float | None = None,
) -> EstimatedVerdict:
    """Simulate ``cfg.n_samples`` measurements and judge one condition.

    ``bound`` defaults to :func:`~cvwitness.criteria.genuine_threshold`.
    """
    if c.n_modes != v.n_modes:
        raise DimensionError(f"state has {v.n_modes} modes, combination has {c.n_modes}")
    return estimate_from_samples(sample_quadratures(v, cfg), c, bound)


@dataclass(frozen=True)
class StatisticalOutcome:
    partition: ModePartition
    verdicts: tuple[EstimatedVerdict, ...]

    @property
    def excluded_by(self) -> tuple[int, ...]:
        return tuple(i for i, ev in enumerate(self.verdicts) if ev.verdict == "violated")

    @property
    def excluded(self) -> bool:
        return bool(self.excluded_by)


@dataclass(frozen=True)
class StatisticalReport:
    config: EnsembleConfig
    conditions: tuple[QuadCombination, ...]
    estimates: tuple[EstimatedVerdict, ...]
    outcomes: tuple[StatisticalOutcome, ...]

    @property
    def surviving(self) -> list[ModePartition]:
        return [o.partition for o in self.outcomes if not o.excluded]

    @property
    def genuine(self) -> bool:
        return bool(self.outcomes) and not self.surviving

    def to_dict(self) -> dict:
        conditions = []
        for i, (c, est) in enumerate(zip(self.conditions, self.estimates)):
            conditions.append(
                {
                    **c.to_dict(),
                    "estimate": est.estimate,
                    "std_error": est.std_error,
                    "verdicts": {str(o.partition): o.verdicts[i].verdict for o in self.outcomes},
                }
            )
        return {
            "seed": self.config.seed,
            "n_samples": self.config.n_samples,
            "detector_noise": self.config.detector_noise,
            "rng": RNG_ALGORITHM,
            "sigmas": SIGMAS,
            "conditions": conditions,
            "bipartitions": [
                {
                    "partition": str(o.partition),
                    "bounds": [ev.bound for ev in o.verdicts],
                    "excluded": o.excluded,
                    "excluded_by": list(o.excluded_by),
                }
                for o in self.outcomes
            ],
            "surviving": [str(p) for p in self.surviving],
            "genuine": self.genuine,
        }


def run_verification(
    v: CovarianceMatrix, conditions: Sequence[QuadCombination], cfg: EnsembleConfig
) -> StatisticalReport:
    """Estimate all conditions from one shared sample set and rule out bipartitions.

    A bipartition is excluded only by a statistically significant violation
    (estimate three standard errors below that condition's bound).
    """
    if not conditions:
        raise DomainError("need at least one condition")
    for c in conditions:
        if c.n_modes != v.n_modes:
            raise DimensionError(f"state has {v.n_modes} modes, condition has {c.n_modes}")
    require_enumerable(v.n_modes)
    samples = sample_quadratures(v, cfg)
    estimates = tuple(estimate_from_samples(samples, c, bound=0.0) for c in conditions)
    outcomes = tuple(
        StatisticalOutcome(
            p, tuple(est.against(partition_bound(c, p)) for c, est in zip(conditions, estimates))
        )
        for p in bipartitions(v.n_modes)
    )
    return StatisticalReport(cfg, tuple(conditions), estimates, outcomes)
