"""Total-variance criteria for partial separability of N-mode states.

A condition is a pair of quadrature combinations ``u = sum_j h_j x_j`` and
``v = sum_j g_j p_j``. Every state that is separable with respect to a
partition of the modes into blocks ``B_1..B_K`` obeys

    Var(u) + Var(v) >= 1/2 * sum_k |sum_{j in B_k} h_j g_j|,

so a measured total variance below that value rules the partition out.
Refining a partition can only raise the right-hand side (triangle
inequality), which is why certification only has to look at bipartitions.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError
from .gaussian import CovarianceMatrix

#: Bipartition enumeration grows as 2^(N-1); beyond this we refuse.
MAX_CERTIFY_MODES = 20
#: Bipartition bound reached by every canonical (pair) condition whose pair is split.
CANONICAL_BOUND = 1.0


@dataclass(frozen=True)
class QuadCombination:
    """Coefficients of ``u = sum h_j x_j`` and ``v = sum g_j p_j`` (index 0 is mode 1)."""

    h: tuple[float, ...]
    g: tuple[float, ...]

    def __post_init__(self):
        h = tuple(float(x) for x in self.h)
        g = tuple(float(x) for x in self.g)
        if len(h) != len(g):
            raise DimensionError(f"h has {len(h)} entries but g has {len(g)}")
        if not h:
            raise DimensionError("combination needs at least one mode")
        if not any(h) and not any(g):
            raise DomainError("combination has no nonzero coefficient")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "g", g)

    @property
    def n_modes(self) -> int:
        return len(self.h)

    def weights(self) -> np.ndarray:
        """Per-mode products ``h_j g_j``."""
        return np.asarray(self.h) * np.asarray(self.g)

    def to_dict(self) -> dict:
        return {"h": list(self.h), "g": list(self.g)}

    @classmethod
    def from_dict(cls, data: dict) -> "QuadCombination":
        return cls(tuple(data["h"]), tuple(data["g"]))


@dataclass(frozen=True)
class ModePartition:
    """Partition of modes ``1..N`` into disjoint nonempty blocks, stored canonically."""

    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        blocks = [frozenset(int(m) for m in b) for b in self.blocks]
        if not blocks or any(not b for b in blocks):
            raise DomainError("partition needs at least one block and no empty blocks")
        union = frozenset().union(*blocks)
        if sum(len(b) for b in blocks) != len(union):
            raise DomainError("partition blocks overlap")
        if union != frozenset(range(1, len(union) + 1)):
            raise DomainError(f"partition must cover modes 1..{len(union)} exactly")
        object.__setattr__(self, "blocks", tuple(sorted(blocks, key=min)))

    @classmethod
    def parse(cls, text: str) -> "ModePartition":
        """Parse ``"1,2|3"``-style notation."""
        return cls(tuple(frozenset(int(m) for m in part.split(",")) for part in text.split("|")))

    @classmethod
    def bipartition(cls, block: Iterable[int], n_modes: int) -> "ModePartition":
        block = frozenset(block)
        return cls((block, frozenset(range(1, n_modes + 1)) - block))

    @property
    def n_modes(self) -> int:
        return sum(len(b) for b in self.blocks)

    def refines(self, other: "ModePartition") -> bool:
        """True if every block of ``self`` sits inside some block of ``other``."""
        return self.n_modes == other.n_modes and all(
            any(b <= o for o in other.blocks) for b in self.blocks
        )

    def separates(self, m: int, n: int) -> bool:
        return not any(m in b and n in b for b in self.blocks)

    def __str__(self) -> str:
        return "|".join(",".join(str(m) for m in sorted(b)) for b in self.blocks)


def bipartitions(n_modes: int) -> Iterator[ModePartition]:
    """All ``2^(N-1) - 1`` bipartitions, in a fixed order."""
    if n_modes < 2:
        return
    rest = list(range(2, n_modes + 1))
    everything = frozenset(range(1, n_modes + 1))
    for mask in range(1, 2 ** (n_modes - 1)):
        other = frozenset(m for i, m in enumerate(rest) if mask >> i & 1)
        yield ModePartition((everything - other, other))


def set_partitions(n_modes: int) -> Iterator[ModePartition]:
    """Every partition of ``1..N`` (Bell-number many), via restricted growth strings."""

    def grow(prefix: list[int], top: int) -> Iterator[list[int]]:
        if len(prefix) == n_modes:
            yield prefix
            return
        for label in range(top + 2):
            yield from grow(prefix + [label], max(top, label))

    for labels in grow([0], 0):
        blocks: dict[int, set[int]] = {}
        for mode, label in enumerate(labels, start=1):
            blocks.setdefault(label, set()).add(mode)
        yield ModePartition(tuple(frozenset(b) for b in blocks.values()))


def _quadrature_vectors(c: QuadCombination) -> tuple[np.ndarray, np.ndarray]:
    n = c.n_modes
    hx = np.zeros(2 * n)
    gp = np.zeros(2 * n)
    hx[0::2] = c.h
    gp[1::2] = c.g
    return hx, gp


def total_variance(v: CovarianceMatrix, c: QuadCombination) -> float:
    """``Var(u) + Var(v)`` for a zero-mean state."""
    if v.n_modes != c.n_modes:
        raise DimensionError(f"state has {v.n_modes} modes, combination has {c.n_modes}")
    hx, gp = _quadrature_vectors(c)
    return float(hx @ v.entries @ hx + gp @ v.entries @ gp)


def commutator_coefficient(c: QuadCombination) -> float:
    """``sum_j h_j g_j``; ``[u, v] = (i/2)`` times this."""
    return float(np.sum(c.weights()))


def partition_bound(c: QuadCombination, partition: ModePartition) -> float:
    """Lower bound on the total variance for states separable across ``partition``."""
    if partition.n_modes != c.n_modes:
        raise DimensionError(
            f"partition covers {partition.n_modes} modes, combination has {c.n_modes}"
        )
    w = c.weights()
    return 0.5 * sum(abs(float(sum(w[m - 1] for m in b))) for b in partition.blocks)


def genuine_threshold(c: QuadCombination) -> float:
    """Smallest bipartition bound: undercutting it rules out every bipartition at once."""
    return _min_bipartition(c)[0]


def weakest_bipartition(c: QuadCombination) -> ModePartition:
    """A bipartition attaining :func:`genuine_threshold`."""
    return _min_bipartition(c)[1]


def _min_bipartition(c: QuadCombination) -> tuple[float, ModePartition]:
    # Modes with h_j g_j == 0 never change a bound, so only the placement of
    # the weighted modes has to be enumerated; the free modes just keep both
    # blocks nonempty.
    n = c.n_modes
    if n < 2:
        raise DomainError("a single mode has no bipartitions")
    w = c.weights()
    weighted = [j + 1 for j in range(n) if w[j] != 0.0]
    free = [j + 1 for j in range(n) if w[j] == 0.0]
    if len(weighted) > 24:
        raise DomainError(f"{len(weighted)} weighted modes is too many to enumerate")
    if not weighted:
        return 0.0, ModePartition.bipartition([1], n)

    best: tuple[float, ModePartition] | None = None
    head, tail = weighted[0], weighted[1:]
    for mask in range(2 ** len(tail)):
        side_a = [head] + [m for i, m in enumerate(tail) if mask >> i & 1]
        side_b = [m for i, m in enumerate(tail) if not mask >> i & 1]
        if not side_b:
            if not free:
                continue
            side_b = [free[0]]
        s_a = float(sum(w[m - 1] for m in side_a))
        s_b = float(sum(w[m - 1] for m in side_b))
        bound = 0.5 * (abs(s_a) + abs(s_b))
        if best is None or bound < best[0]:
            best = (bound, ModePartition.bipartition(side_b, n))
    assert best is not None
    return best


@dataclass(frozen=True)
class CriterionVerdict:
    """One condition evaluated on one state against a set of partitions."""

    total_variance: float
    bounds: dict[ModePartition, float]
    commutator_coefficient: float
    violated: frozenset[ModePartition] = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self,
            "violated",
            frozenset(p for p, b in self.bounds.items() if self.total_variance < b),
        )

    @property
    def genuine(self) -> bool:
        """Every listed partition is violated (meaningful when the list is all bipartitions)."""
        return bool(self.bounds) and len(self.violated) == len(self.bounds)

    def to_dict(self) -> dict:
        return {
            "total_variance": self.total_variance,
            "commutator_coefficient": self.commutator_coefficient,
            "bounds": [
                {"partition": str(p), "bound": b, "excluded": p in self.violated}
                for p, b in self.bounds.items()
            ],
            "genuine": self.genuine,
        }


def evaluate_condition(
    v: CovarianceMatrix,
    c: QuadCombination,
    partitions: Iterable[ModePartition] | None = None,
) -> CriterionVerdict:
    """Compare ``total_variance(v, c)`` to the bound of each partition (default: all bipartitions)."""
    if partitions is None:
        require_enumerable(v.n_modes)
        partitions = bipartitions(v.n_modes)
    t = total_variance(v, c)
    bounds = {p: partition_bound(c, p) for p in partitions}
    return CriterionVerdict(t, bounds, commutator_coefficient(c))


def require_enumerable(n_modes: int) -> None:
    if n_modes > MAX_CERTIFY_MODES:
        raise DomainError(
            f"refusing to enumerate 2^{n_modes - 1} bipartitions (limit {MAX_CERTIFY_MODES} modes)"
        )


@dataclass(frozen=True)
class BipartitionOutcome:
    partition: ModePartition
    bounds: tuple[float, ...]
    excluded_by: tuple[int, ...]

    @property
    def excluded(self) -> bool:
        return bool(self.excluded_by)


@dataclass(frozen=True)
class CertificationReport:
    """Which bipartitions a list of conditions rules out for a given state."""

    conditions: tuple[QuadCombination, ...]
    total_variances: tuple[float, ...]
    outcomes: tuple[BipartitionOutcome, ...]

    @property
    def excluded(self) -> list[ModePartition]:
        return [o.partition for o in self.outcomes if o.excluded]

    @property
    def surviving(self) -> list[ModePartition]:
        return [o.partition for o in self.outcomes if not o.excluded]

    @property
    def genuine(self) -> bool:
        return bool(self.outcomes) and not self.surviving

    def to_dict(self) -> dict:
        return {
            "conditions": [
                {**c.to_dict(), "total_variance": t}
                for c, t in zip(self.conditions, self.total_variances)
            ],
            "bipartitions": [
                {
                    "partition": str(o.partition),
                    "bounds": list(o.bounds),
                    "excluded": o.excluded,
                    "excluded_by": list(o.excluded_by),
                }
                for o in self.outcomes
            ],
            "surviving": [str(p) for p in self.surviving],
            "genuine": self.genuine,
        }


def certify_genuine(
    v: CovarianceMatrix, conditions: Sequence[QuadCombination]
) -> CertificationReport:
    """Rule out bipartitions with a set of conditions.

    A bipartition is excluded when at least one condition's total variance
    is strictly below that condition's bound for the bipartition. The state
    is certified genuinely N-partite entangled (no decomposition separable
    across one fixed bipartition) when every bipartition is excluded.
    Finer partitions need no separate check since their bounds are never
    smaller than those of a coarsening bipartition.
    """
    if not conditions:
        raise DomainError("need at least one condition")
    for c in conditions:
        if c.n_modes != v.n_modes:
            raise DimensionError(f"state has {v.n_modes} modes, condition has {c.n_modes}")
    require_enumerable(v.n_modes)
    variances = tuple(total_variance(v, c) for c in conditions)
    outcomes = []
    for p in bipartitions(v.n_modes):
        bounds = tuple(partition_bound(c, p) for c in conditions)
        hits = tuple(i for i, (t, b) in enumerate(zip(variances, bounds)) if t < b)
        outcomes.append(BipartitionOutcome(p, bounds, hits))
    return CertificationReport(tuple(conditions), variances, tuple(outcomes))


def set_threshold(conditions: Sequence[QuadCombination]) -> float:
    """Largest ``t`` such that all variances below ``t`` certify: ``min_P max_c bound(c, P)``."""
    if not conditions:
        raise DomainError("need at least one condition")
    n = conditions[0].n_modes
    require_enumerable(n)
    return min(max(partition_bound(c, p) for c in conditions) for p in bipartitions(n))


def pair_condition(n_modes: int, m: int, n: int, gains: float | Sequence[float] = 0.0) -> QuadCombination:
    """``u = x_m - x_n``, ``v = p_m + p_n + sum_{j != m,n} gains_j p_j``."""
    if m == n or not (1 <= m <= n_modes and 1 <= n <= n_modes):
        raise DimensionError(f"invalid mode pair ({m}, {n}) for {n_modes} modes")
    gains = _gain_vector(n_modes, gains)
    h = [0.0] * n_modes
    h[m - 1], h[n - 1] = 1.0, -1.0
    g = list(gains)
    g[m - 1] = g[n - 1] = 1.0
    return QuadCombination(tuple(h), tuple(g))


def _gain_vector(n_modes: int, gains: float | Sequence[float]) -> tuple[float, ...]:
    if np.isscalar(gains):
        return (float(gains),) * n_modes
    gains = tuple(float(x) for x in gains)
    if len(gains) != n_modes:
        raise DimensionError(f"expected {n_modes} gains, got {len(gains)}")
    return gains


def ghz_condition_set(n_modes: int, gains: float | Sequence[float]) -> list[QuadCombination]:
    """The ``N - 1`` adjacent-pair conditions ``(1,2), (2,3), ..., (N-1,N)``."""
    if n_modes < 3:
        raise DomainError("condition sets are defined for three or more modes")
    return [pair_condition(n_modes, k, k + 1, gains) for k in range(1, n_modes)]


def symmetric_single_condition(n_modes: int) -> QuadCombination:
    """``u = x_1 - sum_{j>1} x_j / sqrt(N-1)``, ``v = p_1 + sum_{j>1} p_j / sqrt(N-1)``."""
    if n_modes < 2:
        raise DomainError("need at least two modes")
    k = 1.0 / math.sqrt(n_modes - 1)
    return QuadCombination((1.0,) + (-k,) * (n_modes - 1), (1.0,) + (k,) * (n_modes - 1))


def _require_three(n_modes: int) -> None:
    if n_modes < 3:
        raise DomainError("gain optimisation needs at least three modes")


def optimal_gain(n_modes: int, r1: float, r2: float) -> float:
    """Uniform gain minimising the canonical conditions' variance on the GHZ-type family."""
    _require_three(n_modes)
    e1m, e2p = math.exp(-2 * r1), math.exp(2 * r2)
    return (e2p - e1m) / (e2p + 0.5 * (n_modes - 2) * e1m)


def ghz_condition_variance(n_modes: int, r1: float, r2: float, gain: float) -> float:
    """Closed-form total variance of each canonical condition on the GHZ-type family."""
    _require_three(n_modes)
    n = n_modes
    return (
        math.exp(-2 * r2) / 2
        + (2 + (n - 2) * gain) ** 2 / (4 * n) * math.exp(-2 * r1)
        + (gain - 1) ** 2 * (n - 2) / (2 * n) * math.exp(2 * r2)
    )


def fitted_gain(v: CovarianceMatrix, m: int, n: int) -> float:
    """Uniform gain on the other modes' momenta minimising ``Var(p_m + p_n + g sum p_j)`` in ``v``.

    For GHZ-type states this reproduces :func:`optimal_gain`.
    """
    others = [j for j in range(1, v.n_modes + 1) if j not in (m, n)]
    if not others:
        raise DomainError("no modes besides the pair to apply a gain to")
    pp = v.entries[1::2, 1::2]
    e = np.zeros(v.n_modes)
    e[[m - 1, n - 1]] = 1.0
    f = np.zeros(v.n_modes)
    f[[j - 1 for j in others]] = 1.0
    return float(-(f @ pp @ e) / (f @ pp @ f))


def fitted_condition_set(v: CovarianceMatrix) -> list[QuadCombination]:
    """Canonical conditions with each condition's gain fitted to ``v``."""
    n = v.n_modes
    if n < 3:
        raise DomainError("condition sets are defined for three or more modes")
    return [pair_condition(n, k, k + 1, fitted_gain(v, k, k + 1)) for k in range(1, n)]
