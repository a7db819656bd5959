"""Domain types and primitive operations shared by every policy.

The environment (true arm means, noise), the drift model applied to
compensation, per-arm statistics, and the posted (drifted) mean that is the
only statistic visible to the principal and the players.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .rng import RngStream


class BanditError(Exception):
    """Base class for simulation errors."""


class UndefinedStatisticError(BanditError):
    """A per-arm statistic was requested before the arm was ever pulled."""


class WarmStartError(BanditError):
    """A policy was consulted while some arm still has zero pulls."""


class NonUniqueOptimumError(BanditError, ValueError):
    """Two or more arms share the maximum true mean."""


class DiagnosticError(BanditError):
    """A debug-mode runtime inequality check failed."""


def gaps(arm_means: Sequence[float]) -> tuple[tuple[float, ...], float]:
    """Per-arm suboptimality gaps and their positive minimum.

    Returns (gap_vector, delta_min) where gap_vector[i] is the distance from
    the best mean (0 for the best arm) and delta_min is the smallest positive
    gap.  Raises NonUniqueOptimumError when the maximum mean is attained by
    more than one arm.
    """
    best = max(arm_means)
    if sum(1 for m in arm_means if m == best) != 1:
        raise NonUniqueOptimumError(f"maximum mean {best} attained by more than one arm")
    vec = tuple(best - m for m in arm_means)
    return vec, min(g for g in vec if g > 0)


@dataclass(frozen=True)
class NoiseModel:
    """Reward noise: 'bernoulli' (mean-parameterized coin) or 'gaussian' (additive)."""

    kind: str
    sigma: float = 0.0  # gaussian only

    def __post_init__(self) -> None:
        if self.kind not in ("bernoulli", "gaussian"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")


@dataclass(frozen=True)
class BanditInstance:
    """Ground-truth environment: true arm means and the noise model.

    Known only to the simulator; policies never see these fields.  Requires at
    least two arms, means in (0, 1], and a unique best arm.
    """

    arm_means: tuple[float, ...]
    noise: NoiseModel
    best_arm: int = field(init=False)
    gap_vector: tuple[float, ...] = field(init=False)
    delta_min: float = field(init=False)

    def __post_init__(self) -> None:
        means = tuple(float(m) for m in self.arm_means)
        object.__setattr__(self, "arm_means", means)
        if len(means) < 2:
            raise ValueError("need at least 2 arms")
        if any(not 0 < m <= 1 for m in means):
            raise ValueError("arm means must lie in (0, 1]")
        vec, dmin = gaps(means)
        object.__setattr__(self, "best_arm", vec.index(0.0))
        object.__setattr__(self, "gap_vector", vec)
        object.__setattr__(self, "delta_min", dmin)

    @property
    def k(self) -> int:
        return len(self.arm_means)


@dataclass(frozen=True)
class DriftModel:
    """Feedback drift as a function of compensation.

    Kinds: 'zero' (no drift), 'linear' (lipschitz * x), 'clipped_linear'
    (linear up to an absolute cap).  All kinds are non-decreasing, vanish at
    0, and are Lipschitz with constant `lipschitz`.
    """

    kind: str
    lipschitz: float = 0.0
    cap: float | None = None  # clipped_linear only

    def __post_init__(self) -> None:
        if self.kind not in ("zero", "linear", "clipped_linear"):
            raise ValueError(f"unknown drift kind {self.kind!r}")
        if self.lipschitz < 0:
            raise ValueError("lipschitz coefficient must be >= 0")
        if self.kind == "clipped_linear":
            if self.cap is None or self.cap < 0:
                raise ValueError("clipped_linear requires cap >= 0")
        elif self.cap is not None:
            raise ValueError(f"cap is only meaningful for clipped_linear, not {self.kind!r}")


def drift_apply(model: DriftModel, x: float) -> float:
    """Drift injected into feedback for compensation x >= 0."""
    if x < 0:
        raise ValueError(f"compensation must be >= 0, got {x} (mechanism bug upstream)")
    if model.kind == "zero":
        return 0.0
    b = model.lipschitz * x
    if model.kind == "clipped_linear" and b > model.cap:
        return model.cap
    return b


@dataclass(slots=True)
class ArmState:
    """Running statistics for one arm, all in drifted-feedback terms."""

    pulls: int = 0
    feedback_sum: float = 0.0  # sum of credited (drifted, possibly projected) feedback
    drift_sum: float = 0.0  # cumulative injected drift
    comp_count: int = 0  # pulls that carried compensation
    comp_sum: float = 0.0  # cumulative compensation paid for this arm


def posted_mean(arm: ArmState) -> float:
    """Average drifted feedback: the one statistic policies and players see."""
    if arm.pulls < 1:
        raise UndefinedStatisticError("posted mean undefined before the first pull")
    return arm.feedback_sum / arm.pulls


def true_empirical_mean(arm: ArmState) -> float:
    """Average of true rewards with the drift backed out.  Diagnostic only."""
    if arm.pulls < 1:
        raise UndefinedStatisticError("empirical mean undefined before the first pull")
    return (arm.feedback_sum - arm.drift_sum) / arm.pulls


class PolicyView(NamedTuple):
    """What a policy is allowed to observe: posted means, pulls, the round."""

    t: int
    posted: tuple[float, ...]
    pulls: tuple[int, ...]


@dataclass
class SimState:
    """Global simulation state for one run.

    Owns the rng stream, so independent replications can run in parallel.
    Cumulative regret and compensation are derived from the per-arm counters
    in arm-index order, which makes the accounting identities exact rather
    than subject to per-round float accumulation order.
    """

    round: int  # 1-based
    arms: list[ArmState]
    gap_vector: tuple[float, ...]  # environment-side, for regret accounting
    rng: RngStream

    @classmethod
    def fresh(cls, instance: BanditInstance, rng: RngStream) -> "SimState":
        return cls(round=1, arms=[ArmState() for _ in range(instance.k)],
                   gap_vector=instance.gap_vector, rng=rng)

    @property
    def cum_regret(self) -> float:
        total = 0.0
        for g, a in zip(self.gap_vector, self.arms):
            total += g * a.pulls
        return total

    @property
    def cum_compensation(self) -> float:
        total = 0.0
        for a in self.arms:
            total += a.comp_sum
        return total

    def policy_view(self) -> PolicyView:
        posted = []
        pulls = []
        for a in self.arms:
            if a.pulls == 0:
                raise WarmStartError("warm start incomplete: an arm has zero pulls")
            posted.append(a.feedback_sum / a.pulls)
            pulls.append(a.pulls)
        return PolicyView(self.round, tuple(posted), tuple(pulls))


def sample_reward(instance: BanditInstance, arm: int, rng: RngStream) -> float:
    """Draw one true reward for `arm`; consumes exactly one rng value."""
    mu = instance.arm_means[arm]
    noise = instance.noise
    if noise.kind == "bernoulli":
        return 1.0 if rng.uniform() < mu else 0.0
    return mu + noise.sigma * rng.normal()
