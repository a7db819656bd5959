"""The incentive loop: principal proposes, player follows the posted means.

Per round: the principal picks I_t, the player's greedy choice is G_t; when
they differ the principal pays the posted-mean difference, the player's
feedback picks up drift from that payment, and the (possibly projected)
feedback is credited to the pulled arm.  Compensation is computed from the
posted means at the start of the round, before the new pull lands.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

from .core import (
    ArmState,
    BanditInstance,
    DiagnosticError,
    DriftModel,
    SimState,
    WarmStartError,
    drift_apply,
    sample_reward,
)
from .policies import PolicyKind, greedy_choice, select_arm
from .rng import NumpyRng, RngStream

TRAJECTORY_COLUMNS = (
    "t", "chosen", "greedy", "compensated", "compensation",
    "drift", "raw_reward", "feedback", "cum_regret", "cum_compensation",
)


@dataclass(slots=True)
class RoundRecord:
    """Audit log for one round."""

    t: int
    chosen: int  # principal's arm I_t
    greedy: int  # player's own pick G_t
    compensated: bool
    compensation: float  # posted-mean difference paid (0 when not compensated)
    drift: float  # bias injected into feedback
    raw_reward: float  # true reward drawn from the environment
    feedback: float  # value credited to the arm (after optional projection)
    regret_increment: float  # true-mean gap of the chosen arm


@dataclass(frozen=True)
class MechanismOptions:
    """Knobs for the loop.

    project_feedback=None means "policy default": projection to [0, 1] is on
    for egreedy and off otherwise.  Use resolve() to pin it for a policy.
    debug enables the per-round UCB drift inequality checks.
    """

    project_feedback: bool | None = None
    warm_start: bool = True
    debug: bool = False

    def resolve(self, policy: PolicyKind) -> "MechanismOptions":
        if self.project_feedback is not None:
            return self
        return replace(self, project_feedback=policy.name == "egreedy")


class Curve(NamedTuple):
    """Cumulative regret/compensation sampled every `stride` rounds."""

    rounds: list[int]
    regret: list[float]
    compensation: list[float]


@dataclass
class Trajectory:
    """A complete run: per-round records plus the final state."""

    records: list[RoundRecord]
    final: SimState
    curve: Curve | None = None


def _credit(arm: ArmState, feedback: float, drift: float, compensation: float,
            compensated: bool) -> None:
    arm.pulls += 1
    arm.feedback_sum += feedback
    arm.drift_sum += drift
    if compensated:
        arm.comp_count += 1
        arm.comp_sum += compensation


def warm_start(state: SimState, instance: BanditInstance,
               options: MechanismOptions) -> list[RoundRecord]:
    """Pull each arm once, in index order, with no compensation.

    Resolves the undefined posted mean at zero pulls for every policy.
    Rounds 1..K; afterwards the state sits at round K+1.  project_feedback
    must already be resolved to a bool here (run() does this); None projects
    nothing.
    """
    if state.round != 1 or any(a.pulls for a in state.arms):
        raise WarmStartError("warm start requires a fresh state")
    project = bool(options.project_feedback)
    records = []
    for arm_idx in range(instance.k):
        r = sample_reward(instance, arm_idx, state.rng)
        fb = min(1.0, max(0.0, r)) if project else r
        _credit(state.arms[arm_idx], fb, 0.0, 0.0, False)
        records.append(RoundRecord(
            t=state.round, chosen=arm_idx, greedy=arm_idx, compensated=False,
            compensation=0.0, drift=0.0, raw_reward=r, feedback=fb,
            regret_increment=state.gap_vector[arm_idx]))
        state.round += 1
    return records


def _check_ucb_drift_bounds(state: SimState, view, chosen: int, x: float,
                            lipschitz: float) -> None:
    # Selection implies x_t <= sqrt(2 ln t / n_{I_t}); cumulative drift obeys
    # B_i <= 2 l sqrt(2 n_i ln t).  Checked with a round-off guard only.
    t = view.t
    log_t = math.log(t)
    bonus = math.sqrt(2.0 * log_t / view.pulls[chosen])
    if x > bonus + 1e-9 * max(1.0, bonus):
        raise DiagnosticError(
            f"round {t}: compensation {x} exceeds per-round drift bound {bonus}")
    for i, arm in enumerate(state.arms):
        cap = 2.0 * lipschitz * math.sqrt(2.0 * arm.pulls * log_t)
        if arm.drift_sum > cap + 1e-9 * max(1.0, cap):
            raise DiagnosticError(
                f"round {t}: arm {i} cumulative drift {arm.drift_sum} exceeds bound {cap}")


def step(state: SimState, policy: PolicyKind, drift: DriftModel,
         instance: BanditInstance, options: MechanismOptions) -> RoundRecord:
    """Play one incentivized round and update the state in place."""
    view = state.policy_view()
    chosen = select_arm(policy, view, state.rng)
    greedy = greedy_choice(view)
    compensated = chosen != greedy
    if compensated:
        x = view.posted[greedy] - view.posted[chosen]
        b = drift_apply(drift, x)
    else:
        x = 0.0
        b = 0.0
    if options.debug and policy.name == "ucb":
        _check_ucb_drift_bounds(state, view, chosen, x, drift.lipschitz)
    r = sample_reward(instance, chosen, state.rng)
    fb = r + b
    project = options.project_feedback
    if project is None:
        project = policy.name == "egreedy"
    if project:
        fb = min(1.0, max(0.0, fb))
    _credit(state.arms[chosen], fb, b, x, compensated)
    rec = RoundRecord(
        t=state.round, chosen=chosen, greedy=greedy, compensated=compensated,
        compensation=x, drift=b, raw_reward=r, feedback=fb,
        regret_increment=state.gap_vector[chosen])
    state.round += 1
    return rec


def run(instance: BanditInstance, policy: PolicyKind, drift: DriftModel,
        options: MechanismOptions, horizon: int, seed: int | RngStream,
        *, stride: int | None = None, keep_records: bool = True) -> Trajectory:
    """Warm-start then step until `horizon` rounds have been played.

    `seed` is either an integer (seeding the production stream) or an
    RngStream instance (e.g. ScriptedRng for golden traces).  Deterministic:
    identical inputs give bit-identical trajectories.  With `stride`, the
    cumulative regret/compensation are sampled every stride rounds (plus the
    final round) into Trajectory.curve.
    """
    if horizon < instance.k:
        raise ValueError(f"horizon {horizon} shorter than warm start over {instance.k} arms")
    if stride is not None and stride < 1:
        raise ValueError("stride must be >= 1")
    rng = seed if not isinstance(seed, int) else NumpyRng(seed)
    state = SimState.fresh(instance, rng)
    options = options.resolve(policy)

    records: list[RoundRecord] = []
    curve = Curve([], [], []) if stride is not None else None

    def capture(t: int) -> None:
        if curve is not None and (t % stride == 0 or t == horizon):
            curve.rounds.append(t)
            curve.regret.append(state.cum_regret)
            curve.compensation.append(state.cum_compensation)

    if options.warm_start:
        warm = warm_start(state, instance, options)
        if keep_records:
            records.extend(warm)
        for rec in warm:
            capture(rec.t)
    while state.round <= horizon:
        rec = step(state, policy, drift, instance, options)
        if keep_records:
            records.append(rec)
        capture(rec.t)
    return Trajectory(records=records, final=state, curve=curve)


def _fmt(x: float) -> str:
    return format(x, ".9g")


def trajectory_rows(trajectory: Trajectory):
    """Yield CSV rows (strings) in TRAJECTORY_COLUMNS order.

    Cumulative columns are recomputed from running pull counts against the
    true gaps, matching the exact accounting identity of SimState.
    """
    if not trajectory.records:
        raise ValueError("trajectory carries no records (captured with keep_records=False?)")
    gaps = trajectory.final.gap_vector
    pulls = [0] * len(gaps)
    comp_sums = [0.0] * len(gaps)
    for rec in trajectory.records:
        pulls[rec.chosen] += 1
        if rec.compensated:
            comp_sums[rec.chosen] += rec.compensation
        cum_regret = 0.0
        for g, n in zip(gaps, pulls):
            cum_regret += g * n
        cum_comp = 0.0
        for c in comp_sums:
            cum_comp += c
        yield (str(rec.t), str(rec.chosen), str(rec.greedy),
               "1" if rec.compensated else "0", _fmt(rec.compensation),
               _fmt(rec.drift), _fmt(rec.raw_reward), _fmt(rec.feedback),
               _fmt(cum_regret), _fmt(cum_comp))


def write_trajectory_csv(trajectory: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAJECTORY_COLUMNS)
        writer.writerows(trajectory_rows(trajectory))
