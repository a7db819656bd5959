"""Principal arm-selection rules and the player's greedy rule.

All selections are computed solely from the posted (drifted) means and pull
counts exposed through a PolicyView; true means and undrifted empirical means
are not reachable from here.  Ties break to the lowest arm index everywhere,
and a uniform draw u maps to arm floor(u * K), so scripted-stream traces are
exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import PolicyView
from .rng import RngStream

POLICY_NAMES = ("ucb", "egreedy", "thompson", "greedy")


@dataclass(frozen=True)
class PolicyKind:
    """A named selection rule; 'egreedy' carries its exploration constant c.

    'greedy' is the no-incentive baseline that always takes the player's own
    choice (it never pays compensation).
    """

    name: str
    c: float | None = None

    def __post_init__(self) -> None:
        if self.name not in POLICY_NAMES:
            raise ValueError(f"unknown policy {self.name!r}, expected one of {POLICY_NAMES}")
        if self.name == "egreedy":
            if self.c is None or self.c <= 0:
                raise ValueError("egreedy requires c > 0")
        elif self.c is not None:
            raise ValueError(f"policy {self.name!r} takes no c parameter")

    @classmethod
    def ucb(cls) -> "PolicyKind":
        return cls("ucb")

    @classmethod
    def egreedy(cls, c: float) -> "PolicyKind":
        return cls("egreedy", float(c))

    @classmethod
    def thompson(cls) -> "PolicyKind":
        return cls("thompson")

    @classmethod
    def greedy(cls) -> "PolicyKind":
        return cls("greedy")


def _argmax(scores) -> int:
    best = 0
    bv = scores[0]
    for i in range(1, len(scores)):
        v = scores[i]
        if v > bv:
            best = i
            bv = v
    return best


def ucb_index(posted: float, pulls: int, t: int) -> float:
    """Optimism index: posted mean plus sqrt(2 ln t / pulls)."""
    if pulls < 1:
        raise ValueError("ucb index needs pulls >= 1")
    if t < 1:
        raise ValueError("ucb index needs t >= 1")
    return posted + math.sqrt(2.0 * math.log(t) / pulls)


def ucb_select(view: PolicyView) -> int:
    s = math.sqrt(2.0 * math.log(view.t))
    scores = [p + s / math.sqrt(n) for p, n in zip(view.posted, view.pulls)]
    return _argmax(scores)


def epsilon_schedule(c: float, k: int, t: int) -> float:
    """Exploration probability min(1, cK/t)."""
    if c <= 0:
        raise ValueError("c must be > 0")
    if k < 2:
        raise ValueError("need at least 2 arms")
    if t < 1:
        raise ValueError("t must be >= 1")
    eps = c * k / t
    return 1.0 if eps > 1.0 else eps


def egreedy_select(view: PolicyView, c: float, rng: RngStream) -> int:
    """Explore a uniform arm with probability eps_t, else exploit the posted argmax.

    Consumes one uniform for the coin (explore iff coin < eps_t) and, only
    when exploring, a second uniform for the arm.
    """
    k = len(view.posted)
    eps = epsilon_schedule(c, k, view.t)
    if rng.uniform() < eps:
        arm = int(rng.uniform() * k)
        return k - 1 if arm >= k else arm
    return _argmax(view.posted)


def thompson_sample(view: PolicyView, rng: RngStream) -> int:
    """Gaussian posterior sampling: theta_i = posted_i + z_i / sqrt(pulls_i + 1).

    Consumes one normal per arm, in arm-index order.
    """
    scores = [p + rng.normal() / math.sqrt(n + 1) for p, n in zip(view.posted, view.pulls)]
    return _argmax(scores)


def greedy_choice(view: PolicyView) -> int:
    """The player's myopic pick: argmax of posted means."""
    return _argmax(view.posted)


def select_arm(policy: PolicyKind, view: PolicyView, rng: RngStream) -> int:
    """Dispatch the principal's choice for one round."""
    name = policy.name
    if name == "ucb":
        return ucb_select(view)
    if name == "egreedy":
        return egreedy_select(view, policy.c, rng)
    if name == "thompson":
        return thompson_sample(view, rng)
    return greedy_choice(view)
