"""Replicated, seeded sweeps over (policy, drift coefficient) grids.

Each (policy, l, replication) triple gets its own stream seed derived from
the master seed with a fixed 64-bit mixing function, so results are
bit-identical across machines and across any parallel execution order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import fmean, stdev
from typing import Sequence

from .analysis import SummaryMetrics, summarize
from .core import BanditInstance, DriftModel, NoiseModel
from .mechanism import Curve, MechanismOptions, run
from .policies import PolicyKind

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class ExperimentError(Exception):
    """A replication failed; the message names the offending triple."""


def _mix64(x: int) -> int:
    # splitmix64 finalizer
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master: int, policy_id: int, l_index: int, rep: int) -> int:
    """Stream seed for one (policy, l, replication) work item.

    Bit-exact definition: starting from master masked to 64 bits, for each of
    policy_id, l_index, rep in that order, add 0x9E3779B97F4A7C15 mod 2^64,
    xor in the word, and apply the splitmix64 finalizer.  Distinct inputs
    give distinct streams with overwhelming probability.
    """
    h = master & _MASK64
    for word in (policy_id, l_index, rep):
        h = (h + _GAMMA) & _MASK64
        h = _mix64(h ^ (word & _MASK64))
    return h


def aggregate(values: Sequence[float]) -> tuple[float, float]:
    """Arithmetic mean and sample standard deviation (n-1; 0 when n=1)."""
    xs = list(values)
    if not xs:
        raise ValueError("nothing to aggregate")
    if len(xs) == 1:
        return float(xs[0]), 0.0
    return fmean(xs), stdev(xs)


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: an environment, a policy list, and a drift-coefficient grid."""

    arm_means: tuple[float, ...]
    policies: tuple[PolicyKind, ...]
    l_values: tuple[float, ...]
    horizon: int
    replications: int
    master_seed: int
    noise_kind: str = "gaussian"
    noise_sigma: float = 1.0
    drift_kind: str = "linear"
    drift_cap: float | None = None  # clipped_linear only
    project_overrides: dict = field(default_factory=dict)  # policy name -> bool
    capture_trajectories: bool = False
    trajectory_stride: int = 10

    def __post_init__(self) -> None:
        if not self.l_values:
            raise ValueError("l_values must be non-empty")
        if any(l < 0 for l in self.l_values):
            raise ValueError("drift coefficients must be >= 0")
        if not self.policies:
            raise ValueError("policies must be non-empty")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.trajectory_stride < 1:
            raise ValueError("trajectory_stride must be >= 1")
        if self.horizon < len(self.arm_means):
            raise ValueError("horizon is shorter than the warm start over all arms")
        # fail early on bad environment / drift parameters
        self.instance()
        self.drift_model(self.l_values[0])

    def instance(self) -> BanditInstance:
        return BanditInstance(tuple(self.arm_means), NoiseModel(self.noise_kind, self.noise_sigma))

    def drift_model(self, lipschitz: float) -> DriftModel:
        return DriftModel(self.drift_kind, lipschitz=lipschitz, cap=self.drift_cap)

    def options_for(self, policy: PolicyKind) -> MechanismOptions:
        return MechanismOptions(project_feedback=self.project_overrides.get(policy.name))

    def to_dict(self) -> dict:
        return {
            "arm_means": list(self.arm_means),
            "noise": {"kind": self.noise_kind, "sigma": self.noise_sigma},
            "policies": [
                {"name": p.name} if p.c is None else {"name": p.name, "c": p.c}
                for p in self.policies
            ],
            "drift_kind": self.drift_kind,
            "drift_cap": self.drift_cap,
            "l_values": list(self.l_values),
            "horizon": self.horizon,
            "replications": self.replications,
            "master_seed": self.master_seed,
            "project_feedback": dict(self.project_overrides),
            "capture_trajectories": self.capture_trajectories,
            "trajectory_stride": self.trajectory_stride,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        noise = data.get("noise", {})
        policies = tuple(
            PolicyKind(p["name"], p.get("c")) for p in data["policies"]
        )
        return cls(
            arm_means=tuple(data["arm_means"]),
            policies=policies,
            l_values=tuple(data["l_values"]),
            horizon=int(data["horizon"]),
            replications=int(data["replications"]),
            master_seed=int(data["master_seed"]),
            noise_kind=noise.get("kind", "gaussian"),
            noise_sigma=float(noise.get("sigma", 1.0)),
            drift_kind=data.get("drift_kind", "linear"),
            drift_cap=data.get("drift_cap"),
            project_overrides=dict(data.get("project_feedback", {})),
            capture_trajectories=bool(data.get("capture_trajectories", False)),
            trajectory_stride=int(data.get("trajectory_stride", 10)),
        )


@dataclass(frozen=True)
class CellResult:
    """Aggregated metrics for one (policy, l) grid cell."""

    policy: PolicyKind
    l: float
    regret_mean: float
    regret_std: float
    comp_mean: float
    comp_std: float
    comp_rounds_mean: float
    comp_rounds_std: float
    arm1_err_mean: float
    arm1_err_std: float
    comp_count_per_arm_mean: tuple[float, ...] = ()
    curve_rounds: tuple[int, ...] | None = None
    regret_curve_mean: tuple[float, ...] | None = None
    comp_curve_mean: tuple[float, ...] | None = None


@dataclass(frozen=True)
class AggregateResult:
    config: ExperimentConfig
    cells: tuple[CellResult, ...]  # policy-major, then l, matching config order

    def cell(self, policy_name: str, l: float) -> CellResult:
        for c in self.cells:
            if c.policy.name == policy_name and c.l == l:
                return c
        raise KeyError(f"no cell for ({policy_name}, {l})")


def _run_one(config: ExperimentConfig, p_idx: int, l_idx: int,
             rep: int) -> tuple[SummaryMetrics, Curve | None]:
    policy = config.policies[p_idx]
    drift = config.drift_model(config.l_values[l_idx])
    seed = derive_seed(config.master_seed, p_idx, l_idx, rep)
    stride = config.trajectory_stride if config.capture_trajectories else None
    traj = run(config.instance(), policy, drift, config.options_for(policy),
               config.horizon, seed, stride=stride, keep_records=False)
    return summarize(traj, config.instance()), traj.curve


def _aggregate_cell(policy: PolicyKind, l: float,
                    outcomes: list[tuple[SummaryMetrics, Curve | None]]) -> CellResult:
    metrics = [m for m, _ in outcomes]
    regret = aggregate([m.regret for m in metrics])
    comp = aggregate([m.compensation for m in metrics])
    rounds = aggregate([float(m.comp_rounds) for m in metrics])
    err = aggregate([m.arm1_rel_error for m in metrics])
    k = len(metrics[0].per_arm)
    per_arm_comp = tuple(fmean(m.per_arm[i][1] for m in metrics) for i in range(k))
    curve_rounds = regret_curve = comp_curve = None
    curves = [c for _, c in outcomes if c is not None]
    if curves:
        curve_rounds = tuple(curves[0].rounds)
        regret_curve = tuple(fmean(col) for col in zip(*(c.regret for c in curves)))
        comp_curve = tuple(fmean(col) for col in zip(*(c.compensation for c in curves)))
    return CellResult(
        policy=policy, l=l,
        regret_mean=regret[0], regret_std=regret[1],
        comp_mean=comp[0], comp_std=comp[1],
        comp_rounds_mean=rounds[0], comp_rounds_std=rounds[1],
        arm1_err_mean=err[0], arm1_err_std=err[1],
        comp_count_per_arm_mean=per_arm_comp,
        curve_rounds=curve_rounds, regret_curve_mean=regret_curve,
        comp_curve_mean=comp_curve,
    )


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> AggregateResult:
    """Run every (policy, l, replication) work item and aggregate per cell.

    `jobs` bounds parallel worker processes; results do not depend on it.
    """
    items = [
        (p_idx, l_idx, rep)
        for p_idx in range(len(config.policies))
        for l_idx in range(len(config.l_values))
        for rep in range(config.replications)
    ]
    outcomes: dict[tuple[int, int, int], tuple[SummaryMetrics, Curve | None]] = {}
    if jobs <= 1:
        for item in items:
            try:
                outcomes[item] = _run_one(config, *item)
            except Exception as exc:
                raise ExperimentError(_describe_failure(config, item, exc)) from exc
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(_run_one, config, *item): item for item in items}
            for future, item in futures.items():
                try:
                    outcomes[item] = future.result()
                except Exception as exc:
                    raise ExperimentError(_describe_failure(config, item, exc)) from exc

    cells = []
    for p_idx, policy in enumerate(config.policies):
        for l_idx, l in enumerate(config.l_values):
            per_cell = [outcomes[(p_idx, l_idx, rep)] for rep in range(config.replications)]
            cells.append(_aggregate_cell(policy, l, per_cell))
    return AggregateResult(config=config, cells=tuple(cells))


def _describe_failure(config: ExperimentConfig, item: tuple[int, int, int],
                      exc: Exception) -> str:
    p_idx, l_idx, rep = item
    return (f"replication failed at policy={config.policies[p_idx].name}, "
            f"l={config.l_values[l_idx]}, rep={rep}: {exc}")
