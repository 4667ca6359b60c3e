"""
Experiment orchestration: run a scheme over seeds, sweep K or M, aggregate.

Seeds run as independent jobs (optionally in worker processes); results are
merged in seed order so output never depends on scheduling.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..core.config import NetworkConfig, PpoConfig, network_fingerprint
from ..core.errors import MissingCheckpointError
from ..core.model import Topology
from ..env.scenario import generate_scenario as _generate_scenario
from ..env.uav_env import StepOutcome, TraceRecord, UavEnv, action_bounds
from ..power.policies import Draw, make_power_policy
from ..ppo.agent import train
from ..ppo.checkpoint import check_compatible, load_checkpoint
from ..ppo.distribution import deterministic_action
from ..ppo.network import PolicyParams, policy_forward
from .schemes import ExperimentSpec, Scheme, needs_checkpoint, power_policy

logger = logging.getLogger(__name__)


@dataclass
class MetricsRecord:
    """Metrics of one (scheme, seed, slot)."""
    scheme: str
    seed: int
    slot: int
    n_uavs: int
    n_gus: int
    mean_gu_rate: float                  # bit/s
    uav_rates: List[float]               # R^lo per UAV, bit/s
    reward: float
    dc_objective: Optional[float]
    config_hash: str

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class SchemeRun:
    records: List[MetricsRecord] = field(default_factory=list)
    traces: List[Dict[str, Any]] = field(default_factory=list)
    layouts: List[Dict[str, Any]] = field(default_factory=list)     # one per seed

    def extend(self, other: "SchemeRun") -> None:
        self.records.extend(other.records)
        self.traces.extend(other.traces)
        self.layouts.extend(other.layouts)


def generate_scenario(config: NetworkConfig, seed: int) -> Topology:
    """Uniform GU layout for `seed`, UAVs at the environment's start positions."""
    return _generate_scenario(config, seed)


def train_policy(scheme: Scheme, network: NetworkConfig, ppo: PpoConfig, episodes: int,
                 rng_seed: int = 0) -> PolicyParams:
    """Train a trajectory policy for `scheme` in-process, under the scheme's power policy."""
    train_net = network.replace(power_policy=power_policy(scheme))
    logger.info(f"Training {scheme.value} policy for {episodes} episodes (no checkpoint given)")
    result = train(lambda: UavEnv(train_net), ppo.replace(episodes=episodes), rng_seed)
    return result.params


def _load_policy(spec: ExperimentSpec, network: NetworkConfig) -> Optional[PolicyParams]:
    if not needs_checkpoint(spec.scheme):
        return None
    path = spec.checkpoint_path(network)
    if path is None:
        if spec.episodes is not None:
            return train_policy(spec.scheme, network, spec.ppo, spec.episodes)
        raise MissingCheckpointError(f"Scheme {spec.scheme.value} needs a trained policy checkpoint "
                                     f"or an episodes count to train one")
    params, meta = load_checkpoint(path)
    check_compatible(meta, network)
    return params


def run_seed(scheme: Scheme, network: NetworkConfig, seed: int,
             params: Optional[PolicyParams] = None, draw: Optional[Draw] = None) -> SchemeRun:
    """One evaluation episode. Static UAVs hover; learned UAVs follow the squashed mean action."""
    # evaluation always emits every slot
    network = network.replace(terminate_on_violation=False)
    config_hash = network_fingerprint(network)
    env = UavEnv(network, power_policy=make_power_policy(power_policy(scheme), network, draw=draw))
    state, layout = env.reset(seed)
    learned = needs_checkpoint(scheme)
    if learned and params is None:
        raise MissingCheckpointError(f"Scheme {scheme.value} needs policy parameters")
    low, high = action_bounds(network)

    run = SchemeRun()
    run.layouts.append(dict(layout, scheme=scheme.value))
    done = False
    while not done:
        if learned:
            dist, _ = policy_forward(state, params)
            action = deterministic_action(dist, low, high)[0]
        else:
            action = np.zeros(env.action_size)
        outcome = StepOutcome(*env.step(action))
        info = outcome.info
        run.records.append(MetricsRecord(
            scheme=scheme.value, seed=seed, slot=info["slot"], n_uavs=network.n_uavs,
            n_gus=network.n_gus, mean_gu_rate=info["mean_gu_rate"], uav_rates=info["uav_rates"],
            reward=outcome.reward, dc_objective=info["dc_objective"], config_hash=config_hash,
        ))
        state, done = outcome.next_state, outcome.done
    run.traces = [_trace_row(scheme, seed, t) for t in env.trace]
    return run


def _trace_row(scheme: Scheme, seed: int, record: TraceRecord) -> Dict[str, Any]:
    row = {"scheme": scheme.value, "seed": seed}
    row.update(record.to_dict())
    return row


def _seed_job(args: Tuple[Scheme, NetworkConfig, int, Optional[PolicyParams]]) -> SchemeRun:
    scheme, network, seed, params = args
    return run_seed(scheme, network, seed, params)


def run_scheme(spec: ExperimentSpec, jobs: int = 1, draw: Optional[Draw] = None) -> SchemeRun:
    network = spec.effective_network()
    params = _load_policy(spec, network)
    logger.info(f"Running {spec.scheme.value} K={network.n_uavs} M={network.n_gus} over {len(spec.seeds)} seeds")

    merged = SchemeRun()
    if jobs > 1 and len(spec.seeds) > 1 and draw is None:
        work = [(spec.scheme, network, seed, params) for seed in spec.seeds]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            # map() yields in submission order
            for run in pool.map(_seed_job, work):
                merged.extend(run)
    else:
        for seed in spec.seeds:
            merged.extend(run_seed(spec.scheme, network, seed, params, draw=draw))
    return merged


def sweep(spec: ExperimentSpec, field_name: str, values: Sequence[int], jobs: int = 1) -> Dict[int, SchemeRun]:
    """run_scheme once per value of a NetworkConfig integer field, with matched seeds."""
    results: Dict[int, SchemeRun] = {}
    for value in values:
        network = spec.network.replace(**{field_name: int(value)})
        results[int(value)] = run_scheme(spec.with_network(network), jobs=jobs)
    return results


def sweep_uavs(spec: ExperimentSpec, values: Sequence[int] = (2, 3, 4, 5), jobs: int = 1) -> Dict[int, SchemeRun]:
    return sweep(spec, "n_uavs", values, jobs=jobs)


def sweep_gus(spec: ExperimentSpec, values: Sequence[int], jobs: int = 1) -> Dict[int, SchemeRun]:
    return sweep(spec, "n_gus", values, jobs=jobs)


def record_metrics(record: MetricsRecord) -> Dict[str, Optional[float]]:
    """Flat metric name -> value view of one record."""
    metrics: Dict[str, Optional[float]] = {
        "mean_gu_rate": record.mean_gu_rate,
        "reward": record.reward,
        "dc_objective": record.dc_objective,
    }
    for k, rate in enumerate(record.uav_rates):
        metrics[f"uav_rate_{k}"] = rate
    return metrics


@dataclass
class AggregateRow:
    scheme: str
    n_uavs: int
    n_gus: int
    slot: Optional[int]          # None = averaged over all slots
    metric: str
    mean: float
    std: float
    n_seeds: int


def aggregate(records: Iterable[MetricsRecord], per_slot: bool = True) -> List[AggregateRow]:
    """Mean and standard deviation across seeds.

    With per_slot=False every seed is first averaged over its slots.
    """
    groups: Dict[Tuple, Dict[int, List[float]]] = {}
    for rec in records:
        slot = rec.slot if per_slot else None
        for metric, value in record_metrics(rec).items():
            if value is None:
                continue
            key = (rec.scheme, rec.n_uavs, rec.n_gus, slot, metric)
            groups.setdefault(key, {}).setdefault(rec.seed, []).append(float(value))

    rows = []
    for key in sorted(groups, key=lambda k: (k[0], k[1], k[2], -1 if k[3] is None else k[3], k[4])):
        per_seed = np.array([np.mean(v) for _, v in sorted(groups[key].items())])
        scheme, n_uavs, n_gus, slot, metric = key
        rows.append(AggregateRow(
            scheme=scheme, n_uavs=n_uavs, n_gus=n_gus, slot=slot, metric=metric,
            mean=float(per_seed.mean()), std=float(per_seed.std()), n_seeds=int(per_seed.size),
        ))
    return rows


def summarize(records: Iterable[MetricsRecord]) -> List[AggregateRow]:
    """Per-scheme, per-(K, M) averages over all slots and seeds."""
    return aggregate(records, per_slot=False)


def seed_means(records: Iterable[MetricsRecord], metric: str = "mean_gu_rate") -> Dict[int, float]:
    """Per-seed average of a metric over slots."""
    values: Dict[int, List[float]] = {}
    for rec in records:
        value = record_metrics(rec).get(metric)
        if value is not None:
            values.setdefault(rec.seed, []).append(float(value))
    return {seed: float(np.mean(v)) for seed, v in sorted(values.items())}
