"""
Command line for training policies and running the benchmark schemes.

Usage (from uavsim/):
  python -m src.cli train --config configs/scaled.yaml --seed 0 --out runs/train
  python -m src.cli run --scheme su-pp --seeds 0-19 --out runs/su-pp
  python -m src.cli sweep --scheme ou-pp --uavs 2,3,4,5 --checkpoint "runs/k{n_uavs}/policy.npz" --out runs/sweep
  python -m src.cli report --runs runs --out runs
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from .core.config import SimConfig, dump_config, load_config
from .core.errors import ConfigError, UavSimError
from .env.uav_env import UavEnv
from .harness.export import export
from .harness.report import report
from .harness.runner import run_scheme, sweep
from .harness.schemes import ExperimentSpec, Scheme
from .ppo.agent import train
from .ppo.checkpoint import save_checkpoint, write_reward_curve

logger = logging.getLogger(__name__)

CHECKPOINT_FILE = "policy.npz"


def parse_int_list(text: str) -> List[int]:
    """'2,3,5' or '0-19' (inclusive) or a mix: '0-3,7'. Non-negative values only."""
    values: List[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "-" in part:
                lo, hi = part.split("-", 1)
                values.extend(range(int(lo), int(hi) + 1))
            else:
                values.append(int(part))
    except ValueError:
        raise ConfigError(f"Cannot parse integer list '{text}'")
    if not values:
        raise ConfigError(f"Empty integer list '{text}'")
    return values


def _load(args) -> SimConfig:
    config = load_config(args.config)
    overrides = {}
    if getattr(args, "n_uavs", None) is not None:
        overrides["n_uavs"] = args.n_uavs
    if getattr(args, "n_gus", None) is not None:
        overrides["n_gus"] = args.n_gus
    if getattr(args, "power_policy", None) is not None:
        overrides["power_policy"] = args.power_policy
    if overrides:
        config = SimConfig(network=config.network.replace(**overrides), ppo=config.ppo)
    return config


def cmd_train(args) -> int:
    config = _load(args)
    ppo = config.ppo if args.episodes is None else config.ppo.replace(episodes=args.episodes)
    network = config.network
    out = Path(args.out)
    logger.info(f"Training K={network.n_uavs} M={network.n_gus} for {ppo.episodes} episodes, "
                f"power policy {network.power_policy}, seed {args.seed}")

    result = train(lambda: UavEnv(network), ppo, args.seed)
    checkpoint = save_checkpoint(out / CHECKPOINT_FILE, result.params, ppo, network,
                                 extra={"seed": args.seed, "train_seconds": round(result.elapsed_s, 1)})
    write_reward_curve(out / "reward_curve.csv", result.reward_curve)
    dump_config(SimConfig(network=network, ppo=ppo), out / "config.yaml")
    print(f"OK: checkpoint {checkpoint}")
    return 0


def _spec(args, config: SimConfig) -> ExperimentSpec:
    return ExperimentSpec(
        scheme=args.scheme, seeds=parse_int_list(args.seeds), network=config.network,
        ppo=config.ppo, n_slots=args.slots, episodes=args.episodes, checkpoint=args.checkpoint,
        output_dir=Path(args.out),
    )


def cmd_run(args) -> int:
    config = _load(args)
    spec = _spec(args, config)
    result = run_scheme(spec, jobs=args.jobs)
    evaluated = SimConfig(network=spec.effective_network(), ppo=config.ppo)
    export(spec.output_dir, result.records, result.traces, config=evaluated, seeds=spec.seeds,
           layouts=result.layouts)
    print(f"OK: {len(result.records)} records in {spec.output_dir}")
    return 0


def cmd_sweep(args) -> int:
    if (args.uavs is None) == (args.gus is None):
        raise ConfigError("sweep needs exactly one of --uavs or --gus")
    config = _load(args)
    spec = _spec(args, config)
    field_name, values = ("n_uavs", args.uavs) if args.uavs is not None else ("n_gus", args.gus)
    results = sweep(spec, field_name, parse_int_list(values), jobs=args.jobs)
    for value, run in results.items():
        point = SimConfig(network=spec.effective_network().replace(**{field_name: value}), ppo=config.ppo)
        export(spec.output_dir / f"{field_name}_{value}", run.records, run.traces,
               config=point, seeds=spec.seeds, layouts=run.layouts)
    print(f"OK: {len(results)} sweep points in {spec.output_dir}")
    return 0


def cmd_report(args) -> int:
    summary = report(args.runs, args.out)
    print(f"OK: {summary}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="uavsim", description="THz multi-UAV downlink simulator")
    ap.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="YAML config (defaults when omitted)")
        p.add_argument("--out", required=True, help="Output directory")
        p.add_argument("--n-uavs", dest="n_uavs", type=int, default=None, help="Override network.n_uavs")
        p.add_argument("--n-gus", dest="n_gus", type=int, default=None, help="Override network.n_gus")

    p = sub.add_parser("train", help="Train a PPO trajectory policy")
    common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--episodes", type=int, default=None, help="Override ppo.episodes")
    p.add_argument("--power-policy", dest="power_policy", choices=["sca", "random", "uniform"], default=None)
    p.set_defaults(func=cmd_train)

    for name, func, helptext in (("run", cmd_run, "Evaluate one scheme over seeds"),
                                 ("sweep", cmd_sweep, "Evaluate one scheme per K or M value")):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("--scheme", required=True, choices=[s.value for s in Scheme])
        p.add_argument("--checkpoint", default=None,
                       help="Policy checkpoint for ou-* schemes; may contain {n_uavs} and {n_gus}")
        p.add_argument("--seeds", default="0-19", help="Seed list, e.g. 0-19 or 1,2,3")
        p.add_argument("--slots", type=int, default=None, help="Override network.n_slots")
        p.add_argument("--episodes", type=int, default=None,
                       help="Train ou-* policies for this many episodes when no --checkpoint is given")
        p.add_argument("--jobs", type=int, default=1, help="Worker processes for seeds")
        p.set_defaults(func=func)
        if name == "sweep":
            p.add_argument("--uavs", default=None, help="K values, e.g. 2,3,4,5")
            p.add_argument("--gus", default=None, help="M values, e.g. 12,24,36")

    p = sub.add_parser("report", help="Aggregate exported runs into summary tables")
    p.add_argument("--runs", required=True, help="Directory holding exported runs")
    p.add_argument("--out", default=None, help="Where to write the summaries (default: --runs)")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UavSimError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"FAIL: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
