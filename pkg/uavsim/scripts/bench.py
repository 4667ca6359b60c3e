import asyncio
import json
import sys
import time
from pathlib import Path
from statistics import median
from typing import Dict, List

import httpx
import numpy as np
import psutil

HERE = Path(__file__).resolve()
UAVSIM_ROOT = HERE.parents[1]

if str(UAVSIM_ROOT) not in sys.path:
    sys.path.insert(0, str(UAVSIM_ROOT))

from src.association.bkmc import bkmc  # noqa: E402
from src.core.config import NetworkConfig  # noqa: E402
from src.env.scenario import generate_scenario, initial_uav_positions  # noqa: E402
from src.env.uav_env import UavEnv  # noqa: E402
from src.power.sca import sca  # noqa: E402

BASE = "http://127.0.0.1:8000"


def percentiles(ms: List[float]) -> Dict[str, float]:
    if not ms:
        return {"p50_ms": 0.0, "p95_ms": 0.0}
    return {"p50_ms": median(ms), "p95_ms": sorted(ms)[max(int(0.95 * len(ms)) - 1, 0)]}


def bench_sca(config: NetworkConfig, total: int) -> Dict[str, float]:
    ms, outer = [], []
    for seed in range(total):
        topology = generate_scenario(config, seed)
        clustering = bkmc(topology.gu_pos, initial_uav_positions(config)[:, :2])
        t0 = time.perf_counter()
        _, report = sca(None, topology, clustering.association, config)
        ms.append((time.perf_counter() - t0) * 1000.0)
        outer.append(report.iterations)
    return dict(percentiles(ms), mean_outer_iterations=float(np.mean(outer)))


def bench_env(config: NetworkConfig, episodes: int) -> Dict[str, float]:
    env = UavEnv(config)
    ms = []
    for seed in range(episodes):
        env.reset(seed)
        while not env.done:
            t0 = time.perf_counter()
            env.step(np.zeros(env.action_size))
            ms.append((time.perf_counter() - t0) * 1000.0)
    total_s = sum(ms) / 1000.0
    return dict(percentiles(ms), steps=len(ms), steps_s=(len(ms) / total_s) if total_s else 0.0)


async def run_case(client: httpx.AsyncClient, payload: dict):
    t0 = time.time()
    try:
        r = await client.post(BASE + "/v1/runs/evaluate", json=payload)
        return {"ms": (time.time() - t0) * 1000.0, "status": r.status_code}
    except Exception as e:
        return {"ms": (time.time() - t0) * 1000.0, "status": 0, "error": str(e)}


async def bench_api(concurrency: int, total: int) -> Dict[str, float]:
    payloads = [{"scheme": "su-pp", "seeds": [i], "n_slots": 5} for i in range(total)]
    limits = httpx.Limits(max_keepalive_connections=concurrency, max_connections=concurrency)
    async with httpx.AsyncClient(limits=limits, timeout=60.0) as client:
        tasks = [run_case(client, p) for p in payloads]
        results = []
        for i in range(0, len(tasks), concurrency):
            results.extend(await asyncio.gather(*tasks[i:i + concurrency]))
    ms = [r["ms"] for r in results if r["status"] == 200]
    return dict(percentiles(ms), success=len(ms), failure=len(results) - len(ms))


def main(total: int = 20, episodes: int = 2, api: bool = False, concurrency: int = 4) -> int:
    config = NetworkConfig()
    bench = {
        "sca": bench_sca(config, total),
        "env_step": bench_env(config, episodes),
    }
    if api:
        bench["api"] = asyncio.run(bench_api(concurrency, total))
    bench["cpu_percent"] = psutil.cpu_percent(interval=0.5)
    bench["mem_percent"] = psutil.virtual_memory().percent
    bench["rss_mb"] = psutil.Process().memory_info().rss / 2 ** 20
    print(json.dumps(bench, indent=2))
    with open("bench.json", "w") as f:
        json.dump(bench, f)
    return 0


if __name__ == "__main__":
    import argparse
    ap = argparse.ArgumentParser()
    ap.add_argument("--total", type=int, default=20, help="SCA solves / API requests")
    ap.add_argument("--episodes", type=int, default=2, help="Environment episodes to time")
    ap.add_argument("--api", action="store_true", help="Also benchmark a running API server")
    ap.add_argument("--concurrency", type=int, default=4)
    args = ap.parse_args()
    raise SystemExit(main(args.total, args.episodes, args.api, args.concurrency))
