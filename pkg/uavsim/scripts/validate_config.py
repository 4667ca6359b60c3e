#!/usr/bin/env python3
r"""
Validate a simulator YAML config against the config schema and field rules.

Usage:
  cd uavsim
  python scripts/validate_config.py configs/scaled.yaml
"""

from __future__ import annotations

import sys
from pathlib import Path


HERE = Path(__file__).resolve()
UAVSIM_ROOT = HERE.parents[1]

if str(UAVSIM_ROOT) not in sys.path:
    sys.path.insert(0, str(UAVSIM_ROOT))


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("Usage: python scripts/validate_config.py path/to/config.yaml")
        return 2

    path = Path(argv[0])
    if not path.exists():
        print(f"FAIL: file not found: {path}")
        return 2

    from src.core.config import load_config
    from src.core.errors import ConfigError

    try:
        config = load_config(path)
    except ConfigError as e:
        print(f"FAIL: {e}")
        return 1

    net, ppo = config.network, config.ppo
    print(f"OK: {path} ({config.fingerprint()[:12]})")
    print(f"- network: K={net.n_uavs} M={net.n_gus} N={net.n_slots} area={net.area_side} m "
          f"interference={net.interference_mode} power={net.power_policy}")
    print(f"- ppo: episodes={ppo.episodes} actors={ppo.actors} minibatch={ppo.minibatch_size} "
          f"lr={ppo.learning_rate} optimizer={ppo.optimizer}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
