"""
Feasibility checks for the joint association / power / trajectory problem.

Constraint ids:
  min_rate      per-link rate >= r_min
  association   each GU served by exactly one UAV, no power on unassociated links
  power_budget  per-UAV power budget
  power_box     per-link power box
  separation    pairwise UAV separation >= d_min
  speed         per-slot speed <= v_max
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .channel import link_rates
from .config import NetworkConfig
from .errors import DomainError
from .model import Association, PowerAllocation, Topology

logger = logging.getLogger(__name__)

CONSTRAINT_IDS = ("min_rate", "association", "power_budget", "power_box", "separation", "speed")
SPEED_TOL = 1e-9


@dataclass
class ViolationReport:
    """Per constraint id, the (slot, index) pairs that violate it. Slots count from 1."""
    violations: Dict[str, List[Tuple[int, int]]] = field(
        default_factory=lambda: {cid: [] for cid in CONSTRAINT_IDS}
    )

    def add(self, cid: str, slot: int, index: int) -> None:
        self.violations[cid].append((int(slot), int(index)))

    def has(self, cid: str) -> bool:
        return bool(self.violations.get(cid))

    @property
    def feasible(self) -> bool:
        return not any(self.violations.values())

    def counts(self) -> Dict[str, int]:
        return {cid: len(v) for cid, v in self.violations.items()}

    def to_dict(self) -> Dict[str, List[List[int]]]:
        return {cid: [list(item) for item in v] for cid, v in self.violations.items()}


def proximity_violations(topology: Topology, d_min: float) -> List[Tuple[int, int]]:
    """UAV pairs (i, j), i < j, closer than d_min in 3-D."""
    pos = topology.uav_pos
    pairs = []
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            if np.linalg.norm(pos[i] - pos[j]) < d_min:
                pairs.append((i, j))
    return pairs


def speed_violations(previous: Topology, current: Topology, config: NetworkConfig) -> List[int]:
    """UAVs whose displacement over one slot exceeds v_max * slot_duration."""
    step = np.linalg.norm(current.uav_pos - previous.uav_pos, axis=1)
    limit = config.v_max * config.slot_duration + SPEED_TOL
    return [int(k) for k in np.flatnonzero(step > limit)]


def check_constraints(topologies: Sequence[Topology], association: Association,
                      powers: Union[PowerAllocation, Sequence[PowerAllocation]],
                      config: NetworkConfig, tol: float = 1e-9,
                      previous: Optional[Topology] = None, first_slot: int = 1) -> ViolationReport:
    """Evaluate every constraint over a slot sequence.

    `powers` is either one allocation reused for every slot or one per slot.
    `previous` is the topology before the first slot, used only for the speed
    check; `first_slot` numbers the first topology in the report.
    An empty report means the sequence is feasible.
    """
    if isinstance(powers, PowerAllocation):
        per_slot = [powers] * len(topologies)
    else:
        per_slot = list(powers)
        if len(per_slot) != len(topologies):
            raise DomainError(f"Got {len(per_slot)} power allocations for {len(topologies)} slots")

    report = ViolationReport()
    indicator = association.indicator()
    before = previous
    for n, (topo, alloc) in enumerate(zip(topologies, per_slot), start=first_slot):
        for m in np.flatnonzero(link_rates(topo, association, alloc, config) < config.r_min):
            report.add("min_rate", n, m)

        unassociated = (indicator == 0) & (np.abs(alloc.p) > tol)
        for m in np.flatnonzero((indicator.sum(axis=0) != 1) | unassociated.any(axis=0)):
            report.add("association", n, m)

        for k in np.flatnonzero(alloc.per_uav_total() > config.p_max + tol):
            report.add("power_budget", n, k)

        box = (alloc.p < -tol) | (alloc.p > config.p_max + tol)
        for m in np.flatnonzero(box.any(axis=0)):
            report.add("power_box", n, m)

        for i, j in proximity_violations(topo, config.d_min):
            report.add("separation", n, i)
            report.add("separation", n, j)

        if before is not None:
            for k in speed_violations(before, topo, config):
                report.add("speed", n, k)
        before = topo

    if not report.feasible:
        logger.debug(f"Constraint violations: {report.counts()}")
    return report
