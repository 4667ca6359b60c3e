"""
Transmit-power allocation by successive convex approximation.

The rate objective is split into a difference of concave functions,

    l(p) = sum_m log2(p_m * h0)
    h(p) = sum_m log2(psi_m(p) + noise_m)

and h is replaced by its tangent plane at the current anchor. The resulting
concave surrogate is separable per UAV and is maximized in closed form by
water-filling with a bisected budget multiplier. Every outer step can only
raise l - h. When interference dominates the plain step barely moves the
powers, so each step is followed by an extrapolation along the same direction
that is kept only if it raises l - h further.

Powers are handled as link vectors indexed by GU (see core.channel).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..core.channel import coupling_matrix, link_rates, noise_terms
from ..core.config import NetworkConfig
from ..core.errors import DomainError
from ..core.model import Association, PowerAllocation, Topology

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)
# Upper bound on bisection rounds. The output guarantee is the KKT residual
# bound checked in kkt_residuals; the loop usually exits early once the
# bracket is at float resolution.
BISECTION_STEPS = 200
EXTRAPOLATION_STEPS = 60
EXTRAPOLATION_FLOOR = 1e-12     # fraction of p_max


@dataclass
class LinkSystem:
    """Coupling matrix and noise terms of one (topology, association) pair."""
    association: Association
    phi: np.ndarray          # (M, M)
    noise: np.ndarray        # (M,)
    ref_gain: float

    @classmethod
    def build(cls, topology: Topology, association: Association, config: NetworkConfig) -> "LinkSystem":
        return cls(
            association=association,
            phi=coupling_matrix(topology, association, config),
            noise=noise_terms(topology, association, config),
            ref_gain=config.ref_gain_linear,
        )

    def l_value(self, x: np.ndarray) -> float:
        if np.any(x <= 0):
            raise DomainError("D.C. objective needs strictly positive power on every associated link")
        return float(np.sum(np.log2(x * self.ref_gain)))

    def h_value(self, x: np.ndarray) -> float:
        return float(np.sum(np.log2(self.phi @ x + self.noise)))

    def h_grad(self, x: np.ndarray) -> np.ndarray:
        return self.phi.T @ (1.0 / (self.phi @ x + self.noise)) / LN2


@dataclass
class SurrogateModel:
    """Tangent of h at the anchor p'; grad is zero off the associated links."""
    anchor: np.ndarray       # (K, M) W
    grad: np.ndarray         # (K, M) 1/W
    h_at_anchor: float


@dataclass
class ScaReport:
    iterations: int = 0
    objective_trace: List[float] = field(default_factory=list)   # l - h, starting at p0
    rate_trace: List[float] = field(default_factory=list)        # true sum rate, bit/s
    converged: bool = False
    final_e: float = float("inf")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "iterations": self.iterations,
            "objective_trace": list(self.objective_trace),
            "rate_trace": list(self.rate_trace),
            "converged": self.converged,
            "final_e": self.final_e,
        }


def dc_parts(p: PowerAllocation, topology: Topology, association: Association,
             config: NetworkConfig, system: Optional[LinkSystem] = None) -> Tuple[float, float]:
    """(l, h) at p; l - h is the high-SINR sum of log2(sinr) over links."""
    system = system or LinkSystem.build(topology, association, config)
    x = p.links(association)
    return system.l_value(x), system.h_value(x)


def dc_objective(p: PowerAllocation, topology: Topology, association: Association,
                 config: NetworkConfig, system: Optional[LinkSystem] = None) -> float:
    l_val, h_val = dc_parts(p, topology, association, config, system=system)
    return l_val - h_val


def grad_h(p: PowerAllocation, topology: Topology, association: Association,
           config: NetworkConfig, system: Optional[LinkSystem] = None) -> np.ndarray:
    """K x M matrix of dh/dp on associated links."""
    system = system or LinkSystem.build(topology, association, config)
    g = system.h_grad(p.links(association))
    return PowerAllocation.from_links(g, association).p


def build_surrogate(p: PowerAllocation, topology: Topology, association: Association,
                    config: NetworkConfig, system: Optional[LinkSystem] = None) -> SurrogateModel:
    system = system or LinkSystem.build(topology, association, config)
    x = p.links(association)
    return SurrogateModel(
        anchor=p.p.copy(),
        grad=PowerAllocation.from_links(system.h_grad(x), association).p,
        h_at_anchor=system.h_value(x),
    )


def surrogate_value(p: PowerAllocation, model: SurrogateModel, topology: Topology,
                    association: Association, config: NetworkConfig,
                    system: Optional[LinkSystem] = None) -> float:
    """l(p) - [h(p') + grad . (p - p')]; a lower bound of l - h, tight at p'."""
    system = system or LinkSystem.build(topology, association, config)
    l_val = system.l_value(p.links(association))
    return l_val - (model.h_at_anchor + float(np.sum(model.grad * (p.p - model.anchor))))


def water_fill(g: np.ndarray, p_max: float) -> Tuple[np.ndarray, float]:
    """max sum log2(p) - g.p  s.t. sum p <= p_max, 0 <= p <= p_max.

    Returns (p, mu) with p = min(p_max, 1 / (ln2 (g + mu))).
    """
    g = np.asarray(g, dtype=float)

    def alloc(mu: float) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.minimum(p_max, 1.0 / (LN2 * (g + mu)))

    if g.size == 0:
        return g.copy(), 0.0
    if np.sum(alloc(0.0)) <= p_max:
        return alloc(0.0), 0.0

    lo, hi = 0.0, g.size / (LN2 * p_max)
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if np.sum(alloc(mid)) > p_max:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    # hi always satisfies the budget
    return alloc(hi), hi


def inner_solve(model: SurrogateModel, association: Association, config: NetworkConfig) -> PowerAllocation:
    """Per-UAV water-filling on the surrogate."""
    p = np.zeros_like(model.anchor)
    for k in range(association.n_uavs):
        members = association.members(k)
        if members.size == 0:
            continue
        p_k, mu = water_fill(model.grad[k, members], config.p_max)
        p[k, members] = p_k
        logger.debug(f"inner_solve uav={k} mu={mu:.6g} total={p_k.sum():.6g}")
    return PowerAllocation(p)


def kkt_residuals(p: np.ndarray, g: np.ndarray, mu: float, p_max: float) -> Dict[str, float]:
    """KKT residuals of one UAV's water-filling problem."""
    p = np.asarray(p, dtype=float)
    g = np.asarray(g, dtype=float)
    marginal = 1.0 / (LN2 * p) - g - mu
    capped = p >= p_max * (1.0 - 1e-12)
    stationarity = 0.0
    if np.any(~capped):
        stationarity = float(np.max(np.abs(marginal[~capped])))
    if np.any(capped):
        # a capped link must still want more power
        stationarity = max(stationarity, float(np.max(np.maximum(0.0, -marginal[capped]))))
    total = float(np.sum(p))
    return {
        "stationarity": stationarity,
        "budget": max(0.0, total - p_max),
        "slackness": abs(mu * (p_max - total)),
    }


def extrapolate(p: PowerAllocation, stepped: PowerAllocation, stepped_value: float,
                system: LinkSystem, association: Association,
                p_max: float) -> Tuple[PowerAllocation, float]:
    """Push past the water-filled point along the step direction in log-power.

    Candidates p * (stepped / p)^t for t = 2, 4, 8, ... are clipped to the box,
    scaled back onto each UAV's budget and kept while l - h still rises. The
    result is never worse than `stepped`.
    """
    start = np.log(p.links(association))
    direction = np.log(stepped.links(association)) - start
    best, best_value = stepped, stepped_value
    if not np.any(direction):
        return best, best_value

    floor, ceil = math.log(p_max * EXTRAPOLATION_FLOOR), math.log(p_max)
    t = 2.0
    for _ in range(EXTRAPOLATION_STEPS):
        links = np.exp(np.clip(start + t * direction, floor, ceil))
        totals = np.bincount(association.assign, weights=links, minlength=association.n_uavs)
        scale = np.ones_like(totals)
        over = totals > p_max
        scale[over] = p_max / totals[over]
        links = links * scale[association.assign]
        value = system.l_value(links) - system.h_value(links)
        if not value > best_value:
            break
        best, best_value = PowerAllocation.from_links(links, association), value
        t *= 2.0
    return best, best_value


def sca(p0: Optional[PowerAllocation], topology: Topology, association: Association,
        config: NetworkConfig, tol: Optional[float] = None,
        max_outer: Optional[int] = None) -> Tuple[PowerAllocation, ScaReport]:
    """Iterate surrogate construction and water-filling until the gain drops below tol.

    The gain e of an outer step is measured at the extrapolated point. When
    e < tol the plain water-filled point is returned; otherwise the next
    surrogate is anchored at the extrapolated point.
    """
    tol = config.sca_tol if tol is None else tol
    max_outer = config.sca_max_outer if max_outer is None else max_outer
    system = LinkSystem.build(topology, association, config)
    if p0 is None:
        sizes = association.cluster_sizes()
        p0 = PowerAllocation.from_links(config.p_max / sizes[association.assign], association)
    p = p0

    report = ScaReport()
    current = dc_objective(p, topology, association, config, system=system)
    report.objective_trace.append(current)
    report.rate_trace.append(float(np.sum(link_rates(topology, association, p, config))))

    for j in range(1, max_outer + 1):
        model = build_surrogate(p, topology, association, config, system=system)
        stepped = inner_solve(model, association, config)
        stepped_value = dc_objective(stepped, topology, association, config, system=system)
        ahead, ahead_value = extrapolate(p, stepped, stepped_value, system, association, config.p_max)
        report.final_e = abs(ahead_value - current)
        report.iterations = j
        if report.final_e < tol:
            report.converged = True
            p, current = stepped, stepped_value
        else:
            p, current = ahead, ahead_value
        report.objective_trace.append(current)
        report.rate_trace.append(float(np.sum(link_rates(topology, association, p, config))))
        if report.converged:
            break

    if not report.converged:
        logger.warning(f"SCA stopped at max_outer={max_outer} with e={report.final_e:.3g}")
    return p, report
