# Power allocation
from .policies import make_power_policy, random_power, uniform_power
from .sca import (
    LinkSystem, ScaReport, SurrogateModel, build_surrogate, dc_objective, dc_parts,
    grad_h, inner_solve, kkt_residuals, sca, surrogate_value, water_fill,
)

__all__ = [
    "make_power_policy", "random_power", "uniform_power",
    "LinkSystem", "ScaReport", "SurrogateModel", "build_surrogate", "dc_objective",
    "dc_parts", "grad_h", "inner_solve", "kkt_residuals", "sca", "surrogate_value",
    "water_fill",
]
