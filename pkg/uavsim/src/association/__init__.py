# Balanced user association
from .bkmc import BkmcResult, SlotLayout, bkmc, centroid_update, make_slot_layout, slot_cost_matrix
from .hungarian import assignment_cost, hungarian

__all__ = [
    "BkmcResult", "SlotLayout", "bkmc", "centroid_update", "make_slot_layout",
    "slot_cost_matrix", "assignment_cost", "hungarian",
]
