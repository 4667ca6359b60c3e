# Trajectory-control environment
from .scenario import generate_scenario, initial_uav_positions, place_gus
from .uav_env import (
    StepOutcome, TraceRecord, UavEnv, action_bounds, encode_state, observation_size,
    raw_reward, wrap_angle,
)

__all__ = [
    "generate_scenario", "initial_uav_positions", "place_gus",
    "StepOutcome", "TraceRecord", "UavEnv", "action_bounds", "encode_state",
    "observation_size", "raw_reward", "wrap_angle",
]
