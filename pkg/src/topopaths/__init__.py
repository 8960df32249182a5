"""Clustered probabilistic roadmaps for finding topologically distinct paths."""
from .env import Bounds, Box, Environment, Sphere, WallWithWindows, read_vox, write_vox
from .errors import (BadSpec, EndpointMismatch, InvalidQuery, PlanningError, SamplingExhausted,
                     StartGoalDisconnected, TooLarge)
from .oracle import OracleResult, enumerate_classes
from .planner import PRESETS, PlannerParams, PlanResult, plan
from .scenarios import Scenario, generate_scenario, load_scenario, save_scenario
from .topology import Path, filter_paths, find_distinct_paths, shorten_path, uvd_deformable

__version__ = "0.1.0"
