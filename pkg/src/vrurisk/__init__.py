"""Trajectory-replay collision-risk simulator for vehicle/VRU encounters.

Replays recorded road-user trajectories, gives every vehicle a
line-of-sight perception model, optionally lets a connected subset share
perception over V2X messages, and scores each vehicle/VRU pair with a
sigmoid-mapped risk factor derived from the earliest plausible time to
collision inside the vehicle's planned driving corridor.
"""

from . import dataset, geometry, report, risk, sensing, sim, synth, v2x
from .dataset import Recording, load_recording, write_recording
from .geometry import backend_name
from .report import SummaryStats, build_heatmap, export, summarize
from .risk import RiskEvent, RiskParams, evaluate_pair, risk_factor, risk_time
from .sim import RunResult, SimConfig, run, sweep

__version__ = "0.1.0"

__all__ = [
    "Recording",
    "RiskEvent",
    "RiskParams",
    "RunResult",
    "SimConfig",
    "SummaryStats",
    "backend_name",
    "build_heatmap",
    "dataset",
    "evaluate_pair",
    "export",
    "geometry",
    "load_recording",
    "report",
    "risk",
    "risk_factor",
    "risk_time",
    "run",
    "sensing",
    "sim",
    "summarize",
    "sweep",
    "synth",
    "v2x",
    "write_recording",
    "__version__",
]
