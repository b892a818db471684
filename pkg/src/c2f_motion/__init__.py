from .diffusion import ShellSchedule, WienerDenoiser, estimate_spectrum, sample
from .pipeline import ReconResult, nrmse, reconstruct
from .registration import update_motion
from .simulation import simulate_scan
from .types import MotionProblem, ReconConfig, SimulationConfig
from .logger import enable_logging

__version__ = "0.1.0"

__all__ = [
    "ShellSchedule",
    "WienerDenoiser",
    "estimate_spectrum",
    "sample",
    "ReconResult",
    "nrmse",
    "reconstruct",
    "update_motion",
    "simulate_scan",
    "MotionProblem",
    "ReconConfig",
    "SimulationConfig",
    "enable_logging",
]
