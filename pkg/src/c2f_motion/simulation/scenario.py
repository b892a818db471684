import dataclasses
import numpy as np
from .motion import partition_mask, random_rigid, random_smooth_field, variable_density_mask
from ..core.forward import make_coil_profiles, simulate_measurements
from ..core.numerics import make_rng
from ..core.warp import rigid_to_field
from ..types import (
    ComplexImage, DisplacementField, MotionProblem, SamplingMask, SimulationConfig,
    ShapeMismatchError, zero_field,
)
from ..logger import logger

@dataclasses.dataclass(frozen=True)
class SimulatedScan:
    problem: MotionProblem
    fields: tuple[DisplacementField, ...]
    base_mask: SamplingMask

def draw_fields(shape: tuple[int, int],
                cfg: SimulationConfig,
                rng: np.random.Generator) -> list[DisplacementField]:
    """State 0 gets the zero field; the others follow ``cfg.motion``."""
    fields = [zero_field(shape)]
    for _ in range(1, cfg.n_states):
        match cfg.motion:
            case "nonrigid":
                fields.append(random_smooth_field(shape, cfg.max_displacement, cfg.damping, rng))
            case "rigid":
                params = random_rigid(cfg.rigid_degrees, cfg.rigid_pixels, rng)
                fields.append(rigid_to_field(params, shape))
            case "static":
                fields.append(zero_field(shape))
    return fields

def simulate_scan(x: ComplexImage, cfg: SimulationConfig) -> SimulatedScan:
    """
    Full retrospective corruption of a ground-truth image: coil profiles,
    one variable-density mask split across the states, per-state motion and
    noisy measurements, all drawn from ``cfg.seed``.
    """
    if x.ndim != 2:
        raise ShapeMismatchError("ComplexImage", (0, 0), x.shape)
    rng = make_rng(cfg.seed)
    shape = x.shape

    maps = make_coil_profiles(shape, cfg.n_coils)
    base_mask = variable_density_mask(shape, cfg.acceleration, cfg.density_decay, rng,
                                      radius=cfg.density_radius)
    masks = partition_mask(base_mask, cfg.n_states, cfg.acs_mode, cfg.acs_width, rng)
    fields = draw_fields(shape, cfg, rng)
    problem = simulate_measurements(x, fields, masks, maps, cfg.noise_std, rng)

    logger.info(f"Simulated {cfg.n_states} states, {cfg.n_coils} coils, "
                f"R={base_mask.acceleration:.2f} overall ({cfg.motion} motion)")
    return SimulatedScan(problem=problem, fields=tuple(fields), base_mask=base_mask)

__all__ = [
    "SimulatedScan",
    "draw_fields",
    "simulate_scan",
]
