from typing import Literal
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

class _Config(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

class ScheduleConfig(_Config):
    steps: int = Field(default=100, ge=1)
    # "isotropic" drops the shell (H_t ≡ 1): the standard-diffusion comparison
    shaping: Literal["shell", "isotropic"] = "shell"
    a_clamp: float = Field(default=0.99, ge=0.0, lt=1.0)
    sigma_max: float = Field(default=80.0, gt=0.0)
    sigma_min: float = Field(default=0.002, gt=0.0)
    shell_scale: float = Field(default=5.0, gt=0.0)
    shell_rate: float = 5.0
    amplitude_slope: float = Field(default=1.1, ge=0.0)

    @model_validator(mode="after")
    def check_terminal_noise(self) -> ScheduleConfig:
        if self.sigma_min > 0.01 * self.sigma_max:
            raise ValueError("sigma_min must be at most 1% of sigma_max")
        return self

class GuidanceConfig(_Config):
    gamma: float = Field(default=1.0, ge=0.0)
    scaling: Literal["constant", "normalized"] = "constant"
    frozen_denoiser: bool = False
    # divide each state's data term by the gain of its warp
    warp_normalized: bool = True

class RegistrationConfig(_Config):
    grid_spacing: int = Field(default=16, ge=2)
    bspline_levels: int = Field(default=3, ge=1)
    bspline_iters: int = Field(default=50, ge=1)
    bspline_step: float = Field(default=0.5, gt=0.0)
    # Gaussian blur of the residual at each B-spline level, in units of the
    # level's control spacing; 0 matches full resolution throughout
    level_blur: float = Field(default=0.25, ge=0.0)
    pixel_iters: int = Field(default=100, ge=1)
    pixel_step: float = Field(default=0.25, gt=0.0)
    # None selects the scale-relative default 0.1·‖y‖²/(HW)
    lam: float | None = Field(default=None, ge=0.0)
    tolerance: float = Field(default=1e-6, ge=0.0)
    # share of each state's samples held out to confirm a field; 0 disables
    holdout_fraction: float = Field(default=0.5, ge=0.0, lt=1.0)
    acceptance_margin: float = Field(default=0.01, ge=0.0, lt=1.0)
    seed: int = 0

class ReconConfig(_Config):
    schedule: ScheduleConfig = ScheduleConfig()
    guidance: GuidanceConfig = GuidanceConfig()
    registration: RegistrationConfig = RegistrationConfig()
    n_motion_updates: int = Field(default=10, ge=0)
    first_update_fraction: float = Field(default=0.9, gt=0.0, le=1.0)
    motion_updates: tuple[int, ...] | None = None
    # "mean" starts the reverse process from x_T = 0 instead of a noise draw
    estimate: Literal["sample", "mean"] = "sample"
    seed: int = 0

    @field_validator("motion_updates", mode="before")
    @classmethod
    def split_motion_updates(cls, v):
        if isinstance(v, str):
            return tuple(int(item) for item in v.replace(",", " ").split())
        return v

    @model_validator(mode="after")
    def check_motion_updates(self) -> ReconConfig:
        if self.motion_updates is None:
            return self
        steps = self.schedule.steps
        if any(t < 1 or t > steps for t in self.motion_updates):
            raise ValueError(f"motion_updates must lie in [1, {steps}]")
        return self

    def update_timesteps(self) -> list[int]:
        """
        The motion-update set, strictly decreasing.

        Explicit ``motion_updates`` win; otherwise ``n_motion_updates`` values
        are spread evenly from ``first_update_fraction·T`` down to 1.
        """
        if self.motion_updates is not None:
            return sorted(set(self.motion_updates), reverse=True)
        if self.n_motion_updates == 0:
            return []
        steps = self.schedule.steps
        first = max(1, round(self.first_update_fraction * steps))
        if self.n_motion_updates == 1:
            return [first]
        spread = [round(first - i * (first - 1) / (self.n_motion_updates - 1))
                  for i in range(self.n_motion_updates)]
        return sorted(set(spread), reverse=True)

class SimulationConfig(_Config):
    n_states: int = Field(default=8, ge=1)
    n_coils: int = Field(default=4, ge=1)
    acceleration: float = Field(default=8.0, ge=1.0)
    density_decay: float = Field(default=2.0, ge=0.0)
    density_radius: float = Field(default=8.0, gt=0.0)
    acs_mode: Literal["disjoint", "shared"] = "disjoint"
    acs_width: int = Field(default=8, ge=0)
    motion: Literal["nonrigid", "rigid", "static"] = "nonrigid"
    max_displacement: float = Field(default=15.0, ge=0.0)
    damping: float = Field(default=0.3, ge=0.0)
    rigid_degrees: float = Field(default=5.0, ge=0.0)
    rigid_pixels: float = Field(default=5.0, ge=0.0)
    noise_std: float = Field(default=0.0, ge=0.0)
    seed: int = 0

__all__ = [
    "ScheduleConfig",
    "GuidanceConfig",
    "RegistrationConfig",
    "ReconConfig",
    "SimulationConfig",
]
