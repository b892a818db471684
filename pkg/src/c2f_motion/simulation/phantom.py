import numpy as np
from scipy.ndimage import gaussian_filter
from ..core.numerics import complex_normal, ifft2c
from ..diffusion.denoiser import PowerSpectrum
from ..types import ComplexImage

# intensity, semi-axis (col), semi-axis (row), centre (col), centre (row), angle in degrees
_MODIFIED_SHEPP_LOGAN = (
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
)

def _unit_grid(shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    # y points up, both axes span [-1, 1]
    y = np.linspace(1.0, -1.0, shape[0])
    x = np.linspace(-1.0, 1.0, shape[1])
    return np.meshgrid(x, y, indexing="xy")

def _ellipse(x: np.ndarray, y: np.ndarray,
             a: float, b: float, x0: float, y0: float, angle: float) -> np.ndarray:
    phi = np.deg2rad(angle)
    xr = (x - x0) * np.cos(phi) + (y - y0) * np.sin(phi)
    yr = -(x - x0) * np.sin(phi) + (y - y0) * np.cos(phi)
    return (xr / a) ** 2 + (yr / b) ** 2 <= 1.0

def shepp_logan(shape: tuple[int, int]) -> ComplexImage:
    """Modified Shepp–Logan head phantom, real-valued, peak intensity 1."""
    x, y = _unit_grid(shape)
    image = np.zeros(shape)
    for intensity, a, b, x0, y0, angle in _MODIFIED_SHEPP_LOGAN:
        image[_ellipse(x, y, a, b, x0, y0, angle)] += intensity
    return image.astype(np.complex128)

def piecewise_smooth_phantom(shape: tuple[int, int],
                             rng: np.random.Generator,
                             n_regions: int = 6,
                             edge_sigma: float = 1.0) -> ComplexImage:
    """
    A body ellipse holding ``n_regions`` random inner ellipses. Every region
    carries its own linear intensity ramp; edges are Gaussian-smoothed by
    ``edge_sigma`` pixels and the result is scaled to unit maximum.
    """
    x, y = _unit_grid(shape)

    def ramp() -> np.ndarray:
        gx, gy = rng.uniform(-0.25, 0.25, size=2)
        return gx * x + gy * y

    body = _ellipse(x, y,
                    a=rng.uniform(0.7, 0.85), b=rng.uniform(0.75, 0.9),
                    x0=0.0, y0=0.0, angle=rng.uniform(-15, 15))
    image = np.where(body, 0.5 + ramp(), 0.0)
    for _ in range(n_regions):
        a, b = rng.uniform(0.08, 0.3, size=2)
        x0, y0 = rng.uniform(-0.45, 0.45, size=2)
        region = body & _ellipse(x, y, a, b, x0, y0, rng.uniform(0, 180))
        image = np.where(region, rng.uniform(0.2, 1.0) + ramp(), image)

    image = gaussian_filter(np.clip(image, 0.0, None), sigma=edge_sigma)
    return (image / image.max()).astype(np.complex128)

def phantom_support(x: ComplexImage, threshold: float = 0.05) -> np.ndarray:
    """Pixels whose magnitude exceeds ``threshold`` of the peak."""
    magnitude = np.abs(x)
    return magnitude > threshold * magnitude.max()

def gaussian_prior_draw(spectrum: PowerSpectrum,
                        rng: np.random.Generator,
                        batch: int | None = None) -> ComplexImage:
    """Draw(s) from ``N(0, F⁻¹ diag(P) F)``; ``batch`` adds a leading axis."""
    shape = spectrum.shape if batch is None else (batch, *spectrum.shape)
    return ifft2c(np.sqrt(spectrum.power) * complex_normal(rng, shape))

__all__ = [
    "shepp_logan",
    "piecewise_smooth_phantom",
    "phantom_support",
    "gaussian_prior_draw",
]
