import dataclasses
from collections.abc import Callable
import numpy as np
from ..logger import logger

type Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]

ARMIJO = 1e-4
MAX_BACKTRACKS = 12
STEP_GROWTH = 1.25
RMS_DECAY = 0.9

@dataclasses.dataclass
class DescentResult:
    params: np.ndarray
    losses: list[float]
    converged: bool

def descend(objective: Objective,
            start: np.ndarray,
            iters: int,
            step: float,
            tolerance: float,
            adaptive: bool) -> DescentResult:
    """
    First-order descent with a backtracking (Armijo) line search; the loss
    sequence is non-increasing.

    ``step`` is the largest coordinate move of the first trial, in the units
    of ``start``. With ``adaptive`` the direction is rescaled per coordinate
    by a running RMS of past gradients; otherwise it is the plain gradient.
    Stops after ``iters`` accepted steps, when the relative decrease drops
    below ``tolerance``, or when no trial step decreases the loss.
    """
    params = np.array(start, dtype=np.float64, copy=True)
    loss, grad = objective(params)
    losses = [loss]
    mean_square = np.zeros_like(params)
    rate = step

    for it in range(iters):
        if not np.any(grad):
            return DescentResult(params, losses, converged=True)

        if adaptive:
            mean_square = RMS_DECAY * mean_square + (1 - RMS_DECAY) * grad ** 2
            rms = np.sqrt(mean_square / (1 - RMS_DECAY ** (it + 1)))
            direction = -grad / (rms + 1e-8 * rms.max() + 1e-300)
        else:
            direction = -grad
        direction = direction / np.abs(direction).max()
        slope = float(np.sum(grad * direction))

        for _ in range(MAX_BACKTRACKS):
            candidate = params + rate * direction
            cand_loss, cand_grad = objective(candidate)
            if cand_loss <= loss + ARMIJO * rate * slope:
                break
            rate *= 0.5
        else:
            logger.debug(f"Line search stalled at iteration {it}, loss {loss:.6g}")
            return DescentResult(params, losses, converged=True)

        decrease = (loss - cand_loss) / max(abs(loss), 1e-300)
        params, loss, grad = candidate, cand_loss, cand_grad
        losses.append(loss)
        rate = min(rate * STEP_GROWTH, 4 * step)
        logger.debug(f"Descent iteration {it}: loss {loss:.6g}, step {rate:.3g}")
        if decrease < tolerance:
            return DescentResult(params, losses, converged=True)

    return DescentResult(params, losses, converged=False)

__all__ = [
    "Objective",
    "DescentResult",
    "descend",
]
