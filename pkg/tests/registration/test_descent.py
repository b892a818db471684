import numpy as np

from c2f_motion.registration.descent import descend

CURVATURE = np.array([1.0, 10.0])
MINIMUM = np.array([3.0, -2.0])


def quadratic(p):
    diff = p - MINIMUM
    return float(np.sum(CURVATURE * diff ** 2)), 2 * CURVATURE * diff


class TestDescend:
    """Backtracking descent, plain and RMS-scaled"""

    def test_plain_descent_converges(self):
        result = descend(quadratic, np.zeros(2), iters=500, step=1.0, tolerance=1e-12, adaptive=False)
        assert np.allclose(result.params, MINIMUM, atol=1e-4)

    def test_adaptive_losses_non_increasing(self):
        result = descend(quadratic, np.zeros(2), iters=500, step=1.0, tolerance=1e-12, adaptive=True)
        assert all(b <= a for a, b in zip(result.losses, result.losses[1:]))
        assert result.losses[-1] < 1e-4 * result.losses[0]

    def test_stationary_start(self):
        result = descend(quadratic, MINIMUM.copy(), iters=10, step=1.0, tolerance=0.0, adaptive=False)
        assert result.converged
        assert result.losses == [0.0]
        assert np.array_equal(result.params, MINIMUM)

    def test_iteration_cap_reported(self):
        result = descend(quadratic, np.zeros(2), iters=1, step=1.0, tolerance=0.0, adaptive=False)
        assert not result.converged
        assert len(result.losses) == 2

    def test_start_not_modified(self):
        start = np.zeros(2)
        descend(quadratic, start, iters=5, step=1.0, tolerance=0.0, adaptive=True)
        assert np.array_equal(start, np.zeros(2))
