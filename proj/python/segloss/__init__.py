"""Segmentation losses, gradients and metrics.

Buffers are flat row-major sequences of floats with an explicit (h, w).
Every call copies its inputs.
"""

from ._segloss import Error, boundary_distance, gradient, loss, loss_names, metrics, version

__all__ = ["Error", "boundary_distance", "gradient", "loss", "loss_names", "metrics", "version"]
