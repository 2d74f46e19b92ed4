"""Local radius index (amplitude variant): signed run lengths to the next
edge along eight fixed directions."""

from dataclasses import dataclass

import numpy as np

# (row, col) unit steps: E, NE, N, NW, W, SW, S, SE
DIRECTIONS = (
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
)


@dataclass(frozen=True)
class LriConfig:
    """Edge threshold factor (on the patch std) and maximum run length."""

    t_factor: float = 0.5
    k_max: int = 3

    def __post_init__(self):
        if self.t_factor <= 0:
            raise ValueError("t_factor must be positive")
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")


def _direction_codes(padded, rows, cols, step, threshold, k_max):
    """Signed run-length codes for every pixel along one direction.

    A pixel whose first neighbor differs by at most the threshold codes as 0;
    otherwise the code is the signed count of consecutive neighbors staying
    beyond the threshold on the first neighbor's side, capped at k_max.
    """
    dr, dc = step
    x = padded[k_max:k_max + rows, k_max:k_max + cols]
    lo, hi = x - threshold, x + threshold

    above_run = np.ones((rows, cols), dtype=bool)
    below_run = np.ones((rows, cols), dtype=bool)
    above_len = np.zeros((rows, cols), dtype=np.int32)
    below_len = np.zeros((rows, cols), dtype=np.int32)
    first = None
    for j in range(1, k_max + 1):
        r0, c0 = k_max + dr * j, k_max + dc * j
        neighbor = padded[r0:r0 + rows, c0:c0 + cols]
        if first is None:
            first = neighbor
        above_run &= neighbor > hi
        below_run &= neighbor < lo
        above_len += above_run
        below_len += below_run

    codes = np.where(first > hi, above_len, 0) - np.where(first < lo, below_len, 0)
    return codes.astype(np.int32)


def lri_a_code(patch, pixel, direction, threshold, k_max):
    """Run-length code for a single pixel and direction (edge-replicated)."""
    patch = np.asarray(patch, dtype=np.float64)
    rows, cols = patch.shape
    padded = np.pad(patch, k_max, mode="edge")
    codes = _direction_codes(padded, rows, cols, direction, threshold, k_max)
    return int(codes[pixel])


def lri_feature(patch, cfg=LriConfig()):
    """Concatenated signed run-length histograms over the eight directions.

    The edge threshold is t_factor times the patch standard deviation. Each
    direction contributes 2*k_max + 1 bins (56 total with the defaults) and
    the concatenation is normalized to sum to 1.
    """
    patch = np.asarray(patch, dtype=np.float64)
    if min(patch.shape) <= 2 * cfg.k_max + 1:
        raise ValueError(
            f"patch side {min(patch.shape)} too small for k_max {cfg.k_max}"
        )
    threshold = cfg.t_factor * patch.std()
    rows, cols = patch.shape
    padded = np.pad(patch, cfg.k_max, mode="edge")
    bins = 2 * cfg.k_max + 1
    counts = np.empty(len(DIRECTIONS) * bins, dtype=np.int64)
    for d, step in enumerate(DIRECTIONS):
        codes = _direction_codes(padded, rows, cols, step, threshold, cfg.k_max)
        counts[d * bins:(d + 1) * bins] = np.bincount(
            (codes + cfg.k_max).ravel(), minlength=bins
        )
    return counts / float(counts.sum())
