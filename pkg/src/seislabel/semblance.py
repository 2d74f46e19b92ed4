"""Semblance coherence attribute over sliding windows of a section."""

import numpy as np
from scipy.ndimage import uniform_filter1d

from .grids import histogram, quantize

SEMBLANCE_BINS = 32


def semblance_map(grid, half_window=(1, 1)):
    """Per-pixel semblance coefficient over a (2*hr+1) x (2*hc+1) window.

    Columns act as traces and rows as time samples: the stacked-trace energy
    sum_t (sum_j a[t, j])^2 is divided by J * sum_t sum_j a[t, j]^2. Values
    lie in [0, 1] (Cauchy-Schwarz); an all-zero window is defined as 1.
    Window borders are handled by edge replication.
    """
    g = np.asarray(grid, dtype=np.float64)
    hr, hc = half_window
    if hr < 0 or hc < 0:
        raise ValueError("half_window must be nonnegative")
    wr, wc = 2 * hr + 1, 2 * hc + 1
    n_traces = wc

    # horizontal box sums give per-row trace stacks, vertical box sums then
    # accumulate over the window's time samples
    row_stack = uniform_filter1d(g, size=wc, axis=1, mode="nearest") * wc
    num = uniform_filter1d(row_stack * row_stack, size=wr, axis=0, mode="nearest") * wr
    sq = uniform_filter1d(g * g, size=wc, axis=1, mode="nearest") * wc
    den = n_traces * uniform_filter1d(sq, size=wr, axis=0, mode="nearest") * wr

    s = np.where(den > 0, num / np.where(den > 0, den, 1.0), 1.0)
    return np.clip(s, 0.0, 1.0)


def semblance_feature(patch, bins=SEMBLANCE_BINS):
    """Normalized histogram of semblance values over [0, 1]."""
    return histogram(quantize(patch, bins), bins)
