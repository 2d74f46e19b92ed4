"""Gray-level co-occurrence matrices and the six derived texture attributes."""

from dataclasses import dataclass

import numpy as np

from .grids import quantize

# distance-1 offsets at 0, 45, 90 and 135 degrees, as (row, col) shifts
DEFAULT_OFFSETS = ((0, 1), (-1, 1), (-1, 0), (-1, -1))

ATTRIBUTE_NAMES = (
    "contrast",
    "entropy",
    "energy",
    "homogeneity",
    "correlation",
    "mutual_information",
)

GLCM_FEATURE_LENGTH = len(ATTRIBUTE_NAMES) * len(DEFAULT_OFFSETS)


@dataclass
class Glcm:
    """Directional co-occurrence counts and their probability mass function."""

    levels: int
    offset: tuple
    counts: np.ndarray
    pmf: np.ndarray


def glcm(codes, offset, levels):
    """Build the co-occurrence matrix of code pairs at a fixed (row, col) offset.

    counts[i, j] is the number of positions where code i has code j at the
    given offset; only pairs with both ends in bounds are counted.
    """
    dm, dn = offset
    if dm == 0 and dn == 0:
        raise ValueError("co-occurrence offset must be nonzero")
    c = np.asarray(codes)
    rows, cols = c.shape
    if abs(dm) >= rows or abs(dn) >= cols:
        raise ValueError(f"offset {offset} larger than patch {rows}x{cols}")
    r0, r1 = max(0, -dm), rows - max(0, dm)
    c0, c1 = max(0, -dn), cols - max(0, dn)
    src = c[r0:r1, c0:c1].astype(np.int64)
    dst = c[r0 + dm:r1 + dm, c0 + dn:c1 + dn].astype(np.int64)
    counts = np.bincount(
        (src * levels + dst).ravel(), minlength=levels * levels
    ).reshape(levels, levels)
    total = counts.sum()
    pmf = counts / total if total > 0 else np.zeros_like(counts, dtype=np.float64)
    return Glcm(levels=levels, offset=(dm, dn), counts=counts, pmf=pmf)


def glcm_attributes(g):
    """Evaluate contrast, entropy, energy, homogeneity, correlation and
    mutual information on one GLCM's pmf.

    Entropy and mutual information use the natural log with 0*log(0) = 0;
    correlation of a pmf with a degenerate marginal is defined as 0.
    """
    pmf = g.pmf
    k = g.levels
    idx = np.arange(k, dtype=np.float64)
    d2 = (idx[:, None] - idx[None, :]) ** 2

    contrast = float(np.sum(d2 * pmf))
    nz = pmf > 0
    entropy = float(-np.sum(pmf[nz] * np.log(pmf[nz])))
    energy = float(np.sqrt(np.sum(pmf * pmf)))
    homogeneity = float(np.sum(pmf / (1.0 + d2)))

    p_i = pmf.sum(axis=1)
    p_j = pmf.sum(axis=0)
    mu_i = float(np.dot(idx, p_i))
    mu_j = float(np.dot(idx, p_j))
    sigma_i = float(np.sqrt(np.dot((idx - mu_i) ** 2, p_i)))
    sigma_j = float(np.sqrt(np.dot((idx - mu_j) ** 2, p_j)))
    if sigma_i == 0.0 or sigma_j == 0.0:
        correlation = 0.0
    else:
        correlation = float(
            np.sum((idx[:, None] - mu_i) * (idx[None, :] - mu_j) * pmf)
            / (sigma_i * sigma_j)
        )

    outer = p_i[:, None] * p_j[None, :]
    mi = float(np.sum(pmf[nz] * np.log(pmf[nz] / outer[nz])))

    return np.array(
        [contrast, entropy, energy, homogeneity, correlation, mi], dtype=np.float64
    )


def glcm_feature(patch, levels=64, offsets=DEFAULT_OFFSETS):
    """Concatenated six-attribute vectors over the configured offsets.

    The patch is quantized to ``levels`` gray codes and one attribute block
    is produced per offset (24 values for the default four directions).
    """
    codes = quantize(np.asarray(patch, dtype=np.float64), levels)
    blocks = [glcm_attributes(glcm(codes, off, levels)) for off in offsets]
    return np.concatenate(blocks)
