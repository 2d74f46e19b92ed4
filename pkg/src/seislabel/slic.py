"""Superpixel segmentation: local k-means over [l, gx, gy, x, y] pixel
features with deterministic grid seeding and connectivity enforcement."""

from dataclasses import dataclass

import numpy as np
from skimage.measure import label as _connected_components


@dataclass
class SuperpixelMap:
    """Partition of a grid into connected superpixels.

    assignment holds one id per pixel (0..count-1), centroids the
    integer-rounded mean (row, col) per id.
    """

    assignment: np.ndarray
    count: int
    centroids: np.ndarray


def pixel_features(grid):
    """Stack of intensity and central-difference gradients, (rows, cols, 3).

    Border gradients use one-sided differences.
    """
    g = np.asarray(grid, dtype=np.float64)
    gy, gx = np.gradient(g)
    return np.stack([g, gx, gy], axis=-1)


def _initial_seeds(grid, region_size, grad_mag):
    """Regular grid seeds, each nudged to the lowest-gradient pixel in its
    3x3 neighborhood."""
    rows, cols = grid.shape
    half = region_size // 2
    seeds = []
    for r in range(half, rows, region_size):
        for c in range(half, cols, region_size):
            r0, r1 = max(0, r - 1), min(rows, r + 2)
            c0, c1 = max(0, c - 1), min(cols, c + 2)
            window = grad_mag[r0:r1, c0:c1]
            k = int(np.argmin(window))
            seeds.append((r0 + k // window.shape[1], c0 + k % window.shape[1]))
    return seeds


def slic_segment(grid, region_size=25, compactness=0.5, iterations=10):
    """Segment a normalized grid into superpixels.

    Pixels are clustered by sqrt(d_feat^2 + (m/S)^2 * d_xy^2) where d_feat is
    the Euclidean distance over (intensity, gx, gy) and d_xy the spatial
    distance; each cluster only searches a 2S x 2S window around its center.
    The result is a partition whose superpixels are 4-connected and
    non-empty. Deterministic: seeding is a regular grid, no randomness.
    """
    g = np.asarray(grid, dtype=np.float64)
    rows, cols = g.shape
    s = int(region_size)
    if s < 4:
        raise ValueError(f"region_size must be >= 4, got {region_size}")
    if s > rows or s > cols:
        raise ValueError(f"region_size {s} larger than grid {rows}x{cols}")

    feats = pixel_features(g)
    grad_mag = feats[:, :, 1] ** 2 + feats[:, :, 2] ** 2
    seeds = _initial_seeds(g, s, grad_mag)

    # cluster state: feature triple plus spatial center
    centers_f = np.array([feats[r, c] for r, c in seeds], dtype=np.float64)
    centers_xy = np.array(seeds, dtype=np.float64)
    n_clusters = len(seeds)
    spatial_w = (compactness / s) ** 2

    rr = np.arange(rows, dtype=np.float64)
    cc = np.arange(cols, dtype=np.float64)
    assignment = np.full((rows, cols), -1, dtype=np.int32)

    for _ in range(iterations):
        dist = np.full((rows, cols), np.inf)
        labels = np.full((rows, cols), -1, dtype=np.int32)
        for k in range(n_clusters):
            cr, ck = centers_xy[k]
            r0, r1 = max(0, int(cr) - s), min(rows, int(cr) + s + 1)
            c0, c1 = max(0, int(ck) - s), min(cols, int(ck) + s + 1)
            df = feats[r0:r1, c0:c1] - centers_f[k]
            d2 = (df * df).sum(axis=-1)
            d2 = d2 + spatial_w * (
                (rr[r0:r1, None] - cr) ** 2 + (cc[None, c0:c1] - ck) ** 2
            )
            window_dist = dist[r0:r1, c0:c1]
            closer = d2 < window_dist
            window_dist[closer] = d2[closer]
            labels[r0:r1, c0:c1][closer] = k

        # any pixel outside every search window falls back to the spatially
        # nearest center
        missed = labels < 0
        if missed.any():
            mr, mc = np.nonzero(missed)
            d = (mr[:, None] - centers_xy[None, :, 0]) ** 2 + (
                mc[:, None] - centers_xy[None, :, 1]
            ) ** 2
            labels[mr, mc] = np.argmin(d, axis=1).astype(np.int32)

        if np.array_equal(labels, assignment):
            break
        assignment = labels

        # recompute cluster means; empty clusters keep their previous center
        flat = assignment.ravel()
        counts = np.bincount(flat, minlength=n_clusters).astype(np.float64)
        occupied = counts > 0
        for i in range(3):
            sums = np.bincount(flat, weights=feats[:, :, i].ravel(), minlength=n_clusters)
            centers_f[occupied, i] = sums[occupied] / counts[occupied]
        row_sums = np.bincount(
            flat, weights=np.broadcast_to(rr[:, None], (rows, cols)).ravel(),
            minlength=n_clusters,
        )
        col_sums = np.bincount(
            flat, weights=np.broadcast_to(cc[None, :], (rows, cols)).ravel(),
            minlength=n_clusters,
        )
        centers_xy[occupied, 0] = row_sums[occupied] / counts[occupied]
        centers_xy[occupied, 1] = col_sums[occupied] / counts[occupied]

    assignment = _enforce_connectivity(assignment)

    # compact ids to 0..count-1 (drops clusters that ended up empty)
    _, assignment = np.unique(assignment, return_inverse=True)
    assignment = assignment.reshape(rows, cols).astype(np.int32)
    count = int(assignment.max()) + 1
    return SuperpixelMap(
        assignment=assignment,
        count=count,
        centroids=superpixel_centroids(assignment, count),
    )


def _enforce_connectivity(assignment):
    """Merge disconnected fragments of each id into an adjacent superpixel.

    For every id, its largest 4-connected component keeps the id; every
    other fragment is relabeled to the 4-adjacent id it shares the longest
    border with. Repeats until each id is a single component.
    """
    assignment = assignment.copy()
    while True:
        comp = _connected_components(assignment, background=-1, connectivity=1)
        n_comp = int(comp.max())
        sizes = np.bincount(comp.ravel())
        _, first_idx = np.unique(comp.ravel(), return_index=True)
        comp_owner = assignment.ravel()[first_idx]  # comp c owner at index c-1

        orphans = []
        by_owner = {}
        for c in range(1, n_comp + 1):
            by_owner.setdefault(int(comp_owner[c - 1]), []).append(c)
        for owner, comps in by_owner.items():
            if len(comps) == 1:
                continue
            # biggest fragment keeps the id; ties break on component index
            keep = max(comps, key=lambda c: (sizes[c], -c))
            orphans.extend(c for c in comps if c != keep)
        if not orphans:
            return assignment

        changed = False
        for c in orphans:
            mask = comp == c
            border = np.zeros_like(mask)
            border[:-1, :] |= mask[1:, :]
            border[1:, :] |= mask[:-1, :]
            border[:, :-1] |= mask[:, 1:]
            border[:, 1:] |= mask[:, :-1]
            border &= ~mask
            # a 4-adjacent pixel with the fragment's own id would be part of
            # the same component, so every border id is a different superpixel
            neighbor_ids = assignment[border]
            if neighbor_ids.size == 0:
                continue
            counts = np.bincount(neighbor_ids)
            assignment[mask] = int(np.argmax(counts))
            changed = True
        if not changed:
            return assignment


def superpixel_centroids(assignment, count=None):
    """Integer-rounded mean (row, col) per superpixel id.

    Accepts either a SuperpixelMap or a raw assignment array.
    """
    if isinstance(assignment, SuperpixelMap):
        count = assignment.count
        assignment = assignment.assignment
    a = np.asarray(assignment)
    if count is None:
        count = int(a.max()) + 1
    rows, cols = a.shape
    flat = a.ravel()
    n = np.bincount(flat, minlength=count).astype(np.float64)
    if (n == 0).any():
        raise ValueError("every superpixel id must be non-empty")
    rr = np.broadcast_to(np.arange(rows)[:, None], (rows, cols)).ravel()
    cc = np.broadcast_to(np.arange(cols)[None, :], (rows, cols)).ravel()
    mean_r = np.bincount(flat, weights=rr, minlength=count) / n
    mean_c = np.bincount(flat, weights=cc, minlength=count) / n
    return np.stack([np.rint(mean_r), np.rint(mean_c)], axis=1).astype(np.int64)
