"""Section grids, patches, and the shared histogram/windowing primitives.

A section is a plain 2D float ndarray (rows x cols, row-major). All
descriptor code assumes sections have been passed through
``normalize_section`` so amplitudes live in [0, 1].
"""

import numpy as np

SGRID_MAGIC = "SGRID"
SGRID_VERSION = 1

# z-scores are clipped to +/- this many standard deviations before the
# affine map onto [0, 1]
CLIP_SIGMAS = 3.0


def normalize_section(grid):
    """Remove mean/contrast variation: z-score, clip to +/-3 sigma, map to [0, 1].

    A constant grid (zero variance) maps to all 0.5.
    """
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim != 2 or g.shape[0] < 1 or g.shape[1] < 1:
        raise ValueError("section must be a non-empty 2D grid")
    std = g.std()
    # variance at the rounding-noise level counts as constant
    if std <= 1e-12 * max(1.0, float(np.abs(g).max())):
        return np.full_like(g, 0.5)
    z = np.clip((g - g.mean()) / std, -CLIP_SIGMAS, CLIP_SIGMAS)
    return (z + CLIP_SIGMAS) / (2.0 * CLIP_SIGMAS)


def quantize(patch, levels):
    """Map [0, 1] values to integer codes 0..levels-1 (floor rule, top clamped)."""
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    v = np.clip(np.asarray(patch, dtype=np.float64), 0.0, 1.0)
    return np.minimum(np.floor(v * levels), levels - 1).astype(np.int32)


def extract_patch(grid, center, size):
    """Extract an odd-sized square patch centered at (row, col).

    Samples outside the grid are filled by edge replication; the center must
    lie inside the grid.
    """
    g = np.asarray(grid)
    if size < 1 or size % 2 == 0:
        raise ValueError(f"patch size must be odd and positive, got {size}")
    r, c = center
    rows, cols = g.shape
    if not (0 <= r < rows and 0 <= c < cols):
        raise ValueError(f"center {center} outside grid {rows}x{cols}")
    half = size // 2
    rr = np.clip(np.arange(r - half, r + half + 1), 0, rows - 1)
    cc = np.clip(np.arange(c - half, c + half + 1), 0, cols - 1)
    return g[np.ix_(rr, cc)]


def gaussian_window(patch, sigma):
    """Multiply a patch elementwise by a centered 2D Gaussian kernel.

    The kernel peaks at 1 on the patch center, so the center pixel is
    unchanged and the periphery is attenuated.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    p = np.asarray(patch, dtype=np.float64)
    rows, cols = p.shape
    y = np.arange(rows) - (rows - 1) / 2.0
    x = np.arange(cols) - (cols - 1) / 2.0
    kernel = np.exp(-(y[:, None] ** 2 + x[None, :] ** 2) / (2.0 * sigma * sigma))
    return p * kernel


def histogram(codes, bin_count):
    """Normalized histogram of integer codes over bins 0..bin_count-1.

    Bins sum to 1; empty input yields the all-zero histogram.
    """
    c = np.asarray(codes).ravel()
    if c.size == 0:
        return np.zeros(bin_count, dtype=np.float64)
    c = c.astype(np.int64, copy=False)
    if c.min() < 0 or c.max() >= bin_count:
        raise ValueError(f"codes out of range [0, {bin_count})")
    counts = np.bincount(c, minlength=bin_count)
    return counts / float(c.size)


def write_sgrid(path, grid):
    """Write a grid in SGRID v1 format (ASCII header + float32 LE payload)."""
    arr = np.ascontiguousarray(np.asarray(grid), dtype="<f4")
    if arr.ndim != 2:
        raise ValueError("SGRID payload must be 2D")
    rows, cols = arr.shape
    with open(path, "wb") as fh:
        fh.write(f"{SGRID_MAGIC} {SGRID_VERSION} {rows} {cols}\n".encode("ascii"))
        fh.write(arr.tobytes(order="C"))


def read_sgrid(path):
    """Read an SGRID v1 file back into a float32 array (bit-exact round trip)."""
    with open(path, "rb") as fh:
        header = bytearray()
        while True:
            ch = fh.read(1)
            if not ch:
                raise ValueError(f"{path}: truncated SGRID header")
            if ch == b"\n":
                break
            header.extend(ch)
            if len(header) > 128:
                raise ValueError(f"{path}: not an SGRID file")
        parts = header.decode("ascii", errors="replace").split()
        if len(parts) != 4 or parts[0] != SGRID_MAGIC:
            raise ValueError(f"{path}: not an SGRID file")
        if int(parts[1]) != SGRID_VERSION:
            raise ValueError(f"{path}: unsupported SGRID version {parts[1]}")
        rows, cols = int(parts[2]), int(parts[3])
        if rows < 1 or cols < 1:
            raise ValueError(f"{path}: invalid SGRID dimensions {rows}x{cols}")
        payload = fh.read(4 * rows * cols)
        if len(payload) != 4 * rows * cols:
            raise ValueError(f"{path}: truncated SGRID payload")
        return np.frombuffer(payload, dtype="<f4").reshape(rows, cols).copy()
