"""Local binary patterns and the completed/multiscale/extended/derivative
variants, all mapped through the rotation-invariant uniform (riu2) coding.

Every feature here is a normalized histogram computed over the interior
pixels of a patch (pixels whose full sampling ring fits inside it). Neighbor
rings of P samples at radius R are read by bilinear interpolation, starting
at angle 0 and proceeding counterclockwise.
"""

import numpy as np

from .grids import histogram

# (P, R) scales used by the multiscale variant
MULTISCALE = ((8, 1.0), (16, 2.0), (24, 3.0))

DEFAULT_P = 16
DEFAULT_R = 2.0

# sign comparisons treat differences within this guard as ties (>= 0), so
# floating-point drift on constant regions cannot flip a bit; amplitudes are
# O(1) by the normalization contract, far above this level
TIE_EPS = 1e-12


def _popcount(x):
    """Bit population count for uint32 arrays (SWAR)."""
    x = x.astype(np.uint32, copy=True)
    x = x - ((x >> np.uint32(1)) & np.uint32(0x55555555))
    x = (x & np.uint32(0x33333333)) + ((x >> np.uint32(2)) & np.uint32(0x33333333))
    x = (x + (x >> np.uint32(4))) & np.uint32(0x0F0F0F0F)
    return ((x * np.uint32(0x01010101)) >> np.uint32(24)).astype(np.int64)


def _sign_bits(diffs):
    """s(x) bit per difference: 1 for x >= 0, with a tie guard for rounding."""
    return diffs >= -TIE_EPS


def lbp_code(samples, center):
    """Pack the signs of (sample - center) into a P-bit code, LSB first.

    The sign function counts zero differences as 1, so a ring equal to its
    center produces the all-ones code 2**P - 1.
    """
    s = np.asarray(samples, dtype=np.float64)
    bits = _sign_bits(s - center).astype(np.uint64)
    weights = np.uint64(1) << np.arange(s.shape[-1], dtype=np.uint64)
    return int((bits * weights).sum())


def riu2(codes, p):
    """Map P-bit codes to rotation-invariant uniform labels.

    Codes with at most two circular 0/1 transitions map to their popcount
    (0..P); all other codes map to the catch-all label P + 1.
    """
    scalar = np.isscalar(codes)
    c = np.asarray(codes, dtype=np.uint32)
    mask = np.uint32((1 << p) - 1)
    rotated = ((c << np.uint32(1)) | (c >> np.uint32(p - 1))) & mask
    transitions = _popcount(c ^ rotated)
    labels = np.where(transitions <= 2, _popcount(c), p + 1)
    return int(labels) if scalar else labels


def _ring_offsets(p, r):
    """(row, col) offsets of the P ring samples at radius R."""
    angles = 2.0 * np.pi * np.arange(p) / p
    return r * np.sin(angles), r * np.cos(angles)


def _check_patch(patch, r):
    size = min(patch.shape)
    if size <= 2 * r + 1:
        raise ValueError(f"patch side {size} too small for radius {r}")


def _sample_ring(patch, p, r, margin):
    """Bilinear ring samples for all interior pixels, shaped (P, h, w).

    Interpolation uses the lerp form a + f*(b - a), which returns the exact
    value when the four neighbors are equal (constant regions stay constant).
    """
    rows, cols = patch.shape
    h, w = rows - 2 * margin, cols - 2 * margin
    dys, dxs = _ring_offsets(p, r)
    out = np.empty((p, h, w), dtype=np.float64)
    for k in range(p):
        y0, x0 = int(np.floor(dys[k])), int(np.floor(dxs[k]))
        fy, fx = dys[k] - y0, dxs[k] - x0
        r0, c0 = margin + y0, margin + x0

        top = patch[r0:r0 + h, c0:c0 + w]
        if fx > 0.0:
            top = top + fx * (patch[r0:r0 + h, c0 + 1:c0 + 1 + w] - top)
        if fy > 0.0:
            bottom = patch[r0 + 1:r0 + 1 + h, c0:c0 + w]
            if fx > 0.0:
                bottom = bottom + fx * (
                    patch[r0 + 1:r0 + 1 + h, c0 + 1:c0 + 1 + w] - bottom
                )
            top = top + fy * (bottom - top)
        out[k] = top
    return out


def _pack_codes(bits):
    """Pack a (P, h, w) boolean stack into uint32 codes, sample 0 as LSB."""
    p = bits.shape[0]
    weights = (np.uint32(1) << np.arange(p, dtype=np.uint32))[:, None, None]
    return (bits.astype(np.uint32) * weights).sum(axis=0, dtype=np.uint32)


def lbp_feature(patch, p=DEFAULT_P, r=DEFAULT_R):
    """riu2 LBP histogram over the patch interior (P + 2 bins)."""
    patch = np.asarray(patch, dtype=np.float64)
    _check_patch(patch, r)
    margin = int(np.ceil(r))
    samples = _sample_ring(patch, p, r, margin)
    center = patch[margin:-margin, margin:-margin]
    labels = riu2(_pack_codes(_sign_bits(samples - center)), p)
    return histogram(labels, p + 2)


def _clbp_labels(patch, p, r):
    """Sign, magnitude and center component labels for the completed variant."""
    margin = int(np.ceil(r))
    samples = _sample_ring(patch, p, r, margin)
    center = patch[margin:-margin, margin:-margin]
    diffs = samples - center
    s_labels = riu2(_pack_codes(_sign_bits(diffs)), p)
    mags = np.abs(diffs)
    m_labels = riu2(_pack_codes(_sign_bits(mags - mags.mean())), p)
    c_bits = _sign_bits(center - patch.mean()).astype(np.int64)
    return s_labels, m_labels, c_bits


def _joint_histogram(a_labels, b_labels, bits, n_ab):
    """Normalized joint histogram over (n_ab x n_ab x 2) combined labels."""
    joint = (a_labels.astype(np.int64) * n_ab + b_labels) * 2 + bits
    return histogram(joint, n_ab * n_ab * 2)


def clbp_feature(patch, p=DEFAULT_P, r=DEFAULT_R):
    """Joint sign/magnitude/center histogram, (P+2) x (P+2) x 2 bins.

    The magnitude threshold is the mean absolute neighbor-center difference
    over the patch; the center bit compares against the patch mean, with
    ties counting as 1.
    """
    patch = np.asarray(patch, dtype=np.float64)
    _check_patch(patch, r)
    s_labels, m_labels, c_bits = _clbp_labels(patch, p, r)
    return _joint_histogram(s_labels, m_labels, c_bits, p + 2)


def mclbp_feature(patch, scales=MULTISCALE):
    """Concatenation of completed-LBP joint histograms across scales.

    Each scale's histogram sums to 1 before a global renormalization, so the
    default three scales contribute 1/3 each and the 2200-bin total sums to 1.
    """
    patch = np.asarray(patch, dtype=np.float64)
    _check_patch(patch, max(r for _, r in scales))
    parts = [clbp_feature(patch, p, r) for p, r in scales]
    return np.concatenate(parts) / len(parts)


def elbp_feature(patch, p=DEFAULT_P, r=DEFAULT_R):
    """Joint neighbor-intensity / radial-difference / center histogram.

    NI compares each ring sample against the ring mean at its pixel, RD
    compares the ring at radius R against the ring at R - 1, and CI is the
    center-versus-patch-mean bit; 648 bins for P = 16.
    """
    patch = np.asarray(patch, dtype=np.float64)
    if r < 2:
        raise ValueError("extended variant needs r >= 2 so an inner ring exists")
    _check_patch(patch, r)
    margin = int(np.ceil(r))
    outer = _sample_ring(patch, p, r, margin)
    inner = _sample_ring(patch, p, r - 1.0, margin)
    center = patch[margin:-margin, margin:-margin]
    ni_labels = riu2(_pack_codes(_sign_bits(outer - outer.mean(axis=0))), p)
    rd_labels = riu2(_pack_codes(_sign_bits(outer - inner)), p)
    ci_bits = _sign_bits(center - patch.mean()).astype(np.int64)
    return _joint_histogram(ni_labels, rd_labels, ci_bits, p + 2)


def cldp_feature(patch, p=DEFAULT_P, r=DEFAULT_R):
    """Completed-LBP joint histogram extended with a radial sign-difference
    component: the sign of (g_R - g_c) - (g_{R-1} - g_c) * R / (R - 1), the
    second radial derivative of the centered differences. 648 + 18 = 666
    bins for P = 16; the two parts are weighted equally.
    """
    patch = np.asarray(patch, dtype=np.float64)
    if r < 2:
        raise ValueError("derivative variant needs r >= 2 so an inner ring exists")
    _check_patch(patch, r)
    s_labels, m_labels, c_bits = _clbp_labels(patch, p, r)
    joint = _joint_histogram(s_labels, m_labels, c_bits, p + 2)

    margin = int(np.ceil(r))
    outer = _sample_ring(patch, p, r, margin)
    inner = _sample_ring(patch, p, r - 1.0, margin)
    center = patch[margin:-margin, margin:-margin]
    second = (outer - center) - (inner - center) * (r / (r - 1.0))
    d_hist = histogram(riu2(_pack_codes(_sign_bits(second)), p), p + 2)
    return np.concatenate([joint, d_hist]) / 2.0
