"""Labeling quality metrics and color-coded label map rendering."""

from dataclasses import dataclass

import numpy as np

# structure classes: Chaotic blue, Faults green, SaltDome red, Other grey
STRUCTURE_PALETTE = ((0, 0, 255), (0, 255, 0), (255, 0, 0), (128, 128, 128))
# facies classes: HST red, LST green, TST blue
FACIES_PALETTE = ((255, 0, 0), (0, 255, 0), (0, 0, 255))
# fallback colors for other class counts
EXTRA_COLORS = (
    (0, 0, 255), (0, 255, 0), (255, 0, 0), (128, 128, 128),
    (255, 255, 0), (255, 0, 255), (0, 255, 255), (255, 128, 0),
)


@dataclass
class ScoreReport:
    """Pixel accuracy, mean class accuracy, mean IU and frequency-weighted IU."""

    pa: float
    mca: float
    miu: float
    fwiu: float

    def as_dict(self):
        return {"pa": self.pa, "mca": self.mca, "miu": self.miu, "fwiu": self.fwiu}


def confusion_matrix(pred, truth, n_classes):
    """n[j][i] counts pixels of true class j predicted as class i."""
    p = np.asarray(pred)
    t = np.asarray(truth)
    if p.shape != t.shape:
        raise ValueError(f"shape mismatch: pred {p.shape} vs truth {t.shape}")
    p = p.astype(np.int64).ravel()
    t = t.astype(np.int64).ravel()
    for name, labels in (("pred", p), ("truth", t)):
        if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
            raise ValueError(f"{name} labels out of range [0, {n_classes})")
    return np.bincount(t * n_classes + p, minlength=n_classes * n_classes).reshape(
        n_classes, n_classes
    )


def metrics(cm):
    """Evaluate the four scores from a confusion matrix.

    An absent class (no true pixels) counts as perfect when it also has no
    false positives, and as 0 otherwise; this keeps the per-class means
    defined on partial sections.
    """
    n = np.asarray(cm, dtype=np.float64)
    if n.ndim != 2 or n.shape[0] != n.shape[1] or n.shape[0] < 1:
        raise ValueError("confusion matrix must be square and non-empty")
    total = n.sum()
    if total <= 0:
        raise ValueError("confusion matrix must count at least one pixel")

    diag = np.diag(n)
    t = n.sum(axis=1)          # true pixels per class
    col = n.sum(axis=0)        # predicted pixels per class
    n_c = n.shape[0]

    pa = float(diag.sum() / t.sum())

    acc = np.empty(n_c)
    iu = np.empty(n_c)
    for i in range(n_c):
        if t[i] > 0:
            acc[i] = diag[i] / t[i]
            iu[i] = diag[i] / (t[i] + col[i] - diag[i])
        else:
            vacuous = 1.0 if col[i] == 0 else 0.0
            acc[i] = vacuous
            iu[i] = vacuous
    mca = float(acc.mean())
    miu = float(iu.mean())
    fwiu = float((t * iu).sum() / t.sum())
    return ScoreReport(pa=pa, mca=mca, miu=miu, fwiu=fwiu)


def score_grids(pred, truth, n_classes):
    """Convenience: confusion matrix plus metrics for two label grids."""
    return metrics(confusion_matrix(pred, truth, n_classes))


def format_report(report):
    """Line-oriented ``metric = value`` text for a score report."""
    return "".join(f"{k} = {v:.6f}\n" for k, v in report.as_dict().items())


def palette_for(n_classes):
    """Color palette for a class count: 4 = structures, 3 = facies."""
    if n_classes == 4:
        return STRUCTURE_PALETTE
    if n_classes == 3:
        return FACIES_PALETTE
    if 1 <= n_classes <= len(EXTRA_COLORS):
        return EXTRA_COLORS[:n_classes]
    raise ValueError(f"no palette for {n_classes} classes")


def render_labels(labels, background=None, palette=None):
    """Render a label grid to an RGB byte image.

    With a background grid (values in [0, 1]) the class color is
    alpha-blended at 0.5 over the grayscale amplitude.
    """
    lab = np.asarray(labels).astype(np.int64)
    if palette is None:
        palette = palette_for(int(lab.max()) + 1)
    colors = np.asarray(palette, dtype=np.float64)
    if lab.min() < 0 or lab.max() >= len(colors):
        raise ValueError(f"labels out of range for a {len(colors)}-color palette")
    rgb = colors[lab]
    if background is not None:
        bg = np.clip(np.asarray(background, dtype=np.float64), 0.0, 1.0)
        if bg.shape != lab.shape:
            raise ValueError("background shape must match the label grid")
        rgb = 0.5 * rgb + 0.5 * (bg * 255.0)[:, :, None]
    return np.rint(rgb).astype(np.uint8)


def write_ppm(path, rgb):
    """Write an RGB byte image as binary PPM (P6, 8-bit channels)."""
    img = np.ascontiguousarray(rgb, dtype=np.uint8)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError("PPM payload must be (rows, cols, 3)")
    rows, cols = img.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{cols} {rows}\n255\n".encode("ascii"))
        fh.write(img.tobytes(order="C"))


def read_ppm(path):
    """Read a binary PPM written by ``write_ppm``."""
    with open(path, "rb") as fh:
        data = fh.read()
    fields = []
    pos = 0
    while len(fields) < 4:
        while pos < len(data) and data[pos] in b" \t\r\n":
            pos += 1
        start = pos
        while pos < len(data) and data[pos] not in b" \t\r\n":
            pos += 1
        fields.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    if fields[0] != b"P6":
        raise ValueError(f"{path}: not a binary PPM")
    cols, rows, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    img = np.frombuffer(data[pos:pos + rows * cols * 3], dtype=np.uint8)
    if img.size != rows * cols * 3:
        raise ValueError(f"{path}: truncated PPM payload")
    return img.reshape(rows, cols, 3).copy()
