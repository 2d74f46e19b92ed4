"""Built-in invariant suites so a deployment can be checked without any
data assets. Each check is a scaled-down version of the acceptance
properties and uses fixed seeds."""

import math

import numpy as np

from .descriptors import featurize
from .glcm import Glcm, glcm_attributes
from .lbp import lbp_code, riu2
from .lri import LriConfig, lri_a_code, lri_feature
from .metrics import confusion_matrix, metrics
from .semblance import semblance_map
from .slic import slic_segment
from .svm import train_binary_svm


def _check_riu2_counts():
    labels8 = np.unique(riu2(np.arange(256), 8))
    labels16 = np.unique(riu2(np.arange(1 << 16), 16))
    ri_classes = set()
    for code in range(256):
        rotations = [((code << k) | (code >> (8 - k))) & 0xFF for k in range(8)]
        ri_classes.add(min(rotations))
    ok = labels8.size == 10 and labels16.size == 18 and len(ri_classes) == 36
    return ok, (f"riu2 labels {labels8.size} (P=8) / {labels16.size} (P=16), "
                f"ri classes {len(ri_classes)}")


def _check_rotation_invariance():
    rng = np.random.default_rng(11)
    for _ in range(500):
        p = int(rng.choice((8, 16, 24)))
        samples = rng.uniform(-1.0, 1.0, p)
        center = float(rng.uniform(-1.0, 1.0))
        base = riu2(lbp_code(samples, center), p)
        for shift in range(1, p):
            if riu2(lbp_code(np.roll(samples, shift), center), p) != base:
                return False, f"shift {shift} changed a P={p} label"
    return True, "500 rings, all circular shifts"


def _check_shift_invariance():
    rng = np.random.default_rng(12)
    for _ in range(40):
        patch = rng.uniform(0.0, 1.0, (33, 33))
        for name in ("lbp", "clbp", "elbp", "cldp", "lri"):
            before = featurize(patch, name)
            after = featurize(patch + 0.1, name)
            if not np.array_equal(before, after):
                return False, f"{name} histogram changed under +0.1 shift"
    return True, "40 patches x 5 descriptors, bit-identical"


def _glcm_oracle(pmf):
    k = pmf.shape[0]
    contrast = entropy = energy2 = homogeneity = mi = 0.0
    p_i = pmf.sum(axis=1)
    p_j = pmf.sum(axis=0)
    mu_i = sum(i * p_i[i] for i in range(k))
    mu_j = sum(j * p_j[j] for j in range(k))
    var_i = sum((i - mu_i) ** 2 * p_i[i] for i in range(k))
    var_j = sum((j - mu_j) ** 2 * p_j[j] for j in range(k))
    corr = 0.0
    for i in range(k):
        for j in range(k):
            v = pmf[i, j]
            contrast += abs(i - j) ** 2 * v
            homogeneity += v / (1.0 + (i - j) ** 2)
            energy2 += v * v
            if v > 0:
                entropy -= v * math.log(v)
                mi += v * math.log(v / (p_i[i] * p_j[j]))
    sigma = math.sqrt(var_i) * math.sqrt(var_j)
    if sigma > 0:
        for i in range(k):
            for j in range(k):
                corr += (i - mu_i) * (j - mu_j) * pmf[i, j] / sigma
    return np.array([contrast, entropy, math.sqrt(energy2), homogeneity, corr, mi])


def _check_glcm_oracle():
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(50):
        pmf = rng.uniform(0.0, 1.0, (8, 8))
        pmf /= pmf.sum()
        got = glcm_attributes(Glcm(levels=8, offset=(0, 1),
                                   counts=np.zeros((8, 8), dtype=np.int64),
                                   pmf=pmf))
        worst = max(worst, float(np.abs(got - _glcm_oracle(pmf)).max()))
    ok = worst < 1e-12
    return ok, f"50 random pmfs, max |diff| {worst:.2e}"


def _check_metric_oracle():
    got = metrics(confusion_matrix(np.array([[0, 0], [0, 1]]),
                                   np.array([[0, 1], [0, 1]]), 2))
    worked = metrics(np.array([[3, 1], [0, 4]]))
    ok = (abs(worked.pa - 0.875) < 1e-15 and abs(worked.mca - 0.875) < 1e-15
          and abs(worked.miu - 0.775) < 1e-15 and abs(worked.fwiu - 0.775) < 1e-15
          and 0.0 <= got.miu <= 1.0)
    return ok, f"worked matrix -> pa {worked.pa:.4f} miu {worked.miu:.4f}"


def _check_lri_cases():
    flat = np.full((9, 9), 2.5)
    if lri_a_code(flat, (4, 4), (0, 1), threshold=0.0, k_max=3) != 0:
        return False, "flat patch did not code 0"
    patch = np.zeros((9, 9))
    patch[4, 5:8] = (5.0, 5.0, 0.5)
    if lri_a_code(patch, (4, 4), (0, 1), threshold=1.0, k_max=3) != 2:
        return False, "run of two above threshold did not code +2"
    patch = np.zeros((9, 9))
    patch[4, 5:8] = (-5.0, -5.0, -5.0)
    if lri_a_code(patch, (4, 4), (0, 1), threshold=1.0, k_max=3) != -3:
        return False, "capped run below threshold did not code -3"
    rng = np.random.default_rng(14)
    cfg = LriConfig()
    for _ in range(50):
        p = rng.uniform(0.0, 1.0, (15, 15))
        if not np.allclose(lri_feature(p, cfg),
                           _reverse_direction_bins(lri_feature(-p, cfg), cfg)):
            return False, "negation antisymmetry failed"
    return True, "worked cases and 50 negation checks"


def _reverse_direction_bins(feature, cfg):
    bins = 2 * cfg.k_max + 1
    blocks = feature.reshape(-1, bins)
    return blocks[:, ::-1].reshape(-1)


def _check_semblance():
    rng = np.random.default_rng(15)
    for _ in range(500):
        window = rng.normal(0.0, 1.0, (3, 3))
        s = semblance_map(window)[1, 1]
        if not (0.0 <= s <= 1.0):
            return False, f"semblance {s} out of [0, 1]"
    trace = rng.normal(0.0, 1.0, 3)
    same = np.tile(trace[:, None], (1, 3))
    if abs(semblance_map(same)[1, 1] - 1.0) > 1e-12:
        return False, "identical traces did not give 1"
    single = np.zeros((3, 3))
    single[:, 1] = trace
    if abs(semblance_map(single)[1, 1] - 1.0 / 3.0) > 1e-12:
        return False, "single active trace did not give 1/J"
    return True, "500 windows bounded, identities hold"


def _check_slic():
    rng = np.random.default_rng(16)
    for _ in range(3):
        grid = rng.uniform(0.0, 1.0, (64, 64))
        spmap = slic_segment(grid, region_size=12, compactness=0.5)
        counts = np.bincount(spmap.assignment.ravel(), minlength=spmap.count)
        if counts.min() < 1:
            return False, "empty superpixel id"
        if not _all_connected(spmap.assignment, spmap.count):
            return False, "disconnected superpixel after enforcement"
    return True, "3 random grids, partitions 4-connected"


def _all_connected(assignment, count):
    from skimage.measure import label as cc_label

    comp = cc_label(assignment, background=-1, connectivity=1)
    return int(comp.max()) == count


def _check_svm():
    rng = np.random.default_rng(17)
    for _ in range(5):
        x, y = separable_set(rng, n=100, dim=18)
        model = train_binary_svm(x, y, c=1e4)
        if np.any(np.diff(model.objective_history) > 0):
            return False, "objective increased during training"
        if np.any(model.decision(x) * y <= 0):
            return False, "separable set not fit to 100% accuracy"
    return True, "5 separable sets, monotone objective, zero errors"


def separable_set(rng, n, dim):
    """Random 2-class set pushed to margin >= 1 along a random direction."""
    u = rng.normal(0.0, 1.0, dim)
    u /= np.linalg.norm(u)
    x = rng.normal(0.0, 1.0, (n, dim))
    proj = x @ u
    y = np.where(proj >= 0.0, 1.0, -1.0)
    y[0], y[-1] = 1.0, -1.0
    shift = np.where(y * proj < 1.0, y - proj, 0.0)
    x = x + shift[:, None] * u
    return x, y


CHECKS = (
    ("riu2-combinatorics", _check_riu2_counts),
    ("rotation-invariance", _check_rotation_invariance),
    ("shift-invariance", _check_shift_invariance),
    ("glcm-oracle", _check_glcm_oracle),
    ("metric-oracle", _check_metric_oracle),
    ("lri-cases", _check_lri_cases),
    ("semblance-bounds", _check_semblance),
    ("slic-partition", _check_slic),
    ("svm-separability", _check_svm),
)


def run_selftest(writer=print):
    """Run every built-in check, printing one PASS/FAIL line per check.

    Returns (passed, results) where results is a list of (name, ok, detail).
    """
    results = []
    for name, check in CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append((name, ok, detail))
        if writer is not None:
            writer(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return all(ok for _, ok, _ in results), results
