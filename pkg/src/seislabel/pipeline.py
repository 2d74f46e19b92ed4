"""End-to-end train/label orchestration: configuration, exemplar-driven
patch harvesting, featurization, OVA training and section labeling."""

import multiprocessing
import os
from dataclasses import dataclass, field, replace
from functools import partial

import numpy as np

from .descriptors import DESCRIPTOR_NAMES, feature_length, featurize
from .grids import extract_patch, gaussian_window, normalize_section, read_sgrid
from .lbp import mclbp_feature
from .slic import slic_segment
from .svm import save_model, predict, train_ova

STRUCTURE_CLASSES = ("Chaotic", "Faults", "SaltDome", "Other")
FACIES_CLASSES = ("HST", "LST", "TST")

CHI2_EPS = 1e-12
MANIFEST_MAGIC = "TRAINSET"
MANIFEST_VERSION = 1


class ConfigError(Exception):
    """Bad or missing configuration; maps to the CLI's usage exit code."""


@dataclass
class PipelineConfig:
    """Settings for the train/label workflow; mirrors the config file keys."""

    descriptor: str = ""
    patch_size: int = 99
    classes: tuple = STRUCTURE_CLASSES
    stride: int = 16
    per_class: int = 500
    gaussian_sigma: float = 25.0
    glcm_levels: int = 64
    slic_region_size: int = 25
    slic_compactness: float = 0.5
    slic_iterations: int = 10
    svm_c: float = 1e4
    svm_max_iter: int = 100_000
    sections: tuple = ()
    exemplars: str = ""
    model: str = ""
    output: str = ""


def _parse_int(key, raw, minimum):
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None
    if value < minimum:
        raise ConfigError(f"{key}: must be >= {minimum}, got {value}")
    return value


def _parse_float(key, raw):
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
    if value <= 0:
        raise ConfigError(f"{key}: must be positive, got {value}")
    return value


def parse_config(path):
    """Parse a line-oriented ``key = value`` config file.

    Blank lines and ``#`` comments are ignored; unknown keys are errors.
    """
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    cfg = PipelineConfig()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, raw = stripped.partition("=")
            key, raw = key.strip(), raw.strip()
            cfg = _apply_key(cfg, key, raw, where=f"{path}:{lineno}")
    return cfg


def _apply_key(cfg, key, raw, where):
    if key == "descriptor":
        if raw not in DESCRIPTOR_NAMES:
            raise ConfigError(
                f"{where}: unknown descriptor {raw!r}; "
                f"expected one of {', '.join(DESCRIPTOR_NAMES)}"
            )
        return replace(cfg, descriptor=raw)
    if key == "patch_size":
        size = _parse_int(key, raw, 3)
        if size % 2 == 0:
            raise ConfigError(f"{where}: patch_size must be odd, got {size}")
        return replace(cfg, patch_size=size)
    if key == "classes":
        names = tuple(name.strip() for name in raw.split(",") if name.strip())
        if not names:
            raise ConfigError(f"{where}: classes must name at least one class")
        return replace(cfg, classes=names)
    if key == "stride":
        return replace(cfg, stride=_parse_int(key, raw, 1))
    if key == "per_class":
        return replace(cfg, per_class=_parse_int(key, raw, 1))
    if key == "gaussian_sigma":
        return replace(cfg, gaussian_sigma=_parse_float(key, raw))
    if key == "glcm_levels":
        return replace(cfg, glcm_levels=_parse_int(key, raw, 2))
    if key == "slic_region_size":
        return replace(cfg, slic_region_size=_parse_int(key, raw, 4))
    if key == "slic_compactness":
        return replace(cfg, slic_compactness=_parse_float(key, raw))
    if key == "slic_iterations":
        return replace(cfg, slic_iterations=_parse_int(key, raw, 1))
    if key == "svm_c":
        return replace(cfg, svm_c=_parse_float(key, raw))
    if key == "svm_max_iter":
        return replace(cfg, svm_max_iter=_parse_int(key, raw, 1))
    if key == "sections":
        paths = tuple(p.strip() for p in raw.split(",") if p.strip())
        return replace(cfg, sections=paths)
    if key == "exemplars":
        return replace(cfg, exemplars=raw)
    if key == "model":
        return replace(cfg, model=raw)
    if key == "output":
        return replace(cfg, output=raw)
    raise ConfigError(f"{where}: unknown key {key!r}")


@dataclass
class HarvestedPatch:
    """A training patch plus where it came from and how well it matched."""

    patch: np.ndarray
    class_id: int
    section_index: int
    center: tuple
    score: float


@dataclass
class TrainingSet:
    """Per-class harvested patches with provenance."""

    class_names: tuple
    patch_size: int
    by_class: list
    section_paths: tuple = ()
    # class name -> (requested, found) for classes that came up short
    shortfall: dict = field(default_factory=dict)

    def counts(self):
        return {name: len(patches)
                for name, patches in zip(self.class_names, self.by_class)}


def chi_square(h, g):
    """Chi-square distance between two histograms (symmetric, >= 0)."""
    h = np.asarray(h, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    return float(((h - g) ** 2 / (h + g + CHI2_EPS)).sum())


def resolve_section_paths(entries):
    """Expand config section entries: files stay, directories glob *.sgrid."""
    paths = []
    for entry in entries:
        if os.path.isdir(entry):
            names = sorted(n for n in os.listdir(entry) if n.endswith(".sgrid"))
            if not names:
                raise ConfigError(f"no .sgrid files in section directory {entry}")
            paths.extend(os.path.join(entry, n) for n in names)
        elif os.path.isfile(entry):
            paths.append(entry)
        else:
            raise ConfigError(f"section not found: {entry}")
    if not paths:
        raise ConfigError("no input sections configured")
    return paths


def load_sections(cfg):
    """Read and normalize every configured section."""
    paths = resolve_section_paths(cfg.sections)
    return paths, [normalize_section(read_sgrid(p)) for p in paths]


def load_exemplars(cfg):
    """Load exemplar patches grouped by class.

    Exemplar files live in the configured directory and are named
    ``<ClassName>.sgrid`` or ``<ClassName>_<tag>.sgrid``; each must match the
    configured patch size and hold values in [0, 1] (patches cut from
    normalized sections). A class without exemplars is a configuration error.
    """
    if not cfg.exemplars:
        raise ConfigError("no exemplars directory configured")
    if not os.path.isdir(cfg.exemplars):
        raise ConfigError(f"exemplars directory not found: {cfg.exemplars}")
    names = sorted(n for n in os.listdir(cfg.exemplars) if n.endswith(".sgrid"))
    by_class = [[] for _ in cfg.classes]
    for name in names:
        stem = name[:-len(".sgrid")]
        for k, cls in enumerate(cfg.classes):
            if stem == cls or stem.startswith(cls + "_"):
                patch = np.asarray(read_sgrid(os.path.join(cfg.exemplars, name)),
                                   dtype=np.float64)
                if patch.shape != (cfg.patch_size, cfg.patch_size):
                    raise ConfigError(
                        f"exemplar {name} is {patch.shape[0]}x{patch.shape[1]}, "
                        f"expected {cfg.patch_size}x{cfg.patch_size}"
                    )
                by_class[k].append(patch)
                break
    for cls, patches in zip(cfg.classes, by_class):
        if not patches:
            raise ConfigError(f"missing exemplar for class {cls!r} in {cfg.exemplars}")
    return by_class


# worker-side state for harvest scoring and featurization; populated by the
# pool initializer (or set in-process for the serial path)
_WORKER_STATE = {}


def _harvest_init(sections, exemplar_features, patch_size):
    _WORKER_STATE["sections"] = sections
    _WORKER_STATE["exemplar_features"] = exemplar_features
    _WORKER_STATE["patch_size"] = patch_size


def _harvest_score(coord):
    """Best per-class similarity (negative chi-square) for one candidate."""
    si, r, c = coord
    half = _WORKER_STATE["patch_size"] // 2
    patch = _WORKER_STATE["sections"][si][r - half:r + half + 1,
                                          c - half:c + half + 1]
    feat = mclbp_feature(patch)
    scores = []
    for ex_feats in _WORKER_STATE["exemplar_features"]:
        d2 = ((feat - ex_feats) ** 2 / (feat + ex_feats + CHI2_EPS)).sum(axis=1)
        scores.append(-float(d2.min()))
    return scores


def _featurize_task(patch, descriptor, glcm_levels, sigma):
    return featurize(gaussian_window(patch, sigma), descriptor,
                     glcm_levels=glcm_levels)


def _pool_map(fn, items, workers, initializer=None, initargs=()):
    """Order-preserving map, optionally over a process pool."""
    items = list(items)
    if workers <= 1 or len(items) < 4:
        if initializer is not None:
            initializer(*initargs)
        return [fn(item) for item in items]
    ctx = multiprocessing.get_context("fork")
    chunksize = max(1, len(items) // (workers * 4))
    with ctx.Pool(workers, initializer=initializer, initargs=initargs) as pool:
        return pool.map(fn, items, chunksize=chunksize)


def candidate_centers(shape, patch_size, stride):
    """Window centers on a stride grid, keeping the window fully in bounds."""
    rows, cols = shape
    half = patch_size // 2
    return [(r, c)
            for r in range(half, rows - half, stride)
            for c in range(half, cols - half, stride)]


def harvest_patches(sections, exemplars_by_class, class_names, patch_size,
                    per_class=500, stride=16, workers=1, section_paths=()):
    """Harvest training patches by similarity to the exemplars.

    Every stride-aligned window fully inside a section is scored against each
    class's exemplars by negative chi-square distance between multiscale
    completed-LBP histograms. A candidate counts only toward its best class;
    the top ``per_class`` candidates are kept per class. Classes with fewer
    candidates than requested keep them all and are flagged in
    ``TrainingSet.shortfall``.
    """
    coords = []
    for si, grid in enumerate(sections):
        if min(grid.shape) < patch_size:
            raise ConfigError(
                f"section {si} is {grid.shape[0]}x{grid.shape[1]}, smaller than "
                f"the {patch_size}x{patch_size} patch"
            )
        coords.extend((si, r, c)
                      for r, c in candidate_centers(grid.shape, patch_size, stride))

    exemplar_features = [np.array([mclbp_feature(p) for p in patches])
                         for patches in exemplars_by_class]
    scores = _pool_map(
        _harvest_score, coords, workers,
        initializer=_harvest_init,
        initargs=(sections, exemplar_features, patch_size),
    )

    n_classes = len(class_names)
    per_class_candidates = [[] for _ in range(n_classes)]
    for coord, class_scores in zip(coords, scores):
        best = int(np.argmax(class_scores))
        per_class_candidates[best].append((class_scores[best], coord))

    by_class = []
    shortfall = {}
    half = patch_size // 2
    for k, candidates in enumerate(per_class_candidates):
        candidates.sort(key=lambda item: (-item[0], item[1]))
        kept = candidates[:per_class]
        if len(kept) < per_class:
            shortfall[class_names[k]] = (per_class, len(kept))
        picked = []
        for score, (si, r, c) in kept:
            patch = sections[si][r - half:r + half + 1, c - half:c + half + 1].copy()
            picked.append(HarvestedPatch(patch=patch, class_id=k,
                                         section_index=si, center=(r, c),
                                         score=score))
        by_class.append(picked)
    return TrainingSet(class_names=tuple(class_names), patch_size=patch_size,
                       by_class=by_class, section_paths=tuple(section_paths),
                       shortfall=shortfall)


def write_manifest(training_set, path):
    """Write a TrainingSet provenance manifest (text, line-oriented)."""
    lines = [f"{MANIFEST_MAGIC} {MANIFEST_VERSION} {training_set.patch_size} "
             f"{len(training_set.class_names)}"]
    for k, name in enumerate(training_set.class_names):
        lines.append(f"class {k} {name}")
    for i, p in enumerate(training_set.section_paths):
        lines.append(f"section {i} {p}")
    for patches in training_set.by_class:
        for hp in patches:
            lines.append(f"patch {hp.class_id} {hp.section_index} "
                         f"{hp.center[0]} {hp.center[1]} {repr(hp.score)}")
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def featurize_patches(patches, descriptor, glcm_levels=64, sigma=25.0, workers=1):
    """Gaussian-window and featurize a list of patches (order preserved)."""
    task = partial(_featurize_task, descriptor=descriptor,
                   glcm_levels=glcm_levels, sigma=sigma)
    return _pool_map(task, patches, workers)


def train_pipeline(cfg, workers=1):
    """Run the full training process and persist the model bundle.

    harvest -> Gaussian window -> featurize -> one-vs-all SVM. Validation
    failures raise ConfigError before any output is written; the bundle write
    itself is atomic. Deterministic for a fixed config.
    """
    if not cfg.descriptor:
        raise ConfigError("no descriptor configured")
    if not cfg.model:
        raise ConfigError("no model output path configured")
    section_paths, sections = load_sections(cfg)
    exemplars = load_exemplars(cfg)

    training_set = harvest_patches(
        sections, exemplars, cfg.classes, cfg.patch_size,
        per_class=cfg.per_class, stride=cfg.stride, workers=workers,
        section_paths=section_paths,
    )
    patches = [hp.patch for patches in training_set.by_class for hp in patches]
    labels = [hp.class_id for patches in training_set.by_class for hp in patches]
    features = featurize_patches(patches, cfg.descriptor,
                                 glcm_levels=cfg.glcm_levels,
                                 sigma=cfg.gaussian_sigma, workers=workers)
    model = train_ova(np.array(features), np.array(labels), len(cfg.classes),
                      c=cfg.svm_c, max_iter=cfg.svm_max_iter,
                      descriptor_id=cfg.descriptor)
    save_model(model, cfg.model)
    return model, training_set


def label_section(grid, model, cfg, workers=1):
    """Label a normalized section with a trained model.

    The section is segmented into superpixels; each superpixel is classified
    from the patch-sized neighborhood around its centroid (edge-replicated,
    Gaussian-windowed) and all its pixels receive the predicted class.
    Returns the label grid and the superpixel map.
    """
    expected = feature_length(model.descriptor_id)
    if model.feature_dim != expected:
        raise ValueError(
            f"model dimension {model.feature_dim} does not match descriptor "
            f"{model.descriptor_id!r} ({expected})"
        )
    spmap = slic_segment(grid, region_size=cfg.slic_region_size,
                         compactness=cfg.slic_compactness,
                         iterations=cfg.slic_iterations)
    patches = [extract_patch(grid, tuple(centroid), cfg.patch_size)
               for centroid in spmap.centroids]
    features = featurize_patches(patches, model.descriptor_id,
                                 glcm_levels=cfg.glcm_levels,
                                 sigma=cfg.gaussian_sigma, workers=workers)
    classes = np.array([predict(model, f) for f in features], dtype=np.int32)
    return classes[spmap.assignment], spmap
