"""FastAPI service wrapping the labeling pipeline.

Compute endpoints (/normalize, /featurize, /metrics) take inline payloads;
job endpoints (/harvest, /train, /label, /evaluate, /render) reference files
on the service host, mirroring the batch CLI.
"""

import os
from dataclasses import replace

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .. import __version__
from ..descriptors import DESCRIPTOR_NAMES, feature_length, featurize
from ..grids import gaussian_window, normalize_section, read_sgrid, write_sgrid
from ..metrics import (confusion_matrix, format_report, metrics, palette_for,
                       render_labels, score_grids, write_ppm)
from ..pipeline import (ConfigError, harvest_patches, label_section,
                        load_exemplars, load_sections, parse_config,
                        train_pipeline, write_manifest)
from ..selftest import run_selftest
from ..svm import load_model
from . import models as m

app = FastAPI(title="seislabel", version=__version__)

_USAGE_ERRORS = (ConfigError, ValueError, FileNotFoundError, NotADirectoryError)


def _grid_to_payload(grid):
    rows, cols = grid.shape
    return m.GridPayload(rows=rows, cols=cols,
                         values=[float(v) for v in grid.ravel()])


def _payload_to_grid(payload):
    return np.array(payload.values, dtype=np.float64).reshape(
        payload.rows, payload.cols
    )


def _apply_overrides(cfg, request):
    if getattr(request, "descriptor", None):
        cfg = replace(cfg, descriptor=request.descriptor)
    if getattr(request, "patch_size", None):
        cfg = replace(cfg, patch_size=request.patch_size)
    return cfg


def _workers(request):
    return request.workers if request.workers else (os.cpu_count() or 1)


def _read_labels(path):
    return np.rint(read_sgrid(path)).astype(np.int64)


@app.exception_handler(ConfigError)
async def _config_error(_request, exc):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.get("/health", response_model=m.HealthResponse)
def health():
    return m.HealthResponse(status="ok", version=__version__)


@app.get("/descriptors", response_model=m.DescriptorListResponse)
def descriptors():
    return m.DescriptorListResponse(descriptors=[
        m.DescriptorInfo(name=name, feature_length=feature_length(name))
        for name in DESCRIPTOR_NAMES
    ])


@app.post("/normalize", response_model=m.NormalizeResponse)
def normalize(request: m.NormalizeRequest):
    grid = normalize_section(_payload_to_grid(request.grid))
    return m.NormalizeResponse(grid=_grid_to_payload(grid))


@app.post("/featurize", response_model=m.FeaturizeResponse)
def featurize_endpoint(request: m.FeaturizeRequest):
    patch = _payload_to_grid(request.patch)
    try:
        if request.gaussian_sigma is not None:
            patch = gaussian_window(patch, request.gaussian_sigma)
        feature = featurize(patch, request.descriptor,
                            glcm_levels=request.glcm_levels)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return m.FeaturizeResponse(descriptor=request.descriptor,
                               feature=[float(v) for v in feature])


@app.post("/metrics", response_model=m.ScorePayload)
def metrics_endpoint(request: m.MetricsRequest):
    try:
        report = metrics(confusion_matrix(np.array(request.pred),
                                          np.array(request.truth),
                                          request.n_classes))
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return m.ScorePayload(**report.as_dict())


@app.post("/harvest", response_model=m.HarvestResponse)
def harvest(request: m.HarvestRequest):
    try:
        cfg = _apply_overrides(parse_config(request.config), request)
        section_paths, sections = load_sections(cfg)
        exemplars = load_exemplars(cfg)
        training_set = harvest_patches(
            sections, exemplars, cfg.classes, cfg.patch_size,
            per_class=cfg.per_class, stride=cfg.stride,
            workers=_workers(request), section_paths=section_paths,
        )
        manifest_path = request.out or os.path.join(
            cfg.output or ".", "training.manifest"
        )
        write_manifest(training_set, manifest_path)
    except _USAGE_ERRORS as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return m.HarvestResponse(
        manifest_path=manifest_path,
        counts=training_set.counts(),
        shortfall=training_set.shortfall,
    )


@app.post("/train", response_model=m.TrainResponse)
def train(request: m.TrainRequest):
    try:
        cfg = _apply_overrides(parse_config(request.config), request)
        if request.out:
            cfg = replace(cfg, model=request.out)
        model, training_set = train_pipeline(cfg, workers=_workers(request))
    except _USAGE_ERRORS as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return m.TrainResponse(
        model_path=cfg.model,
        descriptor=model.descriptor_id,
        classes=list(cfg.classes),
        feature_dim=model.feature_dim,
        counts=training_set.counts(),
        shortfall=training_set.shortfall,
    )


@app.post("/label", response_model=m.LabelResponse)
def label(request: m.LabelRequest):
    try:
        cfg = _apply_overrides(parse_config(request.config), request)
        if not cfg.model:
            raise ConfigError("no model path configured")
        model = load_model(cfg.model)
        grid = normalize_section(read_sgrid(request.section))
        labels, spmap = label_section(grid, model, cfg,
                                      workers=_workers(request))

        stem = os.path.splitext(os.path.basename(request.section))[0]
        out_dir = request.out or cfg.output or os.path.dirname(request.section) or "."
        os.makedirs(out_dir, exist_ok=True)
        labels_path = os.path.join(out_dir, f"{stem}.labels.sgrid")
        ppm_path = os.path.join(out_dir, f"{stem}.labels.ppm")
        write_sgrid(labels_path, labels.astype(np.float64))
        write_ppm(ppm_path, render_labels(labels,
                                          palette=palette_for(len(cfg.classes))))
        seed_grid_path = None
        if request.seed_grid:
            seed_grid_path = request.seed_grid
            write_sgrid(seed_grid_path, spmap.assignment.astype(np.float64))
    except _USAGE_ERRORS as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    counts = np.bincount(labels.ravel(), minlength=len(cfg.classes))
    return m.LabelResponse(
        labels_path=labels_path,
        ppm_path=ppm_path,
        seed_grid_path=seed_grid_path,
        superpixel_count=spmap.count,
        class_pixel_counts={name: int(counts[k])
                            for k, name in enumerate(cfg.classes)},
    )


@app.post("/evaluate", response_model=m.EvaluateResponse)
def evaluate(request: m.EvaluateRequest):
    try:
        pred = _read_labels(request.pred)
        truth = _read_labels(request.truth)
        n_classes = request.n_classes or int(max(pred.max(), truth.max())) + 1
        report = score_grids(pred, truth, n_classes)
        text = format_report(report)
        report_path = None
        if request.out:
            report_path = request.out
            with open(report_path, "w", encoding="ascii") as fh:
                fh.write(text)
    except _USAGE_ERRORS as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return m.EvaluateResponse(scores=m.ScorePayload(**report.as_dict()),
                              report=text, report_path=report_path)


@app.post("/render", response_model=m.RenderResponse)
def render(request: m.RenderRequest):
    try:
        labels = _read_labels(request.labels)
        background = None
        if request.background:
            background = normalize_section(read_sgrid(request.background))
        n_classes = request.n_classes or int(labels.max()) + 1
        write_ppm(request.out, render_labels(labels, background=background,
                                             palette=palette_for(n_classes)))
    except _USAGE_ERRORS as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return m.RenderResponse(ppm_path=request.out)


@app.post("/selftest", response_model=m.SelftestResponse)
def selftest():
    passed, results = run_selftest(writer=None)
    return m.SelftestResponse(
        passed=passed,
        checks=[m.SelftestCheck(name=name, passed=ok, detail=detail)
                for name, ok, detail in results],
    )
