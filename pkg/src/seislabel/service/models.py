"""Pydantic request/response models for the labeling service."""

from pydantic import BaseModel, Field, model_validator


class GridPayload(BaseModel):
    """Inline 2D grid: row-major values."""

    rows: int = Field(ge=1)
    cols: int = Field(ge=1)
    values: list[float]

    @model_validator(mode="after")
    def _check_length(self):
        if len(self.values) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} values, got {len(self.values)}"
            )
        return self


class HealthResponse(BaseModel):
    status: str
    version: str


class DescriptorInfo(BaseModel):
    name: str
    feature_length: int


class DescriptorListResponse(BaseModel):
    descriptors: list[DescriptorInfo]


class NormalizeRequest(BaseModel):
    grid: GridPayload


class NormalizeResponse(BaseModel):
    grid: GridPayload


class FeaturizeRequest(BaseModel):
    patch: GridPayload
    descriptor: str
    # apply the center-weighting window before featurizing when set
    gaussian_sigma: float | None = None
    glcm_levels: int = 64


class FeaturizeResponse(BaseModel):
    descriptor: str
    feature: list[float]


class MetricsRequest(BaseModel):
    pred: list[list[int]]
    truth: list[list[int]]
    n_classes: int = Field(ge=1)


class ScorePayload(BaseModel):
    pa: float
    mca: float
    miu: float
    fwiu: float


class HarvestRequest(BaseModel):
    config: str
    patch_size: int | None = None
    workers: int | None = None
    out: str | None = None  # manifest path override


class HarvestResponse(BaseModel):
    manifest_path: str
    counts: dict[str, int]
    shortfall: dict[str, tuple[int, int]]


class TrainRequest(BaseModel):
    config: str
    descriptor: str | None = None
    patch_size: int | None = None
    workers: int | None = None
    out: str | None = None  # model bundle path override


class TrainResponse(BaseModel):
    model_path: str
    descriptor: str
    classes: list[str]
    feature_dim: int
    counts: dict[str, int]
    shortfall: dict[str, tuple[int, int]]


class LabelRequest(BaseModel):
    config: str
    section: str
    descriptor: str | None = None
    patch_size: int | None = None
    workers: int | None = None
    out: str | None = None  # output directory override
    seed_grid: str | None = None  # write the superpixel id map here


class LabelResponse(BaseModel):
    labels_path: str
    ppm_path: str
    seed_grid_path: str | None
    superpixel_count: int
    class_pixel_counts: dict[str, int]


class EvaluateRequest(BaseModel):
    pred: str
    truth: str
    n_classes: int | None = None  # inferred from the grids when omitted
    out: str | None = None  # score report path


class EvaluateResponse(BaseModel):
    scores: ScorePayload
    report: str
    report_path: str | None


class RenderRequest(BaseModel):
    labels: str
    background: str | None = None
    out: str
    n_classes: int | None = None  # palette choice; inferred when omitted


class RenderResponse(BaseModel):
    ppm_path: str


class SelftestCheck(BaseModel):
    name: str
    passed: bool
    detail: str


class SelftestResponse(BaseModel):
    passed: bool
    checks: list[SelftestCheck]
