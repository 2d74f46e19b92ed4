"""HTTP service layer: FastAPI app and its pydantic request/response models."""
