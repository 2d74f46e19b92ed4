"""Registry mapping descriptor names to featurizers and feature lengths."""

import numpy as np

from . import glcm as _glcm
from . import lbp as _lbp
from . import lri as _lri
from . import semblance as _semblance

DESCRIPTOR_NAMES = (
    "glcm",
    "semblance",
    "lbp",
    "clbp",
    "mclbp",
    "elbp",
    "cldp",
    "lri",
)

_LENGTHS = {
    "glcm": _glcm.GLCM_FEATURE_LENGTH,
    "semblance": _semblance.SEMBLANCE_BINS,
    "lbp": _lbp.DEFAULT_P + 2,
    "clbp": 2 * (_lbp.DEFAULT_P + 2) ** 2,
    "mclbp": sum(2 * (p + 2) ** 2 for p, _ in _lbp.MULTISCALE),
    "elbp": 2 * (_lbp.DEFAULT_P + 2) ** 2,
    "cldp": 2 * (_lbp.DEFAULT_P + 2) ** 2 + (_lbp.DEFAULT_P + 2),
    "lri": 8 * (2 * _lri.LriConfig().k_max + 1),
}


def feature_length(name):
    """Feature vector length for a descriptor name."""
    try:
        return _LENGTHS[name]
    except KeyError:
        raise ValueError(
            f"unknown descriptor {name!r}; expected one of {', '.join(DESCRIPTOR_NAMES)}"
        ) from None


def featurize(patch, name, glcm_levels=64):
    """Compute the named descriptor's feature vector for one patch.

    The patch is expected to be normalized (values in [0, 1]) and already
    Gaussian-windowed if the caller wants center weighting. The semblance
    descriptor computes the patch's semblance map internally before
    histogramming it.
    """
    p = np.asarray(patch, dtype=np.float64)
    if name == "glcm":
        return _glcm.glcm_feature(p, levels=glcm_levels)
    if name == "semblance":
        return _semblance.semblance_feature(_semblance.semblance_map(p))
    if name == "lbp":
        return _lbp.lbp_feature(p)
    if name == "clbp":
        return _lbp.clbp_feature(p)
    if name == "mclbp":
        return _lbp.mclbp_feature(p)
    if name == "elbp":
        return _lbp.elbp_feature(p)
    if name == "cldp":
        return _lbp.cldp_feature(p)
    if name == "lri":
        return _lri.lri_feature(p)
    raise ValueError(
        f"unknown descriptor {name!r}; expected one of {', '.join(DESCRIPTOR_NAMES)}"
    )
