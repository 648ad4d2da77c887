"""Graph signal denoising with spectral graph wavelet tight frames and SURE."""

__version__ = "0.1.0"

from .denoise import (
    HARD,
    NoiseModel,
    ThreshPolicy,
    ThreshSweepResult,
    add_noise,
    betathresh,
    diag_frame_gram,
    estimate_gamma_mc,
    randsignal,
    snr,
    sure_mse_thresh,
    sure_value,
)
from .errors import FormatError, ParameterError, SGWTError, TransportError, ValidationError
from .frames import FilterBank, TightFrame, filter_curves, omega, psi, scale_count, tight_frame
from .graph import EigenSystem, SparseGraph, degrees, eigensort, laplacian_mat
from .mmio import MatrixMarketHeader, parse_matrix_market
from .sgwt import WaveletCoeffs, analysis, forward_sgwt, inverse_sgwt, synthesis
from .ssmc import GraphBundle, download_graph, load_bundle, save_bundle

__all__ = [
    "HARD", "NoiseModel", "ThreshPolicy", "ThreshSweepResult", "add_noise", "betathresh",
    "diag_frame_gram", "estimate_gamma_mc", "randsignal", "snr", "sure_mse_thresh", "sure_value",
    "FormatError", "ParameterError", "SGWTError", "TransportError", "ValidationError",
    "FilterBank", "TightFrame", "filter_curves", "omega", "psi", "scale_count", "tight_frame",
    "EigenSystem", "SparseGraph", "degrees", "eigensort", "laplacian_mat",
    "MatrixMarketHeader", "parse_matrix_market",
    "WaveletCoeffs", "analysis", "forward_sgwt", "inverse_sgwt", "synthesis",
    "GraphBundle", "download_graph", "load_bundle", "save_bundle",
]
