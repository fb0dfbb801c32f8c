"""Haemoglobin concentration and oxygen saturation maps from RGB frames.

RGB frames are wavelet-decomposed; the cheap Tikhonov unmixer handles the
signed directional coefficients, an iterative Bayesian estimator handles the
all-positive low-pass component, and Beer-Lambert fitting turns the
recomposed spectra into per-pixel (HbO, Hb, offset) maps with derived THb
and SatO2 planes.
"""

from .core import (
    DEFAULT_GRID,
    CameraSensitivity,
    ChromophoreBasis,
    ConcentrationMap,
    RgbImage,
    SpectralCube,
    WavelengthGrid,
    resample_to_grid,
)
from .errors import (
    ArgumentError,
    DataError,
    IllConditionedPriorError,
    NumericalError,
    OximapError,
    SingularOperatorError,
)
from .bayes import BayesConfig, LowPassBlock, estimate_lowpass
from .haar import HaarLevel, HaarPyramid, forward, haar_matrix, inverse
from .metrics import MseReport, concentration_mse
from .pipeline import PipelineConfig, estimate_frame, estimate_sequence, fit_cube
from .synth import GaussianBlob, PhantomSpec, forward_msi, pulse_sequence, synthesize_rgb
from .timeseries import PulseReport, Trace, analyze_pulse, dominant_frequency
from .unmix import TikhonovOperator, lsq_unmix, tikhonov_unmix

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "BayesConfig",
    "CameraSensitivity",
    "ChromophoreBasis",
    "ConcentrationMap",
    "DataError",
    "DEFAULT_GRID",
    "GaussianBlob",
    "HaarLevel",
    "HaarPyramid",
    "IllConditionedPriorError",
    "LowPassBlock",
    "MseReport",
    "NumericalError",
    "OximapError",
    "PhantomSpec",
    "PipelineConfig",
    "PulseReport",
    "RgbImage",
    "SingularOperatorError",
    "SpectralCube",
    "TikhonovOperator",
    "Trace",
    "WavelengthGrid",
    "analyze_pulse",
    "concentration_mse",
    "dominant_frequency",
    "estimate_frame",
    "estimate_lowpass",
    "estimate_sequence",
    "fit_cube",
    "forward",
    "forward_msi",
    "haar_matrix",
    "inverse",
    "lsq_unmix",
    "pulse_sequence",
    "resample_to_grid",
    "synthesize_rgb",
    "tikhonov_unmix",
    "__version__",
]
