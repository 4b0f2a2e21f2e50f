"""Dual-resolution radar interferometry by wavelet-sparse recovery."""

from .operators import (
    BandSelection,
    SensingOperator,
    apply_adjoint,
    apply_forward,
    apply_sensing,
    apply_sensing_adjoint,
    build_dense_forward,
    build_dense_sensing,
    make_band_selection,
    modulation_from_reference,
    power_iteration,
)
from .recovery import RecoveryConfig, RecoveryReport, fista_recover, objective, soft_threshold
from .scene_sim import FringeSpec, SceneTruth, add_noise, decimate, form_image_pair, generate_scene, wrap
from .wavelets import WaveletConfig, wavelet_analysis, wavelet_synthesis

__version__ = "0.1.0"
