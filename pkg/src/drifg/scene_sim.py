"""Synthetic interferometric scenes with known truth.

A scene carries the per-pixel elevation phase, flat-earth phase, scattering
(speckle) phase and amplitude.  The two full-resolution images share the
speckle phase exactly, i.e. they are fully correlated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import BandSelection

FRINGE_KINDS = ("none", "ramp", "hills", "cone")
AMPLITUDE_LAWS = ("rayleigh", "constant")


def wrap(phase):
    """Wrap to (-pi, pi] via atan2(sin, cos)."""
    w = np.arctan2(np.sin(phase), np.cos(phase))
    return np.where(w <= -np.pi, w + 2 * np.pi, w)


@dataclass(frozen=True)
class FringeSpec:
    """Elevation and flat-earth phase description.

    ``kind`` selects the elevation surface.  For ``ramp`` the gradient has
    magnitude ``max_gradient`` along ``direction`` (radians from the row
    axis).  For ``hills`` and ``cone`` the surface is scaled so that its peak
    analytic gradient magnitude is ``max_gradient`` rad/pixel.  ``width`` is
    the hill standard deviation (or cone radius) as a fraction of the
    smaller image side.  The flat-earth phase is the ramp
    ``flat_row * n + flat_col * l``.
    """

    kind: str = "hills"
    max_gradient: float = 1.0
    count: int = 3
    width: float = 0.15
    direction: float = 0.0
    flat_row: float = 0.0
    flat_col: float = 0.5

    def __post_init__(self):
        if self.kind not in FRINGE_KINDS:
            raise ValueError(f"unknown fringe kind {self.kind!r}; choose from {FRINGE_KINDS}")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if not self.width > 0:
            raise ValueError("width must be positive")


@dataclass(frozen=True)
class SceneTruth:
    elevation_phase: np.ndarray
    flat_phase: np.ndarray
    speckle_phase: np.ndarray
    amplitude: np.ndarray

    def __post_init__(self):
        shapes = {a.shape for a in self.fields()}
        if len(shapes) != 1:
            raise ValueError(f"scene fields disagree on shape: {shapes}")
        if self.dims[0] < 1 or self.dims[1] < 1 or len(self.dims) != 2:
            raise ValueError(f"invalid dims {self.dims}")
        for a in self.fields():
            if not np.all(np.isfinite(a)):
                raise ValueError("scene contains non-finite values")
        if np.any(self.speckle_phase <= -np.pi) or np.any(self.speckle_phase > np.pi):
            raise ValueError("speckle phase outside (-pi, pi]")
        if np.any(self.amplitude < 0):
            raise ValueError("negative amplitude")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.amplitude.shape

    def fields(self):
        return (self.elevation_phase, self.flat_phase, self.speckle_phase, self.amplitude)

    @property
    def interferogram(self) -> np.ndarray:
        """High-resolution interferogram |z2| * exp(j * elevation_phase)."""
        return self.amplitude * np.exp(1j * self.elevation_phase)


def _elevation(dims, spec: FringeSpec, rng):
    n, l = dims
    rr, cc = np.meshgrid(np.arange(n, dtype=np.float64), np.arange(l, dtype=np.float64), indexing="ij")
    g = spec.max_gradient
    if spec.kind == "none" or g == 0:
        return np.zeros(dims)
    if spec.kind == "ramp":
        return g * (np.cos(spec.direction) * rr + np.sin(spec.direction) * cc)

    scale = spec.width * min(n, l)
    if spec.kind == "cone":
        r = np.hypot(rr - (n - 1) / 2, cc - (l - 1) / 2)
        # slope inside the cone is height / radius
        return g * scale * np.clip(1.0 - r / scale, 0.0, None)

    # hills: Gaussian bumps with seeded centres and signs, rescaled so the
    # largest analytic gradient magnitude on the grid equals max_gradient
    centres = rng.uniform([0, 0], [n, l], size=(spec.count, 2))
    signs = rng.choice([-1.0, 1.0], size=spec.count)
    widths = scale * rng.uniform(0.7, 1.3, size=spec.count)
    phi = np.zeros(dims)
    d_row = np.zeros(dims)
    d_col = np.zeros(dims)
    for (r0, c0), s, w in zip(centres, signs, widths):
        bump = s * np.exp(-((rr - r0) ** 2 + (cc - c0) ** 2) / (2 * w * w))
        phi += bump
        d_row -= bump * (rr - r0) / (w * w)
        d_col -= bump * (cc - c0) / (w * w)
    peak = np.hypot(d_row, d_col).max()
    if peak == 0:
        return phi
    return phi * (g / peak)


def generate_scene(
    dims,
    fringe_spec: FringeSpec | None = None,
    rng_seed: int = 0,
    amplitude_law: str = "rayleigh",
    sigma: float = 1.0,
    backscatter_depth: float = 0.0,
) -> SceneTruth:
    """Draw a scene of ``dims = (rows, cols)`` pixels.

    Speckle phase is i.i.d. uniform on (-pi, pi].  Amplitude is Rayleigh with
    scale ``sigma`` (or the constant ``sigma`` for ``amplitude_law="constant"``),
    optionally multiplied by a smooth backscatter pattern
    ``1 + backscatter_depth * cos(...) * cos(...)``.
    """
    n, l = (int(d) for d in dims)
    if n < 1 or l < 1:
        raise ValueError(f"dims must be positive, got {dims}")
    if amplitude_law not in AMPLITUDE_LAWS:
        raise ValueError(f"unknown amplitude law {amplitude_law!r}")
    if not 0 <= backscatter_depth < 1:
        raise ValueError("backscatter_depth must lie in [0, 1)")
    spec = fringe_spec or FringeSpec()
    if not all(np.isfinite([spec.max_gradient, spec.direction, spec.flat_row, spec.flat_col, spec.width])):
        raise ValueError("non-finite fringe parameter")

    # independent streams so changing one field's recipe leaves the others alone
    s_fringe, s_speckle, s_amp = np.random.SeedSequence(rng_seed).spawn(3)
    elevation = _elevation((n, l), spec, np.random.default_rng(s_fringe))

    rr, cc = np.meshgrid(np.arange(n, dtype=np.float64), np.arange(l, dtype=np.float64), indexing="ij")
    flat = spec.flat_row * rr + spec.flat_col * cc

    # pi - U[0, 2pi) lies in (-pi, pi]
    speckle = np.pi - np.random.default_rng(s_speckle).uniform(0.0, 2 * np.pi, size=(n, l))

    if amplitude_law == "rayleigh":
        amp = np.random.default_rng(s_amp).rayleigh(scale=sigma, size=(n, l))
    else:
        amp = np.full((n, l), float(sigma))
    if backscatter_depth:
        amp = amp * (1 + backscatter_depth * np.cos(2 * np.pi * rr / n) * np.cos(2 * np.pi * cc / l))

    if not (np.all(np.isfinite(elevation)) and np.all(np.isfinite(flat))):
        raise ValueError("fringe parameters produced non-finite phase")
    return SceneTruth(elevation, flat, speckle, amp)


def form_image_pair(scene: SceneTruth) -> tuple[np.ndarray, np.ndarray]:
    """Fully correlated full-resolution pair (z1, z2)."""
    z1 = scene.amplitude * np.exp(1j * scene.speckle_phase)
    z2 = scene.amplitude * np.exp(
        1j * (scene.speckle_phase + scene.flat_phase + scene.elevation_phase)
    )
    return z1, z2


def decimate(z: np.ndarray, band: BandSelection) -> np.ndarray:
    """Ideal lowpass to ``band`` followed by resampling onto the reduced grid.

    Unitary DFTs at both sizes, so a constant image ``c`` comes out as the
    constant ``c * sqrt(N*L / (M*K))`` (energy is preserved).
    """
    z = np.asarray(z)
    if z.shape != tuple(band.full_dims):
        raise ValueError(f"image {z.shape} does not match band {band.full_dims}")
    spec = np.fft.fft2(z, norm="ortho")
    return np.fft.ifft2(spec[np.ix_(band.row_bins, band.col_bins)], norm="ortho")


def add_noise(z: np.ndarray, snr_db: float, rng_seed: int = 0) -> np.ndarray:
    """Add circular complex Gaussian noise at ``snr_db`` relative to mean |z|^2.

    ``snr_db = inf`` disables noise and returns a copy of the input.
    """
    z = np.asarray(z, dtype=np.complex128)
    if snr_db == np.inf:
        return z.copy()
    if not np.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite or +inf, got {snr_db}")
    p_signal = np.mean(np.abs(z) ** 2)
    p_noise = p_signal / 10 ** (snr_db / 10)
    rng = np.random.default_rng(rng_seed)
    noise = rng.standard_normal(z.shape) + 1j * rng.standard_normal(z.shape)
    return z + np.sqrt(p_noise / 2) * noise
