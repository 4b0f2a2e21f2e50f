"""Matrix-free forward model for dual-resolution interferometry.

The low-resolution acquisition of the second image is modelled as

    z2_low = IDFT_{M,K}( select( DFT_{N,L}( theta * u ) ) )

where ``theta`` is the unit-modulus modulation built from the reference image
and ``u`` is the high-resolution interferogram.  All DFTs are unitary, so the
band-selected operator has orthonormal rows and the sensing operator
``A = M W`` has spectral norm exactly one.

Dense versions are provided for small grids only.  They are assembled from
the matrix-free operators column by column and exist for tests and for
mutual-coherence probes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .wavelets import WaveletConfig, wavelet_analysis, wavelet_synthesis

DENSE_CAP = 4096


@dataclass(frozen=True)
class BandSelection:
    """Retained DFT bins of the common-band lowpass filter.

    ``row_bins`` and ``col_bins`` are listed in the order they occupy in the
    reduced-size spectrum: non-negative frequencies first, then negative
    frequencies, exactly like ``numpy.fft`` output at size ``M`` (``K``).
    """

    row_bins: tuple[int, ...]
    col_bins: tuple[int, ...]
    full_dims: tuple[int, int]

    def __post_init__(self):
        n, l = self.full_dims
        for bins, size, name in ((self.row_bins, n, "row"), (self.col_bins, l, "col")):
            if not bins:
                raise ValueError(f"empty {name} band")
            if min(bins) < 0 or max(bins) >= size:
                raise ValueError(f"{name} bin out of range for size {size}")
            if len(set(bins)) != len(bins):
                raise ValueError(f"duplicate {name} bins")
            if bins[0] != 0:
                raise ValueError(f"{name} band must start at DC")

    @property
    def reduced_dims(self) -> tuple[int, int]:
        return len(self.row_bins), len(self.col_bins)

    @property
    def alpha(self) -> Fraction:
        return Fraction(len(self.row_bins), self.full_dims[0])

    @property
    def beta(self) -> Fraction:
        return Fraction(len(self.col_bins), self.full_dims[1])

    @property
    def is_full(self) -> bool:
        return self.reduced_dims == tuple(self.full_dims)


def _lowpass_bins(size: int, keep: int) -> tuple[int, ...]:
    # Even keep: the +keep/2 edge bin stays, -keep/2 is dropped.
    n_pos = min(keep // 2 + 1, keep)
    n_neg = keep - n_pos
    return tuple(range(n_pos)) + tuple(range(size - n_neg, size))


def _as_fraction(value) -> Fraction:
    if isinstance(value, tuple):
        return Fraction(*value)
    return Fraction(value)


def make_band_selection(full_dims, alpha, beta) -> BandSelection:
    """Build the centred lowpass band keeping ``alpha*N`` x ``beta*L`` bins.

    ``alpha`` and ``beta`` may be ``Fraction``, ints, ``"1/2"`` style strings
    or ``(num, den)`` tuples.  Floats are accepted only if they convert to an
    exact fraction, so prefer the other forms.
    """
    n, l = (int(d) for d in full_dims)
    if n < 1 or l < 1:
        raise ValueError(f"invalid dims {full_dims}")
    keep = []
    for ratio, size, name in ((alpha, n, "alpha"), (beta, l, "beta")):
        frac = _as_fraction(ratio)
        if not 0 < frac <= 1:
            raise ValueError(f"{name}={frac} outside (0, 1]")
        m = frac * size
        if m.denominator != 1:
            raise ValueError(f"{name}={frac} of {size} samples is not an integer ({float(m)})")
        keep.append(int(m))
    return BandSelection(_lowpass_bins(n, keep[0]), _lowpass_bins(l, keep[1]), (n, l))


def modulation_from_reference(z1: np.ndarray, flat_phase: np.ndarray) -> np.ndarray:
    """Unit-modulus modulation exp(j*(phase(z1) + flat_phase)).

    Pixels where ``z1`` is exactly zero contribute phase 0.
    """
    z1 = np.asarray(z1)
    flat_phase = np.asarray(flat_phase, dtype=np.float64)
    if z1.shape != flat_phase.shape:
        raise ValueError(f"shape mismatch: z1 {z1.shape} vs flat_phase {flat_phase.shape}")
    # np.angle(-0.0 + 0j) is pi, not 0
    phase = np.where(z1 == 0, 0.0, np.angle(z1))
    return np.exp(1j * (phase + flat_phase))


def _check_full(arr, theta, band):
    if arr.shape != tuple(band.full_dims) or theta.shape != tuple(band.full_dims):
        raise ValueError(
            f"dimension mismatch: image {arr.shape}, theta {theta.shape}, band {band.full_dims}"
        )


def apply_forward(u: np.ndarray, theta: np.ndarray, band: BandSelection) -> np.ndarray:
    """Apply the dual-resolution forward model to a full-size image ``u``."""
    u = np.asarray(u)
    _check_full(u, theta, band)
    spec = np.fft.fft2(theta * u, norm="ortho")
    sub = spec[np.ix_(band.row_bins, band.col_bins)]
    return np.fft.ifft2(sub, norm="ortho")


def apply_adjoint(y: np.ndarray, theta: np.ndarray, band: BandSelection) -> np.ndarray:
    """Exact adjoint of :func:`apply_forward`."""
    y = np.asarray(y)
    if y.shape != band.reduced_dims:
        raise ValueError(f"expected reduced dims {band.reduced_dims}, got {y.shape}")
    if theta.shape != tuple(band.full_dims):
        raise ValueError(f"theta {theta.shape} does not match band {band.full_dims}")
    spec = np.zeros(band.full_dims, dtype=np.complex128)
    spec[np.ix_(band.row_bins, band.col_bins)] = np.fft.fft2(y, norm="ortho")
    return np.conj(theta) * np.fft.ifft2(spec, norm="ortho")


class SensingOperator:
    """Composition A = M W mapping wavelet coefficients to low-res samples.

    The operator norm is 1 exactly: ``M`` has orthonormal rows and ``W`` is
    orthonormal, so ``A A* = I``.
    """

    norm = 1.0

    def __init__(self, theta: np.ndarray, band: BandSelection, wavelet: WaveletConfig):
        theta = np.asarray(theta, dtype=np.complex128)
        if theta.shape != tuple(band.full_dims):
            raise ValueError(f"theta {theta.shape} does not match band {band.full_dims}")
        wavelet.check_shape(theta.shape)
        self.theta = theta
        self.band = band
        self.wavelet = wavelet

    @property
    def shape(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """(output dims, input dims)."""
        return self.band.reduced_dims, tuple(self.band.full_dims)

    def forward(self, x: np.ndarray) -> np.ndarray:
        return apply_forward(wavelet_synthesis(x, self.wavelet), self.theta, self.band)

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        return wavelet_analysis(apply_adjoint(y, self.theta, self.band), self.wavelet)

    __call__ = forward


def apply_sensing(x, theta, band, cfg: WaveletConfig) -> np.ndarray:
    return SensingOperator(theta, band, cfg).forward(x)


def apply_sensing_adjoint(y, theta, band, cfg: WaveletConfig) -> np.ndarray:
    return SensingOperator(theta, band, cfg).adjoint(y)


def power_iteration(apply_normal, shape, n_iter: int = 100, tol: float = 0.0, seed: int = 0):
    """Largest eigenvalue of a self-adjoint PSD operator ``apply_normal``.

    Starts from a seeded complex Gaussian vector.  Returns ``(eigenvalue, vector)``.
    """
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(n_iter):
        w = apply_normal(v)
        lam_new = float(np.real(np.vdot(v, w)))
        nrm = np.linalg.norm(w)
        if nrm == 0:
            return 0.0, v
        v = w / nrm
        if tol and abs(lam_new - lam) <= tol * abs(lam_new):
            lam = lam_new
            break
        lam = lam_new
    return lam, v


def _dense_from(apply, in_shape, out_size):
    n_in = in_shape[0] * in_shape[1]
    if n_in > DENSE_CAP:
        raise ValueError(f"instance too large for a dense matrix: {n_in} > {DENSE_CAP} columns")
    cols = np.empty((out_size, n_in), dtype=np.complex128)
    basis = np.zeros(n_in, dtype=np.complex128)
    for j in range(n_in):
        basis[j] = 1.0
        # column-major vec, matching vec(U) in the matrix form of the model
        cols[:, j] = apply(basis.reshape(in_shape, order="F")).ravel(order="F")
        basis[j] = 0.0
    return cols


def build_dense_forward(theta: np.ndarray, band: BandSelection) -> np.ndarray:
    """Dense (M*K) x (N*L) forward matrix, column-major vectorisation."""
    m, k = band.reduced_dims
    return _dense_from(lambda u: apply_forward(u, theta, band), band.full_dims, m * k)


def build_dense_sensing(theta: np.ndarray, band: BandSelection, cfg: WaveletConfig) -> np.ndarray:
    """Dense sensing matrix A, columns indexed by column-major coefficient vec."""
    op = SensingOperator(theta, band, cfg)
    m, k = band.reduced_dims
    return _dense_from(op.forward, band.full_dims, m * k)
