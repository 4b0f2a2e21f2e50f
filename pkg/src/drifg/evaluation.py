"""Scoring and diagnostics: RRMSE, interferograms, unwrapping, coherence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn
from scipy.ndimage import uniform_filter

from .operators import build_dense_sensing, make_band_selection
from .scene_sim import wrap
from .wavelets import WaveletConfig

RRMSE_FLOOR_DB = -300.0


@dataclass(frozen=True)
class PhaseField:
    values: np.ndarray
    wrapped: bool

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError(f"phase field must be 2-D, got shape {v.shape}")
        if self.wrapped and (np.any(v <= -np.pi) or np.any(v > np.pi)):
            raise ValueError("wrapped phase outside (-pi, pi]")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_complex(cls, z) -> "PhaseField":
        return cls(wrap(np.angle(z)), wrapped=True)


def conventional_interferogram(z1, z2) -> np.ndarray:
    z1, z2 = np.asarray(z1), np.asarray(z2)
    if z1.shape != z2.shape:
        raise ValueError(f"shape mismatch {z1.shape} vs {z2.shape}")
    return np.conj(z1) * z2


def remove_flat_earth(ifg, flat_phase) -> np.ndarray:
    ifg, flat_phase = np.asarray(ifg), np.asarray(flat_phase)
    if ifg.shape != flat_phase.shape:
        raise ValueError(f"shape mismatch {ifg.shape} vs {flat_phase.shape}")
    return ifg * np.exp(-1j * flat_phase)


def rrmse_db(rec: PhaseField, ref: PhaseField) -> float:
    """10*log10( sum (rec - ref)^2 / sum ref^2 ), floored at -300 dB."""
    a, b = _values(rec), _values(ref)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    den = np.sum(b * b)
    if den == 0:
        raise ValueError("reference phase is identically zero")
    num = np.sum((a - b) ** 2)
    if num == 0:
        return RRMSE_FLOOR_DB
    return max(float(10 * np.log10(num / den)), RRMSE_FLOOR_DB)


def _values(p):
    return p.values if isinstance(p, PhaseField) else np.asarray(p, dtype=np.float64)


def residues(wrapped) -> np.ndarray:
    """Signed residue charge (+1/-1/0) of every 2x2 loop, shape (N-1, L-1)."""
    p = _values(wrapped)
    d_right = wrap(np.diff(p, axis=1))
    d_down = wrap(np.diff(p, axis=0))
    loop = d_right[:-1, :] + d_down[:, 1:] - d_right[1:, :] - d_down[:, :-1]
    return np.rint(loop / (2 * np.pi)).astype(int)


def residue_count(wrapped) -> int:
    return int(np.count_nonzero(residues(wrapped)))


def unwrap_ls(wrapped: PhaseField) -> PhaseField:
    """Unweighted least-squares unwrapping via a DCT Poisson solve.

    The additive constant is chosen so the result rewraps onto the input
    (circular mean of the mismatch is zero), then moved by a multiple of 2*pi
    so its mean is as close as possible to that of the wrapped input.  Residues are not handled specially; check
    :func:`residue_count` when the input may contain them.
    """
    if isinstance(wrapped, PhaseField) and not wrapped.wrapped:
        raise ValueError("unwrap_ls expects a wrapped phase field")
    psi = _values(wrapped)
    n, l = psi.shape
    if n * l < 2:
        raise ValueError("cannot unwrap a single pixel")

    dx = np.zeros((n, l + 1))
    dy = np.zeros((n + 1, l))
    dx[:, 1:-1] = wrap(np.diff(psi, axis=1))
    dy[1:-1, :] = wrap(np.diff(psi, axis=0))
    # Neumann boundary: zero gradient outside the grid
    rho = np.diff(dx, axis=1) + np.diff(dy, axis=0)

    rho_hat = dctn(rho, type=2, norm="ortho")
    i = np.arange(n)[:, None]
    j = np.arange(l)[None, :]
    denom = 2 * np.cos(np.pi * i / n) + 2 * np.cos(np.pi * j / l) - 4
    denom[0, 0] = 1.0
    phi_hat = rho_hat / denom
    phi_hat[0, 0] = 0.0
    phi = idctn(phi_hat, type=2, norm="ortho")
    phi += np.angle(np.exp(1j * (psi - phi)).sum())
    phi += 2 * np.pi * np.rint((psi.mean() - phi.mean()) / (2 * np.pi))
    return PhaseField(phi, wrapped=False)


def align_constant(unwrapped, reference) -> np.ndarray:
    """Shift ``unwrapped`` by the multiple of 2*pi that best matches ``reference`` in mean."""
    a, b = _values(unwrapped), _values(reference)
    k = np.rint(np.mean(b - a) / (2 * np.pi))
    return a + 2 * np.pi * k


def mutual_coherence(dense_a: np.ndarray) -> float:
    """Largest normalised inner product between distinct columns."""
    a = np.asarray(dense_a)
    if a.ndim != 2 or a.shape[1] < 2:
        raise ValueError("need a 2-D matrix with at least two columns")
    norms = np.linalg.norm(a, axis=0)
    if np.any(norms <= 1e-12 * norms.max()):
        raise ValueError("matrix has a zero column")
    a = a / norms
    gram = np.abs(a.conj().T @ a)
    np.fill_diagonal(gram, 0.0)
    return float(min(gram.max(), 1.0))


def coherence_probe(
    size=(8, 8),
    alpha="1/2",
    beta="1/2",
    draws: int = 50,
    seed: int = 0,
    wavelet: WaveletConfig | None = None,
) -> dict:
    """Monte-Carlo mutual coherence of A with speckle-random vs constant modulation."""
    wavelet = wavelet or WaveletConfig(levels=1)
    band = make_band_selection(size, alpha, beta)
    fixed = mutual_coherence(build_dense_sensing(np.ones(size, dtype=complex), band, wavelet))
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(draws):
        theta = np.exp(1j * (np.pi - rng.uniform(0, 2 * np.pi, size=size)))
        values.append(mutual_coherence(build_dense_sensing(theta, band, wavelet)))
    values = np.array(values)
    return {
        "rows": size[0],
        "cols": size[1],
        "alpha": str(band.alpha),
        "beta": str(band.beta),
        "measurements": band.reduced_dims[0] * band.reduced_dims[1],
        "unknowns": size[0] * size[1],
        "draws": draws,
        "random_mean": float(values.mean()),
        "random_std": float(values.std()),
        "random_min": float(values.min()),
        "random_max": float(values.max()),
        "constant_theta": fixed,
        "welch_bound": _welch_bound(band.reduced_dims[0] * band.reduced_dims[1], size[0] * size[1]),
        "random_smaller": bool(values.mean() < fixed),
    }


def _welch_bound(m, n):
    return float(np.sqrt((n - m) / (m * (n - 1)))) if n > 1 else 0.0


def coherence_map(z1, z2, window: int = 5) -> np.ndarray:
    """Boxcar sample coherence |<z1* z2>| / sqrt(<|z1|^2> <|z2|^2>)."""
    z1, z2 = np.asarray(z1), np.asarray(z2)
    if z1.shape != z2.shape:
        raise ValueError(f"shape mismatch {z1.shape} vs {z2.shape}")
    if window < 1:
        raise ValueError("window must be >= 1")
    cross = np.conj(z1) * z2
    num = uniform_filter(cross.real, window) + 1j * uniform_filter(cross.imag, window)
    p1 = uniform_filter(np.abs(z1) ** 2, window)
    p2 = uniform_filter(np.abs(z2) ** 2, window)
    den = np.sqrt(p1 * p2)
    if np.any(den <= 0):
        raise ValueError("zero power inside a coherence window")
    return np.clip(np.abs(num) / den, 0.0, 1.0)
