import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from conftest import crandn
from drifg import FringeSpec, add_noise, decimate, form_image_pair, generate_scene, make_band_selection, wrap
from drifg.scene_sim import SceneTruth
from oracles import dense_forward

ZERO = FringeSpec(kind="none", flat_col=0.0)


def test_zero_scene():
    scene = generate_scene((8, 8), ZERO, 1, amplitude_law="constant", sigma=1.0)
    assert np.array_equal(scene.elevation_phase, np.zeros((8, 8)))
    assert np.array_equal(scene.amplitude, np.ones((8, 8)))
    z1, z2 = form_image_pair(scene)
    assert np.array_equal(z1, z2)


def test_deterministic():
    a = generate_scene((256, 256), FringeSpec(), 7)
    b = generate_scene((256, 256), FringeSpec(), 7)
    for fa, fb in zip(a.fields(), b.fields()):
        assert fa.tobytes() == fb.tobytes()
    c = generate_scene((256, 256), FringeSpec(), 8)
    assert not np.array_equal(a.speckle_phase, c.speckle_phase)


def test_speckle_uniform_ks():
    scene = generate_scene((400, 400), FringeSpec(), 3)
    phase = scene.speckle_phase.ravel()
    assert phase.size >= 100_000
    assert phase.min() > -np.pi and phase.max() <= np.pi
    assert stats.kstest(phase, stats.uniform(loc=-np.pi, scale=2 * np.pi).cdf).pvalue > 0.01


def test_rayleigh_amplitude():
    scene = generate_scene((300, 300), FringeSpec(), 5, sigma=2.0)
    assert stats.kstest(scene.amplitude.ravel(), stats.rayleigh(scale=2.0).cdf).pvalue > 0.01


@pytest.mark.parametrize("kind", ["ramp", "hills", "cone"])
@pytest.mark.parametrize("gradient", [0.25, 1.0])
def test_fringe_gradient_bound(kind, gradient):
    scene = generate_scene((128, 96), FringeSpec(kind=kind, max_gradient=gradient), 2)
    phi = scene.elevation_phase
    steps = np.concatenate([np.abs(np.diff(phi, axis=0)).ravel(), np.abs(np.diff(phi, axis=1)).ravel()])
    assert steps.max() <= gradient * (1 + 1e-9)
    assert steps.max() >= 0.5 * gradient


def test_backscatter_modulation():
    plain = generate_scene((32, 32), FringeSpec(), 1, amplitude_law="constant")
    mod = generate_scene((32, 32), FringeSpec(), 1, amplitude_law="constant", backscatter_depth=0.5)
    assert mod.amplitude.min() == pytest.approx(0.5) and mod.amplitude.max() == pytest.approx(1.5)
    assert np.array_equal(plain.elevation_phase, mod.elevation_phase)


def test_invalid_scene_inputs():
    with pytest.raises(ValueError):
        generate_scene((0, 8), FringeSpec(), 0)
    with pytest.raises(ValueError):
        generate_scene((8, 8), FringeSpec(max_gradient=np.inf), 0)
    with pytest.raises(ValueError):
        FringeSpec(kind="volcano")
    with pytest.raises(ValueError):
        SceneTruth(np.zeros((2, 2)), np.zeros((2, 2)), np.full((2, 2), -np.pi), np.ones((2, 2)))
    with pytest.raises(ValueError):
        SceneTruth(np.zeros((2, 2)), np.zeros((2, 3)), np.zeros((2, 2)), np.ones((2, 2)))


def test_pair_full_correlation():
    scene = generate_scene((16, 16), FringeSpec(max_gradient=1.0, flat_col=0.7), 3)
    z1, z2 = form_image_pair(scene)
    assert np.max(np.abs(np.abs(z1) - scene.amplitude)) <= 1e-14
    assert np.max(np.abs(np.abs(z2) - scene.amplitude)) <= 1e-14
    mask = scene.amplitude > 0
    err = wrap(np.angle(np.conj(z1) * z2) - wrap(scene.flat_phase + scene.elevation_phase))
    assert np.max(np.abs(err[mask])) <= 1e-12


def test_wrap_convention():
    x = np.array([np.pi, -np.pi, 3 * np.pi, 0.0, -0.5, 7.0])
    w = wrap(x)
    assert np.all(w > -np.pi) and np.all(w <= np.pi)
    assert w[0] == pytest.approx(np.pi) and w[1] == pytest.approx(np.pi, abs=1e-12)
    assert w[5] == pytest.approx(7.0 - 2 * np.pi)


def test_decimate_full_band_identity(rng):
    z = crandn(rng, (12, 10))
    out = decimate(z, make_band_selection((12, 10), 1, 1))
    assert np.linalg.norm(out - z) <= 1e-12 * np.linalg.norm(z)


@pytest.mark.parametrize("shape,alpha,beta", [((8, 8), "1/2", "1/2"), ((12, 10), "1/3", "1/5"), ((16, 4), "1/4", "1")])
def test_decimate_constant(shape, alpha, beta):
    c = 1.5 - 0.5j
    band = make_band_selection(shape, alpha, beta)
    out = decimate(np.full(shape, c), band)
    # brute-force DFTs: DC bin of the big unitary DFT, then small unitary inverse
    n, l = shape
    m, k = band.reduced_dims
    dc = sum(c for _ in range(n * l)) / np.sqrt(n * l)
    expected = dc / np.sqrt(m * k)
    assert expected == pytest.approx(c * np.sqrt(n * l / (m * k)))
    assert np.max(np.abs(out - expected)) <= 1e-12


def test_decimate_matches_dense_oracle(rng):
    band = make_band_selection((8, 8), "1/2", "1/2")
    z = crandn(rng, (8, 8))
    dense = dense_forward(np.ones((8, 8)), band)
    got = decimate(z, band).ravel(order="F")
    assert np.max(np.abs(got - dense @ z.ravel(order="F"))) <= 1e-12


def test_decimate_band_mismatch():
    with pytest.raises(ValueError):
        decimate(np.ones((8, 6)), make_band_selection((8, 8), "1/2", "1/2"))


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31), a=st.floats(-5, 5), b=st.floats(-5, 5))
def test_decimate_linear(seed, a, b):
    rng = np.random.default_rng(seed)
    band = make_band_selection((16, 12), "1/4", "1/3")
    x, y = crandn(rng, (16, 12)), crandn(rng, (16, 12))
    lhs = decimate(a * x + b * y, band)
    rhs = a * decimate(x, band) + b * decimate(y, band)
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * (abs(a) + abs(b) + 1) * (np.linalg.norm(x) + np.linalg.norm(y))


def test_noise_disabled(rng):
    z = crandn(rng, (8, 8))
    assert np.array_equal(add_noise(z, np.inf, 3), z)


@pytest.mark.parametrize("snr", [-5.0, 0.0, 10.0, 30.0])
def test_noise_snr(rng, snr):
    z = crandn(rng, (256, 256)) * 3
    noisy = add_noise(z, snr, 11)
    measured = 10 * np.log10(np.mean(np.abs(z) ** 2) / np.mean(np.abs(noisy - z) ** 2))
    assert abs(measured - snr) <= 0.2


def test_noise_deterministic(rng):
    z = crandn(rng, (32, 32))
    assert add_noise(z, 5.0, 4).tobytes() == add_noise(z, 5.0, 4).tobytes()
    with pytest.raises(ValueError):
        add_noise(z, np.nan, 0)
