"""Calibrate the RRMSE thresholds enforced by the end-to-end acceptance test.

For each resolution ratio, a 32x32 instance of the acceptance scene family
(Gaussian hills, max gradient 1 rad/pixel, Rayleigh speckle, no noise) is
solved to convergence with the dense accelerated proximal-gradient oracle
(10^4 iterations, lambda = 1e-4 on peak-normalised data).  The recovered phase is
scored exactly like ``drifg evaluate``; the mean over seeds is the threshold.

    python scripts/calibrate_thresholds.py  # rewrites tests/calibration.txt
"""

import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from oracles import dense_fista, dense_sensing  # noqa: E402

from drifg import (  # noqa: E402
    FringeSpec,
    decimate,
    form_image_pair,
    generate_scene,
    make_band_selection,
    modulation_from_reference,
    wavelet_synthesis,
    WaveletConfig,
)
from drifg.evaluation import PhaseField, align_constant, rrmse_db, unwrap_ls  # noqa: E402
from drifg.fileio import write_kv  # noqa: E402

SIZE = 32
LEVELS = 3
LAM = 1e-4
ITERS = 10_000
SEEDS = range(5)
FRINGE = FringeSpec(kind="hills", max_gradient=1.0, width=0.15)


def oracle_rrmse(ratio, seed):
    scene = generate_scene((SIZE, SIZE), FRINGE, seed)
    z1, z2 = form_image_pair(scene)
    band = make_band_selection((SIZE, SIZE), ratio, ratio)
    z_low = decimate(z2, band)
    theta = modulation_from_reference(z1, scene.flat_phase)
    a = dense_sensing(theta, band, "db4", LEVELS)
    z = z_low.ravel(order="F")
    peak = np.abs(z).max()
    x = dense_fista(a, z / peak, LAM, ITERS) * peak
    u = wavelet_synthesis(x.reshape(SIZE, SIZE, order="F"), WaveletConfig("db4", LEVELS))
    ref = scene.elevation_phase
    rec = align_constant(unwrap_ls(PhaseField.from_complex(u)), ref)
    return rrmse_db(PhaseField(rec, False), PhaseField(ref, False))


def main():
    out = {}
    for key, ratio in (("half", "1/2"), ("quarter", "1/4")):
        scores = [oracle_rrmse(ratio, s) for s in SEEDS]
        print(ratio, [round(s, 3) for s in scores])
        out[f"T_{key}_db"] = round(float(np.mean(scores)), 3)
    out.update(size=SIZE, levels=LEVELS, lam=LAM, iterations=ITERS, seeds=len(SEEDS))
    write_kv(ROOT / "tests" / "calibration.txt", out)
    print(out)


if __name__ == "__main__":
    main()
