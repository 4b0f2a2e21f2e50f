"""Command-line pipeline: simulate | decimate | recover | evaluate | coherence.

Every command reads a ``key = value`` config (``--config``), optionally
overrides its seed (``--seed``) and writes into ``--out``.  Outputs are
byte-identical across reruns with the same config and seed; wall time is
printed to stdout only.

Exit codes: 0 ok, 2 config error, 3 dimension/format error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .evaluation import (
    PhaseField,
    align_constant,
    coherence_probe,
    conventional_interferogram,
    remove_flat_earth,
    residue_count,
    rrmse_db,
    unwrap_ls,
)
from .fileio import (
    ConfigError,
    FormatError,
    PipelineConfig,
    read_image,
    read_kv,
    write_image,
    write_kv,
    write_phase_pgm,
    write_real_pgm,
)
from .operators import BandSelection, make_band_selection, modulation_from_reference
from .recovery import RecoveryConfig, fista_recover
from .scene_sim import FringeSpec, add_noise, decimate, form_image_pair, generate_scene, wrap
from .wavelets import WaveletConfig

log = logging.getLogger("drifg")

EXIT_OK, EXIT_CONFIG, EXIT_FORMAT, EXIT_NUMERIC = 0, 2, 3, 4


class NumericalError(RuntimeError):
    pass


def _config_echo(cfg: PipelineConfig) -> dict:
    return {f"config.{k}": v for k, v in cfg.to_dict().items()}


def config_from_report(path) -> PipelineConfig:
    """Rebuild the config echoed into a run report."""
    raw = read_kv(path)
    return PipelineConfig.from_dict(
        {k[len("config."):]: v for k, v in raw.items() if k.startswith("config.")}
    )


def _band(cfg: PipelineConfig) -> BandSelection:
    try:
        return make_band_selection((cfg.rows, cfg.cols), cfg.alpha, cfg.beta)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _wavelet(cfg: PipelineConfig, shape=None) -> WaveletConfig:
    try:
        w = WaveletConfig(cfg.wavelet, cfg.wavelet_levels)
        w.check_shape(shape or (cfg.rows, cfg.cols))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return w


def _noise_seed(seed: int) -> int:
    return int(np.random.SeedSequence([seed, 1]).generate_state(1)[0])


def _write_band(path, band: BandSelection):
    write_kv(path, {
        "full_rows": band.full_dims[0],
        "full_cols": band.full_dims[1],
        "reduced_rows": band.reduced_dims[0],
        "reduced_cols": band.reduced_dims[1],
        "alpha": str(band.alpha),
        "beta": str(band.beta),
        "row_bins": list(band.row_bins),
        "col_bins": list(band.col_bins),
    })


def read_band(path) -> BandSelection:
    raw = read_kv(path)
    try:
        band = BandSelection(
            tuple(int(v) for v in raw["row_bins"].split()),
            tuple(int(v) for v in raw["col_bins"].split()),
            (int(raw["full_rows"]), int(raw["full_cols"])),
        )
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{path}: bad band description ({exc})") from None
    if band.reduced_dims != (int(raw["reduced_rows"]), int(raw["reduced_cols"])):
        raise FormatError(f"{path}: reduced dims disagree with bin lists")
    return band


def _in(cfg, out: Path) -> Path:
    return Path(cfg.input_dir) if cfg.input_dir else out


def cmd_simulate(cfg: PipelineConfig, out: Path) -> dict:
    band = _band(cfg)
    try:
        spec = FringeSpec(
            kind=cfg.fringe,
            max_gradient=cfg.fringe_max_gradient,
            count=cfg.fringe_count,
            width=cfg.fringe_width,
            direction=cfg.fringe_direction,
            flat_row=cfg.flat_row,
            flat_col=cfg.flat_col,
        )
        scene = generate_scene(
            (cfg.rows, cfg.cols), spec, cfg.seed,
            amplitude_law=cfg.amplitude_law, sigma=cfg.amplitude_sigma,
            backscatter_depth=cfg.backscatter_depth,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    z1, z2 = form_image_pair(scene)
    try:
        z2 = add_noise(z2, cfg.snr_db, _noise_seed(cfg.seed))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    z2_low = decimate(z2, band)
    theta = modulation_from_reference(z1, scene.flat_phase)

    out.mkdir(parents=True, exist_ok=True)
    write_image(out / "z1.drifg", z1)
    write_image(out / "z2_full.drifg", z2)
    write_image(out / "z2_low.drifg", z2_low)
    write_image(out / "theta.drifg", theta)
    write_image(out / "flat_phase.drifg", scene.flat_phase)
    write_image(out / "truth_elevation_phase.drifg", scene.elevation_phase)
    write_image(out / "truth_speckle_phase.drifg", scene.speckle_phase)
    write_image(out / "truth_amplitude.drifg", scene.amplitude)
    _write_band(out / "band.txt", band)
    report = {
        "command": "simulate",
        "full_dims": [cfg.rows, cfg.cols],
        "reduced_dims": list(band.reduced_dims),
        "elevation_phase_min": float(scene.elevation_phase.min()),
        "elevation_phase_max": float(scene.elevation_phase.max()),
        **_config_echo(cfg),
    }
    write_kv(out / "simulate_report.txt", report)
    return report


def cmd_decimate(cfg: PipelineConfig, out: Path) -> dict:
    src = _in(cfg, out)
    z2 = read_image(src / "z2_full.drifg")
    if z2.shape != (cfg.rows, cfg.cols):
        raise FormatError(f"z2_full is {z2.shape}, config says {(cfg.rows, cfg.cols)}")
    band = _band(cfg)
    out.mkdir(parents=True, exist_ok=True)
    write_image(out / "z2_low.drifg", decimate(z2, band))
    _write_band(out / "band.txt", band)
    report = {"command": "decimate", "reduced_dims": list(band.reduced_dims), **_config_echo(cfg)}
    write_kv(out / "decimate_report.txt", report)
    return report


def cmd_recover(cfg: PipelineConfig, out: Path) -> dict:
    src = _in(cfg, out)
    z2_low = read_image(src / "z2_low.drifg")
    theta = read_image(src / "theta.drifg")
    band = read_band(src / "band.txt")
    if theta.shape != tuple(band.full_dims) or z2_low.shape != band.reduced_dims:
        raise FormatError(
            f"inputs disagree: theta {theta.shape}, z2_low {z2_low.shape}, band {band.full_dims}->{band.reduced_dims}"
        )
    if not (np.all(np.isfinite(z2_low)) and np.all(np.isfinite(theta))):
        raise NumericalError("non-finite samples in recovery input")
    wcfg = _wavelet(cfg, theta.shape)
    try:
        rcfg = RecoveryConfig(cfg.lam, cfg.max_iters, cfg.step, cfg.rel_tol, cfg.normalize_input)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    try:
        u, x, rep = fista_recover(z2_low, theta, band, wcfg, rcfg)
    except FloatingPointError as exc:
        raise NumericalError(str(exc)) from None
    if not np.all(np.isfinite(u)):
        raise NumericalError("recovered interferogram is not finite")

    out.mkdir(parents=True, exist_ok=True)
    write_image(out / "u.drifg", u)
    write_image(out / "x.drifg", x)
    report = {
        "command": "recover",
        "iterations_run": rep.iterations_run,
        "converged": rep.converged,
        "final_objective": rep.objective_trace[-1],
        "final_sparsity": rep.final_sparsity,
        "residual_norm": rep.residual_norm,
        "input_scale": rep.scale,
        "objective_trace": rep.objective_trace,
        **_config_echo(cfg),
    }
    write_kv(out / "recover_report.txt", report)
    return report


def _reference_phase(cfg, src: Path) -> np.ndarray:
    if cfg.reference == "truth":
        return read_image(src / "truth_elevation_phase.drifg")
    ifg = conventional_interferogram(read_image(src / "z1.drifg"), read_image(src / "z2_full.drifg"))
    ifg = remove_flat_earth(ifg, read_image(src / "flat_phase.drifg"))
    return unwrap_ls(PhaseField.from_complex(ifg)).values


def cmd_evaluate(cfg: PipelineConfig, out: Path) -> dict:
    src = _in(cfg, out)
    u = read_image(out / "u.drifg") if (out / "u.drifg").exists() else read_image(src / "u.drifg")
    ref = _reference_phase(cfg, src)
    if ref.shape != u.shape:
        raise FormatError(f"recovered {u.shape} vs reference {ref.shape}")
    if not np.all(np.isfinite(u)):
        raise NumericalError("recovered interferogram is not finite")

    wrapped = PhaseField.from_complex(u)
    n_res = residue_count(wrapped)
    wrapped_err = wrap(wrapped.values - ref)
    rec = align_constant(unwrap_ls(wrapped), ref)
    try:
        score = rrmse_db(PhaseField(rec, False), PhaseField(ref, False))
    except ValueError as exc:
        raise NumericalError(str(exc)) from None

    out.mkdir(parents=True, exist_ok=True)
    write_phase_pgm(out / "phase_recovered_wrapped.pgm", wrapped.values)
    write_phase_pgm(out / "phase_reference_wrapped.pgm", wrap(ref))
    write_real_pgm(out / "phase_recovered_unwrapped.pgm", rec)
    write_real_pgm(out / "phase_reference_unwrapped.pgm", ref)
    report = {
        "command": "evaluate",
        "reference": cfg.reference,
        "rrmse_db": score,
        "wrapped_rms_error_rad": float(np.sqrt(np.mean(wrapped_err ** 2))),
        "wrapped_median_abs_error_rad": float(np.median(np.abs(wrapped_err))),
        "residues": n_res,
        "residues_flagged": n_res > 0,
        **_config_echo(cfg),
    }
    write_kv(out / "evaluate_report.txt", report)
    return report


def cmd_coherence(cfg: PipelineConfig, out: Path) -> dict:
    shape = (cfg.coherence_rows, cfg.coherence_cols)
    try:
        wcfg = WaveletConfig(cfg.wavelet, cfg.coherence_levels)
        wcfg.check_shape(shape)
        stats = coherence_probe(shape, cfg.alpha, cfg.beta, cfg.coherence_draws, cfg.seed, wcfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out.mkdir(parents=True, exist_ok=True)
    report = {"command": "coherence", **stats, **_config_echo(cfg)}
    write_kv(out / "coherence_report.txt", report)
    return report


COMMANDS = {
    "simulate": cmd_simulate,
    "decimate": cmd_decimate,
    "recover": cmd_recover,
    "evaluate": cmd_evaluate,
    "coherence": cmd_coherence,
}

_SUMMARY_KEYS = (
    "rrmse_db", "residues", "iterations_run", "final_objective",
    "random_mean", "constant_theta", "random_smaller", "reduced_dims",
)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="drifg", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", type=Path, help="key = value config file")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = PipelineConfig.load(args.config) if args.config else PipelineConfig()
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
        t0 = time.perf_counter()
        report = COMMANDS[args.command](cfg, args.out)
        elapsed = time.perf_counter() - t0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FormatError, FileNotFoundError) as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (NumericalError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # remaining ValueErrors come from shape checks in the library
        print(f"dimension error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    for key in _SUMMARY_KEYS:
        if key in report:
            print(f"{key} = {report[key]}")
    print(f"wall_time_s = {elapsed:.3f}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
