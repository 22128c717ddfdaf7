"""Command line front end.

Commands: noise-show, ness, sweep, g2tau, spectrum, oracle-check.  All
commands take --config/--preset (merged, file wins key by key), --out for
the output directory, --plot for SVG figures, --threads for the sweep
worker count and --seedless (asserts that no randomness is involved
anywhere; the library contains no RNG, so this always holds).

Exit codes: 0 success, 2 configuration error, 3 physics error (for example
a non-normalizable steady state), 4 numerics error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .config import resolve_config
from .correlations import build_coherence_system, g2_tau, g2_zero, spectrum
from .errors import ConfigError, NumericsError, PhysicsError
from .noise import NoiseComponent, NoiseModel
from .oracle import (build_liouvillian, coherence_band_generator,
                     diagonal_sector, regression_correlator)
from .oscillator import OscillatorModel, choose_truncation
from .output import write_csv, write_json
from .redfield import currents, ness, rate_matrix
from . import svgplot

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_NUMERICS = 4


def _common_flags(parser):
    parser.add_argument("--config", help="TOML configuration file")
    parser.add_argument("--preset", choices=["paper_fig1", "paper_fig3"],
                        help="bundled configuration to start from")
    parser.add_argument("--out", help="output directory (default: out)")
    parser.add_argument("--plot", action="store_true", default=None,
                        help="write SVG figures next to the data files")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker processes for sweeps")
    parser.add_argument("--seedless", action="store_true",
                        help="assert that the run involves no randomness "
                             "(always true; the library has no RNG)")


def _load(args):
    if args.config is None and args.preset is None:
        raise ConfigError("either --config or --preset is required")
    return resolve_config(config_path=args.config, preset=args.preset,
                          out_dir=args.out, plot=args.plot)


def _memory_threshold(noise):
    """Threshold for the memory-time report: √Γ of the weakest wide-band
    detector component, falling back to the weakest quantum component."""
    flats = [c.gamma for c in noise.components if c.kind == "flat" and c.gamma > 0]
    if flats:
        return float(np.sqrt(min(flats)))
    quantum = [c.gamma for c in noise.quantum_components if c.gamma > 0]
    if quantum:
        return float(np.sqrt(min(quantum)))
    raise PhysicsError("no quantum noise component; memory-time threshold "
                       "is undefined")


def cmd_noise_show(args):
    cfg = _load(args)
    noise = cfg.noise
    grid = np.geomspace(noise.omega_min, noise.omega_max, 400)
    ws, wa = noise.eval_total(grid)
    write_csv(cfg.out_dir / "noise_spectra.csv", ("omega", "w_s_tot", "w_a_tot"),
              zip(grid, ws, wa), cfg.config_hash)

    step = cfg.numerics["memory_step"]
    horizon = cfg.numerics["memory_horizon"]
    t_grid = np.arange(0.0, horizon + 0.5 * step, step)
    mag = noise.correlation_magnitude_scan(t_grid)
    write_csv(cfg.out_dir / "noise_correlation.csv", ("t", "abs_c"),
              zip(t_grid, mag), cfg.config_hash)

    try:
        threshold = _memory_threshold(noise)
    except PhysicsError:
        # purely classical noise: the weak-coupling threshold scale is
        # undefined, but the spectra and correlation exports are still useful
        write_json(cfg.out_dir / "memory_time.json",
                   {"tau_memory": None, "threshold": None,
                    "reason": "no quantum noise component"}, cfg.config_hash)
        print("tau_memory undefined: no quantum noise component")
        threshold = None
    if threshold is not None:
        tau_memory = noise.memory_time(threshold, step=step, horizon=horizon)
        write_json(cfg.out_dir / "memory_time.json",
                   {"tau_memory": tau_memory, "threshold": threshold,
                    "abs_c0": float(mag[0]), "horizon": horizon, "step": step},
                   cfg.config_hash)
        print(f"tau_memory = {tau_memory:g} at threshold {threshold:g}")
    if cfg.plot:
        svgplot.save(cfg.out_dir / "noise_spectra.svg", svgplot.line_plot(
            [("W_S", grid, ws), ("W_A", grid, wa)],
            xlabel="omega", ylabel="W(omega)", title="total noise spectra",
            xlog=True, ylog=True))
        corr_series = [("|C(t)|", t_grid, mag)]
        if threshold is not None:
            corr_series.append(("threshold", t_grid,
                                np.full_like(t_grid, threshold)))
        svgplot.save(cfg.out_dir / "noise_correlation.svg", svgplot.line_plot(
            corr_series, xlabel="t", ylabel="|C(t)|",
            title="bath correlation decay", ylog=True))
    return EXIT_OK


def _steady_state_summary(cfg):
    model, noise = cfg.oscillator, cfg.noise
    n_max = model.n_max
    if n_max is None:
        n_max = choose_truncation(model, noise,
                                  tail_tol=cfg.numerics["tail_tol"],
                                  cap=cfg.numerics["n_max_cap"])
    dist = ness(model, noise, n_max=n_max)
    report = currents(model, noise, dist)
    return n_max, dist, report


def cmd_ness(args):
    cfg = _load(args)
    n_max, dist, report = _steady_state_summary(cfg)
    write_csv(cfg.out_dir / "populations.csv", ("n", "rho"),
              zip(range(n_max + 1), dist.rho), cfg.config_hash)
    summary = {
        "mean_n": dist.mean_n(),
        "g2_0": g2_zero(dist),
        "i_cl": report.i_classical,
        "i_q": report.i_phonon,
        "i_d": report.i_detector,
        "i_d_closed_form": report.detector_closed_form,
        "n_max": n_max,
        "chi_over_omega": cfg.oscillator.chi_over_omega,
    }
    write_json(cfg.out_dir / "ness_summary.json", summary, cfg.config_hash)
    print(f"mean_n = {summary['mean_n']:.6g}  g2_0 = {summary['g2_0']:.6g}  "
          f"n_max = {n_max}")
    if cfg.plot:
        svgplot.save(cfg.out_dir / "populations.svg", svgplot.line_plot(
            [("rho_n", np.arange(n_max + 1), dist.rho)],
            xlabel="n", ylabel="rho_n", title="steady-state populations",
            ylog=True))
    return EXIT_OK


def _axis(spec_triple, spacing):
    lo, hi, num = spec_triple
    num = int(num)
    if num < 1 or hi < lo:
        raise ConfigError("axis ranges need MIN <= MAX and at least 1 point")
    if num == 1:
        return np.array([float(lo)])
    if spacing == "log":
        if lo <= 0:
            raise ConfigError("log-spaced axis needs positive bounds")
        return np.geomspace(float(lo), float(hi), num)
    return np.linspace(float(lo), float(hi), num)


def _sweep_cell(payload):
    """One (χ, Ω) cell; must stay a plain top-level function so worker
    processes can import it."""
    import warnings as _warnings
    noise_parts, cutoffs, numerics, chi, omega = payload
    noise = NoiseModel(components=tuple(_component_from_dict(d) for d in noise_parts),
                       omega_min=cutoffs[0], omega_max=cutoffs[1])
    try:
        with _warnings.catch_warnings(record=True) as caught:
            _warnings.simplefilter("always")
            model = OscillatorModel(omega=omega, chi=chi)
            n_max = choose_truncation(model, noise,
                                      tail_tol=numerics["tail_tol"],
                                      cap=numerics["n_max_cap"])
            dist = ness(model, noise, n_max=n_max)
            report = currents(model, noise, dist)
        status = "ok" if not caught else "ok;truncated-at-support"
        return {"chi": chi, "omega": omega, "mean_n": dist.mean_n(),
                "g2_0": g2_zero(dist), "i_cl": report.i_classical,
                "i_q": report.i_phonon, "i_d": report.i_detector,
                "n_max": n_max, "status": status}
    except (PhysicsError, NumericsError, ValueError) as exc:
        return {"chi": chi, "omega": omega, "mean_n": float("nan"),
                "g2_0": float("nan"), "i_cl": float("nan"),
                "i_q": float("nan"), "i_d": float("nan"), "n_max": 0,
                "status": f"error: {exc}"}


def _component_from_dict(d):
    return NoiseComponent(**d)


def _component_to_dict(comp):
    out = {"kind": comp.kind, "gamma": comp.gamma}
    if comp.s is not None:
        out["s"] = comp.s
    if comp.beta is not None:
        out["beta"] = comp.beta
    if comp.table is not None:
        out["table"] = comp.table
    return out


def cmd_sweep(args):
    cfg = _load(args)
    chis = _axis(args.chi, args.spacing)
    omegas = _axis(args.omega, args.spacing)
    noise_parts = tuple(_component_to_dict(c) for c in cfg.noise.components)
    cutoffs = (cfg.noise.omega_min, cfg.noise.omega_max)
    cells = [(noise_parts, cutoffs, cfg.numerics, chi, omega)
             for chi in chis for omega in omegas]
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(_sweep_cell, cells, chunksize=8))
    else:
        results = [_sweep_cell(cell) for cell in cells]

    columns = ("chi", "omega", "mean_n", "g2_0", "i_cl", "i_q", "i_d",
               "n_max", "status")
    rows = [tuple(r[c] for c in columns) for r in results]
    write_csv(cfg.out_dir / "sweep.csv", columns, rows, cfg.config_hash)
    n_err = sum(1 for r in results if r["status"] != "ok")
    write_json(cfg.out_dir / "sweep_summary.json",
               {"chi_axis": chis, "omega_axis": omegas,
                "cells": len(results), "errors": n_err},
               cfg.config_hash)
    print(f"sweep: {len(results)} cells, {n_err} errors")
    if cfg.plot:
        g2 = np.array([r["g2_0"] for r in results]).reshape(len(chis), len(omegas))
        svgplot.save(cfg.out_dir / "sweep_g2.svg", svgplot.heat_map(
            chis, omegas, g2.T, xlabel="chi", ylabel="omega",
            title="g2(0) with g2(0)=1 contour",
            xlog=(args.spacing == "log"), ylog=(args.spacing == "log"),
            contour_level=1.0))
    return EXIT_OK


def cmd_g2tau(args):
    cfg = _load(args)
    n_max, dist, _ = _steady_state_summary(cfg)
    tau = np.linspace(0.0, args.tau_max, args.steps)
    threshold = _memory_threshold(cfg.noise)
    tau_memory = cfg.noise.memory_time(threshold,
                                       step=cfg.numerics["memory_step"],
                                       horizon=cfg.numerics["memory_horizon"])
    series = g2_tau(cfg.oscillator, cfg.noise, dist, tau, tau_memory=tau_memory)
    write_csv(cfg.out_dir / "g2tau.csv", ("tau", "g2", "valid"),
              zip(series.tau, series.values, series.valid), cfg.config_hash)
    print(f"g2(0) = {series.values[0]:.6g}  g2({args.tau_max:g}) = "
          f"{series.values[-1]:.6g}  tau_memory = {tau_memory:g}")
    if cfg.plot:
        svgplot.save(cfg.out_dir / "g2tau.svg", svgplot.line_plot(
            [("g2(tau)", series.tau, np.real(series.values))],
            xlabel="tau", ylabel="g2", title="delayed intensity correlation"))
    return EXIT_OK


def cmd_spectrum(args):
    cfg = _load(args)
    n_max, dist, _ = _steady_state_summary(cfg)
    lo = args.wmin if args.wmin is not None else cfg.noise.omega_min
    hi = args.wmax if args.wmax is not None else cfg.noise.omega_max
    if not lo < hi:
        raise ConfigError("spectrum window needs wmin < wmax")
    grid = np.linspace(lo, hi, args.points)
    result = spectrum(cfg.oscillator, cfg.noise, dist, omega_grid=grid,
                      n_max=n_max)
    write_csv(cfg.out_dir / "spectrum.csv", ("omega", "s"),
              zip(result.omega, result.s), cfg.config_hash)
    write_json(cfg.out_dir / "spectrum_summary.json", {
        "sum_rule_integral": result.sum_rule_integral,
        "mean_n": result.mean_occupation,
        "sum_rule_ratio": result.sum_rule_integral / result.mean_occupation,
        "method": result.method,
        "modes_stable": result.modes_stable,
        "peaks": [{"position": p.position, "height": p.height,
                   "fwhm": p.fwhm} for p in result.peaks],
    }, cfg.config_hash)
    print(f"sum rule: {result.sum_rule_integral:.6g} vs mean_n "
          f"{result.mean_occupation:.6g}; {len(result.peaks)} peaks "
          f"({result.method})")
    if cfg.plot:
        svgplot.save(cfg.out_dir / "spectrum.svg", svgplot.line_plot(
            [("S(omega)", result.omega, result.s)],
            xlabel="omega", ylabel="S", title="emission spectrum", ylog=True))
    return EXIT_OK


def cmd_oracle_check(args):
    cfg = _load(args)
    model, noise = cfg.oscillator, cfg.noise
    n_max = args.n_max
    lio = build_liouvillian(model, noise, n_max=n_max)
    checks = []

    def record(name, err, tol):
        checks.append({"check": name, "max_abs_err": float(err),
                       "tolerance": tol, "passed": bool(err <= tol)})

    gen = rate_matrix(model, noise, n_max=n_max, coeffs=lio.coeffs)
    record("diagonal_sector_matches_rate_matrix",
           np.max(np.abs(diagonal_sector(lio) - gen)), 1e-12)

    system = build_coherence_system(model, noise, n_max, coeffs=lio.coeffs)
    record("coherence_band_matches_reduced_system",
           np.max(np.abs(coherence_band_generator(lio) - system.m)), 1e-10)

    ones = np.eye(n_max + 1).reshape(-1)
    record("trace_preservation", np.max(np.abs(ones @ lio.matrix)), 1e-12)

    dist = ness(model, noise, n_max=n_max)
    ss = lio.steady_state()
    record("steady_state_matches_product_formula",
           np.max(np.abs(np.diag(ss).real - dist.rho)), 1e-8)
    record("steady_state_coherences_vanish",
           np.max(np.abs(ss - np.diag(np.diag(ss)))), 1e-10)

    tau = np.linspace(0.0, 5.0 / max(dist.rho @ lio.coeffs.d, 1e-6), 12)
    g2_red = g2_tau(model, noise, dist, tau)
    g2_orc = regression_correlator(lio, dist.rho, "a", "adag", "n", tau,
                                   leak_tol=None).real / dist.mean_n() ** 2
    record("g2_regression_matches_oracle",
           np.max(np.abs(g2_red.values - g2_orc)), 1e-8)

    from .correlations import g1_tau
    g1_red = g1_tau(model, noise, dist, tau, system=system)
    g1_orc = regression_correlator(lio, dist.rho, "identity", "adag", "a",
                                   tau, leak_tol=None)
    scale = max(np.max(np.abs(g1_orc)), 1e-300)
    record("g1_regression_matches_oracle",
           np.max(np.abs(g1_red.values - g1_orc)) / scale, 1e-6)

    all_pass = all(c["passed"] for c in checks)
    write_json(cfg.out_dir / "oracle_check.json",
               {"n_max": n_max, "all_passed": all_pass, "checks": checks},
               cfg.config_hash)
    for c in checks:
        status = "pass" if c["passed"] else "FAIL"
        print(f"{status}  {c['check']}  (err {c['max_abs_err']:.2e}, "
              f"tol {c['tolerance']:g})")
    return EXIT_OK if all_pass else EXIT_NUMERICS


def build_parser():
    parser = argparse.ArgumentParser(
        prog="noisykerr",
        description="Steady states and photon statistics of a noisy "
                    "nonlinear oscillator")
    parser.add_argument("--version", action="version",
                        version=f"noisykerr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("noise-show", help="export noise spectra, correlation "
                                          "decay and the memory time")
    _common_flags(p)
    p.set_defaults(handler=cmd_noise_show)

    p = sub.add_parser("ness", help="steady-state populations, currents and g2(0)")
    _common_flags(p)
    p.set_defaults(handler=cmd_ness)

    p = sub.add_parser("sweep", help="grid sweep over chi and omega")
    _common_flags(p)
    p.add_argument("--chi", nargs=3, type=float, metavar=("MIN", "MAX", "N"),
                   default=(0.1, 10.0, 20))
    p.add_argument("--omega", nargs=3, type=float, metavar=("MIN", "MAX", "N"),
                   default=(0.1, 10.0, 20))
    p.add_argument("--spacing", choices=["linear", "log"], default="linear")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("g2tau", help="delayed intensity correlation g2(tau)")
    _common_flags(p)
    p.add_argument("--tau-max", type=float, default=1000.0)
    p.add_argument("--steps", type=int, default=256)
    p.set_defaults(handler=cmd_g2tau)

    p = sub.add_parser("spectrum", help="emission spectrum S(omega)")
    _common_flags(p)
    p.add_argument("--wmin", type=float, default=None)
    p.add_argument("--wmax", type=float, default=None)
    p.add_argument("--points", type=int, default=2000)
    p.set_defaults(handler=cmd_spectrum)

    p = sub.add_parser("oracle-check", help="validate the reduced equations "
                                            "against the dense generator")
    _common_flags(p)
    p.add_argument("--n-max", type=int, default=6)
    p.set_defaults(handler=cmd_oracle_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsError as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except NumericsError as exc:
        print(f"numerics error: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
