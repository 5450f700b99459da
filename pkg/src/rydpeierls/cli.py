"""Command-line front end.

Subcommands: ``simulate``, ``scan-gamma``, ``flux`` and ``anyon-check``.
Exit codes: 0 success, 1 configuration error, 2 failed numerical check.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__, _backend, anyon, peierls
from .config import ConfigError, RunConfig, load_config
from .dynamics import imbalance, pattern_index
from .experiment import ExperimentConfig, run_monte_carlo, simulate_ideal
from .geometry import isosceles

EXIT_OK, EXIT_CONFIG, EXIT_CHECK = 0, 1, 2

log = logging.getLogger("rydpeierls")


def _num(x) -> str:
    x = float(x)
    return "nan" if math.isnan(x) else repr(x)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _header(cfg: RunConfig, command: str, info: dict | None = None) -> list[str]:
    lines = [f"## rydpeierls {__version__} {command}"]
    for key, value in (info or {}).items():
        lines.append(f"## {key} = {value}")
    lines += ["# " + line for line in cfg.to_text().splitlines()]
    return lines


def _emit(args, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if args.out:
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr if not args.out else sys.stdout)


def _experiment(cfg: RunConfig, layout, excited, times) -> ExperimentConfig:
    try:
        return ExperimentConfig(layout, cfg.params(), excited, times, cfg.noise(), cfg["model"]["vdw"])
    except ValueError as exc:
        raise ConfigError(cfg.path, None, str(exc)) from None


def _measure(cfg: RunConfig, exp: ExperimentConfig):
    """(MeasuredProbabilities, aborted shot count)."""
    if not cfg.monte_carlo:
        return simulate_ideal(exp), 0
    result = run_monte_carlo(exp, workers=cfg["run"]["workers"])
    return result.measured, result.n_aborted


def cmd_simulate(cfg: RunConfig, args) -> int:
    layout = cfg.layout()
    excited = cfg.excited(layout.n_sites)
    times = cfg.times()
    patterns = cfg.report_patterns(layout.n_sites)
    measured, aborted = _measure(cfg, _experiment(cfg, layout, excited, times))

    columns = [measured.probs[:, pattern_index(p)] for p in patterns]
    chosen = {pattern_index(p) for p in patterns}
    other = measured.probs[:, [k for k in range(measured.probs.shape[1]) if k not in chosen]].sum(axis=1)
    errors = [measured.error(p) for p in patterns]
    single = measured.single_site()
    total = single.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        com = np.where(total[:, None] > 0, single @ layout.positions / np.where(total > 0, total, 1.0)[:, None], np.nan)

    names = ["time_us"] + [f"p{p}" for p in patterns] + ["p_other"] + [f"sem_p{p}" for p in patterns] + ["xbar_um", "ybar_um"]
    lines = _header(cfg, "simulate", {"aborted_shots": aborted})
    lines.append(",".join(names))
    for k, t in enumerate(times):
        row = [t] + [c[k] for c in columns] + [other[k]] + [e[k] for e in errors] + [com[k, 0], com[k, 1]]
        lines.append(",".join(_num(v) for v in row))
    _emit(args, lines)

    if args.plot:
        _plot_simulation(args.out, times, patterns, columns, errors)
    mode = f"monte carlo, {cfg['noise']['n_samples']} shots, {aborted} aborted" if cfg.monte_carlo else "noise-free"
    _say(args, f"simulate: {layout.n_sites} sites, {len(times)} time points ({mode}, kernels: {_backend.BACKEND})")
    return EXIT_OK


def _plot_simulation(out, times, patterns, columns, errors) -> None:
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        log.warning("matplotlib is not installed; skipping the plot")
        return
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for p, c, e in zip(patterns, columns, errors):
        ax.plot(times, c, label=f"P{p}")
        if np.any(e > 0):
            ax.fill_between(times, c - e, c + e, alpha=0.25)
    ax.set_xlabel("time (us)")
    ax.set_ylabel("probability")
    ax.legend(frameon=False)
    fig.tight_layout()
    target = (os.path.splitext(out)[0] if out else "simulate") + ".svg"
    fig.savefig(target, format="svg")
    plt.close(fig)


def gamma_grid(scan: dict) -> np.ndarray:
    start, stop, step = scan["gamma_start"], scan["gamma_stop"], scan["gamma_step"]
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(max(n, 0))


def cmd_scan_gamma(cfg: RunConfig, args) -> int:
    cfg.require_nonzero_mu()
    scan = cfg["scan"]
    params = cfg.params()
    gammas = gamma_grid(scan)
    if gammas.size == 0:
        raise cfg.error("scan", "gamma_stop", "must not be smaller than gamma_start")
    times = np.array([scan["tau"]])
    excited = (scan["excited"] - 1,)

    lines = _header(cfg, "scan-gamma")
    lines.append("gamma_deg,flux_rad,phase_12_rad,phase_23_rad,phase_31_rad,p100,p001,imbalance")
    total_aborted = 0
    imb = []
    for gamma in gammas:
        report = peierls.isosceles_fluxes(float(gamma), params)
        exp = _experiment(cfg, isosceles(float(gamma), scan["r"]), excited, times)
        measured, aborted = _measure(cfg, exp)
        total_aborted += aborted
        p100, p001 = measured["100"][0], measured["001"][0]
        value = imbalance(p100, p001)
        imb.append(value)
        row = [gamma, report.total_flux, *report.bond_phases, p100, p001, value]
        lines.append(",".join(_num(v) for v in row))
    lines.insert(1, f"## aborted_shots = {total_aborted}")
    _emit(args, lines)

    imb = np.asarray(imb)
    flips = [gammas[k + 1] for k in range(len(imb) - 1) if np.sign(imb[k]) * np.sign(imb[k + 1]) < 0]
    _say(args, f"scan-gamma: {len(gammas)} angles, imbalance sign changes near {', '.join(f'{g:g}' for g in flips) or 'none'} deg")
    return EXIT_OK


def _flux_rows(cfg: RunConfig) -> list[tuple]:
    params = cfg.params()
    rows = []

    def hop(plaquette, name, amp):
        amp = complex(amp)
        rows.append((plaquette, name, amp.real, amp.imag, abs(amp), peierls.wrap_phase(math.atan2(amp.imag, amp.real))))

    def flux(plaquette, name, value):
        rows.append((plaquette, name, math.nan, math.nan, math.nan, value))

    tri = peierls.triangle_hop(params.t_b, params.w, params.mu, params.field_sign)
    hop("triangle", "t", tri.amplitude)
    flux("triangle", "flux_3phi", peierls.wrap_phase(3 * tri.phi))
    two = peierls.two_excitation_hop(params.t_b, params.w, params.mu, params.field_sign)
    hop("triangle", "t_two_excitation", two.amplitude)
    gamma = cfg["geometry"]["gamma_deg"]
    iso = peierls.isosceles_fluxes(gamma, params)
    for name in ("t12", "t23", "t31"):
        hop(f"isosceles_{gamma:g}deg", name, iso.couplings[name])
    flux(f"isosceles_{gamma:g}deg", "flux", iso.total_flux)
    sq = peierls.square_couplings(params)
    hop("square", "t", sq.couplings["t"])
    hop("square", "t_diag", sq.couplings["t_diag"])
    flux("square", "flux_4phi", sq.total_flux)
    hc = peierls.honeycomb_couplings(params)
    for name in ("t", "t_nn", "t_opp"):
        hop("honeycomb", name, hc.couplings[name])
    flux("honeycomb", "flux_6phi", hc.total_flux)
    flux("honeycomb", "alternating_flux", hc.alternating_flux)
    return rows


def cmd_flux(cfg: RunConfig, args) -> int:
    cfg.require_nonzero_mu()
    rows = _flux_rows(cfg)
    lines = _header(cfg, "flux")
    lines.append("plaquette,quantity,re,im,magnitude,phase_rad")
    lines += [",".join([p, q] + [_num(v) for v in vals]) for p, q, *vals in rows]
    _emit(args, lines)
    if not args.quiet:
        for p, q, re, im, mag, phase in rows:
            if math.isnan(mag):
                print(f"{p:<20} {q:<18} {'':>26} {phase:+.6f} rad")
            else:
                print(f"{p:<20} {q:<18} {re:+.6f} {im:+.6f}i  |{mag:.6f}|  arg {phase:+.6f} rad")
    return EXIT_OK


def anyon_residuals(settings: dict) -> dict[str, float]:
    """Worst residual per relation over the configured point and
    ``samples`` random ``(t, delta, phi)`` draws."""
    worst = anyon.full_report(settings["phi"], settings["t"], settings["delta"])
    rng = np.random.default_rng(settings["seed"])
    for _ in range(settings["samples"]):
        t, delta, phi = rng.uniform(0.05, 3.0), rng.uniform(-1.0, 1.0), rng.uniform(0.0, math.pi)
        for key, value in anyon.full_report(phi, t, delta).items():
            worst[key] = max(worst[key], value)
    return worst


def cmd_anyon_check(cfg: RunConfig, args) -> int:
    settings = cfg["anyon"]
    threshold = settings["threshold"]
    worst = anyon_residuals(settings)
    ok = all(v <= threshold for v in worst.values())
    lines = _header(cfg, "anyon-check")
    lines.append("relation,max_residual,threshold,pass")
    lines += [f"{k},{_num(v)},{_num(threshold)},{'yes' if v <= threshold else 'no'}" for k, v in worst.items()]
    _emit(args, lines)
    if not args.quiet:
        for k, v in worst.items():
            print(f"{k:<16} {v:10.3e}  {'ok' if v <= threshold else 'FAIL'}")
    return EXIT_OK if ok else EXIT_CHECK


COMMANDS = {
    "simulate": cmd_simulate,
    "scan-gamma": cmd_scan_gamma,
    "flux": cmd_flux,
    "anyon-check": cmd_anyon_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rydpeierls", description="Chiral excitation hopping on small Rydberg plaquettes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--out", metavar="PATH", help="CSV destination (default: stdout)")
        p.add_argument("--seed", type=int, help="override [run] seed")
        p.add_argument("--samples", type=int, help="override the Monte Carlo sample count")
        p.add_argument("--plot", action="store_true", help="also write an SVG next to --out")
        p.add_argument("--quiet", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args.config).with_overrides(args.seed, args.samples)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
