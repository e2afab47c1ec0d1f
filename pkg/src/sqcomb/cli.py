"""Command-line front end: CSV data, generated plot scripts, run manifests.

Subcommands:

* ``wigner``     sample a (possibly noise-evolved) Wigner function and its
                 marginals;
* ``metrics``    time series of fidelity / orthogonality / distinguishability
                 / error probability;
* ``scan``       initial decay rate versus tooth number with scaling laws;
* ``reproduce``  canonical parameter runs for the ten standard figures;
* ``verify``     acceptance suites (benchmark numbers, Fock-basis oracle).

Every output directory receives a ``manifest.json`` recording the command
line, parameters, tolerances, artifact hashes and wall-clock time.  Data
files carry 17 significant digits and are byte-identical across repeated
identical invocations.  Plot rendering is delegated to generated
matplotlib scripts so the numeric core stays free of plotting imports.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .comb import CombParams, ParameterError, initial_error
from .evolution import NoiseChannel, evolved_wigner_field
from .fock import StepInstabilityError, TruncationError
from .metrics import (
    distinguishability_converged,
    fidelity,
    holevo_error,
    metric_series,
    orthogonality,
    scan_over_teeth,
)
from .numerics import ConvergenceError, QuadratureError, ToleranceConfig
from .phasespace import GridCapError, PhaseGrid, auto_grid, wigner_field

USAGE_ERROR = 2
NUMERIC_ERROR = 1

FIGURE_SETS = [(4.0, 0.5), (5.0, 0.3), (7.0, -0.1)]


@dataclass
class RunManifest:
    """Provenance record emitted alongside every output directory."""

    command: list
    parameters: dict
    tolerances: dict
    artifacts: dict
    wall_time_s: float
    version: str = __version__

    def write(self, path: Path) -> None:
        payload = {
            "command": self.command,
            "version": self.version,
            "parameters": self.parameters,
            "tolerances": self.tolerances,
            "artifacts": self.artifacts,
            "wall_time_s": self.wall_time_s,
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _emit_manifest(out_dir: Path, argv, parameters: dict, tolerances: ToleranceConfig, t_start: float) -> None:
    artifacts = {
        p.name: _sha256(p)
        for p in sorted(out_dir.iterdir())
        if p.is_file() and p.name != "manifest.json"
    }
    manifest = RunManifest(
        command=list(argv),
        parameters=parameters,
        tolerances={
            "quad_abs": tolerances.quad_abs,
            "eig_rel": tolerances.eig_rel,
            "conv_rel": tolerances.conv_rel,
        },
        artifacts=artifacts,
        wall_time_s=time.perf_counter() - t_start,
    )
    manifest.write(out_dir / "manifest.json")


def _load_config(path: str | None) -> ToleranceConfig:
    cfg = ToleranceConfig()
    if path is None:
        return cfg
    values = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line {line!r} is not of the form key = value")
        key, _, val = line.partition("=")
        values[key.strip()] = float(val.strip())
    unknown = set(values) - {"quad_abs", "eig_rel", "conv_rel"}
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")
    return ToleranceConfig(
        quad_abs=values.get("quad_abs", cfg.quad_abs),
        eig_rel=values.get("eig_rel", cfg.eig_rel),
        conv_rel=values.get("conv_rel", cfg.conv_rel),
    )


def _params_from(args) -> CombParams:
    return CombParams(args.teeth, args.spacing, args.squeeze)


def _write_csv(path: Path, header: str, columns) -> None:
    rows = zip(*columns)
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


# ----------------------------------------------------------------------
# plot script templates


def _write_plot_script(path: Path, body: str) -> None:
    text = "#!/usr/bin/env python3\n" + body.lstrip("\n")
    path.write_text(text)


_WIGNER_PLOT = '''
"""Render the sampled Wigner function and its marginals (three panels)."""
import csv
from pathlib import Path

import numpy as np
import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent


def read_csv(name):
    with open(here / name, newline="") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], np.array(rows[1:], dtype=float)
    return header, data


_, w = read_csv("wigner.csv")
q = np.unique(w[:, 0]); p = np.unique(w[:, 1])
field = w[:, 2].reshape(q.size, p.size)
_, fq = read_csv("marginal_position.csv")
_, fp = read_csv("marginal_momentum.csv")

fig, axes = plt.subplots(1, 3, figsize=(13, 3.6))
lim = np.max(np.abs(field))
m = axes[0].pcolormesh(q, p, field.T, cmap="RdBu_r", vmin=-lim, vmax=lim, shading="auto")
axes[0].set_xlabel("q"); axes[0].set_ylabel("p"); axes[0].set_title("(a) Wigner function")
fig.colorbar(m, ax=axes[0])
axes[1].plot(fq[:, 0], fq[:, 1]); axes[1].set_xlabel("q"); axes[1].set_ylabel("f(q)")
axes[1].set_title("(b) position marginal")
axes[2].plot(fp[:, 0], fp[:, 1]); axes[2].set_xlabel("p"); axes[2].set_ylabel("f(p)")
axes[2].set_title("(c) momentum marginal")
fig.tight_layout()
fig.savefig(here / "wigner.png", dpi=200)
print("wrote", here / "wigner.png")
'''

_SERIES_PLOT = '''
"""Render metric-versus-time curves from the CSV files next to this script."""
import csv
from pathlib import Path

import numpy as np
import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
fig, ax = plt.subplots(figsize=(6, 4))
for name, style in [("metrics_damping.csv", "-"), ("metrics_diffusion.csv", "--"),
                    ("metrics.csv", "-")]:
    path = here / name
    if not path.exists():
        continue
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    data = np.array(rows[1:], dtype=float)
    ax.plot(data[:, 0], data[:, 1], style, label=name.replace("metrics_", "").replace(".csv", ""))
ax.set_xlabel("gamma t")
ax.set_ylabel("METRIC_LABEL")
ax.legend()
fig.tight_layout()
fig.savefig(here / "metrics.png", dpi=200)
print("wrote", here / "metrics.png")
'''

_SCAN_PLOT = '''
"""Render rate-versus-teeth scans (markers) with scaling-law lines."""
import csv
from pathlib import Path

import numpy as np
import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
fig, ax = plt.subplots(figsize=(6, 4))
for name, color in [("scan_damping.csv", "C0"), ("scan_diffusion.csv", "C3"), ("scan.csv", "C0")]:
    path = here / name
    if not path.exists():
        continue
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    data = np.array(rows[1:], dtype=float)
    label = name.replace("scan_", "").replace(".csv", "")
    ax.plot(data[:, 0], data[:, 1], "o", color=color, label=label)
    if np.all(np.isfinite(data[:, 2])):
        ax.plot(data[:, 0], data[:, 2], "-", color=color, alpha=0.7)
ax.set_xlabel("teeth N")
ax.set_ylabel("METRIC_LABEL")
ax.legend()
fig.tight_layout()
fig.savefig(here / "scan.png", dpi=200)
print("wrote", here / "scan.png")
'''


# ----------------------------------------------------------------------
# subcommands


def cmd_wigner(args, argv) -> int:
    t0 = time.perf_counter()
    tolerances = _load_config(args.config)
    params = _params_from(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    gamma_t = args.gamma_t if args.channel else 0.0
    grid = auto_grid(params, gamma_t)
    if args.grid_q or args.grid_p:
        grid = PhaseGrid(
            grid.q_min, grid.q_max, grid.p_min, grid.p_max,
            args.grid_q or grid.n_q, args.grid_p or grid.n_p,
        )
    if args.channel:
        field = evolved_wigner_field(params, args.basis, grid, NoiseChannel(args.channel, gamma_t))
    else:
        field = wigner_field(params, args.basis, grid)

    field.to_csv(out / "wigner.csv")
    field.to_binary(out / "wigner.bin")
    wq = np.full(grid.n_p, grid.h_p)
    wq[0] = wq[-1] = 0.5 * grid.h_p
    f_pos = field.values @ wq
    wp = np.full(grid.n_q, grid.h_q)
    wp[0] = wp[-1] = 0.5 * grid.h_q
    f_mom = wp @ field.values
    _write_csv(out / "marginal_position.csv", "q,f", (grid.q_axis, f_pos))
    _write_csv(out / "marginal_momentum.csv", "p,f", (grid.p_axis, f_mom))
    _write_plot_script(out / "plot_wigner.py", _WIGNER_PLOT)

    _emit_manifest(
        out, argv,
        {
            "teeth": params.teeth, "spacing": params.spacing, "squeeze": params.squeeze,
            "basis": args.basis, "channel": args.channel, "gamma_t": gamma_t,
            "n_q": grid.n_q, "n_p": grid.n_p,
        },
        tolerances, t0,
    )
    return 0


def _emit_series(out: Path, series, suffix: str = "") -> None:
    stem = f"metrics_{suffix}" if suffix else "metrics"
    series.to_csv(out / f"{stem}.csv")
    series.to_json(out / f"{stem}.json")


def cmd_metrics(args, argv) -> int:
    t0 = time.perf_counter()
    tolerances = _load_config(args.config)
    params = _params_from(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if args.t_steps < 1:
        raise ParameterError("--t-steps must be >= 1")
    times = np.linspace(0.0, args.t_max, args.t_steps)
    metric = {"error": "error_probability"}.get(args.metric, args.metric)
    channels = ("damping", "diffusion") if args.both_channels else (args.channel,)
    if channels[0] is None:
        raise ParameterError("--channel is required unless --both-channels is given")
    for ch in channels:
        series = metric_series(params, metric, ch, times, basis=args.basis, tolerances=tolerances)
        _emit_series(out, series, suffix=ch if args.both_channels else "")
    _write_plot_script(out / "plot_metrics.py", _SERIES_PLOT.replace("METRIC_LABEL", metric))

    if metric in ("distinguishability", "error_probability") and times[-1] > 0.0:
        for ch in channels:
            d, _ = distinguishability_converged(
                params, ch, float(times[-1]), rel_tol=1e-6, tolerances=tolerances
            )
            print(f"{ch}: D({times[-1]:g}) = {d:.6f}  error = {holevo_error(d) * 100:.2f}%")

    _emit_manifest(
        out, argv,
        {
            "teeth": params.teeth, "spacing": params.spacing, "squeeze": params.squeeze,
            "metric": metric, "channels": list(channels),
            "t_max": args.t_max, "t_steps": args.t_steps, "basis": args.basis,
        },
        tolerances, t0,
    )
    return 0


def cmd_scan(args, argv) -> int:
    t0 = time.perf_counter()
    tolerances = _load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.n_min < 1 or args.n_max < args.n_min:
        raise ParameterError("need 1 <= n-min <= n-max")
    teeth = range(args.n_min, args.n_max + 1)
    channels = ("damping", "diffusion") if args.both_channels else (args.channel,)
    if channels[0] is None:
        raise ParameterError("--channel is required unless --both-channels is given")
    for ch in channels:
        table = scan_over_teeth(args.spacing, args.squeeze, ch, args.metric, teeth)
        stem = f"scan_{ch}" if args.both_channels else "scan"
        table.to_csv(out / f"{stem}.csv")
    _write_plot_script(out / "plot_scan.py", _SCAN_PLOT.replace("METRIC_LABEL", f"{args.metric} rate"))
    _emit_manifest(
        out, argv,
        {
            "spacing": args.spacing, "squeeze": args.squeeze, "metric": args.metric,
            "channels": list(channels), "n_min": args.n_min, "n_max": args.n_max,
        },
        tolerances, t0,
    )
    return 0


def _reproduce_one(figure: int, out_root: Path) -> None:
    out = out_root / f"fig{figure}"
    base = ["--out", str(out)]
    if figure in (1, 2, 3, 4):
        squeeze = "-0.1" if figure == 2 else "0.4"
        cmd = ["wigner", "--teeth", "8", "--spacing", "4", "--squeeze", squeeze, "--basis", "0"] + base
        if figure == 3:
            cmd += ["--channel", "damping", "--gamma-t", "0.2"]
        elif figure == 4:
            cmd += ["--channel", "diffusion", "--gamma-t", "0.2"]
        run(cmd)
    elif figure in (5, 7, 9):
        metric = {5: "fidelity", 7: "orthogonality", 9: "distinguishability"}[figure]
        steps = "11" if figure == 9 else "21"
        for tag, (d, r) in zip("abc", FIGURE_SETS):
            run([
                "metrics", "--teeth", "8", "--spacing", str(d), "--squeeze", str(r),
                "--metric", metric, "--t-max", "1.0", "--t-steps", steps,
                "--both-channels", "--out", str(out / tag),
            ])
    elif figure in (6, 8, 10):
        metric = {6: "fidelity", 8: "orthogonality", 10: "distinguishability"}[figure]
        n_max = "10" if figure == 10 else "12"
        run([
            "scan", "--spacing", "4.0", "--squeeze", "0.5", "--metric", metric,
            "--n-min", "1", "--n-max", n_max, "--both-channels", "--out", str(out),
        ])


def cmd_reproduce(args, argv) -> int:
    out_root = Path(args.out)
    figures = range(1, 11) if args.figure == "all" else [int(args.figure)]
    for fig in figures:
        _reproduce_one(fig, out_root)
    return 0


def _verify_paper_numbers(tolerances: ToleranceConfig) -> int:
    checks = []
    for (d, r), expect in zip(FIGURE_SETS, (0.004, 0.003, 0.006)):
        eps = initial_error(CombParams(8, d, r))
        checks.append((f"eps(0) at (8, {d}, {r})", eps, expect, 5e-4))
    p = CombParams(8, 4.0, 0.4)
    checks.append(("eps(0) at (8, 4.0, 0.4)", initial_error(p), 0.010, 5e-4))
    for ch, expect, tol in (("damping", 0.027, 2e-3), ("diffusion", 0.091, 3e-3)):
        dist, _ = distinguishability_converged(p, ch, 0.2, rel_tol=1e-7, tolerances=tolerances)
        checks.append((f"eps(0.2) {ch} at (8, 4.0, 0.4)", holevo_error(dist), expect, tol))
    failures = 0
    for name, measured, expect, tol in checks:
        ok = abs(measured - expect) <= tol
        failures += 0 if ok else 1
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: measured {measured:.5f} expected {expect:.5f} +- {tol:g}")
    return NUMERIC_ERROR if failures else 0


def _verify_oracle(tolerances: ToleranceConfig) -> int:
    from .fock import build_comb, integrate_master
    from .metrics import distinguishability

    failures = 0
    cases = [(1, 4.0, 0.0, 64), (2, 3.0, 0.3, 96), (4, 4.0, 0.4, 128)]
    for n, d, r, dim in cases:
        params = CombParams(n, d, r)
        for ch in ("damping", "diffusion"):
            states = {b: build_comb(params, b, dim) for b in (0, 1)}
            rho = {b: states[b] for b in (0, 1)}
            t_prev = 0.0
            for gamma_t in (0.05, 0.1, 0.2):
                steps = max(200, int(math.ceil(4000 * (gamma_t - t_prev))))
                rho = {b: integrate_master(rho[b], ch, gamma_t - t_prev, steps) for b in (0, 1)}
                t_prev = gamma_t
                f_oracle = float(np.real(np.vdot(states[0].amplitudes, rho[0].amplitudes @ states[0].amplitudes)))
                o_oracle = float(np.real(np.sum(rho[0].amplitudes * rho[1].amplitudes.T)))
                diff = rho[0].amplitudes - rho[1].amplitudes
                vals = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
                d_oracle = 0.5 * float(np.sum(np.abs(vals)))
                f_cf = fidelity(params, 0, ch, gamma_t)
                o_cf = orthogonality(params, ch, gamma_t)
                d_cf = distinguishability(params, ch, gamma_t, tolerances=tolerances)
                for label, a, b in (("F", f_oracle, f_cf), ("O", o_oracle, o_cf), ("D", d_oracle, d_cf)):
                    ok = abs(a - b) <= 1e-4
                    failures += 0 if ok else 1
                    print(
                        f"[{'PASS' if ok else 'FAIL'}] ({n},{d},{r}) {ch} gamma_t={gamma_t}: "
                        f"{label} oracle {a:.8f} closed-form {b:.8f} |diff| {abs(a - b):.2e}"
                    )
    return NUMERIC_ERROR if failures else 0


def cmd_verify(args, argv) -> int:
    tolerances = _load_config(args.config)
    if args.suite == "paper-numbers":
        return _verify_paper_numbers(tolerances)
    return _verify_oracle(tolerances)


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqcomb",
        description="Squeezed comb states: phase space, noise channels, code errors.",
    )
    parser.add_argument("--version", action="version", version=f"sqcomb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_params(p):
        p.add_argument("--teeth", type=int, required=True, help="number of comb teeth N")
        p.add_argument("--spacing", type=float, required=True, help="tooth spacing d")
        p.add_argument("--squeeze", type=float, required=True, help="squeeze parameter r")

    def add_common(p):
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--config", help="key = value file overriding tolerances")

    p = sub.add_parser("wigner", help="sample a Wigner function and marginals")
    add_params(p)
    p.add_argument("--basis", type=int, choices=(0, 1), required=True)
    p.add_argument("--channel", choices=("damping", "diffusion"))
    p.add_argument("--gamma-t", type=float, default=0.0, help="rate-time product")
    p.add_argument("--grid-q", type=int, help="override number of q samples")
    p.add_argument("--grid-p", type=int, help="override number of p samples")
    add_common(p)
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("metrics", help="metric time series")
    add_params(p)
    p.add_argument("--metric", required=True,
                   choices=("fidelity", "orthogonality", "distinguishability", "error"))
    p.add_argument("--channel", choices=("damping", "diffusion"))
    p.add_argument("--both-channels", action="store_true")
    p.add_argument("--basis", type=int, choices=(0, 1), default=0)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--t-steps", type=int, required=True, help="number of time samples")
    add_common(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("scan", help="initial rate versus tooth number")
    p.add_argument("--spacing", type=float, required=True)
    p.add_argument("--squeeze", type=float, required=True)
    p.add_argument("--metric", required=True,
                   choices=("fidelity", "orthogonality", "distinguishability"))
    p.add_argument("--channel", choices=("damping", "diffusion"))
    p.add_argument("--both-channels", action="store_true")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    add_common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("reproduce", help="canonical figure data sets")
    p.add_argument("--figure", required=True, choices=[str(i) for i in range(1, 11)] + ["all"])
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="key = value file overriding tolerances")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("verify", help="acceptance suites")
    p.add_argument("--suite", required=True, choices=("paper-numbers", "oracle"))
    p.add_argument("--config", help="key = value file overriding tolerances")
    p.set_defaults(func=cmd_verify)

    return parser


def run(argv) -> int:
    """Parse argv and execute; raises on internal errors, exits on usage ones."""
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args, list(argv))


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        return run(argv)
    except (
        GridCapError,
        QuadratureError,
        ConvergenceError,
        TruncationError,
        StepInstabilityError,
    ) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return NUMERIC_ERROR
    except (ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
