"""Command-line entry point: ``qheat <command> <config> [options]``.

``<config>`` is a path to an INI file or the name of a bundled preset
(fig1c, fig1d, fig1e, fig3).  Exit codes: 0 success, 1 invalid input,
2 runtime failure, 3 an analytic/numeric comparison outside tolerance.
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings

import numpy as np

from ..analytic import map_params, map_power, steady_state_fixed_point
from ..lindblad import NotConverged, find_steady_cycle
from ..model import (
    asymmetric_resonance_frequencies,
    mean_frequency_ghz,
    resonance_frequencies,
)
from ..observables import (
    WindingUndefined,
    find_peaks,
    peak_amplitude_study,
    point_from_cycle,
    winding_number,
)
from ..units import POWER_UNIT_W
from .config import ParseError, ValidationError, load_config
from .csvio import write_csv
from .sweep import run_sweep

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME, EXIT_TOLERANCE = 0, 1, 2, 3
POWER_TOLERANCE = 0.05


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_sweep(cfg, args, out):
    results = run_sweep(cfg, workers=args.workers)
    path = write_csv(results, args.out or cfg.csv)
    bad = sum(not p.converged for p in results.points)
    print(
        f"{len(results.points)} points ({bad} unconverged) in {results.wall_time:.1f} s -> {path}",
        file=out,
    )
    return EXIT_OK


def _operating_model(cfg, f_ghz):
    f = cfg.f_GHz if f_ghz is None else f_ghz
    if f is None:
        raise _UsageError("no operating point: pass --f-ghz or set [drive] f_GHz")
    if not f > 0:
        raise _UsageError("--f-ghz must be positive")
    return cfg.model_at(f_L=f)


def cmd_trajectory(cfg, args, out):
    model = _operating_model(cfg, args.f_ghz)
    cycle = find_steady_cycle(model, cfg.bath_couplings(), cfg.integrator())
    try:
        winding = str(winding_number(cycle))
    except WindingUndefined:
        winding = ""
    lab = cycle.lab_bloch
    rid = 2.0 * cycle.eigen_coordinates
    purity = cycle.purity
    stride = cfg.sample_stride
    idx = list(range(0, len(cycle.t), stride))
    if idx[-1] != len(cycle.t) - 1:
        idx.append(len(cycle.t) - 1)
    path = args.out or cfg.trajectory
    header = "t_ns,omega_drive,sx,sy,sz,2R,2I,2D,purity,winding\n"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header)
        for i in idx:
            vals = [cycle.t[i], cycle.omega_drive[i], *lab[i], *rid[i], purity[i]]
            fh.write(",".join(repr(float(v)) for v in vals) + f",{winding}\n")
    print(
        f"f_L = {1 / model.period:.6g} GHz, winding = {winding or 'undefined'}, "
        f"{len(idx)} samples -> {path}",
        file=out,
    )
    return EXIT_OK


def _predictions(cfg):
    model = cfg.base_model()
    if cfg.drive_kind == "asymmetric_square":
        return asymmetric_resonance_frequencies(model, cfg.sweep.n_max, cfg.dt2_ns())
    return resonance_frequencies(model, cfg.sweep.n_max)


def cmd_peaks(cfg, args, out):
    results = run_sweep(cfg, workers=args.workers)
    if args.out:
        write_csv(results, args.out)
    preds = _predictions(cfg)
    key = args.key
    peaks = {p.n: p for p in find_peaks(results.points, preds, key=key)}
    print(f"{'n':>3} {'predicted_GHz':>14} {'found_GHz':>12} {'offset':>10} {key + '_fW':>14}", file=out)
    for q in preds:
        p = peaks.get(q.n)
        if p is None:
            print(f"{q.n:>3} {q.f_L_n:>14.6f} {'-':>12} {'-':>10} {'-':>14}", file=out)
        else:
            print(
                f"{q.n:>3} {q.f_L_n:>14.6f} {p.f_at_max:>12.6f} "
                f"{p.relative_offset:>10.2e} {p.P_at_max * 1e15:>14.6g}",
                file=out,
            )
    return EXIT_OK


def cmd_analytic_compare(cfg, args, out):
    baths = cfg.bath_couplings()
    if args.f_ghz is not None or cfg.f_GHz is not None:
        targets = [(None, _operating_model(cfg, args.f_ghz))]
    else:
        targets = [(q.n, cfg.model_at(f_L=q.f_L_n)) for q in _predictions(cfg)[: args.orders]]
    worst = 0.0
    for n, model in targets:
        cycle = find_steady_cycle(model, baths, cfg.integrator())
        numeric = point_from_cycle(cycle)
        params = map_params(model, baths)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            corners = steady_state_fixed_point(params, exponential=args.exponential)
        analytic = map_power(params, corners).total * POWER_UNIT_W
        rel = abs(analytic - numeric.P_total) / abs(numeric.P_total)
        worst = max(worst, rel)
        label = "point" if n is None else f"n = {n}"
        print(f"[{label}] f_L = {1 / model.period:.6f} GHz", file=out)
        num_c = cycle.corner_states()
        for k in "pqrs":
            a = getattr(corners, k)
            print(
                f"  corner {k}: numeric (D,R,I) = {np.array2string(num_c[k], precision=5)}"
                f"  analytic = {np.array2string(a, precision=5)}",
                file=out,
            )
        status = "ok" if rel <= POWER_TOLERANCE else "OUT OF TOLERANCE"
        print(
            f"  power: numeric {numeric.P_total * 1e15:.6g} fW, analytic {analytic * 1e15:.6g} fW, "
            f"rel diff {rel:.3%} [{status}]",
            file=out,
        )
    return EXIT_OK if worst <= POWER_TOLERANCE else EXIT_TOLERANCE


def cmd_predict(cfg, args, out):
    model = cfg.base_model()
    n_max = args.n_max or cfg.sweep.n_max
    f_M = mean_frequency_ghz(model)
    print(f"f_M = {f_M:.6f} GHz (omega1/2pi = {model.omega1 / (2 * math.pi):.6f}, "
          f"omega2/2pi = {model.omega2 / (2 * math.pi):.6f})", file=out)
    print("symmetric drive, f_L,n = f_M / n", file=out)
    print(f"{'n':>3} {'f_L_GHz':>12}", file=out)
    for n in range(1, n_max + 1):
        print(f"{n:>3} {f_M / n:>12.6f}", file=out)
    dt2 = cfg.dt2_ns()
    print(f"asymmetric square drive, dt2 = {dt2:.6f} ns", file=out)
    print(f"{'n':>3} {'f_L_GHz':>12} {'dt1_ns':>12}", file=out)
    for q in asymmetric_resonance_frequencies(model, n_max, dt2):
        print(f"{q.n:>3} {q.f_L_n:>12.6f} {1 / q.f_L_n - dt2:>12.6f}", file=out)
    return EXIT_OK


def cmd_study(cfg, args, out):
    st = cfg.study
    if st is None:
        raise _UsageError("config has no [study] section")
    rows = peak_amplitude_study(
        cfg.base_model(), cfg.bath_couplings(), st.orders, st.variable, st.values,
        window=st.window, points=st.points, cfg=cfg.integrator(),
    )
    print(f"{st.variable:>12} {'n':>3} {'f_at_max_GHz':>13} {'P_max_fW':>12} {'peak':>5}", file=out)
    for r in rows:
        print(
            f"{r.value:>12.6g} {r.n:>3} {r.f_at_max:>13.6f} {r.P_max * 1e15:>12.6g} "
            f"{'yes' if r.is_peak else 'no':>5}",
            file=out,
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="qheat", description="Driven-qubit quantum heat simulations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sweep", help="frequency or dt1 sweep to CSV")
    s.add_argument("config")
    s.add_argument("--out", help="CSV path (default: [output] csv)")
    s.add_argument("--workers", type=int, help="worker processes (default: [output] workers)")
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("trajectory", help="Bloch trajectory of one steady cycle")
    t.add_argument("config")
    t.add_argument("--f-ghz", type=float, help="drive frequency in GHz")
    t.add_argument("--out", help="CSV path (default: [output] trajectory)")
    t.set_defaults(func=cmd_trajectory)

    k = sub.add_parser("peaks", help="sweep and table of predicted vs found peaks")
    k.add_argument("config")
    k.add_argument("--out", help="also write the sweep CSV here")
    k.add_argument("--workers", type=int)
    k.add_argument("--key", default="P_total", choices=("P_total", "P1", "P2"))
    k.set_defaults(func=cmd_peaks)

    a = sub.add_parser("analytic-compare", help="numeric vs analytic corners and power")
    a.add_argument("config")
    a.add_argument("--f-ghz", type=float, help="single operating point instead of the peaks")
    a.add_argument("--orders", type=int, default=3, help="compare at the first N resonances")
    a.add_argument("--exponential", action="store_true",
                   help="exponential thermal legs instead of the linearised ones")
    a.set_defaults(func=cmd_analytic_compare)

    r = sub.add_parser("predict", help="resonance tables, no simulation")
    r.add_argument("config")
    r.add_argument("--n-max", type=int)
    r.set_defaults(func=cmd_predict)

    y = sub.add_parser("study", help="peak amplitudes over the [study] family")
    y.add_argument("config")
    y.set_defaults(func=cmd_study)
    return p


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        try:
            cfg = load_config(args.config)
        except (OSError, KeyError) as exc:
            raise _UsageError(f"qheat: cannot load configuration: {exc}") from exc
        if getattr(args, "workers", None) is not None and args.workers < 1:
            raise _UsageError("--workers must be >= 1")
        return args.func(cfg, args, out)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    except (ParseError, ValidationError) as exc:
        print(f"qheat: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"qheat: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (NotConverged, ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"qheat: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


cli_dispatch = main

if __name__ == "__main__":
    sys.exit(main())
