"""Command-line front end.

    xpjost eval     --model m.json --range 0:10 --mesh 0.01 [--out f.csv]
    xpjost spectrum --model m.json --range=-5:5 [--length L] [--rect x0:x1:y0:y1]
    xpjost zeta     --range 0:50 --mesh 0.1 [--zeta-h]
    xpjost fz       --range 10:50 --mesh 2 --window 400 --series-m 5000
    xpjost oracle   --model m.json --grid-n 256 --length 12

CSV output: a '#' comment line with an ISO-8601 timestamp, a header row,
then comma-separated values with 15 significant digits.  Exit status is 0
on success, 2 for configuration errors and 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys

import numpy as np

from . import hilbert, jost, oracle, specialfn, spectrum
from .errors import ConfigError, DomainError, XPJostError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _timestamp():
    return _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()


def _fmt(v):
    return "%.15g" % v


def write_csv(stream, header, rows):
    stream.write(f"# generated {_timestamp()}\n")
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(v) for v in row) + "\n")


def _parse_range(text):
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"--range must look like a:b, got {text!r}") from exc
    return lo, hi


def _parse_rect(text):
    try:
        vals = tuple(float(x) for x in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"--rect must look like x0:x1:y0:y1, got {text!r}") from exc
    if len(vals) != 4 or not (vals[0] < vals[1] and vals[2] < vals[3]):
        raise ConfigError("--rect needs x0 < x1 and y0 < y1")
    return vals


def _grid(lo, hi, mesh):
    if not mesh > 0:
        raise ConfigError("--mesh must be positive")
    if hi < lo:
        return np.empty(0)
    n = int(math.floor((hi - lo) / mesh + 1e-9))
    return lo + mesh * np.arange(n + 1)


def load_model(arg):
    """Model from a JSON file path or an inline JSON string."""
    if arg is None:
        raise ConfigError("--model is required")
    text = arg
    if not arg.lstrip().startswith("{"):
        try:
            with open(arg, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read model file {arg!r}: {exc}") from exc
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"model JSON: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return jost.model_from_dict(d)


def _apply_length(m, length, required=False):
    if length is None:
        if required and math.isinf(m.L):
            raise ConfigError("a finite --length (or model 'L') is required")
        return m
    if not length > 0:
        raise ConfigError("--length must be positive")
    if math.isfinite(m.L) and abs(m.L - length) > 1e-12 * m.L:
        raise ConfigError(f"--length {length} conflicts with model L = {m.L}")
    return m.with_L(length)


# ---------------------------------------------------------------------------
# subcommands

def cmd_eval(args, out):
    m = _apply_length(load_model(args.model), args.length)
    lo, hi = _parse_range(args.range or "0:10")
    E = _grid(lo, hi, args.mesh)
    F = jost.jost_values(m, E) if len(E) else np.empty(0, dtype=complex)
    write_csv(out, ["E", "re_F", "im_F", "abs_F"],
              ((e, f.real, f.imag, abs(f)) for e, f in zip(E, F)))


def _num(x):
    return "infinite" if isinstance(x, float) and math.isinf(x) else x


def cmd_spectrum(args, out):
    m = _apply_length(load_model(args.model), args.length)
    lo, hi = _parse_range(args.range or "-10:10")
    if hi <= lo:
        raise ConfigError("--range needs a < b")
    rect = _parse_rect(args.rect) if args.rect else None
    upper = (lo, hi, 0.05, 5.0) if args.count_upper else None
    n_scan = None if args.mesh is None else max(int((hi - lo) / args.mesh), 2)
    if math.isfinite(m.L):
        rep = spectrum.finite_spectrum(m, m.L, (lo, hi), n_scan)
        if rect is not None:
            rep.resonances = [(z, r) for z, r in spectrum.complex_zeros(m, rect) if z.imag < 0]
        if upper is not None:
            rep.upper_zero_count = spectrum.upper_halfplane_zero_count(m, upper)
    else:
        rep = spectrum.SpectrumReport(m.L, [], spectrum.bound_states_report(m, (lo, hi), n_scan))
        if rect is not None:
            rep.resonances = [(z, r) for z, r in spectrum.complex_zeros(m, rect) if z.imag < 0]
        if upper is not None:
            rep.upper_zero_count = spectrum.upper_halfplane_zero_count(m, upper)
    doc = {
        "generated": _timestamp(),
        "model": jost.model_to_dict(m),
        "L": _num(m.L),
        "scattering_levels": [{"E": E, "character": "delocalized"} for E in rep.scattering_levels],
        "bound_states": [{"E": E, "residual": r, "character": "localized"}
                         for E, r in rep.bound_states],
        "resonances": [{"re_E": z.real, "im_E": z.imag, "residual": r} for z, r in rep.resonances],
        "upper_zero_count": rep.upper_zero_count,
    }
    json.dump(doc, out, indent=2)
    out.write("\n")


def cmd_zeta(args, out):
    lo, hi = _parse_range(args.range or "0:50")
    t = _grid(lo, hi, args.mesh)
    header = ["t", "theta", "Z", "re_zeta", "im_zeta", "n_smooth"]
    cols = []
    if len(t):
        z = specialfn.zeta_critical(t)
        cols = [t, specialfn.riemann_siegel_theta(t), specialfn.riemann_siegel_Z(t),
                z.real, z.imag, specialfn.smooth_counting(t)]
        if args.zeta_h:
            zh = specialfn.zeta_hardy(0.5 + 1j * t)
            cols += [zh.real, zh.imag]
    if args.zeta_h:
        header += ["re_zetaH", "im_zetaH"]
    write_csv(out, header, zip(*cols) if cols else [])


def cmd_fz(args, out):
    lo, hi = _parse_range(args.range or "10:50")
    E = _grid(lo, hi, args.mesh)
    win = hilbert.PVWindow(args.window, args.pv_mesh)
    rows = []
    if len(E):
        FI = hilbert.FZ_integral(E, win, tail=not args.no_tail)
        FS = hilbert.FZ_series(E, args.series_m)
        rows = zip(E, FI.real, FI.imag, FS.imag)
    write_csv(out, ["E", "re_FZ", "im_FZ_integral", "im_FZ_series"], rows)


def cmd_oracle(args, out):
    m = _apply_length(load_model(args.model), args.length, required=True)
    n = args.grid_n
    if n < 2:
        raise ConfigError("--grid-n must be at least 2")
    k = oracle.build_kernel(m, m.L, n)
    mu, V = oracle.eigen(k)
    idx = oracle.lowest_levels(mu, args.levels)
    idx = idx[np.argsort(oracle.energies(mu[idx]))]
    E = oracle.energies(mu[idx])
    res = np.abs(jost.quantization(m, E))
    loc = [oracle.localization_diagnostic(V[:, i], k) for i in idx]
    ns = [x for x in (n // 4, n // 2, n) if x >= 2]
    table = oracle.convergence_table(m, m.L, ns, args.levels)
    doc = {
        "generated": _timestamp(),
        "model": jost.model_to_dict(m),
        "n": n,
        "levels": [{"E": float(e), "residual": float(r), "tail_mass": float(t),
                    "localized": bool(t < 0.01)} for e, r, t in zip(E, res, loc)],
        "convergence": [{"n": a, "max_residual": b, "ratio": None if math.isnan(c) else c}
                        for a, b, c in table],
    }
    json.dump(doc, out, indent=2)
    out.write("\n")


COMMANDS = {"eval": cmd_eval, "spectrum": cmd_spectrum, "zeta": cmd_zeta,
            "fz": cmd_fz, "oracle": cmd_oracle}


def build_parser():
    p = argparse.ArgumentParser(prog="xpjost", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, model=True):
        if model:
            sp.add_argument("--model", help="model config (JSON file or inline JSON)")
            sp.add_argument("--length", type=float, help="cutoff L (overrides 'infinite')")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--range", help="a:b")

    sp = sub.add_parser("eval", help="F (or F1) on a real energy grid")
    common(sp)
    sp.add_argument("--mesh", type=float, default=0.01)

    sp = sub.add_parser("spectrum", help="levels, bound states, resonances")
    common(sp)
    sp.add_argument("--mesh", type=float, default=None, help="scan step")
    sp.add_argument("--rect", help="resonance search rectangle x0:x1:y0:y1")
    sp.add_argument("--count-upper", action="store_true",
                    help="also count zeros in [range] x [0.05, 5]")

    sp = sub.add_parser("zeta", help="theta, Z, zeta(1/2 + it), smooth counting")
    common(sp, model=False)
    sp.add_argument("--mesh", type=float, default=0.1)
    sp.add_argument("--zeta-h", action="store_true", help="add (s-1) zeta(s)/s columns")

    sp = sub.add_parser("fz", help="F_Z by the PV integral and by the series")
    common(sp, model=False)
    sp.add_argument("--mesh", type=float, default=1.0, help="energy step")
    sp.add_argument("--window", type=float, default=400.0, help="PV half-width d")
    sp.add_argument("--pv-mesh", type=float, default=0.05, help="PV quadrature mesh")
    sp.add_argument("--series-m", type=int, default=5000)
    sp.add_argument("--no-tail", action="store_true",
                    help="cut the PV integral at d (no mean-value tail)")

    sp = sub.add_parser("oracle", help="discretized kernel cross-check")
    common(sp)
    sp.add_argument("--grid-n", type=int, default=256)
    sp.add_argument("--levels", type=int, default=8)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    out = sys.stdout
    try:
        if args.out:
            out = open(args.out, "w", encoding="utf-8", newline="\n")
        COMMANDS[args.command](args, out)
    except (ConfigError, DomainError) as exc:
        print(f"xpjost: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (XPJostError, ArithmeticError) as exc:
        print(f"xpjost: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"xpjost: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
