"""Command-line front end.

Subcommands: ``witness``, ``oracle``, ``figure2``, ``sensitivity``, ``mismatch``.
Exit status: 0 success, 1 invalid input, 2 Fock cutoff exceeded, 3 I/O error.

A ``--config`` file is a flat JSON object whose keys are the long flag names
(``eta2-range`` or ``eta2_range``); flags given on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Optional, Sequence

from . import __version__, analytic, experiment, fock, svg
from .core import CloneInvertError, SweepTable, TruncationExceeded, validate_params

EXIT_OK, EXIT_INVALID, EXIT_TRUNCATION, EXIT_IO = 0, 1, 2, 3
FORMATS = ("csv", "json", "svg")


class ConfigError(CloneInvertError, ValueError):
    pass


# ---------------------------------------------------------------------------
# serialization


def fmt_number(x):
    """12 significant digits; ``None`` stays ``None``."""
    if x is None:
        return None
    if isinstance(x, (bool, int)) or not isinstance(x, float):
        return x
    return float(f"{float(x):.12g}")


def _round_tree(obj):
    if isinstance(obj, dict):
        return {k: _round_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_tree(v) for v in obj]
    return fmt_number(obj)


def to_json(obj) -> str:
    return json.dumps(_round_tree(obj), indent=2) + "\n"


def table_to_csv(table: SweepTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow(["" if v is None else f"{v:.12g}" for v in row])
    return buf.getvalue()


def table_to_json(table: SweepTable) -> str:
    return to_json({"columns": table.columns, "rows": table.rows, "metadata": table.metadata})


def table_from_csv(text: str) -> SweepTable:
    reader = csv.reader(io.StringIO(text))
    cols = next(reader)
    rows = [tuple(None if v == "" else float(v) for v in r) for r in reader if r]
    return SweepTable(cols, rows)


# ---------------------------------------------------------------------------
# argument handling


def parse_range(text: str):
    """``start:stop:count`` -> ``(start, stop, count)``."""
    try:
        start, stop, count = str(text).split(":")
        return float(start), float(stop), int(count)
    except ValueError:
        raise ConfigError(f"range {text!r} is not of the form start:stop:count") from None


def load_config(path: str) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a flat JSON object")
    out = {}
    for key, value in data.items():
        if isinstance(value, (dict, list)):
            raise ConfigError(f"config key {key!r}: nested values are not supported")
        out[key.replace("-", "_")] = value
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat JSON file of flag values")
    p.add_argument("--eta1", type=float)
    p.add_argument("--eta2", type=float)
    p.add_argument("--eta3", type=float)
    p.add_argument("--g", "--g1", dest="g1", type=float, help="cloner gain")
    p.add_argument("--g2", type=float, help="inverse-cloner gain (default: same as --g)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=FORMATS[:2])


def _add_truncation(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-max", type=int, help="per-mode Fock cutoff (default: sized from the gain)")
    p.add_argument("--tail-tol", type=float)
    p.add_argument("--no-auto-grow", action="store_true", default=None)
    p.add_argument("--margin", type=int)
    p.add_argument("--n-ceiling", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clone-invert", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("witness", help="closed-form witness report at one point")
    _add_common(p)

    p = sub.add_parser("oracle", help="Fock simulation vs closed forms at one point")
    _add_common(p)
    _add_truncation(p)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--dump-marginals", help="write final photon-number marginals as CSV")

    p = sub.add_parser("figure2", help="clone number at witness levels 0, 0.5, 1 vs eta2")
    _add_common(p)
    p.add_argument("--eta2-range")
    p.add_argument("--levels", help="comma-separated witness levels")
    p.add_argument("--svg", help="also render the curves to this SVG file")

    p = sub.add_parser("sensitivity", help="detectable eta2 change vs clone number")
    _add_common(p)
    p.add_argument("--g-range")
    p.add_argument("--dw-min", type=float)
    p.add_argument("--svg")

    p = sub.add_parser("mismatch", help="gain-mismatch formula vs Fock simulation")
    _add_common(p)
    _add_truncation(p)
    p.add_argument("--eps-range")
    p.add_argument("--svg")
    return parser


DEFAULTS = {
    "figure2": {"eta1": 0.8, "eta3": 0.8, "eta2_range": "0.9:0.999:50", "levels": "0,0.5,1"},
    "sensitivity": {"eta1": 0.8, "eta2": 1.0, "eta3": 0.8, "g_range": "1.5:4:26", "dw_min": 0.01},
    "mismatch": {"eta1": 0.8, "eta2": 0.98, "eta3": 0.8, "g1": 0.7, "eps_range": "-0.05:0.05:11"},
    "oracle": {"tolerance": 1e-8},
}


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults < config file < command-line flags."""
    cfg = dict(DEFAULTS.get(args.command, {}))
    if args.config:
        cfg.update(load_config(args.config))
    if "g" in cfg and "g1" not in cfg:
        cfg["g1"] = cfg.pop("g")
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "command"):
            cfg[key] = value
    fmt = cfg.get("format")
    if fmt is not None and fmt not in FORMATS:
        raise ConfigError(f"format {fmt!r} not in {FORMATS}")
    return cfg


def _check_writable(path: Optional[str]) -> None:
    if not path:
        return
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise OSError(f"cannot write to {path!r}: directory missing or not writable")
    if os.path.exists(path) and not os.access(path, os.W_OK):
        raise OSError(f"cannot write to {path!r}")


def _policy(cfg: dict, g: float) -> fock.TruncationPolicy:
    kw = {}
    if cfg.get("tail_tol") is not None:
        kw["tail_tol"] = float(cfg["tail_tol"])
    if cfg.get("no_auto_grow"):
        kw["auto_grow"] = False
    if cfg.get("margin") is not None:
        kw["margin"] = int(cfg["margin"])
    if cfg.get("n_ceiling") is not None:
        kw["n_ceiling"] = int(cfg["n_ceiling"])
    if cfg.get("n_max") is not None:
        kw["n_max"] = int(cfg["n_max"])
        kw.setdefault("n_ceiling", max(kw["n_max"], fock.N_CEILING))
        return fock.TruncationPolicy(**kw)
    return fock.TruncationPolicy.for_gain(g, **kw)


def _params(cfg: dict):
    return validate_params({k: cfg.get(k) for k in ("eta1", "eta2", "eta3", "g1", "g2")})


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_table(table: SweepTable, cfg: dict, plot=None) -> None:
    out = cfg.get("out")
    svg_path = cfg.get("svg")
    fmt = cfg.get("format") or ("json" if out and out.endswith(".json") else "csv")
    if svg_path and not out:
        out = os.path.splitext(svg_path)[0] + ".csv"
        fmt = "csv"
    _emit(table_to_json(table) if fmt == "json" else table_to_csv(table), out)
    if svg_path and plot is not None:
        _emit(plot(table), svg_path)


# ---------------------------------------------------------------------------
# subcommands


def cmd_witness(cfg: dict) -> None:
    p = _params(cfg)
    rep = analytic.witness_report(p).as_dict()
    body = {"params": p.as_dict(), **rep, "n_clones": analytic.clone_number(p).n_clones}
    if not p.matched:
        body["witness_mismatch_paper"] = analytic.witness_mismatch(p).value
    _emit(to_json(body), cfg.get("out"))


def cmd_oracle(cfg: dict) -> None:
    p = _params(cfg)
    policy = _policy(cfg, max(p.g1, p.g2))
    report = experiment.oracle_compare(p, policy, float(cfg["tolerance"]))
    _emit(to_json(report.as_dict()), cfg.get("out"))
    if cfg.get("dump_marginals"):
        # final-state marginals, rerun with the cutoff the comparison settled on
        state = fock.build_initial_state(fock.TruncationPolicy(n_max=report.n_max, tail_tol=policy.tail_tol))
        for eta, g in ((p.eta1, p.g1), (p.eta2, -p.g2), (p.eta3, None)):
            state = fock.apply_loss(eta, fock.apply_loss(eta, state, "a"), "a_perp")
            if g is not None:
                state = fock.apply_cloner(g, state)
        _emit(fock.marginals_csv(state), cfg["dump_marginals"])


def figure2_svg(table: SweepTable) -> str:
    series = [(f"W = {c.split('_w')[-1]}", table.column("eta2"), table.column(c)) for c in table.columns[1:]]
    return svg.line_plot(series, xlabel="intermediate transmission eta2", ylabel="clone number N_c", logy=True)


def cmd_figure2(cfg: dict) -> None:
    levels = [float(x) for x in str(cfg["levels"]).split(",")]
    spec = experiment.ScanSpec(
        ranges={"eta2": parse_range(cfg["eta2_range"])},
        fixed={"eta1": float(cfg["eta1"]), "eta3": float(cfg["eta3"])},
        targets=levels,
    )
    _emit_table(experiment.figure2_sweep(spec), cfg, figure2_svg)


def sensitivity_svg(table: SweepTable) -> str:
    n = table.column("n_clones")
    return svg.line_plot(
        [("quantum d_eta2_min", n, table.column("deta2_min")), ("classical 1/sqrt(N)", n, table.column("classical"))],
        xlabel="clone number N",
        ylabel="smallest detectable change",
        logy=True,
    )


def cmd_sensitivity(cfg: dict) -> None:
    spec = experiment.ScanSpec(
        ranges={"g1": parse_range(cfg["g_range"])},
        fixed={k: float(cfg[k]) for k in ("eta1", "eta2", "eta3")},
        dw_min=float(cfg["dw_min"]),
    )
    _emit_table(experiment.sensitivity_scan(spec), cfg, sensitivity_svg)


def mismatch_svg(table: SweepTable) -> str:
    eps = table.column("epsilon")
    return svg.line_plot(
        [("published formula", eps, table.column("w_paper")), ("Fock simulation", eps, table.column("w_oracle"))],
        xlabel="gain mismatch epsilon",
        ylabel="witness",
    )


def cmd_mismatch(cfg: dict) -> None:
    spec = experiment.ScanSpec(
        ranges={"epsilon": parse_range(cfg["eps_range"])},
        fixed={k: float(cfg[k]) for k in ("eta1", "eta2", "eta3", "g1")},
    )
    lo, hi, _ = spec.ranges["epsilon"]
    policy = _policy(cfg, spec.fixed["g1"] + max(abs(lo), abs(hi)))
    table = experiment.mismatch_scan(spec, policy)
    _emit_table(table, cfg, mismatch_svg)
    fit = table.metadata["fit"]
    print(
        "quadratic fit of simulated witness: "
        + ", ".join(f"{k}={fmt_number(v)}" for k, v in fit.items()),
        file=sys.stderr,
    )


COMMANDS = {
    "witness": cmd_witness,
    "oracle": cmd_oracle,
    "figure2": cmd_figure2,
    "sensitivity": cmd_sensitivity,
    "mismatch": cmd_mismatch,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        for key in ("out", "svg", "dump_marginals"):
            _check_writable(cfg.get(key))
        COMMANDS[args.command](cfg)
    except TruncationExceeded as exc:
        print(f"error: truncation exceeded: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CloneInvertError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
