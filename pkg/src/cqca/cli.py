"""Command-line front end.

Exit codes: 0 success, 1 invalid arguments or configuration, 2 runtime or
consistency failure (e.g. a Whitney cross-check or scar comparison fails).
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .algebra import RuleMatrix, load_rule
from .analysis import (
    ScarError,
    box_count_heatmap,
    box_count_rule,
    cone_fill_fraction,
    filled_cone,
    primal_scar_check,
)
from .combinatorics import BRUTE_FORCE_MAX_T, WhitneyMismatch, whitney_sequence
from .dynamics import (
    PAIRINGS,
    DEFAULT_PAIRING,
    Insertion,
    fit_butterfly_velocity,
    heat_map,
    scan_scrambling_times,
    scrambling_time,
)
from .export import write_heatmap_csv, write_json, write_pgm, write_table


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    rule: str
    N: int
    W: Insertion
    V: Insertion
    L: int
    T: int
    threshold: float
    out: Path
    pairing: str = DEFAULT_PAIRING

    def __post_init__(self):
        if self.N < 2:
            raise ConfigError(f"N must be at least 2, got {self.N}")
        if self.T < 0:
            raise ConfigError(f"T must be non-negative, got {self.T}")
        if self.L < 1:
            raise ConfigError(f"L must be at least 1, got {self.L}")
        if not 0 < self.threshold <= 4:
            raise ConfigError(f"threshold must lie in (0, 4], got {self.threshold}")

    def load_rule(self, N: int | None = None) -> RuleMatrix:
        return load_rule(self.rule, self.N if N is None else N)


def _insertion(text: str) -> Insertion:
    try:
        return Insertion.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def parse_N_range(text: str) -> list[int]:
    """``2..378``, ``7`` or ``2,3,5``."""
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise ConfigError(f"range {text!r} is reversed")
        values = list(range(lo, hi + 1))
    else:
        try:
            values = [int(x) for x in text.split(",")]
        except ValueError as exc:
            raise ConfigError(f"cannot parse N range {text!r}") from exc
    if any(v < 2 for v in values):
        raise ConfigError("every N must be at least 2")
    return values


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _outdir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _add_common(p: argparse.ArgumentParser, *, N=True, T=True, W=True, V=True):
    p.add_argument("--rule", default="paper", help="'paper' or a JSON rule file")
    if N:
        p.add_argument("--N", type=int, required=True, help="local dimension (modulus)")
    if W:
        p.add_argument("--W", type=_insertion, default=Insertion(1, 0), help="evolved insertion: Q, P, QP or i,j")
    if V:
        p.add_argument("--V", type=_insertion, default=Insertion(1, 0), help="fixed insertion: Q, P, QP or i,j")
    if T:
        p.add_argument("--T", type=int, default=100, help="time horizon")
        p.add_argument("--L", type=int, default=None, help="window half-width (default: T)")
    p.add_argument("--threshold", type=float, default=1.0, help="scrambled when C >= threshold")
    p.add_argument("--pairing", choices=PAIRINGS, default=DEFAULT_PAIRING)
    p.add_argument("--out", default=".", help="output directory")


def _config(args, **override) -> RunConfig:
    T = override.get("T", getattr(args, "T", 1))
    L = getattr(args, "L", None)
    return RunConfig(
        rule=args.rule, N=override.get("N", getattr(args, "N", 2)),
        W=getattr(args, "W", Insertion(1, 0)), V=getattr(args, "V", Insertion(1, 0)),
        L=override.get("L", L if L is not None else max(T, 1)), T=T,
        threshold=args.threshold, out=Path(args.out), pairing=args.pairing,
    )


def _heatmap_summary(h, cfg: RunConfig) -> dict:
    hit = scrambling_time(cfg.load_rule(), cfg.W, cfg.V, max(cfg.T, 1), cfg.threshold, cfg.pairing)
    try:
        v_B = fit_butterfly_velocity(h, cfg.threshold).v_B
    except ValueError:
        v_B = None
    return {
        "N": h.N, "rule": h.rule_name, "W": h.W.label, "V": h.V.label,
        "L": h.L, "T": h.T, "threshold": cfg.threshold, "pairing": h.pairing,
        "t_star": hit.t_star if hit else None,
        "xi_witness": hit.xi_witness if hit else None,
        "v_B": v_B,
        "fill_fraction": cone_fill_fraction(h, cfg.threshold),
        "warnings": list(h.warnings),
    }


def cmd_heatmap(args) -> int:
    cfg = _config(args)
    out = _outdir(args.out)
    h = heat_map(cfg.load_rule(), cfg.W, cfg.V, cfg.L, cfg.T, pairing=cfg.pairing)
    write_heatmap_csv(h, out / "heatmap.csv")
    write_pgm(h.values, out / "heatmap.pgm")
    write_json(_heatmap_summary(h, cfg), out / "summary.json")
    print(f"wrote {out / 'heatmap.csv'}, heatmap.pgm, summary.json")
    return 0


def cmd_scan(args) -> int:
    Ns = parse_N_range(args.N)
    cfg = _config(args, N=Ns[0], T=1, L=1)
    out = _outdir(args.out)
    res = scan_scrambling_times(
        Ns, cfg.W, cfg.V, t_max=args.t_max, rule=lambda n: cfg.load_rule(n),
        threshold=cfg.threshold, pairing=cfg.pairing,
    )

    def cell(x):
        return "NA" if x is None else x

    write_table(
        ["N", "t_star", "xi_witness"],
        [(r.N, cell(r.t_star), cell(r.xi_witness)) for r in res.rows],
        out / "scan.csv",
    )
    write_json(
        {
            "rule": res.rule_name, "W": res.W.label, "V": res.V.label, "t_max": res.t_max,
            "pairing": cfg.pairing, "threshold": cfg.threshold, "jumps": res.jumps,
            "ranges": [
                {"N_min": lo, "N_max": hi, "t_star": t, "xi_witness": w}
                for lo, hi, t, w in res.ranges()
            ],
        },
        out / "jumps.json",
    )
    print(f"jumps at N = {res.jumps}")
    return 0


def cmd_whitney(args) -> int:
    if args.t_max < 0:
        raise ConfigError("--t-max must be non-negative")
    out = _outdir(args.out)
    seq = whitney_sequence(args.t_max, oracle_max_t=args.oracle_max_t)
    write_table(
        ["t", "W_2t", "oracle_checked"],
        [(t, w, str(ok).lower()) for (t, w), ok in zip(seq.values, seq.oracle_checked)],
        out / "whitney.csv",
    )
    print(" ".join(str(w) for w in seq.as_list()))
    return 0


def cmd_fractal(args) -> int:
    T_values = args.T
    if len(T_values) < 4:
        raise ConfigError(f"need at least 4 horizons, got {len(T_values)}")
    if not 0 < args.threshold <= 4:
        raise ConfigError(f"threshold must lie in (0, 4], got {args.threshold}")
    out = _outdir(args.out)
    if args.pattern == "filled-cone":
        series = box_count_heatmap(filled_cone(max(T_values)), T_values, args.threshold)
        meta = {"pattern": "filled-cone"}
    else:
        cfg = _config(args, T=max(T_values))
        series = box_count_rule(cfg.load_rule(), cfg.W, cfg.V, T_values, cfg.threshold, cfg.pairing)
        meta = {"pattern": "rule", "rule": args.rule, "N": cfg.N, "W": cfg.W.label,
                "V": cfg.V.label, "pairing": cfg.pairing}
    write_table(
        ["T", "sum_f", "log_T", "log_sum_f"],
        [
            (int(T), int(s), f"{lt:.12g}", f"{ls:.12g}")
            for T, s, lt, ls in zip(series.T_values, series.sum_f, series.log_T, series.log_sum_f)
        ],
        out / "boxcount.csv",
    )
    write_json(
        {
            **meta, "D": series.D, "intercept": series.intercept, "threshold": series.threshold,
            "fit_window": [int(T) for T in series.T_values[series.fit_start:]],
        },
        out / "fit.json",
    )
    print(f"D = {series.D:.4f}")
    return 0


def cmd_scar(args) -> int:
    cfg = _config(args)
    out = _outdir(args.out)
    cmp = primal_scar_check(
        cfg.N, args.kappa, args.prime, args.ell, cfg.W, T=cfg.T, L=cfg.L,
        rule=lambda n: load_rule(cfg.rule, n), pairing=cfg.pairing,
    )
    write_heatmap_csv(cmp.composite, out / "heatmap_composite.csv")
    write_pgm(cmp.composite.values, out / "heatmap_composite.pgm")
    write_heatmap_csv(cmp.base, out / "heatmap_base.csv")
    write_pgm(cmp.base.values, out / "heatmap_base.pgm")
    write_json(
        {
            "N": cmp.N_composite, "kappa": cmp.kappa, "prime": cmp.prime, "ell": cmp.ell,
            "W_base": cfg.W.label, "exact_match": cmp.exact_match,
            "zero_pattern_match": cmp.zero_pattern_match,
            "max_cell_deviation": cmp.max_cell_deviation,
            "mismatched_cells": cmp.mismatched_cells,
        },
        out / "scar.json",
    )
    print(f"exact_match = {cmp.exact_match}")
    return 0 if cmp.exact_match else 2


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cqca", description="Clifford QCA scrambling experiments")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("heatmap", help="space-time map of the squared commutator")
    _add_common(p)
    p.set_defaults(func=cmd_heatmap)

    p = sub.add_parser("scan", help="scrambling time over a range of N")
    _add_common(p, N=False, T=False)
    p.add_argument("--N", required=True, help="range such as 2..378, or a comma list")
    p.add_argument("--t-max", type=int, default=40)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("whitney", help="Whitney numbers W_2t with brute-force cross-check")
    p.add_argument("--t-max", type=int, required=True)
    p.add_argument("--oracle-max-t", type=int, default=BRUTE_FORCE_MAX_T)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_whitney)

    p = sub.add_parser("fractal", help="box-counting dimension")
    _add_common(p, N=False, T=False)
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--T", type=_int_list, default=[64, 128, 256, 512, 1024], help="comma-separated horizons")
    p.add_argument("--pattern", choices=("rule", "filled-cone"), default="rule")
    p.set_defaults(func=cmd_fractal)

    p = sub.add_parser("scar", help="primal scar comparison at N = kappa p^ell")
    _add_common(p, V=False)
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.set_defaults(func=cmd_scar)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ScarError, FileNotFoundError) as exc:
        print(f"cqca: error: {exc}", file=sys.stderr)
        return 1
    except WhitneyMismatch as exc:
        print(f"cqca: consistency failure: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"cqca: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"cqca: cannot write output: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
