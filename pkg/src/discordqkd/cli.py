"""Command-line interface.

Subcommands:

* ``eval``       one protocol evaluation, printed as a single result row
* ``sweep``      one-parameter grid written as CSV or JSON
* ``figure``     preset sweeps reproducing the standard curve families
* ``threshold``  bisection search for a key-rate sign change
* ``discord``    Gaussian discord of a source state
* ``ppt``        smallest partial-transpose symplectic eigenvalue

Exit codes: 0 success, 2 invalid parameters or unknown figure, 3 non-physical
state, 4 I/O failure, 5 no sign change in a threshold bracket.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

from .channel import ChannelParams
from .errors import (
    DegenerateInput,
    DegenerateMatrix,
    GaussianStateError,
    InvalidParameter,
    NonPhysicalState,
    NoSignChange,
    UnknownFigure,
    UnsupportedState,
)
from .keyrate import Detection, Reconciliation, make_source_state
from .states import DiscordStateParams, EprStateParams, gaussian_discord
from .sweeps import (
    FIGURE_IDS,
    FIGURE_STEPS,
    SweepSpec,
    SWEEPABLE,
    evaluate_point,
    figure_table,
    rows_to_csv,
    rows_to_json,
    run_sweep,
    table_to_csv,
    threshold_on_discord,
    threshold_on_t,
    write_text_atomic,
)
from .symplectic import ppt_min_eigenvalue

_CONFIG_KEYS = {
    "state": str,
    "vd": float,
    "ve": float,
    "t": float,
    "w": float,
    "det": str,
    "rec": str,
    "sweep": str,
    "range": str,
    "steps": int,
    "format": str,
    "out": str,
    "units": str,
}


def _add_common(parser: argparse.ArgumentParser, *, protocol: bool = True) -> None:
    parser.add_argument("--state", choices=["discord", "epr"], default=None,
                        help="source state kind (inferred from --vd/--ve when omitted)")
    parser.add_argument("--vd", type=float, default=None,
                        help="discord-state diagonal variance V_D = V + 1 (>= 1)")
    parser.add_argument("--ve", type=float, default=None,
                        help="EPR state variance V_E (>= 1)")
    parser.add_argument("--t", type=float, default=None, help="channel transmission in [0, 1]")
    parser.add_argument("--w", type=float, default=None, help="cloner variance W (>= 1)")
    if protocol:
        parser.add_argument("--det", choices=["hom", "het"], default=None, help="detection")
        parser.add_argument("--rec", choices=["dr", "rr"], default=None, help="reconciliation")
    parser.add_argument("--config", default=None,
                        help="key=value file supplying defaults; flags take precedence")


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=["csv", "json"], default=None,
                        help="output format (default csv)")
    parser.add_argument("--out", default=None, help="output path (default stdout)")
    parser.add_argument("--clamp-negative", action="store_true",
                        help="report negative key rates as 0 (plotting aid)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discordqkd",
        description="Gaussian-discord CV-QKD calculator: discord, separability, "
                    "and secret key rates under an entangling-cloner attack.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one protocol configuration")
    _add_common(p_eval)
    _add_output(p_eval)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter over a grid")
    _add_common(p_sweep)
    p_sweep.add_argument("--sweep", choices=list(SWEEPABLE), default=None, required=False,
                         help="parameter to sweep")
    p_sweep.add_argument("--range", default=None, help="sweep range as lo:hi")
    p_sweep.add_argument("--steps", type=int, default=None, help="number of grid points (>= 2)")
    _add_output(p_sweep)

    p_fig = sub.add_parser("figure", help="write a preset figure data file")
    p_fig.add_argument("figure_id", help="one of: " + ", ".join(FIGURE_IDS))
    p_fig.add_argument("--w", type=float, default=None, help="override the pinned W = 1")
    p_fig.add_argument("--steps", type=int, default=None, help="override the 201-point grid")
    p_fig.add_argument("--config", default=None)
    _add_output(p_fig)

    p_thr = sub.add_parser("threshold", help="locate a key-rate sign change by bisection")
    _add_common(p_thr)
    p_thr.add_argument("--sweep", choices=["t", "discord"], required=False, default=None,
                       help="quantity the threshold is reported on")
    p_thr.add_argument("--range", default=None, help="search bracket as lo:hi")

    p_disc = sub.add_parser("discord", help="Gaussian discord of a source state")
    _add_common(p_disc, protocol=False)
    p_disc.add_argument("--units", choices=["bits", "nats"], default=None,
                        help="logarithm convention (default bits)")

    p_ppt = sub.add_parser("ppt", help="partial-transpose eigenvalue of a source state")
    _add_common(p_ppt, protocol=False)

    return parser


def _apply_config_file(args: argparse.Namespace) -> None:
    path = getattr(args, "config", None)
    if not path:
        return
    with open(path) as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameter(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in _CONFIG_KEYS:
                raise InvalidParameter(f"{path}:{lineno}: unknown config key {key!r}")
            if hasattr(args, key) and getattr(args, key) is None:
                try:
                    setattr(args, key, _CONFIG_KEYS[key](value))
                except ValueError as exc:
                    raise InvalidParameter(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc


def _resolve_state(args: argparse.Namespace) -> tuple[str, float]:
    state = args.state
    if state is None:
        if (args.vd is None) == (args.ve is None):
            raise InvalidParameter("specify --state, or exactly one of --vd/--ve")
        state = "discord" if args.vd is not None else "epr"
    if state == "discord":
        if args.ve is not None:
            raise InvalidParameter("--ve is only valid with --state epr")
        if args.vd is None:
            raise InvalidParameter("--vd is required for the discord state")
        if args.vd < 1.0:
            raise InvalidParameter(f"--vd must be >= 1 (V = V_D - 1 >= 0), got {args.vd!r}")
        return state, args.vd
    if args.vd is not None:
        raise InvalidParameter("--vd is only valid with --state discord")
    if args.ve is None:
        raise InvalidParameter("--ve is required for the EPR state")
    return state, args.ve


def _source_params(state: str, variance: float):
    if state == "discord":
        return DiscordStateParams(v=variance - 1.0)
    return EprStateParams(v_e=variance)


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise InvalidParameter(f"--{name} is required")


def _parse_range(text: str) -> tuple[float, float]:
    try:
        lo_s, hi_s = text.split(":", 1)
        lo, hi = float(lo_s), float(hi_s)
    except ValueError as exc:
        raise InvalidParameter(f"--range must be lo:hi, got {text!r}") from exc
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise InvalidParameter(f"--range must satisfy lo < hi, got {text!r}")
    return lo, hi


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        write_text_atomic(text, out)
    else:
        sys.stdout.write(text)


def _protocols(args: argparse.Namespace) -> tuple[list[Detection], list[Reconciliation]]:
    dets = [Detection(args.det)] if args.det else list(Detection)
    recs = [Reconciliation(args.rec)] if args.rec else list(Reconciliation)
    return dets, recs


def _rows_text(rows: list[ResultRow], fmt: Optional[str]) -> str:
    return rows_to_json(rows) if fmt == "json" else rows_to_csv(rows)


def _cmd_eval(args: argparse.Namespace) -> int:
    state, variance = _resolve_state(args)
    _require(args, "t", "w", "det", "rec")
    row = evaluate_point(
        state, variance, args.t, args.w,
        Detection(args.det), Reconciliation(args.rec),
        clamp_negative=args.clamp_negative,
    )
    if row.error:
        raise NonPhysicalState(row.error)
    _emit(_rows_text([row], args.format), args.out)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    if args.sweep is None:
        raise InvalidParameter("--sweep is required")
    if args.range is None:
        raise InvalidParameter("--range is required")
    lo, hi = _parse_range(args.range)
    steps = args.steps if args.steps is not None else FIGURE_STEPS
    swept = args.sweep
    state = args.state
    if state is None:
        if swept in ("vd", "ve"):
            state = "discord" if swept == "vd" else "epr"
        else:
            raise InvalidParameter("--state is required when sweeping t or w")
    variance: Optional[float] = None
    if swept in ("vd", "ve"):
        if args.vd is not None or args.ve is not None:
            raise InvalidParameter(f"the swept parameter {swept!r} must not also be fixed")
    else:
        _, variance = _resolve_state(args)
    for name in ("t", "w"):
        if name == swept:
            if getattr(args, name) is not None:
                raise InvalidParameter(f"the swept parameter {swept!r} must not also be fixed")
        elif getattr(args, name) is None:
            raise InvalidParameter(f"--{name} is required")
    dets, recs = _protocols(args)
    spec = SweepSpec(
        parameter=swept, lo=lo, hi=hi, steps=steps, state=state,
        variance=variance, t=args.t, w=args.w,
        detections=dets, reconciliations=recs,
        clamp_negative=args.clamp_negative,
    )
    _emit(_rows_text(run_sweep(spec), args.format), args.out)
    return 0


def _cmd_figure(args: argparse.Namespace) -> int:
    w = args.w if args.w is not None else 1.0
    steps = args.steps if args.steps is not None else FIGURE_STEPS
    ChannelParams(t=0.5, w=w)  # validate the override early
    header, table = figure_table(
        args.figure_id, w=w, steps=steps, clamp_negative=args.clamp_negative
    )
    if args.format == "json":
        text = json.dumps([dict(zip(header, row)) for row in table], indent=2) + "\n"
    else:
        text = table_to_csv(header, table)
    _emit(text, args.out)
    return 0


def _cmd_threshold(args: argparse.Namespace) -> int:
    if args.sweep is None:
        raise InvalidParameter("--sweep is required")
    _require(args, "w", "det", "rec")
    det, rec = Detection(args.det), Reconciliation(args.rec)
    if args.sweep == "t":
        state, variance = _resolve_state(args)
        bracket = _parse_range(args.range) if args.range else (0.01, 0.99)
        value = threshold_on_t(state, variance, args.w, det, rec, bracket=bracket)
    else:
        _require(args, "t")
        if args.ve is not None or (args.state not in (None, "discord")):
            raise InvalidParameter("discord thresholds are defined for the discord state only")
        if args.vd is not None:
            raise InvalidParameter("the swept parameter 'discord' must not also be fixed")
        bracket = _parse_range(args.range) if args.range else (1.0, 1000.0)
        value = threshold_on_discord(args.t, args.w, det, rec, bracket=bracket)
    sys.stdout.write(repr(value) + "\n")
    return 0


def _cmd_discord(args: argparse.Namespace) -> int:
    state, variance = _resolve_state(args)
    sigma = make_source_state(_source_params(state, variance))
    base = math.e if args.units == "nats" else 2.0
    sys.stdout.write(repr(gaussian_discord(sigma, log_base=base)) + "\n")
    return 0


def _cmd_ppt(args: argparse.Namespace) -> int:
    state, variance = _resolve_state(args)
    sigma = make_source_state(_source_params(state, variance))
    sys.stdout.write(repr(ppt_min_eigenvalue(sigma)) + "\n")
    return 0


_COMMANDS = {
    "eval": _cmd_eval,
    "sweep": _cmd_sweep,
    "figure": _cmd_figure,
    "threshold": _cmd_threshold,
    "discord": _cmd_discord,
    "ppt": _cmd_ppt,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_config_file(args)
        return _COMMANDS[args.command](args)
    except NoSignChange as exc:
        print(
            f"error: no sign change: key_rate({exc.lo!r}) = {exc.f_lo!r}, "
            f"key_rate({exc.hi!r}) = {exc.f_hi!r}",
            file=sys.stderr,
        )
        return 5
    except NonPhysicalState as exc:
        print(f"error: non-physical state: {exc}", file=sys.stderr)
        return 3
    except (InvalidParameter, UnknownFigure, UnsupportedState,
            DegenerateInput, DegenerateMatrix) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GaussianStateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
