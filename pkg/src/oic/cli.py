"""Command-line front end.

Every command writes a CSV table preceded by ``#`` metadata lines (tool
version, full parameter echo). SNR arguments must carry a unit suffix,
``dB`` or ``lin``; bare numbers are rejected.

Exit codes: 0 success, 2 usage or validation error, 1 internal error.
"""

from __future__ import annotations

import argparse
import io
import math
import re
import sys
from pathlib import Path

import numpy as np

from oic import __version__
from oic.adaptation import classify, rate_noic, rate_oic
from oic.allocator import allocate_conventional, allocate_intercepted, blocks_for_channel
from oic.core import ChannelParams, capacity, db_to_linear, linear_to_db
from oic.scenarios import LineScenario, McConfig, line_rate_curve, mc_run, power_gap_curve

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2

_SNR_RE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(dB|db|lin)\s*$")


class UsageError(Exception):
    """Bad arguments or input files; reported with exit code 2."""


def parse_snr(text: str) -> float:
    """Parse ``'20dB'`` or ``'100lin'`` into a linear ratio."""
    match = _SNR_RE.match(text)
    if not match:
        raise UsageError(f"SNR {text!r} needs a unit suffix 'dB' or 'lin'")
    value, unit = float(match.group(1)), match.group(2).lower()
    if unit == "db":
        return float(db_to_linear(value))
    if value < 0:
        raise UsageError(f"linear SNR must be >= 0, got {text!r}")
    return value


def _snr_unit(text: str) -> str:
    match = _SNR_RE.match(text)
    if not match:
        raise UsageError(f"SNR {text!r} needs a unit suffix 'dB' or 'lin'")
    return match.group(2).lower()


def parse_snr_grid(text: str) -> list[float]:
    """Grid of linear SNRs from ``'a,b,c'`` or ``'START:STOP:COUNT'``.

    For the range form both endpoints carry the same unit and the points are
    evenly spaced in that unit.
    """
    text = text.strip()
    if not text:
        raise UsageError("grid is empty")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range grid must be START:STOP:COUNT, got {text!r}")
        start, stop, count = parts
        unit = _snr_unit(start)
        if _snr_unit(stop) != unit:
            raise UsageError("range grid endpoints must use the same unit")
        try:
            n = int(count)
        except ValueError:
            raise UsageError(f"grid count must be an integer, got {count!r}") from None
        if n < 1:
            raise UsageError("grid is empty")
        if unit == "db":
            lo = float(_SNR_RE.match(start).group(1))
            hi = float(_SNR_RE.match(stop).group(1))
            grid = [float(db_to_linear(d)) for d in np.linspace(lo, hi, n)]
        else:
            grid = np.linspace(parse_snr(start), parse_snr(stop), n).tolist()
    else:
        grid = [parse_snr(item) for item in text.split(",") if item.strip()]
        if not grid:
            raise UsageError("grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise UsageError("grid must be strictly ascending")
    return grid


def _parse_number(text: str, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise UsageError(f"{what} must be a number, got {text!r}") from None
    if not math.isfinite(value):
        raise UsageError(f"{what} must be finite, got {text!r}")
    return value


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".12g")


def render_csv(command: str, meta, columns, rows, footer=None) -> str:
    buf = io.StringIO()
    buf.write(f"# oic {__version__} {command}\n")
    for key, value in meta:
        buf.write(f"# {key}={value}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    if footer:
        buf.write("# " + ",".join(f"{k}={_fmt(v)}" for k, v in footer) + "\n")
    return buf.getvalue()


def _write(text: str, output):
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def cmd_rate_curve(args) -> str:
    gamma_p = parse_snr(args.gamma_p)
    beta_p = parse_snr(args.beta_p)
    grid = parse_snr_grid(args.gamma_s_grid)
    params = ChannelParams(1.0, gamma_p, beta_p)
    rows = [(g, rate_oic(g, params), rate_noic(g, params), str(classify(g, params))) for g in grid]
    meta = [("gamma_p", f"{gamma_p!r} lin"), ("beta_p", f"{beta_p!r} lin"), ("gamma_s_grid", args.gamma_s_grid)]
    return render_csv("rate-curve", meta, ["gamma_s", "rate_oic", "rate_noic", "regime"], rows)


def read_channels(path) -> list[ChannelParams]:
    """Read a channel table: one ``nu gamma_p beta_p`` triple per line.

    Fields are separated by whitespace or commas; ``nu`` is a plain number
    (an optional ``lin`` suffix is allowed), the SNRs need a unit suffix.
    Text after ``#`` is ignored.
    """
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read channels file {path}: {exc}") from None
    channels = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f for f in re.split(r"[,\s]+", line) if f]
        if len(fields) != 3:
            raise UsageError(f"{path}:{lineno}: expected 3 fields (nu gamma_p beta_p), got {len(fields)}")
        try:
            nu_text = fields[0][:-3] if fields[0].endswith("lin") else fields[0]
            nu = _parse_number(nu_text, "nu")
            gamma_p = parse_snr(fields[1])
            beta_p = parse_snr(fields[2])
            channels.append(ChannelParams(nu, gamma_p, beta_p))
        except (UsageError, ValueError) as exc:
            raise UsageError(f"{path}:{lineno}: {exc}") from None
    if not channels:
        raise UsageError(f"{path}: no channels found")
    return channels


def cmd_allocate(args) -> str:
    total = _parse_number(args.total, "total energy")
    if total < 0:
        raise UsageError(f"total energy must be >= 0, got {total}")
    channels = read_channels(args.channels)
    oic_alloc = allocate_intercepted(total, channels)
    eff_noise = [c.nu * (1.0 + c.gamma_p) for c in channels]
    conv = allocate_conventional(total, eff_noise)
    rows = []
    for m, c in enumerate(channels):
        rows.append(
            (
                m + 1,
                c.nu,
                c.gamma_p,
                c.beta_p,
                blocks_for_channel(c).cap,
                oic_alloc.energies[m],
                conv.energies[m],
                oic_alloc.per_channel_rates[m],
            )
        )
    columns = ["channel", "nu", "gamma_p", "beta_p", "cap", "energy_oic", "energy_conventional", "rate_oic"]
    meta = [("total", repr(total)), ("channels_file", args.channels), ("channels", len(channels))]
    footer = [
        ("sum_rate_oic", oic_alloc.sum_rate),
        ("sum_rate_noic", conv.sum_rate),
        ("water_marginal", oic_alloc.water_marginal),
    ]
    return render_csv("allocate", meta, columns, rows, footer)


def cmd_line(args) -> str:
    beta_p = parse_snr(args.beta_p)
    gamma_s = parse_snr(args.gamma_s)
    v = _parse_number(args.v, "v")
    if v <= 0:
        raise UsageError(f"propagation coefficient must be > 0, got {v}")
    if not (0 < args.x_min < args.x_max):
        raise UsageError(f"need 0 < x_min < x_max, got {args.x_min}, {args.x_max}")
    if args.points < 2:
        raise UsageError(f"points must be >= 2, got {args.points}")
    if beta_p <= 0:
        raise UsageError("beta_p must be > 0")
    x_grid = np.linspace(args.x_min, args.x_max, args.points).tolist()
    curve = line_rate_curve(LineScenario(beta_p, v, gamma_s, x_grid))
    meta = [
        ("beta_p", f"{beta_p!r} lin"),
        ("v", repr(v)),
        ("gamma_s", f"{gamma_s!r} lin"),
        ("x_min", repr(args.x_min)),
        ("x_max", repr(args.x_max)),
        ("points", args.points),
    ]
    columns = ["x", "gamma_p", "rate_noic", "rate_oic", "regime"]
    target = None
    if args.target_rate is not None:
        target = _parse_number(args.target_rate, "target rate")
    elif args.target_snr is not None:
        target = capacity(parse_snr(args.target_snr))
    if target is None:
        rows = [(r.x, r.gamma_p, r.rate_noic, r.rate_oic, str(r.regime)) for r in curve]
        return render_csv("line", meta, columns, rows)
    if target <= 0:
        raise UsageError(f"target rate must be > 0, got {target}")
    meta.append(("target_rate", repr(target)))
    gaps = power_gap_curve(target, beta_p, v, x_grid)
    columns += ["required_snr_noic_dB", "required_snr_oic_dB", "gap_dB", "inversion_branch"]
    rows = [
        (
            r.x,
            r.gamma_p,
            r.rate_noic,
            r.rate_oic,
            str(r.regime),
            linear_to_db(g.required_snr_noic),
            linear_to_db(g.required_snr_oic),
            g.gap_db,
            str(g.branch),
        )
        for r, g in zip(curve, gaps)
    ]
    return render_csv("line", meta, columns, rows)


_MC_KEYS = {"channels", "mean_gamma_p", "mean_beta_p", "iterations", "energy_grid", "snr_per_channel_grid", "seed"}


def _parse_energy_grid(text: str) -> list[float]:
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"energy_grid range must be START:STOP:COUNT, got {text!r}")
        start, stop = _parse_number(parts[0], "grid start"), _parse_number(parts[1], "grid stop")
        try:
            n = int(parts[2])
        except ValueError:
            raise UsageError(f"grid count must be an integer, got {parts[2]!r}") from None
        if n < 1:
            raise UsageError("energy_grid is empty")
        return np.linspace(start, stop, n).tolist()
    grid = [_parse_number(item, "energy") for item in text.split(",") if item.strip()]
    if not grid:
        raise UsageError("energy_grid is empty")
    return grid


def read_mc_config(path) -> tuple[McConfig, list[tuple[str, str]]]:
    """Parse a flat ``key = value`` Monte-Carlo config file.

    Keys: ``channels``, ``mean_gamma_p`` (SNR), ``mean_beta_p`` (SNR or
    ``inf``), ``iterations``, ``seed`` and exactly one of ``energy_grid``
    (plain energies) or ``snr_per_channel_grid`` (SNRs; energy is
    ``channels`` times the linear value).
    """
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    raw: dict[str, str] = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _MC_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise UsageError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    if "seed" not in raw:
        raise UsageError(f"{path}: 'seed' is required so runs are reproducible")
    for key in ("channels", "mean_gamma_p", "mean_beta_p", "iterations"):
        if key not in raw:
            raise UsageError(f"{path}: missing key {key!r}")
    if ("energy_grid" in raw) == ("snr_per_channel_grid" in raw):
        raise UsageError(f"{path}: give exactly one of 'energy_grid' or 'snr_per_channel_grid'")

    def as_int(key):
        try:
            return int(raw[key])
        except ValueError:
            raise UsageError(f"{path}: {key} must be an integer, got {raw[key]!r}") from None

    channels = as_int("channels")
    if "energy_grid" in raw:
        grid = _parse_energy_grid(raw["energy_grid"])
    else:
        grid = [channels * g for g in parse_snr_grid(raw["snr_per_channel_grid"])]
    mean_beta = math.inf if raw["mean_beta_p"].lower() in ("inf", "infinity") else parse_snr(raw["mean_beta_p"])
    cfg = McConfig(
        channels=channels,
        mean_gamma_p=parse_snr(raw["mean_gamma_p"]),
        mean_beta_p=mean_beta,
        iterations=as_int("iterations"),
        energy_grid=grid,
        seed=as_int("seed"),
    )
    meta = [(k, raw[k]) for k in sorted(raw)]
    meta += [("mean_gamma_p_lin", repr(cfg.mean_gamma_p)), ("mean_beta_p_lin", repr(cfg.mean_beta_p))]
    meta.append(("rng", "numpy PCG64, SeedSequence(seed, spawn_key=(iteration,))"))
    return cfg, meta


def cmd_mc(args) -> str:
    if args.workers < 1:
        raise UsageError(f"workers must be >= 1, got {args.workers}")
    cfg, meta = read_mc_config(args.config)
    rows = mc_run(cfg, workers=args.workers)
    columns = [
        "energy",
        "avg_snr_per_channel",
        "avg_sum_rate_oic",
        "avg_sum_rate_noic",
        "avg_rel_diff_paper",
        "avg_rel_diff_companion",
    ]
    return render_csv("mc", meta, columns, rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oic",
        description="Secondary-user rates with opportunistic interference cancellation.",
    )
    parser.add_argument("--version", action="version", version=f"oic {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate-curve", help="OIC and no-IC rate versus secondary SNR")
    p.add_argument("--gamma-p", required=True, help="primary SNR, e.g. 20lin")
    p.add_argument("--beta-p", required=True, help="minimum SNR to decode the primary, e.g. 5lin")
    p.add_argument("--gamma-s-grid", required=True, help="'0lin:30lin:301' or '1lin,3lin,10lin'")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_rate_curve)

    p = sub.add_parser("allocate", help="intercepted vs conventional water-filling")
    p.add_argument("--total", required=True, help="total normalized energy")
    p.add_argument("--channels", required=True, help="channel table file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("line", help="rates (and optionally power gap) along the distance line")
    p.add_argument("--beta-p", required=True, help="primary SNR at the cell edge x=1")
    p.add_argument("--v", required=True, help="propagation coefficient")
    p.add_argument("--gamma-s", required=True, help="secondary SNR")
    p.add_argument("--x-min", type=float, required=True)
    p.add_argument("--x-max", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    target = p.add_mutually_exclusive_group()
    target.add_argument("--target-rate", help="target secondary rate in bps/Hz")
    target.add_argument("--target-snr", help="target rate given as C(snr), e.g. 10lin")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_line)

    p = sub.add_parser("mc", help="multi-channel Monte-Carlo study")
    p.add_argument("--config", required=True, help="key = value config file")
    p.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_mc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"oic: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"oic: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    _write(text, args.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
