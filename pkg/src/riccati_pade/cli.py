"""Command line surface: convergence sequences, exact eigenvalues, scans.

Subcommands
-----------
sequence   one Hankel-root sequence at fixed strength, exact row appended
exact      exact eigenvalue from the Bessel-order oracle
scan       sequence limit vs exact value over a strength grid (CSV/JSON)
table      built-in reference convergence tables (selector 1 or 2)

Common flags on every subcommand: --digits (significant digits printed,
default 20), --precision-bits (working precision, default derived from the
largest determinant dimension), --format {text,csv,json}, --out PATH.

Exit codes: 0 success, 1 partial failure (some rows failed), 2 usage error.
All numeric output is fixed-point with exactly --digits significant digits;
JSON carries the same strings to avoid losing precision to binary floats.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import mpmath

from .mpnum import LOG10_2, PrecisionCtx, default_mantissa_bits
from .oracle import exact_eigenvalue, find_eigenvalue, is_effectively_real, oracle_scan
from .rpm import NewtonConfig, hankel_sequence

DEFAULT_DIGITS = 20
DEFAULT_SCAN_DIM = 16
DEFAULT_GRID = "0.1:5.0:0.1"
_SCAN_COLUMNS = ("lambda", "re_rpm", "im_rpm", "re_exact", "im_exact",
                 "log10_err_re", "log10_err_im", "status")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    digits: int = DEFAULT_DIGITS
    precision_bits: int | None = None
    fmt: str = "text"
    out: str | None = None
    lam: str | None = None
    lambda_grid: tuple = ()
    shift: int = 0
    dim_min: int = 10
    dim_max: int = 20
    seed: str | None = None
    nu_seed: str | None = None
    table_id: int = 0


@dataclass(frozen=True)
class ScanRow:
    lam: object
    eps_rpm: object  # mpc or None
    eps_exact: object  # mpc or None
    log10_err_re: object  # mpf or None
    log10_err_im: object
    status: str


# Reference table layout: (strength, dim_min, dim_max, print exact row).
TABLE_BLOCKS = {
    1: (("0.5", 10, 20, True), ("2", 10, 20, True)),
    2: (("100", 5, 17, False), ("4489", 5, 16, False)),
}


def _bits_for_digits(digits: int) -> int:
    return int(math.ceil((digits + 5) / LOG10_2)) + 16


def make_ctx(cfg: RunConfig, dim_max: int | None = None) -> PrecisionCtx:
    """Working precision for a run: explicit --precision-bits, else derived
    from the largest determinant dimension and the requested digits."""
    if cfg.precision_bits is not None:
        bits = cfg.precision_bits
    else:
        bits = max(
            default_mantissa_bits(dim_max if dim_max is not None else 20),
            _bits_for_digits(cfg.digits),
            128,
        )
    try:
        return PrecisionCtx(bits, cfg.digits)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _parse_complex_pair(text: str, ctx: PrecisionCtx):
    parts = text.split(",")
    if len(parts) == 1:
        return ctx.cnum(parts[0].strip())
    if len(parts) == 2:
        return ctx.cnum(parts[0].strip(), parts[1].strip())
    raise UsageError(f"cannot parse complex value {text!r}; expected RE or RE,IM")


def _sequence_seed(lam, user_seed, ctx: PrecisionCtx, cfg_newton: NewtonConfig):
    """Starting point for the warmup: user value, else the oracle eigenvalue
    (kicked off the real axis when it is real, since a real seed can only
    reach real determinant roots)."""
    if user_seed is not None:
        return _parse_complex_pair(user_seed, ctx), None
    oracle_root = find_eigenvalue(lam, cfg_newton, ctx)
    if not (oracle_root.converged and oracle_root.admissible):
        raise UsageError(
            f"oracle seeding failed for lambda={lam}; supply --seed RE,IM"
        )
    seed = oracle_root.epsilon
    if is_effectively_real(oracle_root, ctx):
        seed = seed + ctx.cnum(0, "0.1") * max(abs(seed), ctx.real(1))
    return seed, oracle_root


def _run_sequence_block(lam_str, shift, dim_min, dim_max, cfg: RunConfig,
                        ctx: PrecisionCtx, want_exact: bool):
    """Shared by cmd_sequence and cmd_table: rows plus optional exact row."""
    newton = NewtonConfig()
    lam = ctx.real(lam_str)
    if not lam > 0:
        raise UsageError("lambda must be positive")
    seed, oracle_root = _sequence_seed(lam, cfg.seed, ctx, newton)
    if want_exact and oracle_root is None and cfg.seed is not None:
        oracle_root = find_eigenvalue(lam, newton, ctx)
    if want_exact and oracle_root is None:
        try:
            oracle_root = find_eigenvalue(lam, newton, ctx)
        except ArithmeticError:
            oracle_root = None
    report = hankel_sequence(lam, shift, dim_min, dim_max, seed, newton, ctx)
    return report, (oracle_root if want_exact else None)


def _sequence_lines(report, oracle_root, ctx, fmt):
    fr = ctx.format_real
    rows = []
    for entry in report.entries:
        rows.append(
            {
                "D": str(entry.spec.dim),
                "re": fr(entry.epsilon.real),
                "im": fr(entry.epsilon.imag),
                "converged": "true" if entry.converged else "false",
            }
        )
    if oracle_root is not None and oracle_root.converged and oracle_root.admissible:
        rows.append(
            {
                "D": "Exact",
                "re": fr(oracle_root.epsilon.real),
                "im": fr(oracle_root.epsilon.imag),
                "converged": "true",
            }
        )
    if fmt == "csv":
        lines = ["D,re,im,converged"]
        lines += [f"{r['D']},{r['re']},{r['im']},{r['converged']}" for r in rows]
    elif fmt == "json":
        return [json.dumps(rows, indent=None, separators=(",", ":"))]
    else:
        lines = ["D  Re(eps)  Im(eps)"]
        for r in rows:
            mark = "" if r["converged"] == "true" else "  [not converged]"
            lines.append(f"{r['D']}  {r['re']}  {r['im']}{mark}")
    return lines


def cmd_sequence(cfg: RunConfig) -> tuple[str, int]:
    if cfg.dim_max < cfg.dim_min:
        raise UsageError("--dmax must be >= --dmin")
    if cfg.dim_min < 2:
        raise UsageError("--dmin must be at least 2")
    if cfg.shift < 0:
        raise UsageError("--d must be nonnegative")
    ctx = make_ctx(cfg, cfg.dim_max)
    report, oracle_root = _run_sequence_block(
        cfg.lam, cfg.shift, cfg.dim_min, cfg.dim_max, cfg, ctx, want_exact=True
    )
    header = f"lambda={cfg.lam} d={cfg.shift}"
    lines = _sequence_lines(report, oracle_root, ctx, cfg.fmt)
    if cfg.fmt == "text":
        lines = [header] + lines
    status = 0 if all(e.converged for e in report.entries) else 1
    return "\n".join(lines) + "\n", status


def cmd_exact(cfg: RunConfig) -> tuple[str, int]:
    ctx = make_ctx(cfg)
    newton = NewtonConfig()
    lam = ctx.real(cfg.lam)
    if not lam > 0:
        raise UsageError("lambda must be positive")
    if cfg.nu_seed is not None:
        root = exact_eigenvalue(lam, _parse_complex_pair(cfg.nu_seed, ctx), newton, ctx)
    else:
        root = find_eigenvalue(lam, newton, ctx)

    fr = ctx.format_real
    record = {
        "lambda": cfg.lam,
        "re_exact": fr(root.epsilon.real),
        "im_exact": fr(root.epsilon.imag),
        "nu_re": fr(root.nu.real),
        "nu_im": fr(root.nu.imag),
        "residual": mpmath.nstr(root.residual, 3),
        "real": "true" if is_effectively_real(root, ctx) else "false",
        "admissible": "true" if root.admissible else "false",
    }
    ok = root.converged and root.admissible
    if cfg.fmt == "csv":
        head = ",".join(record)
        body = ",".join(record.values())
        text = f"{head}\n{body}\n"
    elif cfg.fmt == "json":
        text = json.dumps(record, separators=(",", ":")) + "\n"
    else:
        text = "".join(f"{k} = {v}\n" for k, v in record.items())
    if not ok:
        print(f"oracle did not converge admissibly for lambda={cfg.lam}", file=sys.stderr)
        return text, 1
    return text, 0


def _scan_grid(cfg: RunConfig, ctx: PrecisionCtx):
    vals = [ctx.real(s) for s in cfg.lambda_grid]
    if not vals:
        raise UsageError("scan grid is empty")
    if any(v <= 0 for v in vals):
        raise UsageError("all grid strengths must be positive")
    if any(vals[i] >= vals[i + 1] for i in range(len(vals) - 1)):
        raise UsageError("grid must be strictly ascending")
    return vals


def cmd_scan(cfg: RunConfig) -> tuple[str, int]:
    ctx = make_ctx(cfg, cfg.dim_max)
    newton = NewtonConfig()
    grid = _scan_grid(cfg, ctx)

    oracle_roots = oracle_scan(grid, True, ctx, newton)

    # The determinant branch is tracked from the largest strength downward:
    # convergence weakens as the strength drops and an anchored start at
    # moderate dimension keeps Newton on the branch (a cold start from low
    # dimensions loses it below lam ~ 0.25).
    rpm_limits: list = [None] * len(grid)
    prev_limit = None
    for i in range(len(grid) - 1, -1, -1):
        lam = grid[i]
        oracle_root = oracle_roots[i]
        if prev_limit is not None:
            seed, warmup = prev_limit, 8
        elif oracle_root.converged and oracle_root.admissible:
            seed = oracle_root.epsilon
            if is_effectively_real(oracle_root, ctx):
                seed = seed + ctx.cnum(0, "0.1") * max(abs(seed), ctx.real(1))
            warmup = 2
        else:
            continue
        report = hankel_sequence(
            lam, cfg.shift, cfg.dim_max, cfg.dim_max, seed, newton, ctx,
            warmup_start=warmup,
        )
        entry = report.entries[-1]
        if entry.converged:
            rpm_limits[i] = entry.epsilon
            prev_limit = entry.epsilon

    rows = []
    for lam, oracle_root, rpm_eps in zip(grid, oracle_roots, rpm_limits):
        oracle_ok = oracle_root.converged and oracle_root.admissible
        eps_exact = oracle_root.epsilon if oracle_ok else None
        status_bits = []
        if rpm_eps is None:
            status_bits.append("no_rpm")
        if not oracle_ok:
            status_bits.append("no_exact")
        status = "+".join(status_bits) if status_bits else "ok"
        lre = lim = None
        if rpm_eps is not None and eps_exact is not None:
            dre = abs(eps_exact.real - rpm_eps.real)
            dim_ = abs(eps_exact.imag - rpm_eps.imag)
            floor = ctx.ldexp(1, -2 * ctx.mantissa_bits)
            lre = ctx.mp.log10(max(dre, floor))
            lim = ctx.mp.log10(max(dim_, floor))
        rows.append(ScanRow(lam, rpm_eps, eps_exact, lre, lim, status))

    fr = ctx.format_real

    def row_fields(r: ScanRow) -> tuple:
        return (
            fr(r.lam),
            "" if r.eps_rpm is None else fr(r.eps_rpm.real),
            "" if r.eps_rpm is None else fr(r.eps_rpm.imag),
            "" if r.eps_exact is None else fr(r.eps_exact.real),
            "" if r.eps_exact is None else fr(r.eps_exact.imag),
            "" if r.log10_err_re is None else fr(r.log10_err_re),
            "" if r.log10_err_im is None else fr(r.log10_err_im),
            r.status,
        )

    if cfg.fmt == "json":
        payload = [dict(zip(_SCAN_COLUMNS, row_fields(r))) for r in rows]
        text = json.dumps(payload, separators=(",", ":")) + "\n"
    else:  # csv is the figure-data format; "text" aliases to it
        lines = [",".join(_SCAN_COLUMNS)]
        for r in rows:
            lines.append(",".join(row_fields(r)))
        text = "\n".join(lines) + "\n"
    bad = any(r.status != "ok" for r in rows)
    return text, 1 if bad else 0


def cmd_table(cfg: RunConfig) -> tuple[str, int]:
    blocks = TABLE_BLOCKS.get(cfg.table_id)
    if blocks is None:
        raise UsageError("table selector must be 1 or 2")
    chunks = []
    worst = 0
    for lam_str, dmin, dmax, want_exact in blocks:
        block_cfg = RunConfig(
            command="sequence", digits=cfg.digits, precision_bits=cfg.precision_bits,
            lam=lam_str, shift=0, dim_min=dmin, dim_max=dmax,
        )
        ctx = make_ctx(block_cfg, dmax)
        report, oracle_root = _run_sequence_block(
            lam_str, 0, dmin, dmax, block_cfg, ctx, want_exact
        )
        lines = [f"lambda={lam_str}"] + _sequence_lines(report, oracle_root, ctx, "text")
        chunks.append("\n".join(lines))
        if not all(e.converged for e in report.entries):
            worst = 1
    return "\n\n".join(chunks) + "\n", worst


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, default=DEFAULT_DIGITS,
                        help="significant digits in all numeric output")
    common.add_argument("--precision-bits", type=int, default=None,
                        help="working mantissa bits (default: derived)")
    common.add_argument("--format", dest="fmt", choices=("text", "csv", "json"),
                        default="text")
    common.add_argument("--out", default=None, help="write output to this file")

    parser = argparse.ArgumentParser(
        prog="riccati-pade",
        description="Complex eigenvalues of the repulsive exponential potential",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_seq = sub.add_parser("sequence", parents=[common],
                           help="Hankel-root convergence sequence at one strength")
    p_seq.add_argument("--lambda", dest="lam", required=True)
    p_seq.add_argument("--d", dest="shift", type=int, default=0)
    p_seq.add_argument("--dmin", type=int, default=10)
    p_seq.add_argument("--dmax", type=int, default=20)
    p_seq.add_argument("--seed", default=None, help="starting energy RE,IM")

    p_exact = sub.add_parser("exact", parents=[common],
                             help="exact eigenvalue from the order oracle")
    p_exact.add_argument("--lambda", dest="lam", required=True)
    p_exact.add_argument("--nu-seed", dest="nu_seed", default=None,
                         help="starting order RE,IM (skips discovery)")

    p_scan = sub.add_parser("scan", parents=[common],
                            help="sequence limit vs exact value over a grid")
    p_scan.add_argument("--grid", default=None, help="START:STOP:STEP (default 0.1:5.0:0.1)")
    p_scan.add_argument("--lambdas", default=None, help="comma-separated strengths")
    p_scan.add_argument("--dmax", type=int, default=DEFAULT_SCAN_DIM)
    p_scan.add_argument("--d", dest="shift", type=int, default=0)

    p_table = sub.add_parser("table", parents=[common],
                             help="built-in reference convergence tables")
    p_table.add_argument("table_id", type=int, choices=(1, 2))
    return parser


def _grid_strings(args) -> tuple:
    if args.lambdas:
        return tuple(s.strip() for s in args.lambdas.split(",") if s.strip())
    spec = args.grid or DEFAULT_GRID
    try:
        start_s, stop_s, step_s = spec.split(":")
        start, stop, step = float(start_s), float(stop_s), float(step_s)
    except ValueError as exc:
        raise UsageError(f"bad --grid {spec!r}; expected START:STOP:STEP") from exc
    if step <= 0 or stop < start:
        raise UsageError("grid step must be positive and STOP >= START")
    n = int(round((stop - start) / step)) + 1
    vals = []
    for i in range(n):
        v = start + i * step
        if v <= stop + 1e-12:
            vals.append(f"{v:.10g}")
    return tuple(vals)


def config_from_args(args) -> RunConfig:
    kwargs = dict(
        command=args.command,
        digits=args.digits,
        precision_bits=args.precision_bits,
        fmt=args.fmt,
        out=args.out,
    )
    if args.command == "sequence":
        kwargs.update(lam=args.lam, shift=args.shift, dim_min=args.dmin,
                      dim_max=args.dmax, seed=args.seed)
    elif args.command == "exact":
        kwargs.update(lam=args.lam, nu_seed=args.nu_seed)
    elif args.command == "scan":
        kwargs.update(lambda_grid=_grid_strings(args), dim_max=args.dmax,
                      shift=args.shift)
    elif args.command == "table":
        kwargs.update(table_id=args.table_id)
    return RunConfig(**kwargs)


_COMMANDS = {
    "sequence": cmd_sequence,
    "exact": cmd_exact,
    "scan": cmd_scan,
    "table": cmd_table,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        text, status = _COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        with open(cfg.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
