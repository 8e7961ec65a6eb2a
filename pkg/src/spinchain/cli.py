"""Experiment runner: reproducible sweeps with machine-readable output.

Every command emits rows in one fixed schema (CSV header or JSON lines):

    experiment,profile,n,beta,boundary,quantity,value,bound,holds

Floats are rendered with 17 significant digits so downstream diffs are
exact.  Exit codes: 0 = success / all bounds hold, 1 = a finding
(violations, bound failures, out-of-tolerance z-scores), 2 = usage
error.  Rows always appear in deterministic sorted order; the env var
``CHAIN_THREADS`` may fan independent (n, beta) points out to a thread
pool without changing the output.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import exact, mcmc
from .contours import enumerate_blocks, verify_peierls
from .model import Block, CouplingProfile, Volume, growth_condition_violations

__all__ = ["main"]

COLUMNS = ("experiment", "profile", "n", "beta", "boundary", "quantity", "value", "bound", "holds")

_BETA_GUARD = 4.0  # mcmc-check refuses larger beta without --force

# Flags whose values may begin with a dash (negative sites); argparse
# would read those as option names, so they get joined with '='.
_DASH_VALUE_FLAGS = ("--n-range", "--n", "--beta", "--blocks")


def _join_dash_values(argv: list[str]) -> list[str]:
    joined: list[str] = []
    skip = False
    for i, arg in enumerate(argv):
        if skip:
            skip = False
            continue
        if arg in _DASH_VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            joined.append(arg + "=" + argv[i + 1])
            skip = True
        else:
            joined.append(arg)
    return joined


@dataclass
class ResultRow:
    experiment: str
    profile: str
    n: int | None
    beta: float | None
    boundary: str | None
    quantity: str
    value: float
    bound: float | None = None
    holds: bool | None = None


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_rows(rows: list[ResultRow], fmt: str, out: str) -> None:
    stream = sys.stdout if out == "-" else open(out, "w", newline="")
    try:
        if fmt == "csv":
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(COLUMNS)
            for row in rows:
                writer.writerow(
                    [
                        row.experiment,
                        row.profile,
                        _fmt(row.n),
                        _fmt(row.beta),
                        _fmt(row.boundary),
                        row.quantity,
                        _fmt(row.value),
                        _fmt(row.bound),
                        _fmt(row.holds),
                    ]
                )
        else:
            for row in rows:
                obj = {
                    "experiment": row.experiment,
                    "profile": row.profile,
                    "n": row.n,
                    "beta": row.beta,
                    "boundary": row.boundary,
                    "quantity": row.quantity,
                    "value": row.value,
                    "bound": row.bound,
                    "holds": row.holds,
                }
                stream.write(json.dumps(obj) + "\n")
    finally:
        if stream is not sys.stdout:
            stream.close()


def _parse_int_list(text: str) -> list[int]:
    """Integer list grammar: ``1,2,3`` or ``a:b`` or ``a:b:step`` (inclusive)."""
    text = text.strip()
    if ":" in text and "," not in text:
        parts = text.split(":")
        if len(parts) == 2:
            lo, hi, step = int(parts[0]), int(parts[1]), 1
        elif len(parts) == 3:
            lo, hi, step = int(parts[0]), int(parts[1]), int(parts[2])
        else:
            raise ValueError(f"bad integer range {text!r}")
        if step < 1:
            raise ValueError("range step must be positive")
        return list(range(lo, hi + 1, step))
    return [int(v) for v in text.split(",") if v != ""]


def _parse_float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v != ""]


def _parse_range_pair(text: str) -> tuple[int, int]:
    lo_text, sep, hi_text = text.partition(":")
    if not sep:
        raise ValueError(f"expected a:b, got {text!r}")
    return int(lo_text), int(hi_text)


def _boundary_signs(name: str) -> list[tuple[str, int]]:
    if name == "plus":
        return [("plus", 1)]
    if name == "minus":
        return [("minus", -1)]
    return [("plus", 1), ("minus", -1)]


def _thread_count() -> int:
    raw = os.environ.get("CHAIN_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_points(fn, items: list):
    """Apply ``fn`` to each item, preserving input order in the result."""
    threads = _thread_count()
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _resolve_blocks(spec: str, n: int, rng: np.random.Generator) -> list[Block]:
    volume = Volume(n)
    if spec == "all":
        return enumerate_blocks(volume)
    if spec.startswith("random:"):
        count = int(spec.split(":", 1)[1])
        if count < 1:
            raise ValueError("random block count must be positive")
        blocks = []
        for _ in range(count):
            left = int(rng.integers(-n, n + 1))
            right = int(rng.integers(left, n + 1))
            blocks.append(Block(left, right))
        return blocks
    blocks = []
    for part in spec.split(","):
        left_text, sep, right_text = part.partition(":")
        if not sep:
            raise ValueError(f"bad block spec {part!r}, expected left:right")
        blocks.append(Block(int(left_text), int(right_text)))
    return blocks


def _load_config_args(path: str) -> list[str]:
    """Flat key=value file -> argv fragment; CLI flags override it."""
    injected: list[str] = []
    with open(path) as handle:
        for raw in handle:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"bad config line {raw.rstrip()!r}, expected key=value")
            key = key.strip()
            value = value.strip()
            flag = "--" + key.replace("_", "-")
            if value.lower() in ("true", "false"):
                if value.lower() == "true":
                    injected.append(flag)
            else:
                injected.extend([flag, value])
    return injected


def cmd_check6(args, profile: CouplingProfile) -> int:
    n_min, n_max = _parse_range_pair(args.n_range)
    violations = growth_condition_violations(profile, n_min, n_max, args.r_max)
    spec = profile.spec_string()
    rows = [
        ResultRow(
            "check6",
            spec,
            n,
            None,
            None,
            f"pair_sum[r={r}]",
            profile.coupling(n) + profile.coupling(n + r),
            float(r),
            False,
        )
        for (n, r) in violations
    ]
    _write_rows(rows, args.format, args.out)
    print(
        f"check6: {len(violations)} violation(s) over n in [{n_min}, {n_max}], "
        f"r <= {args.r_max}",
        file=sys.stderr,
    )
    return 1 if violations else 0


def cmd_peierls(args, profile: CouplingProfile) -> int:
    if args.boundary != "plus":
        print("error: the contour bound is only checked under the plus boundary", file=sys.stderr)
        return 2
    spec = profile.spec_string()
    rng = np.random.default_rng(args.seed)
    points = []
    for n in args.n:
        blocks = _resolve_blocks(args.blocks, n, rng)
        for beta in args.beta:
            points.append((n, beta, blocks))

    def run(point):
        n, beta, blocks = point
        volume = Volume(n)
        return [
            (n, beta, block, verify_peierls(profile, volume, beta, block))
            for block in blocks
        ]

    rows: list[ResultRow] = []
    failures = 0
    for results in _map_points(run, points):
        for n, beta, block, verdict in results:
            rows.append(
                ResultRow(
                    "peierls",
                    spec,
                    n,
                    beta,
                    "plus",
                    f"block[{block.left}:{block.right}]",
                    verdict.probability,
                    verdict.bound,
                    verdict.holds,
                )
            )
            if not verdict.holds:
                failures += 1
    _write_rows(rows, args.format, args.out)
    print(f"peierls: {failures} violation(s) in {len(rows)} block(s)", file=sys.stderr)
    return 1 if failures else 0


def cmd_gap(args, profile: CouplingProfile) -> int:
    spec = profile.spec_string()
    points = [(n, beta) for n in args.n for beta in args.beta]

    def run(point):
        n, beta = point
        volume = Volume(n)
        plus = exact.site_marginal(profile, volume, beta, 1, 0, -1)
        minus = exact.site_marginal(profile, volume, beta, -1, 0, -1)
        gap = exact.magnetization_gap(profile, volume, beta)
        bound = None
        if args.c1 is not None and beta > 1.0:
            bound = exact.origin_minus_upper_bound(volume, beta, args.c1)
        return n, beta, plus, minus, gap, bound

    rows: list[ResultRow] = []
    failures = 0
    for n, beta, plus, minus, gap, bound in _map_points(run, points):
        holds = None
        if bound is not None:
            holds = plus <= bound + 1e-12
            if not holds:
                failures += 1
        rows.append(ResultRow("gap", spec, n, beta, "plus", "marginal_minus_spin", plus, bound, holds))
        rows.append(ResultRow("gap", spec, n, beta, "minus", "marginal_minus_spin", minus))
        rows.append(ResultRow("gap", spec, n, beta, None, "gap", gap))
    _write_rows(rows, args.format, args.out)
    return 1 if failures else 0


def cmd_maxrun(args, profile: CouplingProfile) -> int:
    spec = profile.spec_string()
    points = [
        (n, beta, name, sign)
        for n in args.n
        for beta in args.beta
        for name, sign in _boundary_signs(args.boundary)
    ]

    def run(point):
        n, beta, name, sign = point
        volume = Volume(n)
        threshold = exact.run_length_threshold(volume, args.c1)
        tail = exact.max_run_tail(profile, volume, beta, sign, threshold)
        in_regime = beta > 1.0 and args.c1 > 1.0 / (beta - 1.0)
        return n, beta, name, threshold, tail, in_regime

    rows: list[ResultRow] = []
    for n, beta, name, threshold, tail, in_regime in _map_points(run, points):
        rows.append(
            ResultRow(
                "maxrun",
                spec,
                n,
                beta,
                name,
                f"tail[c1={args.c1:g},threshold={threshold}]",
                tail,
            )
        )
        rows.append(
            ResultRow(
                "maxrun",
                spec,
                n,
                beta,
                name,
                "c1_above_critical",
                1.0 if in_regime else 0.0,
            )
        )
    _write_rows(rows, args.format, args.out)
    return 0


def cmd_mcmc_check(args, profile: CouplingProfile) -> int:
    over = [beta for beta in args.beta if beta > _BETA_GUARD]
    if over and not args.force:
        print(
            f"error: beta {over[0]:g} exceeds {_BETA_GUARD:g}; single-spin dynamics "
            "mixes far too slowly there for a meaningful estimate. "
            "Pass --force to run anyway.",
            file=sys.stderr,
        )
        return 2
    spec = profile.spec_string()
    points = [
        (n, beta, name, sign)
        for n in args.n
        for beta in args.beta
        for name, sign in _boundary_signs(args.boundary)
    ]

    def run(item):
        index, (n, beta, name, sign) = item
        volume = Volume(n)
        reference = exact.site_marginal(profile, volume, beta, sign, args.site, -1)
        record = mcmc.estimate_marginal(
            profile,
            volume,
            beta,
            sign,
            args.site,
            args.sweeps,
            args.burn_in,
            args.seed + 7919 * index,
        )
        if record.std_error > 0.0:
            z = (record.mean - reference) / record.std_error
        else:
            z = 0.0 if record.mean == reference else math.inf
        return n, beta, name, reference, record, z

    rows: list[ResultRow] = []
    failures = 0
    for n, beta, name, reference, record, z in _map_points(run, list(enumerate(points))):
        rows.append(ResultRow("mcmc-check", spec, n, beta, name, "exact_marginal", reference))
        rows.append(ResultRow("mcmc-check", spec, n, beta, name, "mcmc_mean", record.mean))
        rows.append(ResultRow("mcmc-check", spec, n, beta, name, "mcmc_std_error", record.std_error))
        holds = abs(z) <= 3.0
        rows.append(ResultRow("mcmc-check", spec, n, beta, name, "z_score", z, 3.0, holds))
        if not holds:
            failures += 1
    _write_rows(rows, args.format, args.out)
    return 1 if failures else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinchain",
        description="Exact and Monte Carlo experiments on inhomogeneous spin chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--profile", required=True, help="profile spec, e.g. abs, constant:1, linear:0:2, table:-2:1,2,3,4,5")
        p.add_argument("--out", default="-", help="output path ('-' = stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--config", help="flat key=value file with defaults; flags override it")

    p = sub.add_parser("check6", help="scan the coupling growth condition for violations")
    common(p)
    p.add_argument("--n-range", required=True, help="site range a:b")
    p.add_argument("--r-max", type=int, required=True, help="largest pair distance to check")
    p.set_defaults(handler=cmd_check6)

    p = sub.add_parser("peierls", help="compare block probabilities against the contour bound")
    common(p)
    p.add_argument("--n", type=_parse_int_list, required=True, help="volume sizes, list or a:b[:step]")
    p.add_argument("--beta", type=_parse_float_list, required=True, help="inverse temperatures, comma list")
    p.add_argument("--boundary", choices=("plus", "minus", "both"), default="plus")
    p.add_argument("--blocks", default="all", help="'all', 'random:<count>', or 'l:r[,l:r...]'")
    p.add_argument("--seed", type=int, default=0, help="seed for random block sampling")
    p.set_defaults(handler=cmd_peierls)

    p = sub.add_parser("gap", help="origin marginals under both boundaries and their gap")
    common(p)
    p.add_argument("--n", type=_parse_int_list, required=True)
    p.add_argument("--beta", type=_parse_float_list, required=True)
    p.add_argument("--c1", type=float, default=None, help="attach the analytic origin bound (needs beta > 1)")
    p.set_defaults(handler=cmd_gap)

    p = sub.add_parser("maxrun", help="tail probability of the longest minus-run")
    common(p)
    p.add_argument("--n", type=_parse_int_list, required=True)
    p.add_argument("--beta", type=_parse_float_list, required=True)
    p.add_argument("--boundary", choices=("plus", "minus", "both"), default="plus")
    p.add_argument("--c1", type=float, required=True, help="threshold coefficient: cutoff = floor(c1 ln(2n+1))")
    p.set_defaults(handler=cmd_maxrun)

    p = sub.add_parser("mcmc-check", help="sampler marginals versus the exact engine")
    common(p)
    p.add_argument("--n", type=_parse_int_list, required=True)
    p.add_argument("--beta", type=_parse_float_list, required=True)
    p.add_argument("--boundary", choices=("plus", "minus", "both"), default="both")
    p.add_argument("--site", type=int, default=0)
    p.add_argument("--sweeps", type=int, default=100_000)
    p.add_argument("--burn-in", type=int, default=20_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--force", action="store_true", help="allow beta beyond the mixing guard")
    p.set_defaults(handler=cmd_mcmc_check)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if "--config" in argv:
        at = argv.index("--config")
        if at + 1 >= len(argv):
            print("error: --config needs a path", file=sys.stderr)
            return 2
        path = argv[at + 1]
        del argv[at : at + 2]
        try:
            injected = _load_config_args(path)
        except (OSError, ValueError) as err:
            print(f"error: {err}", file=sys.stderr)
            return 2
        argv = argv[:1] + injected + argv[1:]
    argv = _join_dash_values(argv)

    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        profile = CouplingProfile.parse(args.profile)
    except ValueError as err:
        parser.error(str(err))
    try:
        return args.handler(args, profile)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
