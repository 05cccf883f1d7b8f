"""Command-line interface: ``hetbounds <command> data.csv [options]``.

Results go to standard output (or ``--out``); diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, replace
from importlib import resources
from typing import Optional

import numpy as np

from .bounds import default_grid, uniform_grid
from .distribution import WeightedSample, build_dist
from .diagnostics import ks_test
from .inference import (
    BootstrapPlan,
    bootstrap_ses,
    im_interval,
    interval_curve_inference,
    winner_curve_inference,
    winner_point_inference,
)
from .oracle import MAX_N, CouplingInstance, oracle_extremes
from .resample import resolve_seed
from .ste import mean_difference, ste_bounds, ste_curve, ste_negative_part_bounds, ste_positive_part_bounds
from .welfare import (
    WelfareFn,
    maximin_policy,
    nonutilitarian_welfare_curve,
    utilitarian_welfare_curve,
)
from .winners import makarov_bounds, winner_bounds, winner_curve

SCHEMA_VERSION = "1.0"
COMMANDS = ("ste", "ste-curve", "winners", "winners-curve", "welfare-curve", "policy", "makarov", "kstest", "quantiles")


class DataError(ValueError):
    """Input file problem; the message names the offending row and column."""


class UsageError(ValueError):
    """Incompatible or missing flags."""


@dataclass
class Dataset:
    outcome: np.ndarray
    treat: np.ndarray
    weight: np.ndarray
    cluster: Optional[np.ndarray] = None

    def arms(self) -> tuple[WeightedSample, WeightedSample]:
        out = []
        for t in (0, 1):
            sel = self.treat == t
            clusters = None if self.cluster is None else self.cluster[sel]
            out.append(WeightedSample(self.outcome[sel], self.weight[sel], clusters))
        return out[0], out[1]


def parse_csv(path, outcome: str = "y", treat: str = "d", weight: Optional[str] = None,
              cluster: Optional[str] = None) -> Dataset:
    """Read a headed CSV file. Rows are numbered from 1 after the header."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path}: file is empty (no header row)")
        fields = [f.strip() for f in reader.fieldnames]
        reader.fieldnames = fields
        for col in (outcome, treat, weight, cluster):
            if col is not None and col not in fields:
                raise DataError(f"{path}: missing column '{col}' (have {', '.join(fields)})")
        ys, ds, ws, cs = [], [], [], []
        for i, row in enumerate(reader, start=1):
            where = f"{path}: row {i} (line {i + 1})"
            raw = (row.get(outcome) or "").strip()
            try:
                y = float(raw)
            except ValueError:
                raise DataError(f"{where}, column '{outcome}': outcome {raw!r} is not numeric") from None
            if not np.isfinite(y):
                raise DataError(f"{where}, column '{outcome}': outcome {raw!r} is not finite")
            raw_d = (row.get(treat) or "").strip()
            try:
                d = float(raw_d)
            except ValueError:
                d = None
            if d not in (0.0, 1.0):
                raise DataError(f"{where}, column '{treat}': treatment must be 0 or 1, got {raw_d!r}")
            w = 1.0
            if weight is not None:
                raw_w = (row.get(weight) or "").strip()
                try:
                    w = float(raw_w)
                except ValueError:
                    raise DataError(f"{where}, column '{weight}': weight {raw_w!r} is not numeric") from None
                if not (np.isfinite(w) and w > 0):
                    raise DataError(f"{where}, column '{weight}': weight must be positive, got {raw_w!r}")
            ys.append(y)
            ds.append(int(d))
            ws.append(w)
            if cluster is not None:
                cs.append((row.get(cluster) or "").strip())
    treat_arr = np.array(ds, dtype=int)
    for t, name in ((0, "control"), (1, "treated")):
        if not np.any(treat_arr == t):
            raise DataError(f"{path}: the {name} group (column '{treat}' == {t}) is empty")
    return Dataset(
        np.array(ys, dtype=float),
        treat_arr,
        np.array(ws, dtype=float),
        None if cluster is None else np.array(cs, dtype=object),
    )


# --- argument parsing ------------------------------------------------------


def _probability(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetbounds",
        description="Bounds on subgroup treatment effects, winners/losers and welfare from two arms.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("data", help="CSV file with a header row")
    common.add_argument("--outcome", default="y", help="outcome column (default: y)")
    common.add_argument("--treat", default="d", help="0/1 treatment column (default: d)")
    common.add_argument("--weight", default=None, help="optional positive weight column")
    common.add_argument("--cluster", default=None, help="optional cluster label column")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="output file (default: standard output)")
    common.add_argument("--seed", type=int, default=None, help="64-bit seed for all randomness")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--bootstrap", type=int, default=0, metavar="B",
                        help="bootstrap replications (0 disables inference)")
    common.add_argument("--alpha", type=float, default=0.05)
    common.add_argument("--resample", choices=("unit", "cluster"), default="unit",
                        help="bootstrap resampling scheme within arm")
    common.add_argument("--dump-replicates", default=None, metavar="PATH",
                        help="write the bootstrap replicate matrix to a CSV file")

    def grid_opts(p):
        p.add_argument("--grid", type=int, default=None, metavar="N",
                       help="N evenly spaced thresholds (default: control breakpoints, at most 512)")

    p = sub.add_parser("ste", parents=[common], help="STE bounds on one subgroup")
    p.add_argument("--a", type=_probability, default=0.0)
    p.add_argument("--b", type=_probability, default=1.0)
    p.add_argument("--verify", action="store_true", help="cross-check against brute force (n <= 8)")

    p = sub.add_parser("ste-curve", parents=[common], help="STE bounds over thresholds")
    p.add_argument("--tail", choices=("left", "right"), default="left")
    grid_opts(p)

    p = sub.add_parser("winners", parents=[common], help="winner/loser bounds on one subgroup")
    p.add_argument("--a", type=_probability, default=0.0)
    p.add_argument("--b", type=_probability, default=1.0)
    p.add_argument("--verify", action="store_true", help="cross-check against brute force (n <= 8)")

    p = sub.add_parser("winners-curve", parents=[common], help="winner/loser bounds over thresholds")
    p.add_argument("--tail", choices=("left", "right"), default="left")
    p.add_argument("--kind", choices=("winners", "losers"), default="winners")
    grid_opts(p)

    for name, desc in (("welfare-curve", "welfare bounds over thresholds"),
                       ("policy", "maximin eligibility threshold")):
        p = sub.add_parser(name, parents=[common], help=desc)
        p.add_argument("--cost", type=float, default=0.0, help="per-capita cost of treating")
        p.add_argument("--h", default=None, help="welfare function slope0|knot1|slope1|... (default: utilitarian)")
        grid_opts(p)

    p = sub.add_parser("makarov", parents=[common], help="bounds on P(Y1 - Y0 < c)")
    p.add_argument("--c", type=float, required=True)

    p = sub.add_parser("kstest", parents=[common], help="permutation KS test of equal distributions")
    p.add_argument("--permutations", type=int, default=999)

    p = sub.add_parser("quantiles", parents=[common], help="quantile functions and QTEs")
    grid_opts(p)
    return parser


# --- command implementations -----------------------------------------------


def _grid(args, d0, tail="left"):
    return uniform_grid(args.grid, tail) if args.grid else default_grid(d0, tail)


def _plan(args, seed) -> BootstrapPlan:
    return BootstrapPlan(args.bootstrap, seed, args.resample == "cluster", args.threads)


def _verify(arm0, arm1, a, b, pairs):
    """Brute-force cross-check; ``pairs`` maps functional -> (formula lower, upper, exact)."""
    n = len(arm0)
    if not (n == len(arm1) and n <= MAX_N and arm0.has_unit_weights and arm1.has_unit_weights):
        return {"applicable": False, "reason": f"needs equal unit-weight arms with n <= {MAX_N}"}
    try:
        inst = CouplingInstance(arm0.values, arm1.values, a, b)
    except ValueError as exc:
        return {"applicable": False, "reason": str(exc)}
    checks, ok = {}, True
    for functional, (lo, hi, exact) in pairs.items():
        omin, omax = oracle_extremes(inst, functional)
        if exact:
            good = abs(lo - omin) <= 1e-9 and abs(hi - omax) <= 1e-9
        else:
            good = lo <= omin + 1e-9 and omax <= hi + 1e-9
        checks[functional] = {"formula": [lo, hi], "oracle": [omin, omax], "ok": good}
        ok = ok and good
    return {"applicable": True, "ok": ok, "checks": checks}


def cmd_ste(args, arm0, arm1, seed, boot_out):
    d0, d1 = build_dist(arm0), build_dist(arm1)
    a, b = args.a, args.b
    bd = ste_bounds(d0, d1, a, b)
    pos = ste_positive_part_bounds(d0, d1, a, b)
    neg = ste_negative_part_bounds(d0, d1, a, b)
    result = {
        "joint": bd.to_dict(),
        "conditional": bd.conditional.to_dict(),
        "positive_part": pos.to_dict(),
        "negative_part": neg.to_dict(),
        "mean_difference": mean_difference(d0, d1),
        "inference": None,
    }
    if args.bootstrap > 0:
        def stat(e0, e1):
            s = ste_bounds(e0, e1, a, b).conditional
            return [s.lower, s.upper]

        boot = bootstrap_ses(stat, arm0, arm1, _plan(args, seed))
        boot_out.append((boot, ["lower", "upper"]))
        res = im_interval(bd.conditional, boot.se_lower, boot.se_upper, args.alpha)
        if boot.degenerate:
            res = replace(res, flags=res.flags + ("degenerate-bootstrap",))
        result["inference"] = res.to_dict()
    if args.verify:
        result["verify"] = _verify(arm0, arm1, a, b, {
            "mean-effect": (bd.lower, bd.upper, True),
            "positive-part": (pos.lower, pos.upper, True),
            "negative-part": (neg.lower, neg.upper, True),
        })
    return result, None


def cmd_ste_curve(args, arm0, arm1, seed, boot_out):
    d0 = build_dist(arm0)
    grid = _grid(args, d0, args.tail)

    def fn(e0, e1):
        return ste_curve(e0, e1, grid, args.tail)

    if args.bootstrap > 0:
        curve, boot = interval_curve_inference(arm0, arm1, fn, _plan(args, seed), args.alpha)
        boot_out.append((boot, [f"lower_{i}" for i in range(len(grid))] + [f"upper_{i}" for i in range(len(grid))]))
    else:
        curve = fn(d0, build_dist(arm1))
    return {"tail": args.tail, "normalization": "conditional"}, curve


def cmd_winners(args, arm0, arm1, seed, boot_out):
    d0, d1 = build_dist(arm0), build_dist(arm1)
    a, b = args.a, args.b
    wb = winner_bounds(d0, d1, a, b)
    result = {"conditional": wb.conditional().to_dict(), "joint": wb.to_dict(), "inference": None}
    if args.bootstrap > 0:
        result["inference"] = {}
        for kind in ("winners", "losers"):
            res, boot = winner_point_inference(arm0, arm1, a, b, kind, _plan(args, seed), args.alpha)
            result["inference"][kind] = res.to_dict()
        boot_out.append((boot, None))
    if args.verify:
        result["verify"] = _verify(arm0, arm1, a, b, {
            "winner-count": (wb.winners.lower, wb.winners.upper, False),
            "loser-count": (wb.losers.lower, wb.losers.upper, False),
        })
    return result, None


def cmd_winners_curve(args, arm0, arm1, seed, boot_out):
    d0 = build_dist(arm0)
    grid = _grid(args, d0, args.tail)
    if args.bootstrap > 0:
        curve, boot = winner_curve_inference(arm0, arm1, grid, args.tail, args.kind, _plan(args, seed), args.alpha)
        boot_out.append((boot, None))
    else:
        curve = winner_curve(d0, build_dist(arm1), grid, args.tail, args.kind)
    return {"tail": args.tail, "kind": args.kind, "normalization": "conditional"}, curve


def _welfare_fn(args):
    return None if args.h is None else WelfareFn.parse(args.h)


def cmd_welfare_curve(args, arm0, arm1, seed, boot_out):
    d0 = build_dist(arm0)
    grid = _grid(args, d0, "left")
    h = _welfare_fn(args)

    def fn(e0, e1):
        if h is None:
            return utilitarian_welfare_curve(e0, e1, args.cost, grid)
        return nonutilitarian_welfare_curve(e0, e1, h, grid, args.cost)

    if args.bootstrap > 0:
        curve, boot = interval_curve_inference(arm0, arm1, fn, _plan(args, seed), args.alpha)
        boot_out.append((boot, None))
    else:
        curve = fn(d0, build_dist(arm1))
    info = {"objective": "utilitarian" if h is None else "nonutilitarian", "cost": args.cost,
            "h": None if h is None else h.to_text(), "normalization": "joint"}
    return info, curve


def cmd_policy(args, arm0, arm1, seed, boot_out):
    d0, d1 = build_dist(arm0), build_dist(arm1)
    grid = _grid(args, d0, "left")
    h = _welfare_fn(args)
    res = maximin_policy(d0, d1, h, args.cost, grid)
    info = {"objective": "utilitarian" if h is None else "nonutilitarian", "cost": args.cost,
            "h": None if h is None else h.to_text(), "policy": res.to_dict()}
    return info, res.curve


def cmd_makarov(args, arm0, arm1, seed, boot_out):
    bd = makarov_bounds(build_dist(arm0), build_dist(arm1), args.c)
    return {"c": args.c, "probability_below_c": {"lower": bd.lower, "upper": bd.upper}}, None


def cmd_kstest(args, arm0, arm1, seed, boot_out):
    res = ks_test(arm0, arm1, args.permutations, seed, args.resample == "cluster")
    return res.to_dict(), None


def cmd_quantiles(args, arm0, arm1, seed, boot_out):
    d0, d1 = build_dist(arm0), build_dist(arm1)
    if args.grid:
        u = uniform_grid(args.grid, "left")
    else:
        u = np.unique(np.concatenate((d0.cum, d1.cum)))
    q0, q1 = d0.quantile(u), d1.quantile(u)
    rows = [{"u": float(a), "q0": float(b), "q1": float(c), "qte": float(c - b)} for a, b, c in zip(u, q0, q1)]
    return {"mean_control": d0.mean(), "mean_treated": d1.mean(), "rows": rows}, None


HANDLERS = {
    "ste": cmd_ste,
    "ste-curve": cmd_ste_curve,
    "winners": cmd_winners,
    "winners-curve": cmd_winners_curve,
    "welfare-curve": cmd_welfare_curve,
    "policy": cmd_policy,
    "makarov": cmd_makarov,
    "kstest": cmd_kstest,
    "quantiles": cmd_quantiles,
}


# --- output ----------------------------------------------------------------


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def _flatten(prefix, obj, out):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        return
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            out[f"{prefix}.{i}"] = v
    else:
        out[prefix] = obj


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(envelope: dict, rows: Optional[list], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(envelope, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# hetbounds {envelope['command']} schema_version={envelope['schema_version']} seed={envelope['seed']}\n")
    if rows is None:
        flat = {}
        _flatten("", envelope["result"], flat)
        rows = [flat]
    fields = list(rows[0].keys()) if rows else []
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_csv_cell(row.get(f)) for f in fields])
    return buf.getvalue()


def load_schema() -> dict:
    return json.loads(resources.files("hetbounds").joinpath("output.schema.json").read_text())


def run(argv=None) -> int:
    """Parse ``argv``, execute one command and emit its results. Returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        if args.bootstrap < 0:
            raise UsageError("--bootstrap must be nonnegative")
        if not 0 < args.alpha < 1:
            raise UsageError("--alpha must lie in (0, 1)")
        if args.resample == "cluster" and args.cluster is None:
            raise UsageError("--resample cluster needs --cluster COLUMN")
        if args.dump_replicates and args.bootstrap < 1:
            raise UsageError("--dump-replicates needs --bootstrap B with B >= 1")
        if getattr(args, "a", None) is not None and not args.a < args.b:
            raise UsageError(f"need --a < --b, got {args.a} and {args.b}")
        if args.command == "winners-curve" and args.bootstrap == 1:
            raise UsageError("winner bands need --bootstrap of at least 2")
        if getattr(args, "grid", None) is not None and args.grid < 1:
            raise UsageError("--grid must be positive")

        seed_given = args.seed is not None
        seed = resolve_seed(args.seed)
        if not seed_given:
            print(f"hetbounds: no --seed given; using seed {seed}", file=sys.stderr)
        data = parse_csv(args.data, args.outcome, args.treat, args.weight, args.cluster)
        arm0, arm1 = data.arms()
        boot_out = []
        result, curve = HANDLERS[args.command](args, arm0, arm1, seed, boot_out)
        rows = None
        if curve is not None:
            rows = _clean(curve.rows())
            result = dict(result, curve=rows)
        envelope = _clean({
            "schema_version": SCHEMA_VERSION,
            "command": args.command,
            "seed": seed,
            "n_control": len(arm0),
            "n_treated": len(arm1),
            "bootstrap": {
                "replications": args.bootstrap,
                "resample": args.resample,
                "alpha": args.alpha,
                "redraws": boot_out[0][0].redraws if boot_out else 0,
            },
            "result": result,
        })
        if args.command == "quantiles" and args.format == "csv":
            rows = envelope["result"]["rows"]
        text = render(envelope, rows, args.format)
        if args.dump_replicates and boot_out:
            boot, cols = boot_out[0]
            boot.to_csv(args.dump_replicates, cols)
        if args.out:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    except UsageError as exc:
        print(f"hetbounds: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"hetbounds: error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
