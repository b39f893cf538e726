"""Command-line interface: ``cayleynorms <subcommand> ...``.

Exit codes: 0 ok, 2 input error, 3 resource error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from .cayley import enumerate_ball, growth_stats
from .cocycle import cocycle_upper_bound, optimize_epsilon, standard_epsilon
from .errors import CayleyNormsError, InputError, ResourceError
from .expansion import expansion_report
from .group import free_abelian, free_group, free_product, load_group
from .operator import averaging_norm, richardson_extrapolate
from .recipes import RECIPES, RunConfig, Table, run_recipe

log = logging.getLogger("cayleynorms")


def parse_group(text: str):
    """``free:2``, ``abelian:2``, ``free_product:2,3`` or a JSON file path."""
    if Path(text).is_file():
        return load_group(text)
    name, _, arg = text.partition(":")
    try:
        if name == "free":
            return free_group(int(arg or 2))
        if name in ("abelian", "free_abelian"):
            return free_abelian(int(arg or 2))
        if name == "free_product":
            return free_product(*[int(m) for m in arg.split(",")])
    except ValueError:
        raise InputError(f"bad group argument {text!r}") from None
    raise InputError(f"unknown group {text!r}; use free:k, abelian:k, free_product:m1,m2 or a JSON file")


def parse_set(ball_for, text: str):
    """Resolve ``sphere:n``, ``ball:n`` or ``annulus:n:theta``.

    ``ball_for(r)`` must return an enumerated ball of radius at least ``r``.
    """
    parts = text.split(":")
    try:
        nums = [int(x) for x in parts[1:]]
    except ValueError:
        raise InputError(f"bad set descriptor {text!r}") from None
    kind = parts[0]
    if kind == "sphere" and len(nums) == 1:
        return ball_for(nums[0]).sphere(nums[0])
    if kind == "ball" and len(nums) == 1:
        return ball_for(nums[0]).ball_view(nums[0])
    if kind == "annulus" and len(nums) == 2:
        return ball_for(nums[0] + nums[1]).annulus(nums[0], nums[1])
    raise InputError(f"bad set descriptor {text!r}; use sphere:n, ball:n or annulus:n:theta")


def _ball_cache(rs):
    cache = {}

    def get(r):
        best = max((b for b in cache.values() if b.radius >= r), key=lambda b: -b.radius, default=None)
        if best is None:
            best = cache[r] = enumerate_ball(rs, r)
        return best
    return get


def _emit(args, stem: str, payload: dict | None = None, table: Table | None = None):
    """Print to stdout; with ``--out`` also write ``stem.tsv`` / ``stem.json``."""
    if table is not None:
        sys.stdout.write(table.to_tsv())
    if payload is not None:
        sys.stdout.write(json.dumps(payload, indent=2, default=float) + "\n")
    if not args.out:
        return
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if table is not None:
        (out / f"{stem}.tsv").write_text(table.to_tsv())
    js = json.dumps(payload, indent=2, default=float) if payload is not None else table.to_json()
    (out / f"{stem}.json").write_text(js)


def cmd_enumerate(args) -> int:
    rs = parse_group(args.group)
    ball = enumerate_ball(rs, args.radius)
    try:
        st = growth_stats(ball)
        delta, label = st.delta_hat, st.label
    except InputError:
        # too few radii (or a finite group) for a growth fit
        delta, label = None, None
    rows = []
    for n, s in enumerate(ball.sphere_sizes.tolist()):
        rows.append({"n": n, "sphere_size": s, "ball_size": ball.ball_size(n),
                     "ratio_to_exp": None if delta is None else s / math.exp(delta * n)})
    table = Table("enumerate", ["n", "sphere_size", "ball_size", "ratio_to_exp"], rows,
                  {"group": rs.name, "delta_hat": delta, "label": label})
    _emit(args, "enumerate", table=table)
    return 0


def cmd_norm(args) -> int:
    rs = parse_group(args.group)
    radii = [args.R] if not args.extrapolate else sorted({*args.extrapolate, args.R})
    ball_for = _ball_cache(rs)
    view = parse_set(ball_for, args.set)
    n = view.outer
    big = ball_for(max(radii) + n)
    values, conv, main = [], [], None
    for R in radii:
        est = averaging_norm(rs, view, args.p, R, tol=args.tol, seed=args.seed, ball=big)
        values.append(est.value)
        conv.append(est.converged)
        if R == args.R:
            main = est
    out = {"value": main.value, "witness_norm": main.witness_norm, "iterations": main.iterations,
           "converged": main.converged, "R": args.R, "p": args.p, "group": rs.name,
           "set": view.descriptor, "size": len(view), "kind": "lower bound"}
    if args.extrapolate:
        out["radii"] = radii
        out["estimates"] = values
        out["all_converged"] = conv
        ex = richardson_extrapolate(radii, values)
        out["extrapolated"] = ex["L"]
        out["extrapolation"] = ex
    _emit(args, "norm", payload=out)
    return 0


def _resolve_delta(rs, text: str) -> float:
    if text != "auto":
        try:
            d = float(text)
        except ValueError:
            raise InputError(f"bad delta {text!r}") from None
        if not d > 0:
            raise InputError("delta must be positive")
        return d
    if rs.is_free:
        return math.log(rs.n_symbols - 1)
    return growth_stats(enumerate_ball(rs, 10)).delta_hat


def cmd_cocycle_bound(args) -> int:
    rs = parse_group(args.group)
    ball_for = _ball_cache(rs)
    view = parse_set(ball_for, args.set)
    n = view.outer
    H = args.horizon if args.horizon is not None else n + 4
    big = ball_for(H + n)
    delta = _resolve_delta(rs, args.delta)
    if args.eps == "opt":
        eps, rep = optimize_epsilon(rs, view, args.p, delta, H, ball=big)
    else:
        eps = standard_epsilon(args.p, delta) if args.eps == "paper" else float(args.eps)
        rep = cocycle_upper_bound(rs, view, args.p, eps, H, ball=big)
    out = rep.to_dict()
    out.update(group=rs.name, delta=delta)
    _emit(args, "cocycle_bound", payload=out)
    return 0


def cmd_expansion(args) -> int:
    rs = parse_group(args.group)
    ball_for = _ball_cache(rs)
    view = parse_set(ball_for, args.set)
    fams = [f for f in args.witnesses.split(",") if f]
    delta = None if args.delta == "none" else _resolve_delta(rs, args.delta)
    ground = None if args.ground_radius < 0 else args.ground_radius
    rep = expansion_report(rs, view, delta=delta, ground_radius=ground, max_size=args.max_size,
                           families=fams, witness_radius=args.witness_radius)
    d = rep.to_dict()
    table = Table("expansion", list(d), [{k: (v if not isinstance(v, (list, tuple)) else
                                              ",".join(map(str, v))) for k, v in d.items()}])
    _emit(args, "expansion", payload=d, table=table)
    return 0


def cmd_report(args) -> int:
    overrides = {"seed": args.seed}
    if args.config:
        cfg = RunConfig.from_json(args.config, recipe=args.recipe, **overrides)
    else:
        cfg = RunConfig(recipe=args.recipe, seed=args.seed)
    if args.group:
        cfg.group = args.group if Path(args.group).is_file() else _preset_dict(args.group)
    table = run_recipe(args.recipe, cfg)
    table.meta["config"] = dict(vars(cfg))
    sys.stdout.write(table.to_tsv())
    if args.out:
        table.write(args.out)
    return 0


def _preset_dict(text: str) -> dict:
    rs = parse_group(text)
    return {"preset": rs.kind, **rs.params}


def build_parser() -> argparse.ArgumentParser:
    def flags(top: bool) -> argparse.ArgumentParser:
        # subcommands repeat the global flags without clobbering earlier values
        d = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
        g = argparse.ArgumentParser(add_help=False)
        g.add_argument("--config", default=d(None), help="JSON run configuration")
        g.add_argument("--out", default=d(None), help="output directory for TSV/JSON files")
        g.add_argument("--seed", type=int, default=d(42))
        g.add_argument("--threads", type=int, default=d(1),
                       help="accepted; computation is single-threaded")
        g.add_argument("-v", "--verbose", action="store_true", default=d(False))
        return g

    common = flags(False)
    ap = argparse.ArgumentParser(prog="cayleynorms", parents=[flags(True)],
                                 description="Operator norms of averaging operators on Cayley graphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="sphere and ball sizes")
    p.add_argument("--group", required=True)
    p.add_argument("--radius", type=int, default=8)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("norm", parents=[common], help="truncated p->p norm estimate")
    p.add_argument("--group", required=True)
    p.add_argument("--set", required=True, help="sphere:n | ball:n | annulus:n:theta")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--R", type=int, default=8)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--extrapolate", type=lambda s: [int(x) for x in s.split(",")],
                   help="comma-separated radii for extrapolation, e.g. 6,8,10,12")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("cocycle-bound", parents=[common], help="cocycle upper bound on the norm")
    p.add_argument("--group", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--delta", default="auto", help="'auto' or a positive number")
    p.add_argument("--eps", default="paper", help="'paper' (delta/(p p')), 'opt' (golden-section search) or a number")
    p.add_argument("--horizon", type=int, default=None)
    p.set_defaults(func=cmd_cocycle_bound)

    p = sub.add_parser("expansion", parents=[common], help="certified interval for e(S)")
    p.add_argument("--group", required=True)
    p.add_argument("--set", required=True)
    p.add_argument("--ground-radius", type=int, default=2, help="-1 skips the exhaustive search")
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--witnesses", default="balls,spheres")
    p.add_argument("--witness-radius", type=int, default=6)
    p.add_argument("--delta", default="auto", help="'auto', 'none' or a positive number")
    p.set_defaults(func=cmd_expansion)

    p = sub.add_parser("report", parents=[common], help="run a named recipe")
    p.add_argument("recipe", choices=RECIPES)
    p.add_argument("--group", default=None)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads != 1:
        log.info("--threads=%d ignored; running single-threaded", args.threads)
    try:
        return args.func(args)
    except CayleyNormsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except MemoryError:
        print("error: out of memory", file=sys.stderr)
        return ResourceError.exit_code
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return InputError.exit_code


if __name__ == "__main__":
    sys.exit(main())
