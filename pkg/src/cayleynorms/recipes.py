"""Experiment recipes and their TSV/JSON reports."""

from __future__ import annotations

import json
import logging
import math
import warnings
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .cayley import DEFAULT_MAX_ELEMENTS, ball_size_bound, enumerate_ball, growth_stats
from .cocycle import _BoundTables, optimize_epsilon, standard_epsilon
from .errors import InputError, RecipeError
from .expansion import best_lower_bound, expansion_witnesses
from .group import RewritingSystem, group_from_spec, load_group
from .operator import (
    SupportedFunction,
    averaging_norm,
    build_truncated,
    conjugate_exponent,
    norm2_estimate,
    richardson_extrapolate,
)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
RECIPES = ("cohen", "main-theorem", "radial-factor", "expansion")


@dataclass
class RunConfig:
    """Parameters shared by all recipes; loadable from JSON."""

    group: dict | str = field(default_factory=lambda: {"preset": "free", "rank": 2})
    recipe: str = "cohen"
    p_list: list = field(default_factory=lambda: [1.25, 1.5])
    n_range: list = field(default_factory=lambda: [1, 2])
    R_schedule: list = field(default_factory=lambda: [6, 8, 10, 12])
    tol: float = 1e-8
    max_iters: int = 5000
    seed: int = 42
    out: str = "out"
    max_elements: int = DEFAULT_MAX_ELEMENTS
    witness_radius: int = 6
    delta: float | None = None

    def __post_init__(self):
        if any(not (p > 1 and math.isfinite(p)) for p in self.p_list):
            raise InputError("every p must lie in (1, inf)")
        if any(int(n) < 0 for n in self.n_range):
            raise InputError("n values must be >= 0")
        if any(int(R) < 1 for R in self.R_schedule):
            raise InputError("radii must be >= 1")
        self.n_range = [int(n) for n in self.n_range]
        self.R_schedule = sorted(int(R) for R in self.R_schedule)

    @classmethod
    def from_json(cls, path, **overrides) -> RunConfig:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {path}: {exc}") from None
        data.update({k: v for k, v in overrides.items() if v is not None})
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def rs(self) -> RewritingSystem:
        if isinstance(self.group, str):
            return load_group(self.group)
        return group_from_spec(self.group)


@dataclass
class Table:
    recipe: str
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)

    def to_tsv(self) -> str:
        lines = ["\t".join(self.columns)]
        for r in self.rows:
            lines.append("\t".join(_fmt_cell(r.get(c)) for c in self.columns))
        return "\n".join(lines) + "\n"

    def to_json(self, timestamp: bool = True) -> str:
        d = {"schema_version": SCHEMA_VERSION, "recipe": self.recipe, "columns": self.columns,
             "rows": self.rows, "meta": self.meta}
        if timestamp:
            d["timestamp"] = datetime.now(timezone.utc).isoformat()
        return json.dumps(d, indent=2, default=_json_default)

    def write(self, out_dir, stem: str | None = None) -> tuple[Path, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = stem or self.recipe
        tsv, js = out / f"{stem}.tsv", out / f"{stem}.json"
        tsv.write_text(self.to_tsv())
        js.write_text(self.to_json())
        return tsv, js


def _fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _json_default(o):
    if hasattr(o, "item"):
        return o.item()
    if hasattr(o, "tolist"):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


def fit_radius(rs: RewritingSystem, R: int, extra: int, max_elements: int) -> int:
    """Largest radius ``<= R`` whose ball ``B(R + extra)`` fits the budget."""
    r = R
    while r > 1 and ball_size_bound(rs, r + extra) > max_elements:
        r -= 1
    if r != R:
        warnings.warn(f"radius shrunk from {R} to {r} to fit the element budget",
                      RuntimeWarning, stacklevel=2)
    return r


def cohen_exact(k: int, n: int) -> float:
    """Closed-form ``||lambda_{S(n)}||_{2->2}`` in the free group of rank ``k``."""
    if n == 0:
        return 1.0
    return ((1 - 1 / k) * n + 1) * (2 * k - 1) ** (-n / 2)


def sphere_norm2(rs: RewritingSystem, n: int, R: int, *, tol: float = 1e-8,
                 max_iters: int = 5000, ball=None) -> float:
    """Truncated ``p = 2`` estimate of the sphere averaging operator."""
    ball = ball if ball is not None and ball.radius >= R + n else enumerate_ball(rs, R + n)
    a = SupportedFunction.indicator(rs, ball.sphere(n).elements())
    est = norm2_estimate(build_truncated(rs, a, R, ball=ball), tol=tol, max_iters=max_iters)
    return est.value / len(a)


def _require_free(rs: RewritingSystem, recipe: str) -> int:
    if not rs.is_free:
        raise RecipeError(f"recipe {recipe!r} needs a free group preset, got {rs.name}")
    return int(rs.params.get("rank", rs.n_symbols // 2))


def recipe_cohen(cfg: RunConfig) -> Table:
    """Truncated estimates of sphere norms against the closed form."""
    rs = cfg.rs()
    k = _require_free(rs, "cohen")
    Rs_all = cfg.R_schedule
    rows = []
    for n in cfg.n_range:
        Rs = sorted({fit_radius(rs, R, n, cfg.max_elements) for R in Rs_all})
        ball = enumerate_ball(rs, Rs[-1] + n, max_elements=cfg.max_elements)
        exact = cohen_exact(k, n)
        row = {"n": n, "exact": exact}
        vals = []
        for R in Rs:
            v = sphere_norm2(rs, n, R, tol=cfg.tol, max_iters=cfg.max_iters, ball=ball)
            vals.append(v)
            row[f"R{R}"] = v
            log.info("cohen n=%d R=%d estimate=%.8f", n, R, v)
        row["R_max"] = Rs[-1]
        row["rel_err_R_max"] = (vals[-1] - exact) / exact
        if len(Rs) >= 4:
            ex = richardson_extrapolate(Rs, vals)
            row["extrapolated"] = ex["L"]
            row["rel_err_extrapolated"] = (ex["L"] - exact) / exact
        rows.append(row)
    cols = ["n", "exact"] + [f"R{R}" for R in Rs_all] + ["R_max", "rel_err_R_max",
                                                          "extrapolated", "rel_err_extrapolated"]
    return Table("cohen", cols, rows, {"group": rs.name, "k": k, "R_schedule": Rs_all})


def _delta(cfg: RunConfig, rs: RewritingSystem) -> float:
    if cfg.delta is not None:
        return float(cfg.delta)
    if rs.is_free:
        return math.log(rs.n_symbols - 1)
    return max(growth_stats(enumerate_ball(rs, 10, max_elements=cfg.max_elements)).delta_hat, 1e-3)


def recipe_main_theorem(cfg: RunConfig) -> Table:
    """Trivial lower bound, Boyd estimate and cocycle upper bounds per ``(n, p)``."""
    rs = cfg.rs()
    if any(not 1 < p < 2 for p in cfg.p_list):
        raise InputError("main-theorem recipe needs p in (1, 2)")
    delta = _delta(cfg, rs)
    R = fit_radius(rs, cfg.R_schedule[0], max(cfg.n_range), cfg.max_elements)
    n_max = max(cfg.n_range)
    H_max = n_max + 4
    big = enumerate_ball(rs, max(R, H_max) + n_max, max_elements=cfg.max_elements)
    rows = []
    # identity sanity row
    for p in cfg.p_list:
        e = [rs.identity]
        up = optimize_epsilon(rs, e, p, delta, ball=big)[1].bound
        rows.append({"n": "e", "p": p, "size": 1, "trivial_lower": 1.0,
                     "boyd": averaging_norm(rs, e, p, R, ball=big, tol=cfg.tol).value,
                     "upper_std": up, "upper_opt": up, "eps_std": standard_epsilon(p, delta),
                     "eps_opt": None, "ratio_std": up, "ratio_opt": up, "exactness": "trivial"})
    for n in cfg.n_range:
        view = big.sphere(n)
        tables = _BoundTables(rs, view, None, big)
        for p in cfg.p_list:
            lower = len(view) ** (-1 / conjugate_exponent(p))
            boyd = averaging_norm(rs, view, p, R, tol=cfg.tol, max_iters=cfg.max_iters,
                                  seed=cfg.seed, ball=big).value
            eps0 = standard_epsilon(p, delta)
            rep0 = tables.report(p, eps0)
            eps1, rep1 = optimize_epsilon(rs, view, p, delta, tables=tables)
            rows.append({"n": n, "p": p, "size": len(view), "trivial_lower": lower, "boyd": boyd,
                         "upper_std": rep0.bound, "upper_opt": rep1.bound, "eps_std": eps0,
                         "eps_opt": eps1, "ratio_std": rep0.bound / lower,
                         "ratio_opt": rep1.bound / lower, "exactness": rep1.exactness})
            log.info("main n=%d p=%g lower=%.6f boyd=%.6f upper=%.6f", n, p, lower, boyd, rep1.bound)
    cols = ["n", "p", "size", "trivial_lower", "boyd", "upper_std", "upper_opt", "eps_std",
            "eps_opt", "ratio_std", "ratio_opt", "exactness"]
    spread = {}
    for p in cfg.p_list:
        r = [row["ratio_opt"] for row in rows if row["p"] == p and row["n"] != "e"]
        if r:
            spread[str(p)] = max(r) / min(r)
    return Table("main-theorem", cols, rows,
                 {"group": rs.name, "R": R, "delta": delta, "ratio_spread": spread})


def recipe_radial_factor(cfg: RunConfig) -> Table:
    """``estimate * |S(n)|^(1/2) / (n+1)`` at ``p = 2``: bounded in ``n``."""
    rs = cfg.rs()
    R = fit_radius(rs, cfg.R_schedule[-1], max(cfg.n_range), cfg.max_elements)
    ball = enumerate_ball(rs, R + max(cfg.n_range), max_elements=cfg.max_elements)
    k = int(rs.params.get("rank", 0)) if rs.is_free else None
    rows = []
    for n in cfg.n_range:
        size = len(ball.sphere(n))
        est = sphere_norm2(rs, n, R, tol=cfg.tol, max_iters=cfg.max_iters, ball=ball)
        row = {"n": n, "size": size, "R": R, "estimate": est,
               "factor": est * math.sqrt(size) / (n + 1)}
        if k:
            row["exact_factor"] = cohen_exact(k, n) * math.sqrt(size) / (n + 1)
        rows.append(row)
    return Table("radial-factor", ["n", "size", "R", "estimate", "factor", "exact_factor"], rows,
                 {"group": rs.name})


def recipe_expansion(cfg: RunConfig) -> Table:
    """Per ``n``: cocycle-fed lower bound on ``e(S(n))``, witnessed upper bound, ``c``."""
    rs = cfg.rs()
    delta = _delta(cfg, rs)
    n_max = max(cfg.n_range)
    m = cfg.witness_radius
    big = enumerate_ball(rs, max(m, n_max + 4) + n_max, max_elements=cfg.max_elements)
    rows = []
    for n in cfg.n_range:
        view = big.sphere(n)
        lb = best_lower_bound(rs, view, delta, ball=big)
        wit = expansion_witnesses(rs, view, ("balls", "spheres"), max_radius=m, ball=big)
        rows.append({"n": n, "size": len(view), "lower_bound": lb["lower_bound"], "best_p": lb["p"],
                     "provenance": lb["provenance"], "witness_min": wit.min_ratio,
                     "witness_best": wit.best, "c_estimate": wit.min_ratio / len(view)})
    return Table("expansion", ["n", "size", "lower_bound", "best_p", "provenance", "witness_min",
                               "witness_best", "c_estimate"], rows,
                 {"group": rs.name, "witness_radius": m, "delta": delta})


_DISPATCH = {
    "cohen": recipe_cohen,
    "main-theorem": recipe_main_theorem,
    "radial-factor": recipe_radial_factor,
    "expansion": recipe_expansion,
}


def run_recipe(name: str, cfg: RunConfig) -> Table:
    try:
        fn = _DISPATCH[name]
    except KeyError:
        raise InputError(f"unknown recipe {name!r}; choose from {', '.join(RECIPES)}") from None
    return fn(cfg)


def config_dict(cfg: RunConfig) -> dict:
    return asdict(cfg)
