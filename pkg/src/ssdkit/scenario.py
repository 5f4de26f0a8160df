"""Scenario files: loading, validation, and execution of verification suites.

Scenarios are TOML documents validated against ``scenarios/schema.json``.
Each listed suite runs in order; within a suite, independent items (sets
or functions) may run on a thread pool, and results are assembled in list
order so the report does not depend on scheduling.
"""

from __future__ import annotations

import json
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import jsonschema
import numpy as np
import tomli

from . import builtins as cat
from .anchors import SCENARIO_ANCHORS, ref
from .convex import (
    MaxAffine,
    PointEnvelope,
    Quadratic,
    biconjugate_check,
    read_grid_csv,
)
from .errors import ConfigError, DimensionMismatch, SSDError, UnknownBuiltin
from .fitzpatrick import (
    identities_check,
    phi_conjugate_check,
    phi_function,
    phi_sampling_allowance,
    psi_function,
    sandwich_check,
    theta_function,
)
from .gossez import dual_axioms_check, gossez_extension_check, make_dual, ni_check
from .grid import GridSpec
from .report import FAIL, NOT_FALSIFIED, Check, CheckReport
from .sets import QPositiveSet, make_set, maximality_falsifier, min_pairwise_q, min_q_to, read_points_csv
from .space import EPS_Q, SSDSpace, make_space
from .vz import distance_bounds_check, is_mas, is_vz, mas_verdict, pair_bound_check, vz_duality_check

DEFAULT_SEED = 42
SUITES = ("core", "qpos", "maximality", "fitzpatrick", "sandwich", "vz", "mas", "lemma6_10",
          "distance", "pairs", "gossez", "ni", "biconjugate")
DEFAULT_TOL = {
    "core": 1e-9, "qpos": EPS_Q, "maximality": EPS_Q, "fitzpatrick": 1e-9, "sandwich": 1e-6,
    "vz": 1e-6, "mas": 1e-6, "lemma6_10": 1e-8, "distance": 1e-9, "pairs": 1e-9,
    "gossez": 1e-9, "ni": 1e-9, "biconjugate": 1e-9,
}
LSC_NOTE = ("all function representations are lower semicontinuous in the norm topology; "
            "in finite dimension the weak topologies used for the general theory coincide with it")

COLLAPSE_NOTE = ("the form matrix is invertible, so the embedding has dense (full) range and the "
                 "MAS and VZ verdicts are expected to coincide")


def schema() -> dict:
    return json.loads(resources.files("ssdkit.scenarios").joinpath("schema.json").read_text("utf-8"))


def bundled_names() -> list[str]:
    root = resources.files("ssdkit.scenarios")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def bundled_path(name: str) -> Path:
    p = resources.files("ssdkit.scenarios").joinpath(f"{name}.toml")
    if not p.is_file():
        raise UnknownBuiltin(f"no bundled scenario named {name!r}")
    return Path(str(p))


def _line_of(text: str, key: str | None) -> int | None:
    if not key:
        return None
    pat = re.compile(rf"^\s*(\[+\s*)?{re.escape(key)}\b")
    for n, line in enumerate(text.splitlines(), start=1):
        if pat.search(line):
            return n
    for n, line in enumerate(text.splitlines(), start=1):
        if key in line:
            return n
    return None


def parse_text(text: str) -> dict:
    try:
        return tomli.loads(text)
    except tomli.TOMLDecodeError as e:
        m = re.search(r"line (\d+)", str(e))
        raise ConfigError(f"cannot parse scenario: {e}", line=int(m.group(1)) if m else None) from None


def validate(data: dict, text: str = "") -> None:
    """Schema validation plus cross-references; raises ``ConfigError`` naming the key."""
    errors = sorted(jsonschema.Draft202012Validator(schema()).iter_errors(data), key=lambda e: list(e.path))
    if errors:
        e = errors[0]
        path = [str(p) for p in e.path]
        key = next((p for p in reversed(path) if not p.isdigit()), path[0] if path else None)
        if path and path[0] == "suites" and e.validator == "enum":
            raise ConfigError(f"unknown suite {e.instance!r}", key=str(e.instance), line=_line_of(text, "suites"))
        where = ".".join(path) or "<root>"
        raise ConfigError(f"{where}: {e.message}", key=key, line=_line_of(text, key))
    for section in ("sets", "functions"):
        ids = [item["id"] for item in data.get(section, [])]
        dup = {i for i in ids if ids.count(i) > 1}
        if dup:
            k = sorted(dup)[0]
            raise ConfigError(f"duplicate {section} id {k!r}", key=k, line=_line_of(text, "id"))
    set_ids = {s["id"] for s in data.get("sets", [])}
    for fn in data.get("functions", []):
        if fn["kind"] in ("phi", "theta", "psi") and fn.get("set") not in set_ids:
            raise ConfigError(f"function {fn['id']!r} references unknown set {fn.get('set')!r}",
                              key="set", line=_line_of(text, "set"))
    for k in data.get("tolerances", {}):
        if k not in SUITES:
            raise ConfigError(f"tolerance for unknown suite {k!r}", key=k, line=_line_of(text, k))
    for k in data.get("params", {}):
        if k not in SUITES:
            raise ConfigError(f"params for unknown suite {k!r}", key=k, line=_line_of(text, k))
    grids = data.get("grids", {})
    for name, g in grids.items():
        if "bounds" not in g and not ({"lo", "hi"} <= g.keys() and ({"step", "count"} & g.keys())):
            raise ConfigError(f"grid {name!r} needs 'bounds' or lo/hi with step or count",
                              key=name, line=_line_of(text, name))
    for suite in data["suites"]:
        params = data.get("params", {}).get(suite, {})
        for pair in params.get("pairs", []):
            for gname in pair:
                if gname not in grids:
                    raise ConfigError(f"suite {suite!r} references undefined grid {gname!r} (in pairs)",
                                      key="pairs", line=_line_of(text, "pairs"))
        for role, gname in _grid_roles(suite, params, grids).items():
            if gname is not None and gname not in grids:
                raise ConfigError(f"suite {suite!r} references undefined grid {gname!r} (as {role})",
                                  key=role, line=_line_of(text, suite))


_GRID_DEFAULTS: dict[str, dict[str, tuple[str, ...]]] = {
    "maximality": {"grid": ("primal",)},
    "fitzpatrick": {"grid": ("primal",), "dual_search": ("search", "primal")},
    "sandwich": {"grid": ("primal",)},
    "vz": {"probes": ("probes", "primal"), "search": ("search",)},
    "mas": {"grid": ("primal",), "dual_grid": ("dual", "primal")},
    "lemma6_10": {"probes": ("probes", "primal"), "search": ("search",), "dual_search": ("dual_search",)},
    "distance": {"probes": ("probes", "primal")},
    "gossez": {"dual_grid": ("dual", "primal")},
    "ni": {"dual_grid": ("dual", "primal")},
    "biconjugate": {"grid": ("primal",), "dual_grid": ("dual", "primal")},
}
_OPTIONAL_GRIDS = {("lemma6_10", "search"), ("lemma6_10", "dual_search"), ("vz", "search"),
                   ("distance", "probes")}


def _grid_roles(suite: str, params: dict, grids: dict) -> dict[str, str | None]:
    out = {}
    for role, fallbacks in _GRID_DEFAULTS.get(suite, {}).items():
        if role in params:
            out[role] = params[role]
            continue
        name = next((g for g in fallbacks if g in grids), None)
        if name is None and (suite, role) not in _OPTIONAL_GRIDS:
            name = fallbacks[0]
        out[role] = name
    return out


@dataclass
class Scenario:
    name: str
    data: dict
    text: str = ""
    base_dir: Path | None = None
    seed: int = DEFAULT_SEED
    description: str = ""

    @property
    def suites(self) -> list[str]:
        return list(self.data["suites"])

    def tol(self, suite: str) -> float:
        return float(self.data.get("tolerances", {}).get(suite, DEFAULT_TOL[suite]))

    def params(self, suite: str) -> dict:
        return dict(self.data.get("params", {}).get(suite, {}))


def load_scenario(source: str | Path, seed: int | None = None) -> Scenario:
    """Load a scenario file, or a bundled scenario by name."""
    p = Path(source)
    if not p.exists() and not str(source).endswith(".toml"):
        p = bundled_path(str(source))
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read scenario file: {e}") from None
    return scenario_from_text(text, base_dir=p.parent, seed=seed)


def scenario_from_text(text: str, base_dir: Path | None = None, seed: int | None = None) -> Scenario:
    data = parse_text(text)
    validate(data, text)
    s = seed if seed is not None else int(data.get("seed", DEFAULT_SEED))
    return Scenario(data["name"], data, text, base_dir, s, data.get("description", ""))


# ------------------------------------------------------------------ building


@dataclass
class Context:
    scenario: Scenario
    space: SSDSpace
    raw_sets: dict[str, tuple[np.ndarray, float, dict]]
    grids: dict[str, GridSpec]
    workers: int = 1
    _sets: dict[str, QPositiveSet] = field(default_factory=dict)
    _functions: dict[str, Any] = field(default_factory=dict)
    _dual: Any = None

    def qset(self, sid: str) -> QPositiveSet:
        if sid not in self._sets:
            pts, mesh, gen = self.raw_sets[sid]
            self._sets[sid] = make_set(self.space, pts, gen, mesh)
        return self._sets[sid]

    def function(self, fid: str):
        if fid not in self._functions:
            spec = next(f for f in self.scenario.data.get("functions", []) if f["id"] == fid)
            self._functions[fid] = build_function(spec, self)
        return self._functions[fid]

    def dual(self):
        if self._dual is None:
            self._dual = make_dual(self.space)
        return self._dual

    def grid(self, name: str | None) -> GridSpec | None:
        return None if name is None else self.grids[name]

    def map(self, fn: Callable, items: list) -> list:
        if self.workers <= 1 or len(items) <= 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.workers) as ex:
            return list(ex.map(fn, items))


def build_space(spec, base_dir: Path | None) -> SSDSpace:
    if isinstance(spec, str):
        return cat.builtin_space(spec)
    if "matrix" in spec:
        S = spec["matrix"]
    elif "matrix_file" in spec:
        path = Path(spec["matrix_file"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        S = read_points_csv(path)
    else:
        raise ConfigError("space table needs 'matrix' or 'matrix_file'", key="space")
    return make_space(S, require_banach=bool(spec.get("require_banach", False)), name=spec.get("name", "custom"))


def build_grid(spec: dict, dim: int) -> GridSpec:
    if "bounds" in spec:
        return GridSpec.from_bounds(spec["bounds"])
    d = int(spec.get("dim", dim))
    if "count" in spec:
        return GridSpec.from_bounds([(spec["lo"], spec["hi"], spec["count"])] * d)
    return GridSpec.from_step(float(spec["lo"]), float(spec["hi"]), float(spec["step"]), d)


def build_function(spec: dict, ctx: Context):
    kind, dim = spec["kind"], ctx.space.dim
    if kind == "quadratic":
        return Quadratic(spec["Q"], spec.get("b"), spec.get("c", 0.0))
    if kind == "half-norm-sq":
        d = int(spec.get("dim", dim))
        return Quadratic(float(spec.get("scale", 1.0)) * np.eye(d), None, spec.get("c", 0.0))
    if kind == "max-affine":
        return MaxAffine(spec["slopes"], spec["offsets"])
    if kind == "random-max-affine":
        idx = [f["id"] for f in ctx.scenario.data["functions"]].index(spec["id"])
        rng = np.random.default_rng([ctx.scenario.seed, idx])
        n, r, d = int(spec.get("pieces", 8)), float(spec.get("slope_range", 1.0)), int(spec.get("dim", dim))
        return MaxAffine(rng.uniform(-r, r, size=(n, d)), rng.uniform(-1.0, 1.0, size=n))
    if kind == "point-envelope":
        return PointEnvelope(spec["points"], spec["values"])
    if kind == "phi":
        return phi_function(ctx.space, ctx.qset(spec["set"]))
    if kind == "theta":
        return theta_function(ctx.qset(spec["set"]))
    if kind == "psi":
        return psi_function(ctx.qset(spec["set"]))
    if kind == "grid-file":
        path = Path(spec["path"])
        if ctx.scenario.base_dir is not None and not path.is_absolute():
            path = ctx.scenario.base_dir / path
        return read_grid_csv(path)
    raise ConfigError(f"unknown function kind {kind!r}", key="kind")


def build_context(sc: Scenario, workers: int = 1) -> Context:
    try:
        space = build_space(sc.data["space"], sc.base_dir)
    except SSDError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"space: {e}", key="space", line=_line_of(sc.text, "space")) from None
    raw = {}
    for spec in sc.data.get("sets", []):
        body = {k: v for k, v in spec.items() if k != "id"}
        try:
            raw[spec["id"]] = cat.sample_set(body, space, sc.base_dir)
        except SSDError as e:
            raise ConfigError(f"set {spec['id']!r}: {e}", key=spec["id"], line=_line_of(sc.text, "id")) from None
    grids = {}
    for name, g in sc.data.get("grids", {}).items():
        try:
            grids[name] = build_grid(g, space.dim)
        except SSDError as e:
            raise ConfigError(f"grid {name!r}: {e}", key=name, line=_line_of(sc.text, name)) from None
    return Context(sc, space, raw, grids, workers)


# ------------------------------------------------------------------ suites


def _items(params: dict, single: str, plural: str, available: list[str]) -> list[str]:
    if plural in params:
        return list(params[plural])
    if single in params:
        return [params[single]]
    return available


def _set_ids(ctx: Context, params: dict, all_default: bool = True) -> list[str]:
    ids = list(ctx.raw_sets)
    return _items(params, "set", "sets", ids if all_default else ids[:1])


def _fn_ids(ctx: Context, params: dict, all_default: bool = True) -> list[str]:
    ids = [f["id"] for f in ctx.scenario.data.get("functions", [])]
    return _items(params, "function", "functions", ids if all_default else ids[:1])


def suite_core(ctx: Context, tol: float, params: dict) -> CheckReport:
    sp = ctx.space
    rng = np.random.default_rng(ctx.scenario.seed)
    n = int(params.get("count", 1000))
    B = rng.standard_normal((n, sp.dim)) * 2.0
    C = rng.standard_normal((n, sp.dim)) * 2.0
    rep = CheckReport("core")
    sym = np.array([abs(sp.form(b, c) - sp.form(c, b)) for b, c in zip(B[:100], C[:100])])
    rep.add(Check.measure("symmetry", ref("qpos"), float(sym.max()), 0.0, notes="form(b, c) == form(c, b)"))
    exp = np.abs(sp.q(B - C) - (sp.q(B) - np.einsum("ni,ij,nj->n", B, sp.S, C) + sp.q(C)))
    scale = 1.0 + np.abs(sp.q(B)) + np.abs(sp.q(C))
    rep.add(Check.measure("expansion", ref("qpos"), float((exp / scale).max()), tol))
    if not sp.banach:
        rep.add(Check.skipped("cauchy_schwarz", ref("cauchy_schwarz"), "space is not a Banach SSD space"))
        return rep
    cs = np.abs(np.einsum("ni,ij,nj->n", B, sp.S, C)) - np.linalg.norm(B, axis=1) * np.linalg.norm(C, axis=1)
    i = int(np.argmax(cs))
    rep.add(Check.measure("cauchy_schwarz", ref("cauchy_schwarz"), cs[i], tol, witness=[B[i].tolist(), C[i].tolist()]))
    pv = -sp.p(B)
    i = int(np.argmax(pv))
    rep.add(Check.measure("p_nonneg", ref("p_nonneg"), pv[i], 1e-12, witness=B[i].tolist()))
    lip = np.abs(sp.p(B) - sp.p(C)) - np.linalg.norm(B - C, axis=1) * (np.linalg.norm(B, axis=1) + np.linalg.norm(C, axis=1))
    i = int(np.argmax(lip))
    rep.add(Check.measure("p_lipschitz", ref("p_lipschitz"), lip[i], tol, witness=[B[i].tolist(), C[i].tolist()]))
    return rep


def suite_qpos(ctx: Context, tol: float, params: dict) -> CheckReport:
    rep = CheckReport("qpos")

    def one(sid):
        pts, mesh, gen = ctx.raw_sets[sid]
        value, i, j = min_pairwise_q(ctx.space, pts)
        viol = -value if np.isfinite(value) else -np.inf
        wit = [pts[i].tolist(), pts[j].tolist()] if viol > tol else None
        chk = Check.measure(sid, ref("qpos"), viol, tol, witness=wit, points=int(pts.shape[0]),
                            generator=gen, mesh=mesh,
                            notes="exhaustive pair scan; witness is the minimizing pair" if wit else "exhaustive pair scan")
        out = [chk]
        if viol <= tol:
            mq, _ = min_q_to(ctx.space, pts, pts)
            out.append(Check.measure(f"{sid}.min_q_zero", ref("min_q_zero_on_set"), float(np.abs(mq).max()),
                                     tol, notes="min over the set of q(A - a) is attained at a itself"))
        return out

    for rows in ctx.map(one, _set_ids(ctx, params)):
        for r in rows:
            rep.add(r)
    return rep


def suite_maximality(ctx: Context, tol: float, params: dict) -> CheckReport:
    rep = CheckReport("maximality")
    grid = ctx.grid(_grid_roles("maximality", params, ctx.grids)["grid"])
    floor = float(params.get("dist_floor", 0.2))
    for sid in _set_ids(ctx, params):
        found = maximality_falsifier(ctx.space, ctx.qset(sid), grid, floor, tol)
        worst = max((v.value for v in found), default=-np.inf)
        chk = Check(sid, ref("maximality"), FAIL if found else NOT_FALSIFIED,
                    float(len(found)), 0.0, 0.0,
                    [w.tolist() for w in found[0].witness] if found else None,
                    "grid nodes q-positively related to the whole sample; empty means not falsified",
                    {"candidates": len(found), "dist_floor": floor, "largest_inf_q": worst})
        rep.add(chk)
    return rep


def suite_fitzpatrick(ctx: Context, tol: float, params: dict) -> CheckReport:
    roles = _grid_roles("fitzpatrick", params, ctx.grids)
    grid, search = ctx.grid(roles["grid"]), ctx.grid(roles["dual_search"])
    n = int(params.get("count", 1000))
    rep = CheckReport("fitzpatrick")

    def one(sid):
        A = ctx.qset(sid)
        r = identities_check(ctx.space, A, n, ctx.scenario.seed, tol)
        r.extend(phi_conjugate_check(ctx.space, A, grid, search, max(tol, 1e-8)))
        return sid, r

    for sid, r in ctx.map(one, _set_ids(ctx, params)):
        rep.extend(r, prefix=sid)
    return rep


def suite_sandwich(ctx: Context, tol: float, params: dict) -> CheckReport:
    grid = ctx.grid(_grid_roles("sandwich", params, ctx.grids)["grid"])
    rep = CheckReport("sandwich")
    for sid in _set_ids(ctx, params, all_default=False):
        for fid in _fn_ids(ctx, params, all_default=False):
            rep.extend(sandwich_check(ctx.space, ctx.qset(sid), ctx.function(fid), grid, tol), prefix=f"{sid}.{fid}")
    return rep


def _expected_verdict(fid: str, rows: CheckReport, verdict: bool, expected: bool, key: str) -> CheckReport:
    """Collapse detail rows into one row asserting the expected classification."""
    out = CheckReport(rows.scenario)
    ok = verdict == expected and all(c.name != "routes_agree" or c.passed for c in rows.checks)
    wit = next((c.witness for c in rows.checks if not c.passed and c.witness is not None), None)
    out.add(Check.measure("verdict", ref(key), 0.0 if ok else 1.0, 0.0, witness=wit,
                          notes=f"expected {'positive' if expected else 'negative'} classification",
                          verdict=verdict, expected=expected, rows=[c.to_dict() for c in rows.checks]))
    return out


def suite_vz(ctx: Context, tol: float, params: dict) -> CheckReport:
    roles = _grid_roles("vz", params, ctx.grids)
    probes, search = ctx.grid(roles["probes"]), ctx.grid(roles["search"])
    expect = params.get("expect", {})
    rep = CheckReport("vz")

    def one(fid):
        vz = is_vz(ctx.space, ctx.function(fid), probes, search, tol)
        r = vz.to_report()
        if fid in expect:
            r = _expected_verdict(fid, r, vz.is_vz, bool(expect[fid]), "vz_routes")
        return fid, r

    for fid, r in ctx.map(one, _fn_ids(ctx, params)):
        rep.extend(r, prefix=fid)
    return rep


def _phi_allowance(ctx: Context, fid: str, X: np.ndarray) -> float:
    spec = next(f for f in ctx.scenario.data.get("functions", []) if f["id"] == fid)
    if spec["kind"] != "phi":
        return 0.0
    return float(phi_sampling_allowance(ctx.space, ctx.qset(spec["set"]), X).max())


def suite_mas(ctx: Context, tol: float, params: dict) -> CheckReport:
    roles = _grid_roles("mas", params, ctx.grids)
    grid, dgrid = ctx.grid(roles["grid"]), ctx.grid(roles["dual_grid"])
    dual = ctx.dual()
    expect = params.get("expect", {})
    rep = CheckReport("mas")

    def one(fid):
        r = is_mas(ctx.space, dual, ctx.function(fid), grid, dgrid, tol, _phi_allowance(ctx, fid, grid.nodes()))
        if fid in expect:
            r = _expected_verdict(fid, r, mas_verdict(r), bool(expect[fid]), "mas_vz_collapse")
        return fid, r

    for fid, r in ctx.map(one, _fn_ids(ctx, params)):
        rep.extend(r, prefix=fid)
    return rep


def suite_lemma6_10(ctx: Context, tol: float, params: dict) -> CheckReport:
    roles = _grid_roles("lemma6_10", params, ctx.grids)
    probes = ctx.grid(roles["probes"])
    search, dsearch = ctx.grid(roles["search"]), ctx.grid(roles["dual_search"])
    dual = ctx.dual()
    rep = CheckReport("lemma6_10")

    def one(fid):
        return fid, vz_duality_check(ctx.space, dual, ctx.function(fid), probes, search, dsearch, tol)

    for fid, r in ctx.map(one, _fn_ids(ctx, params)):
        rep.extend(r, prefix=fid)
    return rep


def suite_distance(ctx: Context, tol: float, params: dict) -> CheckReport:
    roles = _grid_roles("distance", params, ctx.grids)
    if "random_probes" in params:
        rng = np.random.default_rng(ctx.scenario.seed)
        box = float(params.get("box", 2.0))
        probes = rng.uniform(-box, box, size=(int(params["random_probes"]), ctx.space.dim))
    else:
        probes = ctx.grid(roles["probes"])
    rep = CheckReport("distance")
    for sid in _set_ids(ctx, params, all_default=False):
        for fid in _fn_ids(ctx, params, all_default=False):
            rep.extend(distance_bounds_check(ctx.space, ctx.function(fid), probes, ctx.qset(sid), tol),
                       prefix=f"{sid}.{fid}")
    return rep


def suite_pairs(ctx: Context, tol: float, params: dict) -> CheckReport:
    n = int(params.get("count", 1000))
    box = float(params.get("box", 2.0))
    rep = CheckReport("pairs")
    for k, fid in enumerate(_fn_ids(ctx, params)):
        rep.extend(pair_bound_check(ctx.space, ctx.function(fid), n, box, ctx.scenario.seed + k, tol), prefix=fid)
    return rep


def suite_gossez(ctx: Context, tol: float, params: dict) -> CheckReport:
    dgrid = ctx.grid(_grid_roles("gossez", params, ctx.grids)["dual_grid"])
    dual = ctx.dual()
    rep = CheckReport("gossez")
    rep.extend(dual_axioms_check(dual, 1000, ctx.scenario.seed), prefix="dual")

    def one(sid):
        return sid, gossez_extension_check(ctx.space, dual, ctx.qset(sid), dgrid, tol,
                                           int(params.get("count", 100)), ctx.scenario.seed)

    for sid, r in ctx.map(one, _set_ids(ctx, params)):
        rep.extend(r, prefix=sid)
    return rep


def suite_ni(ctx: Context, tol: float, params: dict) -> CheckReport:
    dgrid = ctx.grid(_grid_roles("ni", params, ctx.grids)["dual_grid"])
    dual = ctx.dual()
    rep = CheckReport("ni")
    for sid in _set_ids(ctx, params):
        rep.extend(ni_check(ctx.space, dual, ctx.qset(sid), dgrid, tol), prefix=sid)
    return rep


def suite_biconjugate(ctx: Context, tol: float, params: dict) -> CheckReport:
    roles = _grid_roles("biconjugate", params, ctx.grids)
    pairs = [tuple(p) for p in params.get("pairs", [])] or [(roles["grid"], roles["dual_grid"])]
    rep = CheckReport("biconjugate")

    def one(fid):
        f = ctx.function(fid)
        out = CheckReport("biconjugate")
        matching = [(g, d) for g, d in pairs if ctx.grids[g].dim == f.dim]
        if not matching:
            raise DimensionMismatch(f"no grid pair of dimension {f.dim} for function {fid!r}")
        for g, d in matching:
            out.extend(biconjugate_check(f, ctx.grids[g], ctx.grids[d]), prefix=g if len(matching) > 1 else "")
        return fid, out

    for fid, r in ctx.map(one, _fn_ids(ctx, params)):
        rep.extend(r, prefix=fid)
    return rep


SUITE_RUNNERS: dict[str, Callable[[Context, float, dict], CheckReport]] = {
    "core": suite_core, "qpos": suite_qpos, "maximality": suite_maximality,
    "fitzpatrick": suite_fitzpatrick, "sandwich": suite_sandwich, "vz": suite_vz, "mas": suite_mas,
    "lemma6_10": suite_lemma6_10, "distance": suite_distance, "pairs": suite_pairs,
    "gossez": suite_gossez, "ni": suite_ni, "biconjugate": suite_biconjugate,
}

SUITE_ANCHORS: dict[str, list[str]] = {
    "core": ["cauchy_schwarz", "p_nonneg", "p_lipschitz"],
    "qpos": ["qpos", "min_q_zero_on_set"],
    "maximality": ["maximality"],
    "fitzpatrick": ["phi_two_route", "phi_eq_q_on_set", "psi_le_q_on_set", "phi_conj_le_q", "phi_conj_ge",
                    "phi_biconj", "young_on_set", "psi_chain"],
    "sandwich": ["sandwich_upper", "sandwich_lower", "phi_ge_q"],
    "vz": ["vz_residual", "vz_density", "vz_routes"],
    "mas": ["mas_primal", "mas_dual", "mas_vz_collapse"],
    "lemma6_10": ["duality"],
    "distance": ["dist_5", "dist_36", "dist_48", "sharpness"],
    "pairs": ["pair_bound", "pair_bound_linear"],
    "gossez": ["dual_form", "dual_q", "dual_pairing", "hat_identity", "gossez_inclusion", "gossez_forms",
               "gossez_sets", "gossez_chain", "theta_two_route", "extension_near_image"],
    "ni": ["ni"],
    "biconjugate": ["biconjugate"],
}


def run_scenario(sc: Scenario, workers: int = 1) -> CheckReport:
    """Run every listed suite; module errors become failed rows, never exceptions."""
    t0 = time.perf_counter()
    ctx = build_context(sc, workers)
    report = CheckReport(sc.name, seed=sc.seed)
    for suite in sc.suites:
        try:
            sub = SUITE_RUNNERS[suite](ctx, sc.tol(suite), sc.params(suite))
            report.extend(sub, prefix=suite)
        except SSDError as e:
            report.add(Check(f"{suite}.error", ", ".join(ref(k) for k in SUITE_ANCHORS[suite][:1]), FAIL,
                             float("inf"), sc.tol(suite), 0.0, None, f"{type(e).__name__}: {e}"))
    report.meta = {
        "description": sc.description,
        "space": ctx.space.describe(),
        "sets": {sid: {"generator": gen, "mesh": mesh, "points": int(pts.shape[0])}
                 for sid, (pts, mesh, gen) in ctx.raw_sets.items()},
        "grids": {k: g.to_list() for k, g in ctx.grids.items()},
        "suites": sc.suites,
        "tolerances": {s: sc.tol(s) for s in sc.suites},
        "anchors": SCENARIO_ANCHORS.get(sc.name, []),
        "notes": [LSC_NOTE] + ([COLLAPSE_NOTE] if "mas" in sc.suites else []),
    }
    report.wall_time = time.perf_counter() - t0
    return report


def describe(name: str) -> str:
    """Text description of a bundled scenario, suite, or builtin."""
    if name in bundled_names():
        sc = load_scenario(name)
        lines = [f"scenario {name}: {sc.description}", f"  space: {sc.data['space']}",
                 f"  anchors: {', '.join(SCENARIO_ANCHORS.get(name, []))}", "  suites:"]
        for s in sc.suites:
            lines.append(f"    {s}: " + "; ".join(ref(k) for k in SUITE_ANCHORS[s]))
        return "\n".join(lines)
    if name in SUITE_ANCHORS:
        return f"suite {name}:\n" + "\n".join(f"  {k}: {ref(k)}" for k in SUITE_ANCHORS[name])
    base = name.split("(")[0]
    for docs in (cat.SPACE_DOCS, cat.SET_DOCS):
        for key, text in docs.items():
            if key.split("(")[0] == base:
                return f"{key}: {text}"
    raise UnknownBuiltin(f"nothing named {name!r}; try 'ssdkit list'")
