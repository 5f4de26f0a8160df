"""Catalog of named spaces and sample sets.

Space references are strings such as ``pairing(1)`` or
``product(r3-swap,pairing(1))``; set specs are dicts with a ``kind`` key.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .errors import InvalidParams, UnknownBuiltin
from .sets import (
    QPositiveSet,
    make_set,
    product_points,
    read_points_csv,
    sample_diagonal,
    sample_helix,
    sample_line,
    sample_monotone_graph,
    sample_sgn_graph,
)
from .space import SSDSpace, block_diag_space, make_space

SPACE_DOCS = {
    "hilbert-identity(n)": "R^n with the dot product; every subset is q-positive",
    "hilbert-negative(n)": "R^n with minus the dot product; q-positive sets are singletons",
    "r3-swap": "R^3 with b1c2 + b2c1 + b3c3",
    "pairing(m)": "R^m x R^m with <x,y*> + <y,x*>; q-positive = monotone",
    "product(s1,s2)": "block-diagonal form, l2 product norm",
}

SET_DOCS = {
    "diagonal": "graph of the identity {(x, x)} sampled on [lo, hi]^m (pairing spaces)",
    "helix": "{(cos t, sin t, lam*t)} on [lo, hi] (r3-swap); q-positive iff lam >= 1",
    "line": "{t*v} on [lo, hi]; q-positive iff q(v) >= 0",
    "sgn-graph": "graph of the maximal monotone sign map (pairing(1))",
    "monotone-graph": "polyline through nondecreasing breakpoints (pairing(1))",
    "custom-file": "points read from a CSV file",
    "product": "all pairs from two component sets (product spaces)",
}


def parse_call(text: str) -> tuple[str, list]:
    """Split ``name(arg, arg(...), ...)`` into name and raw argument list."""
    text = text.strip()
    if "(" not in text:
        return text, []
    if not text.endswith(")"):
        raise InvalidParams(f"malformed builtin reference {text!r}")
    name = text[: text.index("(")].strip()
    inner = text[text.index("(") + 1: -1]
    args, depth, cur = [], 0, []
    for ch in inner:
        if ch == "," and depth == 0:
            args.append("".join(cur).strip())
            cur = []
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise InvalidParams(f"unbalanced parentheses in {text!r}")
        cur.append(ch)
    if depth != 0:
        raise InvalidParams(f"unbalanced parentheses in {text!r}")
    if "".join(cur).strip():
        args.append("".join(cur).strip())
    return name, args


def _int_arg(name, args, default=None):
    if not args:
        if default is None:
            raise InvalidParams(f"{name} needs an integer parameter")
        return default
    try:
        n = int(args[0])
    except (TypeError, ValueError):
        raise InvalidParams(f"{name}: expected an integer, got {args[0]!r}") from None
    if n < 1:
        raise InvalidParams(f"{name}: dimension must be positive, got {n}")
    return n


def builtin_space(ref: str) -> SSDSpace:
    name, args = parse_call(ref)
    if name == "hilbert-identity":
        n = _int_arg(name, args, 2)
        return make_space(np.eye(n), name=f"hilbert-identity({n})")
    if name == "hilbert-negative":
        n = _int_arg(name, args, 2)
        return make_space(-np.eye(n), name=f"hilbert-negative({n})")
    if name == "r3-swap":
        if args:
            raise InvalidParams("r3-swap takes no parameters")
        S = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        return make_space(S, name="r3-swap")
    if name == "pairing":
        m = _int_arg(name, args, 1)
        S = np.zeros((2 * m, 2 * m))
        S[:m, m:] = np.eye(m)
        S[m:, :m] = np.eye(m)
        return make_space(S, name=f"pairing({m})")
    if name == "product":
        if len(args) != 2:
            raise InvalidParams("product needs exactly two component spaces")
        s1, s2 = builtin_space(args[0]), builtin_space(args[1])
        return block_diag_space(s1, s2, name=f"product({s1.name},{s2.name})")
    raise UnknownBuiltin(f"unknown builtin space {name!r}")


def _range(spec, lo=-3.0, hi=3.0, count=None, step=0.05):
    lo = float(spec.get("lo", lo))
    hi = float(spec.get("hi", hi))
    if "count" in spec:
        count = int(spec["count"])
    elif count is None:
        st = float(spec.get("step", step))
        if st <= 0:
            raise InvalidParams("step must be positive")
        count = int(round((hi - lo) / st)) + 1
    if not lo < hi or count < 2:
        raise InvalidParams(f"bad sampling range lo={lo}, hi={hi}, count={count}")
    return lo, hi, count


def sample_set(spec: dict[str, Any], space: SSDSpace, base_dir=None) -> tuple[np.ndarray, float, dict]:
    """Points, mesh and normalized generator tag for a set spec (no validation)."""
    if "kind" not in spec:
        raise InvalidParams("set spec needs a 'kind'")
    kind = spec["kind"]
    if kind == "diagonal":
        if space.dim % 2:
            raise InvalidParams("diagonal needs an even-dimensional pairing space")
        m = space.dim // 2
        lo, hi, count = _range(spec)
        pts, mesh = sample_diagonal(lo, hi, count, m)
        gen = {"kind": kind, "lo": lo, "hi": hi, "count": count}
    elif kind == "helix":
        lam = float(spec.get("lam", 1.0))
        lo, hi, count = _range(spec, -10.0, 10.0)
        pts, mesh = sample_helix(lam, lo, hi, count)
        gen = {"kind": kind, "lam": lam, "lo": lo, "hi": hi, "count": count}
    elif kind == "line":
        if "v" not in spec:
            raise InvalidParams("line needs a direction 'v'")
        v = np.asarray(spec["v"], dtype=float)
        lo, hi, count = _range(spec)
        pts, mesh = sample_line(v, lo, hi, count)
        gen = {"kind": kind, "v": v.tolist(), "lo": lo, "hi": hi, "count": count}
    elif kind == "sgn-graph":
        radius = float(spec.get("radius", 3.0))
        step = float(spec.get("step", 0.05))
        pts, mesh = sample_sgn_graph(radius, step)
        gen = {"kind": kind, "radius": radius, "step": step}
    elif kind == "monotone-graph":
        if "breakpoints" not in spec:
            raise InvalidParams("monotone-graph needs 'breakpoints'")
        step = float(spec.get("step", 0.05))
        pts, mesh = sample_monotone_graph(spec["breakpoints"], step)
        gen = {"kind": kind, "breakpoints": np.asarray(spec["breakpoints"], float).tolist(), "step": step}
    elif kind == "custom-file":
        if "path" not in spec:
            raise InvalidParams("custom-file needs 'path'")
        path = spec["path"]
        if base_dir is not None:
            from pathlib import Path

            p = Path(path)
            path = p if p.is_absolute() else Path(base_dir) / p
        pts, mesh = read_points_csv(path, space.dim), 0.0
        gen = {"kind": kind, "path": str(spec["path"])}
    elif kind == "custom":
        pts, mesh = np.atleast_2d(np.asarray(spec["points"], dtype=float)), 0.0
        gen = {"kind": kind, "count": int(pts.shape[0])}
    elif kind == "product":
        if len(space.components) != 2:
            raise InvalidParams("product sets need a product space")
        s1, s2 = space.components
        p1, m1, g1 = sample_set(spec["first"], s1, base_dir)
        p2, m2, g2 = sample_set(spec["second"], s2, base_dir)
        pts, mesh = product_points(p1, p2), float(np.hypot(m1, m2))
        gen = {"kind": kind, "first": g1, "second": g2}
    else:
        raise UnknownBuiltin(f"unknown builtin set {kind!r}")
    if pts.shape[1] != space.dim:
        raise InvalidParams(f"set '{kind}' has dimension {pts.shape[1]}, space '{space.name}' has {space.dim}")
    return pts, float(mesh), gen


def builtin_set(spec: dict[str, Any] | str, space: SSDSpace, base_dir=None, **params) -> QPositiveSet:
    """Build and validate a q-positive sample set."""
    if isinstance(spec, str):
        spec = {"kind": spec, **params}
    pts, mesh, gen = sample_set(spec, space, base_dir)
    return make_set(space, pts, gen, mesh)


def list_builtins() -> str:
    lines = ["spaces:"]
    lines += [f"  {k:<22} {v}" for k, v in SPACE_DOCS.items()]
    lines.append("sets:")
    lines += [f"  {k:<22} {v}" for k, v in SET_DOCS.items()]
    return "\n".join(lines)
