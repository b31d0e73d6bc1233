"""Problem files: JSON with group, complex, reps, model and bundle blocks plus a task list.

Complex numbers are written [re, im]; exact rationals may be written "p/q".
Every block is validated by its module before any task runs.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .bundles import EquivariantAtlas, TransitionBundle, validate_atlas
from .errors import EqsigError, ParseError, ValidationError
from .gcomplex import SimplicialGComplex, validate_action
from .groups import FiniteGroup, Subgroup, make_h_section
from .model import (
    CanonicalModel,
    NonNormalModel,
    automorphism_from,
    build_model,
    build_nonnormal_model,
    extend_automorphism,
    kernel_witness,
    restrict_automorphism,
)
from .reps import UnitaryRep

TASK_ORDER = ["group", "validate", "stratify", "quotient", "apc", "signature", "g_signature", "model", "bundle", "split"]


@dataclass
class Problem:
    name: str
    group: FiniteGroup | None = None
    complex: SimplicialGComplex | None = None
    reps: dict = field(default_factory=dict)
    model: Any = None
    bundle: TransitionBundle | None = None
    tasks: list = field(default_factory=list)
    expect: dict = field(default_factory=dict)


# -- scalars ----------------------------------------------------------------------


def _real(x, where: str) -> float:
    if isinstance(x, bool):
        raise ParseError("expected a number", where)
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str):
        try:
            return float(Fraction(x))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad rational {x!r}", where) from None
    raise ParseError(f"expected a number, got {type(x).__name__}", where)


def _complex(x, where: str) -> complex:
    if isinstance(x, list):
        if len(x) != 2:
            raise ParseError("complex numbers are [re, im]", where)
        return complex(_real(x[0], where), _real(x[1], where))
    return complex(_real(x, where), 0.0)


def _matrix(x, where: str) -> np.ndarray:
    if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
        raise ParseError("expected a matrix (list of rows)", where)
    rows = [[_complex(v, f"{where}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(x)]
    if len({len(r) for r in rows}) != 1:
        raise ParseError("ragged matrix", where)
    return np.array(rows, dtype=complex)


def _int_list(x, where: str) -> list[int]:
    if not isinstance(x, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in x):
        raise ParseError("expected a list of integers", where)
    return [int(v) for v in x]


def _get(block: dict, key: str, where: str, default=...):
    if key in block:
        return block[key]
    if default is ...:
        raise ParseError("missing field", f"{where}.{key}")
    return default


# -- blocks -----------------------------------------------------------------------


def _parse_group(block, where="group") -> FiniteGroup:
    if not isinstance(block, dict):
        raise ParseError("expected an object", where)
    name = block.get("name", "")
    labels = block.get("labels")
    try:
        if "catalog" in block:
            from .catalog_groups import catalog_group

            try:
                return catalog_group(block["catalog"]).group
            except KeyError as e:
                raise ParseError(str(e), f"{where}.catalog") from None
        if "table" in block:
            tab = block["table"]
            if not isinstance(tab, list):
                raise ParseError("expected a square table", f"{where}.table")
            for i, row in enumerate(tab):
                _int_list(row, f"{where}.table[{i}]")
            return FiniteGroup(np.array(tab, dtype=np.int64), name=name, labels=labels)
        if "permutations" in block:
            gens = [_int_list(p, f"{where}.permutations[{i}]") for i, p in enumerate(block["permutations"])]
            return FiniteGroup.from_permutations(gens, name=name)
        if "cyclic" in block:
            return FiniteGroup.cyclic(int(block["cyclic"]))
    except (ValueError, AssertionError) as e:
        raise ValidationError(f"{where}: {e}") from None
    raise ParseError("need one of catalog, table, permutations, cyclic", where)


def _parse_complex(block, G: FiniteGroup | None, where="complex") -> SimplicialGComplex:
    if not isinstance(block, dict):
        raise ParseError("expected an object", where)
    n = _get(block, "vertices", where)
    if not isinstance(n, int):
        raise ParseError("expected an integer", f"{where}.vertices")
    facets = [_int_list(f, f"{where}.facets[{i}]") for i, f in enumerate(_get(block, "facets", where))]
    orient = None
    if block.get("orientation") is not None:
        signs = _int_list(block["orientation"], f"{where}.orientation")
        if len(signs) != len(facets) or any(s not in (1, -1) for s in signs):
            raise ParseError("one sign (+1/-1) per facet", f"{where}.orientation")
        orient = {tuple(sorted(f)): s for f, s in zip(facets, signs)}
    action = None
    if "action" in block:
        if G is None:
            raise ParseError("an action needs a group block", f"{where}.action")
        action = [_int_list(r, f"{where}.action[{i}]") for i, r in enumerate(block["action"])]
        if len(action) != G.order or any(len(r) != n for r in action):
            raise ParseError("one vertex permutation per group element", f"{where}.action")
    try:
        if action is None:
            c = SimplicialGComplex(n, facets, orientation=orient, name=block.get("name", ""))
            if G is not None and G.order > 1:
                c = c.with_action(G, [list(range(n))] * G.order)
        else:
            c = SimplicialGComplex(n, facets, G, action, orient, block.get("name", ""))
    except ValueError as e:
        raise ValidationError(f"{where}: {e}") from None
    return c


def _parse_reps(block, G: FiniteGroup | None, where="reps") -> dict:
    if not isinstance(block, dict):
        raise ParseError("expected an object of named representations", where)
    out = {}
    for name, r in block.items():
        w = f"{where}.{name}"
        if G is None:
            raise ParseError("representations need a group block", w)
        H = _subgroup(G, r.get("subgroup", list(range(G.order))), f"{w}.subgroup")
        mats = _get(r, "matrices", w)
        if not isinstance(mats, list) or len(mats) != H.order:
            raise ParseError(f"need {H.order} matrices (one per subgroup element)", f"{w}.matrices")
        arr = np.stack([_matrix(m, f"{w}.matrices[{i}]") for i, m in enumerate(mats)])
        try:
            rep = UnitaryRep(H.as_group(), arr, name=name)
            rep.check()
        except ValueError as e:
            raise ValidationError(f"{w}: {e}") from None
        out[name] = (H, rep)
    return out


def _subgroup(G: FiniteGroup, els, where: str) -> Subgroup:
    els = _int_list(els, where)
    if any(e < 0 or e >= G.order for e in els):
        raise ParseError("element out of range", where)
    try:
        return Subgroup(G, tuple(els))
    except ValueError as e:
        raise ValidationError(f"{where}: {e}") from None


def _resolve_rep(reps: dict, name, H: Subgroup, where: str) -> UnitaryRep:
    if name not in reps:
        raise ParseError(f"undefined representation {name!r}", where)
    H2, rep = reps[name]
    if H2.elements != H.elements:
        raise ValidationError(f"{where}: representation {name!r} lives on {list(H2.elements)}, not on H")
    return rep


def _parse_model(block, G, reps, tol, where="model"):
    if G is None:
        raise ParseError("a model needs a group block", where)
    H = _subgroup(G, _get(block, "H", where), f"{where}.H")
    rho = _resolve_rep(reps, _get(block, "rho", where), H, f"{where}.rho")
    f_dim = int(block.get("f_dim", 1))
    try:
        if H.is_normal():
            section = None
            if block.get("transversal") is not None:
                section = make_h_section(G, H, _int_list(block["transversal"], f"{where}.transversal"))
            return build_model(G, H, rho, f_dim, section, tol)
        nn, _ = build_nonnormal_model(G, H, rho, f_dim, tol)
        return nn
    except EqsigError:
        raise
    except (ValueError, AssertionError) as e:
        raise ValidationError(f"{where}: {e}") from None


def _lift(model, a: int, B: np.ndarray):
    if isinstance(model, NonNormalModel):
        return extend_automorphism(model, automorphism_from(model.inner, a, B))
    return automorphism_from(model, a, B)


def _parse_bundle(block, G, M, reps, tol, where="bundle") -> TransitionBundle:
    if M is None:
        raise ParseError("a bundle needs a complex block for its base", where)
    model = _parse_model(block, G, reps, tol, where)
    H = model.H
    lifts = _int_list(_get(block, "lifts", where), f"{where}.lifts")
    if any(v < 0 or v >= M.n_vertices for v in lifts):
        raise ParseError("lift vertex out of range", f"{where}.lifts")
    atlas = EquivariantAtlas(M, H, lifts, name=block.get("name", M.name))
    rep = validate_atlas(atlas)
    if not rep.passed:
        raise ValidationError(f"{where}: atlas invalid: {rep.violations[:3]}")
    table: dict = {}
    for i, t in enumerate(_get(block, "transitions", where, [])):
        w = f"{where}.transitions[{i}]"
        pair = _int_list(_get(t, "pair", w), f"{w}.pair")
        if len(pair) != 2 or pair[0] >= pair[1]:
            raise ParseError("pair must be [a, b] with a < b", f"{w}.pair")
        a = int(_get(t, "a", w))
        if not 0 <= a < model.base_group.order:
            raise ParseError("base element out of range", f"{w}.a")
        B = _matrix(_get(t, "B", w), f"{w}.B")
        if B.shape != (model.f_dim, model.f_dim):
            raise ParseError(f"B must be {model.f_dim}x{model.f_dim}", f"{w}.B")
        try:
            A = _lift(model, a, B)
        except (ValueError, EqsigError) as e:
            raise ValidationError(f"{w}: {e}") from None
        p = tuple(pair)
        cells = t.get("cells")
        if cells is None:
            if p not in atlas.overlaps:
                raise ValidationError(f"{w}: charts {pair} do not overlap")
            cells = atlas.overlaps[p]
        else:
            cells = [tuple(_int_list(cell, f"{w}.cells[{j}]")) for j, cell in enumerate(cells)]
        row = table.setdefault(p, {})
        for cell in cells:
            row[cell] = A
    return TransitionBundle(atlas, model, table, block.get("name", ""))


def parse_problem(obj, tol: float | None = None) -> Problem:
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object")
    prob = Problem(name=str(obj.get("name", "problem")))
    G = _parse_group(obj["group"]) if "group" in obj else None
    prob.group = G
    if "complex" in obj:
        prob.complex = _parse_complex(obj["complex"], G)
        rep = validate_action(prob.complex)
        if not rep.passed:
            raise ValidationError(f"complex: action is not simplicial: {rep.violations[:3]}")
    if "reps" in obj:
        prob.reps = _parse_reps(obj["reps"], G)
    if "model" in obj:
        prob.model = _parse_model(obj["model"], G, prob.reps, tol)
    if "bundle" in obj:
        prob.bundle = _parse_bundle(obj["bundle"], G, prob.complex, prob.reps, tol)
    tasks = obj.get("tasks", [])
    if isinstance(tasks, str):
        tasks = [t.strip() for t in tasks.split(",") if t.strip()]
    if not isinstance(tasks, list):
        raise ParseError("expected a list of task names", "tasks")
    for i, t in enumerate(tasks):
        if t not in TASK_ORDER:
            raise ParseError(f"unknown task {t!r}; known: {TASK_ORDER}", f"tasks[{i}]")
    prob.tasks = sorted(set(tasks), key=TASK_ORDER.index)
    exp = obj.get("expect", {})
    if not isinstance(exp, dict):
        raise ParseError("expected an object", "expect")
    prob.expect.update(exp)
    return prob


def load_problem(path: str | Path, tol: float | None = None) -> Problem:
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg} (line {e.lineno}, column {e.colno})") from None
    return parse_problem(obj, tol)


# -- emission ---------------------------------------------------------------------


def _num(x: float):
    x = float(x)
    return int(x) if x.is_integer() and abs(x) < 2**53 else x


def _cx(z: complex):
    return [_num(z.real), _num(z.imag)]


def _mat(m: np.ndarray):
    return [[_cx(complex(v)) for v in row] for row in m]


def group_block(G: FiniteGroup) -> dict:
    return {"name": G.name, "table": G.mul.tolist(), "labels": list(G.labels)}


def complex_block(c: SimplicialGComplex, with_action: bool = True) -> dict:
    out = {"name": c.name, "vertices": c.n_vertices, "facets": [list(f) for f in c.facets]}
    if c.orientation is not None:
        out["orientation"] = [c.orientation[f] for f in c.facets]
    if with_action and c.G.order > 1:
        out["action"] = c.action.tolist()
    return out


def rep_block(H: Subgroup, rho: UnitaryRep) -> dict:
    return {"subgroup": list(H.elements), "matrices": [_mat(m) for m in rho.matrices]}


def model_block(model) -> dict:
    out = {"H": list(model.H.elements), "rho": "rho", "f_dim": model.f_dim}
    if isinstance(model, CanonicalModel):
        out["transversal"] = [int(t) for t in model.section.transversal]
    return out


def bundle_block(b: TransitionBundle) -> dict:
    m = b.model
    out = model_block(m)
    out.pop("transversal", None)
    out["name"] = b.name
    out["lifts"] = list(b.atlas.lifts)
    entries = []
    for pair in sorted(b.transitions):
        row = b.transitions[pair]
        groups: dict[int, list] = {}
        for key in sorted(row, key=lambda k: (len(k), k)):
            groups.setdefault(id(row[key]), []).append(key)
        whole = len(groups) == 1 and set(row) == set(b.atlas.overlaps.get(pair, []))
        for keys in groups.values():
            A = row[keys[0]]
            L = _lift(m, A.a, np.eye(m.f_dim))
            K = A * L.inverse()
            if isinstance(m, NonNormalModel):
                K = restrict_automorphism(m, K)
            B = kernel_witness(K)
            e = {"pair": list(pair), "a": int(A.a), "B": _mat(B)}
            if not whole:
                e["cells"] = [list(k) for k in keys]
            entries.append(e)
    out["transitions"] = entries
    return out


def problem_dict(name: str, tasks: list, group: FiniteGroup | None = None, complex_=None, model=None, bundle=None, expect=None) -> dict:
    out: dict = {"name": name}
    G = group
    if G is None and complex_ is not None and complex_.G.order > 1:
        G = complex_.G
    if G is None and model is not None:
        G = model.group
    if G is None and bundle is not None:
        G = bundle.model.group
    if G is not None:
        out["group"] = group_block(G)
    if bundle is not None:
        complex_ = bundle.atlas.M
    if complex_ is not None:
        out["complex"] = complex_block(complex_)
    src = model if model is not None else (bundle.model if bundle is not None else None)
    if src is not None:
        out["reps"] = {"rho": rep_block(src.H, src.rho)}
    if model is not None:
        out["model"] = model_block(model)
    if bundle is not None:
        out["bundle"] = bundle_block(bundle)
    out["tasks"] = tasks
    if expect:
        out["expect"] = expect
    return out


def _dump(obj, indent: int) -> str:
    pad = " " * indent
    inner = " " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_dump(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if all(not isinstance(x, (list, dict)) for x in obj):
            return json.dumps(obj, separators=(", ", ": "))
        return "[\n" + ",\n".join(inner + _dump(x, indent + 1) for x in obj) + "\n" + pad + "]"
    return json.dumps(obj)


def dumps(obj) -> str:
    """Indented JSON with innermost arrays kept on one line."""
    return _dump(obj, 0) + "\n"
