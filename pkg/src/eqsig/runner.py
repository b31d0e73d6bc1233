"""Task dispatch for parsed problems and report assembly."""
from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from . import __version__
from .apc import build_apc, g_signature, invariant_cohomology_dims, signature, QuotientChains
from .bundles import (
    check_cocycle,
    classification_pairing,
    reduce_to_normal,
    round_trip,
    split_by_conjugates,
    trivial_bundle,
)
from .errors import ApcPropertyFailure, NotLiftable, OrientationReversed, TaskError
from .exactmath import DEFAULT_TOL
from .gcomplex import quotient_complex, regularize, stratify, validate_action
from .groups import make_h_section
from .model import (
    CheckReport,
    NonNormalModel,
    automorphism_from,
    kernel_witness,
    liftable_by_linear_algebra,
    lift_intertwiner,
    model_isomorphism,
    nonnormal_aut_iso,
    rebuild_from_identity_block,
    verify_action,
    verify_automorphism,
)
from .reps import char_inner, character, group_irreps
from .specio import Problem


def plain(x):
    """JSON-safe, deterministic form of report payloads."""
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [plain(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (float, np.floating)):
        return round(float(x), 12) + 0.0
    if isinstance(x, (complex, np.complexfloating)):
        return [round(x.real, 12) + 0.0, round(x.imag, 12) + 0.0]
    if isinstance(x, np.ndarray):
        return plain(x.tolist())
    if x is None or isinstance(x, str):
        return x
    return str(x)


def label(G, g: int) -> str:
    s = G.labels[g]
    return s if len(s) <= 12 else f"g{g}"


class Context:
    def __init__(self, prob: Problem, tol: float, seed: int, max_subdivisions: int):
        self.prob = prob
        self.tol = tol
        self.seed = seed
        self.max_subdivisions = max_subdivisions
        self._apc = None
        self._regular = None

    def complex(self):
        if self.prob.complex is None:
            raise TaskError("task needs a complex block")
        return self.prob.complex

    def regular(self):
        if self._regular is None:
            self._regular = regularize(self.complex(), self.max_subdivisions)
        return self._regular

    def apc(self):
        if self._apc is None:
            c = self.complex()
            if c.orientation is None:
                raise TaskError("apc needs an oriented closed complex (no orientation given)")
            self._apc = build_apc(c, verify=False)
        return self._apc


def _task_group(ctx: Context, rep: CheckReport, data: dict) -> None:
    G = ctx.prob.group
    if G is None:
        raise TaskError("task 'group' needs a group block")
    irreps = group_irreps(G)
    chars = [character(r) for r in irreps]
    data["order"] = G.order
    data["irrep_dims"] = [r.dim for r in irreps]
    rep.checks += 1
    if sum(r.dim ** 2 for r in irreps) != G.order:
        rep.fail(("sum of squared dimensions differs from |G|", [r.dim for r in irreps]))
    for i, a in enumerate(chars):
        for j, b in enumerate(chars):
            rep.checks += 1
            want = 1.0 if i == j else 0.0
            if abs(char_inner(a, b, G) - want) > ctx.tol:
                rep.fail(("characters not orthonormal", i, j))


def _task_validate(ctx: Context, rep: CheckReport, data: dict) -> None:
    c = ctx.complex()
    rep.merge(validate_action(c))
    data["f_vector"] = list(c.f_vector)
    data["euler_characteristic"] = c.euler_characteristic()
    data["group_order"] = c.G.order
    data["regular"] = c.is_regular()
    if c.orientation is not None and c.G.order > 1:
        data["orientation_preserving"] = [label(c.G, g) for g in c.orientation_preserving()]


def _task_stratify(ctx: Context, rep: CheckReport, data: dict) -> None:
    c, steps = ctx.regular()
    st = stratify(c)
    rep.merge(st.report)
    G = c.G
    data["subdivisions"] = steps
    data["cardinalities"] = {"{" + ", ".join(label(G, h) for h in k) + "}": v for k, v in sorted(st.cardinalities().items())}
    data["layers"] = [[list(H.elements) for H in layer] for layer in st.layers]


def _task_quotient(ctx: Context, rep: CheckReport, data: dict) -> None:
    c, steps = ctx.regular()
    q = quotient_complex(c)
    qb = QuotientChains(q).betti()
    from .apc import chains

    inv = invariant_cohomology_dims(chains(c))
    data["quotient_cells"] = [len(x) for x in q.cells]
    data["quotient_betti"] = qb
    data["invariant_cohomology"] = inv
    rep.checks += 1
    if qb != inv:
        rep.fail(("transfer", {"quotient": qb, "invariant": inv}))
    n = len(qb) - 1
    dual = all(qb[k] == qb[n - k] for k in range(n + 1))
    data["quotient_duality"] = dual
    if c.orientation is not None:
        reversing = [g for g in range(c.G.order) if g not in set(c.orientation_preserving())]
        data["orientation_reversing_elements"] = [label(c.G, g) for g in reversing]
        rep.checks += 1
        if not dual and not reversing:
            rep.fail(("quotient duality", qb))


def _task_apc(ctx: Context, rep: CheckReport, data: dict) -> None:
    from .apc import verify_apc

    try:
        a = ctx.apc()
        r = verify_apc(a)
    except ApcPropertyFailure as e:
        rep.fail(("apc property", {"property": e.prop, "degree": e.degree, "message": str(e)}))
        return
    rep.merge(r)
    data["betti"] = r.notes.get("betti")
    data["dimension"] = a.n


def _task_signature(ctx: Context, rep: CheckReport, data: dict) -> None:
    s = signature(ctx.apc())
    data["signature"] = s.as_list()
    data["sign"] = s.positive - s.negative


def _task_g_signature(ctx: Context, rep: CheckReport, data: dict) -> None:
    try:
        gs = g_signature(ctx.apc(), tol=ctx.tol)
    except OrientationReversed as e:
        raise TaskError(f"g_signature: {e}") from None
    rep.merge(gs.report)
    data.update(gs.as_dict())
    rep.checks += 1
    if gs.weighted_total() != gs.total:
        rep.fail(("weighted isotypic sum differs from the total", gs.weighted_total().as_list()))


def _task_model(ctx: Context, rep: CheckReport, data: dict) -> None:
    m = ctx.prob.model
    if m is None:
        raise TaskError("task 'model' needs a model block")
    rng = np.random.default_rng(ctx.seed)
    G = m.group
    rep.merge(verify_action(m))
    data["points"] = m.n_points
    data["fiber_dim"] = m.fiber_dim
    if isinstance(m, NonNormalModel):
        rep.merge(nonnormal_aut_iso(m, ctx.seed))
        data["normaliser"] = [label(G, x) for x in m.N.elements]
        data["components"] = m.n_components
        m = m.inner
        G = m.group
    # a second transversal: the largest member of every coset
    alt = [0] + [max(c) for c in m.section.quotient.cosets[1:]]
    iso = model_isomorphism(m, m.with_section(make_h_section(G, m.H, alt)))
    rep.merge(iso.report)
    f = m.f_dim
    liftable = []
    for a in range(m.base_group.order):
        by_intertwiner = lift_intertwiner(m, a) is not None
        by_linear_algebra = liftable_by_linear_algebra(m, a)
        rep.checks += 1
        if by_intertwiner != by_linear_algebra:
            rep.fail(("liftability routes disagree", m.base_group.labels[a]))
        if by_intertwiner:
            liftable.append(m.base_group.labels[a])
            B = rng.standard_normal((f, f)) + 1j * rng.standard_normal((f, f)) + 2 * np.eye(f)
            A = automorphism_from(m, a, B)
            rep.merge(verify_automorphism(A))
            rep.checks += 1
            if np.max(np.abs(rebuild_from_identity_block(A) - A.blocks)) > m.tol:
                rep.fail(("automorphism not determined by its identity block", m.base_group.labels[a]))
            if a == 0:
                rep.checks += 1
                if np.max(np.abs(kernel_witness(A) - B)) > m.tol:
                    rep.fail("kernel element does not factor as B (x) id")
    data["pr_image"] = liftable
    data["pr_surjective"] = len(liftable) == m.base_group.order


def _task_bundle(ctx: Context, rep: CheckReport, data: dict) -> None:
    b = ctx.prob.bundle
    if b is None:
        raise TaskError("task 'bundle' needs a bundle block")
    cc = check_cocycle(b)
    rep.merge(cc)
    data["charts"] = b.atlas.n_charts
    data["cells"] = len(b.atlas.cells)
    if not cc.passed:
        return
    _, witness = round_trip(b)
    rep.checks += 1
    if witness is None:
        rep.fail("from_principal(to_principal(b)) is not isomorphic to b")
    else:
        data["witness_bases"] = [b.model.base_group.labels[h.a] for h in witness.chart_maps]
    try:
        tb = trivial_bundle(b.atlas, b.model)
        t = check_cocycle(tb)
        rep.checks += 1
        data["trivial_bundle"] = t.passed
        if not t.passed:
            rep.fail(("trivial bundle fails", t.violations[:2]))
    except NotLiftable as e:
        data["trivial_bundle"] = f"not realisable: {e}"


def _task_split(ctx: Context, rep: CheckReport, data: dict) -> None:
    b = ctx.prob.bundle
    if b is None:
        raise TaskError("task 'split' needs a bundle block")
    sp = split_by_conjugates(b)
    rep.merge(sp.report)
    data["components"] = len(sp.components)
    red = reduce_to_normal(b)
    rep.merge(red.report)
    cp = classification_pairing([red])
    rep.merge(cp)
    data["records"] = cp.notes["records"]


TASKS = {
    "group": _task_group,
    "validate": _task_validate,
    "stratify": _task_stratify,
    "quotient": _task_quotient,
    "apc": _task_apc,
    "signature": _task_signature,
    "g_signature": _task_g_signature,
    "model": _task_model,
    "bundle": _task_bundle,
    "split": _task_split,
}


def _expectations(prob: Problem, results: list) -> dict | None:
    if not prob.expect:
        return None
    found = {}
    for r in results:
        found.update(r["data"])
    out = {"checks": 0, "violations": []}
    for key, want in sorted(prob.expect.items()):
        out["checks"] += 1
        got = found.get(key)
        if plain(got) != plain(want):
            out["violations"].append({"key": key, "expected": plain(want), "got": plain(got)})
    return out


def run_problem(prob: Problem, tol: float | None = None, seed: int = 0, max_subdivisions: int = 2) -> dict:
    tol = DEFAULT_TOL if tol is None else tol
    ctx = Context(prob, tol, seed, max_subdivisions)
    results = []
    for name in prob.tasks:
        rep = CheckReport(name, tol=tol)
        data: dict = {}
        TASKS[name](ctx, rep, data)
        results.append({
            "task": name,
            "verdict": "PASS" if rep.passed else "FAIL",
            "checks": rep.checks,
            "data": plain(data),
            "violations": plain(rep.violations[:10]),
        })
    exp = _expectations(prob, results)
    if exp is not None:
        results.append({"task": "expect", "verdict": "FAIL" if exp["violations"] else "PASS", "checks": exp["checks"], "data": {}, "violations": exp["violations"]})
    return {
        "tool": "eqsig",
        "version": __version__,
        "problem": prob.name,
        "tol": tol,
        "seed": seed,
        "max_subdivisions": max_subdivisions,
        "tasks": results,
        "verdict": "PASS" if all(r["verdict"] == "PASS" for r in results) else "FAIL",
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True) + "\n"


def report_text(report: dict) -> str:
    lines = [f"eqsig {report['version']}  problem={report['problem']}  tol={report['tol']:g}  seed={report['seed']}"]
    for r in report["tasks"]:
        summary = "  ".join(f"{k}={json.dumps(v, sort_keys=True)}" for k, v in r["data"].items() if k != "records")
        lines.append(f"[{r['verdict']}] {r['task']:<12} checks={r['checks']}  {summary}".rstrip())
        for v in r["violations"][:5]:
            lines.append(f"    violation: {json.dumps(v, sort_keys=True)}")
        for rec in r["data"].get("records", []):
            lines.append(f"    record: {json.dumps(rec, sort_keys=True)}")
    lines.append(f"verdict: {report['verdict']}")
    return "\n".join(lines) + "\n"
