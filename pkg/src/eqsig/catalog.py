"""Problem files for every shipped fixture."""
from __future__ import annotations

from typing import Callable

from .bundle_catalog import BUNDLES, MUTATIONS, bundle_fixture
from .catalog_groups import catalog_group, group_names, subgroup_irreps
from .complexes import complex_fixture, complex_names, octahedron_bad_action
from .errors import UnknownFixture
from .groups import Subgroup
from .model import build_model, build_nonnormal_model
from .specio import problem_dict

# Values with an independent source: classical topology or a hand computation.
COMPLEX_EXPECT = {
    "point": {"signature": [1, 0, 0]},
    "tetrahedron_boundary": {"betti": [1, 0, 1]},
    "octahedron": {"betti": [1, 0, 1]},
    "torus7_z7": {"betti": [1, 2, 1]},
    "sphere4": {"signature": [0, 0, 0]},
    "cp2_9": {"signature": [1, 0, 0], "betti": [1, 0, 1, 0, 1]},
    "s2xs2_swap": {"signature": [1, 1, 0]},
}

ORIENTATION_REVERSING = {"hexagon_s3", "octagon_d4"}


def _complex_tasks(name: str) -> list[str]:
    c = complex_fixture(name)
    tasks = ["validate", "apc", "signature"]
    if c.G.order > 1:
        tasks[1:1] = ["stratify", "quotient"]
        if name not in ORIENTATION_REVERSING:
            tasks.append("g_signature")
    return tasks


def _complex_spec(name: str) -> dict:
    return problem_dict(name, _complex_tasks(name), complex_=complex_fixture(name), expect=COMPLEX_EXPECT.get(name))


def _group_spec(name: str) -> dict:
    return problem_dict(f"group_{name}", ["group"], group=catalog_group(name).group)


def _order2_sign(gname: str, H: Subgroup):
    return next(r for r in subgroup_irreps(gname, H) if r.dim == 1 and abs(r.matrices[1, 0, 0] + 1) < 1e-9)


def _q8_center_model():
    G = catalog_group("Q8").group
    H = Subgroup(G, (0, G.labels.index("-1")))
    return build_model(G, H, _order2_sign("Q8", H), f_dim=2)


def _s3_a3_model():
    """Nontrivial character of A3: conjugation by a transposition swaps it with its conjugate."""
    G = catalog_group("S3").group
    H = Subgroup(G, tuple(g for g in range(G.order) if G.element_order(g) != 2))
    rho = next(r for r in subgroup_irreps("S3", H) if abs(r.matrices[1, 0, 0] - 1) > 1e-9)
    return build_model(G, H, rho)


def _d4_center_model():
    G = catalog_group("D4").group
    z = next(g for g in range(1, G.order) if all(G.m(g, x) == G.m(x, g) for x in range(G.order)))
    H = Subgroup(G, (0, z))
    return build_model(G, H, _order2_sign("D4", H), f_dim=2)


def _a4_v4_model():
    G = catalog_group("A4").group
    H = Subgroup(G, tuple(g for g in range(G.order) if G.element_order(g) in (1, 2)))
    rho = next(r for r in subgroup_irreps("A4", H) if abs(r.matrices[1, 0, 0] - 1) > 1e-9)
    return build_model(G, H, rho)


def _s3_reflection_model():
    G = catalog_group("S3").group
    s = next(g for g in range(G.order) if G.element_order(g) == 2)
    H = Subgroup(G, (0, s))
    nn, _ = build_nonnormal_model(G, H, _order2_sign("S3", H), f_dim=2)
    return nn


MODELS: dict[str, Callable] = {
    "q8_center_model": _q8_center_model,
    "s3_a3_model": _s3_a3_model,
    "d4_center_model": _d4_center_model,
    "a4_v4_model": _a4_v4_model,
    "s3_reflection_model": _s3_reflection_model,
}

MODEL_EXPECT = {
    "q8_center_model": {"pr_surjective": True},
    "s3_a3_model": {"pr_surjective": False},
    "d4_center_model": {"pr_surjective": True},
}

BUNDLE_EXPECT = {
    "s3_reflection": {"components": 3},
    "d4_reflection": {"components": 2},
}


def _bundle_spec(name: str) -> dict:
    b = bundle_fixture(name)
    tasks = ["bundle"] + (["split"] if name in ("s3_reflection", "d4_reflection", "octahedron_poles") else [])
    return problem_dict(name, tasks, bundle=b, expect=BUNDLE_EXPECT.get(name))


def _entries() -> dict[str, tuple[str, Callable[[], dict]]]:
    out: dict[str, tuple[str, Callable[[], dict]]] = {}
    for g in group_names():
        out[f"group_{g}"] = ("group", lambda g=g: _group_spec(g))
    for c in complex_names():
        out[c] = ("complex", lambda c=c: _complex_spec(c))
    for m in MODELS:
        out[m] = ("model", lambda m=m: problem_dict(m, ["model"], model=MODELS[m](), expect=MODEL_EXPECT.get(m)))
    for b in BUNDLES:
        out[b] = ("bundle", lambda b=b: _bundle_spec(b))
    for b in MUTATIONS:
        out[b] = ("mutation", lambda b=b: _bundle_spec(b))
    out["octahedron_bad"] = ("mutation", lambda: problem_dict("octahedron_bad", ["validate"], complex_=octahedron_bad_action()))
    return out


ENTRIES = _entries()


def catalog_list() -> list[tuple[str, str]]:
    return [(name, kind) for name, (kind, _) in ENTRIES.items()]


def catalog_emit(name: str) -> dict:
    if name not in ENTRIES:
        raise UnknownFixture(f"unknown fixture {name!r}; try 'catalog list'")
    return ENTRIES[name][1]()
