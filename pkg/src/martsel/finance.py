"""No-arbitrage and consistent price systems as martingale selection problems."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from . import _linalg as la
from ._linalg import ONE, ZERO
from .lp import LinearProgram, solve_lp, strict_barycentric
from .msp import BackwardState, Solution, solve
from .polyhedra import FGSet, dual_cone, is_cone, is_subspace
from .tree import (
    EventTree,
    Instance,
    InstanceError,
    _point,
    load_document,
    parse_fgset,
    parse_tree,
    point_json,
    tree_json,
    fgset_json,
)


class ModelError(ValueError):
    def __init__(self, message: str, node: Optional[str] = None):
        super().__init__(f"node {node}: {message}" if node is not None else message)
        self.node = node


@dataclass(frozen=True)
class PriceProcess:
    dim: int
    tree: EventTree
    values: Mapping[str, tuple]


@dataclass(frozen=True)
class ConeModel:
    """Solvency cones K(u); consistent prices live in ri of their duals."""

    dim: int
    tree: EventTree
    cones: Mapping[str, FGSet]


@dataclass
class NAResult:
    no_arbitrage: bool
    solution: Optional[Solution] = None
    state: Optional[BackwardState] = None
    instance: Optional[Instance] = None
    failing_node: Optional[str] = None


@dataclass
class OracleResult:
    arbitrage: bool
    strategy: dict = field(default_factory=dict)
    wealth: dict = field(default_factory=dict)


@dataclass
class CPSResult:
    solvable: bool
    instance: Instance
    state: BackwardState
    solution: Optional[Solution] = None
    subspace_nodes: tuple = ()


def parse_price_process(text) -> PriceProcess:
    doc = load_document(text)
    dim, tree = parse_tree(doc)
    raw = doc.get("values")
    if not isinstance(raw, dict):
        raise InstanceError("missing 'values' section")
    values = {}
    for nid in tree.order:
        if nid not in raw:
            raise InstanceError("missing value", nid)
        values[nid] = _point(raw[nid], dim, nid)
    return PriceProcess(dim, tree, values)


def parse_cone_model(text) -> ConeModel:
    doc = load_document(text)
    dim, tree = parse_tree(doc)
    raw = doc.get("cones")
    if not isinstance(raw, dict):
        raise InstanceError("missing 'cones' section")
    cones = {}
    for nid in tree.order:
        if nid not in raw:
            raise InstanceError("missing cone", nid)
        entry = dict(raw[nid]) if isinstance(raw[nid], dict) else raw[nid]
        if isinstance(entry, dict) and not entry.get("vertices"):
            entry["vertices"] = [["0"] * dim]
        K = parse_fgset(entry, dim, nid)
        if not is_cone(K):
            raise InstanceError("solvency set is not a cone with apex at the origin", nid)
        cones[nid] = K
    return ConeModel(dim, tree, cones)


def price_process_json(p: PriceProcess) -> dict:
    doc = tree_json(p.dim, p.tree)
    doc["values"] = {u: point_json(p.values[u]) for u in p.tree.order}
    return doc


def cone_model_json(m: ConeModel) -> dict:
    doc = tree_json(m.dim, m.tree)
    doc["cones"] = {u: fgset_json(m.cones[u]) for u in m.tree.order}
    return doc


def price_instance(p: PriceProcess) -> Instance:
    return Instance(p.dim, p.tree, {u: FGSet.point(p.values[u]) for u in p.tree.order})


def check_na_single(p: PriceProcess, threads: int = 1) -> NAResult:
    """No-arbitrage test for a single-valued process, decided twice.

    Once through the set-valued recursion on singleton sets, once node by
    node by asking whether the current price is a strictly positive average
    of the next prices. The two must agree.
    """
    inst = price_instance(p)
    state, sol = solve(inst, threads)
    local_fail = None
    for u in p.tree.internal:
        kids = [p.values[v] for v in p.tree.children[u]]
        if strict_barycentric(p.values[u], kids) is None:
            local_fail = u
            break
    if state.solvable != (local_fail is None):
        raise RuntimeError("recursion and per-node test disagree")
    return NAResult(state.solvable, sol, state, inst, state.failing_node)


def arbitrage_oracle(p: PriceProcess) -> OracleResult:
    """Independent LP search for a self-financing strategy with nonnegative
    terminal gains everywhere and total gain at least one."""
    tree = p.tree
    d = p.dim
    internal = tree.internal
    if not internal:
        return OracleResult(False)
    col = {u: i * d for i, u in enumerate(internal)}
    nvar = d * len(internal)
    gains = {}
    for leaf in tree.leaves:
        a = [ZERO] * nvar
        path = tree.path(leaf)
        for u, v in zip(path, path[1:]):
            inc = la.sub(p.values[v], p.values[u])
            for k in range(d):
                a[col[u] + k] += inc[k]
        gains[leaf] = tuple(a)
    ineq = [(tuple(-x for x in a), ZERO) for a in gains.values()]
    total = tuple(-sum((a[j] for a in gains.values()), ZERO) for j in range(nvar))
    ineq.append((total, -ONE))
    res = solve_lp(LinearProgram((ZERO,) * nvar, (), tuple(ineq)))
    if res.infeasible:
        return OracleResult(False)
    h = res.point
    strategy = {u: tuple(h[col[u] : col[u] + d]) for u in internal}
    wealth = {leaf: la.dot(a, h) for leaf, a in gains.items()}
    return OracleResult(True, strategy, wealth)


def consistent_price_system(m: ConeModel, threads: int = 1) -> CPSResult:
    """Search for a martingale with values in ri K*(u) at every node."""
    sets = {}
    flagged = []
    for u in m.tree.order:
        K_star = dual_cone(m.cones[u])
        if K_star.rays == ():
            raise ModelError("dual cone is {0}", u)
        if is_subspace(K_star):
            flagged.append(u)
        sets[u] = K_star
    inst = Instance(m.dim, m.tree, sets)
    state, sol = solve(inst, threads)
    return CPSResult(state.solvable, inst, state, sol, tuple(flagged))
