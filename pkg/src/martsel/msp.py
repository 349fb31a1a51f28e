"""Martingale selection on an event tree.

The backward pass computes, for every node, the closed set W of values a
selector can take there and still be continued into a martingale under some
equivalent measure:

    W = cl G                          at the leaves,
    Y = conv(union of children's W)   at internal nodes,
    W = cl(ri cl G & ri Y)            (empty if any child's W is empty).

The problem is solvable iff W is nonempty everywhere. The forward pass then
starts from a relative-interior point of W at the root and splits it, node
by node, into strictly positive one-step probabilities and child values in
ri W.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import _linalg as la
from ._linalg import ONE, ZERO, frac_str
from .lp import represent_in_hull
from .polyhedra import (
    INFINITY,
    FGSet,
    TaggedFGSet,
    canonicalize,
    contains,
    max_step,
    ri_intersection_closure,
    ri_point,
)
from .tree import Instance, InstanceError, load_document, point_json, support_hull, _point, _rational


class ContractError(RuntimeError):
    """A caller broke a documented precondition."""


class SolutionSchemaError(ValueError):
    """A solution document does not fit the instance it is checked against."""


@dataclass
class BackwardState:
    W: dict
    Y: dict
    failing_node: Optional[str] = None
    failing_time: Optional[int] = None

    @property
    def solvable(self) -> bool:
        return self.failing_node is None

    @property
    def verdict(self) -> str:
        return "Solvable" if self.solvable else "Unsolvable"


@dataclass
class Solution:
    """Selector values per node and one-step Q-probabilities per edge."""

    x: dict
    q: dict

    def gamma(self, instance: Instance, u: str, v: str) -> Fraction:
        return self.q[(u, v)] / instance.tree.nodes[v].cond_prob


@dataclass(frozen=True)
class Failure:
    node: str
    check: str
    message: str

    def __str__(self):
        return f"{self.node}: {self.message}"


@dataclass
class MeasureReport:
    Q: dict
    z: dict
    total_Q: Fraction
    expected_density: Fraction

    @property
    def ok(self) -> bool:
        return self.total_Q == 1 and self.expected_density == 1 and all(v > 0 for v in self.Q.values())


def _map(fn, items, threads: int):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def backward_pass(instance: Instance, threads: int = 1) -> BackwardState:
    tree = instance.tree
    W: dict[str, FGSet] = {}
    Y: dict[str, TaggedFGSet] = {}
    for leaf in tree.atoms_at(tree.horizon):
        W[leaf] = canonicalize(instance.sets[leaf])

    def step(u):
        kids = tree.children[u]
        if any(W[v].is_empty for v in kids):
            return u, None, FGSet.empty(instance.dim)
        hull = support_hull(W, tree, u)
        w = ri_intersection_closure(instance.sets[u], hull.set)
        return u, hull, w if w is not None else FGSet.empty(instance.dim)

    for n in range(tree.horizon - 1, -1, -1):
        for u, hull, w in _map(step, tree.atoms_at(n), threads):
            if hull is not None:
                Y[u] = hull
            W[u] = w
    state = BackwardState(W, Y)
    failing = [u for u in tree.order if W[u].is_empty]
    if failing:
        latest = max(tree.nodes[u].time for u in failing)
        state.failing_node = min(u for u in failing if tree.nodes[u].time == latest)
        state.failing_time = latest
    return state


def one_step_decompose(x: Sequence, children: Sequence[tuple], Y: TaggedFGSet) -> list[tuple]:
    """Split x in ri Y into ``(child, q, x_child)`` with q > 0, sum q = 1,
    sum q * x_child = x and every x_child in ri of that child's set.

    ``children`` is a list of ``(tag, FGSet)``; Y must be their tagged hull.
    """
    x = la.vec(x)
    if not contains(Y.set, x, "relative_interior"):
        raise ContractError("point is not in the relative interior of the hull")
    m = len(children)
    d = len(x)
    centers = {tag: ri_point(S) for tag, S in children}
    b = la.lin_comb([Fraction(1, m)] * m, list(centers.values()), d)
    if x == b:
        return [(tag, Fraction(1, m), centers[tag]) for tag, _ in children]

    direction = la.sub(x, b)
    t_max = max_step(Y.set.hrep, x, direction)
    t = ONE if t_max == INFINITY else t_max / 2
    pushed = la.add(x, la.scale(t, direction))
    lam, mu = represent_in_hull(pushed, [v for _, v in Y.vertices], [r for _, r in Y.rays])

    mass = {tag: ZERO for tag, _ in children}
    part = {tag: la.zeros(d) for tag, _ in children}
    for (tag, v), c in zip(Y.vertices, lam):
        if c:
            mass[tag] += c
            part[tag] = la.add(part[tag], la.scale(c, v))
    for (tag, r), c in zip(Y.rays, mu):
        if c:
            part[tag] = la.add(part[tag], la.scale(c, r))

    shrink = ONE / (1 + t)
    blend = t / ((1 + t) * m)
    out = []
    for tag, S in children:
        q = mass[tag] * shrink + blend
        xj = la.scale(ONE / q, la.add(la.scale(shrink, part[tag]), la.scale(blend, centers[tag])))
        if not contains(S, xj, "relative_interior"):
            raise RuntimeError(f"decomposition left the relative interior of child {tag}")
        out.append((tag, q, xj))
    return out


def forward_pass(instance: Instance, state: BackwardState, threads: int = 1) -> Solution:
    if not state.solvable:
        raise ContractError("forward pass needs a solvable backward state")
    tree = instance.tree
    x = {tree.root: ri_point(state.W[tree.root])}
    q = {}

    def step(u):
        kids = tree.children[u]
        return u, one_step_decompose(x[u], [(v, state.W[v]) for v in kids], state.Y[u])

    for n in range(tree.horizon):
        for u, parts in _map(step, tree.atoms_at(n), threads):
            for v, qv, xv in parts:
                q[(u, v)] = qv
                x[v] = xv
    return Solution(x, q)


def solve(instance: Instance, threads: int = 1):
    """Backward pass, then the forward construction when solvable."""
    state = backward_pass(instance, threads)
    if not state.solvable:
        return state, None
    return state, forward_pass(instance, state, threads)


def assemble_measure(instance: Instance, solution: Solution) -> MeasureReport:
    """Leaf weights of Q and the density process z (z = running product of q/p)."""
    tree = instance.tree
    z = {tree.root: ONE}
    Qn = {tree.root: ONE}
    for u, v in tree.edges:
        qv = solution.q[(u, v)]
        Qn[v] = Qn[u] * qv
        z[v] = z[u] * qv / tree.nodes[v].cond_prob
    leaves = tree.leaves
    Q = {leaf: Qn[leaf] for leaf in leaves}
    total = sum(Q.values(), ZERO)
    expect = sum((tree.prob(leaf) * z[leaf] for leaf in leaves), ZERO)
    return MeasureReport(Q, z, total, expect)


def verify_solution(instance: Instance, solution: Solution) -> list[Failure]:
    """Exact checks of ri membership, edge weights and the martingale identity."""
    tree = instance.tree
    failures = []
    for u in tree.order:
        xu = solution.x.get(u)
        if xu is None or len(xu) != instance.dim:
            failures.append(Failure(u, "structure", "missing or malformed selector value"))
            continue
        if not contains(instance.sets[u], xu, "relative_interior"):
            failures.append(Failure(u, "ri", "ri membership: selector value not in the relative interior"))
    for u in tree.internal:
        kids = tree.children[u]
        qs = [solution.q.get((u, v)) for v in kids]
        if any(qv is None for qv in qs):
            failures.append(Failure(u, "structure", "missing edge weight"))
            continue
        for v, qv in zip(kids, qs):
            if qv <= 0:
                failures.append(Failure(u, "positivity", f"q on {u}->{v} is {frac_str(qv)}, not positive"))
        total = sum(qs, ZERO)
        if total != 1:
            failures.append(Failure(u, "sum", f"q sums {frac_str(total)}"))
        xs = [solution.x.get(v) for v in kids]
        if solution.x.get(u) is None or any(xv is None or len(xv) != instance.dim for xv in xs):
            continue
        mean = la.lin_comb(qs, xs, instance.dim)
        if mean != solution.x[u]:
            failures.append(Failure(u, "martingale", "martingale identity fails"))
    extra = set(solution.q) - set(tree.edges)
    for u, v in sorted(extra):
        failures.append(Failure(u, "structure", f"weight on unknown edge {u}->{v}"))
    return failures


# --- serialization ------------------------------------------------------------


def solution_json(instance: Instance, solution: Optional[Solution], state: Optional[BackwardState] = None) -> dict:
    tree = instance.tree
    doc: dict = {}
    if state is not None:
        doc["verdict"] = state.verdict
        if not state.solvable:
            doc["failing_node"] = state.failing_node
            doc["failing_time"] = state.failing_time
    if solution is not None:
        doc["x"] = {u: point_json(solution.x[u]) for u in tree.order}
        doc["q"] = {f"{u}->{v}": frac_str(solution.q[(u, v)]) for u, v in tree.edges}
        measure = assemble_measure(instance, solution)
        doc["Q"] = {leaf: frac_str(measure.Q[leaf]) for leaf in tree.leaves}
    return doc


def parse_solution(text, instance: Instance) -> Solution:
    """Read the ``x`` and ``q`` sections of a solution document for ``instance``."""
    try:
        doc = load_document(text)
    except InstanceError as exc:
        raise SolutionSchemaError(str(exc)) from None
    tree = instance.tree
    raw_x, raw_q = doc.get("x"), doc.get("q")
    if not isinstance(raw_x, dict) or not isinstance(raw_q, dict):
        raise SolutionSchemaError("solution needs 'x' and 'q' objects")
    if set(raw_x) != set(tree.nodes):
        raise SolutionSchemaError("selector node ids do not match the instance tree")
    edge_keys = {f"{u}->{v}": (u, v) for u, v in tree.edges}
    if set(raw_q) != set(edge_keys):
        raise SolutionSchemaError("edge ids do not match the instance tree")
    try:
        x = {u: _point(raw_x[u], instance.dim, u) for u in tree.order}
        q = {edge_keys[k]: _rational(v, k) for k, v in raw_q.items()}
    except InstanceError as exc:
        raise SolutionSchemaError(str(exc)) from None
    return Solution(x, q)
