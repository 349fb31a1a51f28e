"""Finite filtrations as event trees, and the instance file format.

Atoms of F_n are the nodes at depth n. Each node stores the conditional
P-probability of being reached from its parent, so the P-probability of a
leaf is the product along its path.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Optional

from . import _linalg as la
from ._linalg import ONE, frac_str
from .polyhedra import FGSet, TaggedFGSet, conv_union


class InstanceError(ValueError):
    """Invalid instance text; ``node`` names the offending node when known."""

    def __init__(self, message: str, node: Optional[str] = None):
        super().__init__(f"node {node}: {message}" if node is not None else message)
        self.node = node
        self.reason = message


@dataclass(frozen=True)
class Node:
    id: str
    time: int
    parent: Optional[str]
    cond_prob: Fraction


class EventTree:
    """Nodes keyed by id; children are kept in sorted id order."""

    def __init__(self, nodes: Mapping[str, Node], horizon: int):
        self.nodes = dict(nodes)
        self.horizon = horizon
        kids: dict[str, list[str]] = {nid: [] for nid in self.nodes}
        root = None
        for n in self.nodes.values():
            if n.parent is None:
                root = n.id
            else:
                kids[n.parent].append(n.id)
        self.root = root
        self.children = {k: tuple(sorted(v)) for k, v in kids.items()}

    def __eq__(self, other):
        return isinstance(other, EventTree) and self.nodes == other.nodes and self.horizon == other.horizon

    @cached_property
    def order(self) -> tuple:
        """All node ids sorted by (time, id)."""
        return tuple(sorted(self.nodes, key=lambda i: (self.nodes[i].time, i)))

    def atoms_at(self, n: int) -> list[str]:
        if not 0 <= n <= self.horizon:
            raise ValueError(f"time {n} outside 0..{self.horizon}")
        return [i for i in self.order if self.nodes[i].time == n]

    def is_leaf(self, nid: str) -> bool:
        return not self.children[nid]

    @property
    def leaves(self) -> list[str]:
        return [i for i in self.order if self.is_leaf(i)]

    @property
    def internal(self) -> list[str]:
        return [i for i in self.order if not self.is_leaf(i)]

    @property
    def edges(self) -> list[tuple]:
        return [(u, v) for u in self.order for v in self.children[u]]

    def path(self, nid: str) -> list[str]:
        out = [nid]
        while self.nodes[out[-1]].parent is not None:
            out.append(self.nodes[out[-1]].parent)
        return out[::-1]

    def prob(self, nid: str) -> Fraction:
        p = ONE
        for v in self.path(nid)[1:]:
            p *= self.nodes[v].cond_prob
        return p


@dataclass(frozen=True)
class Instance:
    """A martingale selection problem: the value at node u is ri(sets[u])."""

    dim: int
    tree: EventTree
    sets: Mapping[str, FGSet]

    @property
    def horizon(self) -> int:
        return self.tree.horizon


def atoms_at(instance, n: int) -> list[str]:
    tree = instance.tree if hasattr(instance, "tree") else instance
    return tree.atoms_at(n)


def support_hull(W_next: Mapping[str, FGSet], tree: EventTree, u: str) -> TaggedFGSet:
    """Closed convex hull of the children's sets at u, generators tagged by child id."""
    kids = tree.children[u]
    if not kids:
        raise ValueError(f"node {u} is a leaf")
    for v in kids:
        if W_next[v].is_empty:
            raise ValueError(f"child {v} of {u} has an empty set; filter before calling")
    return conv_union([W_next[v] for v in kids], list(kids))


# --- parsing ------------------------------------------------------------------


def _rational(text, node=None) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise InstanceError(f"malformed rational {text!r}", node)
    try:
        return la.to_frac(text)
    except (ValueError, ZeroDivisionError):
        raise InstanceError(f"malformed rational {text!r}", node) from None


def _point(raw, dim, node) -> tuple:
    if not isinstance(raw, list):
        raise InstanceError("generator must be a list of rationals", node)
    if len(raw) != dim:
        raise InstanceError(f"generator has {len(raw)} coordinates, expected {dim}", node)
    return tuple(_rational(x, node) for x in raw)


def load_document(text) -> dict:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError:
            raise InstanceError("input is not UTF-8") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InstanceError("top level must be a JSON object")
    return doc


def parse_tree(doc: dict) -> tuple[int, EventTree]:
    """Validate ``dim``, ``horizon`` and ``nodes`` of a parsed document."""
    dim = doc.get("dim")
    horizon = doc.get("horizon")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise InstanceError(f"dim must be an integer >= 1, got {dim!r}")
    if isinstance(horizon, bool) or not isinstance(horizon, int) or horizon < 0:
        raise InstanceError(f"horizon must be an integer >= 0, got {horizon!r}")
    raw_nodes = doc.get("nodes")
    if not isinstance(raw_nodes, list) or not raw_nodes:
        raise InstanceError("nodes must be a nonempty list")
    nodes: dict[str, Node] = {}
    for raw in raw_nodes:
        if not isinstance(raw, dict) or not isinstance(raw.get("id"), str):
            raise InstanceError(f"node entry without string id: {raw!r}")
        nid = raw["id"]
        if nid in nodes:
            raise InstanceError("duplicate node id", nid)
        t = raw.get("time")
        if isinstance(t, bool) or not isinstance(t, int):
            raise InstanceError("time must be an integer", nid)
        parent = raw.get("parent")
        if parent is not None and not isinstance(parent, str):
            raise InstanceError("parent must be a node id or null", nid)
        prob = _rational(raw.get("prob", "1"), nid)
        nodes[nid] = Node(nid, t, parent, prob)

    roots = [n for n in nodes.values() if n.parent is None]
    if len(roots) != 1:
        raise InstanceError(f"expected exactly one root, found {len(roots)}")
    root = roots[0]
    if root.time != 0:
        raise InstanceError("root must be at time 0", root.id)
    if root.cond_prob != 1:
        raise InstanceError(f"root probability {frac_str(root.cond_prob)} ≠ 1", root.id)
    for n in nodes.values():
        if not 0 <= n.time <= horizon:
            raise InstanceError(f"time {n.time} outside 0..{horizon}", n.id)
        if n.parent is None:
            continue
        if n.parent not in nodes:
            raise InstanceError(f"unknown parent {n.parent!r}", n.id)
        if n.time != nodes[n.parent].time + 1:
            raise InstanceError(
                f"time gap: time {n.time} under parent at time {nodes[n.parent].time}", n.id
            )
        if n.cond_prob <= 0:
            raise InstanceError(f"nonpositive probability {frac_str(n.cond_prob)}", n.id)
    tree = EventTree(nodes, horizon)
    for nid in tree.order:
        kids = tree.children[nid]
        if kids:
            total = sum((nodes[k].cond_prob for k in kids), Fraction(0))
            if total != 1:
                raise InstanceError(f"probabilities sum {frac_str(total)} ≠ 1", nid)
        elif nodes[nid].time != horizon:
            raise InstanceError(f"leaf at time {nodes[nid].time} before horizon {horizon}", nid)
    return dim, tree


def parse_fgset(raw, dim: int, node: str, *, require_vertices: bool = True) -> FGSet:
    if not isinstance(raw, dict):
        raise InstanceError("set must be an object with vertices and rays", node)
    verts = raw.get("vertices", [])
    rays = raw.get("rays", [])
    if not isinstance(verts, list) or not isinstance(rays, list):
        raise InstanceError("vertices and rays must be lists", node)
    if require_vertices and not verts:
        raise InstanceError("empty generator list", node)
    vs = tuple(_point(v, dim, node) for v in verts)
    rs = tuple(_point(r, dim, node) for r in rays)
    if any(la.is_zero(r) for r in rs):
        raise InstanceError("zero ray", node)
    return FGSet(dim, vs, rs)


def parse_sets(doc: dict, dim: int, tree: EventTree, section: str = "sets") -> dict:
    raw = doc.get(section)
    if not isinstance(raw, dict):
        raise InstanceError(f"missing {section!r} section")
    out = {}
    for nid in tree.order:
        if nid not in raw:
            raise InstanceError("missing set", nid)
        out[nid] = parse_fgset(raw[nid], dim, nid)
    extra = sorted(set(raw) - set(tree.nodes))
    if extra:
        raise InstanceError("set given for unknown node", extra[0])
    return out


def parse_instance(text) -> Instance:
    """Parse and validate an instance document (str or UTF-8 bytes)."""
    doc = load_document(text)
    dim, tree = parse_tree(doc)
    return Instance(dim, tree, parse_sets(doc, dim, tree))


# --- serialization ------------------------------------------------------------


def point_json(p) -> list:
    return [frac_str(x) for x in p]


def tree_json(dim: int, tree: EventTree) -> dict:
    nodes = []
    for nid in tree.order:
        n = tree.nodes[nid]
        nodes.append({"id": nid, "time": n.time, "parent": n.parent, "prob": frac_str(n.cond_prob)})
    return {"dim": dim, "horizon": tree.horizon, "nodes": nodes}


def fgset_json(S: FGSet) -> dict:
    return {"vertices": [point_json(v) for v in S.vertices], "rays": [point_json(r) for r in S.rays]}


def instance_json(inst: Instance) -> dict:
    doc = tree_json(inst.dim, inst.tree)
    doc["sets"] = {nid: fgset_json(inst.sets[nid]) for nid in inst.tree.order}
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def serialize_instance(inst: Instance) -> str:
    return dumps(instance_json(inst))
