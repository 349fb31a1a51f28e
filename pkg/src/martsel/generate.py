"""Seeded random instances for testing and corpus building.

Profiles:

* ``solvable-biased``: a martingale is planted on the tree first and every
  set is grown around its value so that the value stays in the relative
  interior. Always solvable.
* ``adversarial``: sets scattered around a drifting random walk; mixed verdicts.
* ``single-valued``: a price process (``values`` section), planted
  martingale or drifting walk with equal odds.
* ``cones``: two- or three-asset proportional transaction cost models
  (``cones`` section) with spreads shrinking over time.

Sampled rationals have denominators at most 64. Values derived from them
(the balancing child of a planted martingale, a cone dual) can have larger ones.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from . import _linalg as la
from ._linalg import ONE
from .polyhedra import FGSet, dual_cone
from .tree import EventTree, Node, dumps, fgset_json, point_json, tree_json

PROFILES = ("solvable-biased", "adversarial", "single-valued", "cones")

MAX_DIM = 4
MAX_HORIZON = 4
MAX_BRANCH = 3
MAX_DEN = 64
NODE_BUDGET = 24


class UnknownProfile(ValueError):
    pass


def _rat(rng: random.Random, lo: int, hi: int, dens=(1, 2, 4, 8)) -> Fraction:
    den = rng.choice(dens)
    return Fraction(rng.randint(lo * den, hi * den), den)


def _weights(rng: random.Random, m: int) -> list[Fraction]:
    """m positive rationals summing to 1, common denominator at most 64."""
    if m == 1:
        return [ONE]
    den = rng.randint(m, MAX_DEN)
    cuts = sorted(rng.sample(range(1, den), m - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return [Fraction(k, den) for k in parts]


def random_tree(rng: random.Random, horizon: int, max_branch: int = MAX_BRANCH, budget: int = NODE_BUDGET) -> EventTree:
    nodes = {"n0": Node("n0", 0, None, ONE)}
    frontier = ["n0"]
    count = 1
    for t in range(1, horizon + 1):
        nxt = []
        for i, u in enumerate(frontier):
            left = len(frontier) - i - 1
            room = budget - count - left
            m = rng.randint(1, max(1, min(max_branch, room)))
            for w in _weights(rng, m):
                nid = f"n{count}"
                count += 1
                nodes[nid] = Node(nid, t, u, w)
                nxt.append(nid)
        frontier = nxt
    return EventTree(nodes, horizon)


def _plant_martingale(rng, tree: EventTree, dim: int, spread: int = 3) -> dict:
    x = {tree.root: tuple(_rat(rng, -spread, spread) for _ in range(dim))}
    for u in tree.order:
        kids = tree.children[u]
        if not kids:
            continue
        q = _weights(rng, len(kids))
        moves = [tuple(_rat(rng, -2, 2) for _ in range(dim)) for _ in kids[:-1]]
        acc = la.lin_comb(q[:-1], moves, dim)
        moves.append(la.scale(-ONE / q[-1], acc))
        for v, mv in zip(kids, moves):
            x[v] = la.add(x[u], mv)
    return x


def _drifting_walk(rng, tree: EventTree, dim: int) -> dict:
    x = {tree.root: tuple(_rat(rng, -3, 3) for _ in range(dim))}
    for u in tree.order:
        kids = tree.children[u]
        if not kids:
            continue
        drift = tuple(_rat(rng, 0, 1) for _ in range(dim)) if rng.random() < 0.5 else la.zeros(dim)
        for v in kids:
            x[v] = la.add(la.add(x[u], drift), tuple(_rat(rng, -1, 1) for _ in range(dim)))
    return x


def _set_around(rng, center, dim: int) -> FGSet:
    """A finitely generated set with ``center`` in its relative interior."""
    if rng.random() < 0.2:
        return FGSet.point(center)
    k = rng.randint(1, dim)
    dirs = [tuple(Fraction(rng.randint(-2, 2)) for _ in range(dim)) for _ in range(k)]
    n_extra = rng.randint(1, dim + 1)
    offsets = []
    for _ in range(n_extra):
        c = [_rat(rng, -1, 1, (1, 2, 4)) for _ in dirs]
        offsets.append(la.lin_comb(c, dirs, dim))
    balance = la.scale(Fraction(-1), la.lin_comb([ONE] * n_extra, offsets, dim))
    offsets.append(balance)
    rays = []
    if rng.random() < 0.25:
        for _ in range(rng.randint(1, 2)):
            r = tuple(Fraction(rng.randint(-1, 1)) for _ in range(dim))
            if not la.is_zero(r):
                rays.append(r)
    shift = la.lin_comb([ONE] * len(rays), rays, dim) if rays else la.zeros(dim)
    verts = [la.sub(la.add(center, o), shift) for o in offsets]
    return FGSet(dim, tuple(verts), tuple(rays))


def _scattered_set(rng, center, dim: int) -> FGSet:
    if rng.random() < 0.3:
        return FGSet.point(center)
    n = rng.randint(1, dim + 1)
    verts = [la.add(center, tuple(_rat(rng, -1, 1, (1, 2, 4)) for _ in range(dim))) for _ in range(n)]
    return FGSet(dim, tuple(verts))


def _shape(rng, dim: Optional[int], horizon: Optional[int]):
    if dim is None:
        dim = rng.randint(1, MAX_DIM)
    if horizon is None:
        horizon = rng.randint(0, MAX_HORIZON)
    return dim, horizon


def generate_document(seed: int, profile: str, dim: Optional[int] = None, horizon: Optional[int] = None) -> dict:
    if profile not in PROFILES:
        raise UnknownProfile(f"unknown profile {profile!r}; choose from {', '.join(PROFILES)}")
    rng = random.Random(f"{profile}:{seed}")
    if profile == "cones":
        return _cone_document(rng, dim, horizon)
    dim, horizon = _shape(rng, dim, horizon)
    tree = random_tree(rng, horizon)
    doc = tree_json(dim, tree)
    if profile == "single-valued":
        x = _plant_martingale(rng, tree, dim) if rng.random() < 0.5 else _drifting_walk(rng, tree, dim)
        doc["values"] = {u: point_json(x[u]) for u in tree.order}
        return doc
    if profile == "solvable-biased":
        x = _plant_martingale(rng, tree, dim)
        sets = {u: _set_around(rng, x[u], dim) for u in tree.order}
    else:
        x = _drifting_walk(rng, tree, dim)
        sets = {u: _scattered_set(rng, x[u], dim) for u in tree.order}
    doc["sets"] = {u: fgset_json(sets[u]) for u in tree.order}
    return doc


def _cone_document(rng, dim, horizon) -> dict:
    if dim is None:
        dim = rng.choice([2, 2, 3])
    if horizon is None:
        horizon = rng.randint(0, 3)
    tree = random_tree(rng, horizon)
    ratios = [Fraction(1, 2), Fraction(2, 3), Fraction(4, 5), ONE, Fraction(5, 4), Fraction(3, 2), Fraction(2)]
    mid = {tree.root: tuple(Fraction(rng.randint(1, 8)) for _ in range(dim - 1))}
    for u in tree.order:
        for v in tree.children[u]:
            mid[v] = tuple(s * rng.choice(ratios) for s in mid[u])
    base = Fraction(rng.randint(0, 16), 64)
    cones = {}
    for u in tree.order:
        spread = base / (tree.nodes[u].time + 1)
        gens = [()]
        for s in mid[u]:
            gens = [g + (s * (1 + e * spread),) for g in gens for e in (-1, 1)]
        rays = sorted({(ONE,) + g for g in gens})
        K_star = FGSet(dim, (la.zeros(dim),), tuple(rays))
        cones[u] = dual_cone(K_star)
    doc = tree_json(dim, tree)
    doc["cones"] = {u: fgset_json(cones[u]) for u in tree.order}
    return doc


def generate_text(seed: int, profile: str, **kw) -> str:
    return dumps(generate_document(seed, profile, **kw))
