"""Random objects and independent oracles shared by the test modules."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from martsel import _linalg as la
from martsel.lp import LinearProgram, solve_lp
from martsel.polyhedra import FGSet

F = Fraction


def rand_rat(rng: random.Random, lo=-6, hi=6, dens=(1, 2, 3, 4)) -> Fraction:
    d = rng.choice(dens)
    return F(rng.randint(lo * d, hi * d), d)


def random_fgset(rng: random.Random, dim: int, *, rays=True, flat=0.3) -> FGSet:
    """Random nonempty set; sometimes lower-dimensional, sometimes unbounded."""
    nv = rng.randint(1, dim + 3)
    verts = [tuple(rand_rat(rng) for _ in range(dim)) for _ in range(nv)]
    if dim > 1 and rng.random() < flat:
        # squash into a random affine hyperplane x_k = c
        k = rng.randrange(dim)
        c = rand_rat(rng)
        verts = [v[:k] + (c,) + v[k + 1 :] for v in verts]
    rs = []
    if rays and rng.random() < 0.4:
        for _ in range(rng.randint(1, 3)):
            r = tuple(F(rng.randint(-2, 2)) for _ in range(dim))
            if not la.is_zero(r):
                rs.append(r)
    return FGSet(dim, tuple(verts), tuple(rs))


def random_cone(rng: random.Random, dim: int) -> FGSet:
    rs = []
    while not rs:
        for _ in range(rng.randint(1, dim + 2)):
            r = tuple(F(rng.randint(-3, 3)) for _ in range(dim))
            if not la.is_zero(r):
                rs.append(r)
    return FGSet(dim, (la.zeros(dim),), tuple(rs))


def sample_points(rng: random.Random, S: FGSet, n: int):
    """Points near S: strictly inside, on generators, and scattered around."""
    pts = []
    for _ in range(n):
        mode = rng.random()
        if mode < 0.3:
            pts.append(tuple(rand_rat(rng, -8, 8) for _ in range(S.dim)))
            continue
        w = [F(rng.randint(0, 3)) for _ in S.vertices]
        if sum(w) == 0:
            w[0] = F(1)
        w = [x / sum(w) for x in w]
        p = la.lin_comb(w, S.vertices, S.dim)
        for r in S.rays:
            p = la.add(p, la.scale(F(rng.randint(0, 2)), r))
        if mode > 0.8:
            p = la.add(p, tuple(F(rng.randint(-1, 1), 4) for _ in range(S.dim)))
        pts.append(p)
    return pts


def strict_slack_common(P: FGSet, Q: FGSet) -> bool:
    """Oracle: is there a point written with all-positive coefficients over
    the generators of P and, separately, of Q?  (ri P & ri Q nonempty.)

    Variables: x (free), lam_P, mu_P, lam_Q, mu_Q, t; maximize t subject to
    every coefficient >= t.
    """
    d = P.dim
    blocks = [len(P.vertices), len(P.rays), len(Q.vertices), len(Q.rays)]
    n = d + sum(blocks) + 1
    offs = list(itertools.accumulate([d] + blocks))
    t_col = n - 1
    eq, ineq = [], []
    for S, (vo, ro) in ((P, (offs[0], offs[1])), (Q, (offs[2], offs[3]))):
        for i in range(d):
            a = [F(0)] * n
            a[i] = F(-1)
            for j, v in enumerate(S.vertices):
                a[vo + j] = v[i]
            for j, r in enumerate(S.rays):
                a[ro + j] = r[i]
            eq.append((tuple(a), F(0)))
        a = [F(0)] * n
        for j in range(len(S.vertices)):
            a[vo + j] = F(1)
        eq.append((tuple(a), F(1)))
    for col in range(d, n - 1):
        a = [F(0)] * n
        a[col] = F(-1)
        a[t_col] = F(1)
        ineq.append((tuple(a), F(0)))
    a = [F(0)] * n
    a[t_col] = F(1)
    ineq.append((tuple(a), F(1)))
    obj = [F(0)] * n
    obj[t_col] = F(1)
    res = solve_lp(LinearProgram(tuple(obj), tuple(eq), tuple(ineq)))
    return res.optimal and res.value > 0


def brute_force_lp_max(c, rows):
    """Max of c.x over the vertices of {a.x <= b}, by enumerating bases."""
    n = len(c)
    best = None
    for combo in itertools.combinations(range(len(rows)), n):
        A = [rows[i][0] for i in combo]
        if la.rank(A, n) < n:
            continue
        x = la.solve_square(A, [rows[i][1] for i in combo])
        if all(la.dot(a, x) <= b for a, b in rows):
            val = la.dot(c, x)
            if best is None or val > best:
                best = val
    return best


def planted(rng: random.Random, dim: int, horizon: int, singletons=0.2):
    """An instance built around a known martingale, with that (x, q) pair."""
    from martsel.generate import random_tree
    from martsel.msp import Solution
    from martsel.tree import Instance

    tree = random_tree(rng, horizon)
    x = {tree.root: tuple(rand_rat(rng, -3, 3) for _ in range(dim))}
    q = {}
    for u in tree.order:
        kids = tree.children[u]
        if not kids:
            continue
        raw = [F(rng.randint(1, 6)) for _ in kids]
        ws = [w / sum(raw) for w in raw]
        moves = [tuple(rand_rat(rng, -2, 2) for _ in range(dim)) for _ in kids[:-1]]
        acc = la.lin_comb(ws[:-1], moves, dim)
        moves.append(la.scale(-1 / ws[-1], acc))
        for v, w, mv in zip(kids, ws, moves):
            q[(u, v)] = w
            x[v] = la.add(x[u], mv)
    sets = {}
    for u in tree.order:
        if rng.random() < singletons:
            sets[u] = FGSet.point(x[u])
            continue
        offs = [tuple(rand_rat(rng, -1, 1) for _ in range(dim)) for _ in range(rng.randint(1, dim + 1))]
        offs.append(la.scale(F(-1), la.lin_comb([F(1)] * len(offs), offs, dim)))
        sets[u] = FGSet(dim, tuple(la.add(x[u], o) for o in offs))
    return Instance(dim, tree, sets), Solution(x, q)
