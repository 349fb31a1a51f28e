"""Exact finitely generated convex sets.

An :class:`FGSet` is conv(vertices) + cone(rays) in Q^d; the relatively open
set it stands for is its relative interior. Conversions to and from the
inequality description go through a double-description kernel on the
homogenized cone. :func:`reduce_generators` reaches the same canonical
form by an independent route (LP redundancy elimination).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

from . import _linalg as la
from ._linalg import ONE, ZERO, Vector, dot, vec
from .lp import LinearProgram, NotInHull, represent_in_hull, solve_lp

INFINITY = math.inf


class EmptySetError(ValueError):
    pass


class GeometryInputError(ValueError):
    pass


@dataclass(frozen=True)
class FGSet:
    """conv(vertices) + cone(rays); empty iff there are no vertices."""

    dim: int
    vertices: tuple = ()
    rays: tuple = ()

    def __post_init__(self):
        if self.dim < 1:
            raise GeometryInputError("dimension must be at least 1")
        vs = tuple(vec(v) for v in self.vertices)
        rs = tuple(vec(r) for r in self.rays)
        for g in vs + rs:
            if len(g) != self.dim:
                raise GeometryInputError(f"generator {g} does not have dimension {self.dim}")
        if any(la.is_zero(r) for r in rs):
            raise GeometryInputError("rays must be nonzero")
        if not vs and rs:
            raise GeometryInputError("the empty set has no rays")
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "rays", rs)

    @classmethod
    def empty(cls, dim: int) -> "FGSet":
        return cls(dim)

    @classmethod
    def point(cls, p: Sequence) -> "FGSet":
        return cls(len(p), (p,))

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @cached_property
    def canonical(self) -> "FGSet":
        if self.is_empty:
            return self
        return h_to_v(self.hrep)

    @cached_property
    def hrep(self) -> "HRep":
        return _v_to_h(self)


@dataclass(frozen=True)
class HRep:
    """{x : a.x = b for equalities, a.x <= b for inequalities}."""

    dim: int
    equalities: tuple = ()
    inequalities: tuple = ()

    def __post_init__(self):
        eqs = tuple((vec(a), Fraction(b)) for a, b in self.equalities)
        ins = tuple((vec(a), Fraction(b)) for a, b in self.inequalities)
        for a, _ in eqs + ins:
            if len(a) != self.dim:
                raise GeometryInputError("constraint dimension mismatch")
        object.__setattr__(self, "equalities", eqs)
        object.__setattr__(self, "inequalities", ins)

    def satisfied_by(self, x: Sequence[Fraction], strict: bool = False) -> bool:
        if any(dot(a, x) != b for a, b in self.equalities):
            return False
        if strict:
            return all(dot(a, x) < b for a, b in self.inequalities)
        return all(dot(a, x) <= b for a, b in self.inequalities)


@dataclass(frozen=True)
class TaggedFGSet:
    """A canonical set together with tagged generators that also generate it.

    ``vertices`` and ``rays`` are ``(tag, vector)`` pairs; each is a generator
    of the member set the tag names.
    """

    set: FGSet
    vertices: tuple
    rays: tuple


# --- double description kernel ------------------------------------------------


def _int_row(row: Sequence[Fraction]) -> tuple:
    if la.is_zero(row):
        return tuple(0 for _ in row)
    return tuple(int(x) for x in la.primitive(row))


def _int_primitive(v: Sequence[int]) -> tuple:
    g = 0
    for x in v:
        g = math.gcd(g, x)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def extreme_rays(rows: Sequence[Sequence[Fraction]], k: int) -> list[tuple]:
    """Extreme rays of the pointed cone {y in Q^k : row . y >= 0 for all rows}.

    The rows must have rank k. Rays come back as primitive integer tuples.
    """
    A = [_int_row(r) for r in rows]
    chosen: list[int] = []
    basis_rows: list = []
    for i, r in enumerate(A):
        if la.rank(basis_rows + [r], k) > len(basis_rows):
            basis_rows.append(r)
            chosen.append(i)
            if len(chosen) == k:
                break
    if len(chosen) < k:
        raise GeometryInputError("constraint rows do not have full column rank")
    inv = la.inverse([tuple(Fraction(x) for x in r) for r in basis_rows])
    rays = []
    zsets = []
    for j in range(k):
        col = tuple(inv[i][j] for i in range(k))
        rays.append(tuple(int(x) for x in la.primitive(col)))
        zsets.append(sum(1 << chosen[t] for t in range(k) if t != j))
    chosen_set = set(chosen)
    for i, row in enumerate(A):
        if i in chosen_set:
            continue
        vals = [sum(a * b for a, b in zip(row, r)) for r in rays]
        pos = [t for t, v in enumerate(vals) if v > 0]
        neg = [t for t, v in enumerate(vals) if v < 0]
        bit = 1 << i
        new_rays = []
        new_z = []
        for t, v in enumerate(vals):
            if v >= 0:
                new_rays.append(rays[t])
                new_z.append(zsets[t] | bit if v == 0 else zsets[t])
        for p in pos:
            for n in neg:
                common = zsets[p] & zsets[n]
                if bin(common).count("1") < k - 2:
                    continue
                adjacent = True
                for t in range(len(rays)):
                    if t != p and t != n and common & ~zsets[t] == 0:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                ap, an = vals[p], vals[n]
                w = tuple(ap * x - an * y for x, y in zip(rays[n], rays[p]))
                new_rays.append(_int_primitive(w))
                new_z.append(common | bit)
        rays, zsets = new_rays, new_z
    return rays


# --- canonical H-representations ---------------------------------------------


def _canonical_hrep(dim: int, eqs: Iterable, ins: Iterable) -> HRep:
    eq_rows, pivots = la.rref([tuple(a) + (b,) for a, b in eqs], dim + 1)
    if dim in pivots:
        # 0 = 1 among the equalities
        return HRep(dim, ((la.zeros(dim), ONE),), ())
    out_in = set()
    for a, b in ins:
        row = list(a) + [b]
        for er, p in zip(eq_rows, pivots):
            f = row[p]
            if f:
                row = [x - f * y for x, y in zip(row, er)]
        if la.is_zero(row[:dim]):
            if row[dim] < 0:
                return HRep(dim, ((la.zeros(dim), ONE),), ())
            continue
        prim = la.primitive(row)
        out_in.add(prim)
    return HRep(
        dim,
        tuple((r[:dim], r[dim]) for r in eq_rows),
        tuple((r[:dim], r[dim]) for r in sorted(out_in)),
    )


def _v_to_h(S: FGSet) -> HRep:
    if S.is_empty:
        raise EmptySetError("empty set has no H-representation here")
    d = S.dim
    gens = [(ONE,) + v for v in S.vertices] + [(ZERO,) + r for r in S.rays]
    red, piv = la.rref(gens, d + 1)
    eqs = []
    for e in la.nullspace(gens, d + 1):
        eqs.append((e[1:], -e[0]))
    coords = [tuple(g[p] for p in piv) for g in gens]
    ins = []
    for h in extreme_rays(coords, len(piv)):
        w = [ZERO] * (d + 1)
        for p, x in zip(piv, h):
            w[p] = Fraction(x)
        normal = tuple(-x for x in w[1:])
        if la.is_zero(normal):
            continue
        ins.append((normal, w[0]))
    return _canonical_hrep(d, eqs, ins)


def v_to_h(S: FGSet) -> HRep:
    """Irredundant inequality description; equalities span the affine-hull complement."""
    return S.hrep


def h_to_v(H: HRep) -> FGSet:
    """Canonical generators of the polyhedron H (empty when infeasible)."""
    d = H.dim
    rows = [a for a, _ in H.equalities] + [a for a, _ in H.inequalities]
    lin = la.span_basis(la.nullspace(rows, d), d) if rows else la.span_basis(
        [tuple(ONE if i == j else ZERO for i in range(d)) for j in range(d)], d
    )
    # homogenized: (t, x)
    eq_rows = [(-b,) + tuple(a) for a, b in H.equalities]
    eq_rows += [(ZERO,) + tuple(l) for l in lin]
    in_rows = [(b,) + tuple(-x for x in a) for a, b in H.inequalities]
    in_rows.append((ONE,) + la.zeros(d))
    N = la.nullspace(eq_rows, d + 1) if eq_rows else [
        tuple(ONE if i == j else ZERO for i in range(d + 1)) for j in range(d + 1)
    ]
    k = len(N)
    if k == 0:
        return FGSet.empty(d)
    M = [tuple(dot(r, n) for n in N) for r in in_rows]
    vertices = []
    rays = []
    for y in extreme_rays(M, k):
        tx = la.lin_comb([Fraction(c) for c in y], N, d + 1)
        t, x = tx[0], tx[1:]
        if t > 0:
            vertices.append(tuple(c / t for c in x))
        elif not la.is_zero(x):
            rays.append(la.primitive(x))
    if not vertices:
        return FGSet.empty(d)
    for l in lin:
        b = la.sign_normalized(l)
        rays.append(b)
        rays.append(tuple(-c for c in b))
    out = FGSet(d, tuple(sorted(set(vertices))), tuple(sorted(set(rays))))
    out.__dict__["canonical"] = out
    return out


# --- canonical generators (LP route) -----------------------------------------


def _in_cone(target: Vector, gens: Sequence[Vector]) -> bool:
    if not gens:
        return la.is_zero(target)
    d = len(target)
    eq = [(tuple(g[i] for g in gens), target[i]) for i in range(d)]
    res = solve_lp(LinearProgram((ZERO,) * len(gens), tuple(eq), (), nonneg=True))
    return not res.infeasible


def reduce_generators(S: FGSet) -> FGSet:
    """Canonical generators computed by LP redundancy elimination.

    Slower than :func:`canonicalize` but shares no code with the
    double-description kernel; the two must agree exactly.
    """
    if S.is_empty:
        return S
    d = S.dim
    rays = sorted({la.primitive(r) for r in S.rays})
    lin_gens = [r for r in rays if _in_cone(tuple(-x for x in r), rays)]
    lin = la.span_basis(lin_gens, d)
    verts = {la.project_out(v, lin) for v in S.vertices}
    prays = set()
    for r in rays:
        p = la.project_out(r, lin)
        if not la.is_zero(p):
            prays.add(la.primitive(p))
    prays = sorted(prays)
    keep_rays = [r for r in prays if not _in_cone(r, [s for s in prays if s != r])]
    verts = sorted(verts)
    keep_verts = []
    for v in verts:
        others = [u for u in verts if u != v]
        if others:
            try:
                represent_in_hull(v, others, keep_rays)
                continue
            except NotInHull:
                pass
        keep_verts.append(v)
    out_rays = list(keep_rays)
    for l in lin:
        b = la.sign_normalized(l)
        out_rays += [b, tuple(-c for c in b)]
    return FGSet(d, tuple(keep_verts), tuple(sorted(out_rays)))


def canonicalize(S: FGSet) -> FGSet:
    """Minimal generators: lineality as +/- primitive basis pairs, the pointed
    part (projected orthogonally to the lineality space) by its extreme
    points and primitive extreme rays, all sorted.

    Computed through the inequality description and back.
    """
    return S.canonical


# --- operations ---------------------------------------------------------------


def affine_hull(S: FGSet):
    """(base point, direction basis) of the affine hull of S."""
    if S.is_empty:
        raise EmptySetError("affine hull of the empty set")
    C = S.canonical
    p = C.vertices[0]
    dirs = [la.sub(v, p) for v in C.vertices[1:]] + list(C.rays)
    return p, [la.sign_normalized(b) for b in la.span_basis(dirs, S.dim)]


def intersect(S: FGSet, T: FGSet) -> FGSet:
    if S.dim != T.dim:
        raise GeometryInputError("dimension mismatch")
    if S.is_empty or T.is_empty:
        return FGSet.empty(S.dim)
    hs, ht = S.hrep, T.hrep
    return h_to_v(HRep(S.dim, hs.equalities + ht.equalities, hs.inequalities + ht.inequalities))


def conv_union(sets: Sequence[FGSet], tags: Sequence) -> TaggedFGSet:
    """Closed convex hull of a union, keeping for every generator a member tag."""
    if len(sets) != len(tags):
        raise GeometryInputError("one tag per set")
    members = [(t, s.canonical) for s, t in zip(sets, tags) if not s.is_empty]
    if not members:
        raise EmptySetError("convex hull of empty sets")
    d = members[0][1].dim
    if any(s.dim != d for _, s in members):
        raise GeometryInputError("dimension mismatch")
    tv, tr = {}, {}
    for t, s in members:
        for v in s.vertices:
            tv.setdefault(v, t)
        for r in s.rays:
            tr.setdefault(r, t)
    hull = FGSet(d, tuple(tv), tuple(tr)).canonical
    hull_rays = set(hull.rays)
    if all(tuple(-x for x in r) not in hull_rays for r in hull_rays):
        # pointed hull: its extreme points and rays are among the members'
        tv = {v: tv[v] for v in hull.vertices}
        tr = {r: tr[r] for r in hull.rays}
    return TaggedFGSet(hull, tuple((t, v) for v, t in tv.items()), tuple((t, r) for r, t in tr.items()))


def ri_point(S: FGSet) -> Vector:
    """Mean of the canonical vertices plus the sum of the canonical rays."""
    if S.is_empty:
        raise EmptySetError("empty set has no relative interior point")
    C = S.canonical
    k = len(C.vertices)
    p = la.lin_comb([Fraction(1, k)] * k, C.vertices, C.dim)
    for r in C.rays:
        p = la.add(p, r)
    return p


def contains(S: FGSet, x: Sequence, mode: str = "closure") -> bool:
    """Membership of x in cl S (``mode="closure"``) or in ri S (``"relative_interior"``)."""
    if S.is_empty:
        raise EmptySetError("membership in the empty set")
    x = vec(x)
    if len(x) != S.dim:
        raise GeometryInputError("dimension mismatch")
    if mode == "closure":
        return S.hrep.satisfied_by(x)
    if mode in ("relative_interior", "ri"):
        return S.hrep.satisfied_by(x, strict=True)
    raise GeometryInputError(f"unknown mode {mode!r}")


def ri_intersection_closure(P: FGSet, Q: FGSet) -> Optional[FGSet]:
    """cl(ri P & ri Q) as a canonical set, or None when ri P & ri Q is empty."""
    Z = intersect(P, Q)
    if Z.is_empty:
        return None
    z = ri_point(Z)
    if contains(P, z, "relative_interior") and contains(Q, z, "relative_interior"):
        return Z
    return None


def max_step(H: HRep, x: Sequence, direction: Sequence):
    """Largest t with x + t*direction in H; ``INFINITY`` along recession directions."""
    x, direction = vec(x), vec(direction)
    if not H.satisfied_by(x):
        raise GeometryInputError("starting point is not in the set")
    if any(dot(a, direction) != 0 for a, _ in H.equalities):
        raise GeometryInputError("direction leaves the affine hull")
    best = INFINITY
    for a, b in H.inequalities:
        rate = dot(a, direction)
        if rate > 0:
            t = (b - dot(a, x)) / rate
            if t < best:
                best = t
    return best


def is_cone(C: FGSet) -> bool:
    c = C.canonical
    return not c.is_empty and c.vertices == (la.zeros(C.dim),)


def dual_cone(C: FGSet) -> FGSet:
    """{y : <g, y> >= 0 for every g in C} for a cone C."""
    if not is_cone(C):
        raise GeometryInputError("dual_cone needs a cone with apex at the origin")
    d = C.dim
    ins = tuple((tuple(-x for x in r), ZERO) for r in C.canonical.rays)
    return h_to_v(HRep(d, (), ins))


def is_subspace(S: FGSet) -> bool:
    """True when S is a linear subspace (a cone equal to its lineality space)."""
    if not is_cone(S):
        return False
    rays = set(S.canonical.rays)
    return all(tuple(-x for x in r) in rays for r in rays)
