"""Exact rational linear programming.

A dense two-phase tableau simplex over ``Fraction`` with Bland's rule.
Every verdict carries a certificate that can be checked by substitution:
an optimal point with simplex multipliers, a Farkas vector, or an improving
ray.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ._linalg import ONE, ZERO, Vector, dot, vec

MAXIMIZE = "maximize"
MINIMIZE = "minimize"


class LPInputError(ValueError):
    pass


class NotInHull(ValueError):
    """Raised by :func:`represent_in_hull`; ``certificate`` is a Farkas vector."""

    def __init__(self, message: str, certificate: Optional[Vector] = None):
        super().__init__(message)
        self.certificate = certificate


@dataclass(frozen=True)
class LinearProgram:
    """``sense`` c.x subject to ``a.x = b`` rows and ``a.x <= b`` rows.

    Variables are free unless ``nonneg`` is set, in which case all of them
    are constrained to be nonnegative.
    """

    objective: Vector
    eq_rows: tuple = ()
    ineq_rows: tuple = ()
    sense: str = MAXIMIZE
    nonneg: bool = False

    def __post_init__(self):
        object.__setattr__(self, "objective", vec(self.objective))
        object.__setattr__(self, "eq_rows", tuple((vec(a), Fraction(b)) for a, b in self.eq_rows))
        object.__setattr__(self, "ineq_rows", tuple((vec(a), Fraction(b)) for a, b in self.ineq_rows))
        n = len(self.objective)
        if n < 1:
            raise LPInputError("linear program needs at least one variable")
        for a, _ in self.eq_rows + self.ineq_rows:
            if len(a) != n:
                raise LPInputError(f"row of length {len(a)} in a program with {n} variables")
        if self.sense not in (MAXIMIZE, MINIMIZE):
            raise LPInputError(f"unknown sense {self.sense!r}")

    @property
    def dim(self) -> int:
        return len(self.objective)

    @property
    def rows(self) -> tuple:
        return self.eq_rows + self.ineq_rows


@dataclass(frozen=True)
class LPResult:
    """Outcome of :func:`solve_lp`.

    ``duals`` (optimal only) are indexed like ``lp.rows``: equality rows first.
    They satisfy A^T y = c (>= c with ``nonneg``) and b.y = value, with
    y >= 0 on inequality rows when maximizing and y <= 0 when minimizing.
    ``certificate`` (infeasible only) is a Farkas vector y over the same rows:
    y >= 0 on inequality rows, A^T y = 0 (>= 0 with ``nonneg``), b.y < 0.
    """

    status: str
    point: Optional[Vector] = None
    value: Optional[Fraction] = None
    duals: Optional[Vector] = None
    certificate: Optional[Vector] = None
    ray: Optional[Vector] = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    @property
    def infeasible(self) -> bool:
        return self.status == "infeasible"

    @property
    def unbounded(self) -> bool:
        return self.status == "unbounded"


class _Tableau:
    def __init__(self, lp: LinearProgram):
        n = lp.dim
        self.lp = lp
        self.n = n
        self.nstruct = n if lp.nonneg else 2 * n
        rows = lp.rows
        n_eq = len(lp.eq_rows)
        n_in = len(lp.ineq_rows)
        self.m = len(rows)
        self.sigma = []
        need_art = []
        for i, (a, b) in enumerate(rows):
            s = -1 if b < 0 else 1
            self.sigma.append(s)
            need_art.append(i < n_eq or s < 0)
        self.art_start = self.nstruct + n_in
        n_art = sum(need_art)
        self.ncols = self.art_start + n_art
        self.T: list[list[Fraction]] = []
        self.rhs: list[Fraction] = []
        self.basis: list[int] = []
        self.init_col: list[int] = []
        art = self.art_start
        for i, (a, b) in enumerate(rows):
            s = self.sigma[i]
            row = [ZERO] * self.ncols
            for j, x in enumerate(a):
                if x:
                    row[j] = s * x
                    if not lp.nonneg:
                        row[n + j] = -s * x
            if i >= n_eq:
                row[self.nstruct + i - n_eq] = Fraction(s)
            if need_art[i]:
                row[art] = ONE
                col = art
                art += 1
            else:
                col = self.nstruct + i - n_eq
            self.T.append(row)
            self.rhs.append(s * b)
            self.basis.append(col)
            self.init_col.append(col)

    def set_costs(self, costs: Sequence[Fraction]):
        self.costs = list(costs)
        d = list(costs)
        z = ZERO
        for i, bcol in enumerate(self.basis):
            cb = costs[bcol]
            if cb:
                row = self.T[i]
                for j in range(self.ncols):
                    if row[j]:
                        d[j] -= cb * row[j]
                z += cb * self.rhs[i]
        self.d = d
        self.z = z

    def pivot(self, r: int, c: int):
        row = self.T[r]
        piv = row[c]
        if piv != 1:
            inv = ONE / piv
            row = [x * inv if x else x for x in row]
            self.T[r] = row
            self.rhs[r] *= inv
        nz = [j for j in range(self.ncols) if row[j]]
        for i in range(self.m):
            if i != r:
                f = self.T[i][c]
                if f:
                    other = self.T[i]
                    for j in nz:
                        other[j] -= f * row[j]
                    self.rhs[i] -= f * self.rhs[r]
        f = self.d[c]
        if f:
            for j in nz:
                self.d[j] -= f * row[j]
            self.z += f * self.rhs[r]
        self.basis[r] = c

    def run(self, allowed: int) -> Optional[int]:
        """Bland iterations over columns < allowed. Returns an unbounded column or None."""
        while True:
            c = next((j for j in range(allowed) if self.d[j] > 0), None)
            if c is None:
                return None
            best = None
            for i in range(self.m):
                a = self.T[i][c]
                if a > 0:
                    key = (self.rhs[i] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return c
            self.pivot(best[1], c)

    def multipliers(self) -> list[Fraction]:
        """c_B^T B^{-1}, mapped back through the row sign flips."""
        out = []
        for i in range(self.m):
            col = self.init_col[i]
            u = sum((self.costs[b] * self.T[k][col] for k, b in enumerate(self.basis) if self.costs[b]), ZERO)
            out.append(self.sigma[i] * u)
        return out

    def structural_values(self, z: Sequence[Fraction]) -> Vector:
        if self.lp.nonneg:
            return tuple(z[: self.n])
        return tuple(z[j] - z[self.n + j] for j in range(self.n))

    def basic_solution(self) -> list[Fraction]:
        z = [ZERO] * self.ncols
        for i, b in enumerate(self.basis):
            z[b] = self.rhs[i]
        return z


def solve_lp(lp: LinearProgram) -> LPResult:
    """Solve ``lp`` exactly; see :class:`LPResult` for the certificates."""
    tab = _Tableau(lp)
    # Phase I: maximize minus the sum of artificials.
    costs = [ZERO] * tab.ncols
    for j in range(tab.art_start, tab.ncols):
        costs[j] = -ONE
    tab.set_costs(costs)
    tab.run(tab.ncols)
    if tab.z < 0:
        return LPResult("infeasible", certificate=tuple(tab.multipliers()))

    for i in range(tab.m):
        if tab.basis[i] >= tab.art_start:
            c = next((j for j in range(tab.art_start) if tab.T[i][j] != 0), None)
            if c is not None:
                tab.pivot(i, c)

    sgn = 1 if lp.sense == MAXIMIZE else -1
    costs = [ZERO] * tab.ncols
    for j, cj in enumerate(lp.objective):
        costs[j] = sgn * cj
        if not lp.nonneg:
            costs[lp.dim + j] = -sgn * cj
    tab.set_costs(costs)
    col = tab.run(tab.art_start)
    if col is not None:
        z = [ZERO] * tab.ncols
        z[col] = ONE
        for i, b in enumerate(tab.basis):
            z[b] -= tab.T[i][col]
        return LPResult("unbounded", ray=tab.structural_values(z))
    point = tab.structural_values(tab.basic_solution())
    duals = tuple(sgn * u for u in tab.multipliers())
    return LPResult("optimal", point=point, value=dot(lp.objective, point), duals=duals)


def check_result(lp: LinearProgram, res: LPResult) -> list[str]:
    """Substitution checks of every certificate in ``res``; returns problems found."""
    problems = []
    n = lp.dim
    n_eq = len(lp.eq_rows)
    rows = lp.rows

    def transpose_mul(y):
        return tuple(sum((y[i] * rows[i][0][j] for i in range(len(rows))), ZERO) for j in range(n))

    if res.optimal:
        x = res.point
        for a, b in lp.eq_rows:
            if dot(a, x) != b:
                problems.append("equality row violated")
        for a, b in lp.ineq_rows:
            if dot(a, x) > b:
                problems.append("inequality row violated")
        if lp.nonneg and any(v < 0 for v in x):
            problems.append("negative variable")
        y = res.duals
        aty = transpose_mul(y)
        for j in range(n):
            if lp.nonneg:
                bad = aty[j] < lp.objective[j] if lp.sense == MAXIMIZE else aty[j] > lp.objective[j]
            else:
                bad = aty[j] != lp.objective[j]
            if bad:
                problems.append("dual infeasible")
                break
        for i in range(n_eq, len(rows)):
            if (y[i] < 0) if lp.sense == MAXIMIZE else (y[i] > 0):
                problems.append("dual sign")
        if sum((y[i] * rows[i][1] for i in range(len(rows))), ZERO) != res.value:
            problems.append("duality gap")
    elif res.infeasible:
        y = res.certificate
        if any(y[i] < 0 for i in range(n_eq, len(rows))):
            problems.append("certificate sign")
        aty = transpose_mul(y)
        if any((v < 0) if lp.nonneg else (v != 0) for v in aty):
            problems.append("certificate combination")
        if sum((y[i] * rows[i][1] for i in range(len(rows))), ZERO) >= 0:
            problems.append("certificate not negative")
    else:
        r = res.ray
        if any(dot(a, r) != 0 for a, _ in lp.eq_rows) or any(dot(a, r) > 0 for a, _ in lp.ineq_rows):
            problems.append("ray leaves the feasible set")
        if lp.nonneg and any(v < 0 for v in r):
            problems.append("ray negative")
        gain = dot(lp.objective, r)
        if (gain <= 0) if lp.sense == MAXIMIZE else (gain >= 0):
            problems.append("ray does not improve")
    return problems


def strict_barycentric(x: Sequence, points: Sequence[Sequence]) -> Optional[Vector]:
    """Strictly positive weights q with sum 1 and sum q_j y_j = x, or None.

    Decides whether x lies in the relative interior of conv(points) by
    maximizing the smallest weight.
    """
    if not points:
        raise LPInputError("strict_barycentric needs at least one point")
    x = vec(x)
    pts = [vec(p) for p in points]
    d = len(x)
    if any(len(p) != d for p in pts):
        raise LPInputError("dimension mismatch")
    m = len(pts)
    # variables q_1..q_m, t (all >= 0); maximize t
    eq = [(tuple(p[k] for p in pts) + (ZERO,), x[k]) for k in range(d)]
    eq.append(((ONE,) * m + (ZERO,), ONE))
    ineq = []
    for j in range(m):
        a = [ZERO] * (m + 1)
        a[j] = -ONE
        a[m] = ONE
        ineq.append((tuple(a), ZERO))
    obj = (ZERO,) * m + (ONE,)
    res = solve_lp(LinearProgram(obj, tuple(eq), tuple(ineq), MAXIMIZE, nonneg=True))
    if not res.optimal or res.value <= 0:
        return None
    return res.point[:m]


def represent_in_hull(x: Sequence, vertices: Sequence[Sequence], rays: Sequence[Sequence] = ()):
    """Write x as sum(lam * v) + sum(mu * r) with lam, mu >= 0 and sum(lam) = 1.

    Returns ``(lam, mu)``. Raises :class:`NotInHull` (with a Farkas vector)
    when x is outside conv(vertices) + cone(rays).
    """
    x = vec(x)
    d = len(x)
    vs = [vec(v) for v in vertices]
    rs = [vec(r) for r in rays]
    if not vs and not rs:
        raise NotInHull("no generators")
    if any(len(g) != d for g in vs + rs):
        raise LPInputError("dimension mismatch")
    k, l = len(vs), len(rs)
    eq = [(tuple(v[i] for v in vs) + tuple(r[i] for r in rs), x[i]) for i in range(d)]
    eq.append(((ONE,) * k + (ZERO,) * l, ONE))
    res = solve_lp(LinearProgram((ZERO,) * (k + l), tuple(eq), (), MAXIMIZE, nonneg=True))
    if res.infeasible:
        raise NotInHull("point outside the generated set", res.certificate)
    return res.point[:k], res.point[k:]
