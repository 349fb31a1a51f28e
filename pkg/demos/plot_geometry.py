"""
Exact polyhedral operations
===========================

The geometry kernel behind the recursion: conversions between generators
and inequalities, relative interiors, intersections and dual cones.
"""
# %%
from fractions import Fraction

from martsel.polyhedra import (
    FGSet,
    canonicalize,
    contains,
    dual_cone,
    ri_intersection_closure,
    ri_point,
    v_to_h,
)


def show(v):
    return "(" + ", ".join(str(c) for c in v) + ")"


# %%
# Generators to inequalities
# --------------------------
# A square with a redundant midpoint. Canonical form drops it.
square = FGSet(2, ((0, 0), (1, 0), (0, 1), (1, 1), (Fraction(1, 2), 0)))
print([show(v) for v in canonicalize(square).vertices])
for a, b in v_to_h(square).inequalities:
    print(show(a), ". x <=", b)

# %%
# Relative interiors
# ------------------
# A segment in the plane has empty interior but a nonempty relative interior.
diag = FGSet(2, ((0, 0), (2, 2)))
p = ri_point(diag)
print(show(p), contains(diag, p, "ri"), contains(diag, (0, 0), "ri"))

# %%
# Two segments that only touch at an endpoint share no relative interior.
a = FGSet(1, ((0,), (1,)))
b = FGSet(1, ((1,), (2,)))
c = FGSet(1, ((Fraction(1, 2),), (3,)))
print(ri_intersection_closure(a, b))
print([show(v) for v in ri_intersection_closure(a, c).vertices])

# %%
# Dual cones
# ----------
K = FGSet(2, ((0, 0),), ((1, 0), (1, 1)))
print([show(r) for r in dual_cone(K).rays])
assert dual_cone(dual_cone(K)) == canonicalize(K)
