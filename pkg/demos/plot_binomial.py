"""
A one-period binomial model
===========================

Solve a martingale selection problem by hand-checkable numbers: a root
with value 1 and two equally likely children valued 2 and 1/2.
"""
# %%
# Build the instance
# ------------------
# Instances are plain JSON. Rationals are strings, so nothing is ever rounded.
import json
from fractions import Fraction

from martsel.msp import assemble_measure, solve, verify_solution
from martsel.tree import parse_instance

doc = {
    "dim": 1,
    "horizon": 1,
    "nodes": [
        {"id": "r", "time": 0, "parent": None, "prob": "1"},
        {"id": "u", "time": 1, "parent": "r", "prob": "1/2"},
        {"id": "d", "time": 1, "parent": "r", "prob": "1/2"},
    ],
    "sets": {
        "r": {"vertices": [["1"]], "rays": []},
        "u": {"vertices": [["2"]], "rays": []},
        "d": {"vertices": [["1/2"]], "rays": []},
    },
}
inst = parse_instance(json.dumps(doc))

# %%
# Backward and forward passes
# ---------------------------
# ``solve`` runs the backward W-recursion and, when every W is nonempty,
# builds the martingale and the one-step weights.
state, sol = solve(inst)
print(state.verdict)
print({f"{u}->{v}": str(q) for (u, v), q in sol.q.items()})

# %%
# The weights solve 2q + (1 - q)/2 = 1, so q = 1/3 on the up move.
assert sol.q[("r", "u")] == Fraction(1, 3)
assert verify_solution(inst, sol) == []

# %%
# Density of the new measure
# --------------------------
m = assemble_measure(inst, sol)
print("Q:", {u: str(v) for u, v in m.Q.items()})
print("z:", {u: str(v) for u, v in m.z.items()})
print("E_P[z] =", m.expected_density)

# %%
# Moving the down value to 3 leaves 1 outside (2, 3): no martingale exists
# and the failing node is the root.
doc["sets"]["d"] = {"vertices": [["3"]], "rays": []}
state, _ = solve(parse_instance(json.dumps(doc)))
print(state.verdict, "at", state.failing_node)
