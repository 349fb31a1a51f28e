"""
No-arbitrage and consistent prices
==================================

Two applications. A single-valued price process is free of arbitrage
exactly when the selection problem on singletons is solvable. A cone model
admits a strictly consistent price system exactly when the problem on the
dual cones is solvable.
"""
# %%
from martsel.finance import (
    arbitrage_oracle,
    check_na_single,
    consistent_price_system,
    parse_cone_model,
    parse_price_process,
)
from martsel.generate import generate_text

# %%
# Price processes
# ---------------
# Each verdict is decided twice: once by the recursion and once by an LP
# that searches for a strategy with nonnegative gains and positive total.
for seed in range(6):
    p = parse_price_process(generate_text(seed, "single-valued"))
    na = check_na_single(p)
    orc = arbitrage_oracle(p)
    print(seed, "no arbitrage" if na.no_arbitrage else "arbitrage", orc.arbitrage)

# %%
# Cone models
# -----------
# Generated bid/ask cones with spreads shrinking over time.
for seed in range(6):
    res = consistent_price_system(parse_cone_model(generate_text(seed, "cones")))
    print(seed, res.state.verdict)
    if res.solvable:
        root = res.instance.tree.root
        print("   Z at root:", [str(c) for c in res.solution.x[root]])
