"""Measured worst-case move counts against the analytic per-phase budgets.

For each ring size the checker computes the longest path (in moves) through
each phase of the five-robot protocol and compares it to the budget for the
block size d that was current when the phase started. The last lines fit a
line through the totals: the protocol uses a linear number of moves.
"""
from ring_explorer import measure_bounds
from ring_explorer.checker import linear_fit

sizes = [6, 7, 8, 9, 11, 12, 13, 14, 16]
totals = []
for n in sizes:
    b = measure_bounds(n)
    totals.append(b.max_total_moves)
    worst = [c for c in b.comparisons if c.reached]
    tight = sum(c.measured == c.budget for c in worst)
    print(f"n={n:2d} total={b.max_total_moves:3d} rows={len(worst):2d} tight={tight:2d} "
          f"tower-chain={b.tower_chain_max} (n-5={n - 5}) all-within-budget={b.satisfied}")

slope, intercept = linear_fit(sizes, totals)
print()
print(f"least-squares fit: moves ~ {slope:.3f} n {intercept:+.2f}")
print(f"max moves/n = {max(t / n for t, n in zip(totals, sizes)):.3f}")
