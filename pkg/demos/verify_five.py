"""Exhaustive check of the five-robot protocol over every starting configuration.

For each ring size the checker enumerates all tower-free placements up to
rotation and reflection, explores every schedule the adversary could pick and
reports whether all of them explore the ring and stop.
"""
from ring_explorer import Semantics, verify
from ring_explorer.protocol_five import PROTOCOL

for semantics in (Semantics.ATOM, Semantics.CORDA):
    print(f"-- {semantics.value} --")
    for n in (6, 7, 8, 9, 11, 12, 13):
        r = verify(PROTOCOL, n, semantics)
        print(f"n={n:2d} {r.verdict.value:20s} initials={r.initial_config_count:4d} "
              f"states={r.states_explored:6d} worst-case moves={r.max_total_moves}")

print()
print("A ring whose size is a multiple of five is outside the protocol's domain.")
r = verify(PROTOCOL, 10, expect_failure=True)
print(f"n=10 forced: {r.verdict.value} ({r.counterexample_kind})")
