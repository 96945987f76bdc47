"""Four robots on odd rings: exploration ends at a tower with a block or a lone explorer pair.

Unlike the five-robot case, four robots cannot always break symmetry, so two
terminal shapes are possible. In the symmetric one ('tower_sole') both
explorers stop exactly half a ring away from the tower.
"""
from collections import Counter

from ring_explorer import RingConfig, Strategy, classify, run, verify
from ring_explorer.protocol_four_odd import PROTOCOL

for n in (9, 11, 13):
    r = verify(PROTOCOL, n)
    print(f"n={n}: {r.verdict.value}, terminal shapes {dict(r.terminal_patterns)}")

print()
shapes = Counter()
for n in (9, 11, 13, 15):
    for pos in ([0, 1, 3, 4], [0, 2, 5, 7], [0, 1, 2, 5]):
        t = run(PROTOCOL, RingConfig.from_positions(n, pos), Strategy.SYNCHRONOUS)
        rep = classify(t.final.config)
        shape = "tower_sole" if rep.tower_sole else "tower_block"
        shapes[shape] += 1
        print(f"n={n:2d} start={pos} -> {t.final.config} ({shape}, {t.move_count} moves)")
print(shapes)
