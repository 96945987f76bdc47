"""Five robots explore a ring of 13 nodes under the fully synchronous scheduler.

Each line shows the ring after one round. Digits are robot counts, '.' marks a
visited empty node and '_' a node nobody has reached yet. Watch the robots
gather into a block, build a tower and then spread out as a chain that
sweeps the remaining gap.
"""
from _draw import draw

from ring_explorer import RingConfig, Strategy, run
from ring_explorer.protocol_five import PROTOCOL, phase_of

start = RingConfig.from_positions(13, [0, 3, 6, 8, 10])
trace = run(PROTOCOL, start, Strategy.SYNCHRONOUS)

for i, state in enumerate(trace.states(PROTOCOL)):
    print(f"round {i:2d}  {draw(state)}  phase={phase_of(state.config).value}")

print()
print(f"explored={trace.explored} terminated={trace.terminated} moves={trace.move_count}")
print("moves per phase:", trace.phase_moves)
