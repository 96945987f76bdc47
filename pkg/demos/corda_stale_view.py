"""An asynchronous robot acting on an outdated snapshot.

Under asynchronous semantics a robot Looks, then later Moves. Between the
two, other robots may move, so the Move is computed from a stale view. The
five-robot protocol is designed so that these stale moves are harmless; the
second half of the script shows a naive four-robot rule where they are not.
"""
from _draw import draw

from ring_explorer import RingConfig
from ring_explorer.protocol_five import PROTOCOL as FIVE
from ring_explorer.scheduler import ExecutionState, Look, Move, step_corda
from ring_explorer.strawman import TowardDistanceTwo

state = ExecutionState.initial(RingConfig.from_positions(11, [0, 2, 4, 6, 8]))
print("five robots, n=11          ", draw(state))
state = step_corda(state, Look(0), FIVE)
print("robot 0 looks, plans", sorted(d.name for d in state.robot(0).pending))
state = step_corda(state, Look(4), FIVE)
state = step_corda(state, Move(4), FIVE)
print("robot 4 looks and moves    ", draw(state))
state = step_corda(state, Move(0), FIVE)
print("robot 0 moves on old view  ", draw(state), " towers:", state.config.towers)

print()
naive = TowardDistanceTwo()
state = ExecutionState.initial(RingConfig.from_positions(9, [0, 2, 5, 6]))
print("naive rule, n=9            ", draw(state))
state = step_corda(state, Look(0), naive)
state = step_corda(state, Look(1), naive)
state = step_corda(state, Move(1), naive)
print("robot 1 moves to node 1    ", draw(state))
state = step_corda(state, Move(0), naive)
print("robot 0 follows, stale     ", draw(state), " towers:", state.config.towers)
