"""Why five robots are needed: hand-built failure scenarios and automatic search.

Three scripted schedules show how simple four-robot rules go wrong. Then the
checker searches the state space of two such rules and returns the shortest
lasso (a stem followed by a repeating cycle) it can find.
"""
from ring_explorer import find_counterexample, scripted_impossibility_witnesses
from ring_explorer.strawman import AwayFromDistanceTwo, TowardDistanceTwo

CAPTIONS = {
    "tower-merge": "synchronous moves toward the nearest neighbour build two towers at once",
    "back-and-forth": "robots that step out and back return to the same configuration forever",
    "position-exchange": "adjacent robots that both step away swap places and nothing changes",
}

for name, trace in scripted_impossibility_witnesses():
    print(f"{name}: {CAPTIONS[name]}")
    print(f"   start {trace.initial.config}  ->  end {trace.final.config}")

print()
for proto in (TowardDistanceTwo(), AwayFromDistanceTwo()):
    for n in (8, 12):
        cx = find_counterexample(proto, n, kinds=("livelock",))
        print(f"{proto.name} n={n}: livelock after {cx.stem_length} steps, cycle of {cx.cycle_length}")
        print(f"   {cx.reason}")
