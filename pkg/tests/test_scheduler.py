import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ring_explorer.exceptions import ProtocolPreconditionViolation, RingExplorerError, SchedulerError
from ring_explorer.protocol import IDLE
from ring_explorer.protocol_five import PROTOCOL as FIVE
from ring_explorer.protocol_four_odd import PROTOCOL as FOUR
from ring_explorer.ring_core import Direction, RingConfig, classify
from ring_explorer.scheduler import (
    AtomStep,
    ExecutionState,
    Look,
    Move,
    Semantics,
    Strategy,
    apply_event,
    events_from_records,
    read_jsonl,
    resolve_atom,
    run,
    step_atom,
    step_corda,
)
from ring_explorer.strawman import TowardDistanceTwo

H, L = Direction.HIGHER, Direction.LOWER


def at(n, *pos):
    return RingConfig.from_positions(n, pos)


def lower(state, rid, decision):
    return L


def test_atom_tower_step():
    state = ExecutionState.initial(at(11, 0, 1, 2, 3, 4))
    new = step_atom(state, [r.id for r in state.robots], FIVE, resolver=lower)
    assert list(new.config.occupancy) == [1, 2, 0, 1, 1, 0, 0, 0, 0, 0, 0]
    assert new.step == 1


def test_atom_two_towers_from_distance_two_rule():
    proto = TowardDistanceTwo()
    state = ExecutionState.initial(at(8, 0, 2, 4, 6))
    step = AtomStep((0, 1, 2, 3), ((0, H), (1, L), (2, H), (3, L)))
    new = apply_event(state, step, proto)
    assert new.config.towers == [1, 5]


def test_idle_activation_is_noop():
    state = ExecutionState.initial(at(11, 0, 1, 2, 3, 4))
    new = step_atom(state, [0, 4], FIVE)
    assert new.config == state.config and new.step == 1


def test_atom_step_rejects_unknown_robot_and_empty_set():
    state = ExecutionState.initial(at(11, 0, 1, 2, 3, 4))
    with pytest.raises(SchedulerError):
        step_atom(state, [9], FIVE)
    with pytest.raises(SchedulerError):
        step_atom(state, [], FIVE)


def test_adjacent_robots_swap():
    # both robots at 0 and 1 step onto each other's node: positions exchange, occupancy unchanged
    state = ExecutionState.initial(at(6, 0, 1))
    new = apply_event(state, AtomStep((0, 1), ((0, H), (1, L))), FIVE)
    assert new.config == state.config
    assert new.robot(0).position == 1 and new.robot(1).position == 0


def test_corda_stale_move():
    c = at(11, 0, 2, 4, 6, 8)  # borders 0 and 8 both want to move inward
    state = ExecutionState.initial(c)
    s1 = step_corda(state, Look(0), FIVE)
    assert s1.robot(0).pending == frozenset({H})
    s2 = step_corda(s1, Look(4), FIVE)  # robot 4 at node 8
    s3 = step_corda(s2, Move(4), FIVE)
    assert s3.robot(4).position == 7
    # the configuration changed, robot 0 still moves on its old decision
    s4 = step_corda(s3, Move(0), FIVE)
    assert s4.robot(0).position == 1
    assert len(s4.visited) == 7


def test_corda_idle_look_and_status_errors():
    state = ExecutionState.initial(at(11, 0, 2, 4, 6, 8))
    s1 = step_corda(state, Look(2), FIVE)  # middle robot idles
    assert s1.robot(2).is_ready and s1.config == state.config
    with pytest.raises(SchedulerError):
        step_corda(s1, Move(2), FIVE)
    s2 = step_corda(s1, Look(0), FIVE)
    with pytest.raises(SchedulerError):
        step_corda(s2, Look(0), FIVE)
    with pytest.raises(SchedulerError):
        step_corda(s2, AtomStep((0,)), FIVE)


def test_corda_pending_move_onto_node_occupied_meanwhile():
    proto = TowardDistanceTwo()
    state = ExecutionState.initial(at(9, 0, 2, 5, 6))
    s = step_corda(state, Look(0), proto)  # robot at 0 heads for 1
    s = step_corda(s, Look(1), proto)  # robot at 2 heads for 1 too
    s = step_corda(s, Move(1), proto)
    assert s.config.occupancy[1] == 1
    s = step_corda(s, Move(0), proto)
    assert s.config.towers == [1]


def test_five_robot_stale_moves_never_form_towers():
    """Only the Tower module creates a tower, even with outdated views."""
    from ring_explorer.checker import explore

    for n in (7, 8, 9):
        g = explore(FIVE, n, Semantics.CORDA)
        for s in range(len(g)):
            if g.phase[s] == "Tower":
                continue
            for t, moved in g.succ[s]:
                if moved:
                    assert len(g.config(t).towers) <= len(g.config(s).towers)


def _random_state(rng, n):
    pos = rng.sample(range(n), 5)
    return ExecutionState.initial(RingConfig.from_positions(n, pos))


def test_atom_singleton_equals_look_then_move():
    rng = random.Random(3)
    checked = 0
    while checked < 200:
        n = rng.choice([7, 8, 9, 11, 12, 13])
        state = _random_state(rng, n)
        try:
            decisions = FIVE.decisions(state.config)
        except RingExplorerError:
            continue
        for r in state.robots:
            dec = decisions.get(r.position, IDLE)
            dirs = sorted(dec.directions, key=lambda d: d.value) or [None]
            for d in dirs:
                atom = apply_event(state, AtomStep((r.id,), ((r.id, d),) if d else ()), FIVE)
                corda = step_corda(state, Look(r.id), FIVE)
                if d is not None:
                    corda = step_corda(corda, Move(r.id, r.position, d.step(r.position, n)), FIVE)
                assert atom.config == corda.config and atom.visited == corda.visited
        checked += 1


def test_run_five_synchronous_explores():
    for seed in range(20):
        c = RingConfig.from_positions(11, random.Random(seed).sample(range(11), 5))
        t = run(FIVE, c, Strategy.SYNCHRONOUS)
        assert t.explored and t.terminated and t.error is None
        assert classify(t.final.config).is_tower_chain


def test_run_four_odd_terminal_pattern():
    for seed in range(20):
        c = RingConfig.from_positions(9, random.Random(seed).sample(range(9), 4))
        t = run(FOUR, c, Strategy.SYNCHRONOUS)
        rep = classify(t.final.config)
        assert t.explored and t.terminated
        assert rep.tower_block or rep.tower_sole


def test_run_preconditions():
    with pytest.raises(ProtocolPreconditionViolation):
        run(FIVE, at(10, 0, 1, 2, 3, 4))
    with pytest.raises(ProtocolPreconditionViolation):
        run(FIVE, at(11, 0, 1, 2, 3))
    with pytest.raises(ProtocolPreconditionViolation):
        run(FOUR, at(9, 0, 1, 2, 5), semantics=Semantics.CORDA)
    with pytest.raises(ValueError):
        run(FIVE, at(11, 0, 1, 2, 3, 4), max_steps=0)


def test_max_steps_is_reported_not_raised():
    t = run(FIVE, at(13, 0, 3, 6, 8, 10), Strategy.ROUND_ROBIN, max_steps=3)
    assert t.max_steps_exceeded and not t.terminated
    assert len(t.events) == 3


@pytest.mark.parametrize("semantics", ["atom", "corda"])
def test_seeded_runs_are_identical(semantics):
    c = at(13, 0, 3, 6, 8, 10)
    a = run(FIVE, c, Strategy.RANDOM, semantics, seed=7)
    b = run(FIVE, c, Strategy.RANDOM, semantics, seed=7)
    assert a.to_jsonl(FIVE) == b.to_jsonl(FIVE)


@pytest.mark.parametrize("strategy", ["synchronous", "round_robin", "random"])
@pytest.mark.parametrize("semantics", ["atom", "corda"])
def test_jsonl_round_trip_replays(strategy, semantics):
    c = at(13, 0, 3, 6, 8, 10)
    t = run(FIVE, c, strategy, semantics, seed=11)
    records = read_jsonl(t.to_jsonl(FIVE))
    head = records[0]
    assert {"n", "k", "protocol", "semantics", "strategy", "seed"} <= set(head)
    for rec in records[1:-1]:
        assert {"step", "kind", "robot", "from", "to", "occupancy_after", "visited_count"} <= set(rec)
    initial, events = events_from_records(records)
    state = initial
    for ev in events:
        state = apply_event(state, ev, FIVE)
    assert state.config == t.final.config
    assert state.visited == t.final.visited
    assert records[-1]["moves"] == t.move_count


def test_replay_reproduces_every_intermediate_state():
    t = run(FIVE, at(12, 0, 3, 5, 8, 10), Strategy.RANDOM, Semantics.CORDA, seed=5)
    states = t.states(FIVE)
    assert states[-1] == t.final
    for a, b in zip(states, states[1:]):
        assert a.visited <= b.visited


@settings(max_examples=50, deadline=None)
@given(st.permutations(range(5)), st.integers(0, 1000))
def test_robot_ids_are_anonymous(perm, seed):
    """Relabelling robots leaves the sequence of configurations unchanged."""
    c = at(11, 0, 2, 5, 7, 8)
    base = ExecutionState.initial(c)
    relabelled = ExecutionState(base.n, tuple(
        type(r)(perm[r.id], r.position) for r in base.robots), base.visited)
    rng1, rng2 = random.Random(seed), random.Random(seed)
    s1, s2 = base, relabelled
    for _ in range(30):
        if FIVE.is_terminal(s1.config):
            break
        pick = sorted(FIVE.decisions(s1.config))
        node = rng1.choice(pick)
        rng2.choice(pick)
        r1 = next(r.id for r in s1.robots if r.position == node)
        r2 = next(r.id for r in s2.robots if r.position == node)
        s1 = step_atom(s1, [r1], FIVE)
        s2 = step_atom(s2, [r2], FIVE)
        assert s1.config == s2.config and s1.visited == s2.visited


def test_resolve_atom_records_choices():
    state = ExecutionState.initial(at(11, 0, 1, 2, 3, 4))
    ev = resolve_atom(state, [2], FIVE)
    assert ev.moves == ((2, H),)
    json.dumps([d.name for _, d in ev.moves])
