import json
import random

import pytest

from oracles import bracelet_count, brute_bracelets
from ring_explorer.checker import (
    Encoding,
    PhaseBudget,
    Verdict,
    enumerate_initials,
    explore,
    find_counterexample,
    find_cycle,
    merge_reports,
    scripted_impossibility_witnesses,
    successors,
    verify,
)
from ring_explorer.exceptions import BoundExceeded, ProtocolPreconditionViolation
from ring_explorer.protocol_five import PROTOCOL as FIVE
from ring_explorer.protocol_four_odd import PROTOCOL as FOUR
from ring_explorer.registry import get_protocol
from ring_explorer.ring_core import RingConfig, isometries
from ring_explorer.scheduler import Semantics, Strategy, run
from ring_explorer.strawman import AwayFromDistanceTwo, BackAndForth, TowardDistanceTwo


# -- initial configurations ----------------------------------------------------------


def test_enumerate_initials_examples():
    assert len(enumerate_initials(5, 5)) == 1
    assert len(enumerate_initials(6, 4)) == 3
    assert len(enumerate_initials(11, 5)) == bracelet_count(11, 5)


@pytest.mark.parametrize("n", range(4, 15))
def test_enumerate_initials_matches_burnside(n):
    for k in (4, 5):
        if k <= n:
            assert len(enumerate_initials(n, k)) == bracelet_count(n, k)


def test_burnside_oracle_agrees_with_brute_force():
    for n in range(3, 11):
        for k in range(n + 1):
            assert bracelet_count(n, k) == brute_bracelets(n, k)


def test_enumerate_initials_rejects_overfull():
    with pytest.raises(ValueError):
        enumerate_initials(4, 5)


# -- budgets --------------------------------------------------------------------------------


def test_budget_formulas():
    b = PhaseBudget.for_d(11, 1)
    assert (b.eq1, b.eq2, b.eq3, b.eq4, b.eq5) == (3, 5, 7, 6, 0)
    assert b.tower_chain_budget == 6
    assert PhaseBudget.for_d(20, 3).eq5 == 14
    # the first budget simplifies to floor((n - 3d) / 2) - d
    for n in range(6, 40):
        for d in range(1, n // 5 + 1):
            assert PhaseBudget.for_d(n, d).eq1 == (n - 3 * d) // 2 - d


# -- state encoding ---------------------------------------------------------------------------


@pytest.mark.parametrize("semantics", [Semantics.ATOM, Semantics.CORDA])
def test_canonicalisation_preserves_successor_sets(semantics):
    """States merged by canonicalisation have isomorphic successor sets."""
    rng = random.Random(1)
    n = 11
    enc = Encoding(n, semantics)
    g = explore(FIVE, n, semantics)
    for sid in rng.sample(range(len(g)), 40):
        cells = g.states[sid]
        canon_succ = {(enc.canonical(c), m) for c, m in successors(FIVE, enc, cells)}
        src, refl = rng.choice(isometries(n))
        moved = tuple(cells[j] for j in src)
        if refl and enc.corda:
            mirror = (0, 2, 1, 3)
            moved = tuple((v, tuple(sorted(mirror[x] for x in st))) for v, st in moved)
        assert enc.canonical(moved) == cells
        moved_succ = {(enc.canonical(c), m) for c, m in successors(FIVE, enc, moved)}
        assert moved_succ == canon_succ


# -- verification ------------------------------------------------------------------------------


@pytest.mark.parametrize("n", [6, 7, 8, 9, 11])
def test_five_atom_verified(n):
    r = verify(FIVE, n, Semantics.ATOM)
    assert r.verdict is Verdict.VERIFIED
    assert r.per_phase_max_moves["TowerChain"] == n - 5
    assert set(r.terminal_patterns) <= {"is_tower_chain", "is_tower_chain+tower_sole"}


@pytest.mark.parametrize("n", [6, 7, 8, 9])
def test_five_corda_verified(n):
    assert verify(FIVE, n, Semantics.CORDA).verified


def test_verify_respects_preconditions():
    with pytest.raises(ProtocolPreconditionViolation):
        verify(FIVE, 10)
    with pytest.raises(ProtocolPreconditionViolation):
        verify(FOUR, 9, Semantics.CORDA)


def test_negative_control_has_witness_that_replays():
    r = verify(FIVE, 10, expect_failure=True)
    assert r.verdict is Verdict.COUNTEREXAMPLE and r.counterexample_kind == "bad-sink"
    t = r.counterexample
    final = t.replay(FIVE)
    assert not final.explored and FIVE.is_terminal(final.config)


def test_spot_consistency_with_simulator():
    """Random fair schedules stay within the checker's measured maximum."""
    n = 11
    r = verify(FIVE, n, Semantics.ATOM)
    rng = random.Random(0)
    for i in range(200):
        c = RingConfig.from_positions(n, rng.sample(range(n), 5))
        t = run(FIVE, c, Strategy.RANDOM, seed=i)
        assert t.explored and t.terminated
        assert t.move_count <= r.max_total_moves
        assert len(t.events) <= r.max_depth


def test_state_cap_gives_bound_exceeded():
    r = verify(FIVE, 13, Semantics.CORDA, state_cap=50)
    assert r.verdict is Verdict.BOUND_EXCEEDED


def test_depth_bound_gives_bound_exceeded():
    r = verify(FIVE, 11, depth_bound=3)
    assert r.verdict is Verdict.BOUND_EXCEEDED


def test_parallel_matches_serial():
    serial = verify(FIVE, 11)
    par = verify(FIVE, 11, jobs=2)
    assert par.verdict == serial.verdict
    assert par.max_total_moves == serial.max_total_moves
    assert par.per_phase_max_moves == serial.per_phase_max_moves
    assert par.initial_config_count == serial.initial_config_count


def test_merge_is_associative_on_verdicts():
    inits = enumerate_initials(11, 5)
    parts = [verify(FIVE, 11, initials=inits[i::3]) for i in range(3)]
    a = merge_reports([merge_reports(parts[:2]), parts[2]])
    b = merge_reports([parts[0], merge_reports(parts[1:])])
    assert a.to_json() == b.to_json()


def test_report_json_is_stable():
    r = verify(FIVE, 9)
    text = json.dumps(r.to_json(), sort_keys=True)
    assert text == json.dumps(verify(FIVE, 9).to_json(), sort_keys=True)
    assert r.to_json()["schema_version"] == 1


@pytest.mark.parametrize("n", [9, 11])
def test_four_odd_verified(n):
    r = verify(FOUR, n)
    assert r.verified
    assert set(r.terminal_patterns) <= {"tower_block", "tower_sole"}


# -- cycles and witnesses ---------------------------------------------------------------------------


def test_cycle_detection_finds_swap_self_loop():
    g = explore(AwayFromDistanceTwo(), 10, initials=[RingConfig.from_positions(10, [3, 4, 8, 9])])
    cycle, _ = find_cycle(g)
    assert cycle is not None and cycle[0] == cycle[-1]


def test_lasso_witness_replays_to_cycle_start():
    r = verify(BackAndForth(), 8, expect_failure=True)
    assert r.counterexample_kind in ("livelock", "bad-sink")
    cx = find_counterexample(BackAndForth(), 8, kinds=("livelock",))
    states = cx.trace.states(BackAndForth())
    stem = cx.stem_length
    enc = Encoding(8, Semantics.ATOM)
    assert enc.canonical(enc.from_execution(states[stem])) == enc.canonical(enc.from_execution(states[-1]))
    assert cx.cycle_length == len(states) - 1 - stem


@pytest.mark.parametrize("proto", [TowardDistanceTwo(), AwayFromDistanceTwo()])
@pytest.mark.parametrize("n", [8, 12])
def test_strawmen_have_counterexamples(proto, n):
    cx = find_counterexample(proto, n, state_cap=10**6)
    assert cx is not None and cx.kind in ("livelock", "bad-sink")
    live = find_counterexample(proto, n, kinds=("livelock",), state_cap=10**6)
    assert live is not None and live.cycle_length >= 1


def test_five_has_no_counterexample():
    assert find_counterexample(FIVE, 11) is None


def test_counterexample_search_bound():
    with pytest.raises(BoundExceeded):
        find_counterexample(FIVE, 13, semantics=Semantics.CORDA, state_cap=20)


def test_scripted_witnesses():
    w = dict(scripted_impossibility_witnesses())
    assert set(w) == {"tower-merge", "back-and-forth", "position-exchange"}
    merge = w["tower-merge"]
    assert merge.header["k_divides_n"] and len(merge.final.config.towers) == 2
    back = w["back-and-forth"]
    states = back.states(BackAndForth())
    assert states[2].config == states[0].config and states[1].config != states[0].config
    swap = w["position-exchange"]
    states = swap.states(AwayFromDistanceTwo())
    assert states[1].config == RingConfig.from_positions(10, [3, 4, 8, 9])
    assert states[1].config == states[2].config == states[3].config
    assert states[1].robot(0).position != states[2].robot(0).position


def test_registry_round_trip():
    for name in ("five-atom", "five-corda", "four-odd-atom", "demo-4robot-naive"):
        assert get_protocol(name) is get_protocol(get_protocol(name).name)
    with pytest.raises(KeyError):
        get_protocol("nope")
