"""Explicit-state verification of ring exploration protocols.

The transition graph is built breadth-first from every initial configuration
up to ring isometry.  ATOM edges branch over every non-empty set of moving
robots and every resolution of a two-direction decision; CORDA edges are single
Look or Move events.  States are (configuration, pending statuses, visited
set), canonicalised jointly under the 2n ring isometries.

Termination is checked in its strong form: the graph of state-changing
transitions must be acyclic.  A transition that moves robots but returns to the
same state (two neighbours swapping places) is a self-loop and counts as a
cycle.  Safety is checked at the sinks.
"""
from __future__ import annotations

import enum
import json
import os
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations, combinations_with_replacement, product
from math import gcd

from .exceptions import BoundExceeded, ProtocolAmbiguity, ProtocolPreconditionViolation
from .protocol import Protocol
from .ring_core import BOTH, Direction, RingConfig, canonical_form, classify, isometries
from .scheduler import AtomStep, ExecutionState, Look, Move, Semantics, Trace, apply_event

_PROTOCOL_ERRORS = (ProtocolAmbiguity, ProtocolPreconditionViolation)

READY, PEND_LOW, PEND_HIGH, PEND_BOTH = 0, 1, 2, 3
_CODE = {
    frozenset({Direction.LOWER}): PEND_LOW,
    frozenset({Direction.HIGHER}): PEND_HIGH,
    BOTH: PEND_BOTH,
}
_CODE_DIRS = {
    PEND_LOW: (Direction.LOWER,),
    PEND_HIGH: (Direction.HIGHER,),
    PEND_BOTH: (Direction.LOWER, Direction.HIGHER),
}
_MIRROR_CODE = (READY, PEND_HIGH, PEND_LOW, PEND_BOTH)


class Verdict(enum.Enum):
    VERIFIED = "Verified"
    COUNTEREXAMPLE = "CounterexampleFound"
    BOUND_EXCEEDED = "BoundExceeded"


# -- initial configurations ------------------------------------------------------------


def enumerate_initials(n: int, k: int, towerless: bool = True) -> list[RingConfig]:
    """Initial configurations up to ring isometry, sorted by canonical occupancy."""
    if k > n and towerless:
        raise ValueError(f"cannot place {k} robots on distinct nodes of a {n}-ring")
    seen = set()
    if towerless:
        placements = combinations(range(n), k)
    else:
        placements = combinations_with_replacement(range(n), k)
    for pos in placements:
        seen.add(canonical_form(RingConfig.from_positions(n, pos)).occupancy)
    return [RingConfig(occ) for occ in sorted(seen)]


# -- state encoding --------------------------------------------------------------------
#
# ATOM cell: 2 * multiplicity + visited bit.
# CORDA cell: (visited bit, sorted tuple of robot status codes).


class Encoding:
    def __init__(self, n: int, semantics: Semantics):
        self.n = n
        self.semantics = semantics
        self.corda = semantics is Semantics.CORDA
        self.isos = isometries(n)

    def initial(self, config: RingConfig):
        if self.corda:
            return tuple((1 if c else 0, (READY,) * c) for c in config.occupancy)
        return tuple(2 * c + (1 if c else 0) for c in config.occupancy)

    def canonical(self, cells):
        best = None
        if self.corda:
            for src, refl in self.isos:
                if refl:
                    t = tuple(
                        (cells[j][0], tuple(sorted(_MIRROR_CODE[s] for s in cells[j][1])))
                        for j in src
                    )
                else:
                    t = tuple(cells[j] for j in src)
                if best is None or t < best:
                    best = t
        else:
            for src, _ in self.isos:
                t = tuple(cells[j] for j in src)
                if best is None or t < best:
                    best = t
        return best

    def occupancy(self, cells) -> tuple[int, ...]:
        if self.corda:
            return tuple(len(c[1]) for c in cells)
        return tuple(c >> 1 for c in cells)

    def explored(self, cells) -> bool:
        if self.corda:
            return all(c[0] for c in cells)
        return all(c & 1 for c in cells)

    def visited_count(self, cells) -> int:
        if self.corda:
            return sum(c[0] for c in cells)
        return sum(c & 1 for c in cells)

    def any_pending(self, cells) -> bool:
        return self.corda and any(s != READY for c in cells for s in c[1])

    def from_execution(self, state: ExecutionState):
        n = self.n
        vis = [1 if i in state.visited else 0 for i in range(n)]
        if self.corda:
            st = [[] for _ in range(n)]
            for r in state.robots:
                st[r.position].append(READY if r.pending is None else _CODE[r.pending])
            return tuple((vis[i], tuple(sorted(st[i]))) for i in range(n))
        occ = [0] * n
        for r in state.robots:
            occ[r.position] += 1
        return tuple(2 * occ[i] + vis[i] for i in range(n))


def successors(protocol: Protocol, enc: Encoding, cells) -> list[tuple[tuple, int]]:
    """Distinct ``(successor cells, moves)`` pairs of one state.

    Only state-changing transitions are produced: Looks that compute Idle and
    ATOM steps where nobody moves are omitted.  Protocol errors propagate.
    """
    n = enc.n
    occ = enc.occupancy(cells)
    out = set()
    if not enc.corda:
        decs = protocol.decisions(RingConfig(occ))
        if not decs:
            return []
        nodes = sorted(decs)
        choices = []
        for u in nodes:
            opts = [None] + sorted(decs[u].directions, key=lambda d: d.value)
            choices.append(list(combinations_with_replacement(opts, occ[u])))
        for combo in product(*choices):
            new = list(occ)
            vis = [c & 1 for c in cells]
            moved = 0
            for u, choice in zip(nodes, combo):
                for direction in choice:
                    if direction is None:
                        continue
                    v = (u + direction.value) % n
                    new[u] -= 1
                    new[v] += 1
                    vis[v] = 1
                    moved += 1
            if moved:
                out.add((tuple(2 * new[i] + vis[i] for i in range(n)), moved))
        return list(out)

    decs = None
    if any(READY in c[1] for c in cells):
        decs = protocol.decisions(RingConfig(occ))
    for u in range(n):
        vis_u, st = cells[u]
        for s in set(st):
            rest = list(st)
            rest.remove(s)
            if s == READY:
                dec = decs.get(u)
                if dec is None:
                    continue
                new = list(cells)
                new[u] = (vis_u, tuple(sorted(rest + [_CODE[dec.directions]])))
                out.add((tuple(new), 0))
            else:
                for direction in _CODE_DIRS[s]:
                    v = (u + direction.value) % n
                    new = list(cells)
                    new[u] = (vis_u, tuple(rest))
                    new[v] = (1, tuple(sorted(new[v][1] + (READY,))))
                    out.add((tuple(new), 1))
    return list(out)


# -- state graph ---------------------------------------------------------------------


@dataclass
class StateGraph:
    protocol: Protocol
    n: int
    semantics: Semantics
    enc: Encoding
    states: list = field(default_factory=list)
    index: dict = field(default_factory=dict)
    succ: list = field(default_factory=list)
    parent: list = field(default_factory=list)
    depth: list = field(default_factory=list)
    phase: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)
    initial: list = field(default_factory=list)
    truncated: bool = False
    # states never expanded because the state cap was hit
    frontier: set = field(default_factory=set)

    def __len__(self):
        return len(self.states)

    def config(self, sid: int) -> RingConfig:
        return RingConfig(self.enc.occupancy(self.states[sid]))

    def sinks(self) -> list[int]:
        return [s for s in range(len(self.states)) if not self.succ[s]]

    def path_to(self, sid: int) -> list[int]:
        path = [sid]
        while self.parent[path[-1]] >= 0:
            path.append(self.parent[path[-1]])
        return path[::-1]


def _phase_key(protocol, config):
    try:
        ph = protocol.phase_of(config)
    except _PROTOCOL_ERRORS:
        return "invalid"
    return getattr(ph, "value", ph)


def explore(
    protocol: Protocol,
    n: int,
    semantics: Semantics | str = Semantics.ATOM,
    initials: list[RingConfig] | None = None,
    state_cap: int = 2_000_000,
) -> StateGraph:
    semantics = Semantics(semantics)
    enc = Encoding(n, semantics)
    g = StateGraph(protocol, n, semantics, enc)
    if initials is None:
        initials = enumerate_initials(n, protocol.k)
    queue = deque()

    def add(cells, parent):
        key = enc.canonical(cells)
        sid = g.index.get(key)
        if sid is None:
            sid = len(g.states)
            g.index[key] = sid
            g.states.append(key)
            g.succ.append([])
            g.parent.append(parent)
            g.depth.append(0 if parent < 0 else g.depth[parent] + 1)
            g.phase.append(_phase_key(protocol, RingConfig(enc.occupancy(key))))
            queue.append(sid)
        return sid

    for config in initials:
        g.initial.append(add(enc.initial(config), -1))
    g.initial = sorted(set(g.initial))

    while queue:
        sid = queue.popleft()
        if len(g.states) > state_cap:
            g.truncated = True
            g.frontier = {sid, *queue}
            break
        try:
            nexts = successors(protocol, enc, g.states[sid])
        except _PROTOCOL_ERRORS as exc:
            g.errors[sid] = f"{type(exc).__name__}: {exc}"
            continue
        edges = set()
        for cells, moved in nexts:
            edges.add((add(cells, sid), moved))
        g.succ[sid] = sorted(edges)
    return g


def find_cycle(g: StateGraph):
    """Iterative DFS with an explicit on-stack set.

    Returns ``(cycle, postorder)``: the first cycle found as a list of state
    ids (first == last), or None together with a postorder of all states.
    """
    N = len(g.states)
    color = bytearray(N)  # 0 new, 1 on stack, 2 done
    order = []
    for root in range(N):
        if color[root]:
            continue
        color[root] = 1
        stack = [(root, iter(g.succ[root]))]
        while stack:
            node, it = stack[-1]
            for t, _ in it:
                if color[t] == 0:
                    color[t] = 1
                    stack.append((t, iter(g.succ[t])))
                    break
                if color[t] == 1:
                    path = [s for s, _ in stack]
                    return path[path.index(t):] + [t], None
            else:
                color[node] = 2
                order.append(node)
                stack.pop()
    return None, order


@dataclass
class Longest:
    moves: list
    steps: list
    phase_max: dict
    phase_min: dict


def longest_paths(g: StateGraph, order: list[int]) -> Longest:
    """Longest move counts and path lengths to a sink, per state (graph must be acyclic)."""
    N = len(g.states)
    moves = [0] * N
    steps = [0] * N
    phases = sorted({p for p in g.phase if p is not None}, key=str)
    pmax = {p: [0] * N for p in phases}
    pmin = {p: [0] * N for p in phases}
    for s in order:
        edges = g.succ[s]
        if not edges:
            continue
        ph = g.phase[s]
        moves[s] = max(m + moves[t] for t, m in edges)
        steps[s] = 1 + max(steps[t] for t, _ in edges)
        for p in phases:
            mx, mn = pmax[p], pmin[p]
            if p == ph:
                mx[s] = max(m + mx[t] for t, m in edges)
                mn[s] = min(m + mn[t] for t, m in edges)
            else:
                mx[s] = max(mx[t] for t, _ in edges)
                mn[s] = min(mn[t] for t, _ in edges)
    return Longest(moves, steps, pmax, pmin)


# -- witnesses ----------------------------------------------------------------------------


def concrete_successors(protocol, state: ExecutionState, semantics: Semantics):
    """Every concrete progress event enabled in ``state``."""
    config = state.config
    n = state.n
    events = []
    if semantics is Semantics.ATOM:
        decs = protocol.decisions(config)
        movers = [r for r in state.robots if r.position in decs]
        options = [[None] + sorted(decs[r.position].directions, key=lambda d: d.value) for r in movers]
        for combo in product(*options):
            moves = tuple((r.id, d) for r, d in zip(movers, combo) if d is not None)
            if moves:
                events.append(AtomStep(tuple(rid for rid, _ in moves), moves))
    else:
        decs = None
        for r in state.robots:
            if r.is_ready:
                if decs is None:
                    decs = protocol.decisions(config)
                if r.position in decs:
                    events.append(Look(r.id, decs[r.position]))
            else:
                for d in sorted(r.pending, key=lambda d: d.value):
                    events.append(Move(r.id, r.position, d.step(r.position, n)))
    return events


def concretize(g: StateGraph, path: list[int], **header) -> Trace:
    """Turn a path of canonical states into a replayable concrete trace."""
    protocol, enc = g.protocol, g.enc
    state = ExecutionState.initial(g.config(path[0]))
    trace = Trace(initial=state, header=dict(protocol=protocol.name, semantics=g.semantics.value, strategy="witness", seed=None, **header))
    for target in path[1:]:
        for ev in concrete_successors(protocol, state, g.semantics):
            new = apply_event(state, ev, protocol)
            if enc.canonical(enc.from_execution(new)) == g.states[target]:
                break
        else:  # pragma: no cover - would mean the protocol is not equivariant
            raise RuntimeError("witness path could not be made concrete")
        if isinstance(ev, AtomStep):
            trace.move_count += len(ev.moves)
        elif isinstance(ev, Move):
            trace.move_count += 1
        trace.events.append(ev)
        state = new
    trace.final = state
    trace.explored = state.explored
    last = path[-1]
    trace.terminated = not g.succ[last] and last not in g.errors
    trace.error = g.errors.get(last)
    return trace


# -- verification --------------------------------------------------------------------------


@dataclass
class BoundComparison:
    formula: str
    d: int | None
    budget: int
    measured: int
    satisfied: bool
    case: str | None = None
    # False when no reachable state falls in this case; such rows hold vacuously
    reached: bool = True


@dataclass
class CheckReport:
    n: int
    k: int
    protocol: str
    semantics: str
    initial_config_count: int
    states_explored: int
    verdict: Verdict
    counterexample: Trace | None = None
    counterexample_kind: str | None = None
    reason: str | None = None
    max_total_moves: int = 0
    max_depth: int = 0
    per_phase_max_moves: dict = field(default_factory=dict)
    per_phase_min_moves: dict = field(default_factory=dict)
    bound_comparisons: list = field(default_factory=list)
    terminal_patterns: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def verified(self) -> bool:
        return self.verdict is Verdict.VERIFIED

    def to_json(self, include_timing: bool = False) -> dict:
        out = {
            "schema_version": 1,
            "n": self.n,
            "k": self.k,
            "protocol": self.protocol,
            "semantics": self.semantics,
            "initial_config_count": self.initial_config_count,
            "states_explored": self.states_explored,
            "verdict": self.verdict.value,
            "counterexample_kind": self.counterexample_kind,
            "reason": self.reason,
            "max_total_moves": self.max_total_moves,
            "max_depth": self.max_depth,
            "per_phase_max_moves": dict(sorted(self.per_phase_max_moves.items())),
            "per_phase_min_moves": dict(sorted(self.per_phase_min_moves.items())),
            "bound_comparisons": [asdict(b) for b in self.bound_comparisons],
            "terminal_patterns": dict(sorted(self.terminal_patterns.items())),
            "counterexample": None,
        }
        if self.counterexample is not None:
            proto = self.counterexample.header.get("protocol")
            from .registry import get_protocol

            out["counterexample"] = list(self.counterexample.records(get_protocol(proto)))
        if include_timing:
            out["elapsed"] = round(self.elapsed, 3)
        return out


def default_depth_bound(protocol: Protocol, n: int, semantics: Semantics) -> int:
    """Four times the summed move budgets (plus n) at the worst inter-distance."""
    if protocol.k == 5:
        worst = 0
        for d in range(1, max(2, n // 5 + 1)):
            b = PhaseBudget.for_d(n, d)
            worst = max(worst, sum(max(0, x) for x in (b.eq1, b.eq2, b.eq3, b.eq4, b.eq5)) + n)
        bound = 4 * worst
    else:
        bound = 8 * n * (protocol.k or 1)
    return bound * (2 if semantics is Semantics.CORDA else 1)


def _terminal_pattern(config: RingConfig) -> str:
    rep = classify(config)
    names = [
        name
        for name in ("is_tower_chain", "tower_block", "tower_sole")
        if getattr(rep, name)
    ]
    return "+".join(names) or "other"


def verify(
    protocol: Protocol,
    n: int,
    semantics: Semantics | str = Semantics.ATOM,
    depth_bound: int | None = None,
    state_cap: int = 2_000_000,
    expect_failure: bool = False,
    initials: list[RingConfig] | None = None,
    jobs: int = 1,
) -> CheckReport:
    """Exhaustively check Safety and Termination from every initial configuration.

    With ``expect_failure`` the protocol's ring-size precondition is not
    enforced, so negative controls can be searched for counterexamples.
    """
    semantics = Semantics(semantics)
    if not expect_failure:
        protocol.check_ring(n)
        if semantics is Semantics.CORDA and protocol.atom_only:
            raise ProtocolPreconditionViolation(f"{protocol.name} is defined for ATOM only")
    if initials is None:
        initials = enumerate_initials(n, protocol.k)
    if depth_bound is None:
        depth_bound = default_depth_bound(protocol, n, semantics)
    if jobs > 1 and len(initials) > 1:
        chunks = [initials[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = [
                pool.submit(_verify_chunk, protocol.name, n, semantics.value, depth_bound, state_cap, chunk)
                for chunk in chunks
                if chunk
            ]
            reports = [f.result() for f in futs]
        return merge_reports(reports)

    t0 = time.perf_counter()
    g = explore(protocol, n, semantics, initials, state_cap)
    report = analyze(g, depth_bound, initial_count=len(initials))
    report.elapsed = time.perf_counter() - t0
    return report


def _verify_chunk(name, n, semantics, depth_bound, state_cap, chunk):
    from .registry import get_protocol

    return verify(get_protocol(name), n, semantics, depth_bound, state_cap, expect_failure=True, initials=chunk)


_VERDICT_RANK = {Verdict.VERIFIED: 0, Verdict.BOUND_EXCEEDED: 1, Verdict.COUNTEREXAMPLE: 2}


def merge_reports(reports: list[CheckReport]) -> CheckReport:
    """Combine reports over disjoint sets of initial configurations."""
    base = reports[0]
    worst = max(reports, key=lambda r: _VERDICT_RANK[r.verdict])
    out = CheckReport(
        n=base.n,
        k=base.k,
        protocol=base.protocol,
        semantics=base.semantics,
        initial_config_count=sum(r.initial_config_count for r in reports),
        states_explored=sum(r.states_explored for r in reports),
        verdict=worst.verdict,
        counterexample=worst.counterexample,
        counterexample_kind=worst.counterexample_kind,
        reason=worst.reason,
        max_total_moves=max(r.max_total_moves for r in reports),
        max_depth=max(r.max_depth for r in reports),
        elapsed=max(r.elapsed for r in reports),
    )
    for r in reports:
        for p, v in r.per_phase_max_moves.items():
            out.per_phase_max_moves[p] = max(v, out.per_phase_max_moves.get(p, v))
        for p, v in r.per_phase_min_moves.items():
            out.per_phase_min_moves[p] = min(v, out.per_phase_min_moves.get(p, v))
        for p, v in r.terminal_patterns.items():
            out.terminal_patterns[p] = out.terminal_patterns.get(p, 0) + v
    return out


def analyze(g: StateGraph, depth_bound: int, initial_count: int | None = None) -> CheckReport:
    protocol = g.protocol
    report = CheckReport(
        n=g.n,
        k=protocol.k,
        protocol=protocol.name,
        semantics=g.semantics.value,
        initial_config_count=len(g.initial) if initial_count is None else initial_count,
        states_explored=len(g.states),
        verdict=Verdict.VERIFIED,
    )
    if g.truncated:
        report.verdict = Verdict.BOUND_EXCEEDED
        report.reason = f"state cap reached after {len(g.states)} states"
        return report

    if g.errors:
        sid = min(g.errors, key=lambda s: g.depth[s])
        report.verdict = Verdict.COUNTEREXAMPLE
        report.counterexample_kind = "protocol-error"
        report.reason = g.errors[sid]
        report.counterexample = concretize(g, g.path_to(sid), witness="protocol-error")
        return report

    cycle, order = find_cycle(g)
    if cycle is not None:
        stem = g.path_to(cycle[0])
        report.verdict = Verdict.COUNTEREXAMPLE
        report.counterexample_kind = "livelock"
        report.reason = f"progress cycle of length {len(cycle) - 1}"
        report.counterexample = concretize(
            g, stem + cycle[1:], witness="livelock", lasso_stem_length=len(stem) - 1
        )
        return report

    for s in g.sinks():
        pattern = _terminal_pattern(g.config(s))
        report.terminal_patterns[pattern] = report.terminal_patterns.get(pattern, 0) + 1
    bad = [s for s in g.sinks() if not g.enc.explored(g.states[s])]
    if bad:
        sid = min(bad, key=lambda s: g.depth[s])
        report.verdict = Verdict.COUNTEREXAMPLE
        report.counterexample_kind = "bad-sink"
        report.reason = (
            f"terminal configuration {g.config(sid)} leaves "
            f"{g.n - g.enc.visited_count(g.states[sid])} node(s) unvisited"
        )
        report.counterexample = concretize(g, g.path_to(sid), witness="bad-sink")
        return report

    lp = longest_paths(g, order)
    report.max_total_moves = max(lp.moves[s] for s in g.initial)
    report.max_depth = max(lp.steps[s] for s in g.initial)
    report.per_phase_max_moves = {str(p): max(v[s] for s in g.initial) for p, v in lp.phase_max.items()}
    report.per_phase_min_moves = {str(p): min(v[s] for s in g.initial) for p, v in lp.phase_min.items()}
    if report.max_depth > depth_bound:
        report.verdict = Verdict.BOUND_EXCEEDED
        report.reason = f"longest execution has {report.max_depth} steps > depth bound {depth_bound}"
    return report


# -- move budgets ------------------------------------------------------------------------------


@dataclass(frozen=True)
class PhaseBudget:
    n: int
    d: int
    eq1: int
    eq2: int
    eq3: int
    eq4: int
    eq5: int
    tower_chain_budget: int

    @classmethod
    def for_d(cls, n: int, d: int, k: int = 5) -> "PhaseBudget":
        # bracketed halves are floor divisions
        eq1 = (n - (k + 3 * (d - 1))) // 2 - (d - 1)
        eq2 = n - (k + 4 * (d - 1) + d)
        eq3 = n - (k + 3 * (d - 1) + 2 * d) + (n - (k + 3 * (d - 1))) // 2 - (d - 1)
        eq4 = n - (k + 5 * (d - 1))
        eq5 = (d - 1) * 7
        return cls(n, d, eq1, eq2, eq3, eq4, eq5, n - k)


# Block-phase situations and the budget that bounds each one
CASE_FORMULA = {
    "iso1": "eq1",
    "iso2": "eq2",
    "iso3": "eq3",
    "two_blocks": "eq4",
    "contract": "eq5",
}


def block_case(config: RingConfig) -> str | None:
    from .protocol_five import Phase, phase_of

    if phase_of(config) is not Phase.BLOCK:
        return None
    rep = classify(config)
    iso = len(rep.isolated_robots)
    if iso:
        return f"iso{iso}"
    if len(rep.d_blocks) == 2:
        return "two_blocks"
    return "contract"


def _moves_until(g: StateGraph, order, target) -> list[int]:
    """Longest number of moves from each state until the first state satisfying ``target``."""
    val = [0] * len(g.states)
    for s in order:
        if target(s) or not g.succ[s]:
            continue
        val[s] = max(m + val[t] for t, m in g.succ[s])
    return val


@dataclass
class BoundsReport:
    n: int
    check: CheckReport
    comparisons: list
    per_case: dict  # (case, d) -> measured max
    tower_moves: int
    tower_chain_max: int
    tower_chain_min: int
    max_total_moves: int

    @property
    def satisfied(self) -> bool:
        return (
            self.check.verified
            and all(c.satisfied for c in self.comparisons)
        )

    def formula_rows(self) -> list[dict]:
        """The five budget formulas, each with its per-inter-distance comparisons."""
        rows = []
        for formula in sorted({c.formula for c in self.comparisons if c.d is not None}):
            per_d = [asdict(c) for c in self.comparisons if c.formula == formula and c.d is not None]
            rows.append({
                "formula": formula,
                "case": per_d[0]["case"],
                "per_d": per_d,
                "satisfied": all(r["satisfied"] for r in per_d),
            })
        return rows

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "n": self.n,
            "verdict": self.check.verdict.value,
            "rows": self.formula_rows(),
            "totals": [asdict(c) for c in self.comparisons if c.d is None],
            "per_case": [
                {"case": c, "d": d, "measured": v} for (c, d), v in sorted(self.per_case.items())
            ],
            "tower_moves": self.tower_moves,
            "tower_chain_moves": {"min": self.tower_chain_min, "max": self.tower_chain_max},
            "max_total_moves": self.max_total_moves,
            "moves_per_node": round(self.max_total_moves / self.n, 4),
            "satisfied": self.satisfied,
        }


def measure_bounds(n: int, state_cap: int = 3_000_000) -> BoundsReport:
    """Worst-case moves per Block-phase situation against the analytic budgets."""
    from .protocol_five import PROTOCOL, Phase

    if n < 6 or gcd(n, 5) != 1:
        raise ProtocolPreconditionViolation(f"bounds need n >= 6 with gcd(n,5)=1; got n={n}")
    g = explore(PROTOCOL, n, Semantics.ATOM, state_cap=state_cap)
    report = analyze(g, depth_bound=10**9)
    if not report.verified:
        return BoundsReport(n, report, [], {}, 0, 0, 0, 0)
    _, order = find_cycle(g)
    configs = [g.config(s) for s in range(len(g.states))]
    cases = [block_case(c) for c in configs]
    dvals = [classify(c).inter_distance for c in configs]
    block = Phase.BLOCK.value

    targets = {
        "iso": lambda s: g.phase[s] != block or not cases[s].startswith("iso"),
        "two_blocks": lambda s: g.phase[s] != block or cases[s] == "contract",
        "contract": lambda s: g.phase[s] != block,
    }
    vals = {key: _moves_until(g, order, t) for key, t in targets.items()}
    per_case = {}
    for s, case in enumerate(cases):
        if case is None:
            continue
        v = vals["iso" if case.startswith("iso") else case][s]
        key = (case, dvals[s])
        per_case[key] = max(per_case.get(key, 0), v)

    # one row per formula and inter-distance, including d values the run never reaches
    dmax = max([1] + [d for (_, d) in per_case])
    comparisons = []
    for case, formula in CASE_FORMULA.items():
        for d in range(1, dmax + 1):
            budget = getattr(PhaseBudget.for_d(n, d), formula)
            reached = (case, d) in per_case
            measured = per_case.get((case, d), 0)
            comparisons.append(
                BoundComparison(formula, d, budget, measured, not reached or measured <= budget, case, reached)
            )

    tower = report.per_phase_max_moves.get(Phase.TOWER.value, 0)
    tc_max = report.per_phase_max_moves.get(Phase.TOWER_CHAIN.value, 0)
    tc_min = report.per_phase_min_moves.get(Phase.TOWER_CHAIN.value, 0)
    comparisons.append(BoundComparison("tower", None, 1, tower, tower == 1, "tower"))
    comparisons.append(BoundComparison("tower_chain", None, n - 5, tc_max, tc_max == tc_min == n - 5, "tower_chain"))
    report.bound_comparisons = comparisons
    return BoundsReport(n, report, comparisons, per_case, tower, tc_max, tc_min, report.max_total_moves)


def linear_fit(xs, ys) -> tuple[float, float]:
    """Least-squares slope and intercept."""
    import numpy as np

    slope, intercept = np.polyfit(np.asarray(xs, float), np.asarray(ys, float), 1)
    return float(slope), float(intercept)


# -- counterexample search ----------------------------------------------------------------------


@dataclass
class Counterexample:
    kind: str  # "livelock" or "bad-sink" or "protocol-error"
    trace: Trace
    stem_length: int
    cycle_length: int = 0
    reason: str = ""


def _sccs(g: StateGraph) -> list[int]:
    """Tarjan's algorithm, iterative; returns the component id of every state."""
    N = len(g.states)
    index = [-1] * N
    low = [0] * N
    on = bytearray(N)
    comp = [-1] * N
    stack, counter, ncomp = [], 0, 0
    for root in range(N):
        if index[root] >= 0:
            continue
        work = [(root, iter(g.succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on[root] = 1
        while work:
            v, it = work[-1]
            pushed = False
            for w, _ in it:
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on[w] = 1
                    work.append((w, iter(g.succ[w])))
                    pushed = True
                    break
                if on[w]:
                    low[v] = min(low[v], index[w])
            if pushed:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on[w] = 0
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp


def _shortest_cycle_through(g: StateGraph, s: int, comp: list[int]) -> list[int]:
    prev = {s: None}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        for w, _ in g.succ[v]:
            if w == s:
                path = [v]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1] + [s]
            if w not in prev and comp[w] == comp[s]:
                prev[w] = v
                queue.append(w)
    raise AssertionError("state is not on a cycle")


def find_counterexample(
    protocol: Protocol,
    n: int,
    k: int | None = None,
    semantics: Semantics | str = Semantics.ATOM,
    depth_bound: int | None = None,
    state_cap: int = 1_000_000,
    initials: list[RingConfig] | None = None,
    kinds: tuple[str, ...] = ("livelock", "bad-sink", "protocol-error"),
) -> Counterexample | None:
    """Shortest livelock lasso or bad terminal state reachable from any initial configuration.

    ``kinds`` restricts the witnesses considered, e.g. ``("livelock",)``.
    """
    semantics = Semantics(semantics)
    k = k or protocol.k
    if initials is None:
        initials = enumerate_initials(n, k)
    g = explore(protocol, n, semantics, initials, state_cap)
    comp = _sccs(g)
    sizes = {}
    for c in comp:
        sizes[c] = sizes.get(c, 0) + 1
    cyclic = [
        s for s in range(len(g.states))
        if sizes[comp[s]] > 1 or any(t == s for t, _ in g.succ[s])
    ]
    errors = sorted(g.errors)
    bad = [
        s for s in range(len(g.states))
        if s not in g.errors and s not in g.frontier
        and not g.succ[s] and not g.enc.explored(g.states[s])
    ]
    candidates = []
    if cyclic:
        s = min(cyclic, key=lambda x: g.depth[x])
        cycle = _shortest_cycle_through(g, s, comp)
        candidates.append((g.depth[s] + len(cycle) - 1, "livelock", s, cycle))
    for kind, pool in (("bad-sink", bad), ("protocol-error", errors)):
        if pool:
            s = min(pool, key=lambda x: g.depth[x])
            candidates.append((g.depth[s], kind, s, None))
    candidates = [
        c for c in candidates
        if c[1] in kinds and (depth_bound is None or c[0] <= depth_bound)
    ]
    if not candidates:
        if g.truncated:
            raise BoundExceeded(f"no counterexample within {state_cap} states")
        return None
    length, kind, s, cycle = min(candidates, key=lambda c: (c[0], c[1]))
    stem = g.path_to(s)
    if kind == "livelock":
        trace = concretize(g, stem + cycle[1:], witness=kind, lasso_stem_length=len(stem) - 1)
        return Counterexample(kind, trace, len(stem) - 1, len(cycle) - 1, f"progress cycle of length {len(cycle) - 1}")
    trace = concretize(g, stem, witness=kind)
    reason = g.errors.get(s) or f"terminal configuration {g.config(s)} with unvisited nodes"
    return Counterexample(kind, trace, len(stem) - 1, 0, reason)


# -- impossibility witnesses ------------------------------------------------------------------------


def scripted_impossibility_witnesses() -> list[tuple[str, Trace]]:
    """Replay the three four-robot even-ring scenarios as concrete traces."""
    from .scheduler import run, Strategy
    from .strawman import AwayFromDistanceTwo, BackAndForth, TowardDistanceTwo

    out = []

    # every robot heads for its neighbour two edges away; the adversary pairs them into two towers
    toward = TowardDistanceTwo()
    fig1 = RingConfig.from_positions(8, [0, 2, 4, 6])
    merge = [
        AtomStep((0, 1, 2, 3), ((0, Direction.HIGHER), (1, Direction.LOWER), (2, Direction.HIGHER), (3, Direction.LOWER))),
    ]
    t = run(toward, fig1, Strategy.SCRIPT, script=merge)
    t.header.update(scenario="tower-merge", k_divides_n=fig1.n % 4 == 0, towers=list(t.final.config.towers))
    out.append(("tower-merge", t))

    # robots retreat from the distance-two neighbour, then come back: occupancy repeats
    fig2_wide = RingConfig.from_positions(14, [0, 2, 7, 9])
    back = BackAndForth()
    t = run(back, fig2_wide, Strategy.SCRIPT, script=_sync_script(back, fig2_wide, 4))
    t.header.update(scenario="back-and-forth", period=2,
                    repeats=t.states(back)[2].config == fig2_wide)
    out.append(("back-and-forth", t))

    # even gap: retreating robots end up pairwise adjacent, then swap forever
    fig2 = RingConfig.from_positions(10, [0, 2, 5, 7])
    away = AwayFromDistanceTwo()
    t = run(away, fig2, Strategy.SCRIPT, script=_sync_script(away, fig2, 3))
    states = t.states(away)
    t.header.update(scenario="position-exchange", swap_configuration=str(states[1].config),
                    swap_invariant=states[2].config == states[1].config == states[3].config)
    out.append(("position-exchange", t))
    return out


def _sync_script(protocol, config, rounds):
    """Synchronous ATOM rounds with the default resolution, as a script."""
    from .scheduler import prefer_higher, resolve_atom

    state = ExecutionState.initial(config)
    events = []
    for _ in range(rounds):
        ev = resolve_atom(state, [r.id for r in state.robots], protocol, prefer_higher)
        events.append(ev)
        state = apply_event(state, ev, protocol)
    return events


def jobs_from_env(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get("RING_EXPLORER_JOBS", default)))
    except ValueError:
        return default


def report_json(report) -> str:
    return json.dumps(report.to_json(), sort_keys=True, indent=2)
