"""ATOM and CORDA execution engines, activation strategies and traces.

Under ATOM the activated robots look, compute and move as one atomic step.
Under CORDA a robot's Look and Move are separate events; between them other
robots may move, so the robot acts on an outdated snapshot.  A pending robot
stores the *direction* it computed, and on Move steps to whichever node is
adjacent in that direction.
"""
from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence, Union

from .exceptions import ProtocolPreconditionViolation, RingExplorerError, SchedulerError
from .protocol import IDLE, Decision, Protocol
from .ring_core import Direction, RingConfig


class Semantics(enum.Enum):
    ATOM = "atom"
    CORDA = "corda"


READY = None


@dataclass(frozen=True)
class RobotState:
    id: int
    position: int
    # None when Ready, otherwise the pending direction set (two elements: unresolved)
    pending: frozenset | None = READY

    @property
    def is_ready(self) -> bool:
        return self.pending is None


@dataclass(frozen=True)
class ExecutionState:
    n: int
    robots: tuple[RobotState, ...]
    visited: frozenset
    step: int = 0

    @classmethod
    def initial(cls, config: RingConfig) -> "ExecutionState":
        robots = tuple(RobotState(i, p) for i, p in enumerate(config.positions()))
        return cls(config.n, robots, frozenset(config.occupied))

    @property
    def config(self) -> RingConfig:
        return RingConfig.from_positions(self.n, (r.position for r in self.robots))

    @property
    def explored(self) -> bool:
        return len(self.visited) == self.n

    @property
    def any_pending(self) -> bool:
        return any(not r.is_ready for r in self.robots)

    def robot(self, rid: int) -> RobotState:
        for r in self.robots:
            if r.id == rid:
                return r
        raise SchedulerError(f"unknown robot id {rid}")

    def with_robot(self, robot: RobotState) -> "ExecutionState":
        robots = tuple(robot if r.id == robot.id else r for r in self.robots)
        return replace(self, robots=robots)


# -- events ------------------------------------------------------------------


@dataclass(frozen=True)
class AtomStep:
    activated: tuple[int, ...]
    # robot id -> direction actually taken (only for robots that moved)
    moves: tuple[tuple[int, Direction], ...] = ()


@dataclass(frozen=True)
class Look:
    robot: int
    decision: Decision | None = None


@dataclass(frozen=True)
class Move:
    robot: int
    source: int | None = None
    target: int | None = None


Event = Union[AtomStep, Look, Move]

Resolver = Callable[[ExecutionState, int, Decision], Direction]


def prefer_higher(state, rid, decision) -> Direction:
    return Direction.HIGHER if Direction.HIGHER in decision.directions else next(iter(decision.directions))


def random_resolver(rng: random.Random) -> Resolver:
    def resolve(state, rid, decision):
        return rng.choice(sorted(decision.directions, key=lambda d: d.value))

    return resolve


def _resolve(resolver, state, rid, decision) -> Direction:
    if len(decision.directions) == 1:
        return next(iter(decision.directions))
    choice = resolver(state, rid, decision)
    if choice not in decision.directions:
        raise SchedulerError(f"resolver picked {choice} outside {decision}")
    return choice


def resolve_atom(state, activated: Iterable[int], protocol: Protocol, resolver: Resolver = prefer_higher) -> AtomStep:
    activated = tuple(sorted(set(activated)))
    if not activated:
        raise SchedulerError("an ATOM step activates at least one robot")
    config = state.config
    moves = []
    for rid in activated:
        r = state.robot(rid)
        dec = protocol.decide(config, r.position)
        if dec.is_move:
            moves.append((rid, _resolve(resolver, state, rid, dec)))
    return AtomStep(activated, tuple(moves))


def apply_event(state: ExecutionState, event: Event, protocol: Protocol, resolver: Resolver = prefer_higher) -> ExecutionState:
    """Apply one event; a Look without a decision or a Move without endpoints is resolved here."""
    new, _ = apply_event_resolved(state, event, protocol, resolver)
    return new


def apply_event_resolved(state, event, protocol, resolver=prefer_higher):
    """Like apply_event, also returning the event in fully resolved form."""
    n = state.n
    if isinstance(event, AtomStep):
        for rid in event.activated:
            state.robot(rid)
        targets = {}
        for rid, direction in event.moves:
            r = state.robot(rid)
            targets[rid] = direction.step(r.position, n)
        robots = tuple(replace(r, position=targets.get(r.id, r.position)) for r in state.robots)
        visited = state.visited | frozenset(targets.values())
        return ExecutionState(n, robots, visited, state.step + 1), event

    if isinstance(event, Look):
        r = state.robot(event.robot)
        if not r.is_ready:
            raise SchedulerError(f"robot {r.id} is pending and cannot Look")
        dec = event.decision or protocol.decide(state.config, r.position)
        new = replace(state, step=state.step + 1)
        if dec.is_move:
            new = new.with_robot(replace(r, pending=dec.directions))
        return new, Look(r.id, dec)

    if isinstance(event, Move):
        r = state.robot(event.robot)
        if r.is_ready:
            raise SchedulerError(f"robot {r.id} is Ready and has nothing to Move")
        if event.target is not None:
            target = event.target % n
            direction = Direction.HIGHER if (target - r.position) % n == 1 else Direction.LOWER
            if direction.step(r.position, n) != target or direction not in r.pending:
                raise SchedulerError(f"robot {r.id} cannot move {r.position}->{target}")
        else:
            dec = Decision.move(r.pending)
            direction = _resolve(resolver, state, r.id, dec)
            target = direction.step(r.position, n)
        new = state.with_robot(replace(r, position=target, pending=READY))
        new = replace(new, visited=state.visited | {target}, step=state.step + 1)
        return new, Move(r.id, r.position, target)

    raise TypeError(f"unknown event {event!r}")


def step_atom(state, activated, protocol, resolver: Resolver = prefer_higher) -> ExecutionState:
    return apply_event(state, resolve_atom(state, activated, protocol, resolver), protocol)


def step_corda(state, event: Event, protocol, resolver: Resolver = prefer_higher) -> ExecutionState:
    if not isinstance(event, (Look, Move)):
        raise SchedulerError("CORDA steps are Look or Move events")
    return apply_event(state, event, protocol, resolver)


def is_terminal(state: ExecutionState, protocol: Protocol) -> bool:
    return not state.any_pending and protocol.is_terminal(state.config)


def movers(state, protocol) -> list[int]:
    config = state.config
    dec = protocol.decisions(config)
    return [r.id for r in state.robots if r.position in dec]


# -- traces --------------------------------------------------------------------


@dataclass
class Trace:
    initial: ExecutionState
    events: list = field(default_factory=list)
    final: ExecutionState | None = None
    explored: bool = False
    terminated: bool = False
    move_count: int = 0
    phase_moves: dict = field(default_factory=dict)
    max_steps_exceeded: bool = False
    error: str | None = None
    header: dict = field(default_factory=dict)

    def states(self, protocol) -> list[ExecutionState]:
        out = [self.initial]
        for ev in self.events:
            out.append(apply_event(out[-1], ev, protocol))
        return out

    def replay(self, protocol) -> ExecutionState:
        return self.states(protocol)[-1]

    def to_jsonl(self, protocol) -> str:
        return "\n".join(json.dumps(rec, sort_keys=True) for rec in self.records(protocol)) + "\n"

    def records(self, protocol):
        head = {"kind": "header", "n": self.initial.n, "k": len(self.initial.robots)}
        head.update(self.header)
        head["initial"] = list(self.initial.config.occupancy)
        yield head
        state = self.initial
        for ev in self.events:
            new = apply_event(state, ev, protocol)
            rec = {"step": new.step}
            if isinstance(ev, AtomStep):
                moved = dict(ev.moves)
                rec.update(
                    kind="atom",
                    robot=list(ev.activated),
                    **{"from": [state.robot(r).position for r in ev.activated]},
                    to=[new.robot(r).position for r in ev.activated],
                    directions={str(r): d.name.lower() for r, d in moved.items()},
                )
            elif isinstance(ev, Look):
                pos = state.robot(ev.robot).position
                rec.update(kind="look", robot=ev.robot, to=pos, decision=ev.decision.to_json())
                rec["from"] = pos
            else:
                rec.update(kind="move", robot=ev.robot, to=ev.target)
                rec["from"] = ev.source
            rec["occupancy_after"] = list(new.config.occupancy)
            rec["visited_count"] = len(new.visited)
            yield rec
            state = new
        yield {
            "kind": "verdict",
            "explored": self.explored,
            "terminated": self.terminated,
            "moves": self.move_count,
            "phase_moves": dict(sorted(self.phase_moves.items())),
            "max_steps_exceeded": self.max_steps_exceeded,
            "error": self.error,
        }


def events_from_records(records: Sequence[dict]) -> tuple[ExecutionState, list]:
    """Rebuild the initial state and events from parsed JSON-lines records."""
    head = records[0]
    state = ExecutionState.initial(RingConfig(tuple(head["initial"])))
    events = []
    for rec in records[1:]:
        kind = rec.get("kind")
        if kind == "atom":
            dirs = {int(r): Direction[d.upper()] for r, d in rec.get("directions", {}).items()}
            events.append(AtomStep(tuple(rec["robot"]), tuple(sorted(dirs.items()))))
        elif kind == "look":
            d = rec["decision"]
            dec = IDLE if d == "idle" else Decision.move(Direction[x.upper()] for x in d)
            events.append(Look(rec["robot"], dec))
        elif kind == "move":
            events.append(Move(rec["robot"], rec["from"], rec["to"]))
    return state, events


def read_jsonl(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


# -- run -----------------------------------------------------------------------


class Strategy(enum.Enum):
    SYNCHRONOUS = "synchronous"
    ROUND_ROBIN = "round_robin"
    RANDOM = "random"
    SCRIPT = "script"


def _count_moves(trace, protocol, state, new, event):
    moved = [
        r for r in state.robots if new.robot(r.id).position != r.position
    ]
    if isinstance(event, AtomStep):
        moved_n = len(event.moves)
    else:
        moved_n = 1 if isinstance(event, Move) else 0
    if moved_n:
        try:
            ph = protocol.phase_of(state.config)
        except RingExplorerError:
            ph = None
        key = getattr(ph, "value", ph) or "all"
        trace.phase_moves[key] = trace.phase_moves.get(key, 0) + moved_n
        trace.move_count += moved_n
    return moved


def run(
    protocol: Protocol,
    initial: RingConfig,
    strategy: Strategy | str = Strategy.SYNCHRONOUS,
    semantics: Semantics | str = Semantics.ATOM,
    max_steps: int = 10_000,
    seed: int | None = None,
    script: Sequence[Event] = (),
    resolver: Resolver | None = None,
) -> Trace:
    """Run until every robot is idle with nothing pending, or ``max_steps`` events."""
    strategy = Strategy(strategy)
    semantics = Semantics(semantics)
    if max_steps <= 0:
        raise ValueError("max_steps must be positive")
    if protocol.k is not None and initial.k != protocol.k:
        raise ProtocolPreconditionViolation(f"{protocol.name} needs k={protocol.k}, got k={initial.k}")
    protocol.check_ring(initial.n)
    if semantics is Semantics.CORDA and protocol.atom_only:
        raise ProtocolPreconditionViolation(f"{protocol.name} is defined for ATOM only")
    rng = random.Random(seed)
    if resolver is None:
        resolver = random_resolver(rng) if strategy is Strategy.RANDOM else prefer_higher

    state = ExecutionState.initial(initial)
    trace = Trace(
        initial=state,
        header={
            "protocol": protocol.name,
            "semantics": semantics.value,
            "strategy": strategy.value,
            "seed": seed,
        },
    )
    script = list(script)
    rr = 0  # round-robin cursor
    corda_round: list = []

    def emit(event):
        nonlocal state
        new, resolved = apply_event_resolved(state, event, protocol, resolver)
        _count_moves(trace, protocol, state, new, resolved)
        trace.events.append(resolved)
        state = new

    try:
        while True:
            if strategy is Strategy.SCRIPT:
                if not script:
                    break
            elif is_terminal(state, protocol):
                break
            if len(trace.events) >= max_steps:
                trace.max_steps_exceeded = True
                break
            ids = [r.id for r in state.robots]
            if strategy is Strategy.SCRIPT:
                emit(script.pop(0))
            elif semantics is Semantics.ATOM:
                if strategy is Strategy.SYNCHRONOUS:
                    emit(resolve_atom(state, ids, protocol, resolver))
                elif strategy is Strategy.ROUND_ROBIN:
                    emit(resolve_atom(state, [ids[rr % len(ids)]], protocol, resolver))
                    rr += 1
                else:
                    active = movers(state, protocol)
                    subset = [r for r in active if rng.random() < 0.5] or [rng.choice(active)]
                    emit(resolve_atom(state, subset, protocol, resolver))
            else:
                if strategy is Strategy.SYNCHRONOUS:
                    # every robot looks, then every pending robot moves
                    if not corda_round:
                        corda_round = [Look(r) for r in ids] + [Move(r) for r in ids]
                    ev = corda_round.pop(0)
                    r = state.robot(ev.robot)
                    if isinstance(ev, Look) and not r.is_ready:
                        continue
                    if isinstance(ev, Move) and r.is_ready:
                        continue
                    emit(ev)
                elif strategy is Strategy.ROUND_ROBIN:
                    r = state.robot(ids[rr % len(ids)])
                    emit(Look(r.id) if r.is_ready else Move(r.id))
                    if state.robot(r.id).is_ready:
                        rr += 1
                else:
                    enabled = [Move(r.id) for r in state.robots if not r.is_ready]
                    active = set(movers(state, protocol))
                    enabled += [Look(r.id) for r in state.robots if r.is_ready and r.id in active]
                    emit(rng.choice(enabled))
    except RingExplorerError as exc:  # protocol errors end the run and are reported
        if strategy is Strategy.SCRIPT and isinstance(exc, SchedulerError):
            raise
        trace.error = f"{type(exc).__name__}: {exc}"

    trace.final = state
    trace.explored = state.explored
    trace.terminated = trace.error is None and is_terminal(state, protocol)
    return trace
