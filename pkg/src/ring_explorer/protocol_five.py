"""Five-robot exploration protocol for rings whose size is coprime with five.

Three modules run in sequence, each recognisable from the snapshot alone:

* Block: gather all robots into a single 1.block without ever creating a tower.
* Tower: the robot in the middle of that 1.block steps onto a neighbour.
* Tower-chain: the robot between the tower and the 1.block walks away from
  the tower around the unexplored part of the ring until it joins the 1.block.
"""
from __future__ import annotations

import enum
from math import gcd

from .exceptions import ProtocolAmbiguity, ProtocolPreconditionViolation
from .protocol import IDLE, Decision, Protocol, symmetric_aware
from .ring_core import Direction, RingConfig, StructureReport, classify, occupied_neighbors


class Phase(enum.Enum):
    BLOCK = "Block"
    TOWER = "Tower"
    TOWER_CHAIN = "TowerChain"
    TERMINATED = "Terminated"


K = 5


def phase_of(config: RingConfig) -> Phase:
    if config.k != K:
        raise ProtocolPreconditionViolation(f"the five-robot protocol needs k=5, got k={config.k}")
    rep = classify(config)
    if len(rep.towers) > 1:
        raise ProtocolPreconditionViolation(f"more than one tower in {config}")
    return _phase(rep)


def _phase(rep: StructureReport) -> Phase:
    if rep.is_tower_chain:
        return Phase.TERMINATED
    if rep.towers:
        return Phase.TOWER_CHAIN
    if rep.single_1block_of_k:
        return Phase.TOWER
    return Phase.BLOCK


# -- Block module --------------------------------------------------------------


def _gap_to_block(config, rep, node, block):
    """Gaps (per direction) from ``node`` to ``block`` through an adjacent hole."""
    out = {}
    for direction, (other, gap) in occupied_neighbors(config, node).items():
        if other in block:
            out[direction] = gap
    return out


def _closest(config, rep, candidates, allow_ties=False):
    """Keep the candidates with minimal distance.

    Isolated robots approaching a single block may tie and all move; for the
    borders of the small block a tie is tolerated only under symmetry.
    """
    if not candidates:
        return {}
    best = min(dist for dist, _ in candidates.values())
    chosen = {u: dirs for u, (dist, dirs) in candidates.items() if dist == best}
    if len(chosen) > 1 and not (allow_ties or rep.symmetric):
        raise ProtocolAmbiguity(
            f"{sorted(chosen)} are equally close in asymmetric configuration {config}"
        )
    return chosen


def _nearest_side(gaps: dict) -> tuple[int, frozenset]:
    best = min(gaps.values())
    return best, frozenset(d for d, g in gaps.items() if g == best)


def block_decisions(config: RingConfig, rep: StructureReport | None = None) -> dict[int, Decision]:
    rep = rep or classify(config)
    blocks = rep.d_blocks
    iso = rep.isolated_robots
    d = rep.inter_distance
    moves: dict[int, frozenset] = {}

    if iso:
        if len(blocks) == 1:
            block = blocks[0]
            candidates = {}
            for u in iso:
                gaps = _gap_to_block(config, rep, u, block)
                if gaps:
                    candidates[u] = _nearest_side(gaps)
            moves = _closest(config, rep, candidates, allow_ties=True)
        elif len(blocks) == 2:
            # the single isolated robot is the only one allowed to move, symmetric or not
            candidates = {}
            for u in iso:
                gaps = {}
                for b in blocks:
                    gaps.update(_gap_to_block(config, rep, u, b))
                if gaps:
                    candidates[u] = _nearest_side(gaps)
            if len(candidates) > 1:
                raise ProtocolAmbiguity(f"several isolated robots between two blocks in {config}")
            moves = dict((u, dirs) for u, (_, dirs) in candidates.items())
    else:
        if len(blocks) == 1 and d > 1:
            block = blocks[0]
            if not block.cyclic:
                first, last = block.nodes[0], block.nodes[-1]
                moves = {first: frozenset({Direction.HIGHER}), last: frozenset({Direction.LOWER})}
        elif len(blocks) == 2:
            small, big = sorted(blocks, key=len)
            if len(small) == len(big):
                raise ProtocolAmbiguity(f"two d.blocks of equal size in {config}")
            candidates = {}
            for u in small.borders:
                gaps = _gap_to_block(config, rep, u, big)
                if gaps:
                    candidates[u] = _nearest_side(gaps)
            moves = _closest(config, rep, candidates)

    return {u: symmetric_aware(config, u, dirs) for u, dirs in moves.items()}


def decide_block(config: RingConfig, me: int) -> Decision:
    if phase_of(config) is not Phase.BLOCK:
        raise ProtocolPreconditionViolation(f"{config} is not in the Block phase")
    return block_decisions(config).get(me, IDLE)


# -- Tower module ----------------------------------------------------------------


def tower_decisions(config: RingConfig, rep: StructureReport | None = None) -> dict[int, Decision]:
    rep = rep or classify(config)
    run = rep.one_blocks[0]
    middle = run[len(run) // 2]
    return {middle: symmetric_aware(config, middle, ())}


def decide_tower(config: RingConfig, me: int) -> Decision:
    if phase_of(config) is not Phase.TOWER:
        raise ProtocolPreconditionViolation(f"{config} does not contain a single 1.block of five")
    return tower_decisions(config).get(me, IDLE)


# -- Tower-chain module ------------------------------------------------------------


def explorer(config: RingConfig, rep: StructureReport | None = None) -> tuple[int, Direction] | None:
    """The robot between the tower and the 1.block, with its move direction."""
    rep = rep or classify(config)
    tower = rep.towers[0]
    occ = config.occupancy
    found = []
    for u in config.occupied:
        if occ[u] != 1:
            continue
        nb = occupied_neighbors(config, u)
        for toward_tower, away in ((Direction.LOWER, Direction.HIGHER), (Direction.HIGHER, Direction.LOWER)):
            if nb[toward_tower][0] != tower:
                continue
            other = nb[away][0]
            run = next((r for r in rep.one_blocks if other in r), None)
            if run and tower not in run and u not in run and all(occ[x] == 1 for x in run):
                found.append((u, away))
    if len(found) > 1:
        raise ProtocolAmbiguity(f"several robots between the tower and the 1.block in {config}")
    return found[0] if found else None


def tower_chain_decisions(config: RingConfig, rep: StructureReport | None = None) -> dict[int, Decision]:
    rep = rep or classify(config)
    if rep.is_tower_chain:
        return {}
    found = explorer(config, rep)
    if found is None:
        raise ProtocolPreconditionViolation(f"no tower/1.block/explorer pattern in {config}")
    u, away = found
    return {u: Decision.move(away)}


def decide_tower_chain(config: RingConfig, me: int) -> Decision:
    ph = phase_of(config)
    if ph is Phase.TERMINATED:
        return IDLE
    if ph is not Phase.TOWER_CHAIN:
        raise ProtocolPreconditionViolation(f"{config} is not in the Tower-chain phase")
    return tower_chain_decisions(config).get(me, IDLE)


class FiveRobotProtocol(Protocol):
    name = "five"
    k = K

    def check_ring(self, n: int) -> None:
        if n <= K or gcd(n, K) != 1:
            raise ProtocolPreconditionViolation(
                f"the five-robot protocol needs n > 5 coprime with five (gcd(n,5)=1); got n={n}"
            )

    def phase_of(self, config):
        return phase_of(config)

    def _decisions(self, config):
        ph = phase_of(config)
        rep = classify(config)
        if ph is Phase.BLOCK:
            return block_decisions(config, rep)
        if ph is Phase.TOWER:
            return tower_decisions(config, rep)
        if ph is Phase.TOWER_CHAIN:
            return tower_chain_decisions(config, rep)
        return {}


PROTOCOL = FiveRobotProtocol()


def decide(config: RingConfig, me: int) -> Decision:
    return PROTOCOL.decide(config, me)
