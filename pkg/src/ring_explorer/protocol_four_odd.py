"""Four-robot exploration of odd rings (n > 7) under ATOM semantics.

Phase 1 reaches a tower plan: either a symmetric pair of 1.blocks around a hole
of size one (S-tower-plan) or a 1.block of three with an isolated robot two
edges away (A-tower-plan).  Phase 2 builds one tower from the plan.  Phase 3
uses the tower as a landmark: one or two explorers walk the unexplored arc
until a tower-block or tower-sole freezes the configuration.

Distances between the members of a symmetric pair, or between the two robots
on the same side of the axis, are measured along the arc between them that
holds no other robot.  On an odd ring the pair whose free arc crosses the axis
node is then at even distance and the other pair at odd distance.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .exceptions import ProtocolAmbiguity, ProtocolPreconditionViolation
from .protocol import IDLE, Decision, Protocol
from .ring_core import (
    Axis,
    Direction,
    RingConfig,
    StructureReport,
    classify,
    occupied_neighbors,
    ring_distance,
)


class Phase4(enum.Enum):
    PHASE1 = "Phase1"
    PHASE2 = "Phase2"
    PHASE3 = "Phase3"
    TERMINATED = "Terminated"


K = 4


def check_ring(n: int) -> None:
    if n % 2 == 0 or n <= 7:
        raise ProtocolPreconditionViolation(f"n must be odd and > 7 for the four-robot protocol; got n={n}")


def phase4_of(config: RingConfig) -> Phase4:
    check_ring(config.n)
    if config.k != K:
        raise ProtocolPreconditionViolation(f"the four-robot protocol needs k=4, got k={config.k}")
    return _phase(classify(config))


def _phase(rep: StructureReport) -> Phase4:
    if rep.tower_block or rep.tower_sole:
        return Phase4.TERMINATED
    if rep.towers:
        return Phase4.PHASE3
    if rep.s_tower_plan or rep.a_tower_plan:
        return Phase4.PHASE2
    return Phase4.PHASE1


@dataclass(frozen=True)
class SymmetryFrame:
    axis: Axis
    pairs: tuple[tuple[int, int], ...]
    sym_even_pair: tuple[int, int]
    sym_odd_pair: tuple[int, int]
    even_distance: int
    odd_distance: int
    robot_axes_distance: int
    # per robot: direction of the free arc leading to its mirror image
    toward_mirror: dict

    def mirror(self, u: int) -> int:
        return self.axis.mirror(u)

    def pair_distance(self, u: int) -> int:
        return self.even_distance if u in self.sym_even_pair else self.odd_distance


def symmetry_frame(config: RingConfig, rep: StructureReport | None = None) -> SymmetryFrame | None:
    """Pair structure of a symmetric four-robot configuration with no robot on the axis."""
    rep = rep or classify(config)
    if not rep.symmetric or config.k != K or rep.towers:
        return None
    if len(rep.symmetry_axes) > 1:
        raise ProtocolAmbiguity(f"{config} has several symmetry axes")
    axis = rep.symmetry_axes[0]
    if axis.on_axis:
        return None
    n = config.n
    even = odd = None
    toward = {}
    side = None
    for u in config.occupied:
        nb = occupied_neighbors(config, u)
        for direction, (other, gap) in nb.items():
            if other == axis.mirror(u):
                toward[u] = direction
                pair = tuple(sorted((u, other)))
                if gap % 2 == 0:
                    even = (pair, gap)
                else:
                    odd = (pair, gap)
            else:
                side = gap
    if even is None or odd is None or len(toward) != 4:
        return None
    assert even[1] + odd[1] + 2 * side == n
    return SymmetryFrame(
        axis=axis,
        pairs=(even[0], odd[0]),
        sym_even_pair=even[0],
        sym_odd_pair=odd[0],
        even_distance=even[1],
        odd_distance=odd[1],
        robot_axes_distance=side,
        toward_mirror=toward,
    )


def _in_one_block(config, u) -> bool:
    n = config.n
    return bool(config.occupancy[(u - 1) % n] or config.occupancy[(u + 1) % n])


# -- Phase 1 -------------------------------------------------------------------------


def _phase1_symmetric(config, rep) -> dict[int, Direction]:
    frame = symmetry_frame(config, rep)
    if frame is None:
        return {}
    dev, dod, dax = frame.even_distance, frame.odd_distance, frame.robot_axes_distance
    even, odd = frame.sym_even_pair, frame.sym_odd_pair
    toward = frame.toward_mirror
    out = {}
    if dev == dod + 1:
        if dax % 2 == 0:
            for u in even:
                out[u] = toward[u] if dev > 2 else toward[u].opposite
        elif dax != 1:
            for u in odd:
                out[u] = toward[u].opposite
        else:
            for u in even:
                out[u] = toward[u]
    else:
        if dev > 2 and dax == 1:
            # even pair, each robot in a 1.block with its same-side neighbour
            for u in even:
                out[u] = toward[u]
        if dax != 1:
            # odd pair, not glued to a same-side robot
            for u in odd:
                out[u] = toward[u].opposite
    return out


def _closest_isolated_to_block(config, rep, block) -> dict[int, Direction]:
    cands = {}
    for u in rep.isolated_robots:
        for direction, (other, gap) in occupied_neighbors(config, u).items():
            if other in block:
                best = cands.get(u)
                if best is None or gap < best[0]:
                    cands[u] = (gap, {direction})
                elif gap == best[0]:
                    best[1].add(direction)
    if not cands:
        return {}
    m = min(g for g, _ in cands.values())
    chosen = {u: dirs for u, (g, dirs) in cands.items() if g == m}
    if len(chosen) > 1 or any(len(d) > 1 for d in chosen.values()):
        raise ProtocolAmbiguity(f"no unique closest isolated robot in asymmetric {config}")
    return {u: next(iter(dirs)) for u, dirs in chosen.items()}


def _phase1_asymmetric(config, rep) -> dict[int, Direction]:
    blocks = rep.d_blocks
    if len(blocks) != 1:
        return {}
    block = blocks[0]
    if len(block) == 2:
        return _closest_isolated_to_block(config, rep, block)
    if len(block) == 3:
        if rep.inter_distance > 1:
            first, last = block.nodes[0], block.nodes[-1]
            return {first: Direction.HIGHER, last: Direction.LOWER}
        out = {}
        for u, direction in _closest_isolated_to_block(config, rep, block).items():
            gap = occupied_neighbors(config, u)[direction][1]
            if gap >= 3:
                out[u] = direction
        return out
    return {}


def phase1_decisions(config, rep=None) -> dict[int, Decision]:
    rep = rep or classify(config)
    moves = _phase1_symmetric(config, rep) if rep.symmetric else _phase1_asymmetric(config, rep)
    return {u: Decision.move(d) for u, d in moves.items()}


def decide_phase1(config: RingConfig, me: int) -> Decision:
    if phase4_of(config) is not Phase4.PHASE1:
        raise ProtocolPreconditionViolation(f"{config} is not in Phase 1")
    return phase1_decisions(config).get(me, IDLE)


# -- Phase 2 -------------------------------------------------------------------------


def phase2_decisions(config, rep=None) -> dict[int, Decision]:
    rep = rep or classify(config)
    n = config.n
    occ = config.occupancy
    out = {}
    if rep.s_tower_plan:
        frame = symmetry_frame(config, rep)
        for u in config.occupied:
            direction = frame.toward_mirror[u]
            other, gap = occupied_neighbors(config, u)[direction]
            if gap == 2:
                out[u] = Decision.move(direction)
        return out
    if rep.a_tower_plan:
        for run in rep.one_blocks:
            if len(run) != 3:
                continue
            first, middle, last = run
            near_first = occ[(first - 2) % n] == 1 and occ[(first - 1) % n] == 0
            near_last = occ[(last + 2) % n] == 1 and occ[(last + 1) % n] == 0
            if near_first and not near_last:
                out[middle] = Decision.move(Direction.HIGHER)
            elif near_last and not near_first:
                out[middle] = Decision.move(Direction.LOWER)
        return out
    raise ProtocolPreconditionViolation(f"{config} holds no tower plan")


def decide_phase2(config: RingConfig, me: int) -> Decision:
    if phase4_of(config) is not Phase4.PHASE2:
        raise ProtocolPreconditionViolation(f"{config} is not in Phase 2")
    return phase2_decisions(config).get(me, IDLE)


# -- Phase 3 -------------------------------------------------------------------------


def _toward(u, target, n) -> Direction:
    return Direction.HIGHER if (target - u) % n < (u - target) % n else Direction.LOWER


def phase3_decisions(config, rep=None) -> dict[int, Decision]:
    rep = rep or classify(config)
    n = config.n
    occ = config.occupancy
    if len(rep.towers) != 1 or occ[rep.towers[0]] != 2:
        raise ProtocolPreconditionViolation(f"Phase 3 needs exactly one tower of two robots: {config}")
    tower = rep.towers[0]
    singles = [u for u in config.occupied if occ[u] == 1]
    dist = {u: ring_distance(u, tower, n) for u in singles}
    out = {}
    if not any(dist[u] == 1 for u in singles):
        at_two = [u for u in singles if dist[u] == 2]
        for u in singles:
            if rep.tower_guide:
                if dist[u] != 2:
                    # walk toward the other isolated robot along the tower-free arc
                    for direction, (other, gap) in occupied_neighbors(config, u).items():
                        if other != tower and other in singles and gap >= 2:
                            out[u] = direction
            elif dist[u] == 2:
                toward_tower = _toward(u, tower, n)
                out[u] = toward_tower if _in_one_block(config, u) else toward_tower.opposite
            elif not at_two:
                if not _in_one_block(config, u) and dist[u] != (n - 1) // 2:
                    out[u] = _toward(u, tower, n).opposite
    else:
        for u in singles:
            if dist[u] != 1:
                # through the hole shared with the tower
                for direction, (other, gap) in occupied_neighbors(config, u).items():
                    if other == tower:
                        out[u] = direction
    return {u: Decision.move(d) for u, d in out.items()}


def decide_phase3(config: RingConfig, me: int) -> Decision:
    if phase4_of(config) is not Phase4.PHASE3:
        raise ProtocolPreconditionViolation(f"{config} is not in Phase 3")
    return phase3_decisions(config).get(me, IDLE)


class FourRobotOddProtocol(Protocol):
    name = "four-odd"
    k = K
    atom_only = True

    def check_ring(self, n: int) -> None:
        check_ring(n)

    def phase_of(self, config):
        return phase4_of(config)

    def _decisions(self, config):
        ph = phase4_of(config)
        rep = classify(config)
        if ph is Phase4.PHASE1:
            return phase1_decisions(config, rep)
        if ph is Phase4.PHASE2:
            return phase2_decisions(config, rep)
        if ph is Phase4.PHASE3:
            return phase3_decisions(config, rep)
        return {}


PROTOCOL = FourRobotOddProtocol()
