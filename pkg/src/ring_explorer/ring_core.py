"""Ring configurations, robot views and structural classification.

Nodes are indexed 0..n-1 in an internal global orientation that robots never
see.  A configuration stores the multiplicity of every node.  Everything a
protocol is allowed to use is derived from views, so all predicates here are
orientation-free: a pattern present in either orientation counts.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence

from .exceptions import ConfigFormatError


class Direction(enum.Enum):
    LOWER = -1  # toward_lower_index
    HIGHER = 1  # toward_higher_index

    @property
    def opposite(self) -> "Direction":
        return Direction.LOWER if self is Direction.HIGHER else Direction.HIGHER

    def step(self, node: int, n: int) -> int:
        return (node + self.value) % n


BOTH = frozenset({Direction.LOWER, Direction.HIGHER})


@dataclass(frozen=True)
class RingConfig:
    occupancy: tuple[int, ...]

    def __post_init__(self):
        occ = tuple(int(x) for x in self.occupancy)
        if not occ:
            raise ValueError("a ring needs at least one node")
        if any(x < 0 for x in occ):
            raise ValueError(f"negative multiplicity in {occ}")
        object.__setattr__(self, "occupancy", occ)

    @classmethod
    def from_positions(cls, n: int, positions) -> "RingConfig":
        occ = [0] * n
        for p in positions:
            occ[p % n] += 1
        return cls(tuple(occ))

    @classmethod
    def parse(cls, text: str) -> "RingConfig":
        """Read the ``n=<int>;occ=<csv>`` text format."""
        m = re.fullmatch(r"\s*n\s*=\s*(\d+)\s*;\s*occ\s*=\s*([\d,\s]+?)\s*", text)
        if not m:
            raise ConfigFormatError(f"expected 'n=<int>;occ=<csv>', got {text!r}")
        n = int(m.group(1))
        occ = tuple(int(x) for x in m.group(2).split(",") if x.strip())
        if len(occ) != n:
            raise ConfigFormatError(f"n={n} but {len(occ)} multiplicities given")
        return cls(occ)

    def format(self) -> str:
        return f"n={self.n};occ={','.join(map(str, self.occupancy))}"

    def __str__(self):
        return self.format()

    def __len__(self):
        return len(self.occupancy)

    def __getitem__(self, node: int) -> int:
        return self.occupancy[node % len(self.occupancy)]

    @property
    def n(self) -> int:
        return len(self.occupancy)

    @property
    def k(self) -> int:
        return sum(self.occupancy)

    @property
    def occupied(self) -> list[int]:
        return [i for i, x in enumerate(self.occupancy) if x]

    @property
    def towers(self) -> list[int]:
        return [i for i, x in enumerate(self.occupancy) if x >= 2]

    def positions(self) -> list[int]:
        """Robot positions as a sorted multiset."""
        return [i for i, x in enumerate(self.occupancy) for _ in range(x)]

    def rotate(self, r: int) -> "RingConfig":
        """Relabel so that old node ``i`` becomes node ``i + r``."""
        n = self.n
        return RingConfig(tuple(self.occupancy[(i - r) % n] for i in range(n)))

    def reflect(self, s: int = 0) -> "RingConfig":
        """Relabel by the reflection ``i -> s - i``."""
        n = self.n
        return RingConfig(tuple(self.occupancy[(s - i) % n] for i in range(n)))


class View(NamedTuple):
    forward: tuple[int, ...]
    backward: tuple[int, ...]


def view_at(config: RingConfig, node: int) -> View:
    n = config.n
    if not 0 <= node < n:
        raise IndexError(f"node {node} out of range for n={n}")
    occ = config.occupancy
    fwd = tuple(occ[(node + j) % n] for j in range(n))
    bwd = tuple(occ[(node - j) % n] for j in range(n))
    return View(fwd, bwd)


def is_symmetric_view(v: View) -> bool:
    return v.forward == v.backward


def view_toward(config: RingConfig, node: int, direction: Direction) -> tuple[int, ...]:
    v = view_at(config, node)
    return v.forward if direction is Direction.HIGHER else v.backward


# -- isometries -------------------------------------------------------------


@lru_cache(maxsize=None)
def isometries(n: int) -> tuple[tuple[tuple[int, ...], bool], ...]:
    """All 2n ring isometries as ``(source, reflects)``.

    ``source[i]`` is the old node that lands on new node ``i``; the identity
    comes first.
    """
    out = []
    for r in range(n):
        out.append((tuple((i - r) % n for i in range(n)), False))
    for s in range(n):
        out.append((tuple((s - i) % n for i in range(n)), True))
    return tuple(out)


def apply_isometry(seq: Sequence, source: Sequence[int]) -> tuple:
    return tuple(seq[j] for j in source)


def image_of(node: int, source: Sequence[int]) -> int:
    """Where ``node`` goes under the isometry given by ``source``."""
    return source.index(node)


def canonical_form(config: RingConfig) -> RingConfig:
    """Lexicographically smallest occupancy over all rotations and reflections."""
    occ = config.occupancy
    best = min(apply_isometry(occ, src) for src, _ in isometries(config.n))
    return RingConfig(best)


# -- distances ---------------------------------------------------------------


def ring_distance(a: int, b: int, n: int) -> int:
    diff = (b - a) % n
    return min(diff, n - diff)


def is_antipodal(a: int, b: int, n: int) -> bool:
    return n % 2 == 0 and a != b and (b - a) % n == n // 2


def arc_length(a: int, b: int, n: int, direction: Direction) -> int:
    """Edges walked from ``a`` to ``b`` moving in ``direction``."""
    return (b - a) % n if direction is Direction.HIGHER else (a - b) % n


def occupied_neighbors(config: RingConfig, node: int) -> dict[Direction, tuple[int, int]]:
    """Nearest occupied node on each side of ``node`` with the gap (edges) to it.

    When ``node`` is the only occupied node both entries point back to it with
    gap n.
    """
    n = config.n
    occ = config.occupancy
    out = {}
    for d in Direction:
        j, g = node, 0
        while True:
            j = (j + d.value) % n
            g += 1
            if occ[j] or g == n:
                break
        out[d] = (j, g)
    return out


def direction_toward(node: int, target: int, n: int) -> frozenset:
    """Directions along a shortest path; both when equidistant."""
    up = (target - node) % n
    down = (node - target) % n
    if up < down:
        return frozenset({Direction.HIGHER})
    if down < up:
        return frozenset({Direction.LOWER})
    return BOTH


# -- symmetry ----------------------------------------------------------------


@dataclass(frozen=True)
class Axis:
    """Reflection ``i -> (s - i) mod n`` fixing the configuration."""

    n: int
    s: int
    on_axis: tuple[int, ...]  # occupied nodes fixed by the reflection
    pairs: tuple[tuple[int, int], ...]  # off-axis occupied nodes paired by the reflection

    @property
    def nodes(self) -> tuple[int, ...]:
        """Ring nodes the axis passes through (0, 1 or 2 of them)."""
        return tuple(i for i in range(self.n) if (2 * i - self.s) % self.n == 0)

    def mirror(self, node: int) -> int:
        return (self.s - node) % self.n

    @property
    def kind(self) -> str:
        nodes = self.nodes
        if len(nodes) == 2:
            return "node-node"
        if len(nodes) == 1:
            return "node-edge"
        return "edge-edge"


def symmetry_axes(config: RingConfig) -> list[Axis]:
    n = config.n
    occ = config.occupancy
    axes = []
    for s in range(n):
        if all(occ[i] == occ[(s - i) % n] for i in range(n)):
            on, pairs = [], []
            for i in config.occupied:
                j = (s - i) % n
                if i == j:
                    on.append(i)
                elif i < j:
                    pairs.append((i, j))
            axes.append(Axis(n, s, tuple(on), tuple(pairs)))
    return axes


def is_symmetric(config: RingConfig) -> bool:
    n = config.n
    occ = config.occupancy
    return any(all(occ[i] == occ[(s - i) % n] for i in range(n)) for s in range(n))


# -- structure ---------------------------------------------------------------


@dataclass(frozen=True)
class Block:
    """Maximal run of occupied nodes spaced exactly ``d`` apart, in HIGHER order."""

    nodes: tuple[int, ...]
    d: int
    cyclic: bool = False

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, node):
        return node in self.nodes

    @property
    def borders(self) -> tuple[int, ...]:
        if self.cyclic:
            return ()
        return (self.nodes[0], self.nodes[-1])


@dataclass(frozen=True)
class StructureReport:
    n: int
    holes: tuple[tuple[int, int], ...]
    inter_distance: int | None
    d_blocks: tuple[Block, ...]
    towers: tuple[int, ...]
    isolated_robots: tuple[int, ...]
    symmetry_axes: tuple[Axis, ...]
    antipodal_pairs: tuple[tuple[int, int], ...]
    one_blocks: tuple[tuple[int, ...], ...]  # runs of >= 2 adjacent occupied nodes
    is_tower_chain: bool
    single_1block_of_k: bool
    s_tower_plan: bool
    a_tower_plan: bool
    tower_guide: bool
    tower_block: bool
    tower_sole: bool
    block_of: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def symmetric(self) -> bool:
        return bool(self.symmetry_axes)

    @property
    def d(self) -> int | None:
        return self.inter_distance

    def holes_at_least(self, size: int) -> list[tuple[int, int]]:
        return [h for h in self.holes if h[1] >= size]


def holes(config: RingConfig) -> list[tuple[int, int]]:
    """Maximal runs of empty nodes as ``(start, size)``, start in HIGHER order."""
    n = config.n
    occ = config.occupancy
    if not any(occ):
        return [(0, n)]
    out = []
    for i in range(n):
        if occ[i] == 0 and occ[(i - 1) % n] != 0:
            size = 0
            while occ[(i + size) % n] == 0:
                size += 1
            out.append((i, size))
    return sorted(out)


def d_blocks(config: RingConfig) -> tuple[int | None, list[Block], list[int]]:
    """Inter-distance, d.blocks and isolated robots; towers count as one node."""
    n = config.n
    nodes = config.occupied
    m = len(nodes)
    if m < 2:
        return None, [], list(nodes)
    gaps = [(nodes[(j + 1) % m] - nodes[j]) % n or n for j in range(m)]
    d = min(gaps)
    linked = [g == d for g in gaps]  # nodes[j] -> nodes[j+1]
    if all(linked):
        return d, [Block(tuple(nodes), d, cyclic=True)], []
    blocks, isolated = [], []
    start = next(j for j in range(m) if not linked[j - 1])
    j = start
    for _ in range(m):
        if not linked[j - 1]:
            run = [nodes[j]]
            t = j
            while linked[t]:
                t = (t + 1) % m
                run.append(nodes[t])
            if len(run) == 1:
                isolated.append(nodes[j])
            else:
                blocks.append(Block(tuple(run), d))
        j = (j + 1) % m
    blocks.sort(key=lambda b: b.nodes[0])
    isolated.sort()
    return d, blocks, isolated


def one_blocks(config: RingConfig) -> list[tuple[int, ...]]:
    """Runs of at least two consecutive occupied nodes (towers included)."""
    n = config.n
    occ = config.occupancy
    if all(occ):
        return [tuple(range(n))]
    runs = []
    for i in range(n):
        if occ[i] and not occ[(i - 1) % n]:
            run = [i]
            while occ[(run[-1] + 1) % n]:
                run.append((run[-1] + 1) % n)
            if len(run) >= 2:
                runs.append(tuple(run))
    return sorted(runs)


def _pattern_any_orientation(config: RingConfig, pattern) -> bool:
    """True if ``pattern(occ_at)`` holds for some anchor node and orientation."""
    n = config.n
    occ = config.occupancy
    for i in range(n):
        for sign in (1, -1):
            if pattern(lambda j, i=i, sign=sign: occ[(i + sign * j) % n]):
                return True
    return False


def _is_tower_chain(config: RingConfig) -> bool:
    def pat(at):
        return (
            at(-1) == 0
            and at(0) == 1
            and at(1) == 1
            and at(2) == 1
            and at(3) == 0
            and at(4) >= 2
        )

    return config.n >= 6 and _pattern_any_orientation(config, pat)


def _is_tower_guide(config: RingConfig) -> bool:
    def pat(at):
        return at(0) >= 2 and at(1) == 0 and at(2) == 1 and at(3) == 0 and at(4) == 1

    return config.n >= 5 and _pattern_any_orientation(config, pat)


@lru_cache(maxsize=200_000)
def _classify(occ: tuple[int, ...]) -> StructureReport:
    config = RingConfig(occ)
    n = config.n
    d, blocks, isolated = d_blocks(config)
    towers = tuple(config.towers)
    axes = tuple(symmetry_axes(config))
    runs = one_blocks(config)
    symmetric = bool(axes)
    nodes = config.occupied
    antipodal = tuple(
        (a, b) for x, a in enumerate(nodes) for b in nodes[x + 1:] if is_antipodal(a, b, n)
    )
    towerless = not towers

    single_1block = (
        towerless
        and len(nodes) >= 2
        and len(runs) == 1
        and len(runs[0]) == len(nodes)
    )

    s_plan = False
    if towerless and symmetric and len(runs) >= 2:
        for a in runs:
            for b in runs:
                if a is not b and (b[0] - a[-1]) % n == 2:
                    s_plan = True

    a_plan = False
    if towerless and not symmetric and d == 1:
        for run in runs:
            if len(run) != 3:
                continue
            for end, sign in ((run[0], -1), (run[-1], 1)):
                far = (end + 2 * sign) % n
                if (
                    occ[(end + sign) % n] == 0
                    and occ[far] == 1
                    and far in isolated
                ):
                    a_plan = True

    t_block = False
    if len(towers) == 1:
        t = towers[0]
        t_block = occ[(t - 1) % n] == 1 and occ[(t + 1) % n] == 1

    t_sole = False
    if towers and symmetric:
        t_sole = any(not any(t in run for t in towers) for run in runs)

    block_of = {}
    for b in blocks:
        for u in b.nodes:
            block_of[u] = b

    return StructureReport(
        n=n,
        holes=tuple(holes(config)),
        inter_distance=d,
        d_blocks=tuple(blocks),
        towers=towers,
        isolated_robots=tuple(isolated),
        symmetry_axes=axes,
        antipodal_pairs=antipodal,
        one_blocks=tuple(runs),
        is_tower_chain=_is_tower_chain(config),
        single_1block_of_k=single_1block,
        s_tower_plan=s_plan,
        a_tower_plan=a_plan,
        tower_guide=_is_tower_guide(config),
        tower_block=t_block,
        tower_sole=t_sole,
        block_of=block_of,
    )


def classify(config: RingConfig) -> StructureReport:
    if config.k < 1:
        raise ValueError("classify needs at least one robot")
    return _classify(config.occupancy)
