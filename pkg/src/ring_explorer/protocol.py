"""Decision type and the common protocol interface."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

from .ring_core import BOTH, Direction, RingConfig, is_symmetric_view, view_at


class DecisionKind(enum.Enum):
    IDLE = "idle"
    MOVE = "move"


@dataclass(frozen=True)
class Decision:
    kind: DecisionKind
    directions: frozenset = frozenset()

    @classmethod
    def move(cls, directions) -> "Decision":
        dirs = frozenset([directions] if isinstance(directions, Direction) else directions)
        if not dirs:
            raise ValueError("a move needs at least one direction")
        return cls(DecisionKind.MOVE, dirs)

    @property
    def is_move(self) -> bool:
        return self.kind is DecisionKind.MOVE

    @property
    def is_choice(self) -> bool:
        return len(self.directions) == 2

    def reflected(self) -> "Decision":
        return Decision(self.kind, frozenset(d.opposite for d in self.directions))

    def to_json(self):
        if not self.is_move:
            return "idle"
        return sorted(d.name.lower() for d in self.directions)

    def __repr__(self):
        if not self.is_move:
            return "Idle"
        return "Move(" + ",".join(sorted(d.name for d in self.directions)) + ")"


IDLE = Decision(DecisionKind.IDLE)


def symmetric_aware(config: RingConfig, node: int, directions) -> Decision:
    """A move whose direction set widens to both sides when the view is symmetric."""
    if is_symmetric_view(view_at(config, node)):
        return Decision.move(BOTH)
    return Decision.move(directions)


class Protocol:
    """Deterministic decision function of an anonymous oblivious protocol.

    Subclasses implement :meth:`_decisions`, which returns the decision of every
    occupied node for a configuration; robots sharing a node see the same view
    and therefore decide alike.
    """

    name = "protocol"
    k: int | None = None
    atom_only = False

    def check_ring(self, n: int) -> None:
        """Raise ProtocolPreconditionViolation if the protocol does not apply to size n."""

    def phase_of(self, config: RingConfig):
        return None

    def _decisions(self, config: RingConfig) -> dict[int, Decision]:
        raise NotImplementedError

    def decisions(self, config: RingConfig) -> dict[int, Decision]:
        return self._cached(config.occupancy)

    def decide(self, config: RingConfig, node: int) -> Decision:
        if not config.occupancy[node]:
            raise ValueError(f"no robot on node {node}")
        return self.decisions(config).get(node, IDLE)

    def is_terminal(self, config: RingConfig) -> bool:
        return not any(dec.is_move for dec in self.decisions(config).values())

    def __init__(self):
        self._cached = lru_cache(maxsize=500_000)(self._decisions_from_occ)

    def _decisions_from_occ(self, occ):
        out = self._decisions(RingConfig(occ))
        return {u: dec for u, dec in out.items() if dec.is_move}

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"
