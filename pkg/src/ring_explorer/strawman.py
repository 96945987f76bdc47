"""Four-robot strawman protocols from the even-ring impossibility argument.

They are complete decision functions, so the checker can search them for
livelocks and bad sinks like any other protocol.
"""
from __future__ import annotations

import json
from pathlib import Path

from .exceptions import ConfigFormatError, ProtocolPreconditionViolation
from .protocol import Decision, Protocol
from .ring_core import BOTH, Direction, RingConfig, is_symmetric_view, occupied_neighbors, view_at, view_toward


def _pick(config, u, directions) -> Decision | None:
    """Deterministic, view-based choice among candidate directions."""
    directions = frozenset(directions)
    if not directions:
        return None
    if len(directions) == 1:
        return Decision.move(directions)
    if is_symmetric_view(view_at(config, u)):
        return Decision.move(BOTH)
    best = max(directions, key=lambda d: view_toward(config, u, d))
    return Decision.move(best)


class _FourRobot(Protocol):
    k = 4

    def check_ring(self, n):
        if n < 5:
            raise ProtocolPreconditionViolation(f"{self.name} needs n >= 5")


class TowardDistanceTwo(_FourRobot):
    """Every robot moves toward a neighbouring robot two edges away."""

    name = "demo-4robot-naive"

    def _decisions(self, config):
        out = {}
        for u in config.occupied:
            nb = occupied_neighbors(config, u)
            dec = _pick(config, u, [d for d, (_, g) in nb.items() if g == 2])
            if dec:
                out[u] = dec
        return out


class AwayFromDistanceTwo(_FourRobot):
    """Move away from a robot two edges away; once adjacent, step toward the neighbour."""

    name = "demo-4robot-away"

    def _decisions(self, config):
        out = {}
        for u in config.occupied:
            nb = occupied_neighbors(config, u)
            adjacent = [d for d, (_, g) in nb.items() if g == 1]
            if adjacent:
                dec = _pick(config, u, adjacent)
            else:
                dec = _pick(config, u, [d.opposite for d, (_, g) in nb.items() if g == 2])
                if dec and dec.is_choice:
                    dec = None  # both neighbours at distance two: nowhere to retreat
            if dec:
                out[u] = dec
        return out


class BackAndForth(_FourRobot):
    """Retreat from a robot at distance two, come back to one at distance four."""

    name = "demo-4robot-back-and-forth"

    def _decisions(self, config):
        out = {}
        for u in config.occupied:
            nb = occupied_neighbors(config, u)
            away = [d.opposite for d, (_, g) in nb.items() if g == 2]
            back = [d for d, (_, g) in nb.items() if g == 4]
            dec = _pick(config, u, away) or _pick(config, u, back)
            if dec:
                out[u] = dec
        return out


class RuleTableProtocol(Protocol):
    """Protocol read from a JSON rule file.

    The file holds ``{"name": ..., "k": ..., "rules": [{"view": [...], "move": "ahead"}]}``.
    A robot moves in every direction whose oriented view matches a rule, so the
    table is anonymous and oblivious by construction.
    """

    def __init__(self, rules: dict, name: str = "rules", k: int | None = None):
        super().__init__()
        self.name = name
        self.k = k
        self.table = rules

    @classmethod
    def load(cls, path) -> "RuleTableProtocol":
        data = json.loads(Path(path).read_text())
        try:
            rules = {tuple(r["view"]): r.get("move", "ahead") for r in data["rules"]}
        except (KeyError, TypeError) as exc:
            raise ConfigFormatError(f"bad rule file {path}: {exc}") from exc
        return cls(rules, name=data.get("name", Path(path).stem), k=data.get("k"))

    def _decisions(self, config: RingConfig):
        out = {}
        for u in config.occupied:
            dirs = [d for d in Direction if self.table.get(view_toward(config, u, d)) == "ahead"]
            if dirs:
                out[u] = Decision.move(dirs)
        return out
