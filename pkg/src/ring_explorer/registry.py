from __future__ import annotations

from pathlib import Path

from . import protocol_five, protocol_four_odd
from .strawman import AwayFromDistanceTwo, BackAndForth, RuleTableProtocol, TowardDistanceTwo

_STRAWMEN = {
    cls.name: cls() for cls in (TowardDistanceTwo, AwayFromDistanceTwo, BackAndForth)
}

# protocol id -> (protocol, default semantics)
PROTOCOL_IDS = {
    "five-atom": (protocol_five.PROTOCOL, "atom"),
    "five-corda": (protocol_five.PROTOCOL, "corda"),
    "four-odd-atom": (protocol_four_odd.PROTOCOL, "atom"),
    **{name: (p, "atom") for name, p in _STRAWMEN.items()},
}

_BY_NAME = {p.name: p for p, _ in PROTOCOL_IDS.values()}


def get_protocol(name: str):
    """Protocol object for a protocol id, a protocol name, or a JSON rule file path."""
    if name in PROTOCOL_IDS:
        return PROTOCOL_IDS[name][0]
    if name in _BY_NAME:
        return _BY_NAME[name]
    if Path(name).is_file():
        return RuleTableProtocol.load(name)
    raise KeyError(f"unknown protocol {name!r}; known: {sorted(PROTOCOL_IDS)}")


def default_semantics(name: str) -> str:
    return PROTOCOL_IDS.get(name, (None, "atom"))[1]
