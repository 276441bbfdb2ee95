"""Shared builders and frozen expected values for the test suite."""

from __future__ import annotations

from pathlib import Path

from mudscope.model import ANY, Direction, LayerValue, ProtocolStack
from mudscope.parser import parse_mud_file

FIXTURES = Path(__file__).parent / "fixtures"


def read_fixture(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def load_profile(name: str, local: bool = True):
    """Parse a fixture that is expected to be error-free."""
    profile, report = parse_mud_file(read_fixture(name), file_ref=name, local=local)
    assert profile is not None, f"{name} failed to parse: {report.to_json_line()}"
    return profile


def layer(spec) -> LayerValue:
    """Shorthand: None/'any' -> any, str -> named, int -> single port,
    (lo, hi) -> port range."""
    if spec is None or spec == "any":
        return ANY
    if isinstance(spec, str):
        return LayerValue.named(spec)
    if isinstance(spec, int):
        return LayerValue.single_port(spec)
    if isinstance(spec, tuple):
        return LayerValue.port_set([spec])
    raise TypeError(f"bad layer spec {spec!r}")


def stack(net, trans, sport, dport,
          direction: Direction = Direction.FROM_DEVICE) -> ProtocolStack:
    return ProtocolStack(layer(net), layer(trans), layer(sport), layer(dport),
                         direction=direction)


#: The eight input stacks of the tree-pruning worked example.
PRUNING_ORIGINAL = [
    stack("IPv4", "TCP", 80, 43),
    stack("IPv4", "TCP", None, None),
    stack("IPv4", "UDP", 800, 520),
    stack("IPv4", None, 800, 520),
    stack("IPv6", "UDP", 90, 120),
    stack(None, "TCP", 400, 480),
    stack(None, "UDP", 90, 120),
    stack(None, None, 400, 480),
]

#: The four stacks that survive pruning.
PRUNING_EXPECTED = [
    stack("IPv4", "TCP", None, None),
    stack("IPv4", None, 800, 520),
    stack(None, "UDP", 90, 120),
    stack(None, None, 400, 480),
]

#: Outbound stacks of the first two-ACE merge-example device.
MERGE_DEV1_FROM = [
    stack("IPv4", "UDP", None, None),
    stack(None, "TCP", 5000, None),
]

#: Inbound stacks of the second two-ACE merge-example device.
MERGE_DEV2_TO = [
    stack(None, None, 5000, 400, direction=Direction.TO_DEVICE),
    stack("IPv6", None, None, 8080, direction=Direction.TO_DEVICE),
]

#: The exact merge result for the two devices above, as an unordered set.
MERGE_EXPECTED = {
    stack("IPv4", "UDP", 5000, 400),
    stack(None, "TCP", 5000, 400),
    stack("IPv6", "TCP", 5000, 8080),
}
