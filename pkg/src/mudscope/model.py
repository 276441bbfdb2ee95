"""Immutable domain types: layer values, protocol stacks, ACEs, profiles, promises.

Everything here is a frozen value object with no I/O; all other modules build
on these types.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

PORT_MIN = 0
PORT_MAX = 65535

#: Default finite layer domains used by test universes.
DEFAULT_NETWORKS = frozenset({"IPv4", "IPv6"})
DEFAULT_TRANSPORTS = frozenset({"TCP", "UDP", "ICMP"})


class LayerKind(enum.Enum):
    ANY = "any"
    NAMED = "named"
    PORT_SET = "ports"


def _normalize_intervals(intervals) -> tuple[tuple[int, int], ...]:
    """Sort, clamp-check, and merge overlapping or adjacent port intervals."""
    items = sorted((int(lo), int(hi)) for lo, hi in intervals)
    for lo, hi in items:
        if lo > hi:
            raise ValueError(f"empty port interval {lo}-{hi}")
        if lo < PORT_MIN or hi > PORT_MAX:
            raise ValueError(f"port interval {lo}-{hi} out of range")
    merged: list[tuple[int, int]] = []
    for lo, hi in items:
        if merged and lo <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return tuple(merged)


@dataclass(frozen=True)
class LayerValue:
    """A value at one protocol-stack layer: named protocols, a port set, or 'any'."""

    kind: LayerKind
    names: frozenset[str] = frozenset()
    ports: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.kind is LayerKind.ANY:
            if self.names or self.ports:
                raise ValueError("'any' carries no members")
        elif self.kind is LayerKind.NAMED:
            if not self.names or self.ports:
                raise ValueError("named layer value needs >=1 name and no ports")
        elif self.kind is LayerKind.PORT_SET:
            if not self.ports or self.names:
                raise ValueError("port-set layer value needs >=1 interval and no names")
            if self.ports != _normalize_intervals(self.ports):
                raise ValueError("port intervals are not normalized")

    @staticmethod
    def any_() -> "LayerValue":
        return _ANY

    @staticmethod
    def named(*names: str) -> "LayerValue":
        return LayerValue(LayerKind.NAMED, names=frozenset(names))

    @staticmethod
    def port_set(intervals) -> "LayerValue":
        return LayerValue(LayerKind.PORT_SET, ports=_normalize_intervals(intervals))

    @staticmethod
    def single_port(port: int) -> "LayerValue":
        return LayerValue.port_set([(port, port)])

    @property
    def is_any(self) -> bool:
        return self.kind is LayerKind.ANY

    def render(self) -> str:
        """Human/export rendering: 'any', sorted protocol names, or 'n' / 'n-m'."""
        if self.kind is LayerKind.ANY:
            return "any"
        if self.kind is LayerKind.NAMED:
            return ",".join(sorted(self.names))
        parts = [str(lo) if lo == hi else f"{lo}-{hi}" for lo, hi in self.ports]
        return ",".join(parts)


_ANY = LayerValue(LayerKind.ANY)

ANY = _ANY


class Direction(enum.Enum):
    FROM_DEVICE = "from-device"
    TO_DEVICE = "to-device"


@dataclass(frozen=True)
class ProtocolStack:
    """One ACE's four-layer tuple plus direction metadata.

    Layers are ordered network, transport, source port, destination port.
    """

    network: LayerValue
    transport: LayerValue
    src_port: LayerValue
    dst_port: LayerValue
    direction: Direction = Direction.FROM_DEVICE

    def __post_init__(self) -> None:
        for name in ("network", "transport"):
            if getattr(self, name).kind is LayerKind.PORT_SET:
                raise ValueError(f"{name} layer must be named or any")
        for name in ("src_port", "dst_port"):
            if getattr(self, name).kind is LayerKind.NAMED:
                raise ValueError(f"{name} layer must be a port set or any")

    @property
    def layers(self) -> tuple[LayerValue, LayerValue, LayerValue, LayerValue]:
        return (self.network, self.transport, self.src_port, self.dst_port)

    def with_direction(self, direction: Direction) -> "ProtocolStack":
        return ProtocolStack(self.network, self.transport, self.src_port,
                             self.dst_port, direction)

    def render(self) -> str:
        return "[" + ",".join(v.render() for v in self.layers) + "]"


class EndpointKind(enum.Enum):
    DOMAIN_NAME = "domain-name"
    LOCAL_NETWORKS = "local-networks"
    MANUFACTURER = "manufacturer"
    SAME_MANUFACTURER = "same-manufacturer"
    CONTROLLER = "controller"
    MY_CONTROLLER = "my-controller"
    MODEL = "model"


#: Endpoint kinds that carry a value (DNS name, authority, class URI, MUD-URL).
VALUED_KINDS = frozenset({
    EndpointKind.DOMAIN_NAME,
    EndpointKind.MANUFACTURER,
    EndpointKind.CONTROLLER,
    EndpointKind.MODEL,
})

#: Endpoint kinds that bind an ACE to another loaded device.
DEVICE_KINDS = frozenset({
    EndpointKind.LOCAL_NETWORKS,
    EndpointKind.MANUFACTURER,
    EndpointKind.SAME_MANUFACTURER,
    EndpointKind.MODEL,
})


@dataclass(frozen=True)
class AceEndpoint:
    kind: EndpointKind
    value: str = ""

    def __post_init__(self) -> None:
        if (self.kind in VALUED_KINDS) != bool(self.value):
            raise ValueError(f"endpoint kind {self.kind.value} and value {self.value!r} disagree")


@dataclass(frozen=True)
class Ace:
    name: str
    endpoint: AceEndpoint
    stack: ProtocolStack


@dataclass(frozen=True)
class DeviceProfile:
    """A parsed MUD file: identity plus resolved inbound/outbound ACE lists."""

    id: str
    mud_url: str
    authority: str
    systeminfo: str = ""
    mfg_name: str = ""
    model_name: str = ""
    cache_validity: int = 48
    is_supported: bool = True
    local: bool = True
    from_device: tuple[Ace, ...] = ()
    to_device: tuple[Ace, ...] = ()

    def __post_init__(self) -> None:
        if self.authority != self.authority.lower():
            raise ValueError("authority must be lowercase")
        for ace in self.from_device:
            if ace.stack.direction is not Direction.FROM_DEVICE:
                raise ValueError(f"ace {ace.name} direction does not match from-device list")
        for ace in self.to_device:
            if ace.stack.direction is not Direction.TO_DEVICE:
                raise ValueError(f"ace {ace.name} direction does not match to-device list")


@dataclass(frozen=True)
class ControllerPromise:
    """A deferred controller/my-controller binding awaiting a class-to-hosts mapping."""

    promise_id: str
    device_id: str
    kind: EndpointKind
    class_uri: str
    assigned_hosts: tuple[str, ...] = ()
    stacks: tuple[ProtocolStack, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in (EndpointKind.CONTROLLER, EndpointKind.MY_CONTROLLER):
            raise ValueError("promise kind must be controller or my-controller")

    @property
    def pending(self) -> bool:
        return not self.assigned_hosts


@dataclass(frozen=True)
class Universe:
    """Finite candidate sets per layer, used to concretize stacks in oracles."""

    networks: frozenset[str] = DEFAULT_NETWORKS
    transports: frozenset[str] = DEFAULT_TRANSPORTS
    ports: frozenset[int] = frozenset({0})

    @staticmethod
    def from_stacks(stacks, sentinel_port: int = 64999) -> "Universe":
        """Universe covering the given stacks: default names plus every port
        mentioned and one fresh sentinel port."""
        networks = set(DEFAULT_NETWORKS)
        transports = set(DEFAULT_TRANSPORTS)
        ports: set[int] = {sentinel_port}
        for stack in stacks:
            networks.update(stack.network.names)
            transports.update(stack.transport.names)
            for layer in (stack.src_port, stack.dst_port):
                for lo, hi in layer.ports:
                    ports.add(lo)
                    ports.add(hi)
        return Universe(frozenset(networks), frozenset(transports), frozenset(ports))


def _concretize_layer(value: LayerValue, domain) -> set:
    if value.kind is LayerKind.ANY:
        return set(domain)
    if value.kind is LayerKind.NAMED:
        return set(value.names) & set(domain)
    return {p for p in domain if any(lo <= p <= hi for lo, hi in value.ports)}


def concretize(stack: ProtocolStack, universe: Universe) -> set[tuple]:
    """Exact set of concrete (network, transport, sport, dport) tuples the
    stack matches within the universe."""
    nets = _concretize_layer(stack.network, universe.networks)
    trans = _concretize_layer(stack.transport, universe.transports)
    sports = _concretize_layer(stack.src_port, universe.ports)
    dports = _concretize_layer(stack.dst_port, universe.ports)
    return set(itertools.product(nets, trans, sports, dports))
