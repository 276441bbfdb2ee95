"""Parse, validate, format-correct, and serialize MUD files.

Input follows the RFC 8520 JSON tree: an ``ietf-mud:mud`` container whose
from/to-device policies reference named ACLs in the
``ietf-access-control-list:acls`` section.  Every ACE's matches translate to
an endpoint abstraction plus a four-layer protocol stack.

One tolerated extension to the RFC tree: ``source-port``/``destination-port``
nodes directly inside the ``ipv4``/``ipv6`` match container express port
constraints without pinning the transport layer (needed to round-trip stacks
whose transport is 'any').
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from urllib.parse import urlparse

from mudscope.model import (
    ANY,
    Ace,
    AceEndpoint,
    DeviceProfile,
    Direction,
    EndpointKind,
    LayerKind,
    LayerValue,
    ProtocolStack,
)


class Severity(enum.Enum):
    ERROR = "Error"
    WARNING = "Warning"
    FIXED = "FixedAutomatically"


@dataclass(frozen=True)
class ReportItem:
    severity: Severity
    path: str
    message: str
    code: str

    def to_dict(self) -> dict:
        return {"severity": self.severity.value, "path": self.path,
                "message": self.message, "code": self.code}


@dataclass
class ValidationReport:
    file_ref: str = ""
    items: list[ReportItem] = field(default_factory=list)

    def add(self, severity: Severity, path: str, message: str, code: str) -> None:
        self.items.append(ReportItem(severity, path, message, code))

    @property
    def errors(self) -> list[ReportItem]:
        return [i for i in self.items if i.severity is Severity.ERROR]

    @property
    def has_errors(self) -> bool:
        return bool(self.errors)

    def to_dict(self) -> dict:
        return {"file": self.file_ref, "items": [i.to_dict() for i in self.items]}

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


MUD_CONTAINER = "ietf-mud:mud"
ACL_CONTAINER = "ietf-access-control-list:acls"

_PROTOCOL_NUMBERS = {6: "TCP", 17: "UDP", 1: "ICMP", 58: "ICMP"}
_TRANSPORT_NUMBERS = {"TCP": 6, "UDP": 17, "ICMP": 1}

_ACL_TYPE_NETWORK = {"ipv4-acl-type": "IPv4", "ipv6-acl-type": "IPv6"}
_ACL_TYPE_RANK = {"ipv4-acl-type": 0, "ipv6-acl-type": 1}

_MUD_MATCH_KINDS = {
    "controller": EndpointKind.CONTROLLER,
    "my-controller": EndpointKind.MY_CONTROLLER,
    "local-networks": EndpointKind.LOCAL_NETWORKS,
    "manufacturer": EndpointKind.MANUFACTURER,
    "same-manufacturer": EndpointKind.SAME_MANUFACTURER,
    "model": EndpointKind.MODEL,
}

#: The parser-assigned endpoint for ACEs that name no peer at all.
OPEN_INTERNET = "*"


def canonical_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def authority_of(mud_url: str) -> str:
    host = urlparse(mud_url).hostname
    return (host or "").lower()


def parse_mud_file(document: str, file_ref: str = "", profile_id: str | None = None,
                   local: bool = True) -> tuple[DeviceProfile | None, ValidationReport]:
    """Parse a MUD document into a DeviceProfile.

    Returns ``(profile, report)``; the profile is None whenever the report
    carries at least one Error.
    """
    report = ValidationReport(file_ref=file_ref)
    try:
        data = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        report.add(Severity.ERROR, "", f"not valid JSON: {exc}", "MalformedJson")
        return None, report
    if not isinstance(data, dict) or MUD_CONTAINER not in data:
        report.add(Severity.ERROR, "", f"document has no {MUD_CONTAINER} container",
                   "MissingMudContainer")
        return None, report

    mud = data[MUD_CONTAINER]
    if not isinstance(mud, dict):
        report.add(Severity.ERROR, f"/{MUD_CONTAINER}", "container is not an object",
                   "MissingMudContainer")
        return None, report

    version = mud.get("mud-version")
    if version != 1:
        report.add(Severity.WARNING, f"/{MUD_CONTAINER}/mud-version",
                   f"unsupported mud-version {version!r}; proceeding",
                   "UnsupportedMudVersion")

    mud_url = mud.get("mud-url")
    if not isinstance(mud_url, str) or not mud_url:
        report.add(Severity.ERROR, f"/{MUD_CONTAINER}/mud-url",
                   "missing or empty mud-url", "MissingMudUrl")
        return None, report

    acl_section = data.get(ACL_CONTAINER, {})
    acl_list = acl_section.get("acl", []) if isinstance(acl_section, dict) else []
    acls_by_name = {a.get("name"): (i, a) for i, a in enumerate(acl_list)
                    if isinstance(a, dict)}

    directions = (("from-device-policy", Direction.FROM_DEVICE),
                  ("to-device-policy", Direction.TO_DEVICE))
    aces: dict[Direction, list[Ace]] = {d: [] for _, d in directions}
    for policy_key, direction in directions:
        policy = mud.get(policy_key)
        if policy is None:
            continue
        refs = policy.get("access-lists", {}).get("access-list", [])
        resolved = []
        for ref_idx, ref in enumerate(refs):
            name = ref.get("name") if isinstance(ref, dict) else None
            if name not in acls_by_name:
                report.add(Severity.ERROR,
                           f"/{MUD_CONTAINER}/{policy_key}/access-lists/access-list/{ref_idx}",
                           f"policy references ACL {name!r} absent from the file",
                           "UnresolvedAclReference")
                continue
            resolved.append(acls_by_name[name])
        # Canonical ACE ordering: ipv4-typed ACLs, then ipv6, then untyped.
        resolved.sort(key=lambda item: _ACL_TYPE_RANK.get(item[1].get("type"), 2))
        for acl_idx, acl in resolved:
            aces[direction].extend(
                _parse_acl(acl, acl_idx, direction, report))

    if report.has_errors:
        return None, report

    profile = DeviceProfile(
        id=profile_id or mud_url,
        mud_url=mud_url,
        authority=authority_of(mud_url),
        systeminfo=mud.get("systeminfo", ""),
        mfg_name=mud.get("mfg-name", ""),
        model_name=mud.get("model-name", ""),
        cache_validity=mud.get("cache-validity", 48),
        is_supported=bool(mud.get("is-supported", True)),
        local=local,
        from_device=tuple(aces[Direction.FROM_DEVICE]),
        to_device=tuple(aces[Direction.TO_DEVICE]),
    )
    return profile, report


def _parse_acl(acl: dict, acl_idx: int, direction: Direction,
               report: ValidationReport) -> list[Ace]:
    base = f"/{ACL_CONTAINER}/acl/{acl_idx}"
    network_name = _ACL_TYPE_NETWORK.get(acl.get("type"))
    network = LayerValue.named(network_name) if network_name else ANY
    ace_entries = acl.get("aces", {}).get("ace", [])
    if isinstance(ace_entries, dict):
        report.add(Severity.WARNING, f"{base}/aces/ace",
                   "single ACE object where a list is required", "SingleAceObject")
        ace_entries = [ace_entries]
    seen: set[str] = set()
    out: list[Ace] = []
    for ace_idx, entry in enumerate(ace_entries):
        path = f"{base}/aces/ace/{ace_idx}"
        name = entry.get("name", f"ace-{acl_idx}-{ace_idx}")
        if name in seen:
            report.add(Severity.ERROR, f"{path}/name",
                       f"duplicate ACE name {name!r} within ACL", "DuplicateAceName")
            continue
        seen.add(name)
        forwarding = entry.get("actions", {}).get("forwarding", "accept")
        if forwarding != "accept":
            report.add(Severity.WARNING, f"{path}/actions/forwarding",
                       f"unsupported action {forwarding!r}; ACE kept as allow",
                       "UnsupportedAction")
        parsed = _parse_matches(entry.get("matches", {}), f"{path}/matches",
                                direction, network, report)
        if parsed is None:
            continue
        endpoint, stack = parsed
        out.append(Ace(name=name, endpoint=endpoint, stack=stack))
    return out


def _parse_port_node(node, path: str, report: ValidationReport) -> LayerValue | None:
    def as_port(value, leaf: str) -> int | None:
        if isinstance(value, str) and value.isdigit():
            report.add(Severity.WARNING, f"{path}/{leaf}",
                       f"port given as string {value!r}; coerced to integer",
                       "StringPort")
            return int(value)
        if isinstance(value, int):
            return value
        report.add(Severity.WARNING, f"{path}/{leaf}",
                   f"unusable port value {value!r}; layer left as any", "BadPortValue")
        return None

    operator = node.get("operator", "eq")
    if operator == "eq":
        port = as_port(node.get("port"), "port")
        return LayerValue.single_port(port) if port is not None else None
    if operator == "range":
        lower = as_port(node.get("lower-port"), "lower-port")
        upper = as_port(node.get("upper-port"), "upper-port")
        if lower is None or upper is None:
            return None
        return LayerValue.port_set([(lower, upper)])
    report.add(Severity.WARNING, f"{path}/operator",
               f"unsupported port operator {operator!r}; layer left as any",
               "UnsupportedPortOperator")
    return None


def _parse_matches(matches: dict, path: str, direction: Direction,
                   network: LayerValue, report: ValidationReport):
    endpoints: list[AceEndpoint] = []
    transport = ANY
    src_port = ANY
    dst_port = ANY

    mud_match = matches.get("ietf-mud:mud", {})
    for key, value in mud_match.items():
        kind = _MUD_MATCH_KINDS.get(key)
        if kind is None:
            report.add(Severity.WARNING, f"{path}/ietf-mud:mud/{key}",
                       f"unknown MUD match node {key!r}", "UnknownMatchNode")
            continue
        endpoints.append(AceEndpoint(kind, value if isinstance(value, str) else ""))

    dns_value: str | None = None
    for net_key in ("ipv4", "ipv6"):
        container = matches.get(net_key)
        if container is None:
            continue
        for key, value in container.items():
            cpath = f"{path}/{net_key}/{key}"
            if key == "protocol":
                name = _PROTOCOL_NUMBERS.get(value)
                if name is None:
                    report.add(Severity.WARNING, cpath,
                               f"unknown protocol number {value!r}; transport left as any",
                               "UnknownProtocolNumber")
                else:
                    transport = LayerValue.named(name)
            elif key in ("ietf-acldns:src-dnsname", "ietf-acldns:dst-dnsname"):
                preferred = ("ietf-acldns:dst-dnsname"
                             if direction is Direction.FROM_DEVICE
                             else "ietf-acldns:src-dnsname")
                if dns_value is None or key == preferred:
                    dns_value = value
            elif key == "source-port":
                parsed = _parse_port_node(value, cpath, report)
                if parsed is not None:
                    src_port = parsed
            elif key == "destination-port":
                parsed = _parse_port_node(value, cpath, report)
                if parsed is not None:
                    dst_port = parsed
            else:
                report.add(Severity.WARNING, cpath,
                           f"unknown {net_key} match node {key!r}", "UnknownMatchNode")

    for transport_key in ("tcp", "udp"):
        container = matches.get(transport_key)
        if container is None:
            continue
        if transport.is_any:
            transport = LayerValue.named(transport_key.upper())
        for key, value in container.items():
            cpath = f"{path}/{transport_key}/{key}"
            if key == "source-port":
                parsed = _parse_port_node(value, cpath, report)
                if parsed is not None:
                    src_port = parsed
            elif key == "destination-port":
                parsed = _parse_port_node(value, cpath, report)
                if parsed is not None:
                    dst_port = parsed
            elif key == "ietf-mud:direction-initiated":
                pass  # TCP initiation is not part of the merge algebra
            else:
                report.add(Severity.WARNING, cpath,
                           f"unknown {transport_key} match node {key!r}",
                           "UnknownMatchNode")

    for key in matches:
        if key not in ("ipv4", "ipv6", "tcp", "udp", "ietf-mud:mud"):
            report.add(Severity.WARNING, f"{path}/{key}",
                       f"unknown match container {key!r}", "UnknownMatchNode")

    if dns_value is not None:
        endpoints.append(AceEndpoint(EndpointKind.DOMAIN_NAME, dns_value))

    if len(endpoints) > 1:
        kinds = ", ".join(e.kind.value for e in endpoints)
        report.add(Severity.ERROR, path,
                   f"ACE carries conflicting endpoint abstractions: {kinds}",
                   "ConflictingMatch")
        return None
    if endpoints:
        endpoint = endpoints[0]
    else:
        report.add(Severity.WARNING, path,
                   "ACE names no endpoint; treated as open-Internet domain-name '*'",
                   "MissingEndpoint")
        endpoint = AceEndpoint(EndpointKind.DOMAIN_NAME, OPEN_INTERNET)

    if transport.names == frozenset({"ICMP"}):
        if not (src_port.is_any and dst_port.is_any):
            report.add(Severity.WARNING, path,
                       "ICMP carries no ports; port layers forced to any",
                       "PortsIgnoredForIcmp")
        src_port = ANY
        dst_port = ANY

    stack = ProtocolStack(network, transport, src_port, dst_port, direction=direction)
    return endpoint, stack


def format_correct(document: str) -> tuple[str, ValidationReport]:
    """Apply safe, semantics-preserving fixes and return canonical text.

    Fixes: string ports coerced to integers, a lone ACE object wrapped into a
    list, canonical key ordering and whitespace.  Idempotent byte-exact.
    """
    report = ValidationReport()
    try:
        data = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        report.add(Severity.ERROR, "", f"not valid JSON: {exc}", "MalformedJson")
        return document, report

    def walk(node, path: str) -> None:
        if isinstance(node, dict):
            for key, value in node.items():
                child_path = f"{path}/{key}"
                if key == "ace" and isinstance(value, dict):
                    node[key] = [value]
                    report.add(Severity.FIXED, child_path,
                               "wrapped single ACE object into a list", "AceListWrapped")
                    walk(node[key], child_path)
                    continue
                if (key in ("port", "lower-port", "upper-port")
                        and isinstance(value, str) and value.isdigit()):
                    node[key] = int(value)
                    report.add(Severity.FIXED, child_path,
                               f"coerced port string {value!r} to integer", "PortCoerced")
                    continue
                walk(value, child_path)
        elif isinstance(node, list):
            for idx, value in enumerate(node):
                walk(value, f"{path}/{idx}")

    walk(data, "")
    corrected = canonical_json(data)
    if corrected != document and not report.items:
        report.add(Severity.FIXED, "", "normalized key order and whitespace",
                   "FormattingNormalized")
    return corrected, report


def serialize_profile(profile: DeviceProfile) -> str:
    """Canonical MUD JSON for a profile; re-parsing yields an equal profile."""
    mud: dict = {
        "mud-version": 1,
        "mud-url": profile.mud_url,
        "cache-validity": profile.cache_validity,
        "is-supported": profile.is_supported,
    }
    if profile.systeminfo:
        mud["systeminfo"] = profile.systeminfo
    if profile.mfg_name:
        mud["mfg-name"] = profile.mfg_name
    if profile.model_name:
        mud["model-name"] = profile.model_name

    acls: list[dict] = []
    for policy_key, aces, tag in (
            ("from-device-policy", profile.from_device, "frdev"),
            ("to-device-policy", profile.to_device, "todev")):
        groups: dict[str, list[Ace]] = {"ipv4": [], "ipv6": [], "any": []}
        for ace in aces:
            groups[_network_group(ace.stack.network)].append(ace)
        refs = []
        for group_key in ("ipv4", "ipv6", "any"):
            members = groups[group_key]
            if not members:
                continue
            acl: dict = {"name": f"mud-{tag}-{group_key}"}
            if group_key == "ipv4":
                acl["type"] = "ipv4-acl-type"
            elif group_key == "ipv6":
                acl["type"] = "ipv6-acl-type"
            acl["aces"] = {"ace": [_serialize_ace(a, group_key) for a in members]}
            acls.append(acl)
            refs.append({"name": acl["name"]})
        mud[policy_key] = {"access-lists": {"access-list": refs}}

    return canonical_json({MUD_CONTAINER: mud, ACL_CONTAINER: {"acl": acls}})


def _network_group(network: LayerValue) -> str:
    if network.is_any:
        return "any"
    if network.names == frozenset({"IPv4"}):
        return "ipv4"
    if network.names == frozenset({"IPv6"}):
        return "ipv6"
    raise ValueError(f"network layer {network.render()} is not expressible in a MUD file")


def _port_node(layer: LayerValue) -> dict:
    if len(layer.ports) != 1:
        raise ValueError("multi-interval port sets are not expressible in one ACE")
    lo, hi = layer.ports[0]
    if lo == hi:
        return {"operator": "eq", "port": lo}
    return {"operator": "range", "lower-port": lo, "upper-port": hi}


def _serialize_ace(ace: Ace, group_key: str) -> dict:
    stack = ace.stack
    net_key = "ipv6" if group_key == "ipv6" else "ipv4"
    containers: dict[str, dict] = {}

    def container(key: str) -> dict:
        return containers.setdefault(key, {})

    endpoint = ace.endpoint
    if endpoint.kind is EndpointKind.DOMAIN_NAME:
        if endpoint.value != OPEN_INTERNET:
            leaf = ("ietf-acldns:dst-dnsname"
                    if stack.direction is Direction.FROM_DEVICE
                    else "ietf-acldns:src-dnsname")
            container(net_key)[leaf] = endpoint.value
    else:
        key = endpoint.kind.value
        container("ietf-mud:mud")[key] = endpoint.value if endpoint.value else [None]

    transport = stack.transport
    port_container_key: str | None = None
    if not transport.is_any:
        if len(transport.names) != 1:
            raise ValueError("multi-protocol transport layers are not expressible")
        name = next(iter(transport.names))
        if name in ("TCP", "UDP"):
            port_container_key = name.lower()
            container(port_container_key)
        elif name == "ICMP":
            container(net_key)["protocol"] = _TRANSPORT_NUMBERS[name]
        else:
            raise ValueError(f"transport {name!r} is not expressible in a MUD file")

    for leaf, layer in (("source-port", stack.src_port),
                        ("destination-port", stack.dst_port)):
        if layer.is_any:
            continue
        target = port_container_key or net_key
        container(target)[leaf] = _port_node(layer)

    return {"name": ace.name, "matches": containers,
            "actions": {"forwarding": "accept"}}
