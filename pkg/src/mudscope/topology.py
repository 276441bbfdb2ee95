"""Resolve endpoint abstractions across loaded profiles into a connectivity graph.

The graph engine owns the loaded DeviceProfiles, the directed flow links
between devices and external hosts, and the controller promises awaiting an
admin-supplied class-to-hosts mapping.  Link stacks are always the pruned
traversal of the merged ACE cross product recomputed from the two profiles in
isolation, so load order never matters.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, replace

from mudscope.algebra import merge_acls
from mudscope.errors import (
    AlreadyFulfilled,
    DuplicateProfile,
    EmptyHostList,
    UnknownDevice,
    UnknownNode,
    UnknownPromise,
)
from mudscope.model import (
    Ace,
    ControllerPromise,
    DeviceProfile,
    Direction,
    EndpointKind,
    ProtocolStack,
    DEVICE_KINDS,
)
from mudscope.tree import build_ace_tree, collect_leaves, prune_ace_tree_detailed, traverse


class NodeKind(enum.Enum):
    DEVICE = "Device"
    EXTERNAL_HOST = "ExternalHost"
    CONTROLLER_CLASS = "ControllerClass"
    LOCAL_NETWORK = "LocalNetwork"
    GATEWAY = "Gateway"


@dataclass(frozen=True)
class GraphNode:
    id: str
    kind: NodeKind
    label: str
    mud_url: str = ""


@dataclass(frozen=True)
class ProvenanceEntry:
    kind: str
    source_aces: tuple[str, ...] = ()
    target_aces: tuple[str, ...] = ()
    one_sided: bool = False


@dataclass(frozen=True)
class FlowLink:
    source: str
    target: str
    stacks: tuple[ProtocolStack, ...]
    provenance: tuple[ProvenanceEntry, ...]


@dataclass(frozen=True)
class RedundancyItem:
    device_id: str
    ace_name: str
    reason: str


def match_rule(ace: Ace, owner: DeviceProfile, candidate: DeviceProfile) -> bool:
    """Does this ACE's endpoint abstraction select the candidate device?"""
    kind = ace.endpoint.kind
    if kind is EndpointKind.LOCAL_NETWORKS:
        return owner.local and candidate.local
    if kind is EndpointKind.MANUFACTURER:
        return candidate.authority == ace.endpoint.value.lower()
    if kind is EndpointKind.SAME_MANUFACTURER:
        return bool(owner.authority) and owner.authority == candidate.authority
    if kind is EndpointKind.MODEL:
        return candidate.mud_url == ace.endpoint.value
    return False  # domain-name / controller / my-controller bind to non-Device nodes


def prune_stacks(stacks: list[ProtocolStack],
                 direction: Direction = Direction.FROM_DEVICE) -> list[ProtocolStack]:
    """Tree-prune a merged stack list back to its covering stacks."""
    if not stacks:
        return []
    root, _ = prune_ace_tree_detailed(build_ace_tree(stacks))
    return traverse(root, direction=direction)


def _promise_id(device_id: str, kind: EndpointKind, class_uri: str) -> str:
    digest = hashlib.sha1(f"{device_id}|{kind.value}|{class_uri}".encode()).hexdigest()
    return f"promise-{digest[:10]}"


class ConnectivityGraph:
    """Single-writer graph over loaded MUD profiles.

    ``strict`` switches the merge to the literal layer-subset guard;
    ``one_sided`` also emits links justified by only one side's policy,
    flagged in provenance.
    """

    def __init__(self, strict: bool = False, one_sided: bool = False) -> None:
        self.strict = strict
        self.one_sided = one_sided
        self.profiles: dict[str, DeviceProfile] = {}
        self.links: dict[tuple[str, str], FlowLink] = {}
        self.promises: dict[str, ControllerPromise] = {}
        self._promise_aces: dict[str, tuple[Ace, ...]] = {}
        self._promise_links: dict[str, list[tuple[str, str]]] = {}
        self._aux_nodes: dict[str, GraphNode] = {}
        self._pair_cache: dict = {}
        #: Optional callback (context, built_tree, pruned_tree) for --dump-trees.
        self.tree_observer = None

    # -- mutation ---------------------------------------------------------

    def add_profile(self, profile: DeviceProfile) -> None:
        if profile.id in self.profiles:
            raise DuplicateProfile(profile.id)
        self.profiles[profile.id] = profile
        for other in self.profiles.values():
            if other.id == profile.id:
                continue
            self._link_pair(profile, other)
            self._link_pair(other, profile)
        self._add_external_links(profile)
        self._add_promises(profile)

    def remove_profile(self, device_id: str) -> None:
        if device_id not in self.profiles:
            raise UnknownDevice(device_id)
        del self.profiles[device_id]
        for key in [k for k in self.links if device_id in k]:
            del self.links[key]
        for pid in [p for p, pr in self.promises.items() if pr.device_id == device_id]:
            for key in self._promise_links.pop(pid, []):
                self.links.pop(key, None)
            del self.promises[pid]
            self._promise_aces.pop(pid, None)

    def fulfill_promise(self, promise_id: str, hosts: list) -> None:
        """Bind a pending promise to hosts (existing node ids or new names)."""
        promise = self.promises.get(promise_id)
        if promise is None:
            raise UnknownPromise(promise_id)
        if not promise.pending:
            raise AlreadyFulfilled(promise_id)
        if not hosts:
            raise EmptyHostList(promise_id)
        host_ids = []
        for host in hosts:
            host_id = host if isinstance(host, str) else host["name"]
            if host_id not in self.profiles and host_id not in self._aux_nodes:
                kind = NodeKind.CONTROLLER_CLASS
                if not isinstance(host, str) and host.get("kind"):
                    kind = NodeKind(host["kind"])
                self._aux_nodes[host_id] = GraphNode(host_id, kind, host_id)
            host_ids.append(host_id)
        self.promises[promise_id] = replace(promise, assigned_hosts=tuple(host_ids))
        aces = self._promise_aces.get(promise_id, ())
        created: list[tuple[str, str]] = []
        for host_id in host_ids:
            for direction in (Direction.FROM_DEVICE, Direction.TO_DEVICE):
                chosen = [a for a in aces if a.stack.direction is direction]
                if not chosen:
                    continue
                names = tuple(a.name for a in chosen)
                if direction is Direction.FROM_DEVICE:
                    key = (promise.device_id, host_id)
                    entry = ProvenanceEntry(promise.kind.value, source_aces=names)
                else:
                    key = (host_id, promise.device_id)
                    entry = ProvenanceEntry(promise.kind.value, target_aces=names)
                self._merge_link(key, self._prune(f"{key[0]}->{key[1]}",
                                                  [a.stack for a in chosen]), (entry,))
                created.append(key)
        self._promise_links[promise_id] = created

    def fulfill_by_class(self, class_uri: str, hosts: list) -> int:
        """Fulfill every pending promise naming the given class URI."""
        count = 0
        for pid, promise in list(self.promises.items()):
            if promise.class_uri == class_uri and promise.pending:
                self.fulfill_promise(pid, hosts)
                count += 1
        return count

    # -- queries ----------------------------------------------------------

    def node_ids(self) -> set[str]:
        ids = set(self.profiles)
        for source, target in self.links:
            ids.add(source)
            ids.add(target)
        return ids

    def nodes(self) -> list[GraphNode]:
        out = [GraphNode(p.id, NodeKind.DEVICE, p.systeminfo or p.id, p.mud_url)
               for p in self.profiles.values()]
        live = self.node_ids()
        out.extend(node for node_id, node in self._aux_nodes.items() if node_id in live)
        return sorted(out, key=lambda n: n.id)

    def query_flow(self, src: str, dst: str) -> list[ProtocolStack]:
        ids = self.node_ids()
        for node_id in (src, dst):
            if node_id not in ids:
                raise UnknownNode(node_id)
        link = self.links.get((src, dst))
        return list(link.stacks) if link else []

    def redundancy_report(self) -> list[RedundancyItem]:
        """Intra-file redundancy: ACEs whose stacks vanish inside their own
        per-destination pruning trees."""
        out: list[RedundancyItem] = []
        for profile in sorted(self.profiles.values(), key=lambda p: p.id):
            for aces in (profile.from_device, profile.to_device):
                groups: dict[tuple, list[Ace]] = {}
                for ace in aces:
                    key = (ace.endpoint.kind.value, ace.endpoint.value,
                           ace.stack.direction.value)
                    groups.setdefault(key, []).append(ace)
                for group in groups.values():
                    out.extend(self._redundant_in_group(profile.id, group))
        return out

    @staticmethod
    def _redundant_in_group(device_id: str, group: list[Ace]) -> list[RedundancyItem]:
        if len(group) < 2:
            return []
        root = build_ace_tree([a.stack for a in group])
        out = []
        for leaf in collect_leaves(root):
            keeper = group[leaf.stack_indices[0]]
            for idx in leaf.stack_indices[1:]:
                out.append(RedundancyItem(device_id, group[idx].name,
                                          f"duplicate of {keeper.name}"))
        _, events = prune_ace_tree_detailed(root)
        for event in events:
            for idx in event.stack_indices:
                out.append(RedundancyItem(device_id, group[idx].name,
                                          f"covered by {event.covered_by_path}"))
        return out

    # -- internals --------------------------------------------------------

    def _prune(self, context: str, stacks: list[ProtocolStack],
               direction: Direction = Direction.FROM_DEVICE) -> list[ProtocolStack]:
        if not stacks:
            return []
        root = build_ace_tree(stacks)
        pruned, _ = prune_ace_tree_detailed(root)
        if self.tree_observer is not None:
            self.tree_observer(context, root, pruned)
        return traverse(pruned, direction=direction)

    def _select_pair(self, src: DeviceProfile,
                     dst: DeviceProfile) -> tuple[list[Ace], list[Ace]]:
        """ACEs on both sides whose abstraction selects the other device."""
        src_aces = [a for a in src.from_device
                    if a.endpoint.kind in DEVICE_KINDS and match_rule(a, src, dst)]
        dst_aces = [a for a in dst.to_device
                    if a.endpoint.kind in DEVICE_KINDS and match_rule(a, dst, src)]
        return src_aces, dst_aces

    def _link_pair(self, src: DeviceProfile, dst: DeviceProfile) -> None:
        src_aces, dst_aces = self._select_pair(src, dst)
        self._compute_pair(src, dst, src_aces, dst_aces)

    def _compute_pair(self, src: DeviceProfile, dst: DeviceProfile,
                      src_aces: list[Ace], dst_aces: list[Ace]) -> None:
        one_sided = False
        if src_aces and dst_aces:
            key = (tuple(src_aces), tuple(dst_aces), self.strict)
            cached = self._pair_cache.get(key)
            if cached is None:
                merged = merge_acls([a.stack for a in src_aces],
                                    [a.stack for a in dst_aces], strict=self.strict)
                stacks = tuple(self._prune(f"{src.id}->{dst.id}", merged))
                cached = (stacks, _group_provenance(src_aces, dst_aces, False))
                self._pair_cache[key] = cached
            stacks, provenance = cached
            if not stacks:
                return
            self.links[(src.id, dst.id)] = FlowLink(src.id, dst.id, stacks,
                                                    provenance)
            return
        if self.one_sided and (src_aces or dst_aces):
            one_sided = True
            side = src_aces or dst_aces
            stacks = tuple(self._prune(f"{src.id}->{dst.id}",
                                       [a.stack for a in side]))
        else:
            return
        if not stacks:
            return
        provenance = _group_provenance(src_aces, dst_aces, one_sided)
        self.links[(src.id, dst.id)] = FlowLink(src.id, dst.id, stacks, provenance)

    def _add_external_links(self, profile: DeviceProfile) -> None:
        for aces, outbound in ((profile.from_device, True), (profile.to_device, False)):
            by_host: dict[str, list[Ace]] = {}
            for ace in aces:
                if ace.endpoint.kind is EndpointKind.DOMAIN_NAME:
                    by_host.setdefault(ace.endpoint.value, []).append(ace)
            for host, host_aces in by_host.items():
                if host not in self._aux_nodes:
                    self._aux_nodes[host] = GraphNode(host, NodeKind.EXTERNAL_HOST, host)
                stacks = tuple(self._prune(f"{profile.id}<->{host}",
                                           [a.stack for a in host_aces]))
                names = tuple(a.name for a in host_aces)
                if outbound:
                    key = (profile.id, host)
                    entry = ProvenanceEntry("domain-name", source_aces=names)
                else:
                    key = (host, profile.id)
                    entry = ProvenanceEntry("domain-name", target_aces=names)
                self._merge_link(key, list(stacks), (entry,))

    def _merge_link(self, key: tuple[str, str], stacks: list[ProtocolStack],
                    provenance: tuple[ProvenanceEntry, ...]) -> None:
        existing = self.links.get(key)
        if existing is not None:
            stacks = self._prune(f"{key[0]}->{key[1]}", list(existing.stacks) + stacks)
            provenance = existing.provenance + provenance
        self.links[key] = FlowLink(key[0], key[1], tuple(stacks), provenance)

    def _add_promises(self, profile: DeviceProfile) -> None:
        groups: dict[tuple[EndpointKind, str], list[Ace]] = {}
        for ace in list(profile.from_device) + list(profile.to_device):
            kind = ace.endpoint.kind
            if kind is EndpointKind.CONTROLLER:
                groups.setdefault((kind, ace.endpoint.value), []).append(ace)
            elif kind is EndpointKind.MY_CONTROLLER:
                groups.setdefault((kind, profile.mud_url), []).append(ace)
        for (kind, class_uri), aces in groups.items():
            pid = _promise_id(profile.id, kind, class_uri)
            self.promises[pid] = ControllerPromise(
                promise_id=pid, device_id=profile.id, kind=kind,
                class_uri=class_uri, stacks=tuple(a.stack for a in aces))
            self._promise_aces[pid] = tuple(aces)


def _group_provenance(src_aces: list[Ace], dst_aces: list[Ace],
                      one_sided: bool) -> tuple[ProvenanceEntry, ...]:
    kinds: list[str] = []
    for ace in src_aces + dst_aces:
        if ace.endpoint.kind.value not in kinds:
            kinds.append(ace.endpoint.kind.value)
    out = []
    for kind in sorted(kinds):
        out.append(ProvenanceEntry(
            kind,
            source_aces=tuple(a.name for a in src_aces if a.endpoint.kind.value == kind),
            target_aces=tuple(a.name for a in dst_aces if a.endpoint.kind.value == kind),
            one_sided=one_sided))
    return tuple(out)
