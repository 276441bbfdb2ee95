"""Canonical graph exports: schema-1 JSON and DOT.

The JSON body carries no timestamps and sorts every collection, so identical
inputs produce byte-identical output regardless of load order.
"""

from __future__ import annotations

import json

from mudscope.model import ProtocolStack
from mudscope.topology import ConnectivityGraph, NodeKind

SCHEMA_VERSION = 1

_DOT_SHAPES = {
    NodeKind.DEVICE: "box",
    NodeKind.EXTERNAL_HOST: "ellipse",
    NodeKind.CONTROLLER_CLASS: "diamond",
    NodeKind.LOCAL_NETWORK: "ellipse",
    NodeKind.GATEWAY: "box",
}


def stack_to_dict(stack: ProtocolStack) -> dict:
    return {
        "network": stack.network.render(),
        "transport": stack.transport.render(),
        "srcPort": stack.src_port.render(),
        "dstPort": stack.dst_port.render(),
    }


def graph_to_dict(graph: ConnectivityGraph) -> dict:
    nodes = []
    for node in graph.nodes():
        entry = {"id": node.id, "kind": node.kind.value, "label": node.label}
        if node.mud_url:
            entry["mudUrl"] = node.mud_url
        nodes.append(entry)

    links = []
    # Many links share stack and provenance tuples (e.g. copies of one
    # profile); render each unique tuple once and reference it.
    stack_lists: dict[tuple, list] = {}
    provenance_lists: dict[tuple, list] = {}
    for key in sorted(graph.links):
        link = graph.links[key]
        provenance = provenance_lists.get(link.provenance)
        if provenance is None:
            provenance = []
            for item in link.provenance:
                entry = {"kind": item.kind,
                         "sourceAces": list(item.source_aces),
                         "targetAces": list(item.target_aces)}
                if item.one_sided:
                    entry["oneSided"] = True
                provenance.append(entry)
            provenance_lists[link.provenance] = provenance
        stacks = stack_lists.get(link.stacks)
        if stacks is None:
            stacks = [stack_to_dict(s) for s in link.stacks]
            stack_lists[link.stacks] = stacks
        links.append({
            "source": link.source,
            "target": link.target,
            "stacks": stacks,
            "provenance": provenance,
        })

    promises = []
    for pid in sorted(graph.promises):
        promise = graph.promises[pid]
        promises.append({
            "promiseId": promise.promise_id,
            "deviceId": promise.device_id,
            "kind": promise.kind.value,
            "classUri": promise.class_uri,
            "hosts": list(promise.assigned_hosts),
            "pending": promise.pending,
            "stacks": [stack_to_dict(s) for s in promise.stacks],
        })

    return {"version": SCHEMA_VERSION, "nodes": nodes, "links": links,
            "promises": promises}


def graph_to_json(graph: ConnectivityGraph) -> str:
    return json.dumps(graph_to_dict(graph), indent=2, sort_keys=True) + "\n"


def graph_to_dot(graph: ConnectivityGraph) -> str:
    lines = ["digraph mud {"]
    for node in graph.nodes():
        shape = _DOT_SHAPES[node.kind]
        label = node.label.replace('"', r"\"")
        lines.append(f'  "{node.id}" [label="{label}" shape={shape}];')
    for key in sorted(graph.links):
        link = graph.links[key]
        lines.append(f'  "{link.source}" -> "{link.target}" '
                     f'[label="{len(link.stacks)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def promise_ledger_to_json(graph: ConnectivityGraph) -> str:
    """Persistable promise ledger: fulfillments survive restarts."""
    entries = [{"promiseId": pid,
                "classUri": graph.promises[pid].class_uri,
                "hosts": list(graph.promises[pid].assigned_hosts)}
               for pid in sorted(graph.promises)]
    return json.dumps({"promises": entries}, indent=2, sort_keys=True) + "\n"


def apply_promise_ledger(graph: ConnectivityGraph, document: str) -> int:
    """Re-apply persisted fulfillments; unknown or pending-less entries are skipped."""
    data = json.loads(document)
    count = 0
    for entry in data.get("promises", []):
        hosts = entry.get("hosts", [])
        pid = entry.get("promiseId")
        if not hosts or pid not in graph.promises:
            continue
        if graph.promises[pid].pending:
            graph.fulfill_promise(pid, hosts)
            count += 1
    return count
