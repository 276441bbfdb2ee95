"""Scalability benchmark: load N copies of one heavy profile end to end.

Each copy gets a unique synthetic MUD-URL under the original authority, so
manufacturer-style abstractions still match across copies.  Reports
wall-clock per phase (parse, resolve, merge+prune, export) plus peak memory.
"""

from __future__ import annotations

import json
import resource
import time

from mudscope.algebra import KERNEL_NAME
from mudscope.export import graph_to_dict
from mudscope.parser import MUD_CONTAINER, parse_mud_file
from mudscope.topology import ConnectivityGraph


def _peak_memory_mb() -> float:
    # ru_maxrss is KiB on Linux.
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024.0


def make_copies(document: str, copies: int) -> list[str]:
    """N variants of the document with unique MUD-URLs, same authority."""
    data = json.loads(document)
    base_url = data[MUD_CONTAINER]["mud-url"]
    prefix = base_url.rsplit("/", 1)[0]
    out = []
    for i in range(copies):
        data[MUD_CONTAINER]["mud-url"] = f"{prefix}/bench-copy-{i}.json"
        out.append(json.dumps(data))
    return out


def run_bench(document: str, copies: int, strict: bool = False) -> dict:
    documents = make_copies(document, copies)
    phases: dict[str, float] = {}

    start = time.perf_counter()
    profiles = []
    for i, doc in enumerate(documents):
        profile, report = parse_mud_file(doc, file_ref=f"copy-{i}")
        if profile is None:
            raise ValueError(f"benchmark profile does not parse: {report.to_json_line()}")
        profiles.append(profile)
    phases["parse"] = time.perf_counter() - start

    graph = ConnectivityGraph(strict=strict)
    start = time.perf_counter()
    selections = []
    for profile in profiles:
        others = list(graph.profiles.values())
        graph.profiles[profile.id] = profile
        for other in others:
            selections.append((profile, other, *graph._select_pair(profile, other)))
            selections.append((other, profile, *graph._select_pair(other, profile)))
    phases["resolve"] = time.perf_counter() - start

    start = time.perf_counter()
    for src, dst, src_aces, dst_aces in selections:
        graph._compute_pair(src, dst, src_aces, dst_aces)
    for profile in profiles:
        graph._add_external_links(profile)
        graph._add_promises(profile)
    phases["merge_prune"] = time.perf_counter() - start

    start = time.perf_counter()
    # Stream the canonical encoding instead of materializing one huge string;
    # at 512 copies the export runs to hundreds of megabytes.
    encoder = json.JSONEncoder(indent=2, sort_keys=True)
    export_bytes = 1  # trailing newline
    for chunk in encoder.iterencode(graph_to_dict(graph)):
        export_bytes += len(chunk)
    phases["export"] = time.perf_counter() - start

    return {
        "copies": copies,
        "kernel": KERNEL_NAME,
        "phases": {k: round(v, 4) for k, v in phases.items()},
        "totalSeconds": round(sum(phases.values()), 4),
        "peakMemoryMb": round(_peak_memory_mb(), 1),
        "nodes": len(graph.nodes()),
        "links": len(graph.links),
        "promises": len(graph.promises),
        "exportBytes": export_bytes,
    }
