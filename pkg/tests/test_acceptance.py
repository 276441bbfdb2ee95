"""Acceptance suite: one test (and one printed pass line) per criterion.

Criteria 1-3 assert frozen worked-example values exactly.  Criteria 4 and 5
check the merge and pruning algorithms against an independent concretization
oracle on seeded random inputs.  Criteria 6-8 cover determinism, the parser
round-trip, and scalability.
"""

import itertools
import json
import random
import time

from helpers import (
    FIXTURES,
    MERGE_DEV1_FROM,
    MERGE_DEV2_TO,
    MERGE_EXPECTED,
    PRUNING_EXPECTED,
    PRUNING_ORIGINAL,
    load_profile,
    read_fixture,
    stack,
)
from mudscope.algebra import merge_acls
from mudscope.export import graph_to_json
from mudscope.model import ANY, LayerValue, ProtocolStack, Universe, concretize
from mudscope.parser import format_correct, parse_mud_file, serialize_profile
from mudscope.topology import ConnectivityGraph
from mudscope.tree import (
    build_ace_tree,
    collect_leaves,
    pair_subset,
    prune_ace_tree,
    prune_ace_tree_detailed,
    structurally_equal,
    traverse,
)

RANDOM_ROUNDS = 1000


def _passed(number: int, title: str) -> None:
    print(f"criterion {number} ({title}): PASS")


# -- randomized input generation ---------------------------------------------

_NETWORKS = [None, None, "IPv4", "IPv6"]
_TRANSPORTS = [None, None, "TCP", "UDP", "ICMP"]
_PORT_SPECS = [None, None, 80, 400, 5000, (80, 443), (400, 480), (1, 65535)]


def _layer(spec) -> LayerValue:
    if spec is None:
        return ANY
    if isinstance(spec, str):
        return LayerValue.named(spec)
    if isinstance(spec, int):
        return LayerValue.single_port(spec)
    return LayerValue.port_set([spec])


def _random_stack(rng: random.Random) -> ProtocolStack:
    return ProtocolStack(_layer(rng.choice(_NETWORKS)),
                         _layer(rng.choice(_TRANSPORTS)),
                         _layer(rng.choice(_PORT_SPECS)),
                         _layer(rng.choice(_PORT_SPECS)))


def _union_concretized(stacks, universe) -> set:
    out: set = set()
    for item in stacks:
        out |= concretize(item, universe)
    return out


# -- criteria ----------------------------------------------------------------

def test_criterion_1_merge_worked_example():
    started = time.perf_counter()
    merged = merge_acls(MERGE_DEV1_FROM, MERGE_DEV2_TO)
    assert set(merged) == MERGE_EXPECTED
    assert len(merged) == len(MERGE_EXPECTED)
    assert time.perf_counter() - started < 1.0
    _passed(1, "two-device ACL merge matches the frozen expected stack set exactly")


def test_criterion_2_prune_worked_example():
    started = time.perf_counter()
    pruned = prune_ace_tree(build_ace_tree(PRUNING_ORIGINAL))
    assert traverse(pruned) == PRUNING_EXPECTED
    assert time.perf_counter() - started < 1.0
    _passed(2, "tree pruning yields the frozen four covering stacks")


def test_criterion_3_pruning_micro_examples():
    _, events = prune_ace_tree_detailed(build_ace_tree(PRUNING_ORIGINAL))
    by_path = {e.pruned_path: e.covered_by_path for e in events}
    # Sibling rule: a narrower port pair vanishes under its any/any sibling.
    assert by_path["IPv4/TCP/[80,43]"] == "IPv4/TCP/[any,any]"
    # Cousin rule: the IPv6 leaf is covered by the same ports under any/UDP.
    assert by_path["IPv6/UDP/[90,120]"] == "any/UDP/[90,120]"
    # Cousin rule at the transport level: UDP is inside the any wildcard.
    assert by_path["IPv4/UDP/[800,520]"] == "IPv4/any/[800,520]"
    _passed(3, "sibling and cousin pruning micro-examples hold individually")


def test_criterion_4_merge_matches_concretization_oracle():
    rng = random.Random(0xACE1)
    for _ in range(RANDOM_ROUNDS):
        src = [_random_stack(rng) for _ in range(rng.randint(1, 4))]
        dst = [_random_stack(rng) for _ in range(rng.randint(1, 4))]
        universe = Universe.from_stacks(src + dst)
        merged = merge_acls(src, dst)
        expected = (_union_concretized(src, universe)
                    & _union_concretized(dst, universe))
        assert _union_concretized(merged, universe) == expected
    _passed(4, f"{RANDOM_ROUNDS} random ACL merges match the set-intersection "
               "oracle")


def test_criterion_5_pruning_preserves_semantics():
    rng = random.Random(0xACE2)
    for _ in range(RANDOM_ROUNDS):
        stacks = [_random_stack(rng) for _ in range(rng.randint(1, 8))]
        universe = Universe.from_stacks(stacks)
        built = build_ace_tree(stacks)
        pruned = prune_ace_tree(built)
        # Semantics preservation over the finite universe.
        assert (_union_concretized(traverse(pruned), universe)
                == _union_concretized(traverse(built), universe))
        # Idempotence.
        assert structurally_equal(prune_ace_tree(pruned), pruned)
        # Post-prune sibling antichain: no leaf is covered by a sibling.
        for leaf in collect_leaves(pruned):
            for sibling in leaf.parent.children:
                if sibling is not leaf and sibling.is_leaf:
                    assert leaf.label != sibling.label
                    assert not pair_subset(leaf.label, sibling.label)
    _passed(5, f"{RANDOM_ROUNDS} random trees keep their semantics, prune "
               "idempotently, and end as sibling antichains")


def test_criterion_6_topology_is_order_independent():
    profiles = [load_profile(f"perm_{letter}.json") for letter in "abcdefgh"]
    exports = set()
    for permutation in itertools.permutations(profiles):
        graph = ConnectivityGraph()
        for profile in permutation:
            graph.add_profile(profile)
        exports.add(graph_to_json(graph))
    assert len(exports) == 1

    graph = ConnectivityGraph()
    for profile in profiles[:-1]:
        graph.add_profile(profile)
    baseline = graph_to_json(graph)
    graph.add_profile(profiles[-1])
    assert graph_to_json(graph) in exports
    graph.remove_profile(profiles[-1].id)
    assert graph_to_json(graph) == baseline
    _passed(6, "all 40320 load orders export byte-identically and add/remove "
               "is an exact inverse")


def test_criterion_7_parser_round_trip():
    corpus = sorted(FIXTURES.glob("*.json"))
    assert len(corpus) >= 12
    parsed = 0
    for path in corpus:
        document = path.read_text(encoding="utf-8")
        corrected, _ = format_correct(document)
        again, report = format_correct(corrected)
        assert again == corrected, path.name
        assert not [i for i in report.items if i.severity.value != "Error"], path.name

        profile, _ = parse_mud_file(document)
        if profile is None:
            continue
        parsed += 1
        text = serialize_profile(profile)
        second, reparse_report = parse_mud_file(text)
        assert second == profile, (path.name, reparse_report.to_json_line())
        assert serialize_profile(second) == text, path.name
    assert parsed >= 10
    kinds = {a.endpoint.kind
             for name in ("seven_abstractions.json",)
             for a in (lambda p: p.from_device + p.to_device)(load_profile(name))}
    assert len(kinds) == 7
    _passed(7, f"round-trip fixpoint over {len(corpus)} fixtures incl. all "
               "seven abstractions; formatter is idempotent")


def test_criterion_8_scalability_benchmark():
    from mudscope.bench import run_bench

    result = run_bench(read_fixture("heavy.json"), 512)
    assert result["copies"] == 512
    assert set(result["phases"]) == {"parse", "resolve", "merge_prune", "export"}
    assert result["totalSeconds"] < 526.0, result
    assert result["peakMemoryMb"] < 1754.0, result
    print("criterion 8 phase timings:", json.dumps(result["phases"]),
          f"total={result['totalSeconds']}s peak={result['peakMemoryMb']}MB "
          f"kernel={result['kernel']}")
    _passed(8, "512-copy benchmark finishes inside the wall-clock and memory "
               "budget")
