"""Unit tests for the connectivity graph engine."""

import json

import pytest

from helpers import MERGE_EXPECTED, load_profile, read_fixture, stack
from mudscope import errors
from mudscope.export import (
    apply_promise_ledger,
    graph_to_dict,
    graph_to_json,
    promise_ledger_to_json,
)
from mudscope.model import Ace, AceEndpoint, DeviceProfile, Direction, EndpointKind
from mudscope.parser import parse_mud_file
from mudscope.topology import ConnectivityGraph, NodeKind, match_rule


def _graph(*names: str, **kwargs) -> ConnectivityGraph:
    graph = ConnectivityGraph(**kwargs)
    for name in names:
        graph.add_profile(load_profile(name))
    return graph


class TestMatchRule:
    def setup_method(self):
        self.hub = load_profile("seven_abstractions.json")
        self.bulb = load_profile("minimal_domain_name.json")

    def _ace(self, name: str) -> Ace:
        for ace in self.hub.from_device + self.hub.to_device:
            if ace.name == name:
                return ace
        raise KeyError(name)

    def test_local_networks_needs_both_local(self):
        lan = self._ace("lan")
        assert match_rule(lan, self.hub, self.bulb)
        remote, _ = parse_mud_file(read_fixture("minimal_domain_name.json"),
                                   local=False)
        assert not match_rule(lan, self.hub, remote)

    def test_manufacturer_matches_authority(self):
        assert match_rule(self._ace("mfg-peer"), self.hub, self.bulb)
        assert not match_rule(self._ace("mfg-peer"), self.hub, self.hub)

    def test_same_manufacturer(self):
        pb = load_profile("perm_b.json")
        pc = load_profile("perm_c.json")
        family = next(a for a in pb.from_device if a.name == "pb-family")
        assert match_rule(family, pb, pc)
        assert not match_rule(family, pb, self.bulb)

    def test_model_matches_mud_url(self):
        assert match_rule(self._ace("twin"), self.hub, self.bulb)
        assert not match_rule(self._ace("twin"), self.hub, self.hub)

    def test_non_device_kinds_never_match(self):
        assert not match_rule(self._ace("cloud"), self.hub, self.bulb)
        assert not match_rule(self._ace("own-ctrl"), self.hub, self.bulb)


class TestDeviceLinks:
    def test_merge_example_pair(self):
        graph = _graph("merge_dev1.json", "merge_dev2.json")
        dev1 = "https://mfg1.example.com/dev1.json"
        dev2 = "https://mfg2.example.com/dev2.json"
        assert set(graph.query_flow(dev1, dev2)) == MERGE_EXPECTED
        # The fixtures mirror their policies, so the reverse flow merges to
        # the same three stacks.
        assert set(graph.query_flow(dev2, dev1)) == MERGE_EXPECTED

    def test_load_order_does_not_matter(self):
        forward = graph_to_json(_graph("merge_dev1.json", "merge_dev2.json"))
        backward = graph_to_json(_graph("merge_dev2.json", "merge_dev1.json"))
        assert forward == backward

    def test_remove_profile_restores_the_graph(self):
        graph = _graph("merge_dev1.json")
        baseline = graph_to_json(graph)
        graph.add_profile(load_profile("merge_dev2.json"))
        graph.remove_profile("https://mfg2.example.com/dev2.json")
        assert graph_to_json(graph) == baseline

    def test_remove_unknown_device(self):
        with pytest.raises(errors.UnknownDevice):
            ConnectivityGraph().remove_profile("nope")

    def test_duplicate_profile_rejected(self):
        graph = _graph("merge_dev1.json")
        with pytest.raises(errors.DuplicateProfile):
            graph.add_profile(load_profile("merge_dev1.json"))

    def test_strict_mode_prunes_partial_overlaps(self):
        graph = _graph("merge_dev1.json", "merge_dev2.json", strict=True)
        dev1 = "https://mfg1.example.com/dev1.json"
        dev2 = "https://mfg2.example.com/dev2.json"
        flows = set(graph.query_flow(dev1, dev2))
        assert flows < MERGE_EXPECTED

    def test_one_sided_links(self):
        # perm_a has outbound policy only; perm_e accepts local traffic.
        key = ("https://pe.example.com/pe.json", "https://pa.example.com/pa.json")
        plain = _graph("perm_a.json", "perm_e.json")
        assert key not in plain.links
        graph = _graph("perm_a.json", "perm_e.json", one_sided=True)
        assert key in graph.links
        assert all(entry.one_sided for entry in graph.links[key].provenance)


class TestExternalHosts:
    def test_domain_name_creates_host_nodes(self):
        graph = _graph("minimal_domain_name.json")
        nodes = {n.id: n for n in graph.nodes()}
        assert nodes["srv.example.com"].kind is NodeKind.EXTERNAL_HOST
        flows = graph.query_flow("https://bulbco.example.com/bulb.json",
                                 "srv.example.com")
        assert flows == [stack(None, "TCP", None, 443)]

    def test_inbound_domain_links_point_at_the_device(self):
        graph = _graph("heavy.json")
        flows = graph.query_flow("cloud.heavy.example.com",
                                 "https://heavy.example.com/camera.json")
        assert flows == [stack("IPv4", "TCP", 443, None)]


class TestPromises:
    def test_promise_creation(self):
        graph = _graph("merge_dev1.json")
        (promise,) = graph.promises.values()
        assert promise.kind is EndpointKind.MY_CONTROLLER
        assert promise.class_uri == "https://mfg1.example.com/dev1.json"
        assert promise.pending
        assert promise.stacks == (stack(None, "TCP", None, 8443),)

    def test_fulfill_adds_node_and_link(self):
        graph = _graph("merge_dev1.json")
        (pid,) = graph.promises
        graph.fulfill_promise(pid, ["ctrl.mfg1.example.com"])
        nodes = {n.id: n for n in graph.nodes()}
        assert nodes["ctrl.mfg1.example.com"].kind is NodeKind.CONTROLLER_CLASS
        flows = graph.query_flow("https://mfg1.example.com/dev1.json",
                                 "ctrl.mfg1.example.com")
        assert flows == [stack(None, "TCP", None, 8443)]
        assert not graph.promises[pid].pending

    def test_fulfill_errors(self):
        graph = _graph("merge_dev1.json")
        (pid,) = graph.promises
        with pytest.raises(errors.UnknownPromise):
            graph.fulfill_promise("promise-ffffffffff", ["h"])
        with pytest.raises(errors.EmptyHostList):
            graph.fulfill_promise(pid, [])
        graph.fulfill_promise(pid, ["h"])
        with pytest.raises(errors.AlreadyFulfilled):
            graph.fulfill_promise(pid, ["h2"])

    def test_fulfill_by_class(self):
        graph = _graph("perm_f.json", "heavy.json")
        count = graph.fulfill_by_class("https://ctrl.example.com/nvr", ["nvr.lan"])
        assert count == 1
        flows = graph.query_flow("https://heavy.example.com/camera.json", "nvr.lan")
        assert stack(None, "TCP", None, 8443) in flows

    def test_remove_profile_drops_its_promises_and_links(self):
        graph = _graph("merge_dev1.json")
        (pid,) = graph.promises
        graph.fulfill_promise(pid, ["ctrl.lan"])
        graph.remove_profile("https://mfg1.example.com/dev1.json")
        assert not graph.promises
        assert not graph.links
        assert graph.nodes() == []

    def test_promise_ledger_round_trip(self):
        graph = _graph("merge_dev1.json")
        (pid,) = graph.promises
        graph.fulfill_promise(pid, ["ctrl.lan"])
        ledger = promise_ledger_to_json(graph)
        fresh = _graph("merge_dev1.json")
        assert apply_promise_ledger(fresh, ledger) == 1
        assert graph_to_json(fresh) == graph_to_json(graph)


class TestRedundancyReport:
    def test_duplicates_and_covered_aces(self):
        lan = AceEndpoint(EndpointKind.LOCAL_NETWORKS)
        aces = (
            Ace("wide", lan, stack(None, "TCP", None, None)),
            Ace("narrow", lan, stack(None, "TCP", 80, 43)),
            Ace("narrow-again", lan, stack(None, "TCP", 80, 43)),
        )
        profile = DeviceProfile(id="d", mud_url="https://a.example.com/d.json",
                                authority="a.example.com", from_device=aces)
        graph = ConnectivityGraph()
        graph.add_profile(profile)
        report = {(i.ace_name, i.reason) for i in graph.redundancy_report()}
        assert ("narrow-again", "duplicate of narrow") in report
        assert ("narrow", "covered by any/TCP/[any,any]") in report

    def test_clean_profile_reports_nothing(self):
        graph = _graph("merge_dev1.json", "heavy.json")
        assert graph.redundancy_report() == []


class TestQueries:
    def test_query_flow_unknown_node(self):
        graph = _graph("merge_dev1.json")
        with pytest.raises(errors.UnknownNode):
            graph.query_flow("https://mfg1.example.com/dev1.json", "ghost")

    def test_unlinked_pair_yields_no_stacks(self):
        graph = _graph("merge_dev1.json", "perm_a.json")
        assert graph.query_flow("https://mfg1.example.com/dev1.json",
                                "https://pa.example.com/pa.json") == []

    def test_export_shape(self):
        graph = _graph("merge_dev1.json", "merge_dev2.json")
        data = graph_to_dict(graph)
        assert data["version"] == 1
        assert {n["kind"] for n in data["nodes"]} == {"Device"}
        assert len(data["links"]) == 2
        for link in data["links"]:
            assert link["provenance"]
            for item in link["provenance"]:
                assert item["sourceAces"] and item["targetAces"]
        (promise,) = data["promises"]
        assert promise["pending"] is True
        parsed = json.loads(graph_to_json(graph))
        assert parsed == {**data}
