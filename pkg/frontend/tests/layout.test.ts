import { describe, expect, it } from "vitest";

import {
  DEFAULT_OPTIONS,
  buildLayout,
  hashId,
  settle,
  step,
} from "../src/layout.js";
import { GraphLink, GraphNode } from "../src/types.js";

function nodes(...ids: string[]): GraphNode[] {
  return ids.map((id) => ({ id, kind: "Device", label: id }));
}

function link(source: string, target: string): GraphLink {
  return { source, target, stacks: [], provenance: [] };
}

describe("buildLayout", () => {
  it("indexes edges and deduplicates both directions", () => {
    const layout = buildLayout(nodes("a", "b", "c"), [
      link("a", "b"),
      link("b", "a"),
      link("b", "c"),
    ]);
    expect(layout.nodes).toHaveLength(3);
    expect(layout.edges).toEqual([
      { source: 0, target: 1 },
      { source: 1, target: 2 },
    ]);
  });

  it("ignores links to unknown nodes", () => {
    const layout = buildLayout(nodes("a"), [link("a", "ghost")]);
    expect(layout.edges).toEqual([]);
  });

  it("seeds identical positions for identical graphs", () => {
    const first = buildLayout(nodes("a", "b"), [link("a", "b")]);
    const second = buildLayout(nodes("a", "b"), [link("a", "b")]);
    expect(first.nodes).toEqual(second.nodes);
    expect(hashId("a")).toBe(hashId("a"));
    expect(hashId("a")).not.toBe(hashId("b"));
  });
});

describe("simulation", () => {
  it("settles deterministically", () => {
    const make = () =>
      buildLayout(nodes("a", "b", "c", "d"), [
        link("a", "b"),
        link("b", "c"),
        link("c", "d"),
      ]);
    const first = make();
    const second = make();
    settle(first.nodes, first.edges);
    settle(second.nodes, second.edges);
    expect(first.nodes).toEqual(second.nodes);
  });

  it("converges below the movement threshold", () => {
    const layout = buildLayout(nodes("a", "b", "c"), [link("a", "b")]);
    const iterations = settle(layout.nodes, layout.edges, DEFAULT_OPTIONS, 500);
    expect(iterations).toBeLessThan(500);
    expect(step(layout.nodes, layout.edges)).toBeLessThan(5);
  });

  it("pulls linked nodes toward the link distance", () => {
    const layout = buildLayout(nodes("a", "b"), [link("a", "b")]);
    settle(layout.nodes, layout.edges);
    const [a, b] = layout.nodes;
    const dist = Math.hypot(a.x - b.x, a.y - b.y);
    expect(dist).toBeGreaterThan(DEFAULT_OPTIONS.linkDistance * 0.5);
    expect(dist).toBeLessThan(DEFAULT_OPTIONS.linkDistance * 2.5);
  });

  it("separates coincident nodes", () => {
    const layout = buildLayout(nodes("a", "b"), []);
    layout.nodes[1].x = layout.nodes[0].x;
    layout.nodes[1].y = layout.nodes[0].y;
    settle(layout.nodes, layout.edges);
    const [a, b] = layout.nodes;
    expect(Math.hypot(a.x - b.x, a.y - b.y)).toBeGreaterThan(10);
  });
});
