import { describe, expect, it } from "vitest";

import {
  STACK_COLUMNS,
  parseHostInput,
  pendingPromises,
  promiseTitle,
  renderStack,
  stackRow,
  stackRows,
} from "../src/stacks.js";
import { PromiseEntry, Stack } from "../src/types.js";

const SAMPLE: Stack = {
  network: "IPv4",
  transport: "UDP",
  srcPort: "5000",
  dstPort: "400",
};

describe("stack table", () => {
  it("keeps the layer column order", () => {
    expect(STACK_COLUMNS.map((c) => c.key)).toEqual([
      "network",
      "transport",
      "srcPort",
      "dstPort",
    ]);
  });

  it("renders rows in column order", () => {
    expect(stackRow(SAMPLE)).toEqual(["IPv4", "UDP", "5000", "400"]);
    expect(stackRows([SAMPLE, { ...SAMPLE, network: "any" }])).toHaveLength(2);
  });

  it("formats a stack inline", () => {
    expect(renderStack(SAMPLE)).toBe("[IPv4, UDP, 5000, 400]");
  });
});

describe("host input parsing", () => {
  it("splits on commas and whitespace", () => {
    expect(parseHostInput("a.lan, b.lan\n c.lan")).toEqual([
      "a.lan",
      "b.lan",
      "c.lan",
    ]);
  });

  it("drops blanks and duplicates", () => {
    expect(parseHostInput(" ,a.lan,,a.lan, ")).toEqual(["a.lan"]);
    expect(parseHostInput("   ")).toEqual([]);
  });
});

describe("promises", () => {
  const base: PromiseEntry = {
    promiseId: "promise-1",
    deviceId: "https://a.example.com/d.json",
    kind: "my-controller",
    classUri: "https://a.example.com/d.json",
    hosts: [],
    pending: true,
    stacks: [SAMPLE],
  };

  it("filters to pending entries", () => {
    const fulfilled = { ...base, promiseId: "promise-2", pending: false };
    expect(pendingPromises([base, fulfilled])).toEqual([base]);
  });

  it("titles my-controller promises distinctly", () => {
    expect(promiseTitle(base)).toContain("own controller");
    expect(promiseTitle({ ...base, kind: "controller" })).toContain(
      "controller class",
    );
  });
});
