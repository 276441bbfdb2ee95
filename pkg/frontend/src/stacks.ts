/** Pure presentation helpers for protocol stacks and promises.
 *
 * All merging and pruning happens server-side; this module only formats what
 * the API returns.
 */

import { PromiseEntry, Stack } from "./types.js";

/** Column order mirrors the engine's layer order. */
export const STACK_COLUMNS = [
  { key: "network", title: "Network" },
  { key: "transport", title: "Transport" },
  { key: "srcPort", title: "Src Port" },
  { key: "dstPort", title: "Dst Port" },
] as const;

export type StackColumnKey = (typeof STACK_COLUMNS)[number]["key"];

export function stackRow(stack: Stack): string[] {
  return STACK_COLUMNS.map((column) => stack[column.key]);
}

export function stackRows(stacks: Stack[]): string[][] {
  return stacks.map(stackRow);
}

export function renderStack(stack: Stack): string {
  return `[${stackRow(stack).join(", ")}]`;
}

/** Split a comma/whitespace separated host input into clean host names. */
export function parseHostInput(input: string): string[] {
  const hosts = input
    .split(/[,\s]+/)
    .map((part) => part.trim())
    .filter((part) => part.length > 0);
  return [...new Set(hosts)];
}

export function pendingPromises(promises: PromiseEntry[]): PromiseEntry[] {
  return promises.filter((promise) => promise.pending);
}

export function promiseTitle(promise: PromiseEntry): string {
  const noun = promise.kind === "my-controller" ? "own controller" : "controller class";
  return `${promise.deviceId} → ${noun} ${promise.classUri}`;
}
