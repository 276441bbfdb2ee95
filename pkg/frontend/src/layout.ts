/** Small deterministic force-directed layout.
 *
 * Nodes repel each other, links act as springs, and a weak centering force
 * keeps disconnected components on screen. Initial positions derive from a
 * hash of the node id, so the same graph always settles into the same
 * arrangement regardless of load order or timing.
 */

import { GraphLink, GraphNode } from "./types.js";

export interface LayoutNode {
  id: string;
  kind: GraphNode["kind"];
  label: string;
  x: number;
  y: number;
  vx: number;
  vy: number;
}

export interface LayoutEdge {
  source: number;
  target: number;
}

export interface LayoutOptions {
  width: number;
  height: number;
  linkDistance: number;
  repulsion: number;
  springStrength: number;
  centering: number;
  damping: number;
}

export const DEFAULT_OPTIONS: LayoutOptions = {
  width: 900,
  height: 600,
  linkDistance: 160,
  repulsion: 18000,
  springStrength: 0.04,
  centering: 0.01,
  damping: 0.85,
};

/** FNV-1a, used to seed stable initial positions from node ids. */
export function hashId(id: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < id.length; i++) {
    hash ^= id.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

export function buildLayout(
  nodes: GraphNode[],
  links: GraphLink[],
  options: LayoutOptions = DEFAULT_OPTIONS,
): { nodes: LayoutNode[]; edges: LayoutEdge[] } {
  const index = new Map<string, number>();
  const layoutNodes = nodes.map((node, i) => {
    index.set(node.id, i);
    const hash = hashId(node.id);
    const angle = ((hash % 3600) / 3600) * 2 * Math.PI;
    const radius = 0.25 * Math.min(options.width, options.height)
      * (0.5 + ((hash >>> 16) % 1000) / 2000);
    return {
      id: node.id,
      kind: node.kind,
      label: node.label,
      x: options.width / 2 + radius * Math.cos(angle),
      y: options.height / 2 + radius * Math.sin(angle),
      vx: 0,
      vy: 0,
    };
  });
  // One undirected edge per node pair, even when both directions carry links.
  const seen = new Set<string>();
  const edges: LayoutEdge[] = [];
  for (const link of links) {
    const a = index.get(link.source);
    const b = index.get(link.target);
    if (a === undefined || b === undefined || a === b) {
      continue;
    }
    const key = a < b ? `${a}|${b}` : `${b}|${a}`;
    if (!seen.has(key)) {
      seen.add(key);
      edges.push({ source: a, target: b });
    }
  }
  return { nodes: layoutNodes, edges };
}

/** Advance the simulation one step; returns total movement (for convergence). */
export function step(
  nodes: LayoutNode[],
  edges: LayoutEdge[],
  options: LayoutOptions = DEFAULT_OPTIONS,
): number {
  for (let i = 0; i < nodes.length; i++) {
    for (let j = i + 1; j < nodes.length; j++) {
      const a = nodes[i];
      const b = nodes[j];
      let dx = a.x - b.x;
      let dy = a.y - b.y;
      let distSq = dx * dx + dy * dy;
      if (distSq < 1) {
        // Deterministic tie-break for coincident nodes.
        dx = 1;
        dy = i - j;
        distSq = dx * dx + dy * dy;
      }
      const force = options.repulsion / distSq;
      const dist = Math.sqrt(distSq);
      a.vx += (dx / dist) * force;
      a.vy += (dy / dist) * force;
      b.vx -= (dx / dist) * force;
      b.vy -= (dy / dist) * force;
    }
  }
  for (const edge of edges) {
    const a = nodes[edge.source];
    const b = nodes[edge.target];
    const dx = b.x - a.x;
    const dy = b.y - a.y;
    const dist = Math.max(1, Math.sqrt(dx * dx + dy * dy));
    const stretch = (dist - options.linkDistance) * options.springStrength;
    a.vx += (dx / dist) * stretch;
    a.vy += (dy / dist) * stretch;
    b.vx -= (dx / dist) * stretch;
    b.vy -= (dy / dist) * stretch;
  }
  let movement = 0;
  for (const node of nodes) {
    node.vx += (options.width / 2 - node.x) * options.centering;
    node.vy += (options.height / 2 - node.y) * options.centering;
    node.vx *= options.damping;
    node.vy *= options.damping;
    node.x += node.vx;
    node.y += node.vy;
    movement += Math.abs(node.vx) + Math.abs(node.vy);
  }
  return movement;
}

/** Run until the layout settles or the iteration budget runs out. */
export function settle(
  nodes: LayoutNode[],
  edges: LayoutEdge[],
  options: LayoutOptions = DEFAULT_OPTIONS,
  maxIterations = 300,
  threshold = 0.5,
): number {
  let iterations = 0;
  while (iterations < maxIterations) {
    iterations++;
    if (step(nodes, edges, options) < threshold) {
      break;
    }
  }
  return iterations;
}
