/** Application entry point: rendering and event wiring.
 *
 * The page polls the graph endpoint (cheap thanks to ETag revalidation) and
 * re-renders only when the server reports a newer graph version.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  DEFAULT_OPTIONS,
  LayoutEdge,
  LayoutNode,
  buildLayout,
  settle,
} from "./layout.js";
import {
  STACK_COLUMNS,
  parseHostInput,
  pendingPromises,
  promiseTitle,
  stackRows,
} from "./stacks.js";
import { GraphLink, GraphPayload, NodeKind } from "./types.js";

const POLL_INTERVAL_MS = 3000;
const SVG_NS = "http://www.w3.org/2000/svg";

const NODE_COLORS: Record<NodeKind, string> = {
  Device: "#2563eb",
  ExternalHost: "#059669",
  ControllerClass: "#d97706",
  LocalNetwork: "#64748b",
  Gateway: "#64748b",
};

interface AppState {
  payload: GraphPayload | null;
  nodes: LayoutNode[];
  edges: LayoutEdge[];
  selectedLink: GraphLink | null;
}

const api = new ApiClient();
const state: AppState = { payload: null, nodes: [], edges: [], selectedLink: null };

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node;
}

function setStatus(message: string, isError = false): void {
  const status = byId("status");
  status.textContent = message;
  status.classList.toggle("error", isError);
}

function stackTable(rows: string[][]): HTMLTableElement {
  const table = el("table", "stacks");
  const head = table.createTHead().insertRow();
  for (const column of STACK_COLUMNS) {
    head.appendChild(el("th", undefined, column.title));
  }
  const body = table.createTBody();
  for (const row of rows) {
    const tr = body.insertRow();
    for (const cell of row) {
      tr.insertCell().textContent = cell;
    }
  }
  return table;
}

function renderLinkInspector(): void {
  const panel = byId("link-inspector");
  panel.replaceChildren();
  const link = state.selectedLink;
  if (!link) {
    panel.appendChild(el("p", "muted", "Select a link to inspect its flows."));
    return;
  }
  panel.appendChild(el("h3", undefined, `${link.source} → ${link.target}`));
  panel.appendChild(stackTable(stackRows(link.stacks)));
  for (const entry of link.provenance) {
    const parts = [`via ${entry.kind}`];
    if (entry.sourceAces.length) {
      parts.push(`out: ${entry.sourceAces.join(", ")}`);
    }
    if (entry.targetAces.length) {
      parts.push(`in: ${entry.targetAces.join(", ")}`);
    }
    if (entry.oneSided) {
      parts.push("(one-sided)");
    }
    panel.appendChild(el("p", "muted", parts.join(" — ")));
  }
}

function renderGraph(): void {
  const svg = byId("graph") as unknown as SVGSVGElement;
  svg.replaceChildren();
  if (!state.payload) {
    return;
  }
  const linkByKey = new Map<string, GraphLink>();
  for (const link of state.payload.links) {
    linkByKey.set(`${link.source}|${link.target}`, link);
  }
  const position = new Map(state.nodes.map((node) => [node.id, node]));

  for (const link of state.payload.links) {
    const a = position.get(link.source);
    const b = position.get(link.target);
    if (!a || !b) {
      continue;
    }
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", a.x.toFixed(1));
    line.setAttribute("y1", a.y.toFixed(1));
    line.setAttribute("x2", b.x.toFixed(1));
    line.setAttribute("y2", b.y.toFixed(1));
    line.setAttribute("class", "link");
    line.setAttribute("marker-end", "url(#arrow)");
    if (state.selectedLink === link) {
      line.classList.add("selected");
    }
    line.addEventListener("click", () => {
      state.selectedLink = link;
      renderGraph();
      renderLinkInspector();
    });
    svg.appendChild(line);
  }

  for (const node of state.nodes) {
    const group = document.createElementNS(SVG_NS, "g");
    group.setAttribute("transform", `translate(${node.x.toFixed(1)},${node.y.toFixed(1)})`);
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("r", node.kind === "Device" ? "14" : "10");
    circle.setAttribute("fill", NODE_COLORS[node.kind]);
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${node.id} (${node.kind})`;
    circle.appendChild(title);
    const text = document.createElementNS(SVG_NS, "text");
    text.setAttribute("y", "26");
    text.textContent = node.label.length > 28 ? `${node.label.slice(0, 27)}…` : node.label;
    group.appendChild(circle);
    group.appendChild(text);
    svg.appendChild(group);
  }
  const defs = document.createElementNS(SVG_NS, "defs");
  defs.innerHTML =
    '<marker id="arrow" viewBox="0 0 10 10" refX="22" refY="5" ' +
    'markerWidth="7" markerHeight="7" orient="auto-start-reverse">' +
    '<path d="M 0 0 L 10 5 L 0 10 z" fill="#94a3b8"/></marker>';
  svg.prepend(defs);
}

function renderPromiseWizard(): void {
  const panel = byId("promises");
  panel.replaceChildren();
  const promises = state.payload ? pendingPromises(state.payload.promises) : [];
  if (!promises.length) {
    panel.appendChild(el("p", "muted", "No pending controller promises."));
    return;
  }
  for (const promise of promises) {
    const card = el("div", "card");
    card.appendChild(el("h3", undefined, promiseTitle(promise)));
    card.appendChild(stackTable(stackRows(promise.stacks)));
    const input = el("input");
    input.placeholder = "controller hosts, comma separated";
    const button = el("button", "primary", "Fulfill");
    button.addEventListener("click", async () => {
      const hosts = parseHostInput(input.value);
      if (!hosts.length) {
        setStatus("enter at least one host", true);
        return;
      }
      try {
        await api.fulfillPromise(promise.promiseId, hosts);
        setStatus(`promise fulfilled with ${hosts.join(", ")}`);
        await refresh();
      } catch (error) {
        setStatus(describeError(error), true);
      }
    });
    const row = el("div", "row");
    row.appendChild(input);
    row.appendChild(button);
    card.appendChild(row);
    panel.appendChild(card);
  }
}

function renderFlowSelectors(): void {
  if (!state.payload) {
    return;
  }
  for (const selectId of ["flow-src", "flow-dst"]) {
    const select = byId(selectId) as HTMLSelectElement;
    const previous = select.value;
    select.replaceChildren();
    for (const node of state.payload.nodes) {
      const option = el("option", undefined, node.id);
      option.value = node.id;
      select.appendChild(option);
    }
    if (previous) {
      select.value = previous;
    }
  }
}

function describeError(error: unknown): string {
  if (error instanceof ApiError) {
    return `${error.code}: ${error.message}`;
  }
  return String(error);
}

async function refresh(): Promise<void> {
  try {
    const payload = await api.getGraph();
    if (payload === null) {
      return; // unchanged or stale
    }
    state.payload = payload;
    if (state.selectedLink) {
      state.selectedLink =
        payload.links.find(
          (link) =>
            link.source === state.selectedLink?.source &&
            link.target === state.selectedLink?.target,
        ) ?? null;
    }
    const layout = buildLayout(payload.nodes, payload.links, DEFAULT_OPTIONS);
    settle(layout.nodes, layout.edges, DEFAULT_OPTIONS);
    state.nodes = layout.nodes;
    state.edges = layout.edges;
    renderGraph();
    renderLinkInspector();
    renderPromiseWizard();
    renderFlowSelectors();
    setStatus(`graph version ${payload.graphVersion} — ${payload.nodes.length} nodes, `
      + `${payload.links.length} links`);
  } catch (error) {
    setStatus(describeError(error), true);
  }
}

function wireControls(): void {
  byId("flow-query").addEventListener("click", async () => {
    const src = (byId("flow-src") as HTMLSelectElement).value;
    const dst = (byId("flow-dst") as HTMLSelectElement).value;
    const panel = byId("flow-result");
    panel.replaceChildren();
    try {
      const flows = await api.getFlows(src, dst);
      if (!flows.stacks.length) {
        panel.appendChild(el("p", "muted", "No permitted flows for this pair."));
        return;
      }
      panel.appendChild(stackTable(stackRows(flows.stacks)));
    } catch (error) {
      panel.appendChild(el("p", "error", describeError(error)));
    }
  });

  const upload = byId("upload") as HTMLInputElement;
  upload.addEventListener("change", async () => {
    const file = upload.files?.[0];
    if (!file) {
      return;
    }
    try {
      await api.addMudFile(await file.text());
      setStatus(`loaded ${file.name}`);
      await refresh();
    } catch (error) {
      setStatus(describeError(error), true);
    } finally {
      upload.value = "";
    }
  });
}

wireControls();
void refresh();
setInterval(() => void refresh(), POLL_INTERVAL_MS);
