/** Wire types for the graph service (export schema version 1). */

export interface Stack {
  network: string;
  transport: string;
  srcPort: string;
  dstPort: string;
}

export type NodeKind =
  | "Device"
  | "ExternalHost"
  | "ControllerClass"
  | "LocalNetwork"
  | "Gateway";

export interface GraphNode {
  id: string;
  kind: NodeKind;
  label: string;
  mudUrl?: string;
}

export interface ProvenanceEntry {
  kind: string;
  sourceAces: string[];
  targetAces: string[];
  oneSided?: boolean;
}

export interface GraphLink {
  source: string;
  target: string;
  stacks: Stack[];
  provenance: ProvenanceEntry[];
}

export interface PromiseEntry {
  promiseId: string;
  deviceId: string;
  kind: "controller" | "my-controller";
  classUri: string;
  hosts: string[];
  pending: boolean;
  stacks: Stack[];
}

export interface GraphPayload {
  version: number;
  graphVersion: number;
  nodes: GraphNode[];
  links: GraphLink[];
  promises: PromiseEntry[];
}

export interface FlowsPayload {
  src: string;
  dst: string;
  stacks: Stack[];
  graphVersion: number;
}

export interface PromisesPayload {
  promises: PromiseEntry[];
  graphVersion: number;
}
