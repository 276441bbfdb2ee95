"""Per-destination ACE tree: build, prune redundant stacks, traverse back.

Levels map to stack layers: root (0), network (1), transport (2), and leaves
(3) holding source/destination port pairs.  A stack whose layer allows more
than one protocol descends through the single wildcard child at that level.
Pruning removes a leaf whose permitted traffic is entirely covered by a
sibling or by a cousin with layer-wise wider ancestors.
"""

from __future__ import annotations

from dataclasses import dataclass

from mudscope.algebra import layer_subset
from mudscope.model import ANY, Direction, LayerKind, LayerValue, ProtocolStack

LEAF_LEVEL = 3


@dataclass(frozen=True)
class PortPair:
    """Leaf label: the (source port, destination port) pair of a stack."""

    src: LayerValue
    dst: LayerValue

    def render(self) -> str:
        return f"[{self.src.render()},{self.dst.render()}]"


def pair_subset(a: PortPair, b: PortPair) -> bool:
    return layer_subset(a.src, b.src) and layer_subset(a.dst, b.dst)


class AceTreeNode:
    """Mutable tree node; the engine hands out fresh trees per computation."""

    __slots__ = ("label", "level", "children", "is_wildcard", "parent", "stack_indices")

    def __init__(self, label, level: int, is_wildcard: bool = False) -> None:
        self.label = label
        self.level = level
        self.is_wildcard = is_wildcard
        self.children: list[AceTreeNode] = []
        self.parent: AceTreeNode | None = None
        # Indices of the input stacks that landed on this leaf; the first one
        # is the keeper, the rest were exact duplicates at build time.
        self.stack_indices: list[int] = []

    @property
    def is_leaf(self) -> bool:
        return self.level == LEAF_LEVEL

    def add_child(self, child: "AceTreeNode") -> "AceTreeNode":
        child.parent = self
        self.children.append(child)
        return child

    def label_text(self) -> str:
        if self.level == 0:
            return "root"
        if self.is_leaf:
            return self.label.render()
        return self.label.render()

    def path_text(self) -> str:
        parts = []
        node: AceTreeNode | None = self
        while node is not None and node.level > 0:
            parts.append(node.label_text())
            node = node.parent
        return "/".join(reversed(parts))

    def copy(self) -> "AceTreeNode":
        dup = AceTreeNode(self.label, self.level, self.is_wildcard)
        dup.stack_indices = list(self.stack_indices)
        for child in self.children:
            dup.add_child(child.copy())
        return dup


def structurally_equal(a: AceTreeNode, b: AceTreeNode) -> bool:
    if (a.label, a.level, a.is_wildcard) != (b.label, b.level, b.is_wildcard):
        return False
    if len(a.children) != len(b.children):
        return False
    return all(structurally_equal(x, y) for x, y in zip(a.children, b.children))


def _layer_child_label(value: LayerValue) -> tuple[LayerValue, bool]:
    """Widen a layer to the wildcard child when it allows >1 protocol."""
    if value.kind is LayerKind.ANY or len(value.names) > 1:
        return ANY, True
    return value, False


def build_ace_tree(stacks: list[ProtocolStack]) -> AceTreeNode:
    """Build the tree covering the given stacks (all for one destination).

    Existing children are reused, never duplicated; a stack that lands on an
    already-present leaf only adds its index to that leaf.
    """
    root = AceTreeNode(None, 0)
    for index, stack in enumerate(stacks):
        node = root
        for layer in (stack.network, stack.transport):
            label, wildcard = _layer_child_label(layer)
            existing = None
            for child in node.children:
                if wildcard and child.is_wildcard:
                    existing = child
                    break
                if not wildcard and not child.is_wildcard and child.label == label:
                    existing = child
                    break
            if existing is None:
                existing = node.add_child(AceTreeNode(label, node.level + 1, wildcard))
            node = existing
        pair = PortPair(stack.src_port, stack.dst_port)
        leaf = next((c for c in node.children if c.label == pair), None)
        if leaf is None:
            leaf = node.add_child(AceTreeNode(pair, LEAF_LEVEL))
        leaf.stack_indices.append(index)
    return root


def collect_leaves(root: AceTreeNode) -> list[AceTreeNode]:
    out: list[AceTreeNode] = []

    def walk(node: AceTreeNode) -> None:
        if node.is_leaf:
            out.append(node)
        for child in node.children:
            walk(child)

    walk(root)
    return out


@dataclass
class PruneEvent:
    """One pruned leaf: its path, the covering path, and its stack indices."""

    pruned_path: str
    covered_by_path: str
    stack_indices: list[int]


def _detach(leaf: AceTreeNode) -> None:
    node = leaf
    parent = node.parent
    while parent is not None:
        parent.children.remove(node)
        if parent.children or parent.level == 0:
            break
        node = parent
        parent = node.parent
    leaf.parent = None


def _strict_label_subset(a: AceTreeNode, b: AceTreeNode) -> bool:
    return a.label != b.label and layer_subset(a.label, b.label)


def _cousin_prunes(leaf: AceTreeNode, cousin: AceTreeNode) -> bool:
    """Lockstep ancestor walk for the cousin rule.

    Prunes only when some ancestor pair are siblings with strictly wider
    cousin label, and every ancestor level below that is layer-wise contained
    as well (the containment guard keeps pruning semantics-preserving).
    """
    a_l = leaf.parent
    a_c = cousin.parent
    while a_l is not None and a_c is not None and a_l is not a_c:
        if a_l.level == 0:
            return False
        if a_l.parent is a_c.parent:
            return _strict_label_subset(a_l, a_c)
        if not layer_subset(a_l.label, a_c.label):
            return False
        a_l = a_l.parent
        a_c = a_c.parent
    return False


def _prune_pass(root: AceTreeNode, events: list[PruneEvent]) -> bool:
    changed = False
    leaves = collect_leaves(root)
    for leaf in leaves:
        if leaf.parent is None:
            continue
        siblings = leaf.parent.children
        position = siblings.index(leaf)
        covered: AceTreeNode | None = None
        for idx, sib in enumerate(siblings):
            if sib is leaf or not sib.is_leaf:
                continue
            equal = sib.label == leaf.label
            if (pair_subset(leaf.label, sib.label) and not equal) or (equal and idx < position):
                covered = sib
                break
        if covered is None:
            for cousin in leaves:
                if cousin is leaf or cousin.parent is None or cousin.parent is leaf.parent:
                    continue
                if pair_subset(leaf.label, cousin.label) and _cousin_prunes(leaf, cousin):
                    covered = cousin
                    break
        if covered is not None:
            events.append(PruneEvent(leaf.path_text(), covered.path_text(),
                                     list(leaf.stack_indices)))
            _detach(leaf)
            changed = True
    return changed


def prune_ace_tree_detailed(root: AceTreeNode) -> tuple[AceTreeNode, list[PruneEvent]]:
    """Prune a copy of the tree to a fixpoint; returns the new root and the
    per-leaf prune events (for redundancy reporting)."""
    out = root.copy()
    events: list[PruneEvent] = []
    while _prune_pass(out, events):
        pass
    return out, events


def prune_ace_tree(root: AceTreeNode) -> AceTreeNode:
    return prune_ace_tree_detailed(root)[0]


def traverse(root: AceTreeNode,
             direction: Direction = Direction.FROM_DEVICE) -> list[ProtocolStack]:
    """Depth-first left-to-right root-to-leaf stacks, one per leaf."""
    out: list[ProtocolStack] = []

    def walk(node: AceTreeNode, path: list[AceTreeNode]) -> None:
        if node.is_leaf:
            network = path[1].label
            transport = path[2].label
            out.append(ProtocolStack(network, transport, node.label.src,
                                     node.label.dst, direction=direction))
            return
        for child in node.children:
            walk(child, path + [child])

    for child in root.children:
        walk(child, [root, child])
    return out


def to_text(root: AceTreeNode) -> str:
    """Indented dump for --dump-trees."""
    lines: list[str] = []

    def walk(node: AceTreeNode, depth: int) -> None:
        lines.append("  " * depth + node.label_text())
        for child in node.children:
            walk(child, depth + 1)

    walk(root, 0)
    return "\n".join(lines) + "\n"


def to_dot(root: AceTreeNode, name: str = "ace_tree") -> str:
    """DOT rendering of one destination's tree."""
    lines = [f'digraph "{name}" {{', "  node [shape=box];"]
    counter = [0]

    def walk(node: AceTreeNode) -> str:
        node_id = f"n{counter[0]}"
        counter[0] += 1
        lines.append(f'  {node_id} [label="{node.label_text()}"];')
        for child in node.children:
            child_id = walk(child)
            lines.append(f"  {node_id} -> {child_id};")
        return node_id

    walk(root)
    lines.append("}")
    return "\n".join(lines) + "\n"
