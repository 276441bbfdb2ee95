"""Layer-wise subset/intersection algebra and pairwise protocol-stack merging.

Two devices may only talk over the common factors of their ACEs: a merge
succeeds when every layer of the source and destination stacks intersects.
The cross-product merge of two ACLs is the hot path for large graphs, so it
runs through a compiled kernel when available (``MUDSCOPE_PURE=1`` forces the
pure-Python twin).
"""

from __future__ import annotations

import os

from mudscope.errors import LayerMismatch
from mudscope.model import ANY, Direction, LayerKind, LayerValue, ProtocolStack

if os.environ.get("MUDSCOPE_PURE"):
    from mudscope import _kernel_py as _kernel
else:
    try:
        from mudscope import _kernel  # type: ignore[no-redef]
    except ImportError:
        from mudscope import _kernel_py as _kernel  # type: ignore[no-redef]

#: Name of the active merge kernel ("cython" or "python").
KERNEL_NAME: str = _kernel.KERNEL_NAME


def _check_layers(a: LayerValue, b: LayerValue) -> None:
    kinds = {a.kind, b.kind}
    if LayerKind.NAMED in kinds and LayerKind.PORT_SET in kinds:
        raise LayerMismatch(f"cannot combine {a.render()} with {b.render()}")


def layer_subset(a: LayerValue, b: LayerValue) -> bool:
    """True iff a's concretization over the full layer domain is contained in b's."""
    _check_layers(a, b)
    if b.kind is LayerKind.ANY:
        return True
    if a.kind is LayerKind.ANY:
        return False
    if a.kind is LayerKind.NAMED:
        return a.names <= b.names
    return bool(_kernel.intervals_subset(_flatten(a.ports), _flatten(b.ports)))


def layer_intersect(a: LayerValue, b: LayerValue) -> LayerValue | None:
    """Exact intersection of two same-layer values; None when disjoint."""
    _check_layers(a, b)
    if a.kind is LayerKind.ANY:
        return b
    if b.kind is LayerKind.ANY:
        return a
    if a.kind is LayerKind.NAMED:
        common = a.names & b.names
        return LayerValue(LayerKind.NAMED, names=common) if common else None
    flat = _kernel.intersect_intervals(_flatten(a.ports), _flatten(b.ports))
    if not flat:
        return None
    return LayerValue.port_set(zip(flat[::2], flat[1::2]))


def stack_subset(a: ProtocolStack, b: ProtocolStack) -> bool:
    """Layer-wise containment over all four layers (direction ignored)."""
    return all(layer_subset(x, y) for x, y in zip(a.layers, b.layers))


def merge_stacks(src: ProtocolStack, dst: ProtocolStack,
                 strict: bool = False) -> ProtocolStack | None:
    """Merge a from-device stack with a to-device stack.

    Returns the layer-wise intersection when every layer intersects, else None.
    With ``strict`` the literal source-subset-of-destination guard is applied
    per layer instead (comparison mode; prunes partially overlapping pairs).
    """
    if strict and not stack_subset(src, dst):
        return None
    layers = []
    for a, b in zip(src.layers, dst.layers):
        common = layer_intersect(a, b)
        if common is None:
            return None
        layers.append(common)
    return ProtocolStack(*layers, direction=Direction.FROM_DEVICE)


def merge_acls(src: list[ProtocolStack], dst: list[ProtocolStack],
               strict: bool = False) -> list[ProtocolStack]:
    """All non-empty pairwise merges over the cross product, in
    (src-index, dst-index) lexicographic order, duplicates retained."""
    return [stack for _, _, stack in merge_acls_indexed(src, dst, strict=strict)]


def merge_acls_indexed(src: list[ProtocolStack], dst: list[ProtocolStack],
                       strict: bool = False):
    """Like :func:`merge_acls` but yields (src_index, dst_index, stack) triples."""
    bits: dict[str, int] = {}
    enc_src = [_encode(s, bits) for s in src]
    enc_dst = [_encode(s, bits) for s in dst]
    names = {bit: name for name, bit in bits.items()}
    return [(i, j, _decode(enc, names))
            for i, j, enc in _kernel.merge_acls_encoded(enc_src, enc_dst, strict)]


def _flatten(intervals: tuple[tuple[int, int], ...]) -> tuple[int, ...]:
    return tuple(x for pair in intervals for x in pair)


def _encode_mask(value: LayerValue, bits: dict[str, int]) -> int:
    if value.kind is LayerKind.ANY:
        return -1
    mask = 0
    for name in value.names:
        bit = bits.get(name)
        if bit is None:
            bit = 1 << len(bits)
            bits[name] = bit
        mask |= bit
    return mask


def _encode(stack: ProtocolStack, bits: dict[str, int]) -> tuple:
    return (_encode_mask(stack.network, bits),
            _encode_mask(stack.transport, bits),
            _flatten(stack.src_port.ports) if not stack.src_port.is_any else (),
            _flatten(stack.dst_port.ports) if not stack.dst_port.is_any else ())


def _decode_mask(mask: int, names: dict[int, str]) -> LayerValue:
    if mask == -1:
        return ANY
    found = [name for bit, name in names.items() if mask & bit]
    return LayerValue.named(*found)


def _decode_ports(flat: tuple) -> LayerValue:
    if not flat:
        return ANY
    return LayerValue.port_set(zip(flat[::2], flat[1::2]))


def _decode(enc: tuple, names: dict[int, str]) -> ProtocolStack:
    return ProtocolStack(_decode_mask(enc[0], names), _decode_mask(enc[1], names),
                         _decode_ports(enc[2]), _decode_ports(enc[3]),
                         direction=Direction.FROM_DEVICE)
