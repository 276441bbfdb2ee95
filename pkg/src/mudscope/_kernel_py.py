"""Pure-Python merge kernel.

Stacks are pre-encoded by :mod:`mudscope.algebra` into compact tuples
``(net, trans, sports, dports)`` where ``net``/``trans`` are protocol bitmasks
(``-1`` meaning 'any') and ``sports``/``dports`` are flattened, normalized
interval tuples ``(lo0, hi0, lo1, hi1, ...)`` with ``()`` meaning 'any'.

A compiled twin of this module lives in ``_kernel.pyx``; the algebra module
picks whichever is importable.
"""

from __future__ import annotations

KERNEL_NAME = "python"


def intersect_intervals(a: tuple, b: tuple) -> tuple:
    """Intersect two flattened interval lists; '()' is the full range."""
    if not a:
        return b
    if not b:
        return a
    out: list[int] = []
    i = 0
    j = 0
    na = len(a)
    nb = len(b)
    while i < na and j < nb:
        lo = a[i] if a[i] > b[j] else b[j]
        hi = a[i + 1] if a[i + 1] < b[j + 1] else b[j + 1]
        if lo <= hi:
            out.append(lo)
            out.append(hi)
        if a[i + 1] < b[j + 1]:
            i += 2
        else:
            j += 2
    return tuple(out)


def intervals_subset(a: tuple, b: tuple) -> bool:
    """True iff interval set a is contained in b; '()' is the full range."""
    if not b:
        return True
    if not a:
        return False
    j = 0
    nb = len(b)
    for i in range(0, len(a), 2):
        lo = a[i]
        hi = a[i + 1]
        while j < nb and b[j + 1] < lo:
            j += 2
        if j >= nb or b[j] > lo or b[j + 1] < hi:
            return False
    return True


def mask_intersect(a: int, b: int) -> int:
    if a == -1:
        return b
    if b == -1:
        return a
    return a & b


def mask_subset(a: int, b: int) -> bool:
    if b == -1:
        return True
    if a == -1:
        return False
    return a & ~b == 0


def merge_encoded(src: tuple, dst: tuple):
    """Layer-wise intersection of two encoded stacks; None when any layer is disjoint."""
    net = mask_intersect(src[0], dst[0])
    if net == 0:
        return None
    trans = mask_intersect(src[1], dst[1])
    if trans == 0:
        return None
    sports = intersect_intervals(src[2], dst[2])
    if src[2] and dst[2] and not sports:
        return None
    dports = intersect_intervals(src[3], dst[3])
    if src[3] and dst[3] and not dports:
        return None
    return (net, trans, sports, dports)


def encoded_subset(src: tuple, dst: tuple) -> bool:
    """Layer-wise containment of src in dst."""
    return (mask_subset(src[0], dst[0]) and mask_subset(src[1], dst[1])
            and intervals_subset(src[2], dst[2]) and intervals_subset(src[3], dst[3]))


def merge_acls_encoded(src_stacks: list, dst_stacks: list, strict: bool) -> list:
    """Cross-product merge in (src-index, dst-index) lexicographic order.

    Returns ``(src_index, dst_index, merged)`` triples. With ``strict`` the
    literal layer-wise subset guard gates each pair instead of plain
    non-empty intersection.
    """
    out = []
    for i, src in enumerate(src_stacks):
        for j, dst in enumerate(dst_stacks):
            if strict and not encoded_subset(src, dst):
                continue
            merged = merge_encoded(src, dst)
            if merged is not None:
                out.append((i, j, merged))
    return out
