# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled merge kernel; mirrors ``_kernel_py`` exactly.

Encoded stacks are ``(net, trans, sports, dports)`` tuples: bitmask ints with
-1 for 'any' and flattened interval tuples with ``()`` for 'any'.
"""

KERNEL_NAME = "cython"


cpdef tuple intersect_intervals(tuple a, tuple b):
    cdef Py_ssize_t i = 0, j = 0, na = len(a), nb = len(b)
    cdef long lo, hi, alo, ahi, blo, bhi
    if na == 0:
        return b
    if nb == 0:
        return a
    out = []
    while i < na and j < nb:
        alo = a[i]; ahi = a[i + 1]
        blo = b[j]; bhi = b[j + 1]
        lo = alo if alo > blo else blo
        hi = ahi if ahi < bhi else bhi
        if lo <= hi:
            out.append(lo)
            out.append(hi)
        if ahi < bhi:
            i += 2
        else:
            j += 2
    return tuple(out)


cpdef bint intervals_subset(tuple a, tuple b):
    cdef Py_ssize_t i, j = 0, na = len(a), nb = len(b)
    cdef long lo, hi
    if nb == 0:
        return True
    if na == 0:
        return False
    for i in range(0, na, 2):
        lo = a[i]
        hi = a[i + 1]
        while j < nb and <long> b[j + 1] < lo:
            j += 2
        if j >= nb or <long> b[j] > lo or <long> b[j + 1] < hi:
            return False
    return True


cdef inline long mask_intersect(long a, long b):
    if a == -1:
        return b
    if b == -1:
        return a
    return a & b


cdef inline bint mask_subset(long a, long b):
    if b == -1:
        return True
    if a == -1:
        return False
    return (a & ~b) == 0


cpdef merge_encoded(tuple src, tuple dst):
    cdef long net, trans
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


cpdef bint encoded_subset(tuple src, tuple dst):
    return (mask_subset(src[0], dst[0]) and mask_subset(src[1], dst[1])
            and intervals_subset(src[2], dst[2]) and intervals_subset(src[3], dst[3]))


cpdef list merge_acls_encoded(list src_stacks, list dst_stacks, bint strict):
    cdef Py_ssize_t i, j
    cdef list out = []
    for i in range(len(src_stacks)):
        src = src_stacks[i]
        for j in range(len(dst_stacks)):
            dst = dst_stacks[j]
            if strict and not encoded_subset(src, dst):
                continue
            merged = merge_encoded(src, dst)
            if merged is not None:
                out.append((i, j, merged))
    return out
