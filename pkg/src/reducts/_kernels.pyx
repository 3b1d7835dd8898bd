# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled truth-table kernel.

Same contract as _kernels_py: row r gives atom j the value of bit j of r.
Rows are processed 64 at a time, one machine word per program node.
"""

from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free

cdef uint64_t[6] _LOW = [
    0xAAAAAAAAAAAAAAAAULL,
    0xCCCCCCCCCCCCCCCCULL,
    0xF0F0F0F0F0F0F0F0ULL,
    0xFF00FF00FF00FF00ULL,
    0xFFFF0000FFFF0000ULL,
    0xFFFFFFFF00000000ULL,
]


cdef long _scan(long[:] ops, long[:] left, long[:] right, int natoms, uint64_t* col) except -2:
    cdef long n = ops.shape[0]
    cdef uint64_t* val = <uint64_t*> malloc(max(n, 1) * sizeof(uint64_t))
    if val == NULL:
        raise MemoryError()
    cdef long long rows = 1LL << natoms
    cdef long long blocks = (rows + 63) // 64
    cdef uint64_t mask = 0xFFFFFFFFFFFFFFFFULL if rows >= 64 else ((1ULL << rows) - 1)
    cdef long long blk
    cdef long i
    cdef int j
    cdef uint64_t v, res
    cdef long first = -1
    try:
        for blk in range(blocks):
            for i in range(n):
                if ops[i] == 0:
                    v = 0
                elif ops[i] == 1:
                    v = 0xFFFFFFFFFFFFFFFFULL
                elif ops[i] == 2:
                    j = left[i]
                    if j < 6:
                        v = _LOW[j]
                    elif (blk >> (j - 6)) & 1:
                        v = 0xFFFFFFFFFFFFFFFFULL
                    else:
                        v = 0
                elif ops[i] == 3:
                    v = ~val[left[i]]
                elif ops[i] == 4:
                    v = val[left[i]] & val[right[i]]
                elif ops[i] == 5:
                    v = val[left[i]] | val[right[i]]
                else:
                    v = (~val[left[i]]) | val[right[i]]
                val[i] = v
            res = (val[n - 1] if n > 0 else 0xFFFFFFFFFFFFFFFFULL) & mask
            if col != NULL:
                col[blk] = res
            elif res != mask and first < 0:
                v = (~res) & mask
                j = 0
                while not ((v >> j) & 1):
                    j += 1
                first = blk * 64 + j
                break
    finally:
        free(val)
    return first


def first_false(ops, left, right, int natoms):
    """Index of the first falsifying row, or -1 for a tautology."""
    cdef long[:] o = _as_long(ops)
    cdef long[:] a = _as_long(left)
    cdef long[:] b = _as_long(right)
    return _scan(o, a, b, natoms, NULL)


def truth_column(ops, left, right, int natoms):
    """Integer whose bit r is the program's value on row r."""
    cdef long[:] o = _as_long(ops)
    cdef long[:] a = _as_long(left)
    cdef long[:] b = _as_long(right)
    cdef long long rows = 1LL << natoms
    cdef long long blocks = (rows + 63) // 64
    cdef uint64_t* col = <uint64_t*> malloc(blocks * sizeof(uint64_t))
    if col == NULL:
        raise MemoryError()
    try:
        _scan(o, a, b, natoms, col)
        data = bytes((<char*> col)[:blocks * 8])
    finally:
        free(col)
    return int.from_bytes(data, "little")


def _as_long(seq):
    from array import array
    return array("l", seq)
