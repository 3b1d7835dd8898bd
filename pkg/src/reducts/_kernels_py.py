"""Pure-Python truth-table kernel (bit-parallel over Python integers).

Row r assigns atom j the value of bit j of r.  Each node's column of 2**k
truth values is held in one integer.
"""


def _atom_column(j, k):
    rows = 1 << k
    period = 1 << (j + 1)
    block = ((1 << (1 << j)) - 1) << (1 << j)
    col = block
    width = period
    while width < rows:
        col |= col << width
        width <<= 1
    return col


def truth_column(ops, left, right, natoms):
    """Return the integer whose bit r is the program's value on row r."""
    full = (1 << (1 << natoms)) - 1
    cols = []
    atom_cols = {}
    for op, a, b in zip(ops, left, right):
        if op == 0:
            v = 0
        elif op == 1:
            v = full
        elif op == 2:
            v = atom_cols.get(a)
            if v is None:
                v = atom_cols[a] = _atom_column(a, natoms)
        elif op == 3:
            v = full ^ cols[a]
        elif op == 4:
            v = cols[a] & cols[b]
        elif op == 5:
            v = cols[a] | cols[b]
        else:
            v = (full ^ cols[a]) | cols[b]
        cols.append(v)
    return cols[-1] if cols else full


def first_false(ops, left, right, natoms):
    """Index of the first falsifying row, or -1 for a tautology."""
    full = (1 << (1 << natoms)) - 1
    col = truth_column(ops, left, right, natoms)
    if col == full:
        return -1
    missing = full ^ col
    return (missing & -missing).bit_length() - 1
