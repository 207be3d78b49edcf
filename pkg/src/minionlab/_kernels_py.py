"""Pure-Python kernels: preservation scan, table filtering, minor tables.

Same call surface as the compiled module `_kernels_c`; `kernels` picks one
at import.  A pair prep is (m, rows_by_sort, counts_by_sort, masks_by_sort)
with rows flattened to count*m digit tuples and masks as bytes over the
encoded tuples of each sort.
"""

import itertools

BACKEND = "python"


def check_pair(outputs, strides, arg_sorts, out_sort, out_size, prep):
    """True iff the table maps every choice of prep rows into the mask of
    the output sort (vacuously when some argument sort has no rows)."""
    m, rows_by_sort, counts, masks = prep
    for t in arg_sorts:
        if counts[t] == 0:
            return True
    mask = masks[out_sort]
    if m == 0:
        return mask[0] != 0
    rows_args = [rows_by_sort[t] for t in arg_sorts]
    n = len(arg_sorts)
    for choice in itertools.product(*(range(counts[t]) for t in arg_sorts)):
        code = 0
        for j in range(m):
            idx = 0
            for i in range(n):
                idx += strides[i] * rows_args[i][choice[i] * m + j]
            code = code * out_size + outputs[idx]
        if not mask[code]:
            return False
    return True


def filter_tables(table_len, out_size, strides, arg_sorts, out_sort, preps):
    """All output vectors (lexicographic) whose table passes every prep."""
    survivors = []
    if table_len == 0:
        candidates = [()]
    else:
        candidates = itertools.product(range(out_size), repeat=table_len)
    for outputs in candidates:
        for prep in preps:
            if not check_pair(outputs, strides, arg_sorts, out_sort, out_size, prep):
                break
        else:
            survivors.append(tuple(outputs))
    return survivors


def minor_table(f_outputs, f_strides, positions, u_sizes):
    """Output vector of a reindexed table: entry at tuple a of the new input
    product is f applied to the positions-selected coordinates of a."""
    out = []
    for digits in itertools.product(*(range(c) for c in u_sizes)):
        idx = 0
        for st, p in zip(f_strides, positions):
            idx += st * digits[p]
        out.append(f_outputs[idx])
    return tuple(out)


MASK_WORD = 0  # arbitrary-width integer masks


def _perm_mask(mask, table):
    out = 0
    while mask:
        low = mask & -mask
        out |= 1 << table[low.bit_length() - 1]
        mask ^= low
    return out


def _prod_mask(m1, m2, shift):
    out = 0
    codes2 = []
    while m2:
        low = m2 & -m2
        codes2.append(low.bit_length() - 1)
        m2 ^= low
    while m1:
        low = m1 & -m1
        c1 = (low.bit_length() - 1) * shift
        for c2 in codes2:
            out |= 1 << (c1 + c2)
        m1 ^= low
    return out


def _move_tables(base, m):
    """(rotate, swap, delete-first) code permutations for arity m >= 1."""
    hi = base ** (m - 1)
    codes = range(base**m)
    pr = tuple(c % hi for c in codes)
    if m == 1:
        return None, None, pr
    lo = base ** (m - 2)
    zeta = tuple((c % hi) * base + c // hi for c in codes)
    tau = tuple(
        c + (c // lo % base - c // hi) * hi + (c // hi - c // lo % base) * lo
        for c in codes
    )
    return zeta, tau, pr


def saturate_masks(num_sorts, bases, bound, seeds):
    """Relaxation-maximal records reachable from the seeds under rotation,
    swap, delete-first, same-arity intersection and concatenation.

    Records are (arity, pre_masks, post_masks) with one relation bitmask per
    sort; a record is discarded when another shrinks its premises and grows
    its conclusions componentwise.  Returns the surviving antichain.
    """
    frontier = [[] for _ in range(bound + 1)]
    queue = []
    seen = set()
    sorts = range(num_sorts)
    moves = [[_move_tables(bases[s], m) for s in sorts] for m in range(1, bound + 1)]

    def push(m, pre, post):
        key = (m, pre, post)
        if key in seen:
            return
        seen.add(key)
        lst = frontier[m]
        for rec in lst:
            rpre, rpost = rec[0], rec[1]
            if all(p & ~r == 0 for p, r in zip(pre, rpre)) and all(
                r & ~p == 0 for p, r in zip(post, rpost)
            ):
                return
        for rec in lst:
            rpre, rpost = rec[0], rec[1]
            if all(r & ~p == 0 for p, r in zip(pre, rpre)) and all(
                p & ~r == 0 for p, r in zip(post, rpost)
            ):
                rec[2] = False
        lst[:] = [rec for rec in lst if rec[2]]
        rec = [pre, post, True]
        lst.append(rec)
        queue.append((m, rec))

    for m, pre, post in seeds:
        push(m, tuple(pre), tuple(post))

    while queue:
        m, rec = queue.pop()
        if not rec[2]:
            continue
        pre, post = rec[0], rec[1]
        if m >= 1:
            zt, tt, pt = zip(*moves[m - 1])
            if m >= 2:
                push(m, tuple(map(_perm_mask, pre, zt)), tuple(map(_perm_mask, post, zt)))
                push(m, tuple(map(_perm_mask, pre, tt)), tuple(map(_perm_mask, post, tt)))
            push(m - 1, tuple(map(_perm_mask, pre, pt)), tuple(map(_perm_mask, post, pt)))
        for rm in range(bound + 1):
            lst = frontier[rm]
            if rm == m:
                for other in list(lst):
                    if not rec[2]:
                        break
                    if not other[2]:
                        continue
                    opost = other[1]
                    # a meet with componentwise-comparable conclusions only
                    # relaxes one operand and can never survive
                    if all(x & ~y == 0 for x, y in zip(post, opost)) or all(
                        y & ~x == 0 for x, y in zip(post, opost)
                    ):
                        continue
                    push(m, tuple(x & y for x, y in zip(pre, other[0])),
                         tuple(x & y for x, y in zip(post, opost)))
            if m + rm <= bound:
                shifts_pm = tuple(b**rm for b in bases)
                shifts_mp = tuple(b**m for b in bases)
                for other in list(lst):
                    if not rec[2]:
                        break
                    if not other[2]:
                        continue
                    opre, opost = other[0], other[1]
                    push(m + rm,
                         tuple(_prod_mask(x, y, sh) for x, y, sh in zip(pre, opre, shifts_pm)),
                         tuple(_prod_mask(x, y, sh) for x, y, sh in zip(post, opost, shifts_pm)))
                    push(m + rm,
                         tuple(_prod_mask(y, x, sh) for x, y, sh in zip(pre, opre, shifts_mp)),
                         tuple(_prod_mask(y, x, sh) for x, y, sh in zip(post, opost, shifts_mp)))

    return [
        (m, rec[0], rec[1])
        for m in range(bound + 1)
        for rec in frontier[m]
    ]
