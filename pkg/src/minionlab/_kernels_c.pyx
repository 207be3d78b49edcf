# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.  Reference semantics live in _kernels_py; both must
return identical values on identical inputs."""

from cpython cimport array
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memcpy

import array as _array

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil

BACKEND = "c"


cdef bint _scan(const long *outputs, const long *strides, int n, int m,
                long out_size, const unsigned char *mask,
                const long **rows, const long *counts, long *choice):
    cdef int i, j
    cdef long code, idx
    if m == 0:
        return mask[0] != 0
    for i in range(n):
        choice[i] = 0
    while True:
        code = 0
        for j in range(m):
            idx = 0
            for i in range(n):
                idx += strides[i] * rows[i][choice[i] * m + j]
            code = code * out_size + outputs[idx]
        if mask[code] == 0:
            return False
        i = n - 1
        while i >= 0:
            choice[i] += 1
            if choice[i] < counts[i]:
                break
            choice[i] = 0
            i -= 1
        if i < 0:
            return True


def check_pair(outputs, strides, arg_sorts, out_sort, out_size, prep):
    m, rows_by_sort, counts, masks = prep
    cdef int n = len(arg_sorts)
    cdef int i
    for i in range(n):
        if counts[arg_sorts[i]] == 0:
            return True
    mask_b = masks[out_sort]
    cdef const unsigned char[::1] mv
    cdef const unsigned char *mp = NULL
    if len(mask_b):
        mv = mask_b
        mp = &mv[0]
    cdef array.array out_a = _array.array('l', outputs)
    cdef array.array str_a = _array.array('l', strides if n else [0])
    cdef array.array cnt_a = _array.array('l', [counts[t] for t in arg_sorts] if n else [0])
    rows_keep = []
    cdef const long **rows = <const long **> malloc(max(n, 1) * sizeof(long *))
    cdef long *choice = <long *> malloc(max(n, 1) * sizeof(long))
    cdef array.array rb
    try:
        for i in range(n):
            rb = _array.array('l', rows_by_sort[arg_sorts[i]])
            rows_keep.append(rb)
            rows[i] = rb.data.as_longs
        return _scan(out_a.data.as_longs if len(out_a) else NULL,
                     str_a.data.as_longs, n, m, out_size, mp,
                     rows, cnt_a.data.as_longs, choice)
    finally:
        free(rows)
        free(choice)


def filter_tables(table_len, out_size, strides, arg_sorts, out_sort, preps):
    cdef int n = len(arg_sorts)
    cdef int P = len(preps)
    cdef int tl = table_len
    cdef long osz = out_size
    survivors = []
    cdef array.array str_a = _array.array('l', strides if n else [0])
    cdef long *ms = <long *> malloc(max(P, 1) * sizeof(long))
    cdef bint *skip = <bint *> malloc(max(P, 1) * sizeof(bint))
    cdef const unsigned char **maskp = <const unsigned char **> malloc(max(P, 1) * sizeof(void *))
    cdef const long **rowsp = <const long **> malloc(max(P * n, 1) * sizeof(long *))
    cdef long *cnts = <long *> malloc(max(P * n, 1) * sizeof(long))
    cdef long *outputs = <long *> malloc(max(tl, 1) * sizeof(long))
    cdef long *choice = <long *> malloc(max(n, 1) * sizeof(long))
    keep = []
    cdef int p, i, j
    cdef bint ok
    cdef const unsigned char[::1] mv
    cdef array.array rb
    try:
        for p in range(P):
            m_p, rows_by_sort, counts, masks = preps[p]
            ms[p] = m_p
            skip[p] = False
            for i in range(n):
                if counts[arg_sorts[i]] == 0:
                    skip[p] = True
            mask_b = masks[out_sort]
            if len(mask_b):
                mv = mask_b
                maskp[p] = &mv[0]
                keep.append(mask_b)
            else:
                maskp[p] = NULL
            if skip[p]:
                continue
            for i in range(n):
                t = arg_sorts[i]
                rb = _array.array('l', rows_by_sort[t])
                keep.append(rb)
                rowsp[p * n + i] = rb.data.as_longs
                cnts[p * n + i] = counts[t]
        for j in range(tl):
            outputs[j] = 0
        while True:
            ok = True
            for p in range(P):
                if skip[p]:
                    continue
                if not _scan(outputs, str_a.data.as_longs, n, ms[p], osz,
                             maskp[p], rowsp + p * n, cnts + p * n, choice):
                    ok = False
                    break
            if ok:
                survivors.append(tuple([outputs[j] for j in range(tl)]))
            if tl == 0:
                break
            j = tl - 1
            while j >= 0:
                outputs[j] += 1
                if outputs[j] < osz:
                    break
                outputs[j] = 0
                j -= 1
            if j < 0:
                break
        return survivors
    finally:
        free(ms)
        free(skip)
        free(maskp)
        free(rowsp)
        free(cnts)
        free(outputs)
        free(choice)


def minor_table(f_outputs, f_strides, positions, u_sizes):
    cdef int m = len(u_sizes)
    cdef int n = len(positions)
    cdef long total = 1
    cdef int i, j
    for i in range(m):
        total *= u_sizes[i]
    if total == 0:
        return ()
    cdef array.array fo = _array.array('l', f_outputs)
    cdef array.array fs = _array.array('l', f_strides if n else [0])
    cdef array.array ps = _array.array('l', positions if n else [0])
    cdef array.array us = _array.array('l', u_sizes if m else [0])
    cdef long *digits = <long *> malloc(max(m, 1) * sizeof(long))
    cdef long idx
    res = []
    try:
        for i in range(m):
            digits[i] = 0
        while True:
            idx = 0
            for i in range(n):
                idx += fs.data.as_longs[i] * digits[ps.data.as_longs[i]]
            res.append(fo.data.as_longs[idx])
            j = m - 1
            while j >= 0:
                digits[j] += 1
                if digits[j] < us.data.as_longs[j]:
                    break
                digits[j] = 0
                j -= 1
            if j < 0:
                break
        return tuple(res)
    finally:
        free(digits)


MASK_WORD = 64  # single-word masks; the dispatcher checks widths


cdef struct Pool:
    uint64_t *masks     # 2*ns words per record: pre then post
    int *arity
    char *alive
    long count
    long cap
    int ns


cdef long pool_add(Pool *pl, int m, const uint64_t *words) except -1:
    cdef long idx = pl.count
    cdef long newcap
    if idx == pl.cap:
        newcap = pl.cap * 2
        pl.masks = <uint64_t *> realloc(pl.masks, newcap * 2 * pl.ns * sizeof(uint64_t))
        pl.arity = <int *> realloc(pl.arity, newcap * sizeof(int))
        pl.alive = <char *> realloc(pl.alive, newcap * sizeof(char))
        if pl.masks == NULL or pl.arity == NULL or pl.alive == NULL:
            raise MemoryError()
        pl.cap = newcap
    memcpy(pl.masks + idx * 2 * pl.ns, words, 2 * pl.ns * sizeof(uint64_t))
    pl.arity[idx] = m
    pl.alive[idx] = 1
    pl.count += 1
    return idx


cdef struct LongVec:
    long *data
    long count
    long cap


cdef int vec_push(LongVec *v, long x) except -1:
    if v.count == v.cap:
        v.cap = v.cap * 2 if v.cap else 16
        v.data = <long *> realloc(v.data, v.cap * sizeof(long))
        if v.data == NULL:
            raise MemoryError()
    v.data[v.count] = x
    v.count += 1
    return 0


cdef struct Seen:
    int64_t *slots      # offsets into keys, -1 empty
    uint64_t *keys      # kw words per key
    long count
    long cap            # power of two
    long key_cap
    int kw


cdef int seen_grow(Seen *sn) except -1:
    cdef long newcap = sn.cap * 2
    cdef int64_t *slots = <int64_t *> malloc(newcap * sizeof(int64_t))
    cdef long i, j
    cdef uint64_t h
    cdef int w
    if slots == NULL:
        raise MemoryError()
    for i in range(newcap):
        slots[i] = -1
    for i in range(sn.count):
        h = <uint64_t> 1469598103934665603
        for w in range(sn.kw):
            h = (h ^ sn.keys[i * sn.kw + w]) * <uint64_t> 1099511628211
        j = h & (newcap - 1)
        while slots[j] != -1:
            j = (j + 1) & (newcap - 1)
        slots[j] = i
    free(sn.slots)
    sn.slots = slots
    sn.cap = newcap
    return 0


cdef bint seen_insert(Seen *sn, const uint64_t *key) except -1:
    """True if newly inserted, False if already present."""
    cdef uint64_t h = <uint64_t> 1469598103934665603
    cdef int w
    cdef long j, off
    for w in range(sn.kw):
        h = (h ^ key[w]) * <uint64_t> 1099511628211
    j = h & (sn.cap - 1)
    while True:
        off = sn.slots[j]
        if off == -1:
            break
        for w in range(sn.kw):
            if sn.keys[off * sn.kw + w] != key[w]:
                break
        else:
            return False
        j = (j + 1) & (sn.cap - 1)
    if sn.count == sn.key_cap:
        sn.key_cap *= 2
        sn.keys = <uint64_t *> realloc(sn.keys, sn.key_cap * sn.kw * sizeof(uint64_t))
        if sn.keys == NULL:
            raise MemoryError()
    memcpy(sn.keys + sn.count * sn.kw, key, sn.kw * sizeof(uint64_t))
    sn.slots[j] = sn.count
    sn.count += 1
    if sn.count * 10 >= sn.cap * 7:
        seen_grow(sn)
    return True


cdef uint64_t perm_word(uint64_t mask, const int *table) nogil:
    cdef uint64_t out = 0, low
    while mask:
        low = mask & (~mask + 1)
        out |= (<uint64_t> 1) << table[__builtin_ctzll(low)]
        mask ^= low
    return out


cdef uint64_t prod_word(uint64_t m1, uint64_t m2, uint64_t shift) nogil:
    cdef uint64_t out = 0, a = m1, b, low
    cdef int ca
    while a:
        low = a & (~a + 1)
        ca = __builtin_ctzll(low)
        b = m2
        while b:
            out |= (<uint64_t> 1) << (ca * shift + __builtin_ctzll(b))
            b &= b - 1
        a ^= low
    return out


cdef long saturate_push(Pool *pl, LongVec *fr, LongVec *queue, Seen *sn,
                        int m, uint64_t *words) except -1:
    cdef int ns = pl.ns, s
    cdef long i, j, idx
    cdef uint64_t *rm
    cdef bint dom
    words[2 * ns] = <uint64_t> m
    if not seen_insert(sn, words):
        return 0
    cdef LongVec *lst = &fr[m]
    for i in range(lst.count):
        idx = lst.data[i]
        rm = pl.masks + idx * 2 * ns
        dom = True
        for s in range(ns):
            if words[s] & ~rm[s] or rm[ns + s] & ~words[ns + s]:
                dom = False
                break
        if dom:
            return 0
    j = 0
    for i in range(lst.count):
        idx = lst.data[i]
        rm = pl.masks + idx * 2 * ns
        dom = True
        for s in range(ns):
            if rm[s] & ~words[s] or words[ns + s] & ~rm[ns + s]:
                dom = False
                break
        if dom:
            pl.alive[idx] = 0
        else:
            lst.data[j] = idx
            j += 1
    lst.count = j
    idx = pool_add(pl, m, words)
    vec_push(lst, idx)
    vec_push(queue, idx)
    return 0


def saturate_masks(num_sorts, bases, bound, seeds):
    """Same contract as the pure engine: relaxation-maximal saturation of
    packed mask records under the generating moves."""
    cdef int ns = num_sorts
    cdef int bnd = bound
    cdef int s, m, rm, w
    cdef long i, oi, idx, oidx
    cdef uint64_t *om
    cdef uint64_t *rm_masks
    cdef bint dom

    cdef Pool pl
    pl.ns = ns
    pl.cap = 1024
    pl.count = 0
    pl.masks = <uint64_t *> malloc(pl.cap * 2 * ns * sizeof(uint64_t))
    pl.arity = <int *> malloc(pl.cap * sizeof(int))
    pl.alive = <char *> malloc(pl.cap * sizeof(char))

    cdef Seen sn
    sn.kw = 2 * ns + 1
    sn.cap = 1024
    sn.key_cap = 1024
    sn.count = 0
    sn.slots = <int64_t *> malloc(sn.cap * sizeof(int64_t))
    sn.keys = <uint64_t *> malloc(sn.key_cap * sn.kw * sizeof(uint64_t))
    for i in range(sn.cap):
        sn.slots[i] = -1

    cdef LongVec *fr = <LongVec *> malloc((bnd + 1) * sizeof(LongVec))
    cdef LongVec queue
    queue.data = NULL; queue.count = 0; queue.cap = 0
    for m in range(bnd + 1):
        fr[m].data = NULL; fr[m].count = 0; fr[m].cap = 0

    # code permutation tables: moves[(m-1)*ns + s] -> zeta, tau, pr
    cdef long tbl_sz = 0
    cdef int *base_pows = <int *> malloc((bnd + 1) * ns * sizeof(int))
    for s in range(ns):
        base_pows[s] = 1
        for m in range(1, bnd + 1):
            base_pows[m * ns + s] = base_pows[(m - 1) * ns + s] * <int> bases[s]
    for m in range(1, bnd + 1):
        for s in range(ns):
            tbl_sz += base_pows[m * ns + s]
    cdef int *zt = <int *> malloc(max(tbl_sz, 1) * sizeof(int))
    cdef int *tt = <int *> malloc(max(tbl_sz, 1) * sizeof(int))
    cdef int *pt = <int *> malloc(max(tbl_sz, 1) * sizeof(int))
    cdef long *tbl_off = <long *> malloc((bnd + 1) * ns * sizeof(long))
    cdef long off = 0
    cdef int base, hi, lo, code, d0, d1
    for m in range(1, bnd + 1):
        for s in range(ns):
            tbl_off[m * ns + s] = off
            base = <int> bases[s]
            hi = base_pows[(m - 1) * ns + s]
            for code in range(base_pows[m * ns + s]):
                pt[off + code] = code % hi
                if m >= 2:
                    lo = base_pows[(m - 2) * ns + s]
                    d0 = code // hi
                    d1 = code // lo % base
                    zt[off + code] = (code % hi) * base + code // hi
                    tt[off + code] = code + (d1 - d0) * hi + (d0 - d1) * lo
            off += base_pows[m * ns + s]

    cdef uint64_t *scratch = <uint64_t *> malloc((2 * ns + 1) * sizeof(uint64_t))
    cdef uint64_t *cur = <uint64_t *> malloc(2 * ns * sizeof(uint64_t))
    cdef LongVec snap
    snap.data = NULL; snap.count = 0; snap.cap = 0

    try:
        if (pl.masks == NULL or pl.arity == NULL or pl.alive == NULL or
                sn.slots == NULL or sn.keys == NULL or fr == NULL or
                base_pows == NULL or zt == NULL or tt == NULL or pt == NULL or
                tbl_off == NULL or scratch == NULL or cur == NULL):
            raise MemoryError()
        for sm, spre, spost in seeds:
            m = sm
            for s in range(ns):
                scratch[s] = <uint64_t> spre[s]
                scratch[ns + s] = <uint64_t> spost[s]
            saturate_push(&pl, fr, &queue, &sn, m, scratch)

        while queue.count:
            queue.count -= 1
            idx = queue.data[queue.count]
            if not pl.alive[idx]:
                continue
            m = pl.arity[idx]
            memcpy(cur, pl.masks + idx * 2 * ns, 2 * ns * sizeof(uint64_t))
            if m >= 1:
                if m >= 2:
                    for s in range(ns):
                        off = tbl_off[m * ns + s]
                        scratch[s] = perm_word(cur[s], zt + off)
                        scratch[ns + s] = perm_word(cur[ns + s], zt + off)
                    saturate_push(&pl, fr, &queue, &sn, m, scratch)
                    for s in range(ns):
                        off = tbl_off[m * ns + s]
                        scratch[s] = perm_word(cur[s], tt + off)
                        scratch[ns + s] = perm_word(cur[ns + s], tt + off)
                    saturate_push(&pl, fr, &queue, &sn, m, scratch)
                for s in range(ns):
                    off = tbl_off[m * ns + s]
                    scratch[s] = perm_word(cur[s], pt + off)
                    scratch[ns + s] = perm_word(cur[ns + s], pt + off)
                saturate_push(&pl, fr, &queue, &sn, m - 1, scratch)
            for rm in range(bnd + 1):
                if rm == m or m + rm <= bnd:
                    # snapshot: pushes compact and extend the frontier list
                    snap.count = 0
                    for i in range(fr[rm].count):
                        vec_push(&snap, fr[rm].data[i])
                else:
                    continue
                if rm == m:
                    for oi in range(snap.count):
                        if not pl.alive[idx]:
                            break
                        oidx = snap.data[oi]
                        if not pl.alive[oidx]:
                            continue
                        om = pl.masks + oidx * 2 * ns
                        dom = True
                        for s in range(ns):
                            if cur[ns + s] & ~om[ns + s]:
                                dom = False
                                break
                        if not dom:
                            dom = True
                            for s in range(ns):
                                if om[ns + s] & ~cur[ns + s]:
                                    dom = False
                                    break
                        if dom:
                            continue
                        for s in range(ns):
                            scratch[s] = cur[s] & om[s]
                            scratch[ns + s] = cur[ns + s] & om[ns + s]
                        saturate_push(&pl, fr, &queue, &sn, m, scratch)
                if m + rm <= bnd:
                    for oi in range(snap.count):
                        if not pl.alive[idx]:
                            break
                        oidx = snap.data[oi]
                        if not pl.alive[oidx]:
                            continue
                        om = pl.masks + oidx * 2 * ns
                        for s in range(ns):
                            scratch[s] = prod_word(cur[s], om[s], base_pows[rm * ns + s])
                            scratch[ns + s] = prod_word(cur[ns + s], om[ns + s], base_pows[rm * ns + s])
                        saturate_push(&pl, fr, &queue, &sn, m + rm, scratch)
                        for s in range(ns):
                            scratch[s] = prod_word(om[s], cur[s], base_pows[m * ns + s])
                            scratch[ns + s] = prod_word(om[ns + s], cur[ns + s], base_pows[m * ns + s])
                        saturate_push(&pl, fr, &queue, &sn, m + rm, scratch)

        out = []
        for m in range(bnd + 1):
            for i in range(fr[m].count):
                idx = fr[m].data[i]
                if not pl.alive[idx]:
                    continue
                rm_masks = pl.masks + idx * 2 * ns
                out.append((m,
                            tuple([rm_masks[s] for s in range(ns)]),
                            tuple([rm_masks[ns + s] for s in range(ns)])))
        return out
    finally:
        free(pl.masks); free(pl.arity); free(pl.alive)
        free(sn.slots); free(sn.keys)
        for m in range(bnd + 1):
            free(fr[m].data)
        free(fr); free(queue.data); free(snap.data)
        free(base_pows); free(zt); free(tt); free(pt); free(tbl_off)
        free(scratch); free(cur)
