"""Jitted inner loops for the dynamic programs.

Mirrors of the pure-Python table builders in :mod:`hierj.solvers`, compiled
with numba for large trees.  All arithmetic is int64; callers must check
the overflow bound before dispatching here (the pure path has unbounded
integers and is always available).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def table_b(order, left, right, teff, offs, akey, af, ab, bf, bb, bk, rr_out):
    for oi in range(order.shape[0]):
        n = order[oi]
        t = teff[n]
        if t == 0:
            continue
        o = offs[n]
        if akey[n] > 0:
            bf[o + 1] = af[n]
            bb[o + 1] = ab[n]
            bk[o + 1] = akey[n]
        rr_out[o + 1] = 0
        l = left[n]
        if l < 0 or t < 2:
            continue
        r = right[n]
        ol = offs[l]
        orr = offs[r]
        tl = teff[l]
        tr = teff[r]
        for i in range(2, t + 1):
            rmin = i - tl
            if rmin < 1:
                rmin = 1
            rmax = i - 1
            if tr < rmax:
                rmax = tr
            best = bk[orr + rmin] + bk[ol + i - rmin]
            bestr = rmin
            for rank in range(rmin + 1, rmax + 1):
                cand = bk[orr + rank] + bk[ol + i - rank]
                if cand > best:
                    best = cand
                    bestr = rank
            bk[o + i] = best
            rr_out[o + i] = bestr
            bf[o + i] = bf[orr + bestr] + bf[ol + i - bestr]
            bb[o + i] = bb[orr + bestr] + bb[ol + i - bestr]


@njit(cache=True)
def table_c(order, left, right, teff, offs, akey, af, ab, bf, bb, bk, rr_out):
    for oi in range(order.shape[0]):
        n = order[oi]
        t = teff[n]
        o = offs[n]
        l = left[n]
        if l >= 0:
            r = right[n]
            ol = offs[l]
            orr = offs[r]
            tl = teff[l]
            tr = teff[r]
            for i in range(1, t + 1):
                rmin = i - tl
                if rmin < 0:
                    rmin = 0
                rmax = i
                if tr < rmax:
                    rmax = tr
                best = bk[orr + rmin] + bk[ol + i - rmin]
                bestr = rmin
                for rank in range(rmin + 1, rmax + 1):
                    cand = bk[orr + rank] + bk[ol + i - rank]
                    if cand > best:
                        best = cand
                        bestr = rank
                bk[o + i] = best
                rr_out[o + i] = bestr
                bf[o + i] = bf[orr + bestr] + bf[ol + i - bestr]
                bb[o + i] = bb[orr + bestr] + bb[ol + i - bestr]
        if l < 0 or akey[n] >= bk[o + 1]:
            bf[o + 1] = af[n]
            bb[o + 1] = ab[n]
            bk[o + 1] = akey[n]
            rr_out[o + 1] = -1


@njit(cache=True)
def table_d(
    order,
    left,
    right,
    teff,
    offs,
    akey,
    af,
    ab,
    root,
    k,
    pf,
    pb,
    pk,
    rp,
    blp,
    mf,
    mb,
    mk,
    rm,
    blm,
):
    # pass-1 scratch, reused across nodes
    s_pf = np.zeros(k + 1, dtype=np.int64)
    s_pb = np.zeros(k + 1, dtype=np.int64)
    s_pk = np.zeros(k + 1, dtype=np.int64)
    s_mf = np.zeros(k + 1, dtype=np.int64)
    s_mb = np.zeros(k + 1, dtype=np.int64)
    s_mk = np.zeros(k + 1, dtype=np.int64)
    s_rp = np.zeros(k + 1, dtype=np.int64)
    s_rm = np.zeros(k + 1, dtype=np.int64)
    for oi in range(order.shape[0]):
        n = order[oi]
        t = teff[n]
        o = offs[n]
        l = left[n]
        if l < 0:
            pf[o + 1] = af[n]
            pb[o + 1] = ab[n]
            pk[o + 1] = akey[n]
            rp[o + 1] = 0
            blp[o + 1] = 1
            mf[o + 1] = af[n]
            mb[o + 1] = ab[n]
            mk[o + 1] = akey[n]
            rm[o + 1] = 0
            blm[o + 1] = 1
            continue
        r = right[n]
        ol = offs[l]
        orr = offs[r]
        tl = teff[l]
        tr = teff[r]
        s_pf[0] = 0
        s_pb[0] = 0
        s_pk[0] = 0
        s_mf[0] = 0
        s_mb[0] = 0
        s_mk[0] = 0
        s_rp[0] = 0
        s_rm[0] = 0
        for i in range(1, t + 1):
            rmin = i - tl
            if rmin < 0:
                rmin = 0
            rmax = i
            if tr < rmax:
                rmax = tr
            best_p = pk[orr + rmin] + pk[ol + i - rmin]
            best_pr = rmin
            best_m = mk[orr + rmin] + mk[ol + i - rmin]
            best_mr = rmin
            for rank in range(rmin + 1, rmax + 1):
                cand = pk[orr + rank] + pk[ol + i - rank]
                if cand > best_p:
                    best_p = cand
                    best_pr = rank
                cand = mk[orr + rank] + mk[ol + i - rank]
                if cand < best_m:
                    best_m = cand
                    best_mr = rank
            s_pk[i] = best_p
            s_rp[i] = best_pr
            s_pf[i] = pf[orr + best_pr] + pf[ol + i - best_pr]
            s_pb[i] = pb[orr + best_pr] + pb[ol + i - best_pr]
            s_mk[i] = best_m
            s_rm[i] = best_mr
            s_mf[i] = mf[orr + best_mr] + mf[ol + i - best_mr]
            s_mb[i] = mb[orr + best_mr] + mb[ol + i - best_mr]
        if n == root:
            for i in range(1, t + 1):
                pf[o + i] = s_pf[i]
                pb[o + i] = s_pb[i]
                pk[o + i] = s_pk[i]
                rp[o + i] = s_rp[i]
                blp[o + i] = 0
                mf[o + i] = s_mf[i]
                mb[o + i] = s_mb[i]
                mk[o + i] = s_mk[i]
                rm[o + i] = s_rm[i]
                blm[o + i] = 0
            # the root may be selected on its own but never as a container
            if akey[n] > pk[o + 1]:
                pf[o + 1] = af[n]
                pb[o + 1] = ab[n]
                pk[o + 1] = akey[n]
                rp[o + 1] = 0
                blp[o + 1] = 1
        else:
            # second pass: the node itself on top of the opposite table at
            # size i-1; pass-1 values at i-1 are read, never updated ones
            for i in range(1, t + 1):
                cand_k = akey[n] - s_pk[i - 1]
                if cand_k >= s_mk[i]:
                    mf[o + i] = s_mf[i]
                    mb[o + i] = s_mb[i]
                    mk[o + i] = s_mk[i]
                    rm[o + i] = s_rm[i]
                    blm[o + i] = 0
                else:
                    mf[o + i] = af[n] - s_pf[i - 1]
                    mb[o + i] = ab[n] - s_pb[i - 1]
                    mk[o + i] = cand_k
                    rm[o + i] = s_rp[i - 1]
                    blm[o + i] = 1
                cand_k = akey[n] - s_mk[i - 1]
                if cand_k <= s_pk[i]:
                    pf[o + i] = s_pf[i]
                    pb[o + i] = s_pb[i]
                    pk[o + i] = s_pk[i]
                    rp[o + i] = s_rp[i]
                    blp[o + i] = 0
                else:
                    pf[o + i] = af[n] - s_mf[i - 1]
                    pb[o + i] = ab[n] - s_mb[i - 1]
                    pk[o + i] = cand_k
                    rp[o + i] = s_rm[i - 1]
                    blp[o + i] = 1
