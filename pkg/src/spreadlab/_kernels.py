"""Hot loops, written once in nopython-compatible style.

Every function here takes raw numpy int64 arrays (element codes plus the
field's lookup tables) and is wrapped by ``backend.compile_kernel``: numba
njit(cache=True, nogil=True) by default, the plain interpreted function under
SPREADLAB_BACKEND=python.  Results are identical either way; tests compare.

Conventions: matrices are row-major int64 code arrays; points are row vectors;
projective point codes are big-endian base-q packings of canonical vectors
(first nonzero coordinate = 1).
"""

import numpy as np

from .backend import compile_kernel


def _mat_mul(a, b, addt, mult):
    m, k = a.shape
    n = b.shape[1]
    out = np.zeros((m, n), dtype=np.int64)
    for i in range(m):
        for j in range(n):
            acc = 0
            for t in range(k):
                acc = addt[acc, mult[a[i, t], b[t, j]]]
            out[i, j] = acc
    return out


mat_mul = compile_kernel(_mat_mul)


def _rref_in_place(mat, addt, mult, negt, invt):
    rows, cols = mat.shape
    r = 0
    for c in range(cols):
        pr = -1
        for i in range(r, rows):
            if mat[i, c] != 0:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(cols):
                tmp = mat[r, j]
                mat[r, j] = mat[pr, j]
                mat[pr, j] = tmp
        piv = mat[r, c]
        if piv != 1:
            s = invt[piv]
            for j in range(c, cols):
                mat[r, j] = mult[mat[r, j], s]
        for i in range(rows):
            if i != r and mat[i, c] != 0:
                f = negt[mat[i, c]]
                for j in range(c, cols):
                    mat[i, j] = addt[mat[i, j], mult[f, mat[r, j]]]
        r += 1
        if r == rows:
            break
    return r


rref_in_place = compile_kernel(_rref_in_place)


def _det_in_place(mat, addt, mult, negt, invt):
    # destroys mat; returns the determinant code
    n = mat.shape[0]
    det = 1
    r = 0
    for c in range(n):
        pr = -1
        for i in range(r, n):
            if mat[i, c] != 0:
                pr = i
                break
        if pr < 0:
            return 0
        if pr != r:
            for j in range(c, n):
                tmp = mat[r, j]
                mat[r, j] = mat[pr, j]
                mat[pr, j] = tmp
            det = negt[det]
        piv = mat[r, c]
        det = mult[det, piv]
        s = invt[piv]
        for i in range(r + 1, n):
            if mat[i, c] != 0:
                f = negt[mult[mat[i, c], s]]
                for j in range(c, n):
                    mat[i, j] = addt[mat[i, j], mult[f, mat[r, j]]]
        r += 1
    return det


det_in_place = compile_kernel(_det_in_place)


def _subspace_point_codes(basis, q, addt, mult):
    # basis: k x w, RREF.  Emits the (q^k-1)/(q-1) canonical points (first
    # nonzero coefficient 1), coded big-endian base q.  RREF input guarantees
    # the produced vectors are themselves canonical.
    k, w = basis.shape
    npts = 0
    for _ in range(k):
        npts = npts * q + 1
    out = np.empty(npts, dtype=np.int64)
    v = np.empty(w, dtype=np.int64)
    idx = 0
    for lead in range(k):
        nfree = k - lead - 1
        total = 1
        for _ in range(nfree):
            total *= q
        for t in range(total):
            for j in range(w):
                v[j] = basis[lead, j]
            tt = t
            for f in range(nfree):
                c = tt % q
                tt //= q
                if c != 0:
                    row = lead + 1 + f
                    for j in range(w):
                        v[j] = addt[v[j], mult[c, basis[row, j]]]
            code = 0
            for j in range(w):
                code = code * q + v[j]
            out[idx] = code
            idx += 1
    return out


subspace_point_codes = compile_kernel(_subspace_point_codes)


def _cover_scan(bases, q, addt, mult, cover):
    # bases: N x k x w element bases (RREF).  Fills cover[code] = element
    # index.  Returns (status, i, j): status 1 means elements i and j share a
    # point, status 0 means no overlap found.
    N = bases.shape[0]
    for e in range(N):
        codes = subspace_point_codes(bases[e], q, addt, mult)
        for i in range(codes.shape[0]):
            c = codes[i]
            if cover[c] >= 0:
                return 1, cover[c], e
            cover[c] = e
    return 0, -1, -1


cover_scan = compile_kernel(_cover_scan)


def _pairwise_diff_invertible(mats, addt, mult, negt, invt):
    # spread-set test: returns (1,-1,-1) if all pairwise differences are
    # invertible, else (0,i,j) for the first failing pair
    N, n, _ = mats.shape
    d = np.empty((n, n), dtype=np.int64)
    for i in range(N):
        for j in range(i + 1, N):
            for r in range(n):
                for c in range(n):
                    d[r, c] = addt[mats[i, r, c], negt[mats[j, r, c]]]
            if det_in_place(d, addt, mult, negt, invt) == 0:
                return 0, i, j
    return 1, -1, -1


pairwise_diff_invertible = compile_kernel(_pairwise_diff_invertible)


def _normal_pair_ok(basisE, basisF, q, addt, mult, negt, invt, pt2elem, elem_size, counts):
    # Does the span of elements E and F get partitioned by spread elements?
    # counts: zeroed scratch of length N (left zeroed on return).
    nE = basisE.shape[0]
    nF = basisF.shape[0]
    w = basisE.shape[1]
    st = np.empty((nE + nF, w), dtype=np.int64)
    for i in range(nE):
        for j in range(w):
            st[i, j] = basisE[i, j]
    for i in range(nF):
        for j in range(w):
            st[nE + i, j] = basisF[i, j]
    r = rref_in_place(st, addt, mult, negt, invt)
    codes = subspace_point_codes(st[:r], q, addt, mult)
    touched = np.empty(codes.shape[0], dtype=np.int64)
    nt = 0
    for i in range(codes.shape[0]):
        e = pt2elem[codes[i]]
        if counts[e] == 0:
            touched[nt] = e
            nt += 1
        counts[e] += 1
    ok = True
    for i in range(nt):
        if counts[touched[i]] != elem_size:
            ok = False
    for i in range(nt):
        counts[touched[i]] = 0
    return ok


normal_pair_ok = compile_kernel(_normal_pair_ok)


def _normal_scan_range(bases, e_start, e_end, q, addt, mult, negt, invt, pt2elem,
                       elem_size, flags, witness):
    # flags[E] = 1 if element E is normal; witness[E] = first partner F whose
    # span is not partitioned (or -1)
    N = bases.shape[0]
    counts = np.zeros(N, dtype=np.int64)
    for E in range(e_start, e_end):
        flags[E] = 1
        witness[E] = -1
        for F in range(N):
            if F == E:
                continue
            if not normal_pair_ok(bases[E], bases[F], q, addt, mult, negt, invt,
                                  pt2elem, elem_size, counts):
                flags[E] = 0
                witness[E] = F
                break


normal_scan_range = compile_kernel(_normal_scan_range)


def _grow_manifold(seeds, cap, vadd, vsub, diridx, cones):
    # Line-closure fixpoint in a Sperner space.  seeds: vector codes.  cones:
    # N x q^n table, row e = vector codes of the cone of spread element e
    # (zero included).  diridx: nonzero vector code -> element index of its
    # direction.  Stops early once the member count exceeds cap.
    # Returns (size, members bitmap, member list).
    v = vadd.shape[0]
    members = np.zeros(v, dtype=np.uint8)
    mlist = np.empty(v, dtype=np.int64)
    cnt = 0
    for i in range(seeds.shape[0]):
        s = seeds[i]
        if members[s] == 0:
            members[s] = 1
            mlist[cnt] = s
            cnt += 1
    clen = cones.shape[1]
    a = 1
    while a < cnt:
        if cnt > cap:
            return cnt, members, mlist
        pa = mlist[a]
        for b in range(a):
            d = vsub[mlist[b], pa]
            e = diridx[d]
            for t in range(clen):
                pt = vadd[pa, cones[e, t]]
                if members[pt] == 0:
                    members[pt] = 1
                    mlist[cnt] = pt
                    cnt += 1
        a += 1
    return cnt, members, mlist


grow_manifold = compile_kernel(_grow_manifold)
