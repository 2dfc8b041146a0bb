"""Translation Sperner spaces built from spreads.

Points are the q^{rn} vectors of F_q^{rn}, encoded as base-q integers
(big-endian digit order, matching projective point codes).  Lines are the
cosets x + E of the n-dimensional subspaces E spanned by the spread
elements; the parallel classes are indexed by the spread element.  Any two
distinct points lie on exactly one line, so the structure is a
2-(q^{rn}, q^n, 1) design with parallelism.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import backend, projgeom
from ._kernels import grow_manifold
from .errors import DomainError
from .spreads import Spread, validate_spread

# (q^{rn})^2-sized addition tables get built up front; keep them in memory
_POINT_CAP = 2048


class SpernerSpace:
    """Point/line tables of the affine design of a spread."""

    __slots__ = ("spread", "field", "q", "n", "r", "v", "b", "digits",
                 "vadd", "vsub", "vneg", "diridx", "cones", "coset_rep",
                 "class_reps")

    def __init__(self, spread: Spread):
        self.spread = spread
        f = spread.field
        self.field = f
        self.q = f.order
        self.n = spread.n
        self.r = spread.r
        q, w = self.q, spread.r * spread.n
        v = q**w
        if v > _POINT_CAP:
            raise DomainError(f"point set too large: q^(r*n) = {v} > {_POINT_CAP}")
        self.v = v
        self.b = q ** ((spread.r - 1) * spread.n) * len(spread)

        weights = q ** (w - 1 - np.arange(w, dtype=np.int64))
        codes = np.arange(v, dtype=np.int64)
        digs = (codes[:, None] // weights[None, :]) % q
        self.digits = digs

        vadd = np.zeros((v, v), dtype=np.int64)
        for k in range(w):
            vadd += f.add[digs[:, None, k], digs[None, :, k]] * weights[k]
        self.vadd = vadd
        vneg = (f.neg[digs] * weights[None, :]).sum(axis=1)
        self.vneg = vneg
        self.vsub = vadd[:, vneg]

        lead = digs[:, 0].copy()
        for k in range(1, w):
            lead = np.where(lead == 0, digs[:, k], lead)
        scale = f.inv[lead]
        canon = (f.mul[scale[:, None], digs] * weights[None, :]).sum(axis=1)
        p2e = spread.pt2elem()
        diridx = np.where(codes == 0, -1, p2e[canon])
        self.diridx = diridx

        N = len(spread)
        cones = np.empty((N, q**spread.n), dtype=np.int64)
        for e in range(N):
            pts = projgeom.point_codes(spread.elements[e])
            pdig = (pts[:, None] // weights[None, :]) % q
            vals = [np.zeros(1, dtype=np.int64)]
            for s in range(1, q):
                vals.append((f.mul[s, pdig] * weights[None, :]).sum(axis=1))
            cones[e] = np.sort(np.concatenate(vals))
        self.cones = cones

        rep = np.full((N, v), -1, dtype=np.int64)
        for e in range(N):
            row = rep[e]
            for x in range(v):
                if row[x] < 0:
                    row[vadd[x, cones[e]]] = x
        self.coset_rep = rep
        self.class_reps = [np.unique(rep[e]) for e in range(N)]

    def expected_line_size(self) -> int:
        return self.q**self.n

    def plane_size(self) -> int:
        return self.q ** (2 * self.n)

    def check_line(self, line) -> tuple:
        """Normalize a (class index, representative) pair, or raise."""
        try:
            e, rep = line
            e, rep = int(e), int(rep)
        except (TypeError, ValueError):
            raise DomainError(f"not a line handle: {line!r}") from None
        if not (0 <= e < len(self.spread) and 0 <= rep < self.v):
            raise DomainError(f"line {line!r} is not in the line set")
        return e, int(self.coset_rep[e][rep])

    def line_points(self, line) -> np.ndarray:
        e, rep = self.check_line(line)
        return np.sort(self.vadd[rep, self.cones[e]])

    def line_of(self, x: int, y: int) -> tuple:
        """The unique line through two distinct points."""
        x, y = int(x), int(y)
        if x == y or not (0 <= x < self.v and 0 <= y < self.v):
            raise DomainError("need two distinct points")
        e = int(self.diridx[self.vsub[y, x]])
        return (e, int(self.coset_rep[e][x]))

    def origin_line(self, e: int) -> tuple:
        """The line through 0 whose direction is spread element e."""
        if not 0 <= e < len(self.spread):
            raise DomainError(f"no spread element with index {e}")
        return (e, 0)

    def lines(self) -> list:
        out = []
        for e in range(len(self.spread)):
            out.extend((e, int(rp)) for rp in self.class_reps[e])
        return out

    def __repr__(self):
        return (f"SpernerSpace(q={self.q}, n={self.n}, r={self.r}, "
                f"v={self.v}, b={self.b})")


def build_sperner(S: Spread) -> SpernerSpace:
    """Tables for the affine point-line design of a valid spread."""
    ok, witness = validate_spread(S)
    if not ok:
        raise DomainError(f"not a spread: {witness}")
    return SpernerSpace(S)


def linear_manifold(T: SpernerSpace, pts) -> np.ndarray:
    """Smallest line-closed point set containing pts (sorted codes)."""
    seeds = np.asarray(sorted(set(int(p) for p in pts)), dtype=np.int64)
    if seeds.size == 0:
        raise DomainError("need at least one point")
    if seeds[0] < 0 or seeds[-1] >= T.v:
        raise DomainError("point code out of range")
    cnt, members, mlist = grow_manifold(seeds, T.v, T.vadd, T.vsub,
                                        T.diridx, T.cones)
    return np.sort(mlist[:cnt])


def collinear(T: SpernerSpace, p1: int, p2: int, p3: int) -> bool:
    if len({int(p1), int(p2), int(p3)}) < 3:
        return True
    d2 = T.diridx[T.vsub[p2, p1]]
    d3 = T.diridx[T.vsub[p3, p1]]
    return bool(d2 == d3)


def pseudo_plane(T: SpernerSpace, p1: int, p2: int, p3: int) -> np.ndarray:
    """Linear manifold of a non-collinear point triple."""
    if collinear(T, p1, p2, p3):
        raise DomainError("points are collinear")
    return linear_manifold(T, [p1, p2, p3])


def _grow(T: SpernerSpace, seeds, cap: int):
    seeds = np.asarray(seeds, dtype=np.int64)
    return grow_manifold(seeds, cap, T.vadd, T.vsub, T.diridx, T.cones)


def _plane_is_affine(T: SpernerSpace, members: np.ndarray, mlist: np.ndarray,
                     cnt: int):
    """Exact size plus induced 2-(q^{2n}, q^n, 1) design check."""
    k = T.expected_line_size()
    v2 = T.plane_size()
    if cnt != v2:
        return False, {"kind": "size", "size": int(cnt), "expected": v2}
    pts = np.sort(mlist[:cnt])
    pos = {int(p): i for i, p in enumerate(pts)}
    lines = set()
    ii, jj = np.triu_indices(cnt, 1)
    dirs = T.diridx[T.vsub[pts[jj], pts[ii]]]
    for a, f in zip(pts[ii], dirs):
        lines.add((int(f), int(T.coset_rep[f][a])))
    if len(lines) != k * (k + 1):
        return False, {"kind": "line_count", "count": len(lines),
                       "expected": k * (k + 1)}
    cover = np.zeros((cnt, cnt), dtype=np.int64)
    for ln in lines:
        lp = T.line_points(ln)
        if not members[lp].all():
            return False, {"kind": "line_escapes", "line": ln}
        idx = np.fromiter((pos[int(p)] for p in lp), dtype=np.int64)
        a, b = np.triu_indices(len(idx), 1)
        cover[idx[a], idx[b]] += 1
    ui, uj = np.triu_indices(cnt, 1)
    bad = cover[ui, uj] != 1
    if bad.any():
        w = int(np.flatnonzero(bad)[0])
        return False, {"kind": "pair_coverage",
                       "pair": [int(pts[ui[w]]), int(pts[uj[w]])],
                       "count": int(cover[ui[w], uj[w]])}
    return True, None


def _candidate_points(T: SpernerSpace, line, oracle: bool) -> list:
    e, rep = T.check_line(line)
    if oracle:
        on = set(int(x) for x in T.line_points(line))
        return [x for x in range(T.v) if x not in on]
    # one representative per direction class: the pseudo-plane through the
    # line and Q depends only on the direction of Q - rep
    out = []
    for f in range(len(T.spread)):
        if f != e:
            out.append(int(T.vadd[rep, T.cones[f, 1]]))
    return out


def is_normal_line(T: SpernerSpace, line, oracle: bool = False) -> bool:
    """Is every pseudo-plane through the line an affine plane?"""
    ok, _ = normal_line_report(T, line, oracle=oracle)
    return ok


def normal_line_report(T: SpernerSpace, line, oracle: bool = False):
    """(boolean, witness) form of the normal-line check."""
    e, rep = T.check_line(line)
    base = T.line_points((e, rep))
    v2 = T.plane_size()
    seeds = np.empty(len(base) + 1, dtype=np.int64)
    seeds[:-1] = base
    for Q in _candidate_points(T, (e, rep), oracle):
        seeds[-1] = Q
        cnt, members, mlist = _grow(T, seeds, v2)
        if cnt > v2:
            true_cnt, _, _ = _grow(T, seeds, T.v)
            return False, {"kind": "size", "Q": int(Q),
                           "direction": int(T.diridx[T.vsub[Q, rep]]),
                           "size": int(true_cnt), "expected": v2}
        ok, witness = _plane_is_affine(T, members, mlist, cnt)
        if not ok:
            witness["Q"] = int(Q)
            return False, witness
    return True, None


def normal_line_scan(T: SpernerSpace, lines=None, oracle: bool = False,
                     threads: int | None = None) -> list:
    """Normality verdicts for many lines (default: all origin lines)."""
    if lines is None:
        lines = [T.origin_line(e) for e in range(len(T.spread))]
    lines = [T.check_line(ln) for ln in lines]
    k = max(1, min(threads or backend.THREADS, len(lines)))
    with ThreadPoolExecutor(max_workers=k) as pool:
        flags = list(pool.map(
            lambda ln: normal_line_report(T, ln, oracle=oracle), lines))
    return [{"line": [int(e), int(rp)], "normal": bool(ok),
             **({"witness": w} if w else {})}
            for (e, rp), (ok, w) in zip(lines, flags)]


def validate_design(T: SpernerSpace, lines=None, classes=None) -> dict:
    """Exhaustive 2-design and parallelism verification.

    lines/classes may be overridden to probe corrupted structures; classes
    maps a label to a list of indices into the line list.
    """
    if lines is None:
        lines = T.lines()
    lines = [tuple(ln) for ln in lines]
    if classes is None:
        classes = {}
        for i, (e, _) in enumerate(lines):
            classes.setdefault(e, []).append(i)
    k = T.expected_line_size()
    report = {
        "v": T.v,
        "b": len(lines),
        "expected_b": T.b,
        "classes": len(classes),
        "line_size_ok": True,
        "pair_coverage_ok": True,
        "parallelism_ok": True,
    }
    witness = None
    pt_sets = [T.line_points(ln) for ln in lines]
    for ln, lp in zip(lines, pt_sets):
        if len(lp) != k:
            report["line_size_ok"] = False
            witness = witness or {"kind": "line_size", "line": list(ln)}
    cover = np.zeros((T.v, T.v), dtype=np.int64)
    for lp in pt_sets:
        a, b = np.triu_indices(len(lp), 1)
        cover[lp[a], lp[b]] += 1
    ui, uj = np.triu_indices(T.v, 1)
    bad = cover[ui, uj] != 1
    if bad.any():
        w = int(np.flatnonzero(bad)[0])
        report["pair_coverage_ok"] = False
        witness = witness or {"kind": "pair_coverage",
                              "pair": [int(ui[w]), int(uj[w])],
                              "count": int(cover[ui[w], uj[w]])}
    for label in sorted(classes):
        pts = np.concatenate([pt_sets[i] for i in classes[label]]) \
            if classes[label] else np.empty(0, dtype=np.int64)
        if len(pts) != T.v or len(np.unique(pts)) != T.v:
            report["parallelism_ok"] = False
            witness = witness or {"kind": "parallelism", "class": label}
    report["pass"] = (report["line_size_ok"] and report["pair_coverage_ok"]
                      and report["parallelism_ok"]
                      and report["b"] == report["expected_b"])
    if witness:
        report["witness"] = witness
    return report


def export_design_csv(T: SpernerSpace) -> str:
    """Sparse incidence CSV: header, then point,line,class triples.

    Lines are numbered in (class, representative) order; the class label is
    the spread element index of the line's direction.
    """
    rows = [
        "# schema,spreadlab/1",
        f"# q,{T.q},n,{T.n},r,{T.r}",
        f"# spread_hash,{T.spread.content_hash()}",
        "point,line,class",
    ]
    lines = T.lines()
    for i, ln in enumerate(lines):
        for p in T.line_points(ln):
            rows.append(f"{int(p)},{i},{ln[0]}")
    return "\n".join(rows) + "\n"
