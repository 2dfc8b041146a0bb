"""Closure and pivot-restricted closure of point sets in PG(2, q).

Points are handled as canonical homogeneous triples (first nonzero
coordinate 1).  Lines are represented by their dual triples, so both the
line through two points and the meet of two lines are cross products.
"""

from itertools import combinations

import numpy as np

from . import fieldreduction, gf, linalg, projgeom, spreads
from .errors import DomainError
from .projgeom import ProjPoint, Subspace


def _canonicalize_rows(field, rows: np.ndarray) -> np.ndarray:
    """Scale each nonzero row so its first nonzero entry is 1."""
    rows = rows.copy()
    lead = rows[:, 0].copy()
    for c in (1, 2):
        lead = np.where(lead == 0, rows[:, c], lead)
    keep = lead != 0
    rows = rows[keep]
    lead = lead[keep]
    return field.mul[field.inv[lead][:, None], rows]


def _cross_rows(field, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Row-wise cross product over the field."""

    def m(a, b):
        return field.mul[a, b]

    def s(a, b):
        return field.add[a, field.neg[b]]

    w = np.empty_like(U)
    w[:, 0] = s(m(U[:, 1], V[:, 2]), m(U[:, 2], V[:, 1]))
    w[:, 1] = s(m(U[:, 2], V[:, 0]), m(U[:, 0], V[:, 2]))
    w[:, 2] = s(m(U[:, 0], V[:, 1]), m(U[:, 1], V[:, 0]))
    return w


def _codes(field, rows: np.ndarray) -> np.ndarray:
    q = field.order
    return rows[:, 0] * q * q + rows[:, 1] * q + rows[:, 2]


def _vecs_from_codes(field, codes: np.ndarray) -> np.ndarray:
    q = field.order
    out = np.empty((len(codes), 3), dtype=np.int64)
    out[:, 2] = codes % q
    out[:, 1] = (codes // q) % q
    out[:, 0] = codes // (q * q)
    return out


def _as_point_vecs(field, pts) -> np.ndarray:
    rows = []
    for p in pts:
        if isinstance(p, ProjPoint):
            if p.field is not field:
                raise DomainError("point over a different field")
            rows.append(p.vec)
        else:
            rows.append(ProjPoint(field, np.asarray(p, dtype=np.int64)).vec)
    if not rows:
        return np.empty((0, 3), dtype=np.int64)
    arr = np.array(rows, dtype=np.int64)
    if arr.shape[1] != 3:
        raise DomainError("closure works with points of PG(2, q)")
    return arr


def _pair_cross(field, vecs: np.ndarray) -> np.ndarray:
    """Canonical duals/points from all pairs of distinct rows."""
    k = vecs.shape[0]
    if k < 2:
        return np.empty((0, 3), dtype=np.int64)
    i, j = np.triu_indices(k, 1)
    crosses = _cross_rows(field, vecs[i], vecs[j])
    return _canonicalize_rows(field, crosses)


def _unique_rows(field, rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows
    codes = _codes(field, rows)
    return _vecs_from_codes(field, np.unique(codes))


def has_frame(field, vecs: np.ndarray) -> bool:
    """Does the set contain 4 points, no 3 of them collinear?"""
    k = vecs.shape[0]
    if k < 4:
        return False
    for quad in combinations(range(k), 4):
        good = True
        for tri in combinations(quad, 3):
            if linalg.rank(field, vecs[list(tri)]) != 3:
                good = False
                break
        if good:
            return True
    return False


def _fixpoint(field, vecs: np.ndarray, line_fn) -> np.ndarray:
    plane = field.order**2 + field.order + 1
    cur = _unique_rows(field, vecs)
    for _ in range(plane + 1):
        lines = _unique_rows(field, line_fn(cur))
        pts = _pair_cross(field, lines)
        merged = _unique_rows(field, np.vstack([cur, pts]))
        if merged.shape[0] == cur.shape[0]:
            return cur
        cur = merged
    raise AssertionError("closure failed to converge within the plane bound")


def closure(field, pts) -> list:
    """Smallest subgeometry-closed point set containing pts.

    pts must contain a frame (4 points, no 3 collinear).  Alternates between
    drawing all lines through point pairs and adding all meets of distinct
    line pairs, until stable.  Returns canonical sorted ProjPoints.
    """
    vecs = _as_point_vecs(field, pts)
    if not has_frame(field, vecs):
        raise DomainError("closure needs 4 points in general position")
    out = _fixpoint(field, vecs, lambda cur: _pair_cross(field, cur))
    return [ProjPoint(field, v) for v in out]


def restricted_closure(field, pts, pivots) -> list:
    """Fixpoint using only lines through a pivot and a set point.

    pivots must be a subset of pts.  Result is monotone (contains pts) and
    contained in closure(pts).
    """
    vecs = _as_point_vecs(field, pts)
    pvecs = _as_point_vecs(field, pivots)
    pcodes = set(_codes(field, pvecs).tolist())
    if not pcodes <= set(_codes(field, vecs).tolist()):
        raise DomainError("pivots must be a subset of the point set")

    def lines(cur):
        if cur.shape[0] < 1 or pvecs.shape[0] < 1:
            return np.empty((0, 3), dtype=np.int64)
        i = np.repeat(np.arange(pvecs.shape[0]), cur.shape[0])
        j = np.tile(np.arange(cur.shape[0]), pvecs.shape[0])
        crosses = _cross_rows(field, pvecs[i], cur[j])
        return _canonicalize_rows(field, crosses)  # zero rows (P=Q) drop out

    out = _fixpoint(field, vecs, lines)
    return [ProjPoint(field, v) for v in out]


def line_through(field, a, b) -> np.ndarray:
    """Canonical dual triple of the line through two distinct points."""
    va = _as_point_vecs(field, [a])
    vb = _as_point_vecs(field, [b])
    w = _canonicalize_rows(field, _cross_rows(field, va, vb))
    if w.shape[0] == 0:
        raise DomainError("coincident points span no line")
    return w[0]


def meet_lines(field, la, lb) -> np.ndarray:
    """Canonical point where two distinct lines (dual triples) meet."""
    w = _canonicalize_rows(field, _cross_rows(
        field, np.asarray([la], dtype=np.int64), np.asarray([lb], dtype=np.int64)))
    if w.shape[0] == 0:
        raise DomainError("coincident lines have no single meet")
    return w[0]


def points_on_line(field, dual) -> set:
    """Codes of the q+1 points incident with the line."""
    pts = projgeom.all_point_codes(field, 2)
    vecs = _vecs_from_codes(field, pts)
    dots = np.zeros(len(pts), dtype=np.int64)
    for c in range(3):
        dots = field.add[dots, field.mul[vecs[:, c], int(dual[c])]]
    return set(int(x) for x in pts[dots == 0])


def point_codes(field, pts) -> set:
    return set(int(c) for c in _codes(field, _as_point_vecs(field, pts)))


def subplane_trial(q: int, rng) -> dict:
    """One randomized check of the pivot-restricted closure lemma.

    Draws a random frame P1, P2, Q1, Q2 of PG(2, q), q = p^h, sets
    P3 = P1P2 meet Q1Q2, and verifies that the restricted closure of the
    five points with pivots {P1, P2, P3} agrees off the line P1P2 with the
    affine part of the full closure of the frame: exactly p^2 points.
    """
    field = gf.gf_of_order(q)
    p = field.p
    codes = projgeom.all_point_codes(field, 2)
    while True:
        picks = sorted(rng.sample(range(len(codes)), 4))
        vecs = _vecs_from_codes(field, codes[picks])
        if has_frame(field, vecs):
            break
    P1, P2, Q1, Q2 = vecs
    l12 = line_through(field, P1, P2)
    lq = line_through(field, Q1, Q2)
    P3 = meet_lines(field, l12, lq)
    S = [P1, P2, P3, Q1, Q2]
    tilde = restricted_closure(field, S, [P1, P2, P3])
    full = closure(field, [P1, P2, Q1, Q2])
    on_l12 = points_on_line(field, l12)
    t_aff = {p_.code for p_ in tilde} - on_l12
    f_aff = {p_.code for p_ in full} - on_l12
    ok = t_aff == f_aff and len(t_aff) == p * p
    return {
        "q": q,
        "p": p,
        "frame": [[int(x) for x in v] for v in vecs],
        "restricted_affine_points": len(t_aff),
        "closure_affine_points": len(f_aff),
        "expected": p * p,
        "pass": ok,
    }


def verify_lemma_5_4(S: spreads.Spread, S1: Subspace, S2: Subspace, S3: Subspace,
                     R1: Subspace, R2: Subspace):
    """Check that the char-p scalar subplane on (S1,S2,R1,R2) sits inside S.

    Hypotheses (each verified, with a named error on failure): S is a valid
    spread of PG(3n-1,q); S1,S2,S3 are normal elements lying in a common
    (2n-1)-space; R1,R2 are spread elements with span(R1,R2) meeting
    span(S1,S2) exactly in S3; the four subplane anchors are in general
    position.  Returns (ok, witness): every subplane element not inside
    span(S1,S2) must be a spread element.
    """
    if S.r != 3:
        raise DomainError("hypothesis failure: spread is not in PG(3n-1, q)")
    ok, witness = spreads.validate_spread(S)
    if not ok:
        raise DomainError(f"hypothesis failure: not a spread: {witness}")
    for name, E in (("S1", S1), ("S2", S2), ("S3", S3), ("R1", R1), ("R2", R2)):
        if E not in S:
            raise DomainError(f"hypothesis failure: {name} is not a spread element")
    for name, E in (("S1", S1), ("S2", S2), ("S3", S3)):
        if not spreads.is_normal_element(S, E):
            raise DomainError(f"hypothesis failure: {name} is not normal")
    f = S.field
    n = S.n
    if linalg.rank(f, np.vstack([S1.basis, S2.basis, S3.basis])) > 2 * n:
        raise DomainError(
            "hypothesis failure: S1, S2, S3 span more than a (2n-1)-space")
    pi_S = projgeom.span(S1, S2)
    pi_R = projgeom.span(R1, R2)
    if projgeom.meet(pi_R, pi_S) != S3:
        raise DomainError(
            "hypothesis failure: span(R1,R2) does not meet span(S1,S2) in S3")
    if not projgeom.in_general_position([S1, S2, R1, R2]):
        raise DomainError(
            "hypothesis failure: S1, S2, R1, R2 are not in general position")
    V = fieldreduction.subplane_V(S1, S2, R1, R2, f.p)
    for X in V:
        if pi_S.contains(X):
            continue
        if X not in S:
            return False, {"kind": "missing_element",
                           "basis": [[int(x) for x in row] for row in X.basis]}
    return True, None
