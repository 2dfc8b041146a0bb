"""Projective geometry PG(m, q): subspaces, points, span/meet, frames.

A Subspace is stored as its canonical reduced-row-echelon basis (rows of
element codes), so equality and ordering are byte comparisons.  Points are row
vectors; the canonical representative scales the first nonzero coordinate to
1, and ``point codes`` are big-endian base-q packings of canonical vectors.
"""

import numpy as np

from . import _kernels, linalg
from .errors import DomainError


class Subspace:
    __slots__ = ("field", "m", "basis", "_keyc")

    def __init__(self, field, m: int, basis: np.ndarray):
        # internal constructor: basis must already be canonical RREF, nonzero rows
        self.field = field
        self.m = m
        b = np.ascontiguousarray(basis, dtype=np.int64)
        b.setflags(write=False)
        self.basis = b
        self._keyc = None

    @classmethod
    def from_rows(cls, field, m: int, rows) -> "Subspace":
        rows = np.asarray(rows, dtype=np.int64)
        if rows.ndim == 1:
            rows = rows[None, :]
        if rows.shape[1] != m + 1:
            raise DomainError(f"rows have length {rows.shape[1]}, ambient wants {m + 1}")
        R, r = linalg.rref(field, linalg.as_matrix(field, rows))
        return cls(field, m, R[:r])

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    @property
    def pdim(self) -> int:
        """Projective dimension (-1 for the empty subspace)."""
        return self.basis.shape[0] - 1

    @property
    def q(self) -> int:
        return self.field.order

    def n_points(self) -> int:
        q = self.q
        return (q**self.rank - 1) // (q - 1)

    def key(self) -> bytes:
        if self._keyc is None:
            self._keyc = (
                self.m.to_bytes(4, "big")
                + self.rank.to_bytes(4, "big")
                + self.basis.tobytes()
            )
        return self._keyc

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.field is other.field
            and self.key() == other.key()
        )

    def __hash__(self):
        return hash((id(self.field), self.key()))

    def contains_point(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64)
        if v.shape != (self.m + 1,):
            raise DomainError("point vector has the wrong length")
        if v.size and (v.min() < 0 or v.max() >= self.field.order):
            raise DomainError("entry out of range for field")
        st = np.vstack([self.basis, v[None, :]])
        return linalg.rank(self.field, st) == self.rank

    def contains(self, other: "Subspace") -> bool:
        if other.rank == 0:
            return True
        st = np.vstack([self.basis, other.basis])
        return linalg.rank(self.field, st) == self.rank

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "q": int(self.field.order),
            "basis": [[int(x) for x in row] for row in self.basis],
        }

    @classmethod
    def from_json(cls, field, obj) -> "Subspace":
        if int(obj["q"]) != field.order:
            raise DomainError("subspace JSON over a different field")
        return cls.from_rows(field, int(obj["m"]), obj["basis"])

    def __repr__(self):
        return f"Subspace(PG({self.m},{self.q}), pdim={self.pdim})"


class ProjPoint:
    """A projective point, stored by its canonical (first nonzero = 1) vector."""

    __slots__ = ("field", "vec", "code")

    def __init__(self, field, vec):
        v = np.array(vec, dtype=np.int64)
        if v.size and (v.min() < 0 or v.max() >= field.order):
            raise DomainError("entry out of range for field")
        nz = np.nonzero(v)[0]
        if len(nz) == 0:
            raise DomainError("zero vector is not a projective point")
        lead = v[nz[0]]
        if lead != 1:
            v = field.mul[int(field.inv[lead]), v]
        v.setflags(write=False)
        self.field = field
        self.vec = v
        self.code = int(vec_to_code(field, v))

    def __eq__(self, other):
        return (
            isinstance(other, ProjPoint)
            and self.field is other.field
            and len(self.vec) == len(other.vec)
            and self.code == other.code
        )

    def __hash__(self):
        return hash((id(self.field), len(self.vec), self.code))

    def __repr__(self):
        return f"ProjPoint({list(map(int, self.vec))})"


def vec_to_code(field, v) -> int:
    code = 0
    q = field.order
    for x in v:
        code = code * q + int(x)
    return code


def code_to_vec(field, code: int, width: int) -> np.ndarray:
    q = field.order
    out = np.empty(width, dtype=np.int64)
    for i in range(width - 1, -1, -1):
        out[i] = code % q
        code //= q
    return out


def full_space(field, m: int) -> Subspace:
    return Subspace(field, m, np.eye(m + 1, dtype=np.int64))


def empty_subspace(field, m: int) -> Subspace:
    return Subspace(field, m, np.empty((0, m + 1), dtype=np.int64))


def span(a: Subspace, b: Subspace | None = None, *more) -> Subspace:
    subs = [a] + ([b] if b is not None else []) + list(more)
    if isinstance(a, (list, tuple)):
        subs = list(a)
    f = subs[0].field
    m = subs[0].m
    for s in subs:
        if s.field is not f or s.m != m:
            raise DomainError("span over mismatched ambients")
    rows = np.vstack([s.basis for s in subs])
    return Subspace.from_rows(f, m, rows) if rows.size else empty_subspace(f, m)


def meet(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the Zassenhaus block trick."""
    if a.field is not b.field or a.m != b.m:
        raise DomainError("meet over mismatched ambients")
    f = a.field
    w = a.m + 1
    if a.rank == 0 or b.rank == 0:
        return empty_subspace(f, a.m)
    top = np.hstack([a.basis, a.basis])
    bot = np.hstack([b.basis, np.zeros_like(b.basis)])
    R, r = linalg.rref(f, np.vstack([top, bot]))
    rows = []
    for i in range(r):
        if not R[i, :w].any():
            rows.append(R[i, w:])
    if not rows:
        return empty_subspace(f, a.m)
    return Subspace.from_rows(f, a.m, np.array(rows, dtype=np.int64))


def point_codes(s: Subspace) -> np.ndarray:
    """Codes of the canonical points of s, in enumeration order."""
    if s.rank == 0:
        return np.empty(0, dtype=np.int64)
    return _kernels.subspace_point_codes(
        np.ascontiguousarray(s.basis), s.field.order, s.field.add, s.field.mul
    )


def points_of(s: Subspace):
    """Stream the points of s as ProjPoint objects (restartable generator)."""
    w = s.m + 1
    for code in point_codes(s):
        yield ProjPoint(s.field, code_to_vec(s.field, int(code), w))


def all_point_codes(field, m: int) -> np.ndarray:
    return point_codes(full_space(field, m))


def in_general_position(subs) -> bool:
    """General position for equal-rank subspaces whose rank divides the ambient.

    For s subspaces of rank n in PG(kn-1, q): when s <= k this is the
    direct-sum condition (stacked rank = s*n); when s = k+1 every k-subset
    must span.  More than k+1 subspaces are rejected.
    """
    subs = list(subs)
    if len(subs) < 2:
        raise DomainError("general position needs at least two subspaces")
    f = subs[0].field
    m = subs[0].m
    n = subs[0].rank
    for s in subs:
        if s.field is not f or s.m != m or s.rank != n:
            raise DomainError("subspaces must share ambient and rank")
    w = m + 1
    if w % n != 0:
        raise DomainError("subspace rank does not divide ambient rank")
    k = w // n
    s = len(subs)
    if s <= k:
        st = np.vstack([x.basis for x in subs])
        return linalg.rank(f, st) == s * n
    if s == k + 1:
        for drop in range(s):
            st = np.vstack([subs[i].basis for i in range(s) if i != drop])
            if linalg.rank(f, st) != k * n:
                return False
        return True
    raise DomainError(f"at most {k + 1} subspaces make sense here, got {s}")


def standard_element(field, k: int, n: int, i: int) -> Subspace:
    """The i-th coordinate element (0,..,I,..,0) of PG(kn-1,q)."""
    b = np.zeros((n, k * n), dtype=np.int64)
    b[:, i * n : (i + 1) * n] = np.eye(n, dtype=np.int64)
    return Subspace(field, k * n - 1, b)


def diagonal_element(field, k: int, n: int) -> Subspace:
    b = np.hstack([np.eye(n, dtype=np.int64)] * k)
    return Subspace.from_rows(field, k * n - 1, b)


def frame_normalization(subs) -> np.ndarray:
    """Collineation matrix T sending a frame to the standard frame.

    Input: k+1 subspaces (S_1, .., S_k, S_0) of rank n in PG(kn-1,q) in
    general position.  Right multiplication by T maps S_i to the i-th
    standard element and S_0 to the diagonal element (I, I, .., I).
    """
    subs = list(subs)
    f = subs[0].field
    n = subs[0].rank
    w = subs[0].m + 1
    k = w // n
    if len(subs) != k + 1:
        raise DomainError(f"need k+1 = {k + 1} subspaces, got {len(subs)}")
    if not in_general_position(subs):
        raise DomainError("frame is not in general position")
    base = subs[:k]
    s0 = subs[k]
    B = np.vstack([s.basis for s in base])
    T1 = linalg.inverse(f, B)
    D = linalg.mat_mul(f, np.ascontiguousarray(s0.basis), T1)
    corr = np.zeros((w, w), dtype=np.int64)
    for i in range(k):
        Di = np.ascontiguousarray(D[:, i * n : (i + 1) * n])
        corr[i * n : (i + 1) * n, i * n : (i + 1) * n] = linalg.inverse(f, Di)
    T = linalg.mat_mul(f, T1, corr)
    # cheap postcondition: the frame actually lands on the standard one
    for i in range(k):
        if apply_collineation(T, base[i]) != standard_element(f, k, n, i):
            raise AssertionError("frame normalization postcondition failed")
    if apply_collineation(T, s0) != diagonal_element(f, k, n):
        raise AssertionError("frame normalization postcondition failed")
    return T


def apply_collineation(T: np.ndarray, s: Subspace) -> Subspace:
    f = s.field
    if T.shape != (s.m + 1, s.m + 1):
        raise DomainError("collineation matrix has wrong shape")
    nb = linalg.mat_mul(f, np.ascontiguousarray(s.basis), T)
    out = Subspace.from_rows(f, s.m, nb)
    if out.rank != s.rank:
        raise DomainError("collineation matrix is singular")
    return out


def apply_collineation_point(T: np.ndarray, p: ProjPoint) -> ProjPoint:
    v = linalg.vec_mat(p.field, p.vec, T)
    return ProjPoint(p.field, v)
