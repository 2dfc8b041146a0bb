"""Spreads of PG(rn-1, q): validation, normal elements, and constructions.

A spread is a set of (q^{rn}-1)/(q^n-1) pairwise disjoint rank-n subspaces
covering every point.  An element E is normal when, for every other element
F, the (2n-1)-space spanned by E and F is partitioned by spread elements.
"""

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations

import numpy as np

from . import _kernels, backend, gf, linalg, projgeom, spreadsets
from .errors import DomainError
from .projgeom import Subspace
from .spreadsets import SpreadSet


class Spread:
    __slots__ = ("field", "r", "n", "elements", "bases", "provenance",
                 "_pt2elem", "_key2idx", "_normal_flags", "_normal_witness")

    def __init__(self, field, r: int, n: int, elements, provenance: str | None = None):
        linalg._require_tables(field)
        w = r * n
        elems = sorted(elements, key=Subspace.key)
        for e in elems:
            if e.field is not field or e.m != w - 1:
                raise DomainError("element not a subspace of the right space")
            if e.rank != n:
                raise DomainError(f"spread elements must have rank {n}")
        self.field = field
        self.r = r
        self.n = n
        self.elements = elems
        b = np.stack([e.basis for e in elems]) if elems else np.empty(
            (0, n, w), dtype=np.int64)
        b = np.ascontiguousarray(b)
        b.setflags(write=False)
        self.bases = b
        self.provenance = provenance
        self._pt2elem = None
        self._key2idx = {e.key(): i for i, e in enumerate(elems)}
        self._normal_flags = None
        self._normal_witness = None

    @property
    def q(self) -> int:
        return self.field.order

    @property
    def ambient(self) -> int:
        return self.r * self.n - 1

    def expected_size(self) -> int:
        q, n, r = self.q, self.n, self.r
        return (q ** (r * n) - 1) // (q**n - 1)

    def element_points(self) -> int:
        q = self.q
        return (q**self.n - 1) // (q - 1)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def index_of(self, E: Subspace) -> int:
        i = self._key2idx.get(E.key())
        if i is None:
            raise DomainError("subspace is not an element of this spread")
        return i

    def __contains__(self, E) -> bool:
        return isinstance(E, Subspace) and E.key() in self._key2idx

    def __eq__(self, other):
        return (
            isinstance(other, Spread)
            and self.field is other.field
            and (self.r, self.n) == (other.r, other.n)
            and len(self) == len(other)
            and all(a.key() == b.key() for a, b in zip(self.elements, other.elements))
        )

    def __hash__(self):
        return hash((id(self.field), self.r, self.n,
                     tuple(e.key() for e in self.elements)))

    def pt2elem(self) -> np.ndarray:
        """Point code -> element index map (requires a valid spread)."""
        if self._pt2elem is None:
            ok, witness = validate_spread(self)
            if not ok:
                raise DomainError(f"not a spread: {witness}")
        return self._pt2elem

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "n": self.n,
            "q": int(self.q),
            "modulus": list(self.field.modulus),
            "provenance": self.provenance,
            "elements": [[[int(x) for x in row] for row in e.basis]
                         for e in self.elements],
        }

    @classmethod
    def from_json(cls, obj) -> "Spread":
        field = gf.gf_of_order(int(obj["q"]))
        if list(field.modulus) != [int(c) for c in obj["modulus"]]:
            raise DomainError("spread file uses a different field modulus")
        r, n = int(obj["r"]), int(obj["n"])
        elems = [Subspace.from_rows(field, r * n - 1, np.asarray(b, dtype=np.int64))
                 for b in obj["elements"]]
        return cls(field, r, n, elems, provenance=obj.get("provenance"))

    def content_hash(self) -> str:
        obj = self.to_json()
        del obj["provenance"]  # metadata, not content
        payload = json.dumps(obj, sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()

    def __repr__(self):
        return (f"Spread(PG({self.ambient},{self.q}), n={self.n}, "
                f"size={len(self)}, provenance={self.provenance!r})")


def validate_spread(S: Spread):
    """(ok, witness): count, pairwise disjointness, and point coverage."""
    f = S.field
    q = f.order
    w = S.r * S.n
    if len(S) != S.expected_size():
        return False, {"kind": "count", "expected": S.expected_size(), "got": len(S)}
    cover = np.full(q**w, -1, dtype=np.int64)
    status, i, j = _kernels.cover_scan(S.bases, q, f.add, f.mul, cover)
    if status == 1:
        return False, {"kind": "overlap", "i": int(i), "j": int(j)}
    for code in projgeom.all_point_codes(f, w - 1):
        if cover[code] < 0:
            return False, {"kind": "uncovered", "point_code": int(code)}
    cover.setflags(write=False)
    S._pt2elem = cover
    return True, None


def is_normal_element(S: Spread, E: Subspace) -> bool:
    """Is span(E, F) partitioned by spread elements for every other F?"""
    ei = S.index_of(E)
    f = S.field
    p2e = S.pt2elem()
    counts = np.zeros(len(S), dtype=np.int64)
    for fi in range(len(S)):
        if fi == ei:
            continue
        if not _kernels.normal_pair_ok(S.bases[ei], S.bases[fi], f.order,
                                       f.add, f.mul, f.neg, f.inv,
                                       p2e, S.element_points(), counts):
            return False
    return True


def _normal_scan(S: Spread):
    if S._normal_flags is not None:
        return S._normal_flags, S._normal_witness
    f = S.field
    p2e = S.pt2elem()
    N = len(S)
    flags = np.zeros(N, dtype=np.int64)
    witness = np.full(N, -1, dtype=np.int64)
    k = max(1, min(backend.THREADS, N))
    bounds = np.linspace(0, N, k + 1, dtype=np.int64)
    args = f.order, f.add, f.mul, f.neg, f.inv, p2e, S.element_points()

    def run(lo, hi):
        _kernels.normal_scan_range(S.bases, lo, hi, *args, flags, witness)

    if k == 1:
        run(0, N)
    else:
        with ThreadPoolExecutor(max_workers=k) as pool:
            futs = [pool.submit(run, int(bounds[i]), int(bounds[i + 1]))
                    for i in range(k)]
            for fut in futs:
                fut.result()
    flags.setflags(write=False)
    witness.setflags(write=False)
    S._normal_flags = flags
    S._normal_witness = witness
    return flags, witness


def normal_elements(S: Spread) -> list:
    """The normal elements of S, in canonical order."""
    flags, _ = _normal_scan(S)
    return [S.elements[i] for i in np.flatnonzero(flags)]


def normal_indices(S: Spread) -> list:
    flags, _ = _normal_scan(S)
    return [int(i) for i in np.flatnonzero(flags)]


# -- constructions -------------------------------------------------------


def _tuple_element(field, blocks) -> Subspace:
    basis = np.hstack(blocks)
    return Subspace.from_rows(field, basis.shape[1] - 1, basis)


def _canonical_tuples(M: SpreadSet, r: int):
    """All (A_1..A_r) over M with the first nonzero entry equal to I."""
    f, n = M.field, M.n
    I = linalg.identity(f, n)
    Z = linalg.zeros(f, n)
    out = []
    for lead in range(r):
        prefix = (Z,) * lead + (I,)
        tail = r - lead - 1
        if tail == 0:
            out.append(prefix)
        else:
            stack = [prefix]
            for _ in range(tail):
                stack = [t + (m,) for t in stack for m in M.mats]
            out.extend(stack)
    return out


def _require_valid(M: SpreadSet, need_identity: bool, what: str):
    ok, witness = spreadsets.validate_spread_set(M)
    if not ok:
        raise DomainError(f"{what} is not a valid spread set: {witness}")
    if not M.contains_zero:
        raise DomainError(f"{what} must contain the zero matrix")
    if need_identity and not M.contains_identity:
        raise DomainError(f"{what} must contain the identity matrix")


def construct_S_r(M: SpreadSet, r: int) -> Spread:
    """S_r(M): tuples (A_1..A_r) over M whose first nonzero entry is I."""
    if r < 2:
        raise DomainError("need r >= 2")
    _require_valid(M, True, "M")
    f = M.field
    elems = [_tuple_element(f, t) for t in _canonical_tuples(M, r)]
    prov = f"S_{r}({M.provenance or 'M'})"
    return Spread(f, r, M.n, elems, provenance=prov)


def construct_T_3(M: SpreadSet, M0: SpreadSet) -> Spread:
    """T_3(M, M0) = {(A,B,I)} over M^2, {(I,C,0)} over M0, and {(0,I,0)}."""
    _require_valid(M, True, "M")
    _require_valid(M0, True, "M0")
    if M.field is not M0.field or M.n != M0.n:
        raise DomainError("M and M0 must share field and matrix size")
    f, n = M.field, M.n
    I = linalg.identity(f, n)
    Z = linalg.zeros(f, n)
    elems = [_tuple_element(f, (A, B, I)) for A in M.mats for B in M.mats]
    elems += [_tuple_element(f, (I, C, Z)) for C in M0.mats]
    elems.append(_tuple_element(f, (Z, I, Z)))
    prov = f"T_3({M.provenance or 'M'},{M0.provenance or 'M0'})"
    return Spread(f, 3, n, elems, provenance=prov)


def t3_designated_normals(field, n: int) -> list:
    """(I,0,0), (I,I,0), (0,I,0) as subspaces of PG(3n-1,q)."""
    I = linalg.identity(field, n)
    Z = linalg.zeros(field, n)
    return [_tuple_element(field, blocks)
            for blocks in ((I, Z, Z), (I, I, Z), (Z, I, Z))]


def construct_U_r(M: SpreadSet, others) -> Spread:
    """U_r(M, M_1..M_{r-1}): an S_{r-1}(M) copy in a hyperplane plus tuples
    (I, B_1..B_{r-1}) with B_i from M_i.  M must be a nearfield set."""
    others = list(others)
    r = len(others) + 1
    if r < 3:
        raise DomainError("need at least two companion sets (r >= 3)")
    _require_valid(M, True, "M")
    if not spreadsets.is_nearfield_set(M):
        raise DomainError("M must be closed under multiplication")
    for i, Mi in enumerate(others, start=1):
        _require_valid(Mi, False, f"M_{i}")
        if Mi.field is not M.field or Mi.n != M.n:
            raise DomainError("companion sets must share field and matrix size")
    f, n = M.field, M.n
    I = linalg.identity(f, n)
    Z = linalg.zeros(f, n)
    elems = [_tuple_element(f, (Z,) + t) for t in _canonical_tuples(M, r - 1)]
    combos = [()]
    for Mi in others:
        combos = [t + (B,) for t in combos for B in Mi.mats]
    elems += [_tuple_element(f, (I,) + t) for t in combos]
    names = ",".join(Mi.provenance or f"M_{i}" for i, Mi in enumerate(others, 1))
    prov = f"U_{r}({M.provenance or 'M'},{names})"
    return Spread(f, r, n, elems, provenance=prov)


def u_r_designated_normals(field, r: int, n: int) -> list:
    """S_1..S_{r-1}: the elements (0,..,I,..,0) with I in slot j >= 1."""
    return [projgeom.standard_element(field, r, n, j) for j in range(1, r)]


# -- global structure tests ----------------------------------------------


def regulus_closure_at(S: Spread, E: Subspace, q0: int) -> bool:
    """Is R_{q0}(E, E1, E2) inside S for every pair E1, E2 in S?"""
    from . import fieldreduction

    if S.r != 2:
        raise DomainError("regulus closure lives in PG(2n-1, q)")
    if q0 <= 2:
        raise DomainError("need q0 > 2")
    S.index_of(E)
    for E1, E2 in combinations(S.elements, 2):
        if E1 == E or E2 == E:
            continue
        for X in fieldreduction.regulus(E, E1, E2, q0):
            if X not in S:
                return False
    return True


def is_desarguesian(S: Spread):
    """All-elements-normal test (r > 2) or full regulus closure (r = 2, q > 2).

    Returns True/False, or None for r = 2, q = 2 where the regulus test
    cannot decide.
    """
    from . import fieldreduction

    ok, witness = validate_spread(S)
    if not ok:
        raise DomainError(f"not a spread: {witness}")
    if S.r > 2:
        flags, _ = _normal_scan(S)
        return bool(flags.all())
    if S.q == 2:
        return None
    for E1, E2, E3 in combinations(S.elements, 3):
        for X in fieldreduction.regulus(E1, E2, E3, S.q):
            if X not in S:
                return False
    return True


def max_normal_general_position(S: Spread):
    """Largest k <= r+1 with k normal elements in general position.

    Returns (k, witness) where witness lists element indices of one such
    subset (empty when fewer than two normal elements exist).
    """
    f = S.field
    n, r = S.n, S.r
    idxs = normal_indices(S)
    if len(idxs) < 2:
        return len(idxs), list(idxs[:1]) if idxs else []
    best = 1
    best_sub = [idxs[0]]

    def stacked_rank(sub) -> int:
        return linalg.rank(f, np.vstack([S.bases[i] for i in sub]))

    def gp(sub) -> bool:
        if len(sub) <= r:
            return stacked_rank(sub) == len(sub) * n
        return all(stacked_rank(list(c)) == r * n
                   for c in combinations(sub, r))

    def dfs(sub, start):
        nonlocal best, best_sub
        if len(sub) > best:
            best = len(sub)
            best_sub = list(sub)
        if best == r + 1 or len(sub) == r + 1:
            return
        for t in range(start, len(idxs)):
            cand = sub + [idxs[t]]
            if gp(cand):
                dfs(cand, t + 1)
                if best == r + 1:
                    return

    for s in range(len(idxs)):
        dfs([idxs[s]], s + 1)
        if best == r + 1:
            break
    return best, best_sub


def elements_in_subspace(S: Spread, pi: Subspace) -> list:
    """Spread elements entirely contained in pi, canonical order."""
    return [e for e in S.elements if pi.contains(e)]


def spread_report(S: Spread) -> dict:
    """The JSON-facing summary: validity, normal structure, classification."""
    ok, witness = validate_spread(S)
    rep = {
        "r": S.r,
        "n": S.n,
        "q": int(S.q),
        "size": len(S),
        "provenance": S.provenance,
        "valid": ok,
    }
    if not ok:
        rep["witness"] = witness
        return rep
    nidx = normal_indices(S)
    k, sub = max_normal_general_position(S)
    desarg = is_desarguesian(S)
    rep.update({
        "normal_count": len(nidx),
        "normal_indices": nidx,
        "max_general_position": k,
        "max_general_position_witness": sub,
        "desarguesian": "unknown" if desarg is None else bool(desarg),
    })
    return rep
