"""Matrix spread sets, quasifields, nearfield/semifield tests, and searches.

A spread set is a family of q^n distinct n x n matrices over F_q whose
pairwise differences are all non-singular.  Quasifields live on the vector
codes of F_q^n (little-endian base-q packing) with vector addition and an
explicit q^n x q^n multiplication table.
"""

from functools import lru_cache

import numpy as np

from . import _kernels, gf, linalg
from .errors import BudgetExceededError, DomainError

EXCEPTIONAL_NEARFIELD_PARAMS = ((5, 2), (7, 2), (11, 2), (11, 2), (23, 2), (29, 2), (59, 2))

_SEARCH_BUDGET = 5_000_000


# -- matrix codes -------------------------------------------------------


def mat_code(q: int, mat) -> int:
    """Little-endian base-q packing of the row-major entries."""
    code = 0
    w = 1
    for x in np.asarray(mat, dtype=np.int64).ravel():
        code += int(x) * w
        w *= q
    return code


def mat_from_code(q: int, n: int, code: int) -> np.ndarray:
    out = np.empty(n * n, dtype=np.int64)
    for i in range(n * n):
        out[i] = code % q
        code //= q
    return out.reshape(n, n)


@lru_cache(maxsize=None)
def vector_tables(field, n: int):
    """(vadd, vsub, vneg, digits, weights) for vector codes of F_q^n."""
    linalg._require_tables(field)
    q = field.order
    N = q**n
    if N > 1 << 14:
        raise BudgetExceededError(f"vector tables for q^n = {N} are too large")
    weights = q ** np.arange(n, dtype=np.int64)
    dig = np.empty((N, n), dtype=np.int64)
    t = np.arange(N, dtype=np.int64)
    for i in range(n):
        dig[:, i] = t % q
        t //= q
    vneg = field.neg[dig] @ weights
    vadd = field.add[dig[:, None, :], dig[None, :, :]] @ weights
    vsub = vadd[:, vneg]
    for a in (vadd, vsub, vneg, dig, weights):
        a.setflags(write=False)
    return vadd, vsub, vneg, dig, weights


# -- spread sets --------------------------------------------------------


class SpreadSet:
    """An ordered (canonically sorted) family of n x n matrices over F_q."""

    __slots__ = ("field", "n", "mats", "code_list", "code_set",
                 "contains_zero", "contains_identity", "provenance")

    def __init__(self, field, n: int, mats, provenance: str | None = None):
        linalg._require_tables(field)
        self.field = field
        self.n = n
        arr = np.asarray(mats, dtype=np.int64)
        if arr.ndim != 3 or arr.shape[1:] != (n, n):
            raise DomainError(f"expected a stack of {n}x{n} matrices")
        if arr.size and (arr.min() < 0 or arr.max() >= field.order):
            raise DomainError("matrix entries out of field range")
        q = field.order
        codes = [mat_code(q, m) for m in arr]
        order = sorted(range(len(codes)), key=codes.__getitem__)
        arr = np.ascontiguousarray(arr[order])
        arr.setflags(write=False)
        self.mats = arr
        self.code_list = tuple(codes[i] for i in order)
        self.code_set = frozenset(self.code_list)
        self.contains_zero = 0 in self.code_set
        self.contains_identity = mat_code(q, np.eye(n, dtype=np.int64)) in self.code_set
        self.provenance = provenance

    @property
    def q(self) -> int:
        return self.field.order

    def __len__(self) -> int:
        return self.mats.shape[0]

    def __iter__(self):
        return iter(self.mats)

    def __eq__(self, other):
        return (
            isinstance(other, SpreadSet)
            and self.field is other.field
            and self.n == other.n
            and self.code_list == other.code_list
        )

    def __hash__(self):
        return hash((id(self.field), self.n, self.code_list))

    def __contains__(self, mat) -> bool:
        return mat_code(self.q, mat) in self.code_set

    def to_json(self) -> dict:
        return {
            "q": int(self.q),
            "n": int(self.n),
            "contains_zero": self.contains_zero,
            "contains_identity": self.contains_identity,
            "provenance": self.provenance,
            "matrices": [[[int(x) for x in row] for row in m] for m in self.mats],
        }

    @classmethod
    def from_json(cls, obj) -> "SpreadSet":
        field = gf.gf_of_order(int(obj["q"]))
        return cls(field, int(obj["n"]), np.asarray(obj["matrices"], dtype=np.int64),
                   provenance=obj.get("provenance"))

    def __repr__(self):
        return f"SpreadSet(q={self.q}, n={self.n}, size={len(self)})"


def validate_spread_set(M: SpreadSet):
    """(ok, witness): q^n distinct matrices, pairwise differences invertible."""
    f = M.field
    N = f.order**M.n
    if len(M) != N:
        return False, {"kind": "count", "expected": N, "got": len(M)}
    for i in range(len(M) - 1):
        if M.code_list[i] == M.code_list[i + 1]:
            return False, {"kind": "duplicate", "i": i, "j": i + 1}
    ok, i, j = _kernels.pairwise_diff_invertible(M.mats, f.add, f.mul, f.neg, f.inv)
    if not ok:
        return False, {
            "kind": "singular_difference",
            "i": int(i),
            "j": int(j),
            "a": [[int(x) for x in r] for r in M.mats[i]],
            "b": [[int(x) for x in r] for r in M.mats[j]],
        }
    return True, None


def field_spread_set(q: int, n: int) -> SpreadSet:
    """The multiplication matrices of GF(q^n) over GF(q) (Desarguesian set)."""
    tw = gf.tower_of(q, n)
    mats = np.stack([tw.mult_matrix(a) for a in range(tw.F.order)])
    return SpreadSet(tw.Kq, n, mats, provenance=f"field({q},{n})")


# -- quasifields --------------------------------------------------------


class Quasifield:
    """Multiplication table on the vector codes of F_q^n with vector addition."""

    __slots__ = ("field", "n", "order", "add", "sub", "neg", "mult", "unit",
                 "provenance")

    def __init__(self, field, n: int, mult, provenance: str | None = None,
                 validate: bool = True):
        linalg._require_tables(field)
        self.field = field
        self.n = n
        N = field.order**n
        self.order = N
        mult = np.ascontiguousarray(np.asarray(mult, dtype=np.int64))
        if mult.shape != (N, N):
            raise DomainError(f"multiplication table must be {N}x{N}")
        if mult.min() < 0 or mult.max() >= N:
            raise DomainError("multiplication table entries out of range")
        mult.setflags(write=False)
        self.mult = mult
        vadd, vsub, vneg, _, _ = vector_tables(field, n)
        self.add = vadd
        self.sub = vsub
        self.neg = vneg
        idx = np.arange(N)
        units = [u for u in range(N)
                 if np.array_equal(mult[u], idx) and np.array_equal(mult[:, u], idx)]
        self.unit = units[0] if units else None
        self.provenance = provenance
        if validate:
            rep = check_quasifield_axioms(self)
            if not rep["pass"]:
                bad = [k for k, v in rep["axioms"].items() if not v["pass"]]
                raise DomainError(f"quasifield axioms fail: {', '.join(bad)}")

    @property
    def q(self) -> int:
        return self.field.order

    def mul(self, x: int, y: int) -> int:
        return int(self.mult[x, y])

    def add_(self, x: int, y: int) -> int:
        return int(self.add[x, y])

    def vec(self, x: int) -> np.ndarray:
        _, _, _, dig, _ = vector_tables(self.field, self.n)
        return dig[x].copy()

    def from_vec(self, v) -> int:
        _, _, _, _, weights = vector_tables(self.field, self.n)
        return int(np.asarray(v, dtype=np.int64) @ weights)

    def to_json(self) -> dict:
        return {
            "q": int(self.q),
            "n": int(self.n),
            "order": int(self.order),
            "unit": None if self.unit is None else int(self.unit),
            "provenance": self.provenance,
            "mult": [[int(x) for x in row] for row in self.mult],
        }

    @classmethod
    def from_json(cls, obj, validate: bool = True) -> "Quasifield":
        field = gf.gf_of_order(int(obj["q"]))
        return cls(field, int(obj["n"]), np.asarray(obj["mult"], dtype=np.int64),
                   provenance=obj.get("provenance"), validate=validate)

    def __repr__(self):
        return f"Quasifield(order={self.order}, unit={self.unit})"


def _first_false(mask: np.ndarray):
    """Index tuple of the first False entry, or None if all True."""
    flat = np.flatnonzero(~mask)
    if flat.size == 0:
        return None
    return tuple(int(v) for v in np.unravel_index(flat[0], mask.shape))


def check_quasifield_axioms(Q: Quasifield) -> dict:
    """Exhaustive verification of the four quasifield axioms, plus extras.

    The report carries one entry per axiom with a first-failure witness:
      (i)   (Q,+) is a group with identity 0,
      (ii)  (Q\\{0},*) is a loop with identity,
      (iii) right distributivity,
      (iv)  x*a = x*b + c has a unique solution for a != b.
    Extras (not part of the pass verdict): additive commutativity, zero
    absorption, associativity, left distributivity, commutativity.
    """
    A, M = Q.add, Q.mult
    N = Q.order
    idx = np.arange(N)
    axioms = {}

    w = None
    if not np.array_equal(A[0], idx) or not np.array_equal(A[:, 0], idx):
        w = {"kind": "identity"}
    if w is None:
        inv_ok = np.array_equal(np.sort(A, axis=1), np.broadcast_to(idx, (N, N)))
        if not inv_ok:
            w = {"kind": "inverses"}
    if w is None:
        for x in range(N):
            bad = _first_false(A[A[x]] == A[x, A])
            if bad is not None:
                w = {"kind": "associativity", "x": x, "y": bad[0], "z": bad[1]}
                break
    axioms["i_additive_group"] = {"pass": w is None, "witness": w}

    w = None
    if Q.unit is None:
        w = {"kind": "no_identity"}
    else:
        rows_ok = _first_false(
            np.all(np.sort(M[1:], axis=1) == idx, axis=1)
        )
        cols_ok = _first_false(
            np.all(np.sort(M[:, 1:], axis=0) == idx[:, None], axis=0)
        )
        if rows_ok is not None:
            w = {"kind": "left_translation_not_bijective", "a": rows_ok[0] + 1}
        elif cols_ok is not None:
            w = {"kind": "right_translation_not_bijective", "a": cols_ok[0] + 1}
    axioms["ii_multiplicative_loop"] = {"pass": w is None, "witness": w}

    w = None
    for c in range(N):
        col = M[:, c]
        bad = _first_false(col[A] == A[col[:, None], col[None, :]])
        if bad is not None:
            w = {"kind": "right_distributivity", "a": bad[0], "b": bad[1], "c": c}
            break
    axioms["iii_right_distributive"] = {"pass": w is None, "witness": w}

    w = None
    S = Q.sub
    for a in range(N):
        # T[x, b] = x*a - x*b must be a bijection in x for every b != a
        T = S[M[:, a][:, None], M]
        ok = np.all(np.sort(T, axis=0) == idx[:, None], axis=0)
        ok[a] = True
        bad = _first_false(ok)
        if bad is not None:
            w = {"kind": "difference_not_bijective", "a": a, "b": bad[0]}
            break
    axioms["iv_unique_solution"] = {"pass": w is None, "witness": w}

    extras = {}
    bad = _first_false(A == A.T)
    extras["additive_commutative"] = {"pass": bad is None, "witness": bad}
    zero_ok = np.array_equal(M[0], np.zeros(N, dtype=np.int64)) and np.array_equal(
        M[:, 0], np.zeros(N, dtype=np.int64))
    extras["zero_absorbing"] = {"pass": zero_ok, "witness": None}
    w = None
    for x in range(N):
        bad = _first_false(M[M[x]] == M[x, M])
        if bad is not None:
            w = {"x": x, "y": bad[0], "z": bad[1]}
            break
    extras["multiplicative_associative"] = {"pass": w is None, "witness": w}
    w = None
    for a in range(N):
        row = M[a]
        bad = _first_false(row[A] == A[row[:, None], row[None, :]])
        if bad is not None:
            w = {"a": a, "b": bad[0], "c": bad[1]}
            break
    extras["left_distributive"] = {"pass": w is None, "witness": w}
    bad = _first_false(M == M.T)
    extras["multiplicative_commutative"] = {"pass": bad is None, "witness": bad}

    ok = all(v["pass"] for v in axioms.values())
    return {"order": N, "q": Q.q, "n": Q.n, "pass": ok,
            "axioms": axioms, "extras": extras}


def quasifield_from_spread_set(M: SpreadSet, e=None) -> Quasifield:
    """The quasifield with x*y = x . M_y, where M_y is labeled by e . M_y = y."""
    ok, witness = validate_spread_set(M)
    if not ok:
        raise DomainError(f"invalid spread set: {witness}")
    if not M.contains_zero:
        raise DomainError("spread set must contain the zero matrix")
    f = M.field
    q, n = f.order, M.n
    N = q**n
    _, _, _, dig, weights = vector_tables(f, n)
    if e is None:
        e = np.zeros(n, dtype=np.int64)
        e[0] = 1
    e = np.asarray(e, dtype=np.int64)
    if e.shape != (n,) or not e.any():
        raise DomainError("e must be a nonzero vector of length n")

    # label every matrix by the vector code of e . M_y
    labels = np.empty(N, dtype=np.int64)
    cols = np.empty((N, N), dtype=np.int64)
    for i in range(N):
        my = M.mats[i]
        labels[i] = linalg.vec_mat(f, e, my) @ weights
        prods = np.zeros((N, n), dtype=np.int64)
        for k in range(n):
            prods = f.add[prods, f.mul[dig[:, k][:, None], my[k][None, :]]]
        cols[:, i] = prods @ weights
    if len(set(labels.tolist())) != N:
        raise AssertionError("e does not label the spread set bijectively")
    mult = np.empty((N, N), dtype=np.int64)
    mult[:, labels] = cols
    prov = f"quasifield({M.provenance})" if M.provenance else None
    try:
        return Quasifield(f, n, mult, provenance=prov)
    except DomainError as exc:  # impossible for a valid spread set
        raise AssertionError(f"spread set produced a non-quasifield: {exc}") from exc


def spread_set_from_quasifield(Q: Quasifield) -> SpreadSet:
    """Recover {M_y} from x*y = x . M_y; requires * to be F_q-linear in x."""
    f = Q.field
    n, N = Q.n, Q.order
    _, _, _, dig, weights = vector_tables(f, n)
    basis_codes = [int(weights[i]) for i in range(n)]
    mats = np.empty((N, n, n), dtype=np.int64)
    for y in range(N):
        for i, b in enumerate(basis_codes):
            mats[y, i] = dig[Q.mult[b, y]]
        # the matrix must reproduce * against every x, not just the basis
        prods = np.zeros((N, n), dtype=np.int64)
        for k in range(n):
            prods = f.add[prods, f.mul[dig[:, k][:, None], mats[y][k][None, :]]]
        if not np.array_equal(prods @ weights, Q.mult[:, y]):
            raise DomainError(
                "multiplication is not F_q-linear in x (F_q not in the kernel)")
    prov = None
    if Q.provenance and Q.provenance.startswith("quasifield(") and Q.provenance.endswith(")"):
        prov = Q.provenance[len("quasifield("):-1]
    elif Q.provenance:
        prov = f"spread_set({Q.provenance})"
    return SpreadSet(f, n, mats, provenance=prov)


def kernel_of(Q: Quasifield) -> list:
    """Codes k with k*(x*y) = (k*x)*y and k*(x+y) = k*x + k*y for all x, y."""
    A, M = Q.add, Q.mult
    out = []
    for k in range(Q.order):
        row = M[k]
        if np.array_equal(row[M], M[row]) and np.array_equal(
                row[A], A[row[:, None], row[None, :]]):
            out.append(k)
    return out


# -- closure predicates and nuclei --------------------------------------


def _require_01(M: SpreadSet):
    ok, witness = validate_spread_set(M)
    if not ok:
        raise DomainError(f"invalid spread set: {witness}")
    if not (M.contains_zero and M.contains_identity):
        raise DomainError("spread set must contain 0 and I")


def is_nearfield_set(M: SpreadSet) -> bool:
    """Closure of M under matrix multiplication."""
    _require_01(M)
    f, q = M.field, M.q
    for a in M.mats:
        for b in M.mats:
            if mat_code(q, linalg.mat_mul(f, a, b)) not in M.code_set:
                return False
    return True


def is_semifield_set(M: SpreadSet) -> bool:
    """Closure of M under matrix addition."""
    _require_01(M)
    f, q = M.field, M.q
    sums = f.add[M.mats[:, None], M.mats[None, :]]
    n2 = M.n * M.n
    weights = q ** np.arange(n2, dtype=np.int64)
    codes = sums.reshape(len(M), len(M), n2) @ weights
    return bool(np.isin(codes, np.asarray(M.code_list)).all())


def right_nucleus(M: SpreadSet) -> np.ndarray:
    """{X in M : MX = M or X = 0}, as a stack of matrices in canonical order."""
    _require_01(M)
    return _nucleus_scan(M, left=False)


def middle_nucleus(M: SpreadSet) -> np.ndarray:
    """{X in M : XM = M or X = 0}, as a stack of matrices in canonical order."""
    _require_01(M)
    return _nucleus_scan(M, left=True)


def _nucleus_scan(M: SpreadSet, left: bool) -> np.ndarray:
    f, q = M.field, M.q
    full = M.code_set
    out = []
    for x in M.mats:
        if not x.any():
            out.append(x)
            continue
        prods = set()
        for a in M.mats:
            prod = linalg.mat_mul(f, x, a) if left else linalg.mat_mul(f, a, x)
            prods.add(mat_code(q, prod))
        if prods == full:
            out.append(x)
    return np.stack(out) if out else np.empty((0, M.n, M.n), dtype=np.int64)


def center(M: SpreadSet) -> np.ndarray:
    """Elements of both nuclei commuting with all of M, canonical order."""
    _require_01(M)
    f, q = M.field, M.q
    both = {mat_code(q, x) for x in right_nucleus(M)}
    both &= {mat_code(q, x) for x in middle_nucleus(M)}
    out = []
    for x in M.mats:
        if mat_code(q, x) not in both:
            continue
        if all(np.array_equal(linalg.mat_mul(f, y, x), linalg.mat_mul(f, x, y))
               for y in M.mats):
            out.append(x)
    return np.stack(out) if out else np.empty((0, M.n, M.n), dtype=np.int64)


# -- Dickson nearfields --------------------------------------------------


def is_dickson_pair(q: int, n: int) -> bool:
    """q a prime power, every prime divisor of n divides q-1, and
    n % 4 != 0 whenever q % 4 == 3."""
    gf.factor_prime_power(q)
    if n < 1:
        raise DomainError("n must be a positive integer")
    for pr in gf.prime_factors(n):
        if (q - 1) % pr != 0:
            return False
    if q % 4 == 3 and n % 4 == 0:
        return False
    return True


def _dickson_labeling(q: int, n: int) -> np.ndarray:
    """jtab[m] = the j with (q^j - 1)/(q - 1) = m (mod n), per dlog residue."""
    vals = [((q**j - 1) // (q - 1)) % n for j in range(n)]
    if sorted(vals) != list(range(n)):
        raise DomainError("power-sum residues do not cover Z_n")
    j_of = {v: j for j, v in enumerate(vals)}
    s1 = q**n - 1
    return np.array([j_of[m % n] for m in range(s1)], dtype=np.int64)


def dickson_nearfield(q: int, n: int, _labeling=None) -> Quasifield:
    """Nearfield of order q^n via twisted field multiplication x^(q^j) . y.

    For nonzero y the twist exponent j is read off the discrete log of y.
    The result is validated exhaustively (axioms and associativity); if the
    labeling fails validation, a multiplicatively closed non-field set from
    the exhaustive search is used instead.
    """
    if not is_dickson_pair(q, n):
        raise DomainError(f"({q},{n}) is not a Dickson pair")
    tw = gf.tower_of(q, n)
    F = tw.F
    s = F.order
    s1 = s - 1
    try:
        jtab = _dickson_labeling(q, n) if _labeling is None else np.asarray(_labeling)
        dick = np.zeros((s, s), dtype=np.int64)
        xs = np.arange(1, s, dtype=np.int64)
        dx = F.dlog[xs]
        for y in range(1, s):
            j = int(jtab[int(F.dlog[y])])
            ej = pow(q, j, s1)
            xp = F.exp[(dx * ej) % s1]
            dick[1:, y] = F.mul[xp, y]
        perm = np.array([tw.vec_code(a) for a in range(s)], dtype=np.int64)
        mult = np.empty((s, s), dtype=np.int64)
        mult[np.ix_(perm, perm)] = perm[dick]
        Q = Quasifield(tw.Kq, n, mult, provenance=f"dickson({q},{n})")
        rep = check_quasifield_axioms(Q)
        if not rep["extras"]["multiplicative_associative"]["pass"]:
            raise DomainError("labeling gave a non-associative multiplication")
        return Q
    except DomainError:
        if s > 81:
            raise
        for cand in search_closed_spread_sets(n, q, "multiplication"):
            Qc = quasifield_from_spread_set(cand)
            rep = check_quasifield_axioms(Qc)
            if not rep["extras"]["left_distributive"]["pass"]:
                Qc.provenance = f"dickson({q},{n})"
                return Qc
        raise


# -- exhaustive searches --------------------------------------------------

_CODE_TABLE_CAP = 700  # pool-indexed pair tables stay under ~8MB


def _spend(budget: list, amount: int):
    budget[0] -= amount
    if budget[0] < 0:
        raise BudgetExceededError("search budget exhausted")


class _SearchTables:
    """Invertible-matrix pool with pool-indexed product/sum/difference tables."""

    def __init__(self, field, n: int, budget: list):
        q = field.order
        total = q ** (n * n)
        _spend(budget, total * 2)
        codes = []
        mats = []
        for code in range(total):
            m = mat_from_code(q, n, code)
            if linalg.is_invertible(field, m):
                codes.append(code)
                mats.append(m)
        P = len(codes)
        if P > _CODE_TABLE_CAP:
            raise BudgetExceededError(
                f"{P} invertible matrices exceed the search table cap")
        _spend(budget, P * P * 3)
        self.codes = codes
        self.index = {c: i for i, c in enumerate(codes)}
        self.icode = mat_code(q, linalg.identity(field, n))
        stack = np.stack(mats)
        n2 = n * n
        weights = q ** np.arange(n2, dtype=np.int64)
        flat = stack.reshape(P, n2)
        sums = field.add[flat[:, None, :], flat[None, :, :]] @ weights
        diffs = field.add[flat[:, None, :], field.neg[flat[None, :, :]]] @ weights
        self.sum_code = sums  # code of m_i + m_j (may be 0 or non-invertible)
        inv_mask = np.zeros(total, dtype=bool)
        inv_mask[np.asarray(codes)] = True
        self.inv_mask = inv_mask
        # spread condition: difference of two distinct pool members invertible
        self.diff_ok = inv_mask[diffs]
        # products of invertibles stay invertible, so index them in the pool
        self.prod_idx = np.empty((P, P), dtype=np.int64)
        for i in range(P):
            row = np.zeros((P, n, n), dtype=np.int64)
            for k in range(n):
                row = field.add[row, field.mul[stack[i][:, k][None, :, None],
                                               stack[:, k, :][:, None, :]]]
            rcodes = row.reshape(P, n2) @ weights
            for j in range(P):
                self.prod_idx[i, j] = self.index[int(rcodes[j])]


def _search_multiplicative(field, n: int, budget: list) -> list:
    q = field.order
    target = q**n - 1  # nonzero part of the spread set
    tab = _SearchTables(field, n, budget)
    prod = tab.prod_idx
    diff_ok = tab.diff_ok
    P = len(tab.codes)
    start = frozenset([tab.index[tab.icode]])
    results = set()
    seen = set()

    def close(cur: frozenset, new: int):
        members = set(cur)
        work = [new]
        members.add(new)
        while work:
            i = work.pop()
            cur_list = list(members)
            _spend(budget, 2 * len(cur_list))
            for j in cur_list:
                for pc in (int(prod[i, j]), int(prod[j, i])):
                    if pc in members:
                        continue
                    if not all(diff_ok[pc, m] for m in members):
                        return None
                    members.add(pc)
                    if len(members) > target:
                        return None
                    work.append(pc)
        return frozenset(members)

    def dfs(cur: frozenset):
        if cur in seen:
            return
        seen.add(cur)
        if len(cur) == target:
            results.add(cur)
            return
        for c in range(P):
            if c in cur:
                continue
            if not all(diff_ok[c, m] for m in cur):
                continue
            _spend(budget, len(cur))
            closed = close(cur, c)
            if closed is not None:
                dfs(closed)

    dfs(start)
    return _emit_results(field, n, tab, results, "multiplication")


def _search_additive(field, n: int, budget: list) -> list:
    """Canonical DFS over F_p-subspaces consisting of invertible matrices.

    Generators are added in strictly increasing code order, and a generator
    is accepted only when it is the least new element it brings in, so each
    subspace is produced exactly once.  Pool indices are sorted by code, so
    code order and index order agree.
    """
    q = field.order
    p = field.p
    target = q**n
    tab = _SearchTables(field, n, budget)
    sums = tab.sum_code
    inv_mask = tab.inv_mask
    code_of = np.asarray(tab.codes, dtype=np.int64)
    idx_of = np.full(q ** (n * n), -1, dtype=np.int64)
    idx_of[code_of] = np.arange(len(code_of))
    P = len(tab.codes)
    i_idx = int(idx_of[tab.icode])
    results = set()

    # pool index of m*x for every x and m = 1..p-1 (scalar multiples of
    # invertible matrices stay invertible)
    mul_idx = np.empty((p, P), dtype=np.int64)
    mul_idx[1] = np.arange(P)
    for m in range(2, p):
        mul_idx[m] = idx_of[sums[mul_idx[m - 1], np.arange(P)]]

    def dfs(span_arr: np.ndarray, first_cand: int):
        size = span_arr.shape[0] + 1  # zero matrix is implicit
        if size == target:
            if i_idx in span_arr:
                results.add(frozenset(span_arr.tolist()))
            return
        if size * p > target:
            return
        cands = np.arange(first_cand, P)
        if span_arr.size:
            cands = cands[~np.isin(cands, span_arr)]
        if cands.size == 0:
            return
        _spend(budget, (p - 1) * max(1, span_arr.size) + 1)
        ok = np.ones(cands.size, dtype=bool)
        new_idxs = [mul_idx[1:, cands]]  # multiples m*x, (p-1, #cands)
        if span_arr.size:
            for m in range(1, p):
                sc = sums[np.ix_(span_arr, mul_idx[m, cands])]  # b + m*x codes
                ok &= inv_mask[sc].all(axis=0)
                sc = np.where(ok[None, :], sc, 0)
                new_idxs.append(idx_of[sc])
        allnew = np.vstack(new_idxs)  # pool indices of every element added
        for t, c in enumerate(cands):
            if not ok[t]:
                continue
            new = allnew[:, t]
            # canonical rule: x must be the least element it brings in
            if new.min() < c:
                continue
            merged = np.unique(np.concatenate([span_arr, new]))
            if merged.size != size - 1 + new.shape[0]:
                continue  # extension collapsed into the span
            dfs(merged, int(c) + 1)

    dfs(np.empty(0, dtype=np.int64), 0)
    return _emit_results(field, n, tab, results, "addition")


def _emit_results(field, n: int, tab: "_SearchTables", idx_sets, closure: str) -> list:
    q = field.order
    out = []
    seen = set()
    for idxs in idx_sets:
        full = sorted({tab.codes[i] for i in idxs} | {0})
        key = tuple(full)
        if key in seen:
            continue
        seen.add(key)
        mats = np.stack([mat_from_code(q, n, c) for c in full])
        M = SpreadSet(field, n, mats, provenance=f"search({n},{q},{closure})")
        ok, witness = validate_spread_set(M)
        if not ok:
            raise AssertionError(f"search produced an invalid set: {witness}")
        out.append(M)
    out.sort(key=lambda M: M.code_list)
    return out


def search_closed_spread_sets(n: int, q: int, closure: str,
                              budget: int = _SEARCH_BUDGET) -> list:
    """All valid spread sets with 0, I closed under the requested operation.

    closure: "multiplication" or "addition".  Deduplicated up to set
    equality, returned in canonical sorted order.  Raises
    BudgetExceededError when the candidate space outgrows the budget.
    """
    field = gf.gf_of_order(q)
    linalg._require_tables(field)
    tracker = [budget]
    if closure == "multiplication":
        return _search_multiplicative(field, n, tracker)
    if closure == "addition":
        return _search_additive(field, n, tracker)
    raise DomainError(f"unknown closure kind: {closure!r}")
