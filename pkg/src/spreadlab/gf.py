"""Exact finite-field arithmetic backed by integer-coded lookup tables.

An element of GF(p^d) is an integer code in [0, p^d): the little-endian base-p
packing of its coefficient vector with respect to the power basis of a fixed
monic irreducible modulus.  The modulus is the irreducible monic polynomial of
degree d whose low-coefficient encoding (c_0 + c_1 p + ... + c_{d-1} p^{d-1})
is smallest; the canonical generator is the primitive element with the
smallest code.  Both choices are deterministic, so codes mean the same thing
across runs and machines.

``GF`` carries dlog/exp/neg/inv/frobenius tables always, and full add/mul
tables when the order is at most ``table_cap`` (matrix kernels need those).
``FieldTower(p, h, n)`` models F_{q^n} over F_q (q = p^h): the big field, the
entry field K_q, the subfield embedding, a power basis 1, beta, ..,
beta^{n-1}, coordinate tables both ways, and multiplication matrices.
"""

from functools import lru_cache

import numpy as np

from .errors import BudgetExceededError, DomainError

DLOG_CAP = 1 << 20  # refuse to build fields larger than this
TABLE_CAP = 2048  # full add/mul tables only up to this order


def prime_factors(m: int) -> list[int]:
    """Distinct prime factors of m >= 1, ascending."""
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def factor_prime_power(q: int) -> tuple[int, int]:
    """q = p^h with p prime, h >= 1; DomainError otherwise."""
    if q < 2:
        raise DomainError(f"{q} is not a prime power")
    ps = prime_factors(q)
    if len(ps) != 1:
        raise DomainError(f"{q} is not a prime power")
    p = ps[0]
    h = 0
    while q > 1:
        q //= p
        h += 1
    return p, h


def _digits(code: int, p: int, d: int) -> list[int]:
    out = []
    for _ in range(d):
        out.append(code % p)
        code //= p
    return out


def _pack(coeffs, p: int) -> int:
    code = 0
    for c in reversed(coeffs):
        code = code * p + int(c)
    return code


def _poly_mod(num: list[int], den: list[int], p: int) -> list[int]:
    # num, den low-to-high; den monic.  Returns remainder, trimmed.
    num = list(num)
    dd = len(den) - 1
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i] % p
        if c:
            for j in range(dd + 1):
                num[i - dd + j] = (num[i - dd + j] - c * den[j]) % p
    num = num[:dd]
    while num and num[-1] == 0:
        num.pop()
    return num


def _poly_irreducible(coeffs: list[int], p: int) -> bool:
    # coeffs monic of degree d >= 1; trial division by all monic polys of
    # degree up to d // 2.
    d = len(coeffs) - 1
    if coeffs[0] == 0:
        return d == 1
    for deg in range(1, d // 2 + 1):
        for code in range(p**deg):
            den = _digits(code, p, deg) + [1]
            if not _poly_mod(coeffs, den, p):
                return False
    return True


def poly_str(coeffs, var: str = "t") -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = int(coeffs[i])
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        else:
            head = "" if c == 1 else str(c)
            pw = var if i == 1 else f"{var}^{i}"
            terms.append(head + pw)
    return " + ".join(terms) if terms else "0"


class GF:
    """The field GF(p^d) with element codes 0 .. p^d - 1."""

    def __init__(self, p: int, d: int, table_cap: int = TABLE_CAP):
        if d < 1:
            raise DomainError("extension degree must be >= 1")
        if p < 2 or prime_factors(p) != [p]:
            raise DomainError(f"{p} is not prime")
        s = p**d
        if s > DLOG_CAP:
            raise BudgetExceededError(f"field order {s} exceeds cap {DLOG_CAP}")
        self.p = p
        self.d = d
        self.order = s

        self.modulus = self._find_modulus()
        self._mul_by_table = None

        # digit matrix: digits[a] = coefficient vector of a, little-endian
        codes = np.arange(s, dtype=np.int64)
        dig = np.empty((s, d), dtype=np.int64)
        t = codes.copy()
        for i in range(d):
            dig[:, i] = t % p
            t //= p
        self.digits = dig
        self._weights = p ** np.arange(d, dtype=np.int64)

        self.neg = ((p - dig) % p) @ self._weights

        self.generator = self._find_generator()
        exp = np.empty(s - 1, dtype=np.int64)
        dlog = np.full(s, -1, dtype=np.int64)
        x = 1
        for i in range(s - 1):
            exp[i] = x
            dlog[x] = i
            x = self._mul_code(x, self.generator)
        if x != 1:
            raise AssertionError("generator order wrong")
        self.exp = exp
        self.dlog = dlog

        self.inv = np.zeros(s, dtype=np.int64)
        nz = codes[1:]
        self.inv[nz] = exp[(s - 1 - dlog[nz]) % (s - 1)]

        self.frob = np.zeros(s, dtype=np.int64)
        self.frob[nz] = exp[(dlog[nz] * p) % (s - 1)]

        self.has_tables = s <= table_cap
        if self.has_tables:
            summed = dig[:, None, :] + dig[None, :, :]
            self.add = (summed % p) @ self._weights
            mt = np.zeros((s, s), dtype=np.int64)
            ii = (dlog[nz][:, None] + dlog[nz][None, :]) % (s - 1)
            mt[1:, 1:] = exp[ii]
            self.mul = mt
        else:
            self.add = None
            self.mul = None

        self._subfield_cache: dict[int, np.ndarray] = {}

    def _find_modulus(self) -> tuple[int, ...]:
        p, d = self.p, self.d
        for m in range(p**d):
            coeffs = _digits(m, p, d) + [1]
            if _poly_irreducible(coeffs, p):
                return tuple(coeffs)
        raise AssertionError("no irreducible polynomial found")

    def _mul_code(self, a: int, b: int) -> int:
        # bootstrap multiplication: schoolbook polynomial product mod modulus
        p, d = self.p, self.d
        da = _digits(a, p, d)
        db = _digits(b, p, d)
        prod = [0] * (2 * d - 1)
        for i, ca in enumerate(da):
            if ca:
                for j, cb in enumerate(db):
                    prod[i + j] = (prod[i + j] + ca * cb) % p
        rem = _poly_mod(prod, list(self.modulus), p)
        return _pack(rem, p)

    def _pow_code(self, a: int, k: int) -> int:
        r = 1
        while k:
            if k & 1:
                r = self._mul_code(r, a)
            a = self._mul_code(a, a)
            k >>= 1
        return r

    def _find_generator(self) -> int:
        s = self.order
        if s == 2:
            return 1
        checks = [(s - 1) // ell for ell in prime_factors(s - 1)]
        for g in range(2, s):
            if all(self._pow_code(g, c) != 1 for c in checks):
                return g
        raise AssertionError("no generator found")

    # -- scalar operations on codes ------------------------------------

    def check(self, a: int) -> int:
        a = int(a)
        if not 0 <= a < self.order:
            raise DomainError(f"code {a} out of range for field of order {self.order}")
        return a

    def add_(self, a: int, b: int) -> int:
        if self.add is not None:
            return int(self.add[a, b])
        return _pack((self.digits[a] + self.digits[b]) % self.p, self.p)

    def sub_(self, a: int, b: int) -> int:
        return self.add_(a, int(self.neg[b]))

    def mul_(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.mul is not None:
            return int(self.mul[a, b])
        return int(self.exp[(self.dlog[a] + self.dlog[b]) % (self.order - 1)])

    def inv_(self, a: int) -> int:
        if a == 0:
            raise DomainError("inverse of zero")
        return int(self.inv[a])

    def pow_(self, a: int, k: int) -> int:
        if a == 0:
            if k > 0:
                return 0
            if k == 0:
                return 1
            raise DomainError("negative power of zero")
        return int(self.exp[(int(self.dlog[a]) * k) % (self.order - 1)])

    def dlog_(self, a: int) -> int:
        if a == 0:
            raise DomainError("dlog of zero")
        return int(self.dlog[a])

    def coeffs(self, a: int) -> list[int]:
        return [int(c) for c in self.digits[self.check(a)]]

    def from_coeffs(self, coeffs) -> int:
        if len(coeffs) > self.d:
            raise DomainError("coefficient vector too long")
        cs = [int(c) % self.p for c in coeffs]
        cs += [0] * (self.d - len(cs))
        return _pack(cs, self.p)

    def subfield_codes(self, order: int) -> np.ndarray:
        """Sorted codes of the subfield of the given order (p^e, e | d)."""
        if order in self._subfield_cache:
            return self._subfield_cache[order]
        p, e = factor_prime_power(order)
        if p != self.p or self.d % e != 0:
            raise DomainError(f"GF({order}) is not a subfield of GF({self.order})")
        s = self.order
        nz = np.arange(1, s, dtype=np.int64)
        fixed = nz[(self.dlog[nz] * (order - 1)) % (s - 1) == 0]
        out = np.concatenate(([0], fixed)).astype(np.int64)
        out.sort()
        if len(out) != order:
            raise AssertionError("subfield size mismatch")
        self._subfield_cache[order] = out
        return out

    def is_in_subfield(self, a: int, order: int) -> bool:
        p, e = factor_prime_power(order)
        if p != self.p or self.d % e != 0:
            raise DomainError(f"GF({order}) is not a subfield of GF({self.order})")
        if a == 0:
            return True
        return (int(self.dlog[a]) * (order - 1)) % (self.order - 1) == 0

    def __repr__(self):
        return f"GF({self.p}^{self.d}; {poly_str(self.modulus)})"


@lru_cache(maxsize=None)
def gf(p: int, d: int) -> GF:
    return GF(p, d)


def gf_of_order(q: int) -> GF:
    p, h = factor_prime_power(q)
    return gf(p, h)


class FieldElement:
    """Thin operator-overloading wrapper over a tower code (for tests/REPL)."""

    __slots__ = ("tower", "code")

    def __init__(self, tower, code: int):
        self.tower = tower
        self.code = tower.F.check(code)

    def _lift(self, other):
        if isinstance(other, FieldElement):
            if other.tower is not self.tower:
                raise DomainError("elements from different towers")
            return other.code
        return self.tower.F.check(other)

    def __add__(self, other):
        return FieldElement(self.tower, self.tower.F.add_(self.code, self._lift(other)))

    def __sub__(self, other):
        return FieldElement(self.tower, self.tower.F.sub_(self.code, self._lift(other)))

    def __neg__(self):
        return FieldElement(self.tower, int(self.tower.F.neg[self.code]))

    def __mul__(self, other):
        return FieldElement(self.tower, self.tower.F.mul_(self.code, self._lift(other)))

    def __pow__(self, k: int):
        return FieldElement(self.tower, self.tower.F.pow_(self.code, k))

    def inverse(self):
        return FieldElement(self.tower, self.tower.F.inv_(self.code))

    def dlog(self) -> int:
        return self.tower.F.dlog_(self.code)

    @property
    def coeffs(self) -> list[int]:
        return self.tower.F.coeffs(self.code)

    def __eq__(self, other):
        return (
            isinstance(other, FieldElement)
            and other.tower is self.tower
            and other.code == self.code
        )

    def __hash__(self):
        return hash((id(self.tower), self.code))

    def __repr__(self):
        return f"<{poly_str(self.coeffs)}>"


class FieldTower:
    """F_{q^n} over F_q over F_p, with coordinates and multiplication matrices.

    F is GF(p, h*n); Kq is the standalone GF(p, h) used for matrix entries.
    ``embed`` maps Kq codes into F (image = the unique subfield of order q),
    ``coords`` writes each element of F in the power basis of beta, an element
    of degree exactly n over F_q with the smallest code.
    """

    def __init__(self, p: int, h: int, n: int):
        if n < 1:
            raise DomainError("n must be >= 1")
        self.p = p
        self.h = h
        self.n = n
        self.q = p**h
        self.N = self.q**n
        self.F = gf(p, h * n)
        self.Kq = gf(p, h)

        self._build_embedding()
        self._build_coords()
        self._mm_cache: dict[int, np.ndarray] = {}

    def _build_embedding(self):
        F, Kq, q = self.F, self.Kq, self.q
        # root of Kq's modulus inside F, smallest code
        mod = list(Kq.modulus)
        rho = -1
        for x in range(F.order):
            acc = 0
            for c in reversed(mod):
                acc = F.add_(F.mul_(acc, x), c % F.p)
            if acc == 0:
                rho = x
                break
        if rho < 0:
            raise AssertionError("no root of subfield modulus in tower field")
        emb = np.zeros(q, dtype=np.int64)
        for c in range(q):
            acc = 0
            for cc in reversed(Kq.coeffs(c)):
                acc = F.add_(F.mul_(acc, rho), cc)
            emb[c] = acc
        sub = F.subfield_codes(q)
        if sorted(int(v) for v in emb) != [int(v) for v in sub]:
            raise AssertionError("embedding image is not the subfield of order q")
        self.embed = emb
        self.emb_inv = np.full(F.order, -1, dtype=np.int64)
        self.emb_inv[emb] = np.arange(q, dtype=np.int64)
        self.subfield = sub

    def _element_degree(self, x: int) -> int:
        # degree over F_q: least d >= 1 with x^{q^d} = x
        F, q = self.F, self.q
        y = F.pow_(x, q)
        d = 1
        while y != x:
            y = F.pow_(y, q)
            d += 1
        return d

    def _build_coords(self):
        F, q, n, N = self.F, self.q, self.n, self.N
        if n == 1:
            beta = 1
        else:
            beta = -1
            for x in range(F.order):
                if self._element_degree(x) == n:
                    beta = x
                    break
            if beta < 0:
                raise AssertionError("no degree-n element found")
        self.beta = beta
        basis = [1]
        for _ in range(n - 1):
            basis.append(F.mul_(basis[-1], beta))
        self.basis = basis

        coords = np.full((N, n), -1, dtype=np.int64)
        from_coords = np.full(N, -1, dtype=np.int64)
        # basis images of every Kq scalar, per position
        scaled = [[F.mul_(int(self.embed[c]), b) for c in range(q)] for b in basis]
        for vc in range(N):
            t = vc
            acc = 0
            for i in range(n):
                c = t % q
                t //= q
                if c:
                    acc = F.add_(acc, scaled[i][c])
            if from_coords[vc] != -1 or coords[acc, 0] != -1:
                raise AssertionError("coordinate map not injective")
            from_coords[vc] = acc
            dig = _digits(vc, q, n)
            coords[acc] = dig
        self.coords = coords
        self.from_coords = from_coords

    # -- conversions ----------------------------------------------------

    def vec(self, a: int) -> np.ndarray:
        """Row vector of Kq codes for the tower element a."""
        return self.coords[self.F.check(a)].copy()

    def vec_code(self, a: int) -> int:
        """Little-endian base-q packing of vec(a)."""
        dig = self.coords[self.F.check(a)]
        return int(_pack(list(dig), self.q))

    def from_vec(self, v) -> int:
        code = 0
        for c in reversed(list(v)):
            code = code * self.q + self.Kq.check(c)
        return int(self.from_coords[code])

    def element(self, a: int) -> FieldElement:
        return FieldElement(self, a)

    def mult_matrix(self, a: int) -> np.ndarray:
        """n x n matrix M_a over Kq with vec(x*a) = vec(x) . M_a (rows = vec(beta^i * a))."""
        a = self.F.check(a)
        hit = self._mm_cache.get(a)
        if hit is not None:
            return hit
        F = self.F
        m = np.empty((self.n, self.n), dtype=np.int64)
        for i, b in enumerate(self.basis):
            m[i] = self.coords[F.mul_(b, a)]
        m.setflags(write=False)
        self._mm_cache[a] = m
        return m

    def __repr__(self):
        return f"FieldTower(GF({self.q}^{self.n}) over GF({self.q}))"


@lru_cache(maxsize=None)
def tower(p: int, h: int, n: int) -> FieldTower:
    return FieldTower(p, h, n)


def tower_of(q: int, n: int) -> FieldTower:
    p, h = factor_prime_power(q)
    return tower(p, h, n)
