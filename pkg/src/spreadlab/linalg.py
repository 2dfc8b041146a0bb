"""Exact linear algebra over a table field.

Matrices are numpy int64 arrays of element codes; the field argument supplies
the lookup tables.  Row-vector convention throughout: points are rows, maps
act on the right, so ``kernel`` means the left kernel {x : x.m = 0}.
"""

import numpy as np

from . import _kernels, backend
from .errors import DomainError, SingularMatrixError


def _require_tables(field):
    if not field.has_tables:
        raise DomainError(
            f"matrix arithmetic needs full tables; field order {field.order} "
            "exceeds the table cap"
        )


def as_matrix(field, rows) -> np.ndarray:
    m = np.asarray(rows, dtype=np.int64)
    if m.ndim != 2:
        raise DomainError("matrix must be two-dimensional")
    if m.size and (m.min() < 0 or m.max() >= field.order):
        raise DomainError("entry out of range for field")
    return m


def identity(field, n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def zeros(field, n: int, m: int | None = None) -> np.ndarray:
    return np.zeros((n, m if m is not None else n), dtype=np.int64)


def scalar_matrix(field, n: int, c: int) -> np.ndarray:
    return identity(field, n) * field.check(c)


def mat_add(field, a, b) -> np.ndarray:
    _require_tables(field)
    return field.add[a, b]


def mat_neg(field, a) -> np.ndarray:
    return field.neg[a]


def mat_sub(field, a, b) -> np.ndarray:
    _require_tables(field)
    return field.add[a, field.neg[b]]


def mat_mul(field, a, b) -> np.ndarray:
    _require_tables(field)
    if a.shape[1] != b.shape[0]:
        raise DomainError("shape mismatch")
    if backend.USING_NUMBA:
        return _kernels.mat_mul(a, b, field.add, field.mul)
    # vectorized table fallback
    acc = field.mul[a[:, 0][:, None], b[0, :][None, :]]
    for k in range(1, a.shape[1]):
        acc = field.add[acc, field.mul[a[:, k][:, None], b[k, :][None, :]]]
    return acc


def vec_mat(field, v, m) -> np.ndarray:
    """Row vector times matrix."""
    return mat_mul(field, np.asarray(v, dtype=np.int64)[None, :], m)[0]


def rref(field, m) -> tuple[np.ndarray, int]:
    """Canonical reduced row echelon form (copy) and rank."""
    _require_tables(field)
    work = np.array(m, dtype=np.int64, copy=True)
    r = int(_kernels.rref_in_place(work, field.add, field.mul, field.neg, field.inv))
    return work, r


def rank(field, m) -> int:
    return rref(field, m)[1]


def det(field, m) -> int:
    _require_tables(field)
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("determinant needs a square matrix")
    work = np.array(a, dtype=np.int64, copy=True)
    return int(_kernels.det_in_place(work, field.add, field.mul, field.neg, field.inv))


def kernel(field, m) -> np.ndarray:
    """Canonical basis of the left kernel {x : x.m = 0} as rows.

    The zero map on k rows has a full kernel of dimension k; an invertible
    matrix has an empty one (shape (0, k)).
    """
    a = np.asarray(m, dtype=np.int64)
    R, r = rref(field, a.T)
    rows = a.shape[0]
    pivots = []
    c = 0
    for i in range(r):
        while R[i, c] == 0:
            c += 1
        pivots.append(c)
    free = [j for j in range(rows) if j not in pivots]
    basis = np.zeros((len(free), rows), dtype=np.int64)
    for bi, f in enumerate(free):
        basis[bi, f] = 1
        for i, pc in enumerate(pivots):
            basis[bi, pc] = field.neg[R[i, f]]
    if len(free) > 1:
        basis, _ = rref(field, basis)
    return basis


def is_invertible(field, m) -> bool:
    a = np.asarray(m)
    return a.shape[0] == a.shape[1] and rank(field, a) == a.shape[0]


def inverse(field, m) -> np.ndarray:
    _require_tables(field)
    a = np.asarray(m, dtype=np.int64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("inverse needs a square matrix")
    n = a.shape[0]
    aug = np.hstack([a, identity(field, n)])
    R, r = rref(field, aug)
    if r < n or np.any(R[:n, :n] != identity(field, n)):
        wit = kernel(field, a)
        raise SingularMatrixError(
            "matrix is singular", witness=wit[0] if len(wit) else None
        )
    return np.ascontiguousarray(R[:, n:])


def block_matrix(field, blocks) -> np.ndarray:
    """Assemble from a 2D grid of equal-size square blocks (int64 arrays)."""
    rows = [np.hstack([np.asarray(b, dtype=np.int64) for b in row]) for row in blocks]
    return np.vstack(rows)


def mat_to_json(field, m) -> dict:
    a = np.asarray(m, dtype=np.int64)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "q": int(field.order),
        "entries": [[int(x) for x in row] for row in a],
    }


def mat_from_json(field, obj) -> np.ndarray:
    if int(obj["q"]) != field.order:
        raise DomainError("matrix JSON is over a different field")
    m = as_matrix(field, obj["entries"])
    if m.shape != (int(obj["rows"]), int(obj["cols"])):
        raise DomainError("matrix JSON shape mismatch")
    return m
