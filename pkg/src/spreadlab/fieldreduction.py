"""Field reduction PG(r-1, q^n) -> PG(rn-1, q), reguli, and scalar subplanes.

All constructions here normalize a frame to standard coordinates, write the
answer as scalar-block patterns, and pull back through the inverse
collineation, so they work for any frame in general position.
"""

import numpy as np

from . import gf, linalg, projgeom
from .errors import DomainError
from .projgeom import Subspace


def field_reduce_point(tw: gf.FieldTower, coords) -> Subspace:
    """The rank-n subspace of PG(rn-1, q) carried by a point of PG(r-1, q^n).

    coords: the point's homogeneous coordinates as codes in tw.F, not all zero.
    The result does not depend on the chosen representative.
    """
    coords = [int(a) for a in coords]
    if all(a == 0 for a in coords):
        raise DomainError("zero vector is not a projective point")
    r = len(coords)
    blocks = [tw.mult_matrix(a) for a in coords]
    basis = np.hstack(blocks)
    return Subspace.from_rows(tw.Kq, r * tw.n - 1, basis)


def desarguesian_spread(r: int, n: int, q: int):
    """The classical (n-1)-spread of PG(rn-1, q) obtained by field reduction."""
    from .spreads import Spread

    if r < 2 or n < 1:
        raise DomainError("need r >= 2 and n >= 1")
    p, h = gf.factor_prime_power(q)
    tw = gf.tower(p, h, n)
    FQ = tw.F
    elems = []
    for code in projgeom.all_point_codes(FQ, r - 1):
        vec = projgeom.code_to_vec(FQ, int(code), r)
        elems.append(field_reduce_point(tw, vec))
    return Spread(tw.Kq, r, n, elems, provenance=f"desarguesian({r},{n},{q})")


def _check_subfield_order(field, q0: int) -> list:
    p, h = gf.factor_prime_power(field.order)
    p0, h0 = gf.factor_prime_power(q0)
    if p0 != p or h % h0 != 0:
        raise DomainError(f"GF({q0}) is not a subfield of GF({field.order})")
    return sorted(field.subfield_codes(q0))


def _scalar_block_basis(field, scalars, n: int) -> np.ndarray:
    blocks = [linalg.scalar_matrix(field, n, int(a)) for a in scalars]
    return np.hstack(blocks)


def regulus(A: Subspace, B: Subspace, C: Subspace, q0: int) -> list:
    """R_{q0}(A, B, C): the q0+1 elements through three pairwise disjoint ones.

    A, B, C must be mutually disjoint rank-n subspaces of PG(2n-1, q), and
    GF(q0) a subfield of GF(q).  Result is sorted canonically and contains
    A, B, C.
    """
    f = A.field
    sub = _check_subfield_order(f, q0)
    n = A.rank
    if A.m != 2 * n - 1:
        raise DomainError("regulus wants rank-n subspaces of PG(2n-1, q)")
    for X, Y in ((A, B), (A, C), (B, C)):
        if projgeom.meet(X, Y).rank != 0:
            raise DomainError("regulus inputs must be pairwise disjoint")
    T = projgeom.frame_normalization([A, B, C])
    Tinv = linalg.inverse(f, T)
    out = []
    for b in sub:
        basis = _scalar_block_basis(f, (1, b), n)
        out.append(Subspace.from_rows(f, A.m, linalg.mat_mul(f, basis, Tinv)))
    basis = _scalar_block_basis(f, (0, 1), n)
    out.append(Subspace.from_rows(f, A.m, linalg.mat_mul(f, basis, Tinv)))
    out.sort(key=Subspace.key)
    return out


def subplane_V(A: Subspace, B: Subspace, C: Subspace, D: Subspace, q0: int) -> list:
    """V_{q0}(A,B,C,D): the scalar subplane on a frame of PG(3n-1, q).

    A, B, C, D must be rank-n subspaces of PG(3n-1, q) in general position.
    Returns the q0^2 + q0 + 1 elements whose normalized coordinates are
    (aI, bI, cI) with (a : b : c) a point of the order-q0 subplane; contains
    the frame itself.  Sorted canonically.
    """
    f = A.field
    sub = _check_subfield_order(f, q0)
    n = A.rank
    if A.m != 3 * n - 1:
        raise DomainError("subplane_V wants rank-n subspaces of PG(3n-1, q)")
    if not projgeom.in_general_position([A, B, C, D]):
        raise DomainError("subplane_V inputs must be in general position")
    T = projgeom.frame_normalization([A, B, C, D])
    Tinv = linalg.inverse(f, T)
    out = []
    for a in sub:
        for b in sub:
            for c in sub:
                first = next((x for x in (a, b, c) if x != 0), 0)
                if first != 1:
                    continue
                basis = _scalar_block_basis(f, (a, b, c), n)
                out.append(
                    Subspace.from_rows(f, A.m, linalg.mat_mul(f, basis, Tinv))
                )
    out.sort(key=Subspace.key)
    return out
