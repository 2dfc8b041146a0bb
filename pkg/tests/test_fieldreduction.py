import pytest

from spreadlab import DomainError, projgeom
from spreadlab.fieldreduction import (
    desarguesian_spread,
    field_reduce_point,
    regulus,
    subplane_V,
)
from spreadlab.gf import tower
from spreadlab.spreads import validate_spread


def keys(elems):
    return {e.key() for e in elems}


def test_desarguesian_spread_2_2_3():
    sp = desarguesian_spread(2, 2, 3)
    assert len(sp.elements) == 10  # (3^4 - 1) / (3^2 - 1)
    assert sp.provenance == "desarguesian(2,2,3)"
    ok, witness = validate_spread(sp)
    assert ok and witness is None
    assert sp.elements[0].basis.tolist() == [[0, 0, 1, 0], [0, 0, 0, 1]]
    assert sp.elements[1].basis.tolist() == [[1, 0, 0, 0], [0, 1, 0, 0]]


def test_desarguesian_spread_sizes():
    assert len(desarguesian_spread(3, 2, 3).elements) == 91
    assert len(desarguesian_spread(2, 3, 2).elements) == 9
    assert len(desarguesian_spread(2, 1, 4).elements) == 5


def test_desarguesian_spread_rank_one_elements():
    sp = desarguesian_spread(2, 1, 4)
    assert {e.rank for e in sp.elements} == {1}
    ok, _ = validate_spread(sp)
    assert ok


def test_desarguesian_spread_bad_params():
    with pytest.raises(DomainError):
        desarguesian_spread(1, 2, 3)
    with pytest.raises(DomainError):
        desarguesian_spread(2, 0, 3)


def test_field_reduce_point_representative_independent():
    tw = tower(3, 1, 2)
    a = field_reduce_point(tw, (1, 5))
    b = field_reduce_point(tw, (2, tw.F.mul_(2, 5)))
    assert a == b
    assert a.rank == 2
    with pytest.raises(DomainError):
        field_reduce_point(tw, (0, 0))


def test_regulus_inside_desarguesian_spread():
    sp = desarguesian_spread(2, 2, 3)
    A, B, C = sp.elements[0], sp.elements[1], sp.elements[2]
    R = regulus(A, B, C, 3)
    assert len(R) == 4
    assert keys(R) <= keys(sp.elements)
    assert {A.key(), B.key(), C.key()} <= keys(R)
    # canonical ordering is deterministic
    assert [e.key() for e in R] == sorted(e.key() for e in R)


def test_regulus_proper_subfield():
    sp = desarguesian_spread(2, 2, 9)
    A, B, C = sp.elements[0], sp.elements[1], sp.elements[2]
    small = regulus(A, B, C, 3)
    full = regulus(A, B, C, 9)
    assert len(small) == 4
    assert len(full) == 10
    assert keys(small) <= keys(full) <= keys(sp.elements)


def test_regulus_input_checks():
    sp = desarguesian_spread(2, 2, 9)
    A, B, C = sp.elements[0], sp.elements[1], sp.elements[2]
    with pytest.raises(DomainError):
        regulus(A, B, C, 4)  # GF(4) is not a subfield of GF(9)
    with pytest.raises(DomainError):
        regulus(A, A, C, 3)


def test_subplane_inside_desarguesian_spread():
    sp = desarguesian_spread(3, 2, 3)
    f = sp.field
    frame = [
        projgeom.standard_element(f, 3, 2, 0),
        projgeom.standard_element(f, 3, 2, 1),
        projgeom.standard_element(f, 3, 2, 2),
        projgeom.diagonal_element(f, 3, 2),
    ]
    assert keys(frame) <= keys(sp.elements)
    V = subplane_V(*frame, 3)
    assert len(V) == 13  # 3^2 + 3 + 1
    assert keys(V) <= keys(sp.elements)
    assert keys(frame) <= keys(V)


def test_subplane_input_checks():
    sp = desarguesian_spread(3, 2, 3)
    f = sp.field
    s0 = projgeom.standard_element(f, 3, 2, 0)
    s1 = projgeom.standard_element(f, 3, 2, 1)
    s2 = projgeom.standard_element(f, 3, 2, 2)
    d = projgeom.diagonal_element(f, 3, 2)
    with pytest.raises(DomainError):
        subplane_V(s0, s1, s2, d, 2)
    with pytest.raises(DomainError):
        subplane_V(s0, s1, s2, s0, 3)
    line = projgeom.standard_element(f, 2, 2, 0)
    with pytest.raises(DomainError):
        subplane_V(line, line, line, line, 3)
