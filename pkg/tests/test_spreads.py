import numpy as np
import pytest

from spreadlab import DomainError, projgeom
from spreadlab import spreads as sp
from spreadlab import spreadsets as ss
from spreadlab.fieldreduction import desarguesian_spread
from spreadlab.projgeom import Subspace


def field9():
    return ss.field_spread_set(3, 2)


def dickson9():
    return ss.spread_set_from_quasifield(ss.dickson_nearfield(3, 2))


def test_spread_constructor_checks():
    sp0 = desarguesian_spread(2, 2, 3)
    f = sp0.field
    line = Subspace.from_rows(f, 3, [[1, 0, 0, 0]])
    with pytest.raises(DomainError):
        sp.Spread(f, 2, 2, sp0.elements[:-1] + [line])
    plane = Subspace.from_rows(f, 2, [[1, 0, 0], [0, 1, 0]])
    with pytest.raises(DomainError):
        sp.Spread(f, 2, 2, sp0.elements[:-1] + [plane])


def test_membership_and_index():
    S = desarguesian_spread(2, 2, 3)
    for i, e in enumerate(S.elements):
        assert S.index_of(e) == i
        assert e in S
    outside = Subspace.from_rows(S.field, 3, [[1, 0, 0, 0], [0, 1, 1, 0]])
    assert outside not in S
    with pytest.raises(DomainError):
        S.index_of(outside)


def test_validate_spread_negative_witnesses():
    S = desarguesian_spread(2, 2, 3)
    short = sp.Spread(S.field, 2, 2, S.elements[:-1])
    ok, witness = sp.validate_spread(short)
    assert not ok and witness["kind"] == "count"
    dup = sp.Spread(S.field, 2, 2, S.elements[:-1] + [S.elements[0]])
    ok, witness = sp.validate_spread(dup)
    assert not ok and witness["kind"] == "overlap"
    rep = sp.spread_report(dup)
    assert rep["valid"] is False and "witness" in rep
    assert "normal_count" not in rep


def test_pt2elem_partition():
    S = desarguesian_spread(2, 2, 3)
    assert sp.validate_spread(S) == (True, None)
    cover = S.pt2elem()
    for i, e in enumerate(S.elements):
        for c in projgeom.point_codes(e):
            assert cover[int(c)] == i


def test_every_element_of_a_line_spread_is_normal():
    S = desarguesian_spread(2, 2, 3)
    rep = sp.spread_report(S)
    assert rep["valid"]
    assert rep["normal_count"] == 10
    assert rep["max_general_position"] == 3
    assert rep["desarguesian"] is True
    assert rep["size"] == 10


def test_constructions_reproduce_field_reduction():
    f22 = ss.field_spread_set(2, 2)
    D = desarguesian_spread(3, 2, 2)
    assert sp.construct_S_r(f22, 3) == D
    assert sp.construct_T_3(f22, f22) == D
    assert sp.construct_U_r(f22, [f22, f22]) == D
    assert sp.construct_S_r(f22, 3).content_hash() == D.content_hash()


def test_s3_dickson_normal_structure():
    S = sp.construct_S_r(dickson9(), 3)
    assert len(S) == 91
    rep = sp.spread_report(S)
    assert rep["valid"]
    assert rep["normal_indices"] == [0, 1, 10]
    assert rep["max_general_position"] == 3
    assert rep["max_general_position_witness"] == [0, 1, 10]
    assert rep["desarguesian"] is False
    assert rep["provenance"] == "S_3(spread_set(dickson(3,2)))"


def test_t3_normal_structure():
    T = sp.construct_T_3(field9(), dickson9())
    assert len(T) == 91
    rep = sp.spread_report(T)
    assert rep["valid"]
    assert rep["normal_indices"] == [1, 10, 19, 28, 37, 64]
    # all six normals lie in the hyperplane (x, y, 0): no three span
    assert rep["max_general_position"] == 2
    assert rep["desarguesian"] is False
    pi0 = Subspace.from_rows(
        T.field, 5,
        np.hstack([np.eye(4, dtype=np.int64), np.zeros((4, 2), dtype=np.int64)]),
    )
    inside = sp.elements_in_subspace(T, pi0)
    assert len(inside) == 10
    assert {T.index_of(e) for e in inside} >= set(rep["normal_indices"])


def test_t3_designated_normals():
    T = sp.construct_T_3(field9(), dickson9())
    desig = sp.t3_designated_normals(T.field, 2)
    assert [T.index_of(e) for e in desig] == [10, 37, 1]
    assert all(sp.is_normal_element(T, e) for e in desig)


def test_u3_designated_normals():
    U = sp.construct_U_r(field9(), [dickson9(), dickson9()])
    assert len(U) == 91
    rep = sp.spread_report(U)
    assert rep["valid"]
    assert rep["normal_indices"] == [0, 1]
    desig = sp.u_r_designated_normals(U.field, 3, 2)
    assert sorted(U.index_of(e) for e in desig) == [0, 1]
    assert all(sp.is_normal_element(U, e) for e in desig)


def test_u3_nearfield_base_with_field_companions():
    U = sp.construct_U_r(dickson9(), [field9(), field9()])
    rep = sp.spread_report(U)
    assert rep["valid"]
    assert rep["normal_indices"] == [0, 1, 2, 3, 4, 7]
    assert rep["desarguesian"] is False


def test_u_r_requires_multiplicatively_closed_base():
    proper = [M for M in ss.search_closed_spread_sets(2, 4, "addition")
              if not ss.is_nearfield_set(M)]
    with pytest.raises(DomainError):
        sp.construct_U_r(proper[0], [proper[0], proper[0]])


def test_construction_input_checks():
    M = field9()
    with pytest.raises(DomainError):
        sp.construct_S_r(M, 1)
    with pytest.raises(DomainError):
        sp.construct_U_r(M, [M])
    with pytest.raises(DomainError):
        sp.construct_T_3(M, ss.field_spread_set(2, 2))


def test_regulus_closure_at():
    E = None
    S = sp.construct_S_r(field9(), 2)
    E = projgeom.standard_element(S.field, 2, 2, 1)
    assert sp.regulus_closure_at(S, E, 3)
    Sd = sp.construct_S_r(dickson9(), 2)
    assert not sp.regulus_closure_at(Sd, E, 3)


def test_regulus_closure_input_checks():
    S2 = sp.construct_S_r(field9(), 2)
    E = projgeom.standard_element(S2.field, 2, 2, 1)
    with pytest.raises(DomainError):
        sp.regulus_closure_at(S2, E, 2)
    S3 = sp.construct_S_r(field9(), 3)
    with pytest.raises(DomainError):
        sp.regulus_closure_at(S3, projgeom.standard_element(S3.field, 3, 2, 2), 3)
    outside = Subspace.from_rows(S2.field, 3, [[1, 0, 0, 0], [0, 1, 1, 0]])
    with pytest.raises(DomainError):
        sp.regulus_closure_at(S2, outside, 3)


def test_is_desarguesian_routes():
    assert sp.is_desarguesian(sp.construct_S_r(field9(), 2)) is True
    assert sp.is_desarguesian(sp.construct_S_r(dickson9(), 2)) is False
    # binary line spreads have no proper subfield with q0 > 2: undecided
    S2 = sp.construct_S_r(ss.field_spread_set(2, 2), 2)
    assert sp.is_desarguesian(S2) is None
    assert sp.spread_report(S2)["desarguesian"] == "unknown"


def test_spread_json_round_trip():
    S = sp.construct_S_r(dickson9(), 2)
    obj = S.to_json()
    again = sp.Spread.from_json(obj)
    assert again == S
    assert again.provenance == S.provenance
    assert again.content_hash() == S.content_hash()
