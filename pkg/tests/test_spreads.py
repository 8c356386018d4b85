"""Partial-spread constructions, verification, holes, exact search."""

import random

import pytest

from qspread.errors import ParameterMismatch
from qspread.gf import field_new, gaussian_binomial
from qspread.geometry import divisibility_verdict, matrix_rank, subspace_distance
from qspread.spreads import (
    PartialSpread,
    extend_spread,
    lifted_mrd_layer,
    lifted_mrd_matrices,
    maximum_partial_spread_size,
    multicomponent,
    spread_field_reduction,
    spread_holes,
    verify_partial_spread,
    verify_vsp,
)


# ---------------------------------------------------------------------------
# lifted layers


def test_lifted_mrd_pairwise_rank():
    q, k, m = 2, 3, 3
    blocks = lifted_mrd_matrices(q, k, m)
    field = field_new(q)
    assert len(blocks) == q**m
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            diff = [
                tuple(field.sub(x, y) for x, y in zip(r1, r2))
                for r1, r2 in zip(blocks[i], blocks[j])
            ]
            assert matrix_rank(field, diff, m) == min(k, m)


def test_lifted_subspace_distance_equals_twice_rank():
    q, k, m = 2, 2, 4
    blocks = lifted_mrd_matrices(q, k, m)
    layer = lifted_mrd_layer(q, k + m, k)
    field = field_new(q)
    rng = random.Random(7)
    for _ in range(60):
        i, j = rng.randrange(len(layer)), rng.randrange(len(layer))
        diff = [
            tuple(field.sub(x, y) for x, y in zip(r1, r2))
            for r1, r2 in zip(blocks[i], blocks[j])
        ]
        assert subspace_distance(layer[i], layer[j]) == 2 * matrix_rank(field, diff, m)


def test_lifted_layer_requires_wide_block():
    with pytest.raises(ParameterMismatch):
        lifted_mrd_matrices(2, 4, 3)


# ---------------------------------------------------------------------------
# layered construction


def test_multicomponent_line_spread_of_dimension_five():
    s = multicomponent(2, 5, 2)
    assert s.size == 9  # 1 + 2^3
    report = verify_partial_spread(s)
    assert report.ok, report.violations
    # frozen canonical matrices: identity block plus the eight field blocks,
    # and the subspace on the last two coordinates
    lifted_blocks = {
        ((0, 0, 0), (0, 0, 0)),
        ((1, 0, 0), (0, 1, 0)),
        ((0, 1, 0), (0, 0, 1)),
        ((0, 0, 1), (1, 1, 0)),
        ((1, 1, 0), (0, 1, 1)),
        ((0, 1, 1), (1, 1, 1)),
        ((1, 1, 1), (1, 0, 1)),
        ((1, 0, 1), (1, 0, 0)),
    }
    expected = {
        ((1, 0) + b[0], (0, 1) + b[1]) for b in lifted_blocks
    } | {((0, 0, 0, 1, 0), (0, 0, 0, 0, 1))}
    assert {s_.matrix for s_ in s.members} == expected
    holes = spread_holes(s)
    assert holes.size == 4
    # the holes avoid the first two coordinates entirely
    assert all(p[0] == 0 and p[1] == 0 for p in holes.counts)


def test_multicomponent_sizes_and_holes():
    s = multicomponent(2, 8, 3)
    assert s.size == 33  # 1 + 2^5
    assert verify_partial_spread(s).ok
    holes = spread_holes(s)
    assert holes.size == 24
    assert divisibility_verdict(holes, 4).ok  # 2^(k-1)-divisible hole set

    s2 = multicomponent(3, 7, 3)
    assert s2.size == 1 + 3**4  # t=2, r=1
    assert verify_partial_spread(s2).ok


def test_multicomponent_three_layers():
    s = multicomponent(2, 7, 2)
    assert s.size == 1 + 2**3 + 2**5
    assert verify_partial_spread(s).ok
    holes = spread_holes(s)
    assert holes.size == gaussian_binomial(3, 1, 2) - gaussian_binomial(2, 1, 2)


def test_multicomponent_moving_subspace_is_lex_smallest():
    s = multicomponent(2, 8, 3)
    flattened = [sum(m.matrix, ()) for m in s.members]
    moving = sum(s.members[-1].matrix, ())
    assert moving == min(flattened)


def test_multicomponent_rejects_bad_parameters():
    with pytest.raises(ParameterMismatch):
        multicomponent(2, 6, 3)  # k divides v
    with pytest.raises(ParameterMismatch):
        multicomponent(2, 5, 3)  # only one layer possible
    with pytest.raises(ParameterMismatch):
        multicomponent(2, 5, 1)


def test_extend_spread_adds_full_layer():
    s = multicomponent(2, 5, 2)
    ext = extend_spread(s)
    assert ext.v == 7 and ext.k == 2
    assert ext.size == s.size + 2**5
    assert ext.size == multicomponent(2, 7, 2).size
    assert verify_partial_spread(ext).ok
    assert spread_holes(ext).size == spread_holes(s).size


# ---------------------------------------------------------------------------
# field-reduction spreads


def test_field_reduction_spread_dimension_four():
    s = spread_field_reduction(3, 2, 2)
    assert s.size == gaussian_binomial(2, 1, 9) == 10
    assert verify_partial_spread(s).ok
    # a perfect spread covers every point exactly once
    report = verify_vsp(s.field, s.v, s.members)
    assert report.ok
    assert report.type_vector == {2: 10}
    # frozen member: the full nonzero-vector list of the line generated by
    # (1, x+1) over the order-9 field, written over the basis (1, x)
    member_vectors = {
        (1, 0, 1, 1),
        (2, 0, 2, 2),
        (0, 1, 2, 1),
        (1, 1, 0, 2),
        (2, 1, 1, 0),
        (0, 2, 1, 2),
        (1, 2, 2, 0),
        (2, 2, 0, 1),
    }
    # independent oracle: expand the generator by hand through the field
    from qspread.gf import extension_field

    ext = extension_field(3, 2)
    gen = (1, ext.from_coeffs((1, 1)))  # the pair (1, x+1)
    expanded = set()
    for alpha in range(1, 9):
        pair = (ext.mul(alpha, gen[0]), ext.mul(alpha, gen[1]))
        expanded.add(ext.coeffs(pair[0]) + ext.coeffs(pair[1]))
    assert expanded == member_vectors

    field = s.field
    found = False
    for member in s.members:
        nonzero = set()
        for p in member.points():
            for c in range(1, 3):
                nonzero.add(tuple(field.mul(c, x) for x in p))
        if nonzero == member_vectors:
            found = True
    assert found


def test_field_reduction_spread_binary():
    s = spread_field_reduction(2, 3, 2)
    assert s.size == gaussian_binomial(2, 1, 8) == 9
    assert verify_vsp(s.field, s.v, s.members).ok
    assert spread_holes(s).size == 0


def test_field_reduction_rejects_single_block():
    with pytest.raises(ParameterMismatch):
        spread_field_reduction(2, 3, 1)


# ---------------------------------------------------------------------------
# verification reports


def test_verify_catches_overlap():
    s = multicomponent(2, 5, 2)
    bad = PartialSpread(s.field, s.v, s.k, s.members + (s.members[0],))
    report = verify_partial_spread(bad)
    assert not report.ok
    assert any(v[0] == "intersection" for v in report.violations)


def test_verify_vsp_plane_and_line():
    field = field_new(2)
    from qspread.geometry import Subspace

    plane = Subspace.from_rows(field, 5, [(1, 0, 0, 0, 0), (0, 1, 0, 0, 0), (0, 0, 1, 0, 0)])
    line = Subspace.from_rows(field, 5, [(0, 0, 0, 1, 0), (0, 0, 0, 0, 1)])
    report = verify_vsp(field, 5, [plane, line])
    assert report.ok
    assert report.type_vector == {3: 1, 2: 1, 1: 31 - 7 - 3}

    # in dimension 4 a plane and a line always share a point
    plane4 = Subspace.from_rows(field, 4, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)])
    line4 = Subspace.from_rows(field, 4, [(0, 0, 1, 1), (0, 0, 0, 1)])
    bad = verify_vsp(field, 4, [plane4, line4])
    assert not bad.ok
    assert bad.violations


# ---------------------------------------------------------------------------
# exact search oracles


def test_exact_maximum_small_cases():
    # frozen from the backtracking search; the dimension-4 value is also
    # forced by the closed formula for t=1 remainders
    assert maximum_partial_spread_size(2, 4, 2) == 5
    assert maximum_partial_spread_size(2, 5, 2) == 9
