import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ybhom.biquandle import (
    AxiomError,
    alexander_parameters,
    from_tables,
    make_alexander,
    make_cyclic,
    search_yb_operators,
    translation_symmetry,
)
from ybhom.chain_complex import (
    Variant,
    boundary_matrix,
    boundary_rank,
    chain_basis,
    character_blocks,
    decode,
    encode,
    expected_degenerate_rank,
    face_left,
    face_right,
    inject_face_fault,
    is_degenerate,
)
from ybhom.intlinalg import rank


# literal-composition oracle: apply R to adjacent positions as maps on X^{n+1}


def apply_at(R, t, j):
    """R acting on positions (j, j+1) of the tuple, 0-based, identity elsewhere."""
    t = list(t)
    t[j], t[j + 1] = R(t[j], t[j + 1])
    return tuple(t)


def oracle_left(R, i, t):
    # move x_i to the front through R at (i-1, i), (i-2, i-1), ..., (1, 2); drop it
    for j in range(i - 2, -1, -1):
        t = apply_at(R, t, j)
    return t[1:]


def oracle_right(R, i, t):
    # move x_i to the back through R at (i, i+1), ..., (n, n+1); drop it
    for j in range(i - 1, len(t) - 1):
        t = apply_at(R, t, j)
    return t[:-1]


def oracle_boundary(R, m, n):
    """Dense boundary matrix from the oracle faces, rows and columns in code order."""
    if n == 1:
        return [[] for _ in range(0)], m
    out = [[0] * m**n for _ in range(m ** (n - 1))]
    for code in range(m**n):
        t = decode(code, m, n)
        for i in range(1, n + 1):
            s = (-1) ** (i - 1)
            out[encode(oracle_left(R, i, t), m)][code] += s
            out[encode(oracle_right(R, i, t), m)][code] -= s
    return out


def test_face_examples():
    C5 = make_cyclic(5)
    A = make_alexander(4, 3, 3)
    assert face_left(C5, 2, (1, 3, 4)) == (0, 4)
    assert face_left(A, 1, (1, 3, 4)) == (3, 4)
    assert face_left(A, 2, (1, 2, 3)) == oracle_left(A, 2, (1, 2, 3)) == (3, 3)
    assert face_right(C5, 2, (1, 3, 4)) == (1, 0)
    assert face_right(A, 3, (1, 3, 4)) == (1, 3)
    assert face_right(A, 1, (1, 2, 3)) == oracle_right(A, 1, (1, 2, 3)) == (0, 3)
    with pytest.raises(IndexError):
        face_left(C5, 4, (1, 2, 3))
    with pytest.raises(IndexError):
        face_right(C5, 0, (1, 2, 3))


@pytest.mark.parametrize("m", range(1, 6))
@pytest.mark.parametrize("n", range(1, 6))
def test_cyclic_closed_forms(m, n):
    B = make_cyclic(m)
    for t in itertools.product(range(m), repeat=n + 1):
        for i in range(1, n + 2):
            left = tuple((x - 1) % m for x in t[: i - 1]) + t[i:]
            right = t[: i - 1] + tuple((x + 1) % m for x in t[i:])
            assert face_left(B, i, t) == left
            assert face_right(B, i, t) == right


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(m, s, t) for m in range(2, 9) for s, t in alexander_parameters(m)]), st.data())
def test_faces_match_literal_composition(params, data):
    m, s, t = params
    R = make_alexander(m, s, t)
    n = data.draw(st.integers(1, 5))
    tup = tuple(data.draw(st.lists(st.integers(0, m - 1), min_size=n + 1, max_size=n + 1)))
    i = data.draw(st.integers(1, n + 1))
    assert face_left(R, i, tup) == oracle_left(R, i, tup)
    assert face_right(R, i, tup) == oracle_right(R, i, tup)


def test_encode_decode_bijection():
    for m, n in [(1, 3), (2, 4), (3, 3), (5, 2)]:
        codes = [encode(decode(c, m, n), m) for c in range(m**n)]
        assert codes == list(range(m**n))
    assert encode((1, 0, 2), 3) == 1 * 9 + 0 * 3 + 2


def test_is_degenerate_examples():
    assert is_degenerate(make_cyclic(2), (1, 0))
    assert not is_degenerate(make_cyclic(4), (3,))
    assert not is_degenerate(make_cyclic(3), (0, 1, 2))


def test_boundary_examples():
    B = make_cyclic(2)
    d2 = boundary_matrix(B, 2)
    assert d2.to_dense() == [[2, 0, 0, -2], [-2, 0, 0, 2]]
    assert d2.to_dense() == oracle_boundary(B, 2, 2)
    d1 = boundary_matrix(make_cyclic(3), 1)
    assert d1.shape == (0, 3)
    assert len(chain_basis(B, 3, "D")) == 2**3 - 2 * 1**2 == 6


@pytest.mark.parametrize("m,n", [(2, 3), (3, 3), (3, 4), (4, 3)])
def test_yb_boundary_matches_oracle(m, n):
    for B in (make_cyclic(m),) + tuple(make_alexander(m, s, t) for s, t in alexander_parameters(m)):
        assert boundary_matrix(B, n).to_dense() == oracle_boundary(B.map, m, n)


@pytest.mark.parametrize("m", range(1, 6))
def test_degenerate_basis_size(m):
    B = make_cyclic(m)
    for n in range(1, 6):
        if m**n > 4000:
            break
        D = chain_basis(B, n, "D")
        N = chain_basis(B, n, "NYB")
        assert len(D) == expected_degenerate_rank(m, n)
        assert sorted(np.concatenate([D.generators, N.generators]).tolist()) == list(range(m**n))
        if n < 2:
            assert len(D) == 0 and len(N) == m**n


def composite_vanishes(R, n, variant="YB"):
    return (boundary_matrix(R, n - 1, variant) @ boundary_matrix(R, n, variant)).is_zero()


@pytest.mark.parametrize("m", range(1, 6))
@pytest.mark.parametrize("variant", ["YB", "D", "NYB"])
def test_square_zero_cyclic(m, variant):
    for n in range(2, 6):
        if m**n > 4000:
            break
        assert composite_vanishes(make_cyclic(m), n, variant)


@pytest.mark.parametrize("m", range(2, 9))
def test_square_zero_alexander(m):
    for s, t in alexander_parameters(m):
        B = make_alexander(m, s, t)
        for n in range(2, 5):
            if m**n > 5000:
                break
            for v in ("YB", "D", "NYB"):
                assert composite_vanishes(B, n, v)


def test_square_zero_searched_operators():
    for R in search_yb_operators(20, max_size=3, seed=0):
        for n in range(2, 5):
            assert composite_vanishes(R, n)


@pytest.mark.parametrize("m", range(2, 5))
def test_block_closure(m):
    B = make_cyclic(m)
    for n in range(2, 5):
        full = boundary_matrix(B, n)
        D = chain_basis(B, n, "D")
        N = chain_basis(B, n - 1, "NYB")
        assert full.submatrix(N.generators, D.generators).is_zero()


def test_column_sparsity():
    for B in (make_cyclic(4), make_alexander(4, 3, 3)):
        for n in range(2, 5):
            d = boundary_matrix(B, n)
            counts = np.bincount(d.col_idx, minlength=d.cols)
            assert counts.max() <= 2 * n


def test_degenerate_variants_need_biquandle():
    ident = from_tables(2, [[0, 0], [1, 1]], [[0, 1], [0, 1]])
    assert boundary_matrix(ident, 2).shape == (2, 4)
    with pytest.raises(AxiomError):
        boundary_matrix(ident, 2, "D")


@pytest.mark.parametrize("m,n,variant", [(3, 3, "YB"), (4, 3, "NYB"), (5, 3, "D"), (3, 4, "NYB")])
def test_character_blocks_preserve_rank(m, n, variant):
    B = make_cyclic(m)
    p = 31 if m in (3, 5) else 29
    perm = translation_symmetry(B)
    blocks = character_blocks(B, n, variant, perm, p)
    assert len(blocks) == m
    assert sum(rank(b, p) for b in blocks) == rank(boundary_matrix(B, n, variant), p)


def test_boundary_rank_over_fields():
    B = make_cyclic(3)
    d = boundary_matrix(B, 3)
    # rank d_2 = 3 - 1 from H_1 = Z + Z_3, and then 9 - 2 - rank d_3 = 3
    assert boundary_rank(B, 3) == rank(d) == 4
    assert boundary_rank(B, 3, "YB", 3) == rank(d, 3)
    A = make_alexander(4, 3, 3)
    assert boundary_rank(A, 3, "NYB") == rank(boundary_matrix(A, 3, "NYB"))


def test_variant_parse():
    assert Variant.parse("nyb") is Variant.NYB
    with pytest.raises(ValueError):
        Variant.parse("xyz")


def test_fault_injection_changes_matrix():
    B = make_cyclic(2)
    clean = boundary_matrix(B, 2)
    with inject_face_fault():
        broken = boundary_matrix(B, 2)
    assert broken != clean
    assert boundary_matrix(B, 2) == clean
