import pytest
from hypothesis import given, strategies as st

from ringqec.codes import LINEAR_BASES
from ringqec.pauli import (
    DimensionError,
    PauliOperator,
    PauliParseError,
    commutes,
    gf2_rank,
    multiply,
    parse_pauli,
    product,
    ring_span,
    rotate,
    support_span,
    weight,
)

from .oracle import commute_strings, multiply_strings, roll


def paulis(n=None):
    sizes = st.just(n) if n else st.integers(1, 80)
    return sizes.flatmap(lambda k: st.text("IXYZ", min_size=k, max_size=k))


def same_length_pair():
    return st.integers(1, 70).flatmap(
        lambda k: st.tuples(*[st.text("IXYZ", min_size=k, max_size=k)] * 3))


def test_parse_d3_base():
    p = parse_pauli("ZXXZI")
    assert p.n == 5
    # position 0 is bit 0: x_bits = 01100 read left to right
    assert [(p.x >> k) & 1 for k in range(5)] == [0, 1, 1, 0, 0]
    assert [(p.z >> k) & 1 for k in range(5)] == [1, 0, 0, 1, 0]


def test_parse_identity_and_y():
    assert parse_pauli("IIIII").is_identity
    y = parse_pauli("Y")
    assert (y.n, y.x, y.z) == (1, 1, 1)


@pytest.mark.parametrize("text,pos", [("IXQZ", 2), ("x", 0), ("ZZZ ", 3)])
def test_parse_rejects_bad_letter(text, pos):
    with pytest.raises(PauliParseError, match=f"position {pos}"):
        parse_pauli(text)


def test_parse_rejects_empty():
    with pytest.raises(PauliParseError):
        parse_pauli("")


@given(paulis())
def test_str_roundtrip(s):
    assert str(parse_pauli(s)) == s


def test_multiply_letters():
    assert str(multiply(parse_pauli("X"), parse_pauli("Z"))) == "Y"
    a = parse_pauli("XYZIZ")
    assert multiply(a, a).is_identity


def test_product_of_d3_generators_is_identity():
    g0 = parse_pauli(LINEAR_BASES[3])
    assert product((rotate(g0, i) for i in range(5)), 5).is_identity


def test_dimension_errors():
    with pytest.raises(DimensionError):
        multiply(parse_pauli("X"), parse_pauli("XX"))
    with pytest.raises(DimensionError):
        commutes(parse_pauli("X"), parse_pauli("XX"))
    with pytest.raises(DimensionError):
        gf2_rank([parse_pauli("X"), parse_pauli("XX")])


def test_commutes_examples():
    assert not commutes(parse_pauli("X"), parse_pauli("Z"))
    assert commutes(parse_pauli("XYZ"), parse_pauli("III"))
    x0 = parse_pauli("XIIII")
    assert not commutes(x0, parse_pauli("ZXXZI"))
    assert commutes(x0, parse_pauli("IZXXZ"))


def test_weight_and_span():
    g = parse_pauli(LINEAR_BASES[5])
    assert (weight(g), support_span(g)) == (4, 6)
    ident = PauliOperator.identity(7)
    assert (weight(ident), support_span(ident)) == (0, 0)
    g11 = parse_pauli(LINEAR_BASES[11])
    assert (weight(g11), support_span(g11)) == (10, 18)


def test_rotate_examples():
    a = parse_pauli("ZXXZI")
    assert str(rotate(a, 1)) == "IZXXZ"
    assert rotate(a, 5) == a
    assert rotate(rotate(a, 1), 4) == a
    assert rotate(a, -1) == rotate(a, 4)


def test_gf2_rank_examples():
    g3 = parse_pauli(LINEAR_BASES[3])
    assert gf2_rank([rotate(g3, i) for i in range(5)]) == 4
    assert gf2_rank([PauliOperator.identity(3)]) == 0
    assert gf2_rank([]) == 0
    g5 = parse_pauli(LINEAR_BASES[5])
    assert gf2_rank([rotate(g5, i) for i in range(13)]) == 12


def test_wide_registers_are_not_capped():
    s = "X" + "I" * 198 + "Z"
    p = parse_pauli(s)
    assert p.n == 200 and weight(p) == 2 and support_span(p) == 200
    assert ring_span(p) == 2
    assert str(rotate(p, 1)) == "Z" + "X" + "I" * 198


# ---- properties ---------------------------------------------------------

@given(same_length_pair())
def test_multiply_matches_string_oracle(abc):
    a, b, _ = abc
    assert str(multiply(parse_pauli(a), parse_pauli(b))) == multiply_strings(a, b)


@given(same_length_pair())
def test_commutes_matches_string_oracle_and_is_symmetric(abc):
    a, b, _ = abc
    pa, pb = parse_pauli(a), parse_pauli(b)
    assert commutes(pa, pb) == commute_strings(a, b) == commutes(pb, pa)


@given(same_length_pair())
def test_group_laws(abc):
    a, b, c = (parse_pauli(s) for s in abc)
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * PauliOperator.identity(a.n) == a
    assert (a * a).is_identity


@given(same_length_pair())
def test_syndrome_linearity(abc):
    g, a, b = (parse_pauli(s) for s in abc)
    assert commutes(g, a * b) == (commutes(g, a) == commutes(g, b))


@given(paulis(), st.integers(-200, 200))
def test_rotate_matches_roll_and_preserves_weight(s, k):
    p = parse_pauli(s)
    r = rotate(p, k)
    assert str(r) == roll(s, k)
    assert weight(r) == weight(p)
    assert ring_span(r) == ring_span(p)


@given(st.integers(2, 12).flatmap(
    lambda n: st.lists(st.text("IXYZ", min_size=n, max_size=n), min_size=1, max_size=8)),
    st.randoms())
def test_rank_invariant_under_reorder_and_row_xor(rows, rnd):
    ops = [parse_pauli(s) for s in rows]
    base = gf2_rank(ops)
    shuffled = ops[:]
    rnd.shuffle(shuffled)
    assert gf2_rank(shuffled) == base
    if len(ops) > 1:
        i, j = rnd.sample(range(len(ops)), 2)
        mixed = ops[:]
        mixed[i] = ops[i] * ops[j]
        assert gf2_rank(mixed) == base
