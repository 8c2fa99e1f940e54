
import pytest
from hypothesis import given, strategies as st

from dominograph import words
from dominograph.words import (Word, count_lyndon, count_lyndon_bruteforce,
                               count_lyndon_total, enumerate_necklaces,
                               enumerate_words, is_lyndon, lyndon_subword,
                               moebius, period, rotate, trace)

import oracles


def W(s, q=2):
    return Word.parse(s, q)


@st.composite
def word_st(draw, max_q=5, max_len=9):
    q = draw(st.integers(2, max_q))
    syms = draw(st.lists(st.integers(0, q - 1), min_size=1, max_size=max_len))
    return Word(tuple(syms), q)


def test_trace_examples():
    assert trace(W("011011")) == 0
    assert trace(W("000000")) == 0
    assert trace(W("123", 4)) == 2


def test_rotate_examples():
    assert rotate(W("011011")) == W("110110")
    assert rotate(W("000000")) == W("000000")
    assert rotate(W("0001")) == W("0010")


def test_period_examples():
    assert period(W("011011")) == 3
    assert period(W("000000")) == 1
    assert period(W("010101")) == 2


def test_lyndon_subword_examples():
    assert lyndon_subword(W("011011")) == W("011")
    assert lyndon_subword(W("110110")) == W("011")
    assert lyndon_subword(W("001101")) == W("001101")


def test_is_lyndon_examples():
    assert is_lyndon(W("000011"))
    assert is_lyndon(W("000001"))
    assert not is_lyndon(W("011011"))
    assert is_lyndon(W("0"))


def test_enumerate_words_examples():
    assert enumerate_words(1, 2, 0) == [W("0")]
    assert len(enumerate_words(6, 2, 0)) == 32
    assert enumerate_words(2, 3, 1) == [W("01", 3), W("10", 3), W("22", 3)]


TABLE_TRACE0 = [("000000", 1, "0"), ("000011", 6, "000011"), ("000101", 6, "000101"),
                ("001001", 3, "001"), ("001111", 6, "001111"), ("010111", 6, "010111"),
                ("011011", 3, "011"), ("111111", 1, "1")]
TABLE_TRACE1 = [("000001", 6, "000001"), ("000111", 6, "000111"), ("001011", 6, "001011"),
                ("001101", 6, "001101"), ("010101", 2, "01"), ("011111", 6, "011111")]


@pytest.mark.parametrize("t,rows", [(0, TABLE_TRACE0), (1, TABLE_TRACE1)])
def test_binary_necklaces_of_length_six(t, rows):
    got = [(str(nk.canonical), nk.period, str(nk.lyndon_subword))
           for nk in enumerate_necklaces(6, 2, t)]
    assert got == rows


@pytest.mark.parametrize("q", [2, 3, 7])
def test_length_one_has_single_necklace(q):
    for t in range(q):
        [nk] = enumerate_necklaces(1, q, t)
        assert nk.canonical == Word((t,), q) and nk.period == 1


def test_moebius_examples():
    assert [moebius(d) for d in (1, 6, 12)] == [1, 1, 0]


def test_moebius_against_factorisation_oracle():
    for d in range(1, 300):
        assert moebius(d) == oracles.moebius(d)


def test_count_lyndon_examples():
    assert count_lyndon(6, 2, 1) == 5
    assert count_lyndon(6, 2, 0) == 4
    for q in (2, 3, 10):
        for t in range(q):
            assert count_lyndon(1, q, t) == 1


def test_bruteforce_examples():
    assert count_lyndon_bruteforce(6, 2, 1) == 5
    assert count_lyndon_bruteforce(6, 2, 0) == 4
    assert count_lyndon_bruteforce(2, 2, 0) == 0


def test_bruteforce_work_limit():
    with pytest.raises(words.WorkLimitExceeded):
        count_lyndon_bruteforce(20, 3, 0, work_limit=1000)


@pytest.mark.parametrize("n,q", [(n, q) for q in (2, 3, 4) for n in range(1, 8)
                                 if q ** n <= 5000])
def test_count_lyndon_matches_orbit_oracle(n, q):
    for t in range(q):
        assert count_lyndon(n, q, t) == oracles.lyndon_count(n, q, t)


@pytest.mark.parametrize("n,q", [(n, q) for q in range(2, 8) for n in range(1, 13)
                                 if q ** n <= 10**5])
def test_total_over_traces_is_classical_count(n, q):
    total = sum(count_lyndon(n, q, t) for t in range(q))
    assert total == count_lyndon_total(n, q)
    assert total == sum(count_lyndon_bruteforce(n, q, t) for t in range(q))


def test_count_is_exact_for_large_parameters():
    # far beyond float precision; divisibility is checked internally
    n, q = 60, 7
    assert sum(count_lyndon(n, q, t) for t in range(q)) == count_lyndon_total(n, q)


@pytest.mark.parametrize("bad", [(0, 2, 0), (3, 1, 0), (3, 2, 2), (3, 2, -1)])
def test_parameter_errors(bad):
    with pytest.raises(words.ParameterError):
        enumerate_words(*bad)
    with pytest.raises(words.ParameterError):
        count_lyndon(*bad)


def test_word_rejects_bad_symbols():
    with pytest.raises(words.ParameterError):
        Word((0, 2), 2)
    with pytest.raises(words.ParameterError):
        Word((), 2)


def test_word_text_round_trip_large_alphabet():
    w = Word((3, 11, 0), 12)
    assert str(w) == "3,11,0"
    assert Word.parse(str(w), 12) == w


@given(word_st())
def test_rotation_has_order_dividing_length(w):
    assert rotate(w, len(w)) == w
    assert rotate(w, period(w)) == w
    assert len(w) % period(w) == 0


@given(word_st())
def test_rotation_preserves_symbols(w):
    r = rotate(w)
    assert sorted(r.symbols) == sorted(w.symbols) and trace(r) == trace(w)


@given(word_st())
def test_lyndon_subword_properties(w):
    b = lyndon_subword(w)
    assert len(b) == period(w)
    assert is_lyndon(b)
    power = Word(b.symbols * (len(w) // len(b)), w.q)
    assert w in [rotate(power, k) for k in range(len(w))]


@given(word_st(max_len=7))
def test_is_lyndon_matches_definition(w):
    rots = oracles.rotations(w.symbols)
    expected = all(w.symbols < r for r in rots[1:])
    assert is_lyndon(w) == expected


@pytest.mark.parametrize("n,q", [(n, q) for q in (2, 3, 4, 5) for n in range(1, 8)
                                 if q ** n <= 20000])
def test_necklaces_partition_words(n, q):
    for t in range(q):
        nks = enumerate_necklaces(n, q, t)
        classes = oracles.necklace_classes(n, q, t)
        assert [nk.canonical.symbols for nk in nks] == sorted(classes)
        assert sum(nk.period for nk in nks) == q ** (n - 1)
        for nk in nks:
            assert nk.period == len(classes[nk.canonical.symbols])
            assert period(nk.canonical) == nk.period
            assert is_lyndon(nk.lyndon_subword)
            reps = len(nk.canonical) // nk.period
            assert nk.canonical.symbols == nk.lyndon_subword.symbols * reps
            assert all(nk.canonical.symbols <= r
                       for r in oracles.rotations(nk.canonical.symbols))


def test_enumerate_words_is_sorted_and_complete():
    for n, q in [(3, 3), (4, 2), (2, 5)]:
        for t in range(q):
            got = [w.symbols for w in enumerate_words(n, q, t)]
            assert got == sorted(oracles.all_words(n, q, t))
