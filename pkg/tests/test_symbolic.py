import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irclab import ValidationError
from irclab.symbolic import (
    Word,
    block_index_covering,
    chacon_block,
    chacon_L,
    chacon_language,
    chacon_length,
    chacon_orbit_window,
    chacon_text,
    chacon_window_set,
    chacon_Y_levelset,
    forbidden_distance_check,
    occurrences,
    two_sided_origin,
)


def naive_block(n):
    b = "0010"
    for _ in range(n - 1):
        b = b + b + "1" + b
    return b


def naive_starts(text, pattern):
    return [i for i in range(len(text) - len(pattern) + 1) if text[i : i + len(pattern)] == pattern]


def test_first_blocks():
    assert str(chacon_block(1)) == "0010"
    assert str(chacon_block(2)) == "0010001010010"
    assert len(chacon_block(2)) == 13
    assert len(chacon_block(4)) == 121


@pytest.mark.parametrize("n", range(1, 10))
def test_blocks_match_direct_recursion(n):
    assert chacon_text(n) == naive_block(n)
    assert chacon_length(n) == len(naive_block(n))


@given(st.integers(1, 30))
def test_length_recursion(n):
    assert chacon_length(n + 1) == 3 * chacon_length(n) + 1


@pytest.mark.parametrize("n", range(1, 9))
def test_prefix_consistency(n):
    assert chacon_text(n + 1).startswith(chacon_text(n))


def test_block_cap():
    from irclab import CapExceeded

    with pytest.raises(CapExceeded):
        chacon_block(20)
    with pytest.raises(ValidationError):
        chacon_block(0)


def test_word_validation():
    assert Word.of([0, 1, 1]).symbols == "011"
    assert Word.of("012", base=3).digits() == (0, 1, 2)
    with pytest.raises(ValidationError):
        Word("012", 2)
    with pytest.raises(ValidationError):
        Word("0", 11)


def test_occurrences_examples():
    rep = occurrences(chacon_block(2), "0010")
    assert rep.starts == (0, 4, 9)
    assert set(rep.gaps) == {4, 5}
    assert occurrences("0010", "0010").starts == (0,)
    rep3 = occurrences(chacon_block(3), "0010")
    assert rep3.starts == (0, 4, 9, 13, 17, 22, 27, 31, 36)
    assert set(rep3.gaps) <= {4, 5}


def test_occurrences_overlap_and_json():
    rep = occurrences("0000", "00")
    assert rep.starts == (0, 1, 2)
    assert rep.to_json() == {"pattern": "00", "starts": [0, 1, 2], "gaps": [1, 1], "forbidden_hits": []}


def test_pattern_longer_than_text_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = occurrences("001", "0010")
    assert rep.pattern_too_long and rep.starts == ()
    assert caught


@given(st.text(alphabet="01", min_size=1, max_size=40), st.text(alphabet="01", min_size=1, max_size=4))
def test_occurrences_match_naive_scan(text, pattern):
    if len(pattern) > len(text):
        return
    assert list(occurrences(text, pattern).starts) == naive_starts(text, pattern)


def test_forbidden_examples():
    assert forbidden_distance_check(3, "0010", [12]).forbidden_hits == ()
    hits = forbidden_distance_check(3, "0010", [13]).forbidden_hits
    assert (0, 13, 13) in hits
    assert forbidden_distance_check(1, "0010", [1, 2, 3]).forbidden_hits == ()


def test_chacon_L():
    assert chacon_L(2) == [12]
    assert chacon_L(4) == [12, 39, 120]
    assert chacon_L(1) == []


def test_orbit_window_right_infinite():
    # entries 0..8 of b_3
    assert str(chacon_orbit_window(4, 4, 3)) == naive_block(3)[0:9] == "001000101"
    for j in range(4):
        assert str(chacon_orbit_window(j, 0, 1)) == "0010"[j]
    assert chacon_orbit_window(20, 4, 3) != chacon_orbit_window(32, 4, 3)


def test_orbit_window_range_errors():
    with pytest.raises(ValidationError):
        chacon_orbit_window(2, 4, 3)
    with pytest.raises(ValidationError):
        chacon_orbit_window(38, 4, 3)


@given(st.integers(0, 2000), st.integers(0, 30))
@settings(max_examples=60)
def test_window_independent_of_embedding(j, radius):
    if j < radius:
        return
    N0 = block_index_covering(j + radius)
    w = chacon_orbit_window(j, radius)
    for N in range(N0, N0 + 2):
        assert chacon_orbit_window(j, radius, N) == w


@given(st.integers(-3000, 3000), st.integers(0, 20))
@settings(max_examples=60)
def test_two_sided_point_is_consistent(j, radius):
    w = str(chacon_orbit_window(j, radius, two_sided=True))
    N = 9
    o = two_sided_origin(N)
    assert naive_block(N)[o + j - radius : o + j + radius + 1] == w
    assert w in chacon_language(2 * radius + 1)


def test_two_sided_origin_nests_blocks():
    for N in range(2, 9):
        o, o1 = two_sided_origin(N), two_sided_origin(N + 1)
        # b_N sits as the middle copy inside b_{N+1}
        assert chacon_text(N + 1)[o1 - o : o1 - o + chacon_length(N)] == chacon_text(N)


def test_Y_levelset():
    Y1 = chacon_Y_levelset(4, 1, 4)
    assert Y1.cells == {naive_block(4)[12 - 4 : 12 + 5]}
    with pytest.raises(ValidationError):
        chacon_Y_levelset(4, 0, 4)
    # the three windows coincide: the points T^l x_C, l = 12, 39, 120 share their centre 9-block
    Y3 = chacon_Y_levelset(4, 3, 5)
    b5 = naive_block(5)
    assert Y3.cells == {b5[l - 4 : l + 5] for l in (12, 39, 120)}
    assert len(Y3) == 1


def test_window_set_needs_offsets():
    with pytest.raises(ValidationError):
        chacon_window_set(4, [], 0)


@pytest.mark.parametrize("length", range(1, 25))
def test_language_complexity(length):
    b = naive_block(7)
    direct = {b[i : i + length] for i in range(len(b) - length + 1)}
    words = chacon_language(length)
    assert words == direct
    if length >= 2:
        assert len(words) == 2 * length - 1
