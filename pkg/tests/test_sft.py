import numpy as np
import pytest

from randombeta.partition import Regions
from randombeta.pipeline import build_pipeline
from randombeta.sft import (InadmissibleWord, NotPrimitive, SftCoding, WordTooShort, check_primitive,
                            decode_omega, decode_point, full_two_shift)
from test_partition import CLASS_B_FIELDS


def _smallest_positive_power(A):
    A = np.asarray(A, dtype=object)
    P = A.copy()
    for m in range(1, A.shape[0] ** 2 + 1):
        if all(x > 0 for x in P.flat):
            return m
        P = P.dot(A)
    return None


def test_golden_adjacency_and_labels(gold):
    sft = gold.sft
    assert sft.adjacency.tolist() == [[1, 1, 0], [1, 0, 1], [0, 1, 1]]
    assert sft.digit_label == {(0, 0): 0, (0, 1): 0, (1, 0): 1, (1, 2): 0, (2, 1): 1, (2, 2): 1}
    assert sft.switch_states == (1,)


@pytest.mark.parametrize("minpoly,interval", CLASS_B_FIELDS)
def test_structure(minpoly, interval):
    sft = build_pipeline(minpoly, interval, 100_000).sft
    K = sft.K
    assert sft.adjacency[0, 0] == 1 and sft.adjacency[K, K] == 1
    for s in sft.switch_states:
        assert np.nonzero(sft.adjacency[s])[0].tolist() == [0, K]
    for j in range(sft.n_states):
        assert sft.incoming_digits(j) == list(range(sft.n_digits))
    assert check_primitive(sft) == _smallest_positive_power(sft.adjacency)


def test_golden_primitive_exponent(gold):
    A = gold.sft.adjacency.astype(int)
    assert (A @ A > 0).all()
    assert not (A > 0).all()
    assert check_primitive(gold.sft) == 2


def test_primitive_trivial_and_reducible():
    assert check_primitive(np.ones((1, 1))) == 1
    with pytest.raises(NotPrimitive):
        check_primitive(np.array([[1, 0], [0, 1]]))
    with pytest.raises(NotPrimitive):
        check_primitive(np.array([[0, 1], [1, 0]]))


def test_out_degree_matches_image(quart):
    part, sft = quart.partition, quart.sft
    for i, lab in enumerate(part.labels):
        if lab.kind == "digit":
            cols, _ = part.image_cells(i, lab.value)
            assert sft.adjacency[i].sum() == len(cols)
        else:
            assert sft.adjacency[i].sum() == 2


def test_words_are_admissible_and_complete(quart):
    sft = quart.sft
    words = sft.words(4)
    assert all(sft.is_admissible(w) for w in words)
    A = sft.adjacency.astype(np.int64)
    assert len(words) == np.linalg.matrix_power(A, 3).sum()
    assert len({tuple(w) for w in words}) == len(words)


def test_digits_depend_on_pairs(gold):
    sft = gold.sft
    w = [0, 1, 2, 2, 1, 0, 0]
    assert sft.word_digits(w).tolist() == [sft.digit_label[(a, b)] for a, b in zip(w[:-1], w[1:])]


def test_decode_zero_word(gold):
    ctx = gold.ctx
    for n in (2, 5, 9):
        lo, hi = decode_point(gold.sft, [0] * n)
        assert lo == ctx.zero
        assert hi == ctx.beta * ctx.beta ** (-(n - 1))


def test_decode_top_word_shrinks_to_beta(gold):
    ctx = gold.ctx
    for n in (3, 8, 15):
        lo, hi = decode_point(gold.sft, [2] * n)
        assert lo <= ctx.beta <= hi
        assert hi - lo == ctx.beta ** (-(n - 2))


def test_decode_switch_then_zeros(gold):
    ctx = gold.ctx
    widths = []
    for n in (3, 6, 10):
        lo, hi = decode_point(gold.sft, [1] + [0] * (n - 1))
        assert lo == 1 / ctx.beta
        widths.append(float(hi - lo))
    assert widths == sorted(widths, reverse=True)


def test_decode_errors(gold):
    with pytest.raises(WordTooShort):
        decode_point(gold.sft, [0])
    with pytest.raises(InadmissibleWord):
        decode_point(gold.sft, [0, 2])


def test_decode_omega(gold):
    assert decode_omega(gold.sft, [1, 0]) == (1,)
    assert decode_omega(gold.sft, [1, 2]) == (0,)
    assert decode_omega(gold.sft, [0, 0, 0]) == ()
    assert decode_omega(gold.sft, [1, 0, 1, 2, 1, 0]) == (1, 0, 1)


@pytest.mark.parametrize("n", [2, 4, 7])
def test_enclosures_sit_in_first_cell(quart, n):
    """Every cylinder decodes inside the cell of its first state, and the
    map's digit there (with the recorded coin) is the first coded digit."""
    part, sft = quart.partition, quart.sft
    reg = Regions.of(quart.ctx)
    for w in sft.words(n)[:: max(1, len(sft.words(n)) // 400)]:
        w = w.tolist()
        lo, hi = decode_point(sft, w, tight=True)
        cell = part.cells[w[0]]
        assert cell.lo <= lo and hi <= cell.hi
        kind, k = reg.classify((lo + hi) / 2)
        if kind == "E":
            assert sft.digit_label[(w[0], w[1])] == k
        else:
            bit = decode_omega(sft, w)[0]
            assert sft.digit_label[(w[0], w[1])] == (k if bit else k - 1)


def test_full_two_shift():
    sft = full_two_shift()
    assert isinstance(sft, SftCoding)
    assert sft.has_incoming_digit_bijection()
    assert check_primitive(sft) == 1
    assert sft.words(3).shape == (8, 3)


def test_sft_json(gold):
    data = gold.sft.to_json()
    assert data["switch_states"] == [1]
    assert {"from": 1, "to": 0, "digit": 1} in data["digit_labels"]
