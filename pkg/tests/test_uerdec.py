import numpy as np
import pytest

from msrcodes.errors import DecodingAmbiguityError, IntegrityError
from msrcodes.gf import prime_field
from msrcodes.uerdec import InnerCodeView, decode_columnar, decode_scalar

F = prime_field(13)


def grs_word(view, rng, free):
    """Random codeword: pick ``free`` positions at random and fill the rest."""
    known = {p: F.random(rng, view.points.shape[0]) for p in range(free)}
    word = dict(known)
    word.update(view.fill(known, list(range(free, view.length))))
    return word


@pytest.fixture
def view():
    pts = np.array([[1, 2, 3, 4, 5, 6, 7, 8], [2, 3, 5, 7, 11, 12, 4, 9]])
    return InnerCodeView(F, pts, 5)


def test_fill_gives_codeword(view):
    w = grs_word(view, np.random.default_rng(0), 3)
    assert not view.syndromes(w).any()
    assert view.dimension == 3


def test_correct_one_error_with_erasures(view):
    rng = np.random.default_rng(1)
    w = grs_word(view, rng, 3)
    obs = {p: w[p].copy() for p in range(1, 8)}  # position 0 erased
    obs[4] = (obs[4] + np.array([1, 0])) % 13
    res = decode_scalar(view, obs, 1)
    assert res.error_positions == [4]
    assert all(np.array_equal(res.word[p], w[p]) for p in range(8))
    assert res.attempts == 7


def test_zero_errors_no_flag(view):
    w = grs_word(view, np.random.default_rng(2), 3)
    res = decode_columnar(view, {p: w[p] for p in range(8)}, 2)
    assert res.error_positions == []


def test_too_many_errors_detected(view):
    rng = np.random.default_rng(3)
    w = grs_word(view, rng, 3)
    obs = {p: w[p].copy() for p in range(1, 8)}
    obs[2] = (obs[2] + 3) % 13
    obs[6] = (obs[6] + 5) % 13
    with pytest.raises(IntegrityError) as info:
        decode_scalar(view, obs, 1)
    assert info.value.slot in (0, 1)


def test_ambiguity_is_an_error():
    # single parity check and e = 1: distrusting any position "fixes" the
    # word, so several distinct codewords pass
    pts = np.array([[1, 2, 3, 4]])
    v = InnerCodeView(F, pts, 1)
    obs = {0: np.array([1]), 1: np.array([2]), 2: np.array([3]), 3: np.array([5])}
    with pytest.raises(DecodingAmbiguityError):
        decode_scalar(v, obs, 1)
    assert issubclass(DecodingAmbiguityError, IntegrityError)


def test_budget_validation(view):
    with pytest.raises(ValueError):
        decode_scalar(view, {0: np.zeros(2), 1: np.zeros(2)}, 1)
    with pytest.raises(ValueError):
        decode_scalar(view, {9: np.zeros(2)}, 0)
