"""Token encoding: pinned examples, injectivity, error paths."""

import numpy as np
import pytest

from initnet.data import CANONICAL_FUNCTIONS, Limits, Sample
from initnet.encoding import encode_pair, encode_sample, encode_value, program_indices

LIM = Limits()
PAD = LIM.pad_token


def test_constants():
    assert LIM.num_values == 201
    assert PAD == 201
    assert LIM.tokens_per_value == 12


def test_int_encoding_pinned():
    assert encode_value(5, LIM) == [1, 0, 105] + [PAD] * 9
    assert encode_value(-100, LIM) == [1, 0, 0] + [PAD] * 9
    assert encode_value(100, LIM) == [1, 0, 200] + [PAD] * 9


def test_list_encoding_pinned():
    assert encode_value([-100], LIM) == [0, 1, 0] + [PAD] * 9
    assert encode_value([0, 1, 2], LIM) == [0, 1, 100, 101, 102] + [PAD] * 7
    full = list(range(10))
    assert encode_value(full, LIM) == [0, 1] + [100 + v for v in full]


def test_pair_is_24_tokens():
    seq = encode_pair([1, 2], 3, LIM)
    assert len(seq) == 24
    assert seq[:12] == encode_value([1, 2], LIM)
    assert seq[12:] == encode_value(3, LIM)


def test_pad_never_a_real_index():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(1, 11))
        v = [int(x) for x in rng.integers(-100, 101, size=n)]
        tokens = encode_value(v, LIM)
        assert all(t != PAD for t in tokens[:2 + n])
        assert all(t == PAD for t in tokens[2 + n:])


def test_injective_on_random_values():
    rng = np.random.default_rng(1)
    seen = {}
    for _ in range(2000):
        if rng.random() < 0.3:
            v = int(rng.integers(-100, 101))
        else:
            v = [int(x) for x in rng.integers(-100, 101,
                                              size=int(rng.integers(1, 11)))]
        key = tuple(encode_value(v, LIM))
        canon = ("int", v) if isinstance(v, int) else ("list", tuple(v))
        assert seen.setdefault(key, canon) == canon
    assert len({tuple(encode_value(v, LIM)) for v in ([0], 0, [0, 0])}) == 3


def test_errors():
    with pytest.raises(ValueError, match="null"):
        encode_value(None, LIM)
    with pytest.raises(ValueError, match="outside"):
        encode_value(101, LIM)
    with pytest.raises(ValueError, match="outside"):
        encode_value([0, -101], LIM)
    with pytest.raises(ValueError, match="length"):
        encode_value(list(range(11)), LIM)
    with pytest.raises(ValueError, match="length"):
        encode_value([], LIM)
    with pytest.raises(ValueError, match="encodable"):
        encode_value(True, LIM)


def test_encode_sample_shape():
    sample = Sample(observed=[([1, 2], 3), ([4], 5)], assessment=[],
                    program=("head", "plus1"), length=2, noise=0.0)
    arr = encode_sample(sample, LIM)
    assert arr.shape == (2, 24)
    assert arr.dtype == np.int64


def test_program_indices_round_trip():
    assert program_indices(CANONICAL_FUNCTIONS) == list(range(12))
    assert program_indices(("div4", "head")) == [11, 0]
