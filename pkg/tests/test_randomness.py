"""Pinned word streams and derived-draw behavior for RandomStream."""

import pytest

from spanforest import RandomStream

# Raw Philox 4x64 words for fixed (seed, stream_id) keys.  These pin the
# randomness contract: any change to the generator or its keying will show up
# here before it silently invalidates every frozen statistical test.
TEST_VECTORS = {
    (0, 0): [
        213000021201967259,
        4455796210202625458,
        2055444239878205049,
        10411612076246414556,
        9267267987884836803,
        5120919030223861725,
    ],
    (42, 0): [
        15129985323320379406,
        3490965594592278910,
        16005516994917231875,
        7278743398533373529,
        6790771320172045267,
        8014118860574412892,
    ],
    (42, 1): [
        8185685891515899014,
        15059776042128308896,
        9389875783783897555,
        7150301906005111658,
        460939658631947834,
        6411774971874730165,
    ],
    (2**63, 2**64 - 1): [
        143192399589754107,
        2881363993528686246,
        18253949746970807225,
        5770660007208098223,
        17091998484260502552,
        11003066924861449188,
    ],
}


def test_word_stream_matches_pinned_vectors():
    for (seed, sid), expected in TEST_VECTORS.items():
        rs = RandomStream(seed, sid)
        assert rs.words(len(expected)) == expected


def test_derived_draws_are_pinned():
    rs = RandomStream(12345)
    assert [rs.randint(20) for _ in range(12)] == [12, 15, 15, 3, 3, 16, 18, 1, 16, 13, 0, 19]
    rs = RandomStream(12345)
    draws = [rs.random() for _ in range(4)]
    assert draws[0] == pytest.approx(0.646380188423, abs=1e-12)
    assert all(0.0 <= x < 1.0 for x in draws)


def test_same_key_reproduces_and_streams_differ():
    a = RandomStream(99, 5)
    b = RandomStream(99, 5)
    c = RandomStream(99, 6)
    seq_a = [a.randint(1000) for _ in range(50)]
    seq_b = [b.randint(1000) for _ in range(50)]
    seq_c = [c.randint(1000) for _ in range(50)]
    assert seq_a == seq_b
    assert seq_a != seq_c


def test_buffer_refill_is_seamless():
    # draw across several refill boundaries and compare against a fresh
    # stream consumed in a single words() call
    n = 20000
    a = RandomStream(7)
    words = a.words(n)
    b = RandomStream(7)
    again = [b.next_word() for _ in range(n)]
    assert words == again


def test_randint_bounds_and_errors():
    rs = RandomStream(1)
    assert all(0 <= rs.randint(7) < 7 for _ in range(200))
    with pytest.raises(ValueError):
        rs.randint(0)
    with pytest.raises(ValueError):
        RandomStream(-1)
    with pytest.raises(ValueError):
        RandomStream(0, 2**64)


def test_substream_independence():
    base = RandomStream(3, 2)
    s0 = base.substream(0)
    s1 = base.substream(1)
    assert s0.stream_id != s1.stream_id
    assert s0.words(4) != s1.words(4)


def test_shuffle_and_choice_deterministic():
    rs = RandomStream(55)
    items = list(range(10))
    rs.shuffle(items)
    assert sorted(items) == list(range(10))
    rs2 = RandomStream(55)
    items2 = list(range(10))
    rs2.shuffle(items2)
    assert items == items2
    assert rs.choice(["a", "b", "c"]) in {"a", "b", "c"}
