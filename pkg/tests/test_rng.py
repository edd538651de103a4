"""Portability and determinism of the seeded generator."""

import pytest

from glyphbreak.rng import SplitMix64, derive_seed


def test_known_answer_stream():
    # Frozen first outputs for seed 0; any change here breaks every stored
    # experiment's reproducibility.
    rng = SplitMix64(0)
    assert [rng.next_u64() for _ in range(3)] == [
        0xE220A8397B1DCDAF,
        0x6E789E6AA1B965F4,
        0x06C45D188009454F,
    ]


def test_same_seed_same_stream():
    a = SplitMix64(987654321)
    b = SplitMix64(987654321)
    assert [a.next_u64() for _ in range(50)] == [b.next_u64() for _ in range(50)]


def test_different_seeds_diverge():
    a = SplitMix64(1)
    b = SplitMix64(2)
    assert [a.next_u64() for _ in range(5)] != [b.next_u64() for _ in range(5)]


def test_negative_and_huge_seeds_are_masked():
    assert SplitMix64(-1).next_u64() == SplitMix64(2**64 - 1).next_u64()
    assert SplitMix64(2**64).next_u64() == SplitMix64(0).next_u64()


def test_randbelow_bounds():
    rng = SplitMix64(7)
    values = [rng.randbelow(10) for _ in range(1000)]
    assert all(0 <= v < 10 for v in values)
    assert set(values) == set(range(10))


def test_randbelow_rejects_nonpositive():
    with pytest.raises(ValueError):
        SplitMix64(1).randbelow(0)


def test_random_unit_interval():
    rng = SplitMix64(3)
    values = [rng.random() for _ in range(1000)]
    assert all(0.0 <= v < 1.0 for v in values)


def test_sample_indices_properties():
    rng = SplitMix64(11)
    for _ in range(200):
        picked = rng.sample_indices(30, 7)
        assert len(picked) == 7
        assert len(set(picked)) == 7
        assert picked == sorted(picked)
        assert all(0 <= i < 30 for i in picked)


def test_sample_indices_exhaustive_and_empty():
    rng = SplitMix64(5)
    assert rng.sample_indices(4, 4) == [0, 1, 2, 3]
    assert rng.sample_indices(4, 0) == []
    with pytest.raises(ValueError):
        rng.sample_indices(3, 4)


def test_sample_indices_roughly_uniform():
    # Every index should be hit close to k/n of the time; generous bounds,
    # fixed seed, so this never flakes.
    counts = [0] * 20
    rng = SplitMix64(1234)
    trials = 4000
    for _ in range(trials):
        for i in rng.sample_indices(20, 5):
            counts[i] += 1
    expected = trials * 5 / 20
    assert all(0.8 * expected < c < 1.2 * expected for c in counts)


def test_choice_uses_every_element():
    rng = SplitMix64(9)
    seen = {rng.choice("abcd") for _ in range(200)}
    assert seen == set("abcd")
    with pytest.raises(ValueError):
        rng.choice([])


def test_derive_seed_stable_and_distinct():
    assert derive_seed(42, 7) == derive_seed(42, 7)
    assert derive_seed(42, 7) != derive_seed(42, 8)
    assert derive_seed(42, 7) != derive_seed(43, 7)
    assert derive_seed(42, "transfer") != derive_seed(42, "ranks")
    # int and str parts must not collide
    assert derive_seed(42, 7) != derive_seed(42, "7")


def test_derive_seed_is_64_bit():
    for part in range(100):
        assert 0 <= derive_seed(0, part) < 2**64


def test_derive_seed_rejects_unhashable_types():
    with pytest.raises(TypeError):
        derive_seed(1, 2.5)
