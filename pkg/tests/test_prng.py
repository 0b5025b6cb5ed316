"""Seeding helpers: pinned generator, derived stream seeds."""

import numpy as np

from driftnet.prng import derive_seed, make_rng


def test_same_seed_same_draws():
    a = make_rng(123).random(8)
    b = make_rng(123).random(8)
    assert np.array_equal(a, b)


def test_different_seeds_differ():
    assert not np.array_equal(make_rng(1).random(8), make_rng(2).random(8))


def test_bit_generator_is_pinned():
    # reproducibility across library versions rests on the generator
    # family never changing silently
    assert type(make_rng(0).bit_generator).__name__ == "PCG64"


def test_seed_wraps_at_64_bits():
    a = make_rng(2 ** 64 + 5).random(4)
    b = make_rng(5).random(4)
    assert np.array_equal(a, b)


def test_derive_seed_frozen_values():
    assert derive_seed(0, 0) == 11400714819323198485
    assert derive_seed(0, 1) == 4354685564936845354
    assert derive_seed(42, 0) == 11400714819323198527


def test_derive_seed_streams_are_distinct():
    seen = {derive_seed(7, stream) for stream in range(64)}
    assert len(seen) == 64
    assert derive_seed(7, 3) != derive_seed(8, 3)
