import pytest

from ctcsim.numtheory import InvalidInput, factor_view, integer_sqrt, is_prime


@pytest.mark.parametrize(
    "n, divisors, smallest, prime",
    [
        (15, (3, 5, 15), 3, False),
        (7, (7,), 7, True),
        (4, (2, 4), 2, False),
        (2, (2,), 2, True),
        (36, (2, 3, 4, 6, 9, 12, 18, 36), 2, False),
    ],
)
def test_factor_view_examples(n, divisors, smallest, prime):
    view = factor_view(n)
    assert view.divisors_gt1 == divisors
    assert view.smallest_nontrivial == smallest
    assert view.is_prime is prime


def test_divisors_complete_and_sound_up_to_10_000():
    for n in range(2, 10_001):
        view = factor_view(n)
        assert all(n % d == 0 for d in view.divisors_gt1)
        if n <= 2000:
            assert list(view.divisors_gt1) == [d for d in range(2, n + 1) if n % d == 0]
        else:
            # pairing check: each divisor's cofactor is present too (or is 1)
            ds = set(view.divisors_gt1)
            assert all(n // d in ds or n // d == 1 for d in ds)
        assert view.divisors_gt1[-1] == n
        assert view.is_prime == (view.divisors_gt1 == (n,))
        assert (view.smallest_nontrivial == n) == view.is_prime


@pytest.mark.parametrize("bad", [1, 0, -7])
def test_rejects_small_inputs(bad):
    with pytest.raises(InvalidInput):
        factor_view(bad)


def test_integer_sqrt():
    for n in range(0, 2000):
        r = integer_sqrt(n)
        assert r * r <= n < (r + 1) * (r + 1)


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
