import numpy as np
import pytest

from myosub.errors import InputError
from myosub.lens import LensDistribution, as_mask, mask_from_key, mask_key


def test_mask_keys_round_trip():
    assert mask_key([1, 0, 1]) == "101"
    assert mask_from_key("0110").tolist() == [0, 1, 1, 0]


@pytest.mark.parametrize("bits", [[0, 0], [1, 2], [[1, 0]]])
def test_invalid_masks(bits):
    with pytest.raises(InputError):
        as_mask(bits)


def test_from_dict_accepts_tuples_and_strings():
    a = LensDistribution.from_dict({"110": 0.5, "001": 0.5})
    b = LensDistribution.from_dict({(1, 1, 0): 0.5, (0, 0, 1): 0.5})
    assert a.as_dict() == b.as_dict() and a.dim == 3 and len(a) == 2


@pytest.mark.parametrize("weights", [
    {"110": 0.5, "001": 0.4},
    {"110": 1.2, "001": -0.2},
    {"110": 1.0, "000": 0.0},
])
def test_invalid_distributions(weights):
    with pytest.raises(InputError):
        LensDistribution.from_dict(weights)


def test_duplicate_masks_rejected():
    with pytest.raises(InputError):
        LensDistribution(np.array([[1, 0], [1, 0]]), np.array([0.5, 0.5]))


def test_arrays_are_read_only():
    lens = LensDistribution.from_dict({"10": 1.0})
    with pytest.raises(ValueError):
        lens.probs[0] = 0.5


def test_from_draws_counts():
    draws = np.array([[1, 0], [0, 1], [1, 0], [1, 1]])
    lens = LensDistribution.from_draws(draws)
    assert lens.as_dict() == {"11": 0.25, "10": 0.5, "01": 0.25}
    assert lens.sample_count == 4
    assert lens.probability([1, 0]) == 0.5 and lens.identity_frequency() == 0.25
