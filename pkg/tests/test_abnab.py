from fractions import Fraction

import pytest

from qperiod.abnab import (
    AbelianizedModel,
    HarmonicCache,
    UnsupportedWeylError,
    assembled_period,
    closed_form_period,
    tilde_scalar,
    weyl_orbit_sums,
)
from qperiod.giventaleng import regularize


@pytest.fixture(scope="module")
def model():
    return AbelianizedModel.weighted_grassmannian_2_5()


def test_harmonic_numbers():
    H = HarmonicCache()
    assert [H(n) for n in range(4)] == [0, 1, Fraction(3, 2), Fraction(11, 6)]


def test_closed_form_and_assembly_agree(model):
    assert assembled_period(model, 6) == closed_form_period(6)


def test_regularised_series(model):
    G = regularize(assembled_period(model, 4))
    assert G.lines() == ["t^0: 1", "t^2: 112", "t^3: 1650", "t^4: 48048"]


def test_weyl_orbit_sums_vanish(model):
    sums = weyl_orbit_sums(model, 6)
    assert sums and all(v == 0 for v in sums.values())


def test_tilde_scalar_is_weyl_symmetric(model):
    for l in model.classes(5):
        assert tilde_scalar(model, l) == tilde_scalar(model, model.weyl(l))


def test_asymmetric_weights_rejected():
    with pytest.raises(UnsupportedWeylError):
        AbelianizedModel(weights=((1, 0), (0, 2)), bundles=())
