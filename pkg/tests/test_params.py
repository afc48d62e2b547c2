import pytest
from numpy.testing import assert_allclose

from dopo.errors import RateError
from dopo.params import DopoParams


def test_sigma_round_trip():
    p = DopoParams.from_sigma(1.7, chi=0.3, gamma_s=2.0, gamma_p=0.5)
    assert_allclose(p.sigma, 1.7)
    assert_allclose(p.eps_p, 1.7 * 2.0 * 0.5 / 0.3)
    assert_allclose(p.with_sigma(0.4).sigma, 0.4)


def test_g2_coupling():
    p = DopoParams(gamma_s=2.0, gamma_p=0.5, chi=0.3, eps_p=1.0)
    assert_allclose(p.g2coupling, 0.09)


@pytest.mark.parametrize("kw", [{"gamma_s": 0}, {"gamma_p": -1}, {"chi": 0}, {"eps_p": -1}])
def test_invalid_rates(kw):
    with pytest.raises(RateError):
        DopoParams(**kw)


def test_negative_sigma():
    with pytest.raises(RateError):
        DopoParams.from_sigma(-0.1, chi=1.0)
