import math

import pytest

from qmetro.errors import BadParameter, DomainError
from qmetro.frequency import FreqResult, freq_bound, freq_closed, freq_crlb, is_approximate, lambert_w0

E = math.e


def test_lambert_examples():
    assert lambert_w0(0) == 0
    assert lambert_w0(-1 / E) == pytest.approx(-1)
    assert lambert_w0(E) == pytest.approx(1, abs=1e-12)
    with pytest.raises(DomainError):
        lambert_w0(-0.5)


@pytest.mark.parametrize("x", [-0.367, -0.3, -0.1, 1e-8, 0.5, 2.0, 10.0, 1e3, 1e8])
def test_lambert_residual(x):
    w = lambert_w0(x)
    assert abs(w * math.exp(w) - x) <= 1e-12 * max(1.0, abs(x))
    assert w >= -1


def test_freq_bound_examples():
    res = freq_bound("dephasing", "channel_qfi", 1.0)
    assert res.value == pytest.approx(1 / (2 * E), rel=1e-9)
    assert res.t_opt == pytest.approx(0.5, rel=1e-6)
    assert freq_bound("dephasing", "ce_asymptotic", 1.0).value == pytest.approx(0.5, rel=1e-6)
    assert freq_bound("spontaneous-emission", "ce-asymptotic", 2.0).value == pytest.approx(2.0, rel=1e-6)


def test_freq_bound_limit_reports_zero_time():
    res = freq_bound("loss", "ce_asymptotic", 1.0)
    assert res.t_opt == 0.0 and res.diagnostics["limit"]


def test_freq_bound_rejects_bad_input():
    with pytest.raises(BadParameter):
        freq_bound("dephasing", "channel_qfi", 0.0)
    with pytest.raises(BadParameter):
        freq_bound("dephasing", "nonsense", 1.0)


def test_freq_closed_examples():
    assert freq_closed("dephasing", "ce_finite", 1.0, 1) == pytest.approx(1 / (2 * E))
    wt = 1 + 2 * lambert_w0(1 / (2 * math.sqrt(E)))
    assert freq_closed("spontaneous_emission", "extended_qfi", 1.0) == pytest.approx(4 * wt / (1 + math.exp(wt / 2)) ** 2)
    assert freq_closed("loss", "ce_asymptotic", 2.0) == pytest.approx(0.5)
    with pytest.raises(BadParameter):
        freq_closed("spontaneous_emission", "ce_finite", 1.0, 1)
    assert is_approximate("depolarization", "ce_finite") and not is_approximate("loss", "ce_finite")


def test_crlb_examples():
    res = FreqResult(0.5, 0.0, "ce_asymptotic", "dephasing", 1.0, 100)
    assert freq_crlb(res, 1000) == pytest.approx(1 / math.sqrt(1000 * 100 * 0.5))
    assert freq_crlb(res, 2000) == pytest.approx(freq_crlb(res, 1000) / math.sqrt(2))
    one = FreqResult(1 / (2 * E), 0.5, "channel_qfi", "dephasing", 1.0, 1)
    assert freq_crlb(one, 1) == pytest.approx(math.sqrt(2 * E))


@pytest.mark.parametrize("kind", ["dephasing", "loss", "spontaneous_emission"])
def test_finite_n_100_matches_closed_form(kind):
    assert freq_bound(kind, "ce_finite", 1.0, 100).value == pytest.approx(freq_closed(kind, "ce_finite", 1.0, 100), rel=1e-6)


@pytest.mark.parametrize("kind", ["dephasing", "loss"])
def test_finite_n_approaches_asymptotic(kind):
    limit = freq_bound(kind, "ce_asymptotic", 1.0).value
    gaps = []
    for n in (10**5, 10**7):
        val = freq_bound(kind, "ce_finite", 1.0, n).value
        assert val == pytest.approx(freq_closed(kind, "ce_finite", 1.0, n), rel=1e-6)
        gaps.append(1 - val / limit)
    # the approach is only ~ sqrt(2/N): about 4.5e-3 at N = 1e5
    assert 0 < gaps[1] < gaps[0] and gaps[1] < 1e-3
    assert gaps[0] == pytest.approx(math.sqrt(2 / 10**5), rel=0.1)


def test_scaling_in_gamma():
    a = freq_bound("depolarization", "channel_qfi", 1.0).value
    b = freq_bound("depolarization", "channel_qfi", 2.0).value
    assert a == pytest.approx(3 / (4 * E), rel=1e-6)
    assert b == pytest.approx(a / 2, rel=1e-6)
