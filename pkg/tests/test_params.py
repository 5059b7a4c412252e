import numpy as np
import pytest

from ugsb.errors import ConfigurationError
from ugsb.levels import LevelScheme
from ugsb.params import (
    DriveParams,
    ParamSet,
    RydbergCoupling,
    TwoPhotonSpec,
    distance_for_strength,
    effective_rabi_from_two_photon,
    rri_strength,
    symmetric_paramset,
)
from ugsb.units import doppler_sigma, mhz, to_mhz


def test_angular_conversion_roundtrip():
    assert to_mhz(mhz(10.0)) == pytest.approx(10.0, rel=1e-15)
    assert mhz(1.0) == pytest.approx(2 * np.pi)


def test_doppler_sigma_at_10uk():
    # k_eff = 8.76e6 1/m, 87Rb, 10 uK -> sigma/2pi = 43 kHz
    sigma = doppler_sigma(8.76e6, 10.0)
    assert to_mhz(sigma) * 1e3 == pytest.approx(43.1, abs=0.5)


def test_detunings_stored_positive():
    with pytest.raises(ConfigurationError):
        DriveParams(mhz(10), mhz(10), -mhz(100), mhz(300))
    with pytest.raises(ConfigurationError):
        DriveParams(mhz(10), mhz(10), mhz(100), 0.0)


def test_aux_defaults_mirror_pumps():
    d = DriveParams(mhz(10), mhz(12), mhz(100), mhz(300), aux_mode="explicit")
    assert d.aux_omega0 == d.omega0
    assert d.aux_delta1 == d.delta1


def test_explicit_aux_cancellation_enforced():
    # omega'^2/delta' must equal omega^2/delta to 1e-12
    with pytest.raises(ConfigurationError):
        DriveParams(
            mhz(10), mhz(10), mhz(100), mhz(300),
            aux_mode="explicit", aux_omega0=mhz(10), aux_delta0=mhz(101),
        )
    ok = DriveParams(
        mhz(10), mhz(10), mhz(100), mhz(300),
        aux_mode="explicit",
        aux_omega0=mhz(20), aux_delta0=mhz(400),  # (2w)^2/(4d) = w^2/d
    )
    assert ok.aux_omega0 == mhz(20)


def test_coupling_derivations():
    c6 = mhz(858400.0)
    c = RydbergCoupling(c6=c6, d=4.0)
    assert c.v == pytest.approx(c6 / 4.0**6)
    c2 = RydbergCoupling(v=c.v, c6=c6)
    assert c2.d == pytest.approx(4.0, rel=1e-12)
    with pytest.raises(ConfigurationError):
        RydbergCoupling(v=1.01 * c.v, c6=c6, d=4.0)
    with pytest.raises(ConfigurationError):
        RydbergCoupling(c6=c6)


def test_distance_for_paper_point():
    # C6/2pi = 858.4 GHz um^6, V/2pi = 200.33 MHz -> d = 4.03 um
    d = distance_for_strength(mhz(858400.0), mhz(200.3333))
    assert d == pytest.approx(4.03, abs=0.005)


def test_rri_roundtrip_and_power_law():
    c6, v = mhz(858400.0), mhz(137.0)
    d = distance_for_strength(c6, v)
    assert rri_strength(c6, d) == pytest.approx(v, rel=1e-12)
    assert rri_strength(c6, d / 2) == pytest.approx(64 * v, rel=1e-12)
    with pytest.raises(ValueError):
        distance_for_strength(c6, -1.0)
    with pytest.raises(ValueError):
        rri_strength(0.0, 1.0)


@pytest.mark.parametrize(
    "op, orr, dp, d2, expect_mhz",
    [
        (400.0, 200.0, 4050.0, 100.0, 10.0),
        (1000.0, 500.0, 25151.0, 300.0, 10.0),
    ],
)
def test_two_photon_effective_rabi(op, orr, dp, d2, expect_mhz):
    spec = TwoPhotonSpec(mhz(op), mhz(orr), mhz(dp), mhz(d2))
    assert to_mhz(effective_rabi_from_two_photon(spec)) == pytest.approx(
        expect_mhz, abs=0.01
    )


def test_two_photon_symmetric_ladder():
    # zero two-photon detuning: dbar = delta_p
    spec = TwoPhotonSpec(mhz(400), mhz(200), mhz(4000), 0.0)
    assert effective_rabi_from_two_photon(spec) == pytest.approx(
        mhz(400) * mhz(200) / (2 * mhz(4000))
    )


def test_two_photon_domain_errors_and_warning():
    with pytest.raises(ValueError):
        effective_rabi_from_two_photon(TwoPhotonSpec(1.0, 1.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        effective_rabi_from_two_photon(TwoPhotonSpec(1.0, 1.0, mhz(5), mhz(5)))
    with pytest.warns(UserWarning):
        TwoPhotonSpec(mhz(400), mhz(200), mhz(500), mhz(10))


def test_paramset_scheme_consistency():
    drive = DriveParams(mhz(10), mhz(10), mhz(100), mhz(300), aux_mode="explicit")
    with pytest.raises(ConfigurationError):
        ParamSet(drive, RydbergCoupling(v=mhz(200)), LevelScheme.two_atom())
    p = ParamSet(
        drive, RydbergCoupling(v=mhz(200)), LevelScheme.two_atom(with_aux=True)
    )
    assert p.scheme.with_aux
    back = p.with_aux_mode("ideal")
    assert not back.scheme.with_aux and back.drive.aux_mode == "ideal"


def test_paramset_updates_preserve_c6():
    p = symmetric_paramset(mhz(10), mhz(100), mhz(300), v=mhz(200), c6=mhz(858400.0))
    q = p.with_v(mhz(100))
    assert q.coupling.c6 == p.coupling.c6
    assert q.coupling.d == pytest.approx(
        distance_for_strength(q.coupling.c6, mhz(100))
    )
    assert p.v0 == pytest.approx(mhz(0.0), abs=1e-9)
