import numpy as np
import pytest

from ugsb.errors import FitError, PerturbationInvalidError
from ugsb.params import DriveParams, ParamSet, RydbergCoupling
from ugsb.levels import LevelScheme
from ugsb.perturbation import (
    choose_v_for_delta,
    derive_effective,
    dispersive_rate,
    eliminate_numeric,
    validate_against_numeric,
)
from ugsb.units import mhz, to_mhz
from conftest import rb87_params


def asymmetric_params():
    drive = DriveParams(mhz(8.0), mhz(13.0), mhz(100.0), mhz(300.0), aux_mode="off")
    p = ParamSet(drive, RydbergCoupling(v=mhz(200.0)), LevelScheme.two_atom())
    return p.with_v(choose_v_for_delta(p, 0.0))


def test_effective_values_at_paper_point(rb87):
    p = rb87.with_v(choose_v_for_delta(rb87, 0.0))
    m = derive_effective(p)
    assert to_mhz(m.omega_eff) == pytest.approx(-1.0 / 3.0, rel=1e-12)
    assert to_mhz(m.shift_rr) == pytest.approx(-1.0 / 3.0, rel=1e-12)
    assert m.omega_eff == pytest.approx(m.shift_rr)  # equal-Rabi identity
    assert m.delta == pytest.approx(0.0, abs=1e-9)
    # cross-check: v = delta1 - delta0 - shift_rr lands on 200.33 MHz
    assert to_mhz(p.coupling.v) == pytest.approx(200.3333333, abs=1e-6)


def test_required_v0_is_omega_over_30(rb87):
    # delta0 = 10 omega, delta1 = 30 omega, delta = 0
    p = rb87.with_v(choose_v_for_delta(rb87, 0.0))
    assert p.v0 == pytest.approx(rb87.drive.omega0 / 30.0, rel=1e-12)


def test_degenerate_detunings():
    drive = DriveParams(mhz(6.0), mhz(10.0), mhz(120.0), mhz(120.0))
    p = ParamSet(drive, RydbergCoupling(v=mhz(30.0)), LevelScheme.two_atom())
    m = derive_effective(p)
    assert m.omega_eff == 0.0
    want = (drive.omega1**2 - drive.omega0**2) / (4 * drive.delta0)
    assert m.shift_01 == pytest.approx(want)
    assert m.shift_10 == pytest.approx(want)


def test_oracle_matches_closed_forms():
    p = asymmetric_params()
    m = derive_effective(p)
    heff, singles = eliminate_numeric(p)
    closed = np.zeros((5, 5), complex)
    np.fill_diagonal(
        closed, [m.shift_00, m.shift_01, m.shift_10, m.shift_11, m.shift_rr]
    )
    closed[1, 4] = closed[2, 4] = closed[4, 1] = closed[4, 2] = m.omega_eff / 2
    scale = np.max(np.abs(closed))
    assert np.max(np.abs(heff - closed)) / scale < 1e-12
    assert singles["r0"] == pytest.approx(m.shift_r0, rel=1e-12)
    assert singles["0r"] == pytest.approx(m.shift_0r, rel=1e-12)
    assert singles["r1"] == pytest.approx(m.shift_r1, rel=1e-12)
    assert singles["1r"] == pytest.approx(m.shift_1r, rel=1e-12)


def test_oracle_matches_at_symmetric_point(rb87):
    p = rb87.with_aux_mode("off")
    m = derive_effective(p)
    heff, _ = eliminate_numeric(p)
    assert heff[1, 4] == pytest.approx(m.omega_eff / 2, rel=1e-12)
    assert heff[0, 0] == pytest.approx(m.shift_00, rel=1e-12)
    # blocked channels carry no resonant coupling
    assert heff[0, 4] == 0.0 and heff[3, 4] == 0.0 and heff[1, 2] == 0.0


def test_choose_v_examples(rb87):
    assert to_mhz(choose_v_for_delta(rb87, 0.0)) == pytest.approx(200.3333, abs=1e-3)
    assert to_mhz(choose_v_for_delta(rb87, mhz(3.36))) == pytest.approx(
        203.6933, abs=1e-3
    )
    # inversion identity: feeding back the model's own delta returns v
    m = derive_effective(rb87)
    assert choose_v_for_delta(rb87, m.delta) == pytest.approx(
        rb87.coupling.v, rel=1e-12
    )
    p = rb87.with_v(choose_v_for_delta(rb87, mhz(1.234)))
    assert derive_effective(p).delta == pytest.approx(mhz(1.234), rel=1e-12)


def test_dispersive_rate_values(rb87):
    p = rb87.with_v(choose_v_for_delta(rb87, mhz(3.36)))
    m = derive_effective(p)
    omega_d, h2 = dispersive_rate(m)
    assert to_mhz(omega_d) == pytest.approx(0.016534, abs=2e-5)
    assert np.pi / abs(omega_d) == pytest.approx(30.24, abs=0.05)
    assert np.allclose(h2, -0.5 * omega_d * np.ones((2, 2)))
    # linearity and sign
    m2 = derive_effective(rb87.with_v(choose_v_for_delta(rb87, mhz(6.72))))
    omega_d2, _ = dispersive_rate(m2)
    assert omega_d2 == pytest.approx(omega_d / 2, rel=1e-9)
    assert np.sign(omega_d) == np.sign(m.delta)


def test_dispersive_rate_domain_errors(rb87):
    m0 = derive_effective(rb87.with_v(choose_v_for_delta(rb87, 0.0)))
    with pytest.raises(ValueError):
        dispersive_rate(m0)
    m_small = derive_effective(rb87.with_v(choose_v_for_delta(rb87, mhz(0.3))))
    with pytest.raises(PerturbationInvalidError):
        dispersive_rate(m_small)


def test_regime_guards():
    drive = DriveParams(mhz(50.0), mhz(50.0), mhz(100.0), mhz(300.0))
    p = ParamSet(drive, RydbergCoupling(v=mhz(200.0)), LevelScheme.two_atom())
    with pytest.raises(PerturbationInvalidError):
        derive_effective(p)
    # singles collide with the pair state when v approaches delta1
    q = rb87_params().with_v(mhz(290.0))
    with pytest.raises(PerturbationInvalidError):
        derive_effective(q)
    # marginal separation warns
    drive = DriveParams(mhz(25.0), mhz(25.0), mhz(100.0), mhz(300.0))
    p = ParamSet(drive, RydbergCoupling(v=mhz(200.0)), LevelScheme.two_atom())
    with pytest.warns(UserWarning):
        derive_effective(p)


def test_matrix_reflects_compensation(rb87):
    p = rb87.with_v(choose_v_for_delta(rb87, mhz(3.36)))
    m_on = derive_effective(p)
    assert np.allclose(np.diag(m_on.matrix)[:4], 0.0)
    assert m_on.matrix[4, 4] == pytest.approx(m_on.delta)
    m_off = derive_effective(p.with_aux_mode("off"))
    assert m_off.matrix[0, 0] == pytest.approx(m_off.shift_00)
    assert m_off.matrix[4, 4] == pytest.approx(m_off.v0 + m_off.shift_rr)


@pytest.mark.slow
def test_numeric_validation_at_paper_point(rb87):
    report = validate_against_numeric(rb87)
    errs = report.relative_errors
    assert errs["omega_eff"] < 0.05
    assert errs["shift_00"] < 0.05
    assert errs["shift_11"] < 0.05
    assert errs["shift_01"] < 0.08


@pytest.mark.slow
def test_numeric_validation_second_order_scaling(rb87):
    from dataclasses import replace

    half = ParamSet(
        replace(rb87.drive, omega0=rb87.drive.omega0 / 2, omega1=rb87.drive.omega1 / 2),
        rb87.coupling,
        rb87.scheme,
    )
    err_full = validate_against_numeric(rb87, periods=2.0).relative_errors
    err_half = validate_against_numeric(half, periods=2.0).relative_errors
    ratio = err_half["omega_eff"] / err_full["omega_eff"]
    assert ratio < 0.5  # shrinks roughly as (omega/delta)**2


def test_numeric_validation_rejects_zero_drive(rb87):
    from dataclasses import replace

    dead = ParamSet(
        replace(rb87.drive, omega0=0.0, omega1=0.0), rb87.coupling, rb87.scheme
    )
    m = derive_effective(dead)
    assert m.omega_eff == 0.0 and m.shift_00 == 0.0 and m.shift_rr == 0.0
    with pytest.raises(FitError):
        validate_against_numeric(dead)
