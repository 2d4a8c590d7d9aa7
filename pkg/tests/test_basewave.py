import numpy as np
import pytest

from fpuwave.basewave import (build_causal_wave, extend_family, probe_family_domain,
                              wave_residual)
from fpuwave.errors import AdmissibilityFailure
from fpuwave.spectral import find_kc
from fpuwave.tails import tail_fit

# regression values at c = 0.95, L = 80, h = 1/256
MU0 = -0.9405856723
R_PLUS = 0.60937772022
R_MINUS = -19.90344279260


def test_residual_and_center(base95):
    assert base95.residual <= 1e-5
    assert base95.R0.values[base95.R0.center] == 0.0
    assert base95.mu0 == pytest.approx(MU0, abs=1e-9)


def test_far_field_means_follow_from_mu(base95):
    # on the non-oscillating side M acts on constants as (1 - c^2)
    c2 = 0.95**2
    assert base95.tails["r_plus"] == pytest.approx((1 + base95.mu0) / (1 - c2), abs=1e-8)
    assert base95.tails["r_minus"] == pytest.approx((-1 + base95.mu0) / (1 - c2), abs=1e-7)
    assert base95.tails["r_plus"] == pytest.approx(R_PLUS, abs=1e-9)
    assert base95.tails["r_minus"] == pytest.approx(R_MINUS, abs=1e-8)


def test_causal_tails(base95, ctx95):
    plus = tail_fit(base95.R0, ctx95, 1)
    minus = tail_fit(base95.R0, ctx95, -1)
    scale = np.max(np.abs(base95.R0.values))
    assert plus.amplitude <= 1e-6 * scale
    assert minus.amplitude >= 0.1 * scale


def test_structure_constants(base95):
    assert base95.x0 > 0 and base95.d0 > 0 and base95.r0 > 0
    assert np.max(np.abs(base95.R0.values)) <= base95.D0 / (1 - 0.95**2) * (1 + 1e-12)
    assert base95.slope0 >= base95.d0
    R, x = base95.R0.values, base95.R0.x
    far = np.abs(x) >= base95.x0
    assert np.all(np.sign(R[far]) == np.sign(x[far]))


def test_refinement_stable(base95, ctx95):
    fine = build_causal_wave(ctx95, L=80.0, h=1 / 512)
    for key in ("mu0", "x0", "d0", "r0", "D0"):
        assert getattr(fine, key) == pytest.approx(getattr(base95, key), rel=1e-2)
    assert fine.mu0 == pytest.approx(base95.mu0, abs=1e-10)


@pytest.mark.parametrize("c", [0.9, 0.98])
def test_other_speeds(c):
    b = build_causal_wave(find_kc(c), L=80.0, h=1 / 256)
    assert b.residual <= 1e-5 and b.mu0 < 0


def test_family_member(base95, ctx95):
    fam = extend_family(base95, 0.1, -0.05)
    assert fam.residual <= 1e-5
    assert fam.mu0 == pytest.approx(base95.mu0 - 0.1 * (1 - 0.95**2))
    # the added oscillation shows up on the + side
    amp = tail_fit(fam.R0, ctx95, 1).amplitude
    assert amp == pytest.approx(np.hypot(0.1, 0.05), rel=1e-6)
    assert wave_residual(fam.field, ctx95, np.sign, 80.0, 1 / 256) <= 1e-5


def test_family_domain_boundary(base95):
    with pytest.raises(AdmissibilityFailure):
        extend_family(base95, 1.0, 0.0)
    t = probe_family_domain(base95, (1.0, 0.0), t_max=2.0)
    assert 0.0 < t < 1.0


def test_family_residual_unchanged(base95):
    fam = extend_family(base95, -0.3, 0.2)
    assert abs(fam.residual - base95.residual) <= 1e-8


def test_causal_plus_tail_energy(base95, ctx95):
    plus = tail_fit(base95.R0, ctx95, 1)
    assert plus.alpha**2 + plus.beta**2 <= 1e-10
