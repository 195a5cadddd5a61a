import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st_

from photonsurf import (
    CompatibilityError,
    DomainError,
    InvalidFamilyParamsError,
    UnknownFamilyError,
    build_family,
    conformal_flatness_scan,
    custom_spacetime,
    from_isotropic,
    spacetime_from_table,
    to_isotropic,
)


def test_minkowski_profile(minkowski):
    assert minkowski.f(3.7) == 1.0
    assert minkowski.fprime(3.7) == 0.0
    assert minkowski.vacuum
    assert minkowski.einstein_constant == 0.0


def test_schwarzschild_profile(schw3):
    assert schw3.f(4.0) == pytest.approx(0.5, abs=1e-15)
    assert schw3.fprime(4.0) == pytest.approx(2 / 16, abs=1e-15)
    assert schw3.r_lo == 2.0
    assert math.isinf(schw3.r_hi)
    assert schw3.vacuum


def test_schwarzschild_higher_dim_horizon():
    st = build_family("schwarzschild", n=5, m=1)
    rm = 2.0 ** (1 / 3)
    assert st.r_lo == pytest.approx(rm, rel=1e-15)
    assert st.f(rm * 1.0000001) > 0


def test_reissner_nordstrom():
    st = build_family("reissner-nordstrom", m=1, q=0.5)
    rplus = 1 + math.sqrt(1 - 0.25)
    assert st.r_lo == pytest.approx(rplus, rel=1e-15)
    assert st.f(3.0) == pytest.approx(1 - 2 / 3 + 0.25 / 9, rel=1e-15)
    assert not st.vacuum
    assert st.einstein_constant is None


def test_reissner_nordstrom_super_extremal_flag():
    st = build_family("rn", m=1, q=1.5)
    assert "super-extremal" in st.flags
    assert st.r_lo == 0.0


def test_reissner_nordstrom_rejects_higher_dim():
    with pytest.raises(InvalidFamilyParamsError):
        build_family("reissner-nordstrom", n=4, m=1, q=0.5)


def test_schwarzschild_ads_horizon_and_lambda():
    st = build_family("schwarzschild-ads", n=3, m=1, L=10.0)
    rH = st.r_lo
    assert st.f(rH * (1 + 1e-13)) == pytest.approx(0.0, abs=1e-10)
    assert st.einstein_constant == pytest.approx(-3 / 100, rel=1e-15)


def test_unknown_family():
    with pytest.raises(UnknownFamilyError):
        build_family("goedel", m=1)


def test_builtin_rejects_n2():
    with pytest.raises(InvalidFamilyParamsError):
        build_family("minkowski", n=2)


def test_custom_allows_n2():
    st = custom_spacetime(lambda r: 1.0, n=2, r_lo=0.0, r_hi=10.0)
    assert st.n == 2
    assert st.f(1.0) == 1.0


def test_custom_numeric_derivative():
    st = custom_spacetime(lambda r: 1 - 2 / r, n=3, r_lo=2.0, r_hi=100.0)
    assert st.fprime(5.0) == pytest.approx(2 / 25, rel=1e-9)


def test_negative_f_rejected():
    with pytest.raises(InvalidFamilyParamsError):
        custom_spacetime(lambda r: 1 - r, n=3, r_lo=0.5, r_hi=10.0)


def test_table_profile(tmp_path):
    rs = np.geomspace(2.2, 60.0, 400)
    path = tmp_path / "prof.csv"
    with open(path, "w") as fh:
        fh.write("r,f\n")
        for r in rs:
            fh.write(f"{float(r)!r},{float(1 - 2 / r)!r}\n")
    st = spacetime_from_table(path)
    assert st.f(10.0) == pytest.approx(0.8, abs=1e-8)
    assert st.fprime(10.0) == pytest.approx(0.02, abs=1e-6)


def test_table_profile_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("radius,value\n1,1\n2,1\n3,1\n4,1\n")
    with pytest.raises(DomainError):
        spacetime_from_table(path)


# isotropic form ------------------------------------------------------------

def test_isotropic_schwarzschild_closed_form(schw3_iso):
    # phi_m = (1 + m/(2s))^2 and Ntilde = (1 - m/2s)/(1 + m/2s) at n = 3
    for s in (0.7, 1.0, 2.0, 5.0, 20.0):
        p, dp = schw3_iso.psi(s)
        nn, dnn = schw3_iso.lapse(s)
        phi = (1 + 1 / (2 * s)) ** 2
        ntil = (1 - 1 / (2 * s)) / (1 + 1 / (2 * s))
        assert p == pytest.approx(phi, abs=1e-8)
        assert nn == pytest.approx(abs(ntil), abs=1e-8)
        assert dp == pytest.approx(-2 * (1 + 1 / (2 * s)) / (2 * s ** 2), abs=1e-8)


def test_isotropic_interval_endpoints(schw3_iso):
    assert schw3_iso.s_lo == pytest.approx(0.5, abs=1e-8)
    assert math.isinf(schw3_iso.s_hi)


def test_isotropic_coordinate_maps(schw3_iso):
    s4 = (3 + 2 * math.sqrt(2)) / 2
    assert float(schw3_iso.s_of_r(4.0)) == pytest.approx(s4, abs=1e-10)
    assert float(schw3_iso.r_of_s(s4)) == pytest.approx(4.0, abs=1e-10)
    arr = schw3_iso.s_of_r(np.array([3.0, 4.0, 10.0]))
    assert arr[1] == pytest.approx(s4, abs=1e-10)
    assert np.all(np.diff(arr) > 0)


def test_isotropic_round_trip(schw3, schw3_iso):
    back = from_isotropic(schw3_iso)
    for r in (2.5, 3.0, 7.0, 40.0):
        assert back.f(r) == pytest.approx(schw3.f(r), abs=1e-8)
        assert back.fprime(r) == pytest.approx(schw3.fprime(r), abs=1e-6)


def test_from_isotropic_incompatible_data():
    from photonsurf import IsotropicForm
    iso = IsotropicForm(
        s_lo=1.0, s_hi=10.0,
        psi=lambda s: (1.0, 0.0),
        lapse=lambda s: (2.0, 0.0))  # Ntilde != 1 + s psi'/psi
    with pytest.raises(CompatibilityError) as exc:
        from_isotropic(iso)
    assert exc.value.worst_residual == pytest.approx(1.0, abs=1e-12)


def test_conformal_flatness_scan_schwarzschild_empty(schw3_iso):
    assert conformal_flatness_scan(schw3_iso) == []


def test_conformal_flatness_scan_flat_everywhere(minkowski):
    iso = to_isotropic(minkowski, r0=1.0)
    intervals = conformal_flatness_scan(iso, grid=64)
    assert len(intervals) == 1


@settings(max_examples=25, deadline=None)
@given(r=st_.floats(min_value=2.05, max_value=80.0))
def test_isotropic_map_round_trips(schw3_iso, r):
    s = float(schw3_iso.s_of_r(r))
    assert schw3_iso.s_lo < s < 1000.0
    assert float(schw3_iso.r_of_s(s)) == pytest.approx(r, rel=1e-9)
