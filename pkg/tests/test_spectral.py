"""Transform pair, multiplier forms, and zeta tests.

Closed-form Gaussian integrals serve as oracles: with the unitary
angular-frequency convention, F[e^{-x^2/2}] = e^{-xi^2/2}, and the
quadratic form of the standard Gaussian at order s equals Gamma(s + 1/2).
"""

import math

import numpy as np
import pytest
import scipy.special

from fraclab.errors import DomainError, GridMismatchError, SupportRuleError
from fraclab.grid import GridFunction, GridSpec, l2_inner, sample, truncate
from fraclab.spectral import (
    Spectrum,
    forward_transform,
    fractional_laplacian,
    interpolation_ratio,
    inverse_transform,
    quadratic_form,
    shell_partial_sums,
    sobolev_norm_sq,
    write_spectrum_csv,
    zeta_extended,
)
from fraclab.special import gamma

SPEC = GridSpec(1, 16.0, 2048)
GAUSS = sample("exp(-x^2/2)", SPEC)


def test_gaussian_transform_closed_form():
    su = forward_transform(GAUSS)
    xi = su.frequency_axis()
    expect = np.exp(-0.5 * xi * xi)
    assert np.max(np.abs(su.coeffs - expect)) <= 1e-12


def test_round_trip_is_identity():
    u = sample("x*exp(-x^2)", SPEC)
    back = inverse_transform(forward_transform(u))
    assert np.max(np.abs(back.samples - u.samples)) <= 1e-13


def test_hermitian_symmetry_of_real_input():
    su = forward_transform(sample("x*exp(-x^2)", SPEC))
    c = su.coeffs
    # frequencies come in +/- pairs except the endpoints of the lattice
    flipped = np.conj(np.roll(c[::-1], 1))
    assert np.max(np.abs(c[1:] - flipped[1:])) <= 1e-12


def test_shift_theorem_on_the_lattice():
    u = sample("exp(-x^2)", SPEC)
    shift_nodes = 37
    rolled = GridFunction(SPEC, np.roll(u.samples, shift_nodes))
    su = forward_transform(u)
    sr = forward_transform(rolled, enforce_support=False)
    xi = su.frequency_axis()
    phase = np.exp(-1j * xi * shift_nodes * SPEC.delta)
    assert np.max(np.abs(sr.coeffs - phase * su.coeffs)) <= 1e-11


def test_parseval_at_order_zero():
    u = sample("x*exp(-x^2)", SPEC)
    assert quadratic_form(u, u, 0.0) == pytest.approx(l2_inner(u, u), rel=1e-13)


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75, 1.1, 1.25, 1.4])
def test_gaussian_form_matches_gamma(s):
    val = quadratic_form(GAUSS, GAUSS, s)
    assert val == pytest.approx(gamma(s + 0.5), rel=1e-6)


def test_odd_gaussian_form_closed_form():
    # Q_s(x e^{-x^2}) = 2^{s + 1/2} Gamma(s + 3/2) / 4
    u = sample("x*exp(-x^2)", SPEC)
    for s in (0.5, 1.25):
        val = quadratic_form(u, u, s)
        expect =  2.0 ** (s + 0.5) * gamma(s + 1.5) / 4.0
        assert val == pytest.approx(expect, rel=1e-6)


def test_sobolev_norm_combines_form_and_l2():
    s = 0.75
    val = sobolev_norm_sq(GAUSS, s)
    expect = gamma(s + 0.5) + math.sqrt(math.pi)
    assert val == pytest.approx(expect, rel=1e-6)


def test_fractional_laplacian_order_one_is_classical():
    # at s = 1 the multiplier gives minus the second derivative:
    # -(e^{-x^2/2})'' = (1 - x^2) e^{-x^2/2}
    out = fractional_laplacian(GAUSS, 1.0)
    x = SPEC.axis_nodes()
    expect = (1.0 - x * x) * np.exp(-0.5 * x * x)
    scale = np.max(np.abs(expect))
    assert np.max(np.abs(out.samples - expect)) <= 1e-9 * scale


def test_half_order_factorization_is_exact():
    u = sample("x*exp(-x^2)", SPEC)
    v = GAUSS
    for s in (0.7, 1.3):
        lhs = l2_inner(
            fractional_laplacian(u, s / 2.0), fractional_laplacian(v, s / 2.0)
        )
        rhs = quadratic_form(u, v, s, endpoint_correction=False)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-15)


def test_form_validation():
    u = sample("exp(-x^2)", SPEC)
    other = sample("exp(-x^2)", GridSpec(1, 16.0, 1024))
    with pytest.raises(GridMismatchError):
        quadratic_form(u, other, 0.5)
    with pytest.raises(DomainError):
        quadratic_form(u, u, -0.5)
    with pytest.raises(DomainError):
        quadratic_form(u, u, 0.5, cutoff=-1.0)
    with pytest.raises(DomainError):
        fractional_laplacian(u, 0.0)


def test_interpolation_ratio_limits_and_bound():
    u = sample("x*exp(-x^2)", SPEC)
    s = 1.2
    near = interpolation_ratio(u, s * (1.0 - 1e-6), s)
    assert near == pytest.approx(0.9999995994632173, abs=1e-12)
    assert near <= 1.0 + 1e-12
    mod = interpolation_ratio(sample("cos(3*x)*exp(-x^2/2)", SPEC), 0.6, 1.2)
    assert mod == pytest.approx(0.9629838253808455, abs=1e-12)
    rng = np.random.default_rng(11)
    for _ in range(25):
        tau = float(rng.uniform(0.05, 1.45))
        s = float(rng.uniform(tau + 1e-3, 1.5))
        r = interpolation_ratio(u, tau, s)
        assert r <= 1.0 + 1e-12, (tau, s)


def test_interpolation_ratio_validation():
    u = sample("exp(-x^2)", SPEC)
    for tau, s in ((0.5, 0.5), (0.8, 0.5), (0.0, 0.5), (-0.1, 0.5)):
        with pytest.raises(DomainError):
            interpolation_ratio(u, tau, s)
    zero = GridFunction(SPEC, np.zeros(SPEC.N))
    with pytest.raises(DomainError):
        interpolation_ratio(zero, 0.3, 0.6)


def test_polarization_identity_plain_sums():
    # 4 Q_s(u+, u-) = Q_s(|u|) - Q_s(u), exact for the uncorrected sums
    u = sample("x*exp(-x^2)", SPEC)
    pos, neg = truncate(u, "pos"), truncate(u, "neg")
    absu = truncate(u, "abs")
    for s in (0.5, 1.25):
        lhs = 4.0 * quadratic_form(pos, neg, s, endpoint_correction=False)
        rhs = quadratic_form(absu, absu, s, endpoint_correction=False) - \
            quadratic_form(u, u, s, endpoint_correction=False)
        scale = abs(quadratic_form(u, u, s, endpoint_correction=False))
        assert abs(lhs - rhs) <= 1e-12 * scale


def test_shell_partial_sums_monotone_and_complete():
    u = sample("x*exp(-x^2)", SPEC)
    su = forward_transform(u)
    s = 1.25
    radii, partial = shell_partial_sums(su, su, s)
    assert radii.shape == partial.shape
    assert np.all(np.diff(partial) >= -1e-15)
    full = quadratic_form(u, u, s)
    assert partial[-1] == pytest.approx(full, rel=1e-13)


def test_support_rule_enforcement():
    wide = sample("exp(-x^2/200)", SPEC)
    with pytest.raises(SupportRuleError):
        forward_transform(wide)
    # the escape hatch exists for internal shifted data
    su = forward_transform(wide, enforce_support=False)
    assert np.all(np.isfinite(su.coeffs.real))


def test_zeta_reference_values():
    # frozen 20-digit arbitrary-precision references
    refs = {
        3.0: 1.2020569031595942854,
        2.0: 1.6449340668482264365,
        0.5: -1.4603545088095868129,
        0.0: -0.5,
        -0.5: -0.20788622497735456602,
        -1.0: -0.083333333333333333333,
        -11.0: 0.021092796092796092796,
        30.0: 1.0000000009313274324,
        -31.5: 750878449.99370094942,
    }
    for x, ref in refs.items():
        assert zeta_extended(x) == pytest.approx(ref, rel=2e-13), x


def test_zeta_trivial_zeros_and_errors():
    for x in (-2.0, -4.0, -6.0, -8.0):
        assert abs(zeta_extended(x)) <= 1e-15
    with pytest.raises(DomainError):
        zeta_extended(1.0)
    with pytest.raises(DomainError):
        zeta_extended(-400.5)  # reflected value overflows the double range
    with pytest.raises(DomainError):
        zeta_extended(math.nan)


def test_zeta_against_scipy_grid():
    xs = np.concatenate([np.linspace(-20.3, 0.9, 57), np.linspace(1.1, 25.0, 41)])
    for x in xs:
        ours = zeta_extended(float(x))
        ref = float(scipy.special.zeta(x))
        assert abs(ours - ref) <= 1e-12 * max(1.0, abs(ref)), x


def test_write_spectrum_csv(tmp_path):
    spec = GridSpec(1, 2.0, 4)
    su = forward_transform(sample("bump(x)", spec))
    path = tmp_path / "spectrum.csv"
    write_spectrum_csv(su, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "frequency,real,imag"
    assert len(lines) == 5
