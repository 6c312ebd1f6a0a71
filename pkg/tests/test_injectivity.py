"""Reconstruction from spherical means, one-radius counterexamples,
weighted norms, and two-radii admissibility / recovery."""

import numpy as np
import pytest

from metivier.errors import (
    DimensionMismatch,
    InadmissibleRadii,
    NoUsableRadius,
    RangeExceeded,
)
from metivier.grids import default_grid, polar_grid, sample, sample_periodic
from metivier.injectivity import (
    RadialMeasure,
    euclidean_mean,
    euclidean_two_radii_invert,
    inadmissible_radius_pair,
    measure_mean,
    mu_hat_theta,
    one_radius_counterexample,
    reconstruct_from_means,
    reconstruct_from_measure_mean,
    two_radii_check,
    two_radii_reconstruct,
    weighted_norm,
)
from metivier.special import bessel_zeros, laguerre_zeros, theta_k, theta_radial
from metivier.structures import builtin_structure, symplectic_spectrum
from metivier.transforms import reduced_mean

LAM1 = np.array([1.0])


@pytest.fixture(scope="module")
def g1():
    return default_grid(1)


# ---------------------------------------------------------------------------
# Radial measures and annihilation
# ---------------------------------------------------------------------------


def test_radial_measure_validation():
    RadialMeasure([1.0, 2.0], [0.5, 0.5])
    RadialMeasure([1.0, 2.0], [0.0, 1.0])  # zero weights allowed
    with pytest.raises(DimensionMismatch):
        RadialMeasure([1.0, 1.0], [0.5, 0.5])  # duplicate radius
    with pytest.raises(DimensionMismatch):
        RadialMeasure([1.0, -2.0], [0.5, 0.5])
    with pytest.raises(DimensionMismatch):
        RadialMeasure([1.0, 2.0], [0.5, 0.6])  # not a probability vector
    mu = RadialMeasure([1.0, 2.0], [0.3, 0.7])
    assert mu.atoms == ((1.0, 0.3), (2.0, 0.7))


def test_one_radius_counterexample_annihilation(g1):
    ce = one_radius_counterexample(1, LAM1)
    # L_1 has its zero at 1, so the blind radius is sqrt(2)
    assert ce.radius == pytest.approx(np.sqrt(2.0), abs=1e-12)
    assert ce.degree == 1
    assert ce.mean_residual < 1e-8
    assert ce.field.norm2() > 0
    # higher zero index picks a larger blind radius
    ce2 = one_radius_counterexample(3, LAM1, zero_index=2)
    assert ce2.radius > ce.radius
    assert ce2.mean_residual < 1e-8
    with pytest.raises(RangeExceeded):
        one_radius_counterexample(0, LAM1)
    with pytest.raises(RangeExceeded):
        one_radius_counterexample(1, [1.0, 2.0], n=2)


def test_mu_hat_theta_and_designed_cancellation():
    # single atom: just theta_k at the radius
    mu1 = RadialMeasure([np.sqrt(2.0)], [1.0])
    assert abs(mu_hat_theta(mu1, 1, LAM1)) < 1e-14
    assert mu_hat_theta(mu1, 0, LAM1) == pytest.approx(np.exp(-0.5), rel=1e-12)
    # two atoms with weights solved to cancel the degree-2 block:
    # theta_2 changes sign between r = 1 and r = 2
    t1 = float(theta_radial(2, LAM1, np.array(1.0)))
    t2 = float(theta_radial(2, LAM1, np.array(2.0)))
    assert t1 > 0 > t2
    w = -t2 / (t1 - t2)
    mu = RadialMeasure([1.0, 2.0], [w, 1.0 - w])
    assert abs(mu_hat_theta(mu, 2, LAM1)) < 1e-14
    assert abs(mu_hat_theta(mu, 0, LAM1)) > 0.1


# ---------------------------------------------------------------------------
# Reconstruction from means
# ---------------------------------------------------------------------------


def test_single_radius_reconstruction_gaussian(g1):
    f = sample(lambda z: np.exp(-np.abs(z[..., 0]) ** 2), g1)
    mean = reduced_mean(f, LAM1, 1.0)
    result = reconstruct_from_means({1.0: mean}, LAM1, 25)
    assert result.unrecoverable == ()
    err = result.field.with_values(result.field.values - f.values).norm2()
    assert err < 1e-3 * f.norm2()
    # the divisor on each block is c_k theta_k(1)
    assert result.divisor[0] == pytest.approx(np.exp(-0.25), rel=1e-12)
    assert result.condition_number(0) == pytest.approx(np.exp(0.25), rel=1e-12)


def test_blind_radius_loses_exactly_its_degree(g1):
    # at r = sqrt(2) the degree-1 block is invisible; everything else returns
    f = sample(
        lambda z: theta_k(0, LAM1, z) + theta_k(1, LAM1, z) + 0.5 * theta_k(2, LAM1, z),
        g1,
    )
    mean = reduced_mean(f, LAM1, np.sqrt(2.0))
    result = reconstruct_from_means({np.sqrt(2.0): mean}, LAM1, 4)
    assert result.unrecoverable == (1,)
    want = sample(lambda z: theta_k(0, LAM1, z) + 0.5 * theta_k(2, LAM1, z), g1)
    err = result.field.with_values(result.field.values - want.values).norm2()
    assert err < 1e-6 * want.norm2()
    # adding a second radius that sees degree 1 restores everything
    mean2 = reduced_mean(f, LAM1, 0.7)
    both = reconstruct_from_means({np.sqrt(2.0): mean, 0.7: mean2}, LAM1, 4)
    assert both.unrecoverable == ()
    assert both.used_radius[1] == pytest.approx(0.7)
    err = both.field.with_values(both.field.values - f.values).norm2()
    assert err < 1e-6 * f.norm2()


def test_reconstruct_from_measure_mean_cancelled_block(g1):
    t1 = float(theta_radial(2, LAM1, np.array(1.0)))
    t2 = float(theta_radial(2, LAM1, np.array(2.0)))
    w = -t2 / (t1 - t2)
    mu = RadialMeasure([1.0, 2.0], [w, 1.0 - w])
    f = sample(
        lambda z: theta_k(0, LAM1, z) + theta_k(1, LAM1, z) + theta_k(2, LAM1, z), g1
    )
    mean = measure_mean(f, mu, LAM1)
    result = reconstruct_from_measure_mean(mean, mu, LAM1, 4)
    assert result.unrecoverable == (2,)
    want = sample(lambda z: theta_k(0, LAM1, z) + theta_k(1, LAM1, z), g1)
    err = result.field.with_values(result.field.values - want.values).norm2()
    assert err < 1e-6 * want.norm2()


def test_no_usable_radius(g1):
    # at r = 12 every theta_k is exponentially below the threshold
    zero = sample(lambda z: np.zeros(z.shape[:-1]), g1)
    with pytest.raises(NoUsableRadius):
        reconstruct_from_means({12.0: zero}, LAM1, 2)
    with pytest.raises(DimensionMismatch):
        reconstruct_from_means([zero], LAM1, 2)  # bare list without radii


def test_means_input_forms(g1):
    f = sample(lambda z: np.exp(-np.abs(z[..., 0]) ** 2), g1)
    mean = reduced_mean(f, LAM1, 1.0)
    a = reconstruct_from_means({1.0: mean}, LAM1, 6)
    b = reconstruct_from_means([(1.0, mean)], LAM1, 6)
    c = reconstruct_from_means([mean], LAM1, 6, radii=[1.0])
    assert np.array_equal(a.field.values, b.field.values)
    assert np.array_equal(a.field.values, c.field.values)


# ---------------------------------------------------------------------------
# Weighted norms (tempered growth)
# ---------------------------------------------------------------------------


def test_weighted_norm_analytic_value(g1):
    # |e^{-|z|^2} e^{|z|^2/4}|^2 integrates to 2 pi / 3
    f = sample(lambda z: np.exp(-np.abs(z[..., 0]) ** 2), g1)
    wn = weighted_norm(f, [1.0], p=2)
    assert wn.value == pytest.approx(np.sqrt(2 * np.pi / 3), rel=1e-10)
    assert not wn.boundary_dominated
    # a symplectic spectrum supplies its diagonal weights directly
    spec = symplectic_spectrum(builtin_structure("heisenberg:1"), [1.0])
    wn2 = weighted_norm(f, spec, p=2)
    assert wn2.value == pytest.approx(wn.value, rel=1e-12)


def test_weighted_norm_sup_and_boundary_flags(g1):
    decaying = sample(lambda z: np.exp(-np.abs(z[..., 0]) ** 2), g1)
    wn = weighted_norm(decaying, [1.0], p=np.inf)
    # the sup sits at the origin; the innermost radial node is ~2e-3 away
    assert wn.value == pytest.approx(1.0, rel=1e-4)
    assert not wn.boundary_dominated
    # constant 1 times the weight grows: the sup sits on the outer shell
    flat = sample(lambda z: np.ones(z.shape[:-1]), g1)
    wn2 = weighted_norm(flat, [1.0], p=np.inf)
    assert wn2.boundary_dominated
    wn3 = weighted_norm(flat, [1.0], p=2)
    assert wn3.boundary_dominated
    with pytest.raises(DimensionMismatch):
        weighted_norm(flat, [1.0], p=0.5)
    with pytest.raises(DimensionMismatch):
        weighted_norm(flat, [-1.0])


# ---------------------------------------------------------------------------
# Two-radii admissibility
# ---------------------------------------------------------------------------


def test_two_radii_check_admissible_pair():
    verdict = two_radii_check(1.0, 2.0, k_max=12, bessel_count=40)
    assert verdict.admissible
    assert verdict.laguerre_conflicts == ()
    assert verdict.bessel_conflicts == ()
    assert verdict.search_bounds == (12, 40, 1e-9)
    assert not verdict.anisotropic_best_effort


def test_two_radii_check_laguerre_conflict():
    r1, r2 = inadmissible_radius_pair(degree_i=2, index_i=0, index_j=1)
    # by construction r1^2/r2^2 = x_1/x_2 for the zeros of L_2
    z = laguerre_zeros(2, 0).zeros
    assert (r1 / r2) ** 2 == pytest.approx(z[0] / z[1], rel=1e-14)
    verdict = two_radii_check(r1, r2, k_max=6)
    assert not verdict.admissible
    assert any(ki == 2 and kj == 2 for ki, _, kj, _, _ in verdict.laguerre_conflicts)


def test_two_radii_check_bessel_conflict():
    bz = bessel_zeros(0, 2).zeros
    verdict = two_radii_check(bz[0] / bz[1], 1.0, k_max=4, bessel_count=10)
    assert not verdict.admissible
    assert (0, 1, 0.0) in verdict.bessel_conflicts


def test_two_radii_check_monotone_in_search_depth():
    # enlarging the search never flips an inadmissible verdict back
    r1, r2 = inadmissible_radius_pair(degree_i=3, index_i=0, index_j=2)
    for k_max in (4, 8, 16):
        assert not two_radii_check(r1, r2, k_max=k_max).admissible


def test_two_radii_check_anisotropic_best_effort():
    verdict = two_radii_check(1.0, 2.0, n=2, lambda_prime=[1.0, 2.0], k_max=3,
                              bessel_count=20)
    assert verdict.anisotropic_best_effort
    # isotropic twist does not trigger the flag
    v2 = two_radii_check(1.0, 2.0, n=2, lambda_prime=[1.5, 1.5], k_max=3,
                         bessel_count=20)
    assert not v2.anisotropic_best_effort


def test_radii_verdict_csv(tmp_path):
    r1, r2 = inadmissible_radius_pair()
    verdict = two_radii_check(r1, r2, k_max=4)
    path = tmp_path / "verdict.csv"
    verdict.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "family,degree_i,index_i,degree_j,index_j,relative_error"
    assert any(line.startswith("laguerre,2,") for line in lines[1:])


# ---------------------------------------------------------------------------
# Euclidean (untwisted) central mode
# ---------------------------------------------------------------------------


def test_euclidean_mean_of_harmonic_gaussian(g1):
    # the circle mean of e^{-|z|^2} at radius r, centred at z, is
    # e^{-r^2} e^{-|z|^2} I_0(2 r |z|); check at the origin
    f = sample(lambda z: np.exp(-np.abs(z[..., 0]) ** 2), g1)
    mean = euclidean_mean(f, 1.0)
    assert mean.values[0, 0] == pytest.approx(np.exp(-1.0), rel=1e-8)


def test_euclidean_two_radii_inversion(g1):
    fn = lambda z: np.exp(-np.abs(z[..., 0]) ** 2) * (1 + z[..., 0])
    f = sample(fn, g1)
    m1 = euclidean_mean(f, 0.8)
    m2 = euclidean_mean(f, 1.3)
    recon = euclidean_two_radii_invert(m1, m2, 0.8, 1.3)
    err = recon.with_values(recon.values - f.values).norm2()
    assert err < 1e-6 * f.norm2()


# ---------------------------------------------------------------------------
# Full two-radii verification on the periodized group
# ---------------------------------------------------------------------------


def test_two_radii_reconstruct(g1):
    pf = sample_periodic(
        lambda z, t: np.exp(-np.abs(z[..., 0]) ** 2)
        + theta_k(2, LAM1, z) * np.cos(t[0]),
        g1, [8],
    )
    report = two_radii_reconstruct(pf, 1.0, 2.0, k_max=8, ell_max=1)
    assert report.overall_error < 1e-3
    assert set(report.mode_errors) == {-1, 0, 1}
    for ell in (-1, 1):
        assert report.mode_errors[ell] < 1e-6
        detail = report.mode_details[ell]
        assert detail["unrecoverable"] == ()
        assert all(c >= 1.0 or c > 0 for c in detail["condition_numbers"].values())
    d = report.to_json_dict()
    assert d["admissible"] is True
    assert d["r1"] == 1.0 and d["r2"] == 2.0


def test_two_radii_reconstruct_rejects_inadmissible():
    g = polar_grid(1, 8, 8, 4.0)
    pf = sample_periodic(lambda z, t: np.exp(-np.abs(z[..., 0]) ** 2), g, [8])
    r1, r2 = inadmissible_radius_pair()
    with pytest.raises(InadmissibleRadii):
        two_radii_reconstruct(pf, r1, r2, k_max=4)
