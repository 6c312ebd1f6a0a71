"""Injectivity of spherical means: reconstruction, counterexamples, two radii.

The reduced-twist spherical mean acts on the |beta| = k special Hermite block
as multiplication by c_k theta_k(r), c_k = k!(n-1)!/(k+n-1)!.  Reconstruction
inverts that scalar blockwise; a degree is unrecoverable from a radius set
exactly when every theta_k(r_i) vanishes (numerically: falls below a
threshold).  A single radius therefore never determines f: picking r so that
lam r^2 / 2 is a zero of L_k^{n-1} makes theta_k itself invisible to the mean
(the one-radius counterexample).  Two radii determine every f of tempered
growth iff r1^2/r2^2 avoids all ratios of Laguerre zeros (twisted part) and
r1/r2 avoids all ratios of Bessel J_{n-1} zeros (the untwisted central mode).
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .errors import (
    DimensionMismatch,
    InadmissibleRadii,
    NoUsableRadius,
    RangeExceeded,
    UnsupportedDimension,
)
from .grids import SampledField, default_grid, sample
from .special import (
    bessel_j,
    bessel_zeros,
    laguerre_zeros,
    mean_factor,
    theta_k,
    theta_radial,
)
from .transforms import (
    _matrix_coefficients,
    _multi_indices,
    _synthesize_values,
    angular_mode_coefficients,
    fourier_coefficient_center,
    reduced_mean,
    reduced_mean_at,
    values_from_mode_coefficients,
)

USABLE_RADIUS_THRESHOLD = 1e-8


@dataclass(frozen=True)
class RadialMeasure:
    """Finitely supported radial measure: sum_i weights[i] * (sphere of radius
    radii[i]).  With normalized=True the weights must be a probability vector
    (sum 1 to 1e-12); radii are strictly positive (no mass at the centre) and
    distinct; weights are positive."""

    radii: np.ndarray
    weights: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if r.ndim != 1 or r.shape != w.shape:
            raise DimensionMismatch("radii and weights must be matching 1-D arrays")
        if np.any(r <= 0):
            raise DimensionMismatch("radii must be positive")
        if np.unique(r).size != r.size:
            raise DimensionMismatch("radii must be distinct")
        if np.any(w < 0):
            raise DimensionMismatch("weights must be nonnegative")
        if self.normalized and abs(float(np.sum(w)) - 1.0) > 1e-12:
            raise DimensionMismatch("normalized measure weights must sum to 1")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "weights", w)

    @property
    def atoms(self):
        return tuple((float(r), float(w)) for r, w in zip(self.radii, self.weights))


def mu_hat_theta(mu, k, lambda_prime):
    """The pairing of the measure with the Laguerre kernel: sum_i w_i
    theta_k(r_i) — the scalar (up to c_k) the aggregated mean applies on
    the degree-k block, which annihilation must overcome."""
    vals = theta_radial(k, lambda_prime, mu.radii)
    return float(np.sum(mu.weights * vals))


def measure_mean_at(field, mu, lambda_prime, points, order=None):
    """Aggregated reduced-twist mean sum_i w_i (f x mu_{r_i}) at points."""
    out = 0.0
    for r, w in zip(mu.radii, mu.weights):
        out = out + w * reduced_mean_at(field, lambda_prime, r, points, order=order)
    return out


def measure_mean(field, mu, lambda_prime, order=None):
    """Aggregated reduced-twist mean as a field (n = 1)."""
    out = None
    for r, w in zip(mu.radii, mu.weights):
        m = reduced_mean(field, lambda_prime, r, order=order)
        out = m.with_values(w * m.values) if out is None else out.with_values(
            out.values + w * m.values
        )
    return out


@dataclass(frozen=True)
class ReconstructionResult:
    """Blockwise inversion of spherical means.

    divisor[k] is the scalar c_k theta_k(r) divided out on the degree-k block;
    its reciprocal is the condition number of that degree's recovery.
    recovered_norm[k] is the L2 norm of the recovered degree-k projection.
    """

    field: SampledField
    k_max: int
    used_radius: dict  # k -> radius chosen (None for aggregated measures)
    divisor: dict  # k -> the scalar divided out on block k
    recovered_norm: dict  # k -> L2 norm of the recovered block
    unrecoverable: tuple  # degrees whose divisors all fell below threshold
    threshold: float

    def condition_number(self, k):
        return 1.0 / abs(self.divisor[k]) if k in self.divisor else float("inf")


def _block_coefficients(mean_field, lam, k, alpha_max):
    g = mean_field.grid
    betas = [b for b in _multi_indices(g.n, k) if sum(b) == k]
    alphas = _multi_indices(g.n, alpha_max)
    pairs = [(a, b) for a in alphas for b in betas]
    coeffs = _matrix_coefficients(mean_field, pairs, lam)
    return pairs, coeffs


def _normalize_means(means, radii_hint):
    """Accept {radius: field}, [(radius, field), ...], or [field, ...] paired
    with an explicit radius list/RadialMeasure; return aligned lists."""
    if isinstance(means, dict):
        pairs = sorted(means.items())
        return [float(r) for r, _ in pairs], [f for _, f in pairs]
    means = list(means)
    if means and isinstance(means[0], (tuple, list)):
        return [float(r) for r, _ in means], [f for _, f in means]
    if radii_hint is None:
        raise DimensionMismatch("bare field list requires explicit radii")
    if isinstance(radii_hint, RadialMeasure):
        radii = [float(r) for r in radii_hint.radii]
    else:
        radii = [float(r) for r in np.atleast_1d(np.asarray(radii_hint, dtype=float))]
    if len(radii) != len(means):
        raise DimensionMismatch("radius list and mean list lengths differ")
    return radii, means


def reconstruct_from_means(means, lambda_prime, k_max, radii=None, alpha_max=None,
                           threshold=USABLE_RADIUS_THRESHOLD):
    """Recover f from its reduced-twist spherical means at several radii.

    `means` is a {radius: field} map, a sequence of (radius, field) pairs, or
    a bare field sequence paired with `radii` (a list or RadialMeasure).
    For each degree k the radius with the largest |c_k theta_k(r)| is used;
    degrees where every divisor falls below `threshold` are reported as
    unrecoverable (NoUsableRadius if that is all of them).
    """
    rlist, fields = _normalize_means(means, radii)
    if not fields:
        raise DimensionMismatch("need at least one (radius, mean field) pair")
    grid = fields[0].grid
    lam = np.atleast_1d(np.asarray(lambda_prime, dtype=float))
    n = grid.n
    if alpha_max is None:
        alpha_max = k_max + 2 * n + 4
    rarr = np.array(rlist, dtype=float)
    used_radius, divisor, recovered, unrecoverable, terms = {}, {}, {}, [], []
    for k in range(k_max + 1):
        ck = mean_factor(k, n)
        scalars = ck * theta_radial(k, lam, rarr)
        best = int(np.argmax(np.abs(scalars)))
        if abs(scalars[best]) < threshold:
            unrecoverable.append(k)
            continue
        used_radius[k] = float(rarr[best])
        divisor[k] = float(scalars[best])
        pairs, coeffs = _block_coefficients(fields[best], lam, k, alpha_max)
        terms += [(a, b, c / scalars[best]) for (a, b), c in zip(pairs, coeffs)]
        recovered[k] = float(np.linalg.norm(coeffs) / abs(scalars[best]))
    if not used_radius:
        raise NoUsableRadius(
            f"every degree up to {k_max} has |c_k theta_k(r)| < {threshold:g} "
            f"at all supplied radii"
        )
    vals = _synthesize_values(grid, lam, terms)
    field = SampledField(grid, vals, fields[0].metadata)
    return ReconstructionResult(field, k_max, used_radius, divisor, recovered,
                                tuple(unrecoverable), threshold)


def reconstruct_from_measure_mean(mean_field, mu, lambda_prime, k_max,
                                  alpha_max=None, threshold=USABLE_RADIUS_THRESHOLD):
    """Recover f from a single aggregated mean over a radial measure."""
    grid = mean_field.grid
    lam = np.atleast_1d(np.asarray(lambda_prime, dtype=float))
    n = grid.n
    if alpha_max is None:
        alpha_max = k_max + 2 * n + 4
    divisor, recovered, unrecoverable, terms = {}, {}, [], []
    for k in range(k_max + 1):
        scalar = mean_factor(k, n) * mu_hat_theta(mu, k, lam)
        if abs(scalar) < threshold:
            unrecoverable.append(k)
            continue
        divisor[k] = float(scalar)
        pairs, coeffs = _block_coefficients(mean_field, lam, k, alpha_max)
        terms += [(a, b, c / scalar) for (a, b), c in zip(pairs, coeffs)]
        recovered[k] = float(np.linalg.norm(coeffs) / abs(scalar))
    if not divisor:
        raise NoUsableRadius(
            f"the measure annihilates every degree up to {k_max}"
        )
    vals = _synthesize_values(grid, lam, terms)
    field = SampledField(grid, vals, mean_field.metadata)
    return ReconstructionResult(field, k_max, {k: None for k in divisor}, divisor,
                                recovered, tuple(unrecoverable), threshold)


@dataclass(frozen=True)
class OneRadiusCounterexample:
    """A nonzero field annihilated by the reduced-twist mean at one radius."""

    field: SampledField
    radius: float
    degree: int
    lambda_prime: np.ndarray
    mean_residual: float  # max |mean| at probe points, relative to max |field|


def one_radius_counterexample(l, lambda_prime, n=1, zero_index=0, grid=None,
                              probe_count=6, order=None, seed=7):
    """theta_l with r chosen so lam r^2 / 2 is a zero of L_l^{n-1}.

    The mean at that radius multiplies the whole block by c_l theta_l(r) = 0,
    so the returned nonzero field has identically vanishing mean; its residual
    is measured at seeded probe points.  Requires l >= 1 (theta_0 has no
    radial zero) and isotropic lambda_prime.
    """
    if l < 1:
        raise RangeExceeded("counterexample degree must be at least 1")
    lam = np.atleast_1d(np.asarray(lambda_prime, dtype=float))
    if lam.shape != (n,):
        raise DimensionMismatch(f"lambda_prime must have {n} components")
    if not np.allclose(lam, lam[0], rtol=0, atol=1e-14):
        raise RangeExceeded("one-radius counterexamples require isotropic twist")
    table = laguerre_zeros(l, n - 1)
    if zero_index < 0 or zero_index >= table.zeros.size:
        raise RangeExceeded(f"zero_index outside [0, {table.zeros.size - 1}]")
    x0 = table.zeros[zero_index]
    r = float(np.sqrt(2 * x0 / lam[0]))
    grid = grid or default_grid(n)
    field = sample(lambda z: theta_k(l, lam, z), grid,
                   metadata=f"laguerre block {l}")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.2, 0.5 * grid.r_max, (probe_count, n)) * np.exp(
        1j * rng.uniform(0, 2 * np.pi, (probe_count, n))
    )
    mean = reduced_mean_at(field, lam, r, pts, order=order)
    residual = float(np.max(np.abs(mean)) / field.max_abs())
    return OneRadiusCounterexample(field, r, int(l), lam, residual)


@dataclass(frozen=True)
class WeightedNorm:
    """Gaussian-weighted L^p norm of f(z) exp((1/4) sum lam_j |z_j|^2)."""

    value: float
    log_value: float
    p: float
    boundary_dominated: bool
    boundary_fraction: float


def weighted_norm(field, spec_or_lambda, p=2, boundary_tol=1e-8):
    """||f(z) e^{(1/4) sum mu_j |z_j|^2}||_p over the grid, p in [1, inf].

    spec_or_lambda is a SymplecticSpectrum (its diagonal mu is used; the field
    is taken in the rotated normal-form coordinates) or a positive n-vector.
    The weight exactly undoes the Gaussian factor of the Laguerre kernels, so
    finiteness of this norm is the tempered-growth condition under which a
    single admissible radius already determines the field.  Accumulation is
    log-domain (no overflow); the boundary_dominated flag reports when the
    outermost radial shell carries more than boundary_tol of the total, i.e.
    the grid truncates a non-negligible tail and the value is a lower bound.
    """
    g = field.grid
    lam = getattr(spec_or_lambda, "mu", spec_or_lambda)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if lam.shape != (g.n,) or np.any(lam <= 0):
        raise DimensionMismatch(f"need {g.n} positive weight components")
    p = float(p)
    if not (p >= 1):
        raise DimensionMismatch("p must be in [1, inf]")
    axes = g.coordinate_axes()
    expo = np.zeros(g.shape)
    for j in range(g.n):
        expo = expo + 0.25 * lam[j] * np.broadcast_to(np.abs(axes[j]) ** 2, g.shape)
    absf = np.abs(field.values)
    with np.errstate(divide="ignore"):
        logf = np.where(absf > 0, np.log(np.where(absf > 0, absf, 1.0)), -np.inf) + expo

    def edge_of(arr):
        # outermost radial shell of any coordinate
        if g.n == 1:
            return arr[-1]
        parts = [arr[-1].ravel(), arr[:-1, :, -1, :].ravel()]
        return np.concatenate(parts)

    if np.isinf(p):
        total = float(np.max(logf))
        edge = float(np.max(edge_of(logf))) if np.isfinite(total) else -np.inf
        frac = float(np.exp(edge - total)) if np.isfinite(total) else 0.0
        log_value = total
        value = float(np.exp(log_value))
        # the sup is boundary-dominated when it is (nearly) attained on the
        # outermost shell — the grid then truncates a growing profile
        return WeightedNorm(value, log_value, p, bool(frac > 0.999), frac)
    else:
        w = np.broadcast_to(g.quadrature_weights(), g.shape)
        logterm = p * logf + np.log(w)
        total = logsumexp(logterm)
        edge = logsumexp(edge_of(logterm))
        frac = float(np.exp(edge - total)) if np.isfinite(total) else 0.0
        log_value = float(total / p)
    value = float(np.exp(log_value))
    return WeightedNorm(value, log_value, p, bool(frac > boundary_tol), frac)


@dataclass(frozen=True)
class RadiiVerdict:
    """Admissibility of a radius pair for the two-radii theorem, searched to
    finite depth: admissible_within_bounds is NOT a certificate for all k."""

    r1: float
    r2: float
    admissible_within_bounds: bool
    laguerre_conflicts: tuple  # ((k_i, i, k_j, j, relative error), ...)
    bessel_conflicts: tuple  # ((i, j, relative error), ...)
    search_bounds: tuple  # (k_max, bessel_count, tol)
    anisotropic_best_effort: bool = False

    @property
    def admissible(self):
        return self.admissible_within_bounds

    @property
    def tolerance(self):
        return self.search_bounds[2]

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write("family,degree_i,index_i,degree_j,index_j,relative_error\n")
            for ki, i, kj, j, err in self.laguerre_conflicts:
                fh.write(f"laguerre,{ki},{i},{kj},{j},{err!r}\n")
            for i, j, err in self.bessel_conflicts:
                fh.write(f"bessel,,{i},,{j},{err!r}\n")


def _anisotropic_block_zeros(k, lam, r_max, sphere_order=16, scan_points=600):
    """Radial sign changes of the sphere-average of theta_k for anisotropic
    reduced twist, by bracketing + bisection on a dense radial scan."""
    from scipy.optimize import brentq

    from .grids import build_sphere_rule
    from .special import theta_k as _theta_k

    n = lam.size

    def profile(r):
        rule = build_sphere_rule(n, float(r), sphere_order)
        return float(np.real(np.sum(rule.weights * _theta_k(k, lam, rule.nodes))))

    rs = np.linspace(r_max / scan_points, r_max, scan_points)
    vals = np.array([profile(r) for r in rs])
    zeros = []
    for i in range(len(rs) - 1):
        if vals[i] == 0.0:
            zeros.append(float(rs[i]))
        elif vals[i] * vals[i + 1] < 0:
            zeros.append(float(brentq(profile, rs[i], rs[i + 1], xtol=1e-12)))
    return zeros


def two_radii_check(r1, r2, n=1, lambda_prime=None, k_max=30, bessel_count=60,
                    tol=1e-9):
    """Check the two-radii admissibility conditions to finite search depth.

    Condition (i): r1^2/r2^2 must avoid every ratio x_i/x_j of zeros of the
    Laguerre polynomials L_k^{n-1} (k <= k_max, zeros pooled across degrees) —
    for isotropic reduced twist the zero radii scale identically with the
    twist, so the ratios are twist-independent.  Condition (ii): r1/r2 must
    avoid every ratio of positive zeros of J_{n-1}.  Ratios are compared
    within relative tolerance tol.

    For genuinely anisotropic lambda_prime the degree-k block has no exact
    radial multiplier; the Laguerre scan is then replaced by a best-effort
    scan over radial sign changes of the sphere-averaged block kernel, and
    the verdict is flagged anisotropic_best_effort.
    """
    if r1 <= 0 or r2 <= 0:
        raise DimensionMismatch("radii must be positive")
    anisotropic = False
    if lambda_prime is not None:
        lam = np.atleast_1d(np.asarray(lambda_prime, dtype=float))
        if lam.shape != (n,) or np.any(lam <= 0):
            raise DimensionMismatch(f"lambda_prime must be {n} positive components")
        anisotropic = not np.allclose(lam, lam[0], rtol=0, atol=1e-14)
    target = (r1 / r2) ** 2
    lag_hits = []
    if not anisotropic:
        lag_pool = []
        for k in range(1, k_max + 1):
            t = laguerre_zeros(k, n - 1)
            lag_pool += [(k, i, z) for i, z in enumerate(t.zeros)]
        for ki, i, zi in lag_pool:
            for kj, j, zj in lag_pool:
                err = abs(zi / zj - target) / target
                if err < tol:
                    lag_hits.append((ki, i, kj, j, float(err)))
    else:
        # scan radii out to where the largest-degree kernel has all its
        # sign changes under the smallest twist component
        r_scan = float(np.sqrt(2 * laguerre_zeros(k_max, n - 1).zeros[-1] / lam.min())) * 1.05
        pool = []
        for k in range(1, k_max + 1):
            pool += [(k, i, z) for i, z in enumerate(_anisotropic_block_zeros(k, lam, r_scan))]
        for ki, i, zi in pool:
            for kj, j, zj in pool:
                err = abs((zi / zj) ** 2 - target) / target
                if err < tol:
                    lag_hits.append((ki, i, kj, j, float(err)))
    bz = bessel_zeros(n - 1, bessel_count).zeros
    targ_b = r1 / r2
    bes_hits = []
    for i, zi in enumerate(bz):
        for j, zj in enumerate(bz):
            err = abs(zi / zj - targ_b) / targ_b
            if err < tol:
                bes_hits.append((i, j, float(err)))
    return RadiiVerdict(float(r1), float(r2), not (lag_hits or bes_hits),
                        tuple(lag_hits), tuple(bes_hits),
                        (k_max, bessel_count, tol), anisotropic)


def inadmissible_radius_pair(n=1, degree_i=2, index_i=0, index_j=1, r2=1.0):
    """A radius pair that defeats the two-radii theorem: r1/r2 = sqrt(x_i/x_j)
    for two zeros of the same L_k^{n-1}, so theta_k can vanish at both radii."""
    t = laguerre_zeros(degree_i, n - 1)
    return float(r2 * np.sqrt(t.zeros[index_i] / t.zeros[index_j])), float(r2)


# ---------------------------------------------------------------------------
# Euclidean (untwisted) two-radii inversion for the central Fourier mode 0
# ---------------------------------------------------------------------------


def euclidean_mean(field, r, order=None):
    """Ordinary spherical mean over |xi| = r (zero twist), full grid, n = 1."""
    return reduced_mean_untwisted(field, r, order)


def reduced_mean_untwisted(field, r, order=None):
    g = field.grid
    if g.n != 1:
        raise UnsupportedDimension("untwisted full-grid means are implemented for n = 1")
    from .grids import FieldEvaluator, build_sphere_rule

    order = order or 64
    rule = build_sphere_rule(1, r, order)
    axes = g.coordinate_axes()
    z = np.broadcast_to(axes[0], g.shape).reshape(-1, 1)
    ev = FieldEvaluator(field)
    out = np.zeros(z.shape[0], dtype=complex)
    for gidx in range(rule.nodes.shape[0]):
        out += rule.weights[gidx] * ev(z - rule.nodes[gidx][None, :])
    return field.with_values(out.reshape(g.shape))


def euclidean_two_radii_invert(mean1, mean2, r1, r2, rho_max=None, rho_count=None):
    """Invert a pair of Euclidean circle means (n = 1) by Hankel division.

    Per angular mode m, the circle mean multiplies the order-m Hankel
    transform by J_0(r rho); at each frequency the radius with the larger
    |J_0(r_i rho)| is divided out.  The radii must pass the Bessel part of
    the admissibility check or a frequency can be invisible to both means.
    """
    g = mean1.grid
    if g.n != 1 or mean2.grid != g:
        raise DimensionMismatch("need two n = 1 means on a common grid")
    from numpy.polynomial.legendre import leggauss

    rho_max = rho_max or g.r_max
    rho_count = rho_count or 2 * len(g.radial_nodes[0])
    x, wq = leggauss(rho_count)
    rho = (x + 1) * (rho_max / 2)
    wrho = wq * (rho_max / 2)
    s = g.radial_nodes[0]
    ws = g.radial_weights[0] * s
    f1 = angular_mode_coefficients(mean1)
    f2 = angular_mode_coefficients(mean2)
    na = g.angular_counts[0]
    mnum = np.fft.fftfreq(na, 1.0 / na).astype(int)
    j1 = bessel_j(0, r1 * rho)
    j2 = bessel_j(0, r2 * rho)
    pick1 = np.abs(j1) >= np.abs(j2)
    div = np.where(pick1, j1, j2)
    out_hat = np.zeros_like(f1)
    amax = max(np.max(np.abs(f1)), np.max(np.abs(f2)), 1e-300)
    for idx, m in enumerate(mnum):
        if max(np.max(np.abs(f1[:, idx])), np.max(np.abs(f2[:, idx]))) < 1e-14 * amax:
            continue
        J = bessel_j(abs(m), np.outer(s, rho))  # J_{|m|}(s rho)
        G1 = (ws * f1[:, idx]) @ J  # Hankel transform of mean 1 at rho
        G2 = (ws * f2[:, idx]) @ J
        G = np.where(pick1, G1, G2) / div
        out_hat[:, idx] = J @ (wrho * rho * G)
    vals = values_from_mode_coefficients(g, out_hat)
    return mean1.with_values(vals)


# ---------------------------------------------------------------------------
# Full two-radii verification on the periodized group
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoRadiiReport:
    """Per-central-mode reconstruction diagnostics for a pair of radii.

    mode_details[ell] holds, for the twisted modes, the per-degree condition
    numbers 1/|c_k theta_k(r)|, recovered block norms, and the unrecoverable
    degree list; the ell = 0 (Euclidean Fourier-Bessel) path reports only its
    residual.
    """

    r1: float
    r2: float
    verdict: RadiiVerdict
    mode_errors: dict  # ell -> relative L2 reconstruction error
    mode_details: dict  # ell -> {unrecoverable, condition_numbers, recovered_norms}
    overall_error: float

    def to_json_dict(self):
        details = {}
        for ell, d in sorted(self.mode_details.items()):
            details[str(ell)] = {
                "unrecoverable": list(d["unrecoverable"]),
                "condition_numbers": {str(k): v for k, v in sorted(d["condition_numbers"].items())},
                "recovered_norms": {str(k): v for k, v in sorted(d["recovered_norms"].items())},
            }
        return {
            "r1": self.r1,
            "r2": self.r2,
            "admissible": self.verdict.admissible_within_bounds,
            "tolerance": self.verdict.tolerance,
            "mode_errors": {str(k): v for k, v in sorted(self.mode_errors.items())},
            "mode_details": details,
            "overall_error": self.overall_error,
        }


def two_radii_reconstruct(pfield, r1, r2, k_max=20, ell_max=2, order=None,
                          check=True, threshold=USABLE_RADIUS_THRESHOLD):
    """Reconstruct every central Fourier mode of a periodized field (n = 1,
    m = 1) from its spherical means at two radii, and report the residuals.

    Mode ell != 0 uses reduced-twist means with twist ell (negative twists are
    handled by conjugation symmetry); mode 0 uses the Euclidean Hankel
    inversion.  Raises InadmissibleRadii when check=True and the pair fails
    the admissibility conditions.
    """
    if pfield.grid.n != 1 or pfield.m != 1:
        raise UnsupportedDimension("two-radii verification is implemented for n = m = 1")
    verdict = two_radii_check(r1, r2, n=1, k_max=k_max)
    if check and not verdict.admissible_within_bounds:
        raise InadmissibleRadii(
            f"radius pair ({r1}, {r2}) collides with zero ratios; "
            f"{len(verdict.laguerre_conflicts)} laguerre and "
            f"{len(verdict.bessel_conflicts)} bessel conflicts"
        )
    mode_errors, mode_details = {}, {}
    sq_err, sq_tot = 0.0, 0.0
    for ell in range(-ell_max, ell_max + 1):
        comp = fourier_coefficient_center(pfield, [ell])
        nrm = comp.norm2()
        if nrm < 1e-13:
            continue
        result = None
        if ell == 0:
            m1 = reduced_mean_untwisted(comp, r1, order)
            m2 = reduced_mean_untwisted(comp, r2, order)
            recon = euclidean_two_radii_invert(m1, m2, r1, r2)
        else:
            m1 = reduced_mean(comp, [float(ell)], r1, order)
            m2 = reduced_mean(comp, [float(ell)], r2, order)
            if ell > 0:
                result = reconstruct_from_means([(r1, m1), (r2, m2)], [float(ell)],
                                                k_max, threshold=threshold)
                recon = result.field
            else:
                c1 = m1.with_values(np.conj(m1.values))
                c2 = m2.with_values(np.conj(m2.values))
                result = reconstruct_from_means([(r1, c1), (r2, c2)], [float(-ell)],
                                                k_max, threshold=threshold)
                recon = result.field.with_values(np.conj(result.field.values))
        err_field = comp.with_values(recon.values - comp.values)
        err = err_field.norm2()
        mode_errors[ell] = float(err / nrm)
        if result is not None:
            mode_details[ell] = {
                "unrecoverable": result.unrecoverable,
                "condition_numbers": {k: 1.0 / abs(v) for k, v in result.divisor.items()},
                "recovered_norms": dict(result.recovered_norm),
            }
        else:
            mode_details[ell] = {
                "unrecoverable": (),
                "condition_numbers": {},
                "recovered_norms": {},
            }
        sq_err += err**2
        sq_tot += nrm**2
    overall = float(np.sqrt(sq_err / sq_tot)) if sq_tot > 0 else 0.0
    return TwoRadiiReport(float(r1), float(r2), verdict, mode_errors, mode_details,
                          overall)
