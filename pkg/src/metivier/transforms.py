"""Twisted spherical means, twisted convolution, and Laguerre spectral analysis.

Phase conventions.  For a structure with pencil V_lambda, the twisted
spherical mean of f over the sphere of radius r is

    (f x mu_r)(x) = int_{|xi|=r} f(x - xi) exp((i/2) x^T V_lambda xi) dmu_r(xi)

with dmu_r the normalized surface measure.  After rotating coordinates into
the symplectic normal form the phase becomes the reduced form
(i/2) sum_j lam_j Im(z_j conj(w_j)) with lam the twist eigenvalues; means and
convolutions with that phase are the "reduced-twist" operations below, and
they accept any nonzero real lam (positivity is only needed by the special
functions).

Spectral analysis uses the scaled special Hermite functions Psi_{alpha,beta},
an orthonormal basis of L2(C^n) for each positive reduced twist.  Because
Psi_{alpha,beta} is a pure angular mode (beta_j - alpha_j in each coordinate),
all inner products reduce to contractions of the field's angular FFT
coefficients against closed-form radial profiles, which keeps decomposition
and synthesis cheap on product grids.
"""

from dataclasses import dataclass
from itertools import product as iter_product

import numpy as np

from .errors import (
    DimensionMismatch,
    GridTooCoarse,
    NotHomogeneous,
    NyquistViolation,
    RangeExceeded,
    TruncationDominates,
    UnsupportedDimension,
)
from .grids import (
    FieldEvaluator,
    PeriodicField,
    SampledField,
    angular_mode_coefficients,
    build_sphere_rule,
    values_from_mode_coefficients,
)
from .special import mean_factor, special_hermite_1d, theta_k
from .structures import real_from_complex, complex_from_real, v_lambda

DEFAULT_SPHERE_ORDER = {1: 64, 2: 16}


def _check_twist(lambda_prime, n):
    lam = np.atleast_1d(np.asarray(lambda_prime, dtype=float))
    if lam.shape != (n,):
        raise DimensionMismatch(f"reduced twist must have {n} components")
    if np.any(lam == 0):
        raise DimensionMismatch("reduced twist components must be nonzero")
    return lam


def twisted_mean_at(field, structure, lam, r, points, order=None):
    """Twisted spherical mean (full structure phase) at complex points (P, n)."""
    g = field.grid
    if structure.n != g.n:
        raise DimensionMismatch("structure and field dimensions differ")
    order = order or DEFAULT_SPHERE_ORDER.get(g.n)
    rule = build_sphere_rule(g.n, r, order)
    v = v_lambda(structure, lam)
    z = np.asarray(points, dtype=complex).reshape(-1, g.n)
    x = real_from_complex(z)  # (P, 2n)
    xi = rule.nodes_real()  # (K, 2n)
    ev = FieldEvaluator(field)
    phase = np.exp(0.5j * (x @ v) @ xi.T)  # (P, K)
    shifted = complex_from_real(x[:, None, :] - xi[None, :, :]).reshape(-1, g.n)
    fvals = ev(shifted).reshape(x.shape[0], xi.shape[0])
    return (fvals * phase) @ rule.weights


def reduced_mean_at(field, lambda_prime, r, points, order=None):
    """Reduced-twist spherical mean at complex points (P, n):
    phase (i/2) sum_j lam_j Im(z_j conj(w_j))."""
    g = field.grid
    lam = _check_twist(lambda_prime, g.n)
    order = order or DEFAULT_SPHERE_ORDER.get(g.n)
    rule = build_sphere_rule(g.n, r, order)
    z = np.asarray(points, dtype=complex).reshape(-1, g.n)
    ev = FieldEvaluator(field)
    phase = np.exp(0.5j * np.imag(z[:, None, :] * np.conj(rule.nodes)[None, :, :]) @ lam)
    shifted = (z[:, None, :] - rule.nodes[None, :, :]).reshape(-1, g.n)
    fvals = ev(shifted).reshape(z.shape[0], rule.nodes.shape[0])
    return (fvals * phase) @ rule.weights


def _grid_points(grid):
    axes = grid.coordinate_axes()
    return np.stack(np.broadcast_arrays(*axes), axis=-1).reshape(-1, grid.n)


def reduced_mean(field, lambda_prime, r, order=None):
    """Reduced-twist spherical mean as a field on the same grid (n = 1).

    The n = 2 full-grid mean is unsupported (the node count makes it
    impractical); use reduced_mean_at or the eigenfunction identity instead.
    """
    g = field.grid
    if g.n != 1:
        raise UnsupportedDimension("full-grid reduced means are implemented for n = 1")
    vals = reduced_mean_at(field, lambda_prime, r, _grid_points(g), order=order)
    return field.with_values(vals.reshape(g.shape))


def twisted_mean(field, structure, lam, r, order=None):
    """Twisted spherical mean (full structure phase) as a field (n = 1)."""
    g = field.grid
    if g.n != 1:
        raise UnsupportedDimension("full-grid twisted means are implemented for n = 1")
    vals = twisted_mean_at(field, structure, lam, r, _grid_points(g), order=order)
    return field.with_values(vals.reshape(g.shape))


# spec-facing aliases: the "lambda'-twisted" entry points take the reduced
# twist directly; the modified mean takes a symplectic normal form.
twisted_spherical_mean = twisted_mean
twisted_spherical_mean_at = twisted_mean_at
lambda_prime_mean = reduced_mean
lambda_prime_mean_at = reduced_mean_at


def modified_twisted_mean(field, spec, r, order=None):
    """Modified twisted mean: the reduced-twist mean at lambda' = mu(spec)."""
    return reduced_mean(field, spec.mu, r, order=order)


def modified_twisted_mean_at(field, spec, r, points, order=None):
    return reduced_mean_at(field, spec.mu, r, points, order=order)


def twisted_convolution_at(f, gfield, lambda_prime, points):
    """Reference twisted convolution (f x_lam g)(z) at complex points (P, n).

    Quadrature over the grid of gfield; f is evaluated by interpolation at
    z - w.  Quadratic cost: intended for verification at a few points.
    """
    grid = gfield.grid
    lam = _check_twist(lambda_prime, grid.n)
    z = np.asarray(points, dtype=complex).reshape(-1, grid.n)
    w = _grid_points(grid)
    qw = np.broadcast_to(grid.quadrature_weights(), grid.shape).ravel()
    gv = gfield.values.ravel()
    ev = FieldEvaluator(f)
    out = np.empty(z.shape[0], dtype=complex)
    for p in range(z.shape[0]):
        phase = 0.5 * np.imag(z[p][None, :] * np.conj(w)) @ lam
        out[p] = np.sum(qw * ev(z[p][None, :] - w) * gv * np.exp(1j * phase))
    return out


class RadialConvolver:
    """Fast twisted convolution of a fixed n = 1 field with radial kernels.

    Precomputes, for every angular mode of f and every pair of radii (s, t),
    the angular integral

        h_m(s, t) = int f_m(|s - t e^{i d}|) e^{i m arg(s - t e^{i d})}
                        e^{-(i/2) lam s t sin d} dd / (2 pi) * 2 pi

    so that (f x_lam g)(s e^{i phi}) = sum_m e^{i m phi}
    sum_t w_t t g(t) h_m(s, t) for any radial g sampled on the grid's radial
    nodes.  Exact up to interpolation and trapezoid error (both spectral).
    """

    def __init__(self, field, lambda_prime, angular_order=None):
        g = field.grid
        if g.n != 1:
            raise UnsupportedDimension("RadialConvolver is implemented for n = 1")
        self.grid = g
        lam = _check_twist(lambda_prime, 1)
        self.lam = float(lam[0])
        nd = angular_order or g.angular_counts[0]
        ev = FieldEvaluator(field)
        s = g.radial_nodes[0]
        t = g.radial_nodes[0]
        d = 2 * np.pi * np.arange(nd) / nd
        u = s[:, None, None] - t[None, :, None] * np.exp(1j * d[None, None, :])
        rho = np.abs(u).ravel()
        arg = np.angle(u)
        B = ev._radial_matrix(0, rho)  # (S*T*D, Nr)
        B[rho > g.r_max] = 0.0  # beyond the grid the field is treated as zero
        fm = B @ ev.fhat  # (S*T*D, M)
        fm = fm.reshape(len(s), len(t), nd, -1)
        phase = np.exp(
            1j * ev.modes[0][None, None, None, :] * arg[..., None]
            - 0.5j * self.lam * (s[:, None] * t[None, :])[:, :, None, None]
            * np.sin(d)[None, None, :, None]
        )
        self.h = np.sum(fm * phase, axis=2) * (2 * np.pi / nd)  # (S, T, M)
        self.modes = ev.modes[0]
        self.metadata = field.metadata

    def with_radial(self, gvals):
        """Convolve with the radial kernel sampled at the grid's radial nodes."""
        g = self.grid
        gvals = np.asarray(gvals, dtype=complex)
        if gvals.shape != (len(g.radial_nodes[0]),):
            raise DimensionMismatch("radial kernel must be sampled at the radial nodes")
        wt = g.radial_weights[0] * g.radial_nodes[0] * gvals
        out_m = np.einsum("t,stm->sm", wt, self.h)  # (S, M)
        na = g.angular_counts[0]
        fhat = np.zeros((len(g.radial_nodes[0]), na), dtype=complex)
        fhat[:, self.modes % na] = out_m
        vals = values_from_mode_coefficients(g, fhat)
        return SampledField(g, vals, self.metadata)


def convolve_radial(field, radial, lambda_prime, angular_order=None):
    """Twisted convolution (n = 1) of field with a radial kernel.

    `radial` is a callable evaluated at the grid's radial nodes, or an array
    of samples at those nodes.
    """
    conv = RadialConvolver(field, lambda_prime, angular_order)
    r = field.grid.radial_nodes[0]
    gvals = radial(r) if callable(radial) else np.asarray(radial)
    return conv.with_radial(gvals)


def twisted_convolution(f, g, lambda_prime, angular_order=None, truncation_tol=1e-6,
                        mode_tol=1e-13, chunk=8):
    """Full-grid twisted convolution (f x_lam g) on the shared grid (n = 1).

    Works in angular-mode space: an f-mode m and a g-mode q contribute only
    to the output mode m + q, so the convolution splits into per-mode-pair
    kernels over (|z|, |w|, angle difference).  Cost scales with the product
    of the two fields' angular band counts.
    """
    grid = f.grid
    if grid.n != 1:
        raise UnsupportedDimension("full-grid twisted convolution is implemented for n = 1")
    if g.grid != grid:
        raise GridMismatch("fields live on different grids")
    lam = float(_check_twist(lambda_prime, 1)[0])
    gmax = g.max_abs()
    edge = float(np.max(np.abs(g.values[-1, :])))
    if gmax > 0 and edge > truncation_tol * gmax:
        raise TruncationDominates(
            f"kernel carries {edge / gmax:.3e} of its peak at r_max; "
            f"the grid truncates the convolution integrand"
        )
    ev = FieldEvaluator(f, mode_tol=mode_tol)
    ghat = np.fft.fft(g.values, axis=1) / grid.angular_counts[0]
    na = grid.angular_counts[0]
    mnum = np.fft.fftfreq(na, 1.0 / na).astype(int)
    amp = np.max(np.abs(ghat), axis=0)
    keep = np.flatnonzero(amp >= mode_tol * (amp.max() or 1.0))
    g_modes = mnum[keep]
    g_rad = ghat[:, keep]  # (T, Q)
    s = grid.radial_nodes[0]
    t = grid.radial_nodes[0]
    nd = angular_order or na
    d = 2 * np.pi * np.arange(nd) / nd
    wq = np.exp(1j * np.outer(g_modes, d)) * (2 * np.pi / nd)  # (Q, D)
    wt = grid.radial_weights[0] * t  # measure t dt
    out_modes = {}
    for m in ev.modes[0]:
        for q in g_modes:
            tot = int(m + q)
            if abs(tot) > na // 2 - 1:
                raise NyquistViolation(
                    f"output mode {tot} exceeds the angular band of the grid"
                )
            out_modes.setdefault(tot, np.zeros(len(s), dtype=complex))
    for start in range(0, len(s), chunk):
        sc = s[start : start + chunk]
        u = sc[:, None, None] - t[None, :, None] * np.exp(1j * d[None, None, :])
        rho = np.abs(u).ravel()
        B = ev._radial_matrix(0, rho)
        B[rho > grid.r_max] = 0.0
        fm = (B @ ev.fhat).reshape(len(sc), len(t), nd, -1)
        phase = np.exp(
            1j * ev.modes[0][None, None, None, :] * np.angle(u)[..., None]
            - 0.5j * lam * (sc[:, None] * t[None, :])[:, :, None, None]
            * np.sin(d)[None, None, :, None]
        )
        fm = fm * phase  # (Sc, T, D, Mf)
        h = np.einsum("stdm,qd->stqm", fm, wq, optimize=True)  # (Sc, T, Q, Mf)
        contrib = np.einsum("t,tq,stqm->sqm", wt, g_rad, h, optimize=True)
        for qi, q in enumerate(g_modes):
            for mi, m in enumerate(ev.modes[0]):
                out_modes[int(m + q)][start : start + len(sc)] += contrib[:, qi, mi]
    fhat = np.zeros((len(s), na), dtype=complex)
    for tot, vals in out_modes.items():
        fhat[:, tot % na] += vals
    return SampledField(grid, values_from_mode_coefficients(grid, fhat), f.metadata)


# ---------------------------------------------------------------------------
# Laguerre / special Hermite spectral analysis
# ---------------------------------------------------------------------------


def _mode_index(m, na):
    """FFT index of angular mode m; NyquistViolation beyond the band."""
    if abs(m) > na // 2 - 1:
        raise NyquistViolation(f"angular mode {m} exceeds band of {na}-point axis")
    return m % na


def _radial_profiles(lam_j, radial_nodes, pairs):
    """Closed-form radial profiles R_{j,k}(s) with Psi_{j,k}(z) = R(|z|) e^{i(k-j) arg z}."""
    out = {}
    for (j, k) in pairs:
        out[(j, k)] = special_hermite_1d(j, k, lam_j, radial_nodes.astype(complex))
    return out


def matrix_coefficient(field, alpha, beta, lambda_prime):
    """(f, Psi_{alpha,beta}) via angular-mode contraction on the grid rule."""
    return _matrix_coefficients(field, [(tuple(np.atleast_1d(alpha)), tuple(np.atleast_1d(beta)))],
                                lambda_prime)[0]


def _matrix_coefficients(field, index_pairs, lambda_prime):
    g = field.grid
    lam = np.atleast_1d(np.asarray(lambda_prime, dtype=float))
    if lam.shape != (g.n,):
        raise DimensionMismatch(f"reduced twist must have {g.n} components")
    if np.any(lam <= 0):
        raise RangeExceeded("spectral analysis requires strictly positive reduced twist")
    fhat = angular_mode_coefficients(field)
    # per-coordinate profile cache
    needed = [set() for _ in range(g.n)]
    for a, b in index_pairs:
        for i in range(g.n):
            needed[i].add((a[i], b[i]))
    profiles = [
        _radial_profiles(lam[i], g.radial_nodes[i], sorted(needed[i])) for i in range(g.n)
    ]
    rw = [g.radial_weights[i] * g.radial_nodes[i] for i in range(g.n)]
    out = []
    for a, b in index_pairs:
        if g.n == 1:
            m = b[0] - a[0]
            idx = _mode_index(m, g.angular_counts[0])
            prof = np.conj(profiles[0][(a[0], b[0])]) * rw[0]
            out.append(2 * np.pi * np.sum(prof * fhat[:, idx]))
        else:
            m1 = _mode_index(b[0] - a[0], g.angular_counts[0])
            m2 = _mode_index(b[1] - a[1], g.angular_counts[1])
            p1 = np.conj(profiles[0][(a[0], b[0])]) * rw[0]
            p2 = np.conj(profiles[1][(a[1], b[1])]) * rw[1]
            out.append((2 * np.pi) ** 2 * np.einsum("i,j,ij->", p1, p2, fhat[:, m1, :, m2]))
    return np.array(out)


def _synthesize_values(grid, lam, terms):
    """Accumulate sum c * Psi_{a,b} in angular-mode space and invert the FFT."""
    needed = [set() for _ in range(grid.n)]
    for a, b, _ in terms:
        for i in range(grid.n):
            needed[i].add((a[i], b[i]))
    profiles = [
        _radial_profiles(lam[i], grid.radial_nodes[i], sorted(needed[i]))
        for i in range(grid.n)
    ]
    shape = []
    for i in range(grid.n):
        shape += [len(grid.radial_nodes[i]), grid.angular_counts[i]]
    fhat = np.zeros(shape, dtype=complex)
    for a, b, c in terms:
        if grid.n == 1:
            idx = _mode_index(b[0] - a[0], grid.angular_counts[0])
            fhat[:, idx] += c * profiles[0][(a[0], b[0])]
        else:
            m1 = _mode_index(b[0] - a[0], grid.angular_counts[0])
            m2 = _mode_index(b[1] - a[1], grid.angular_counts[1])
            fhat[:, m1, :, m2] += c * np.outer(
                profiles[0][(a[0], b[0])], profiles[1][(a[1], b[1])]
            )
    return values_from_mode_coefficients(grid, fhat)


def _multi_indices(n, total_max):
    """All multi-indices in N^n with |alpha| <= total_max."""
    out = []
    for a in iter_product(range(total_max + 1), repeat=n):
        if sum(a) <= total_max:
            out.append(a)
    return sorted(out, key=lambda a: (sum(a), a))


@dataclass(frozen=True)
class HermiteExpansion:
    """Truncated special Hermite expansion of a field.

    coefficients maps (alpha, beta) index tuples to (f, Psi_{alpha,beta}).
    The spectral degree of a term is |beta|: twisted convolution on the right
    (and in particular the reduced spherical mean) acts by a scalar on each
    fixed-|beta| block.
    """

    lambda_prime: np.ndarray
    k_max: int
    alpha_max: int
    coefficients: dict
    captured_energy: float
    total_energy: float

    def degree_energy(self, k):
        return float(
            sum(abs(c) ** 2 for (_, b), c in self.coefficients.items() if sum(b) == k)
        )

    def degree_terms(self, k):
        return [(a, b, c) for (a, b), c in self.coefficients.items() if sum(b) == k]


def expand_special_hermite(field, lambda_prime, k_max, alpha_max=None, tail_tol=None):
    """Expand a field over Psi_{alpha,beta} with |beta| <= k_max, |alpha| <= alpha_max.

    When tail_tol is given, raises TruncationDominates if the expansion
    captures less than (1 - tail_tol) of the field's squared norm.
    """
    g = field.grid
    lam = np.atleast_1d(np.asarray(lambda_prime, dtype=float))
    if alpha_max is None:
        alpha_max = k_max + 2 * g.n
    alphas = _multi_indices(g.n, alpha_max)
    betas = _multi_indices(g.n, k_max)
    pairs = [(a, b) for a in alphas for b in betas]
    coeffs = _matrix_coefficients(field, pairs, lam)
    d = {p: c for p, c in zip(pairs, coeffs)}
    captured = float(np.sum(np.abs(coeffs) ** 2))
    total = field.norm2() ** 2
    if tail_tol is not None and captured < (1 - tail_tol) * total:
        raise TruncationDominates(
            f"expansion captures {captured:.6e} of {total:.6e}; "
            f"raise k_max/alpha_max or loosen tail_tol"
        )
    return HermiteExpansion(lam, k_max, alpha_max, d, captured, total)


def synthesize_expansion(expansion, grid, metadata=""):
    """Field synthesis of a HermiteExpansion on the given grid."""
    terms = [(a, b, c) for (a, b), c in expansion.coefficients.items()]
    return SampledField(grid, _synthesize_values(grid, expansion.lambda_prime, terms), metadata)


MAX_TRUNCATION = {1: 40, 2: 12}


@dataclass(frozen=True)
class LaguerreSpectrum:
    """Laguerre spectral projections of a field: the terms of the series
    f = (prod lam_j / 2 pi) sum_k f x_lam theta_k.

    projections[k] holds f x_lam theta_k (normalized=False, the raw series
    term) or its (prod lam_j / 2 pi) multiple (normalized=True).
    """

    lambda_prime: np.ndarray
    k_max: int
    projections: tuple
    normalized: bool

    def __post_init__(self):
        if self.k_max != len(self.projections) - 1:
            raise DimensionMismatch("need exactly k_max + 1 projections")


def decompose(field, lambda_prime, k_max=None, tail_tol=None):
    """All Laguerre projections f x_lam theta_k for k <= k_max.

    Computed through the orthonormal special Hermite expansion (the two agree:
    f x_lam theta_k = prod_j (2 pi / lam_j) * projection onto the |beta| = k
    block).  Raises TruncationDominates when tail_tol is given and the last
    term still carries more than tail_tol of the field's norm.
    """
    g = field.grid
    lam = np.atleast_1d(np.asarray(lambda_prime, dtype=float))
    if k_max is None:
        k_max = 30 if g.n == 1 else 10
    if k_max < 0 or k_max > MAX_TRUNCATION.get(g.n, 0):
        raise RangeExceeded(
            f"truncation {k_max} outside [0, {MAX_TRUNCATION.get(g.n)}] for n={g.n}"
        )
    prefactor = float(np.prod(2 * np.pi / lam))
    projections = []
    for k in range(k_max + 1):
        p = spectral_projection(field, lam, k)
        projections.append(p.with_values(prefactor * p.values))
    spectrum = LaguerreSpectrum(lam, k_max, tuple(projections), False)
    if tail_tol is not None:
        fn = field.norm2()
        tail = projections[-1].norm2() / prefactor
        if fn > 0 and tail > tail_tol * fn:
            raise TruncationDominates(
                f"last projection carries {tail / fn:.3e} of the field norm; "
                f"raise k_max or loosen tail_tol"
            )
    return spectrum


def write_spectrum(spectrum, directory):
    """Serialize a LaguerreSpectrum: one field file per projection plus a JSON
    manifest (lambda_prime, normalization flag, per-degree file name and norm)."""
    import json
    import os

    from .fieldio import write_field

    os.makedirs(directory, exist_ok=True)
    entries = []
    for k, p in enumerate(spectrum.projections):
        name = f"projection_{k:03d}.field"
        write_field(p, os.path.join(directory, name))
        entries.append({"k": k, "file": name, "norm": p.norm2()})
    manifest = {
        "version": 1,
        "kind": "laguerre-spectrum",
        "lambda_prime": [float(v) for v in spectrum.lambda_prime],
        "k_max": spectrum.k_max,
        "normalized": spectrum.normalized,
        "projections": entries,
    }
    with open(os.path.join(directory, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_spectrum(directory):
    """Inverse of write_spectrum."""
    import json
    import os

    from .errors import MalformedFile, VersionMismatch
    from .fieldio import read_field

    path = os.path.join(directory, "manifest.json")
    try:
        with open(path) as fh:
            manifest = json.load(fh)
    except (OSError, ValueError) as exc:
        raise MalformedFile(f"cannot read spectrum manifest {path}: {exc}") from exc
    if manifest.get("kind") != "laguerre-spectrum":
        raise MalformedFile(f"{path} is not a spectrum manifest")
    if manifest.get("version") != 1:
        raise VersionMismatch(f"unsupported spectrum manifest version in {path}")
    entries = sorted(manifest["projections"], key=lambda e: e["k"])
    if [e["k"] for e in entries] != list(range(manifest["k_max"] + 1)):
        raise MalformedFile(f"{path} lists degrees inconsistent with k_max")
    projections = tuple(
        read_field(os.path.join(directory, e["file"])) for e in entries
    )
    return LaguerreSpectrum(
        np.asarray(manifest["lambda_prime"], dtype=float),
        int(manifest["k_max"]),
        projections,
        bool(manifest["normalized"]),
    )


def synthesize(spectrum):
    """Sum the Laguerre series, applying the prod(lam_j)/2pi prefactor if pending."""
    scale = 1.0 if spectrum.normalized else float(
        np.prod(spectrum.lambda_prime / (2 * np.pi))
    )
    first = spectrum.projections[0]
    acc = np.zeros(first.grid.shape, dtype=complex)
    for p in spectrum.projections:
        acc += p.values
    return first.with_values(scale * acc)


def spectral_projection(field, lambda_prime, k, alpha_max=None):
    """Projection of the field onto the k-th Laguerre block (|beta| = k).

    Equals (prod lam_j / 2 pi) f x_lam theta_k; computed as the orthonormal
    expansion over Psi_{alpha,beta} with |beta| = k.
    """
    g = field.grid
    lam = np.atleast_1d(np.asarray(lambda_prime, dtype=float))
    if alpha_max is None:
        alpha_max = k + 2 * g.n + 4
    betas = [b for b in _multi_indices(g.n, k) if sum(b) == k]
    alphas = _multi_indices(g.n, alpha_max)
    pairs = [(a, b) for a in alphas for b in betas]
    coeffs = _matrix_coefficients(field, pairs, lam)
    terms = [(a, b, c) for (a, b), c in zip(pairs, coeffs)]
    return field.with_values(_synthesize_values(g, lam, terms))


def mean_eigenvalue(k, n, lambda_prime, r):
    """Eigenvalue of the reduced-twist mean on the k-th eigenspace (isotropic
    twist): theta_k x_lam mu_r = c_k theta_k(r-sphere value) theta_k, with
    c_k = k!(n-1)!/(k+n-1)!."""
    lam = np.atleast_1d(np.asarray(lambda_prime, dtype=float))
    if not np.allclose(lam, lam[0], rtol=0, atol=1e-14):
        raise RangeExceeded("the mean acts as a scalar only for isotropic twist")
    from .special import theta_radial

    return mean_factor(k, lam.size) * float(theta_radial(k, lam, np.array(r)))


def homogeneity_modes(field):
    """Energy by total angular homogeneity degree: dict m -> squared norm share."""
    g = field.grid
    fhat = angular_mode_coefficients(field)
    # energy per joint angular mode via Parseval on each angular axis
    p = np.abs(fhat) ** 2
    for i in range(g.n):
        rw = g.radial_weights[i] * g.radial_nodes[i]
        shape = [1] * p.ndim
        shape[2 * i] = rw.size
        p = p * rw.reshape(shape) * (2 * np.pi)
    energies = {}
    if g.n == 1:
        per_mode = p.sum(axis=0)
        mnum = np.fft.fftfreq(g.angular_counts[0], 1.0 / g.angular_counts[0]).astype(int)
        for m, val in zip(mnum, per_mode):
            energies[int(m)] = energies.get(int(m), 0.0) + float(val)
    else:
        per_mode = p.sum(axis=(0, 2))
        m1 = np.fft.fftfreq(g.angular_counts[0], 1.0 / g.angular_counts[0]).astype(int)
        m2 = np.fft.fftfreq(g.angular_counts[1], 1.0 / g.angular_counts[1]).astype(int)
        for i1, a in enumerate(m1):
            for i2, b in enumerate(m2):
                tot = int(a + b)
                energies[tot] = energies.get(tot, 0.0) + float(per_mode[i1, i2])
    return energies


def m_radialize(field, m_index):
    """Projection onto the joint angular mode m_index (one integer per complex
    coordinate): R_m f(z) = (2 pi)^{-n} int f(e^{i theta} z) e^{-i m.theta} d theta,
    exact on the grid via the per-coordinate discrete Fourier transform."""
    g = field.grid
    m = np.atleast_1d(np.asarray(m_index, dtype=int))
    if m.shape != (g.n,):
        raise DimensionMismatch(f"m_index must have {g.n} components")
    fhat = angular_mode_coefficients(field)
    for i in range(g.n):
        idx = _mode_index(int(m[i]), g.angular_counts[i])
        mask = np.zeros(g.angular_counts[i], dtype=float)
        mask[idx] = 1.0
        shape = [1] * fhat.ndim
        shape[2 * i + 1] = g.angular_counts[i]
        fhat = fhat * mask.reshape(shape)
    return field.with_values(values_from_mode_coefficients(g, fhat))


def joint_homogeneity_modes(field):
    """Energy per joint angular mode: dict (m_1, ..., m_n) -> squared norm share."""
    g = field.grid
    fhat = angular_mode_coefficients(field)
    p = np.abs(fhat) ** 2
    for i in range(g.n):
        rw = g.radial_weights[i] * g.radial_nodes[i]
        shape = [1] * p.ndim
        shape[2 * i] = rw.size
        p = p * rw.reshape(shape) * (2 * np.pi)
    p = p.sum(axis=tuple(range(0, p.ndim, 2)))
    axes = [
        np.fft.fftfreq(c, 1.0 / c).astype(int) for c in g.angular_counts
    ]
    energies = {}
    for idx in np.ndindex(*p.shape):
        val = float(p[idx])
        if val > 0.0:
            key = tuple(int(axes[i][idx[i]]) for i in range(g.n))
            energies[key] = energies.get(key, 0.0) + val
    return energies


def homogeneous_projection_expand(field, k, lambda_prime, m=None,
                                  homogeneity_tol=1e-8):
    """Sparse spectral projection of a jointly homogeneous field.

    When f(e^{i theta} z) = e^{i m.theta} f(z) only the basis functions with
    beta - alpha = m contribute, so the |beta| = k block reduces to

        f x_lam theta_k = prod_j (2 pi / lam_j)
                          sum_{|beta| = k} (f, Psi_{beta-m, beta}) Psi_{beta-m, beta}

    with terms where beta - m has a negative component skipped.  m is inferred
    from the dominant joint angular mode when omitted; raises NotHomogeneous
    if ||f - R_m f|| exceeds homogeneity_tol * ||f||.  Returns (coefficient
    dict keyed by (alpha, beta), reconstructed projection field).
    """
    g = field.grid
    lam = np.atleast_1d(np.asarray(lambda_prime, dtype=float))
    if m is None:
        energies = joint_homogeneity_modes(field)
        if not energies:
            raise NotHomogeneous("zero field has no homogeneity degree")
        m = max(energies, key=energies.get)
    m = np.atleast_1d(np.asarray(m, dtype=int))
    if m.shape != (g.n,):
        raise DimensionMismatch(f"m must have {g.n} components")
    radial = m_radialize(field, m)
    fn = field.norm2()
    off = field.with_values(field.values - radial.values).norm2()
    if fn > 0 and off > homogeneity_tol * fn:
        raise NotHomogeneous(
            f"||f - R_m f|| / ||f|| = {off / fn:.3e} for m = {tuple(int(v) for v in m)}"
        )
    betas = [b for b in _multi_indices(g.n, k) if sum(b) == k]
    pairs = []
    for b in betas:
        a = tuple(int(bi - mi) for bi, mi in zip(b, m))
        if all(ai >= 0 for ai in a):
            pairs.append((a, b))
    coeffs = _matrix_coefficients(field, pairs, lam) if pairs else np.zeros(0, complex)
    terms = [(a, b, c) for (a, b), c in zip(pairs, coeffs)]
    prefactor = float(np.prod(2 * np.pi / lam))
    recon = field.with_values(prefactor * _synthesize_values(g, lam, terms))
    return {p: c for p, c in zip(pairs, coeffs)}, recon


def apply_twisted_laplacian(field, lambda_prime, points=None, h=1.0 / 64, check_tol=1e-3):
    """Apply L = -Delta + (1/4) sum lam_j^2 |z_j|^2 + i sum lam_j (x_j d_{y_j} - y_j d_{x_j}).

    Finite differences of step h on the interpolated field, with a Richardson
    consistency check at h/2 (GridTooCoarse on disagreement).  Psi_{alpha,beta}
    is an eigenfunction with eigenvalue sum_j (2 alpha_j + 1) lam_j.

    With points=None (n = 1 only) returns a field on the grid; otherwise
    returns values at the given complex points (P, n).
    """
    g = field.grid
    lam = _check_twist(lambda_prime, g.n)
    ev = FieldEvaluator(field)
    if points is None:
        if g.n != 1:
            raise UnsupportedDimension("full-grid Laplacian is implemented for n = 1; pass points")
        pts = _grid_points(g)
    else:
        pts = np.asarray(points, dtype=complex).reshape(-1, g.n)
    x = real_from_complex(pts)  # (P, 2n)

    def apply_at(step):
        f0 = ev(pts)
        lap = np.zeros_like(f0)
        rot = np.zeros_like(f0)
        for d in range(2 * g.n):
            e = np.zeros(2 * g.n)
            e[d] = step
            fp = ev(complex_from_real(x + e))
            fm = ev(complex_from_real(x - e))
            lap += (fp - 2 * f0 + fm) / step**2
            deriv = (fp - fm) / (2 * step)
            j = d % g.n
            if d < g.n:  # d/dx_j enters the rotation term with -y_j
                rot += -lam[j] * x[:, g.n + j] * deriv
            else:  # d/dy_j enters with +x_j
                rot += lam[j] * x[:, j] * deriv
        pot = 0.25 * (np.abs(pts) ** 2 @ lam**2) * f0
        return -lap + pot + 1j * rot

    coarse = apply_at(h)
    fine = apply_at(h / 2)
    scale = max(np.max(np.abs(fine)), 1e-300)
    disagreement = float(np.max(np.abs(fine - coarse)) / scale)
    if disagreement > check_tol:
        raise GridTooCoarse(
            f"finite-difference halving changed the result by {disagreement:.3e}"
        )
    # second-order stencils: Richardson extrapolation (4 fine - coarse) / 3
    result = (4 * fine - coarse) / 3
    if points is None:
        return field.with_values(result.reshape(g.shape))
    return result


def fourier_coefficient_center(pfield, ell):
    """Partial Fourier coefficient in the center variables:
    f^ell(z) = int_{[0, 2 pi]^m} f(z, t) e^{i ell . t} dt, by the exact DFT."""
    ell = np.atleast_1d(np.asarray(ell, dtype=int))
    if ell.shape != (pfield.m,):
        raise DimensionMismatch(f"ell must have {pfield.m} components")
    vals = pfield.values
    for i in range(pfield.m):
        c = pfield.center_counts[i]
        if abs(int(ell[i])) > c // 2 - 1:
            raise NyquistViolation(f"center mode {ell[i]} exceeds band of {c}-point axis")
        t = pfield.center_angles(i)
        phase = np.exp(1j * ell[i] * t) * (2 * np.pi / c)
        vals = np.tensordot(vals, phase, axes=([2 * pfield.grid.n], [0]))
    return SampledField(pfield.grid, vals, pfield.metadata)
