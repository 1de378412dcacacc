"""Exact MISE analysis in the Fourier domain, with Monte Carlo validation.

Every estimator here is a kernel average, so its mean integrated squared
error has a closed per-degree form.  Writing prof_ell for the density's
per-degree energy (matrix norm over (2 ell+1)) and Xihat_ell for the kernel
multiplier,

    MISE = sum_{ell>=1} (2 ell+1)^2 [ prof (1-Xihat)^2 + Xihat^2 (1-prof)/K ].

The profile array fixes the analysis band: degrees beyond its length do not
enter any sum, and kernel coefficients are zero-padded or truncated to match.
Minimizing per degree over Xihat gives the kernel-independent lower bound and
the optimal multiplier Xihat* = K prof / ((K-1) prof + 1).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .estimators import characteristic_spectrum, kernel_band
from .kernels import KernelSpec
from .sampling import sample_mixture
from .transform import QuadratureGrid, synthesize

__all__ = [
    "mise",
    "bias_variance_split",
    "wavelet_mise",
    "wavelet_mise_first_order",
    "optimal_mise_bound",
    "optimal_kernel_coefficients",
    "monte_carlo_ise",
    "monte_carlo_ise_study",
    "MiseCurve",
]


def _banded(profile, kernel_coeffs):
    prof = np.asarray(profile, dtype=float)
    if prof.ndim != 1 or prof.shape[0] < 1:
        raise ValueError("profile must be a 1-d array with the degree-0 entry")
    xi = np.zeros_like(prof)
    src = np.asarray(kernel_coeffs, dtype=float)
    n = min(prof.shape[0], src.shape[0])
    xi[:n] = src[:n]
    return prof, xi


def bias_variance_split(profile, kernel_coeffs, K):
    """(squared bias, variance) of the kernel estimate; their sum is the MISE.

    The bias term is sample-size free; the variance term carries the entire
    1/K dependence.
    """
    if K < 1:
        raise ValueError("sample size must be >= 1")
    prof, xi = _banded(profile, kernel_coeffs)
    ell = np.arange(prof.shape[0])
    w = (2.0 * ell + 1.0) ** 2
    bias_sq = float(np.sum(w[1:] * prof[1:] * (1.0 - xi[1:]) ** 2))
    variance = float(np.sum(w[1:] * xi[1:] ** 2 * (1.0 - prof[1:]))) / K
    return bias_sq, variance


def mise(profile, kernel_coeffs, K):
    """Exact mean integrated squared error of the kernel estimate."""
    bias_sq, variance = bias_variance_split(profile, kernel_coeffs, K)
    return bias_sq + variance


def wavelet_mise(profile, t, K):
    """MISE of the scale-integrated wavelet estimator, i.e. heat smoothing at t.

    Identical to mise(profile, heat_coefficients(t, band), K) on the profile's
    band; kept separate because the closed form below is what the first-order
    expansion and the small-t limit are statements about.
    """
    if t < 0:
        raise ValueError("scale must be >= 0")
    prof, _ = _banded(profile, [1.0])
    ell = np.arange(prof.shape[0])
    a = ell * (ell + 1.0)
    w = (2.0 * ell + 1.0) ** 2
    xi = np.exp(-a * t)
    total = w[1:] * (prof[1:] * (1.0 - xi[1:]) ** 2 + xi[1:] ** 2 * (1.0 - prof[1:]) / K)
    return float(np.sum(total))


def wavelet_mise_first_order(profile, t, K):
    """First-order expansion of wavelet_mise in the scale t.

    Expanding e^{-a t} to first order gives, per degree,
    (1 - 2 a t)/K + prof (2 a t (1 + K) - 1)/K; at t = 0 this reproduces the
    exact small-scale limit sum (2 ell+1)^2 (1 - prof)/K.
    """
    if K < 1:
        raise ValueError("sample size must be >= 1")
    prof, _ = _banded(profile, [1.0])
    ell = np.arange(prof.shape[0])
    a = ell * (ell + 1.0)
    w = (2.0 * ell + 1.0) ** 2
    terms = (1.0 - 2.0 * a * t) / K + prof * (2.0 * a * t * (1.0 + K) - 1.0) / K
    return float(np.sum(w[1:] * terms[1:]))


def optimal_kernel_coefficients(profile, K):
    """Per-degree minimizer Xihat* = K prof / ((K-1) prof + 1)."""
    prof = np.asarray(profile, dtype=float)
    out = K * prof / ((K - 1.0) * prof + 1.0)
    out[0] = 1.0
    return out


def optimal_mise_bound(profile, K):
    """Kernel-independent lower bound: the MISE at the per-degree minimizer."""
    if K < 1:
        raise ValueError("sample size must be >= 1")
    prof, _ = _banded(profile, [1.0])
    ell = np.arange(prof.shape[0])
    w = (2.0 * ell + 1.0) ** 2
    terms = prof * (1.0 - prof) / ((K - 1.0) * prof + 1.0)
    return float(np.sum(w[1:] * terms[1:]))


def _kernel_of(spec):
    return spec.kernel if hasattr(spec, "kernel") and not isinstance(spec, KernelSpec) else spec


def monte_carlo_ise_study(m, specs, K, trials, seed, grid=None):
    """Monte Carlo ISE for several estimators on shared per-trial samples.

    Returns (means, stderrs) arrays aligned with `specs`.  Each trial draws one
    sample of size K, forms each estimate on the quadrature grid, and
    integrates (zeta - f)^2 exactly (both factors are band-limited within the
    grid).  Trials are seeded from spawned child sequences, so a fixed seed
    fixes every sample regardless of how many estimators share it.
    """
    kernels = [_kernel_of(s) for s in specs]
    if grid is None:
        grid = QuadratureGrid(m.lmax)
    if m.lmax > grid.L:
        raise ValueError("grid bandlimit below the mixture band")
    f_grid = synthesize(grid, m.full_spectrum(grid.L))
    band = min(grid.L, max(kernel_band(k) for k in kernels))
    coeff_rows = [k.coefficients(band) for k in kernels]
    children = np.random.SeedSequence(seed).spawn(trials)
    ises = np.empty((trials, len(kernels)))
    for i, child in enumerate(children):
        sample = sample_mixture(m, K, seed=child)
        # one empirical spectrum per trial covers every estimator band
        phi = characteristic_spectrum(sample, band)
        for j, coeffs in enumerate(coeff_rows):
            zeta = synthesize(grid, phi.scale_per_degree(coeffs))
            ises[i, j] = grid.integrate((zeta - f_grid) ** 2)
    means = ises.mean(axis=0)
    stderrs = ises.std(axis=0, ddof=1) / np.sqrt(trials)
    return means, stderrs


def monte_carlo_ise(m, spec, K, trials, seed, grid=None):
    """(mean ISE, standard error) of one estimator over `trials` fresh samples."""
    means, stderrs = monte_carlo_ise_study(m, [spec], K, trials, seed, grid=grid)
    return float(means[0]), float(stderrs[0])


@dataclass(frozen=True)
class MiseCurve:
    """Rows of (kernel label, bandwidth, K, mise, optimal bound) for one study."""

    rows: tuple

    HEADER = ("kernel", "bandwidth", "K", "mise", "optimal_bound")

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        for r in self.rows:
            if len(r) != 5:
                raise ValueError("each row is (kernel, bandwidth, K, mise, bound)")

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.HEADER)
            for kernel, bw, K, value, bound in self.rows:
                w.writerow(
                    [kernel, f"{bw:.17g}", f"{K:.17g}", f"{value:.17g}", f"{bound:.17g}"]
                )

    @classmethod
    def from_csv(cls, path):
        rows = []
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != list(cls.HEADER):
                raise ValueError(f"{path}: expected header {','.join(cls.HEADER)}")
            for lineno, row in enumerate(reader, start=2):
                if len(row) != 5:
                    raise ValueError(f"{path}: line {lineno}: expected 5 fields")
                try:
                    rows.append(
                        (row[0], float(row[1]), float(row[2]), float(row[3]), float(row[4]))
                    )
                except ValueError:
                    raise ValueError(f"{path}: line {lineno}: non-numeric field") from None
        return cls(tuple(rows))
