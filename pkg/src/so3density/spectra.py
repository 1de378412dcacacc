"""Fourier data on SO(3): zonal coefficient arrays, full matrix spectra, and
zonal mixtures.

Normalization.  A function expands as

    f(x) = sum_ell (2*ell+1) sum_{n,m} fhat_{nm} D^ell_{nm}(x),
    fhat_{nm} = integral f(x) conj(D^ell_{nm}(x)) dx,

with the Haar integral normalized to total mass 1.  Parseval then reads
``||f||^2 = sum_ell (2*ell+1) sum_{nm} |fhat_{nm}|^2``.  A zonal (conjugation
invariant) function has diagonal spectrum fhat_{nm} = a_ell delta_{nm} and is
represented here by the plain 1-D array ``a`` of those scalars, so

    f(omega) = sum_ell (2*ell+1) a_ell chi^ell(omega),
    ||f||^2  = sum_ell (2*ell+1)^2 a_ell^2,

and the squared degree-ell Fourier magnitude of a general f,

    prof[ell] = (2*ell+1)^{-1} sum_{nm} |fhat_{nm}|^2,

reduces to a_ell^2 in the zonal case.  Convolution multiplies spectra
entrywise: (f * h)^hat = fhat hhat.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .harmonics import L_MAX, characters_all, wigner_D_of_rotation
from .rotations import Rotation, quat_cos_half_between

__all__ = [
    "zonal_synthesize",
    "zonal_energy",
    "zonal_convolve",
    "energy_per_degree",
    "FullSpectrum",
    "MixtureComponent",
    "ZonalMixture",
]


def zonal_synthesize(coeffs, cos_half):
    """Evaluate sum_ell (2*ell+1) coeffs[ell] chi^ell at cos(omega/2) values.

    Fused with the Chebyshev recurrence so no (L+1, N) table is formed; this
    is the inner loop of every zonal kernel evaluation.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    t = np.asarray(cos_half, dtype=float)
    L = coeffs.shape[0] - 1
    acc = coeffs[0] * np.ones_like(t)
    if L == 0:
        return acc
    u_prev = np.ones_like(t)
    u = 2.0 * t
    for k in range(2, 2 * L + 1):
        u, u_prev = 2.0 * t * u - u_prev, u
        if k % 2 == 0:
            acc += (k + 1.0) * coeffs[k // 2] * u
    return acc


def zonal_energy(coeffs):
    """Squared L2 norm sum_ell (2*ell+1)^2 coeffs[ell]^2."""
    coeffs = np.asarray(coeffs, dtype=float)
    w = 2.0 * np.arange(coeffs.shape[0]) + 1.0
    return float(np.sum((w * coeffs) ** 2))


def energy_per_degree(coeffs):
    """Per-degree profile a_ell^2 of a zonal coefficient array."""
    coeffs = np.asarray(coeffs, dtype=float)
    return coeffs**2


def zonal_convolve(a, b):
    """Spectrum of the convolution of two zonal functions (entrywise product).

    The result is truncated to the shorter of the two inputs.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = min(a.shape[0], b.shape[0])
    return a[:n] * b[:n]


def _pad(coeffs, L):
    out = np.zeros(L + 1)
    n = min(L + 1, coeffs.shape[0])
    out[:n] = coeffs[:n]
    return out


class FullSpectrum:
    """Matrix Fourier coefficients, one (2*ell+1, 2*ell+1) complex block per
    degree ell = 0..lmax."""

    __slots__ = ("blocks",)

    def __init__(self, blocks):
        blocks = [np.asarray(b, dtype=complex) for b in blocks]
        for ell, b in enumerate(blocks):
            if b.shape != (2 * ell + 1, 2 * ell + 1):
                raise ValueError(
                    f"block {ell} must have shape {(2 * ell + 1, 2 * ell + 1)}, got {b.shape}"
                )
        if len(blocks) - 1 > L_MAX:
            raise ValueError(f"spectrum degree exceeds L_MAX = {L_MAX}")
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("FullSpectrum is immutable")

    @property
    def lmax(self):
        return len(self.blocks) - 1

    @property
    def n_coefficients(self):
        return sum(b.size for b in self.blocks)

    def __getitem__(self, ell):
        return self.blocks[ell]

    @classmethod
    def zeros(cls, L):
        return cls([np.zeros((2 * ell + 1, 2 * ell + 1), dtype=complex) for ell in range(L + 1)])

    @classmethod
    def from_zonal(cls, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        return cls([coeffs[ell] * np.eye(2 * ell + 1) for ell in range(coeffs.shape[0])])

    def scale_per_degree(self, factors):
        """New spectrum with block ell multiplied by factors[ell] (kernel
        smoothing acts this way on zonal kernels)."""
        factors = np.asarray(factors, dtype=float)
        if factors.shape[0] < len(self.blocks):
            raise ValueError("need one factor per degree")
        return FullSpectrum([f * b for f, b in zip(factors, self.blocks)])

    def energy_per_degree(self):
        """prof[ell] = (2*ell+1)^{-1} sum_{nm} |fhat_{nm}|^2."""
        return np.array(
            [np.sum(np.abs(b) ** 2) / (2 * ell + 1) for ell, b in enumerate(self.blocks)]
        )

    def total_energy(self):
        """Parseval: sum_ell (2*ell+1)^2 prof[ell]."""
        w = 2.0 * np.arange(len(self.blocks)) + 1.0
        return float(np.sum(w**2 * self.energy_per_degree()))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["ell", "n", "m", "re", "im"])
            for ell, b in enumerate(self.blocks):
                for i in range(2 * ell + 1):
                    for j in range(2 * ell + 1):
                        w.writerow(
                            [ell, i - ell, j - ell, f"{b[i, j].real:.17g}", f"{b[i, j].imag:.17g}"]
                        )

    @classmethod
    def from_csv(cls, path):
        rows = []
        with open(path, newline="") as fh:
            r = csv.reader(fh)
            header = next(r)
            if header[:3] != ["ell", "n", "m"]:
                raise ValueError(f"unexpected spectrum header: {header}")
            for row in r:
                rows.append((int(row[0]), int(row[1]), int(row[2]), float(row[3]), float(row[4])))
        if not rows:
            raise ValueError("empty spectrum file")
        L = max(row[0] for row in rows)
        blocks = [np.zeros((2 * ell + 1, 2 * ell + 1), dtype=complex) for ell in range(L + 1)]
        for ell, n, m, re, im in rows:
            if abs(n) > ell or abs(m) > ell:
                raise ValueError(f"index ({n}, {m}) out of range for degree {ell}")
            blocks[ell][n + ell, m + ell] = re + 1j * im
        return cls(blocks)


@dataclass(frozen=True)
class MixtureComponent:
    """One translated zonal bump: weight * psi(center^{-1} x) with psi given by
    its zonal coefficients (coefficients[0] == 1 so the bump has unit mass)."""

    weight: float
    coefficients: np.ndarray
    center: Rotation

    def __post_init__(self):
        object.__setattr__(self, "coefficients", np.asarray(self.coefficients, dtype=float))
        if self.weight < 0:
            raise ValueError("component weight must be nonnegative")
        if abs(self.coefficients[0] - 1.0) > 1e-12:
            raise ValueError("zonal component must have unit mass (coefficients[0] == 1)")


@dataclass(frozen=True)
class ZonalMixture:
    """uniform_weight * 1 + sum_i components[i]; weights must sum to one."""

    uniform_weight: float
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        total = self.uniform_weight + sum(c.weight for c in self.components)
        if self.uniform_weight < 0:
            raise ValueError("uniform weight must be nonnegative")
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"mixture weights must sum to 1, got {total}")

    @property
    def lmax(self):
        """Degree beyond which every component spectrum vanishes."""
        return max((c.coefficients.shape[0] - 1 for c in self.components), default=0)

    def evaluate(self, q):
        """Density at quaternions of shape (..., 4)."""
        q = np.asarray(q, dtype=float)
        out = self.uniform_weight * np.ones(q.shape[:-1])
        for c in self.components:
            t = quat_cos_half_between(c.center.q, q)
            out = out + c.weight * zonal_synthesize(c.coefficients, t)
        return out

    def energy_per_degree(self, L=None):
        """prof[ell] of the mixture, closed form.

        Cross terms between components i and j contribute
        w_i w_j a_i a_j chi^ell(c_i^{-1} c_j) / (2*ell+1); the uniform part
        only enters at ell = 0 where prof[0] = 1 by mass normalization.
        """
        if L is None:
            L = self.lmax
        prof = np.zeros(L + 1)
        comps = self.components
        padded = [_pad(c.coefficients, L) for c in comps]
        dee = 2.0 * np.arange(L + 1) + 1.0
        for i, ci in enumerate(comps):
            prof += ci.weight**2 * padded[i] ** 2
            for j in range(i + 1, len(comps)):
                cj = comps[j]
                rel = ci.center.inverse().compose(cj.center)
                chi = characters_all(L, np.cos(rel.angle() / 2.0))
                prof += 2.0 * ci.weight * cj.weight * padded[i] * padded[j] * chi / dee
        prof[0] = (self.uniform_weight + sum(c.weight * c.coefficients[0] for c in comps)) ** 2
        return prof

    def norm_squared(self, L=None):
        """||f||^2 = sum (2*ell+1)^2 prof[ell]; exact once L >= lmax."""
        prof = self.energy_per_degree(L)
        w = 2.0 * np.arange(prof.shape[0]) + 1.0
        return float(np.sum(w**2 * prof))

    def full_spectrum(self, L=None):
        """Matrix coefficients: fhat^ell = sum_i w_i a_i^ell conj(D^ell(c_i))
        plus the uniform mass at ell = 0."""
        if L is None:
            L = self.lmax
        blocks = [np.zeros((2 * ell + 1, 2 * ell + 1), dtype=complex) for ell in range(L + 1)]
        blocks[0][0, 0] = self.uniform_weight
        for c in self.components:
            a = _pad(c.coefficients, L)
            for ell in range(L + 1):
                if a[ell] != 0.0:
                    blocks[ell] += c.weight * a[ell] * np.conj(wigner_D_of_rotation(ell, c.center))
        return FullSpectrum(blocks)
