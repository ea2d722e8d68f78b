"""Joint spectral amplitude of the photon pair, with and without rotation.

The amplitude factorizes into a Gaussian phase-matching profile acting on
the signal/idler frequency combination and a Gaussian pump envelope acting
on their sum.  Everything here works on detunings ``nu = omega - center``,
which keeps terahertz-scale structure well conditioned at optical carriers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

_COEF_MATCH_TOL = 1e-12


@dataclass(frozen=True)
class PumpSpectrum:
    """Gaussian pump envelope: per-photon degenerate center and spectral width."""

    center: float  # rad/s
    sigma: float  # rad/s

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ValueError("pump sigma must be positive")


@dataclass(frozen=True)
class PhaseMatchGaussian:
    """Gaussian phase-matching profile ``exp(-gamma * (A nu1 + B nu2)^2)``.

    The two linear coefficients are opposite by construction (``B = -A``),
    so the profile depends only on the frequency difference.  Passing
    ``b_coef=None`` fills it in from ``a_coef``.
    """

    gamma: float
    a_coef: float
    b_coef: float | None = None

    def __post_init__(self):
        if not self.gamma > 0.0:
            raise ValueError("gamma must be positive")
        if self.b_coef is None:
            object.__setattr__(self, "b_coef", -self.a_coef)
        elif abs(self.a_coef + self.b_coef) > _COEF_MATCH_TOL * max(1.0, abs(self.a_coef)):
            raise ValueError("phase-matching coefficients must satisfy b_coef = -a_coef")


@dataclass(frozen=True)
class RdeShift:
    """Rotational Doppler shift parameters: OAM charge and rotation rate."""

    l: int
    omega_rot: float  # rad/s

    def __post_init__(self):
        if not isinstance(self.l, int) or isinstance(self.l, bool) or self.l < 0:
            raise ValueError("topological charge l must be an integer >= 0")
        if not math.isfinite(self.omega_rot):
            raise ValueError("omega_rot must be finite")


@dataclass(frozen=True)
class JsaGrid:
    """Amplitude magnitude on a rectangular detuning grid, peak-normalized.

    ``values[i, j]`` belongs to ``(axis1[i], axis2[j])``.
    """

    axis1: np.ndarray
    axis2: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.axis1), len(self.axis2)):
            raise ValueError("values shape must match the two axes")
        if self.values.size and self.values.max() > 0.0:
            if abs(self.values.max() - 1.0) > 1e-12:
                raise ValueError("grid must be normalized so the maximum is 1")

    def cell_size(self) -> tuple[float, float]:
        d1 = float(self.axis1[1] - self.axis1[0]) if len(self.axis1) > 1 else 0.0
        d2 = float(self.axis2[1] - self.axis2[0]) if len(self.axis2) > 1 else 0.0
        return d1, d2


def jsa_value(nu1, nu2, pump: PumpSpectrum, pm: PhaseMatchGaussian):
    """Joint spectral amplitude at detunings (nu1, nu2); accepts arrays.

    ``exp(-gamma (A nu1 + B nu2)^2) * exp(-(nu1 + nu2)^2 / (2 sigma^2))``,
    equal to 1 at the degenerate point.
    """
    nu1 = np.asarray(nu1, dtype=float)
    nu2 = np.asarray(nu2, dtype=float)
    phase_match = np.exp(-pm.gamma * (pm.a_coef * nu1 + pm.b_coef * nu2) ** 2)
    pump_envelope = np.exp(-((nu1 + nu2) ** 2) / (2.0 * pump.sigma**2))
    out = phase_match * pump_envelope
    return float(out) if out.ndim == 0 else out


def jsa_grid(
    pump: PumpSpectrum,
    pm: PhaseMatchGaussian,
    shift: RdeShift | None,
    half_width: float,
    n: int,
) -> JsaGrid:
    """Evaluate the amplitude magnitude on an n-by-n detuning grid.

    Without a shift this is the bare joint amplitude.  With a shift the two
    OAM-tagged branches are evaluated at oppositely displaced arguments of
    the phase-matching profile (the pump envelope is unaffected) and
    combined per point as the larger branch magnitude: the branches carry
    orthogonal OAM tags, so their intensities do not interfere.
    """
    if n < 16:
        raise ValueError("grid size n must be at least 16")
    if not half_width > 0.0:
        raise ValueError("half_width must be positive")
    axis = np.linspace(-half_width, half_width, n)
    nu1 = axis[:, None]
    nu2 = axis[None, :]
    if shift is None or shift.l == 0:
        values = jsa_value(nu1, nu2, pump, pm)
    else:
        tag = shift.l * shift.omega_rot
        # the pump envelope acts on nu1 + nu2, untouched by the opposite shifts,
        # so taking the larger branch magnitude commutes with applying it
        envelope = np.exp(-((nu1 + nu2) ** 2) / (2.0 * pump.sigma**2))
        kernel_a = np.exp(-pm.gamma * (pm.a_coef * (nu1 + tag) + pm.b_coef * (nu2 - tag)) ** 2)
        kernel_b = np.exp(-pm.gamma * (pm.a_coef * (nu1 - tag) + pm.b_coef * (nu2 + tag)) ** 2)
        values = np.maximum(kernel_a, kernel_b) * envelope
    peak = values.max()
    if peak > 0.0:
        values = values / peak
    return JsaGrid(axis1=axis, axis2=axis.copy(), values=values)


def peak_locations(grid: JsaGrid) -> list[tuple[float, float]]:
    """Interior local maxima above half the global maximum.

    A cell qualifies when none of its eight neighbors exceeds it.  When the
    true peak falls between grid points, adjacent cells can tie exactly;
    each connected plateau of qualifying cells therefore counts as a single
    peak, located at its first highest cell.  Peaks are returned as
    ``(nu1, nu2)`` pairs sorted by amplitude, largest first.
    """
    v = grid.values
    if v.size == 0:
        raise ValueError("grid is empty")
    top = v.max()
    if top <= 0.0:
        return []
    core = v[1:-1, 1:-1]
    mask = core > 0.5 * top
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            mask &= core >= v[1 + di : v.shape[0] - 1 + di, 1 + dj : v.shape[1] - 1 + dj]
    labels, n_groups = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))
    peaks = []
    for group in range(1, n_groups + 1):
        cells = np.argwhere(labels == group)
        values = core[cells[:, 0], cells[:, 1]]
        i, j = cells[int(np.argmax(values))]
        peaks.append((float(core[i, j]), float(grid.axis1[i + 1]), float(grid.axis2[j + 1])))
    peaks.sort(key=lambda t: -t[0])
    return [(nu1, nu2) for _, nu1, nu2 in peaks]


def effective_coherence_time(pm: PhaseMatchGaussian) -> float:
    """Envelope time constant implied by the phase-matching profile.

    Along the antidiagonal the profile reduces to a Gaussian single-photon
    spectrum whose two-photon interference envelope decays as
    ``exp(-tau^2 / (2 tau_c^2))`` with ``tau_c = 2 |A| sqrt(gamma)``.
    Doubling A doubles it; quadrupling gamma doubles it.
    """
    return 2.0 * abs(pm.a_coef) * math.sqrt(pm.gamma)


def phase_match_for_coherence_time(tau_c: float, gamma: float = 0.1) -> PhaseMatchGaussian:
    """Inverse of :func:`effective_coherence_time` at a chosen gamma."""
    if not tau_c > 0.0:
        raise ValueError("tau_c must be positive")
    return PhaseMatchGaussian(gamma=gamma, a_coef=tau_c / (2.0 * math.sqrt(gamma)))
