"""Bare and atom-modified susceptibilities of the mirror and cavity field.

Frequencies are measured from the laser frequency, so the anti-Stokes and
Stokes sidebands sit at ``omega = +omega_m`` and ``omega = -omega_m``.
Every function accepts a scalar or an array of frequencies.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import GainPoleError, InstabilityError, PoleError
from .model import SystemParams, cooperativities

__all__ = [
    "GAIN_POLE_TOL",
    "eps_m",
    "eps_f",
    "eps_1",
    "eps_2",
    "eps_f_bar",
    "inverse_eps_f_bar",
    "DipPeakMetrics",
    "dip_peak_metrics",
    "Marker",
    "ResponseProfile",
    "response_profile",
]

GAIN_POLE_TOL = 1e-12


def _out(value):
    return complex(value) if np.ndim(value) == 0 else value


def eps_m(omega, params: SystemParams):
    """Mechanical susceptibility omega_m / (omega_m^2 - omega^2 - i gamma_m omega)."""
    w = np.asarray(omega, dtype=float)
    den = params.omega_m**2 - w**2 - 1j * params.gamma_m * w
    if np.any(den == 0):
        raise PoleError("mechanical susceptibility evaluated on its pole (gamma_m = 0)")
    return _out(params.omega_m / den)


def _bare_inverse(w, params):
    return np.asarray(params.kappa + 1j * (params.delta_f - w))


def eps_f(omega, params: SystemParams):
    w = np.asarray(omega, dtype=float)
    return _out(1.0 / _bare_inverse(w, params))


def eps_1(omega, params: SystemParams):
    w = np.asarray(omega, dtype=float)
    return _out(1.0 / (params.gamma1 + 1j * (params.delta1 - w)))


def eps_2(omega, params: SystemParams):
    # sign structure differs from eps_1: the inverted ensemble couples to a^dagger
    w = np.asarray(omega, dtype=float)
    return _out(1.0 / (params.gamma2 - 1j * (params.delta2 + w)))


def _dressed_inverse(w, params):
    # the bare array is returned untouched without atoms, so the dressed
    # response reduces bit-exactly to eps_f
    inv = _bare_inverse(w, params)
    if params.G1:
        inv = inv + params.G1**2 * np.asarray(eps_1(w, params))
    if params.G2:
        inv = inv - params.G2**2 * np.conj(np.asarray(eps_2(-w, params)))
    return np.asarray(inv)


def inverse_eps_f_bar(omega, params: SystemParams):
    """Inverse of the atom-modified cavity response, without pole checks."""
    return _out(_dressed_inverse(np.asarray(omega, dtype=float), params))


def eps_f_bar(omega, params: SystemParams):
    """Cavity response dressed by both atomic ensembles.

    Raises :class:`GainPoleError` where the inverse response vanishes, which
    can only happen once the inverted ensemble provides enough gain.
    """
    inv = _dressed_inverse(np.asarray(omega, dtype=float), params)
    if np.any(np.abs(inv) < GAIN_POLE_TOL):
        raise GainPoleError("atom-modified cavity response has a gain pole at the "
                            "requested frequency")
    return _out(1.0 / inv)


class DipPeakMetrics(NamedTuple):
    dip_factor: float  # (1 + C1)^-1
    peak_factor: float  # (1 - C2)^-1
    gamma1_bar: float
    gamma2_bar: float


def dip_peak_metrics(params: SystemParams) -> DipPeakMetrics:
    """Depth of the Stokes-side dip, height of the anti-Stokes peak, and widths."""
    d = cooperativities(params)
    if d.C2 >= 1.0:
        raise InstabilityError(f"peak gain factor undefined for C2 = {d.C2:.6g} >= 1")
    return DipPeakMetrics(1.0 / (1.0 + d.C1), 1.0 / (1.0 - d.C2),
                          d.gamma1_bar, d.gamma2_bar)


@dataclass(frozen=True)
class Marker:
    kind: str  # "dip" or "peak"
    omega: float
    magnitude: float
    width: float  # analytic modified linewidth of the responsible ensemble


@dataclass(frozen=True)
class ResponseProfile:
    omegas: np.ndarray
    magnitudes: np.ndarray
    markers: dict = field(default_factory=dict)

    @property
    def dip(self) -> Optional[Marker]:
        return self.markers.get("dip")

    @property
    def peak(self) -> Optional[Marker]:
        return self.markers.get("peak")


def _nearest_extremum(omegas, mags, target, kind):
    inner = mags[1:-1]
    if kind == "dip":
        idx = np.flatnonzero((inner < mags[:-2]) & (inner <= mags[2:])) + 1
    else:
        idx = np.flatnonzero((inner > mags[:-2]) & (inner >= mags[2:])) + 1
    if idx.size == 0:
        return None
    return int(idx[np.argmin(np.abs(omegas[idx] - target))])


def response_profile(params: SystemParams, omega_min: float, omega_max: float,
                     n_samples: int) -> ResponseProfile:
    """Sample ``|eps_f_bar|`` on a uniform grid and mark the atomic features.

    The dip is the grid local minimum nearest the ground-state resonance
    ``omega = delta1``; the peak is the local maximum nearest the gain
    resonance ``omega = delta2``. Markers are only searched for ensembles that
    are present.
    """
    if not omega_min < omega_max:
        raise ValueError("omega_min must be < omega_max")
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    omegas = np.linspace(omega_min, omega_max, int(n_samples))
    mags = np.abs(eps_f_bar(omegas, params))
    d = cooperativities(params)

    markers = {}
    if params.G1 > 0:
        i = _nearest_extremum(omegas, mags, params.delta1, "dip")
        if i is not None:
            markers["dip"] = Marker("dip", float(omegas[i]), float(mags[i]), d.gamma1_bar)
    if params.G2 > 0:
        i = _nearest_extremum(omegas, mags, params.delta2, "peak")
        if i is not None:
            markers["peak"] = Marker("peak", float(omegas[i]), float(mags[i]), d.gamma2_bar)
    return ResponseProfile(omegas, mags, markers)
