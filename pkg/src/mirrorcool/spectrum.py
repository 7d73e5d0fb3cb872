"""Radiation-pressure force spectrum, sideband rates and cooling formulas.

The perturbative picture: the mirror sees the cavity-plus-atoms system as a
bath whose force spectrum, sampled at the two mechanical sidebands, gives the
anti-Stokes (cooling) and Stokes (heating) scattering rates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional

import numpy as np
from scipy.constants import hbar, k as k_B

from .errors import InstabilityError, NetHeatingError
from .model import SystemParams, cooperativities
from .response import eps_1, eps_2, eps_f_bar

__all__ = [
    "SpectrumReport",
    "force_spectrum",
    "scattering_rates",
    "perturbative_occupancy",
    "effective_temperature",
    "analytic_gamma1",
    "analytic_gamma2",
    "analytic_nres",
    "analytic_combined",
    "analytic_cooling",
    "cavity_thermal_occupancy",
    "Constraint",
    "regime_validity",
]


def force_spectrum(omega, params: SystemParams):
    """Spectrum of the cavity-plus-atoms Langevin force on the mirror.

    S_F(w) = 2 G^2 { |eps_f_bar(w)|^2 (kappa + gamma1 G1^2 |eps_1(w)|^2)
                    + |eps_f_bar(-w)|^2 gamma2 G2^2 |eps_2(w)|^2 }

    The prefactor is 2 G^2, so that S_F(w_m)/2 -> G^2/kappa for an empty
    resonant cavity.
    """
    p = params
    w = np.asarray(omega, dtype=float)
    plus = np.abs(eps_f_bar(w, p)) ** 2 * (p.kappa + p.gamma1 * p.G1**2 * np.abs(eps_1(w, p)) ** 2)
    if p.G2:
        minus = np.abs(eps_f_bar(-w, p)) ** 2 * p.gamma2 * p.G2**2 * np.abs(eps_2(w, p)) ** 2
    else:
        minus = 0.0
    s = 2.0 * p.G**2 * (plus + minus)
    return float(s) if np.ndim(s) == 0 else s


def scattering_rates(params: SystemParams):
    """Return ``(A_as, A_s)``, the force spectrum halved at +/- omega_m."""
    s = force_spectrum(np.array([params.omega_m, -params.omega_m]), params)
    return float(s[0]) / 2.0, float(s[1]) / 2.0


def effective_temperature(n_bar: float, omega_m_si: float) -> float:
    """Temperature (K) whose Bose occupancy at ``omega_m_si`` equals ``n_bar``."""
    if n_bar <= 0:
        return 0.0
    return hbar * omega_m_si / (k_B * math.log1p(1.0 / n_bar))


@dataclass(frozen=True)
class SpectrumReport:
    A_as: float
    A_s: float
    Gamma: float
    gamma_m_bar: float
    n_res: float
    n_bar: float
    T_bar: Optional[float] = None


def perturbative_occupancy(params: SystemParams,
                           omega_m_si: Optional[float] = None) -> SpectrumReport:
    """Final phonon number from the sideband rates.

    ``T_bar`` is only filled when the SI mechanical frequency is supplied;
    ``params`` may be normalized.
    """
    A_as, A_s = scattering_rates(params)
    Gamma = A_as - A_s
    gamma_m_bar = Gamma + params.gamma_m
    if not gamma_m_bar > 0:
        raise NetHeatingError(
            f"net heating: Gamma = {Gamma:.6g} <= -gamma_m = {-params.gamma_m:.6g}")
    n_res = A_s / gamma_m_bar
    n_bar = params.gamma_m * params.n_th / gamma_m_bar + n_res
    T_bar = effective_temperature(n_bar, omega_m_si) if omega_m_si else None
    return SpectrumReport(A_as, A_s, Gamma, gamma_m_bar, n_res, n_bar, T_bar)


def analytic_gamma1(params: SystemParams) -> float:
    """Cooling rate from ground-state atoms, (G^2/kappa) C1/(1 + C1).

    Valid for G2 = 0, delta1 = -omega_m and kappa >> omega_m >> gamma1.
    """
    C1 = cooperativities(params).C1
    return params.G**2 / params.kappa * C1 / (1.0 + C1)


def analytic_gamma2(params: SystemParams) -> float:
    """Cooling rate from inverted atoms, (G^2/kappa) C2/(1 - C2)."""
    C2 = cooperativities(params).C2
    if C2 >= 1.0:
        raise InstabilityError(f"C2 = {C2:.6g} >= 1: inverted ensemble is unstable")
    return params.G**2 / params.kappa * C2 / (1.0 - C2)


def analytic_nres(params: SystemParams, which: str) -> float:
    """Large-cooperativity residual occupancy for one ensemble.

    ``which="ground"`` gives 1/C1, ``which="inverted"`` gives C2/(1 - C2).
    """
    d = cooperativities(params)
    if which == "ground":
        if d.C1 == 0:
            raise ValueError("ground-state residual occupancy undefined for C1 = 0")
        return 1.0 / d.C1
    if which == "inverted":
        if d.C2 >= 1.0:
            raise InstabilityError(f"inverted residual occupancy diverges for C2 = {d.C2:.6g}")
        return d.C2 / (1.0 - d.C2)
    raise ValueError(f"which must be 'ground' or 'inverted', got {which!r}")


def analytic_combined(params: SystemParams):
    """Cooling rate and residual occupancy with both ensembles present.

    The rate is Gamma1 + Gamma2, which is dominated by Gamma2 once C2
    approaches one and reduces to Gamma1 without inverted atoms. The residual
    occupancy is n1_res (1 - C2) + n2_res.
    """
    rate = analytic_gamma1(params) + analytic_gamma2(params)
    n12 = analytic_nres(params, "ground") * (1.0 - cooperativities(params).C2) \
        + analytic_nres(params, "inverted")
    return rate, n12


def analytic_cooling(params: SystemParams):
    """``(rate, n_res)`` from whichever closed form matches the ensembles present.

    ``n_res`` is ``None`` when no closed form applies (no atoms at all).
    """
    if params.G1 > 0 and params.G2 > 0:
        return analytic_combined(params)
    if params.G2 > 0:
        return analytic_gamma2(params), analytic_nres(params, "inverted")
    if params.G1 > 0:
        return analytic_gamma1(params), analytic_nres(params, "ground")
    return 0.0, None


def cavity_thermal_occupancy(omega, params: SystemParams):
    """Effective thermal occupancy of the cavity bath created by inverted atoms.

    n(w) = x / (1 - x) with x = gamma2 G2^2 |eps_2(w)|^2 / kappa. The gain
    resonance of ``eps_2`` sits at ``w = -delta2``, where x = C2.
    """
    w = np.asarray(omega, dtype=float)
    x = params.gamma2 * params.G2**2 * np.abs(eps_2(w, params)) ** 2 / params.kappa
    if np.any(x >= 1.0):
        raise InstabilityError("cavity bath occupancy diverges: gain exceeds cavity loss")
    n = x / (1.0 - x)
    return float(n) if np.ndim(n) == 0 else n


class Constraint(NamedTuple):
    name: str
    satisfied: Optional[bool]  # None when the constraint does not apply
    margin: float  # (rhs - lhs) / rhs; nan when not applicable


def _constraint(name, lhs, rhs):
    if rhs <= 0:
        return Constraint(name, False, -math.inf)
    margin = (rhs - lhs) / rhs
    return Constraint(name, margin >= 0, margin)


_NA = float("nan")


def regime_validity(params: SystemParams) -> List[Constraint]:
    """Evaluate the inequalities under which the closed-form rates hold.

    Always returns the same constraints in the same order:

    ``ground_sideband_fit``    Gamma1 + gamma_m < gamma1_bar
    ``inverted_sideband_fit``  Gamma2 + gamma_m < gamma2_bar
    ``G1_above_G``             G < G1 (only with ground-state atoms)
    ``G1_below_sqrt_kappa_wm`` G1 < sqrt(kappa omega_m) (only with ground-state atoms)
    ``inverted_window``        G^2/(gamma2 kappa) < (1 - C2)^2 (only with inverted atoms)
    ``inverted_stability``     C2 < 1
    """
    p = params
    d = cooperativities(p)
    out = [_constraint("ground_sideband_fit", analytic_gamma1(p) + p.gamma_m, d.gamma1_bar)]
    if d.C2 < 1.0:
        out.append(_constraint("inverted_sideband_fit",
                               analytic_gamma2(p) + p.gamma_m, d.gamma2_bar))
    else:
        out.append(Constraint("inverted_sideband_fit", False, -math.inf))

    if p.G1 > 0:
        out.append(_constraint("G1_above_G", p.G, p.G1))
        out.append(_constraint("G1_below_sqrt_kappa_wm", p.G1, math.sqrt(p.kappa * p.omega_m)))
    else:
        out.append(Constraint("G1_above_G", None, _NA))
        out.append(Constraint("G1_below_sqrt_kappa_wm", None, _NA))

    if p.G2 > 0 and d.C2 < 1.0:
        out.append(_constraint("inverted_window", p.G**2 / (p.gamma2 * p.kappa),
                               (1.0 - d.C2) ** 2))
    elif p.G2 > 0:
        out.append(Constraint("inverted_window", False, -math.inf))
    else:
        out.append(Constraint("inverted_window", None, _NA))
    # strict: C2 = 1 is the instability threshold itself
    out.append(Constraint("inverted_stability", d.C2 < 1.0, 1.0 - d.C2))
    return out
