"""Parameter sets for the linearized mirror-cavity-atoms model.

All rates and frequencies are angular (rad/s). Library functions accept any
consistent unit system; the CLI normalizes everything to ``omega_m = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import NamedTuple

from scipy.constants import hbar

from .errors import ParameterError

__all__ = [
    "SystemParams",
    "PhysicalSetup",
    "DerivedParams",
    "Couplings",
    "BosonizationCheck",
    "validate",
    "derive_params",
    "effective_detuning",
    "cooperativities",
    "bosonization_check",
    "reference_params",
    "random_params",
]

# field -> (lower bound, strict)
_SYSTEM_BOUNDS = {
    "omega_m": (0.0, True),
    "gamma_m": (0.0, False),
    "kappa": (0.0, True),
    "G": (0.0, False),
    "G1": (0.0, False),
    "G2": (0.0, False),
    "gamma1": (0.0, True),
    "gamma2": (0.0, True),
    "n_th": (0.0, False),
}


def _check_bounds(obj, bounds):
    for f in fields(obj):
        value = getattr(obj, f.name)
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ParameterError(f.name, f"must be a real number, got {value!r}") from None
        if not math.isfinite(value):
            raise ParameterError(f.name, f"must be finite, got {value}")
        if f.name in bounds:
            lo, strict = bounds[f.name]
            if strict and not value > lo:
                raise ParameterError(f.name, f"must be > {lo:g}")
            if not strict and not value >= lo:
                raise ParameterError(f.name, f"must be >= {lo:g}")


@dataclass(frozen=True)
class SystemParams:
    """Linearized-model parameters.

    ``delta_f`` is the effective cavity detuning, ``delta1``/``delta2`` the
    atomic detunings from the laser, ``G1``/``G2`` the collective couplings of
    the ground-state and inverted ensembles, ``n_th`` the mirror bath occupancy.
    Construction validates every field.
    """

    omega_m: float = 1.0
    gamma_m: float = 1e-5
    kappa: float = 100.0
    delta_f: float = 0.0
    G: float = 1.0
    G1: float = 0.0
    G2: float = 0.0
    gamma1: float = 0.01
    gamma2: float = 1.0
    delta1: float = -1.0
    delta2: float = 1.0
    n_th: float = 100.0

    def __post_init__(self):
        validate(self)

    def replace(self, **changes) -> SystemParams:
        return replace(self, **changes)

    def scaled(self, factor: float) -> SystemParams:
        """Rescale every rate and frequency by ``factor`` (``n_th`` unchanged)."""
        changes = {f.name: getattr(self, f.name) * factor
                   for f in fields(self) if f.name != "n_th"}
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def validate(params):
    """Return ``params`` unchanged if every invariant holds.

    Raises :class:`ParameterError` naming the first offending field.
    """
    if isinstance(params, SystemParams):
        _check_bounds(params, _SYSTEM_BOUNDS)
    elif isinstance(params, PhysicalSetup):
        _check_bounds(params, _SETUP_BOUNDS)
        for name in ("N1", "N2"):
            if float(getattr(params, name)) != int(getattr(params, name)):
                raise ParameterError(name, "must be an integer atom count")
    else:
        raise TypeError(f"cannot validate {type(params).__name__}")
    return params


def reference_params(**overrides) -> SystemParams:
    """The normalized reference parameter set for sideband-cooling studies.

    omega_m = 1, gamma_m = 1e-5, kappa = 100, gamma1 = 0.01, gamma2 = 1,
    n_th = 100, G = 1, delta_f = 0, delta1 = -1, delta2 = +1, no atoms.
    """
    return SystemParams(**overrides)


_SETUP_BOUNDS = {
    "L": (0.0, True),
    "mass": (0.0, True),
    "g1": (0.0, False),
    "g2": (0.0, False),
    "N1": (0.0, False),
    "N2": (0.0, False),
    "alpha": (0.0, False),
}


@dataclass(frozen=True)
class PhysicalSetup:
    """Raw SI inputs from which the linearized couplings follow."""

    omega_c: float
    omega_l: float
    L: float
    mass: float
    g1: float = 0.0
    g2: float = 0.0
    N1: int = 0
    N2: int = 0
    alpha: float = 0.0

    def __post_init__(self):
        validate(self)

    @property
    def delta0(self) -> float:
        return self.omega_c - self.omega_l


class Couplings(NamedTuple):
    G0: float
    G: float
    G1: float
    G2: float
    delta0: float


def derive_params(setup: PhysicalSetup, omega_m: float) -> Couplings:
    """Single-photon and collective couplings for a physical setup.

    G0 = (omega_c / L) * sqrt(hbar / (mass * omega_m)), G = G0 * alpha,
    G_i = g_i * sqrt(N_i), delta0 = omega_c - omega_l.
    """
    if not omega_m > 0 or not math.isfinite(omega_m):
        raise ParameterError("omega_m", "must be > 0")
    G0 = setup.omega_c / setup.L * math.sqrt(hbar / (setup.mass * omega_m))
    return Couplings(
        G0=G0,
        G=G0 * setup.alpha,
        G1=setup.g1 * math.sqrt(setup.N1),
        G2=setup.g2 * math.sqrt(setup.N2),
        delta0=setup.delta0,
    )


def effective_detuning(delta0: float, G: float, omega_m: float) -> float:
    """Cavity detuning shifted by the static radiation-pressure displacement."""
    if not omega_m > 0:
        raise ParameterError("omega_m", "must be > 0")
    return delta0 - G**2 / omega_m


@dataclass(frozen=True)
class DerivedParams:
    C1: float
    C2: float
    gamma1_bar: float
    gamma2_bar: float


def cooperativities(params: SystemParams) -> DerivedParams:
    """Ensemble cooperativities and the light-modified atomic linewidths."""
    C1 = params.G1**2 / (params.kappa * params.gamma1)
    C2 = params.G2**2 / (params.kappa * params.gamma2)
    return DerivedParams(
        C1=C1,
        C2=C2,
        gamma1_bar=params.gamma1 * (1.0 + C1),
        gamma2_bar=params.gamma2 * (1.0 - C2),
    )


class BosonizationCheck(NamedTuple):
    valid: bool
    excitation_ratio: float  # g^2 alpha^2 / (omega_m^2 + gamma^2), must be <= eps
    inverse_alpha_sq: float  # alpha^-2, must be <= eps


def bosonization_check(g: float, omega_m: float, gamma: float, alpha: float,
                       eps: float = 0.1) -> BosonizationCheck:
    """Check that the cavity field only weakly excites single atoms.

    The chain ``g^2/(omega_m^2 + gamma^2) << alpha^-2 << 1`` is read with
    "much less than" meaning "at most ``eps`` times".
    """
    if not alpha > 0:
        raise ParameterError("alpha", "must be > 0")
    inv_a2 = 1.0 / alpha**2
    excitation = g**2 / (omega_m**2 + gamma**2)
    ratio = excitation / inv_a2
    return BosonizationCheck(ratio <= eps and inv_a2 <= eps, ratio, inv_a2)


def random_params(rng) -> SystemParams:
    """Draw a normalized parameter point spanning both cavity regimes.

    Used by the structural self-test and by randomized checks; stability is
    not guaranteed.
    """
    u = rng.uniform
    return SystemParams(
        omega_m=1.0,
        gamma_m=10 ** u(-5, -2),
        kappa=10 ** u(-1, 3),
        delta_f=u(-2, 2),
        G=u(0, 1.5),
        G1=u(0, 5),
        G2=u(0, 5),
        gamma1=10 ** u(-2, 0),
        gamma2=10 ** u(-2, 0.5),
        delta1=u(-2, 2),
        delta2=u(-2, 2),
        n_th=u(0, 200),
    )
