"""Exact steady state of the linearized four-mode Langevin system.

State ordering is ``(q, p, X, Y, x1, y1, x2, y2)`` with
``X = (a + a^dag)/sqrt(2)``, ``Y = (a - a^dag)/(i sqrt(2))`` and likewise for
the two collective atomic modes, so the vacuum has variance 1/2 per quadrature.
The mirror quadratures already obey ``[q, p] = i`` and enter unchanged; the
radiation-pressure force ``G (a + a^dag)`` therefore reads ``sqrt(2) G X``.

Covariances are symmetrized, ``V_ij = <{dR_i, dR_j}>/2``, and solve
``A V + V A^T + D = 0`` in the steady state.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import block_diag

from .errors import InstabilityError, PhysicalityError, StepSizeError
from .model import SystemParams

__all__ = [
    "ORDERING",
    "DriftDiffusion",
    "SteadyStateResult",
    "ConditioningWarning",
    "build_drift",
    "build_diffusion",
    "drift_diffusion",
    "langevin_rhs",
    "structural_deviation",
    "solve_lyapunov",
    "lyapunov_residual",
    "integrate_moments",
    "stability_check",
    "mirror_occupancy",
    "symplectic_form",
    "physicality_margin",
    "steady_state",
]

ORDERING = ("q", "p", "X", "Y", "x1", "y1", "x2", "y2")
_SQRT2 = math.sqrt(2.0)


class ConditioningWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class DriftDiffusion:
    A: np.ndarray
    D: np.ndarray
    ordering: tuple = ORDERING


def build_drift(params: SystemParams) -> np.ndarray:
    """Real 8x8 drift matrix of the linearized Langevin equations."""
    p = params
    A = np.zeros((8, 8))
    # mirror
    A[0, 1] = p.omega_m
    A[1, 0] = -p.omega_m
    A[1, 1] = -p.gamma_m
    A[1, 2] = _SQRT2 * p.G
    # cavity field: -(kappa + i delta_f) a + i G q - i G1 c1 - i G2 c2^dag
    A[2, 2] = A[3, 3] = -p.kappa
    A[2, 3] = p.delta_f
    A[3, 2] = -p.delta_f
    A[3, 0] = _SQRT2 * p.G
    A[2, 5] = p.G1
    A[3, 4] = -p.G1
    A[2, 7] = -p.G2
    A[3, 6] = -p.G2
    # ground-state ensemble: -(gamma1 + i delta1) c1 - i G1 a
    A[4, 4] = A[5, 5] = -p.gamma1
    A[4, 5] = p.delta1
    A[5, 4] = -p.delta1
    A[4, 3] = p.G1
    A[5, 2] = -p.G1
    # inverted ensemble: -(gamma2 - i delta2) c2 - i G2 a^dag
    A[6, 6] = A[7, 7] = -p.gamma2
    A[6, 7] = -p.delta2
    A[7, 6] = p.delta2
    A[6, 3] = -p.G2
    A[7, 2] = -p.G2
    return A


def build_diffusion(params: SystemParams) -> np.ndarray:
    """Symmetrized noise covariance; a 2*gamma correlator gives gamma per quadrature."""
    p = params
    return np.diag([0.0, p.gamma_m * (2.0 * p.n_th + 1.0),
                    p.kappa, p.kappa, p.gamma1, p.gamma1, p.gamma2, p.gamma2])


def drift_diffusion(params: SystemParams) -> DriftDiffusion:
    return DriftDiffusion(build_drift(params), build_diffusion(params))


def langevin_rhs(params: SystemParams, q, p, a, c1, c2):
    """Noise-free right-hand sides of the operator equations, in complex form.

    Used as an independent check of :func:`build_drift`; ``a``, ``c1``, ``c2``
    are treated as complex c-numbers and ``a^dag`` as their conjugates.
    """
    P = params
    dq = P.omega_m * p
    dp = -P.omega_m * q - P.gamma_m * p + P.G * (a + np.conj(a))
    da = (-(P.kappa + 1j * P.delta_f) * a + 1j * P.G * q
          - 1j * P.G1 * c1 - 1j * P.G2 * np.conj(c2))
    dc1 = -(P.gamma1 + 1j * P.delta1) * c1 - 1j * P.G1 * a
    dc2 = -(P.gamma2 - 1j * P.delta2) * c2 - 1j * P.G2 * np.conj(a)
    return dq, dp, da, dc1, dc2


def structural_deviation(params: SystemParams, rng: np.random.Generator,
                         n_states: int = 16) -> float:
    """Largest mismatch between ``build_drift`` and :func:`langevin_rhs`.

    Random real quadrature states are mapped to complex amplitudes, pushed
    through the complex equations, and mapped back.
    """
    A = build_drift(params)
    worst = 0.0
    for _ in range(n_states):
        r = rng.standard_normal(8)
        a = (r[2] + 1j * r[3]) / _SQRT2
        c1 = (r[4] + 1j * r[5]) / _SQRT2
        c2 = (r[6] + 1j * r[7]) / _SQRT2
        dq, dp, da, dc1, dc2 = langevin_rhs(params, r[0], r[1], a, c1, c2)
        expected = np.array([
            np.real(dq), np.real(dp),
            _SQRT2 * da.real, _SQRT2 * da.imag,
            _SQRT2 * dc1.real, _SQRT2 * dc1.imag,
            _SQRT2 * dc2.real, _SQRT2 * dc2.imag,
        ])
        worst = max(worst, float(np.max(np.abs(A @ r - expected))))
    return worst


def stability_check(A: np.ndarray):
    """Return ``(stable, spectral_abscissa)``; stable iff every eigenvalue has Re < 0."""
    abscissa = float(np.max(np.linalg.eigvals(A).real))
    return abscissa < 0.0, abscissa


def _symmetric_operator(A):
    n = A.shape[0]
    iu, ju = np.triu_indices(n)
    m = iu.size
    E = np.zeros((n * n, m))
    E[iu * n + ju, np.arange(m)] = 1.0
    E[ju * n + iu, np.arange(m)] = 1.0
    eye = np.eye(n)
    K = np.kron(A, eye) + np.kron(eye, A)  # row-major vec of A V + V A^T
    rows = iu * n + ju
    return K[rows] @ E, rows, iu, ju


def lyapunov_residual(A, V, D) -> float:
    """Relative Frobenius residual of ``A V + V A^T + D``."""
    R = A @ V + V @ A.T + D
    scale = np.linalg.norm(D)
    return float(np.linalg.norm(R) / scale) if scale else float(np.linalg.norm(R))


def solve_lyapunov(A: np.ndarray, D: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Solve ``A V + V A^T + D = 0`` for symmetric ``V`` by a dense direct solve.

    Only the upper triangle is unknown, which leaves n(n+1)/2 equations. A
    :class:`ConditioningWarning` is issued when the relative residual exceeds
    ``rtol``.
    """
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    stable, abscissa = stability_check(A)
    if not stable:
        raise InstabilityError(
            f"no steady state: drift has spectral abscissa {abscissa:.6g} >= 0")
    M, rows, iu, ju = _symmetric_operator(A)
    v = np.linalg.solve(M, -D.reshape(-1)[rows])
    n = A.shape[0]
    V = np.zeros((n, n))
    V[iu, ju] = v
    V[ju, iu] = v
    res = lyapunov_residual(A, V, D)
    if res > rtol:
        warnings.warn(f"Lyapunov solve is ill-conditioned: relative residual {res:.3g}",
                      ConditioningWarning, stacklevel=2)
    return V


def _expm_taylor(M, tol):
    # caller keeps ||M||_1 <= 1, so the series converges in a few dozen terms
    out = np.eye(M.shape[0], dtype=M.dtype)
    term = out.copy()
    for j in range(1, 60):
        term = term @ M / j
        out = out + term
        if np.linalg.norm(term.astype(float), 1) <= tol * np.linalg.norm(out.astype(float), 1):
            break
    return out


def integrate_moments(A: np.ndarray, D: np.ndarray, V0: np.ndarray, t_end: float,
                      dt_control: float = 0.5, max_doublings: int = 200) -> np.ndarray:
    """Propagate ``dV/dt = A V + V A^T + D`` from ``V0`` to ``t_end``.

    The base step ``h = t_end / 2**k`` is the largest with
    ``(||A||_1 + ||D||_1) h <= dt_control``. One step is computed from the Van Loan block
    exponential (Taylor series), then doubled ``k`` times:
    ``Phi(2h) = Phi(h)^2`` and ``Q(2h) = Phi(h) Q(h) Phi(h)^T + Q(h)``.
    Cost is logarithmic in ``t_end``, so long stiff horizons are cheap. The
    propagation runs in extended precision because squaring amplifies the
    base-step rounding by ``2**k``.
    """
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    V0 = np.asarray(V0, dtype=float)
    if t_end < 0:
        raise ValueError("t_end must be >= 0")
    if not 0 < dt_control <= 1:
        raise ValueError("dt_control must lie in (0, 1]")
    if t_end == 0:
        return V0.copy()
    norm = np.linalg.norm(A, 1) + np.linalg.norm(D, 1)
    k = 0
    if norm > 0:
        ratio = norm * t_end / dt_control
        if not math.isfinite(ratio):
            raise StepSizeError("step size underflow: ||A|| t_end is not finite")
        k = max(0, math.ceil(math.log2(ratio))) if ratio > 1 else 0
    if k > max_doublings:
        raise StepSizeError(f"step size underflow: {k} doublings needed")
    h = t_end / 2**k
    if h == 0.0:
        raise StepSizeError("step size underflow: base step is zero")

    ld = np.longdouble
    n = A.shape[0]
    M = np.zeros((2 * n, 2 * n), dtype=ld)
    M[:n, :n] = -A
    M[:n, n:] = D
    M[n:, n:] = A.T
    F = _expm_taylor(M * ld(h), tol=float(np.finfo(ld).eps))
    Phi = F[n:, n:].T
    Q = Phi @ F[:n, n:]
    Q = (Q + Q.T) / 2
    for _ in range(k):
        Q = Phi @ Q @ Phi.T + Q
        Phi = Phi @ Phi
    V = Phi @ V0.astype(ld) @ Phi.T + Q
    return ((V + V.T) / 2).astype(float)


def mirror_occupancy(V: np.ndarray, tol: float = 1e-9) -> float:
    """Mirror phonon number ``(V_qq + V_pp - 1)/2``."""
    n = (V[0, 0] + V[1, 1] - 1.0) / 2.0
    if n < -tol:
        raise PhysicalityError(f"negative mirror occupancy {n:.3g}")
    return float(n)


def symplectic_form(n_modes: int) -> np.ndarray:
    return block_diag(*([np.array([[0.0, 1.0], [-1.0, 0.0]])] * n_modes))


def physicality_margin(V: np.ndarray) -> float:
    """Smallest eigenvalue of ``V + (i/2) Omega``; negative means unphysical."""
    omega = symplectic_form(V.shape[0] // 2)
    return float(np.min(np.linalg.eigvalsh(V + 0.5j * omega)))


@dataclass(frozen=True)
class SteadyStateResult:
    V: Optional[np.ndarray]
    n_mirror: float
    stable: bool
    spectral_abscissa: float


def steady_state(params: SystemParams) -> SteadyStateResult:
    """Exact steady state; for an unstable drift ``V`` is ``None`` and ``n_mirror`` nan."""
    A = build_drift(params)
    stable, abscissa = stability_check(A)
    if not stable:
        return SteadyStateResult(None, math.nan, False, abscissa)
    V = solve_lyapunov(A, build_diffusion(params))
    return SteadyStateResult(V, mirror_occupancy(V), True, abscissa)
