"""Acceptance criteria, each checked at its stated tolerance.

Every test records a PASS/FAIL line that is printed in the terminal summary.
"""
import math

import numpy as np
import pytest

from mirrorcool.cli import run_sweep
from mirrorcool.config import parse_config
from mirrorcool.export import export, read_table
from mirrorcool.model import cooperativities, reference_params, random_params
from mirrorcool.response import eps_f, eps_f_bar, response_profile
from mirrorcool.spectrum import (analytic_combined, analytic_gamma1, analytic_gamma2,
                                 perturbative_occupancy)
from mirrorcool.steady_state import (build_diffusion, build_drift, integrate_moments,
                                     mirror_occupancy, physicality_margin, solve_lyapunov,
                                     stability_check, steady_state, structural_deviation)


def _rel(a, b):
    return abs(a - b) / abs(b)


def _g1(C1, p=reference_params()):
    return math.sqrt(C1 * p.kappa * p.gamma1)


def _g2(C2, p=reference_params()):
    return math.sqrt(C2 * p.kappa * p.gamma2)


def _sweep_params(param, num=200):
    cfg = parse_config({"mode": "sweep", "sweep": {"param": param, "num": num}})
    return [cfg.params.replace(**{param: float(v)}) for v in cfg.sweep.values()]


@pytest.fixture(scope="module")
def oracle_points():
    rng = np.random.default_rng(20240917)
    points = []
    while len(points) < 50:
        p = random_params(rng)
        if stability_check(build_drift(p))[0]:
            points.append(p)
    return points + _sweep_params("G1") + _sweep_params("G2")


def test_baseline_fixed_point(acceptance):
    p = reference_params(G=0.0)
    n = steady_state(p).n_mirror
    Gamma = perturbative_occupancy(p).Gamma
    ok = abs(n - 100.0) <= 1e-9 and abs(Gamma) <= 1e-12
    acceptance("1 baseline fixed point", ok,
               f"|n_mirror - 100| = {abs(n - 100):.2e} (<= 1e-9), |Gamma| = {abs(Gamma):.2e} (<= 1e-12)")
    assert ok


def test_ground_rate_matches_formula(acceptance):
    errors = []
    for C1 in np.geomspace(0.5, 20, 40):
        p = reference_params(G1=_g1(C1))
        errors.append(_rel(perturbative_occupancy(p).Gamma, analytic_gamma1(p)))
    worst = max(errors)
    acceptance("2a ground-state rate vs closed form, C1 in [0.5, 20]", worst <= 0.10,
               f"max relative error {worst:.3%} (<= 10%)")
    assert worst <= 0.10


def test_ground_damping_saturation(acceptance):
    p = reference_params(G1=_g1(100.0))
    ratio = perturbative_occupancy(p).gamma_m_bar / p.gamma_m
    ceiling = 1 + (p.G**2 / p.kappa) / p.gamma_m
    err = _rel(ratio, ceiling)
    acceptance("2b damping saturation at C1 = 100", err <= 0.15,
               f"gamma_m_bar/gamma_m = {ratio:.1f} vs 1 + (G^2/kappa)/gamma_m = {ceiling:.1f}, "
               f"error {err:.1%} (<= 15%)")
    assert err <= 0.15


def test_ground_residual_occupancy(acceptance):
    p = reference_params(G1=_g1(100.0))
    remnant = p.gamma_m * p.n_th / perturbative_occupancy(p).gamma_m_bar
    residual = steady_state(p).n_mirror - remnant
    err = _rel(residual, 0.01)
    acceptance("3 residual occupancy at C1 = 100", err <= 0.25,
               f"n_mirror - remnant = {residual:.4f} vs 1/C1 = 0.01, error {err:.1%} (<= 25%)")
    assert err <= 0.25


def test_inverted_rate_matches_formula(acceptance):
    worst, at = 0.0, None
    for C2 in np.linspace(0.1, 0.8, 15):
        p = reference_params(G2=_g2(C2))
        err = _rel(perturbative_occupancy(p).Gamma, analytic_gamma2(p))
        if err > worst:
            worst, at = err, C2
    acceptance("4a inverted-atom rate vs closed form, C2 in [0.1, 0.8]", worst <= 0.10,
               f"max relative error {worst:.1%} at C2 = {at:.2f} (<= 10%)")
    assert worst <= 0.10


def test_inverted_residual_occupancy(acceptance):
    p = reference_params(G2=_g2(0.8))
    n_res = perturbative_occupancy(p).n_res
    err = _rel(n_res, 0.8 / 0.2)
    acceptance("4b inverted residual occupancy at C2 = 0.8", err <= 0.25,
               f"n_res = {n_res:.3f} vs C2/(1 - C2) = 4, error {err:.1%} (<= 25%)")
    assert err <= 0.25


def test_stability_boundary(acceptance):
    base = reference_params(G=0.01)
    G2s = np.round(np.arange(9.9, 10.1 + 5e-4, 1e-3), 6)
    flags = [stability_check(build_drift(base.replace(G2=float(g))))[0] for g in G2s]
    flips = [i for i in range(1, len(flags)) if flags[i] != flags[i - 1]]
    threshold = math.sqrt(base.kappa * base.gamma2)
    ok = (len(flips) == 1 and flags[0] and not flags[-1]
          and abs(G2s[flips[0]] - threshold) <= 1e-3 + 1e-12)
    where = f"{G2s[flips[0] - 1]:.3f} -> {G2s[flips[0]]:.3f}" if flips else "none"
    acceptance("5 stability flips within one step of sqrt(kappa gamma2)", ok,
               f"flip {where}, threshold {threshold:.3f}")
    assert ok


def test_lyapunov_matches_time_integration(acceptance, oracle_points):
    worst = 0.0
    for p in oracle_points:
        A, D = build_drift(p), build_diffusion(p)
        _, abscissa = stability_check(A)
        V = solve_lyapunov(A, D)
        W = integrate_moments(A, D, np.zeros_like(A), 40.0 / abs(abscissa))
        worst = max(worst, np.linalg.norm(V - W) / np.linalg.norm(V))
    acceptance("6 Lyapunov solve vs moment integration", worst <= 1e-8,
               f"max relative Frobenius error {worst:.2e} over {len(oracle_points)} points (<= 1e-8)")
    assert worst <= 1e-8


def test_response_shape(acceptance):
    dip_errs, peak_errs, located = [], [], True
    for C1 in (0.5, 1.0, 5.0):
        p = reference_params(G1=_g1(C1))
        depth = abs(eps_f_bar(-1.0, p)) / abs(eps_f(-1.0, p))
        dip_errs.append(_rel(depth, 1 / (1 + C1)))
        dip = response_profile(p, -3, 3, 60001).dip
        located &= dip is not None and abs(dip.omega + 1) <= cooperativities(p).gamma1_bar / 4
    for C2 in (0.3, 0.5, 0.8):
        p = reference_params(G2=_g2(C2))
        gain = abs(eps_f_bar(1.0, p)) / abs(eps_f(1.0, p))
        peak_errs.append(_rel(gain, 1 / (1 - C2)))
        peak = response_profile(p, -3, 3, 60001).peak
        located &= peak is not None and abs(peak.omega - 1) <= cooperativities(p).gamma2_bar / 4
    worst = max(dip_errs + peak_errs)
    ok = worst <= 0.05 and located
    acceptance("7 dip and peak factors at -/+ omega_m", ok,
               f"max dip error {max(dip_errs):.2%}, max peak error {max(peak_errs):.2%} "
               f"(<= 5%), extrema located: {located}")
    assert ok


def test_physicality(acceptance, oracle_points):
    extra = [reference_params(G1=_g1(100.0), G2=_g2(0.5)), reference_params(G=0.0)]
    worst_margin, worst_n = math.inf, math.inf
    for p in oracle_points + extra:
        V = solve_lyapunov(build_drift(p), build_diffusion(p))
        worst_margin = min(worst_margin, physicality_margin(V))
        worst_n = min(worst_n, (V[0, 0] + V[1, 1] - 1) / 2)
    ok = worst_margin >= -1e-9 and worst_n >= -1e-9
    acceptance("8 physicality at every stable point", ok,
               f"min eig(V + i Omega/2) = {worst_margin:.2e}, min n_mirror = {worst_n:.3g} (>= -1e-9)")
    assert ok


def test_combined_scenario(acceptance):
    p = reference_params(G1=_g1(100.0), G2=_g2(0.5))
    n = steady_state(p).n_mirror
    _, n12 = analytic_combined(p)
    Gamma = perturbative_occupancy(p).Gamma
    Gamma2 = analytic_gamma2(p)
    n_err, g_err = _rel(n, n12), _rel(Gamma, Gamma2)
    ok = n_err <= 0.25 and g_err <= 0.15
    acceptance("9 combined ensembles, C1 = 100 and C2 = 0.5", ok,
               f"n_mirror {n:.3f} vs {n12:.3f} ({n_err:.1%} <= 25%), "
               f"Gamma {Gamma:.4f} vs Gamma2 {Gamma2:.4f} ({g_err:.1%} <= 15%)")
    assert ok


def test_structure_and_round_trip(acceptance, tmp_path):
    rng = np.random.default_rng(11)
    dev = max(structural_deviation(random_params(rng), rng) for _ in range(50))
    cfg = parse_config({"mode": "sweep", "sweep": {"param": "G2", "num": 8}})
    rows = run_sweep(cfg)
    a = export(rows, tmp_path / "a.csv")
    b = export(run_sweep(cfg, threads=4), tmp_path / "b.csv")
    identical = a.read_bytes() == b.read_bytes()
    back = read_table(a)
    exact = all(
        b_[k] == pytest.approx(v, rel=1e-9) if isinstance(v, float) and math.isfinite(v)
        else True for r, b_ in zip(rows, back) for k, v in r.items())
    ok = dev <= 1e-12 and identical and exact and len(back) == len(rows)
    acceptance("10 structural drift test and CSV round trip", ok,
               f"max drift deviation {dev:.1e} (<= 1e-12), byte-identical: {identical}, "
               f"9-digit round trip: {exact}")
    assert ok
