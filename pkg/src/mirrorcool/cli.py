"""Command-line front end: single points, response profiles and sweeps.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Optional

import numpy as np

from .config import FORMATS, RunConfig, load_config
from .errors import (ConfigError, GainPoleError, InstabilityError, MirrorCoolError,
                     NetHeatingError)
from .export import export, format_table, profile_rows
from .model import SystemParams, cooperativities, random_params
from .response import response_profile
from .spectrum import analytic_cooling, perturbative_occupancy, regime_validity
from .steady_state import ConditioningWarning, steady_state, structural_deviation

log = logging.getLogger("mirrorcool")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2
STRUCTURAL_TOL = 1e-12

# failures that describe a physical regime rather than a numerical breakdown
_REGIME_ERRORS = (InstabilityError, NetHeatingError, GainPoleError)


def evaluate(params: SystemParams, omega_m_si: Optional[float] = None) -> dict:
    """Every quantity at one parameter point, as a flat ordered dict.

    ``status`` is ``ok``, ``unstable`` or ``error``; regime problems (net
    heating, gain poles) are described in ``message`` without failing the row.
    """
    d = cooperativities(params)
    row = dict(params.as_dict())
    row.update(C1=d.C1, C2=d.C2)
    notes = []
    status = "ok"

    ss = steady_state_safe(params, notes)
    stable = ss is not None and ss.stable
    if ss is None:
        status = "error"
    elif not ss.stable:
        status = "unstable"

    pert = None
    if stable:
        try:
            pert = perturbative_occupancy(params, omega_m_si)
        except _REGIME_ERRORS as exc:
            notes.append(f"perturbative: {exc}")
    row.update(
        A_as=pert.A_as if pert else None,
        A_s=pert.A_s if pert else None,
        Gamma=pert.Gamma if pert else None,
        gamma_m_bar=pert.gamma_m_bar if pert else None,
        gm_ratio_exact=pert.gamma_m_bar / params.gamma_m if pert and params.gamma_m else None,
        n_res=pert.n_res if pert else None,
        n_bar=pert.n_bar if pert else None,
        T_bar=pert.T_bar if pert else None,
    )

    try:
        rate, n_res_an = analytic_cooling(params)
    except (_REGIME_ERRORS + (ValueError,)) as exc:
        notes.append(f"analytic: {exc}")
        rate = n_res_an = None
    row.update(
        Gamma_analytic=rate,
        gm_ratio_analytic=(1.0 + rate / params.gamma_m) if rate is not None and params.gamma_m else None,
        n_res_analytic=n_res_an,
    )

    row.update(
        stable=bool(stable) if ss is not None else None,
        spectral_abscissa=ss.spectral_abscissa if ss is not None else None,
        n_mirror=ss.n_mirror if stable else None,
    )
    for c in regime_validity(params):
        row[f"valid_{c.name}"] = c.satisfied
    row["status"] = status
    row["message"] = "; ".join(notes) if notes else None
    return row


def steady_state_safe(params, notes):
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", ConditioningWarning)
            return steady_state(params)
    except (MirrorCoolError, ConditioningWarning, np.linalg.LinAlgError) as exc:
        notes.append(f"steady state: {exc}")
        return None


def run_point(config: RunConfig) -> dict:
    return evaluate(config.params, config.omega_m_si)


def run_profile(config: RunConfig):
    spec = config.profile
    return response_profile(config.params, spec.omega_min, spec.omega_max, spec.n_samples)


def run_sweep(config: RunConfig, threads: Optional[int] = None) -> list:
    """One row per sweep sample, in sample order; never aborts on a bad sample."""
    spec = config.sweep
    if spec is None:
        raise ConfigError("sweep", "no sweep configured")
    values = spec.values()
    base = config.params

    def one(item):
        i, v = item
        row = {"index": i, "value": float(v)}
        try:
            row.update(evaluate(base.replace(**{spec.param: float(v)}), config.omega_m_si))
        except MirrorCoolError as exc:
            row.update(status="error", message=str(exc))
        return row

    workers = threads or config.threads
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, enumerate(values)))
    else:
        rows = [one(item) for item in enumerate(values)]
    # rows that failed early lack columns; pad so every row has the full header
    full = max(rows, key=len)
    return [{k: r.get(k) for k in full} for r in rows]


def structural_self_test(seed: int, draws: int = 20) -> float:
    rng = np.random.default_rng(seed)
    return max(structural_deviation(random_params(rng), rng) for _ in range(draws))


def _write(rows, args, config):
    fmt = args.format or config.output_format
    path = args.out or config.output_path
    if path:
        export(rows, path, fmt)
        log.info("wrote %d rows to %s", len(rows), path)
    else:
        sys.stdout.write(format_table(rows, fmt))


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors, not argparse's default exit 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="mirrorcool",
        description="Mirror cooling with intracavity atomic ensembles.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (("point", "evaluate one parameter point"),
                       ("profile", "sample the atom-modified cavity response"),
                       ("sweep", "sweep one parameter, analytic and exact columns")):
        p = sub.add_parser(name, help=text)
        p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
        p.add_argument("--config", required=True, help="YAML or JSON run configuration")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=FORMATS, help="output format (default: from config)")
        p.add_argument("--threads", type=int, help="worker threads for sweeps")
        p.add_argument("--seed", type=int,
                       help="run the randomized drift-matrix self-test with this seed first")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        config = load_config(args.config)
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError("--threads", "must be >= 1")
            config = replace(config, threads=args.threads)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG

    if args.seed is not None:
        dev = structural_self_test(args.seed)
        log.info("structural self-test (seed %d): max deviation %.3g", args.seed, dev)
        if not dev <= STRUCTURAL_TOL:
            log.error("structural self-test failed: deviation %.3g", dev)
            return EXIT_NUMERICAL

    code = EXIT_OK
    try:
        if args.command == "point":
            rows = [run_point(config)]
        elif args.command == "profile":
            prof = run_profile(config)
            for m in prof.markers.values():
                log.info("%s at omega = %.6g, |eps| = %.6g, width %.6g",
                         m.kind, m.omega, m.magnitude, m.width)
            rows = profile_rows(prof)
        else:
            if config.sweep is None:
                raise ConfigError("sweep", "config has no sweep section")
            rows = run_sweep(config)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except MirrorCoolError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL

    failed = [r for r in rows if r.get("status") == "error"]
    if failed:
        log.error("%d of %d rows failed numerically", len(failed), len(rows))
        code = EXIT_NUMERICAL
    try:
        _write(rows, args, config)
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_NUMERICAL
    return code


if __name__ == "__main__":
    sys.exit(main())
