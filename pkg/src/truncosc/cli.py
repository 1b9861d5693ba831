"""Command-line front end: CSV data for every plot plus a validation suite.

Four commands, selected with --command:

  density      probability densities |<x|z>|^2 on a fixed grid x in (0, 12]
  uncertainty  sigma_x, sigma_p and their product along a |z| grid
  entropy      beam-splitter linear entropy along a |z| grid
  validate     run the cross-module invariant suite and report per check

Every CSV starts with one comment line recording the config hash, the
basis size, and the tool version, followed by a header row; identical
configs rerun to byte-identical files (fixed grids, fixed float
formatting, no timestamps).  Scan points are mutually independent and
are assembled in index order, so the output does not depend on
evaluation order; shared tables (Gram matrices, splitter blocks,
operator tables) are built once and reused immutably.

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 numerical failure.  All progress and diagnostics go to standard
error; files carry the numbers.

The --seed-config flag points to a text file with one "epsilon nu" pair
per line ('#' comments allowed; nu may be 'inf' or '-inf' for the pure
odd branch).  validate then also builds that custom factorization-energy
grid, checks each seed against an independent series oracle, and checks
model admissibility (ordering, bounds, nonsingular Wronskian).
"""
from __future__ import annotations

import argparse
import hashlib
import math
import sys
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__
from .coherent import (
    Family,
    build_cs,
    displacement_norm_partial_sums,
    eigen_residual,
    energy_expectation,
    identity_resolution_check,
    lowering_measure_corrected,
    lowering_measure_reference,
)
from .entangle import (
    BeamSplitterSetting,
    beamsplitter_apply,
    beamsplitter_block,
    beamsplitter_block_bch,
    beamsplitter_block_oracle,
    TwoModeState,
    entropy_scan,
    halfline_overlap,
)
from .errors import SingularWronskian, TruncOscError
from .fock import Basis, eigenfunction, truncated_ladder
from .numerics import gauss_halfline
from .observables import (
    ObservableKind,
    build_table,
    discrepancy_report,
    expectation,
    matrix_element_closed,
    uncertainty_scan,
)
from . import susy as _susy

__all__ = [
    "RunConfig",
    "ConfigError",
    "build_parser",
    "parse_seed_config",
    "cmd_density",
    "cmd_uncertainty",
    "cmd_entropy",
    "cmd_validate",
    "main",
]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_DENSITY_GRID_POINTS = 600
_DENSITY_X_MAX = 12.0


class ConfigError(Exception):
    """A run configuration that violates the CLI contract."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    family: str = "lowering"
    model: str = "TRUNC"
    z_min: float = 0.0
    z_max: float = 2.0
    z_steps: int = 9
    basis_size: int = 64
    theta: float = math.pi / 2.0
    phi: float = 0.0
    output_path: Optional[str] = None
    seed_config: Optional[str] = None

    def validate(self) -> None:
        if self.command not in ("density", "uncertainty", "entropy", "validate"):
            raise ConfigError(f"unknown command {self.command!r}")
        if self.family not in tuple(f.value for f in Family):
            raise ConfigError(f"unknown family {self.family!r}")
        if self.model not in ("TRUNC", "SUSY_Q4"):
            raise ConfigError(f"unknown model {self.model!r}")
        if self.z_steps < 2:
            raise ConfigError("z_steps must be at least 2")
        if self.basis_size < 8:
            raise ConfigError("basis_size must be at least 8")
        if not (self.z_min <= self.z_max):
            raise ConfigError("z_min must not exceed z_max")
        if self.z_min < 0.0:
            raise ConfigError("z moduli must be non-negative")
        if not (0.0 <= self.theta < math.pi):
            raise ConfigError("theta must lie in [0, pi)")
        if self.command != "validate" and self.output_path is None:
            raise ConfigError(f"--out is required for --command {self.command}")
        if self.family in ("susy-iso", "susy-new") and self.model != "SUSY_Q4":
            raise ConfigError(f"family {self.family} requires --model SUSY_Q4")
        if self.model == "SUSY_Q4" and self.family not in ("susy-iso", "susy-new"):
            raise ConfigError("model SUSY_Q4 requires a susy-iso or susy-new family")

    def config_hash(self) -> str:
        payload = "|".join([
            self.command, self.family, self.model,
            f"{self.z_min:.17g}", f"{self.z_max:.17g}", str(self.z_steps),
            str(self.basis_size), f"{self.theta:.17g}", f"{self.phi:.17g}",
            self.seed_config or "",
        ])
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]

    @property
    def z_grid(self) -> np.ndarray:
        return np.linspace(self.z_min, self.z_max, self.z_steps)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="truncosc",
        description="Half-line oscillator coherent states: CSV data and validation.",
    )
    parser.add_argument("--command", required=True,
                        choices=["density", "uncertainty", "entropy", "validate"])
    parser.add_argument("--family", default="lowering",
                        choices=[f.value for f in Family],
                        help="coherent-state family (susy-* require --model SUSY_Q4)")
    parser.add_argument("--model", default="TRUNC", choices=["TRUNC", "SUSY_Q4"])
    parser.add_argument("--zmin", type=float, default=0.0, dest="z_min")
    parser.add_argument("--zmax", type=float, default=2.0, dest="z_max")
    parser.add_argument("--steps", type=int, default=9, dest="z_steps")
    parser.add_argument("--basis", type=int, default=64, dest="basis_size",
                        help="basis size / two-mode level cutoff (default 64; "
                             "susy entropy scans want >= 80)")
    parser.add_argument("--theta", type=float, default=math.pi / 2.0)
    parser.add_argument("--phi", type=float, default=0.0)
    parser.add_argument("--out", dest="output_path", default=None)
    parser.add_argument("--seed-config", dest="seed_config", default=None,
                        help="text file of 'epsilon nu' pairs for a custom "
                             "factorization-energy grid (validate only)")
    return parser


# ----------------------------------------------------------------------------
# deterministic CSV output
# ----------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if v == 0.0:
        v = 0.0  # normalize -0.0
    return f"{v:.12g}"


def _write_csv(config: RunConfig, header: Sequence[str],
               rows: Sequence[Sequence]) -> None:
    lines = [f"# config={config.config_hash()} basis={config.basis_size} "
             f"version={__version__}"]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(cell) for cell in row))
    with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


# ----------------------------------------------------------------------------
# density
# ----------------------------------------------------------------------------

def _density_grid() -> np.ndarray:
    step = _DENSITY_X_MAX / _DENSITY_GRID_POINTS
    return np.linspace(step, _DENSITY_X_MAX, _DENSITY_GRID_POINTS)


def _trunc_wavefunction_rows(n_levels: int, x: np.ndarray) -> np.ndarray:
    return np.vstack([eigenfunction(k, x) for k in range(n_levels)])


def _susy_wavefunction_rows(model, basis: Basis, n_levels: int,
                            x: np.ndarray) -> np.ndarray:
    if basis == Basis.SUSY_ISO:
        return np.vstack([_susy.iso_eigenfunction_derivatives(model, n, x, order=0)[0]
                          for n in range(n_levels)])
    return np.vstack([_susy.new_eigenfunction_derivatives(model, j, x, order=0)[0]
                      for j in range(n_levels)])


def _density_profile(config: RunConfig, z_abs: float, x: np.ndarray) -> np.ndarray:
    if config.model == "TRUNC":
        cs = build_cs(Family(config.family), truncated_ladder(), z_abs,
                      truncation=config.basis_size)
        rows = _trunc_wavefunction_rows(cs.vector.amplitudes.size, x)
    else:
        model = _susy.q4_model()
        cs = _susy.susy_cs(model, Basis(config.family), z_abs,
                           truncation=config.basis_size)
        rows = _susy_wavefunction_rows(model, Basis(config.family),
                                       cs.vector.amplitudes.size, x)
    psi = cs.vector.amplitudes @ rows
    return np.abs(psi) ** 2


def cmd_density(config: RunConfig) -> int:
    x = _density_grid()
    zs = config.z_grid
    profiles = [_density_profile(config, float(z), x) for z in zs]
    header = ["x"] + [f"P[z={_fmt(float(z))}]" for z in zs]
    rows = [[x[i]] + [p[i] for p in profiles] for i in range(x.size)]
    _write_csv(config, header, rows)
    print(f"density: wrote {x.size} grid rows x {len(zs)} profiles "
          f"to {config.output_path}", file=sys.stderr)
    return EXIT_OK


# ----------------------------------------------------------------------------
# uncertainty
# ----------------------------------------------------------------------------

def _susy_observable_tables(model, basis: Basis, n_max: int) -> dict:
    rule = gauss_halfline(degree=4 * (2 * n_max + 5) + 32)
    if basis == Basis.SUSY_ISO:
        def value_fn(k, x):
            return _susy.iso_weighted_rows(model, k, x, order=0)[0]

        def deriv_fn(k, x):
            return _susy.iso_weighted_rows(model, k, x, order=1)[1]
    else:
        def value_fn(k, x):
            return _susy.new_weighted_rows(model, k, x, order=0)[0]

        def deriv_fn(k, x):
            return _susy.new_weighted_rows(model, k, x, order=1)[1]
    return {kind: build_table(kind, n_max, basis=basis, value_fn=value_fn,
                              deriv_fn=deriv_fn, rule=rule)
            for kind in (ObservableKind.X, ObservableKind.X2,
                         ObservableKind.P, ObservableKind.P2)}


def _susy_uncertainty_rows(config: RunConfig) -> list:
    model = _susy.q4_model()
    basis = Basis(config.family)
    n_terms = 2 if basis == Basis.SUSY_NEW else min(config.basis_size, 48)
    tables = _susy_observable_tables(model, basis, n_terms - 1)
    rows = []
    for z in config.z_grid:
        cs = _susy.susy_cs(model, basis, float(z), truncation=config.basis_size)
        ex = expectation(tables[ObservableKind.X], cs, n_terms)
        ex2 = expectation(tables[ObservableKind.X2], cs, n_terms)
        ep = expectation(tables[ObservableKind.P], cs, n_terms)
        ep2 = expectation(tables[ObservableKind.P2], cs, n_terms)
        sx = math.sqrt(ex2 - ex * ex)
        sp = math.sqrt(ep2 - ep * ep)
        rows.append([float(z), sx, sp, sx * sp])
    return rows


def cmd_uncertainty(config: RunConfig) -> int:
    if config.model == "SUSY_Q4":
        rows = _susy_uncertainty_rows(config)
    else:
        records = uncertainty_scan(Family(config.family), truncated_ladder(),
                                   [float(z) for z in config.z_grid],
                                   truncation=config.basis_size)
        rows = [[r.z_modulus, r.sigma_x, r.sigma_p, r.product] for r in records]
    _write_csv(config, ["z_abs", "sigma_x", "sigma_p", "product"], rows)
    print(f"uncertainty: wrote {len(rows)} scan rows to {config.output_path}",
          file=sys.stderr)
    return EXIT_OK


# ----------------------------------------------------------------------------
# entropy
# ----------------------------------------------------------------------------

def cmd_entropy(config: RunConfig) -> int:
    setting = BeamSplitterSetting(config.theta, config.phi)
    model = _susy.q4_model() if config.model == "SUSY_Q4" else None
    n_terms = 32 if config.family == "susy-iso" else 20
    records = entropy_scan(Family(config.family), config.z_grid, setting=setting,
                           cutoff=config.basis_size, n_terms=n_terms, model=model)
    rows = [[r.z_abs, r.theta, r.phi, r.entropy, r.converged, r.cutoff]
            for r in records]
    _write_csv(config, ["z_abs", "theta", "phi", "S", "S_converged", "cutoff"], rows)
    print(f"entropy: wrote {len(rows)} scan rows to {config.output_path}",
          file=sys.stderr)
    return EXIT_OK


# ----------------------------------------------------------------------------
# validation suite
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class _Check:
    name: str
    min_basis: int
    run: Callable[[RunConfig], tuple]  # -> (status, detail)


def _check_lowering_norm(config: RunConfig):
    worst = 0.0
    for r in (0.1, 1.0, 2.0):
        cs = build_cs(Family.LOWERING, truncated_ladder(), r,
                      truncation=config.basis_size)
        closed = math.sqrt(r / math.sinh(r))
        worst = max(worst, abs(cs.norm_constant - closed) / closed)
    status = "PASS" if worst < 1e-10 else "FAIL"
    return status, f"max relative deviation {worst:.3e} (tol 1e-10)"


def _check_displacement_norm(config: RunConfig):
    worst = 0.0
    for r in (0.1, 0.3, 0.45):
        # the norm series converges slowly near the 1/2 radius, so sum it
        # directly instead of building a truncated state
        total = float(displacement_norm_partial_sums(truncated_ladder(), r,
                                                     n_terms=400)[-1])
        closed = (1.0 - 4.0 * r * r) ** 0.75
        worst = max(worst, abs(total ** -0.5 - closed) / closed)
    sums = displacement_norm_partial_sums(truncated_ladder(), 0.6, n_terms=80)
    diverges = float(np.max(sums)) > 1e6
    ok = worst < 1e-8 and diverges
    return ("PASS" if ok else "FAIL",
            f"max relative deviation {worst:.3e} (tol 1e-8); "
            f"divergent partial sum at 0.6 reaches {float(np.max(sums)):.3e}")


def _check_mean_energy(config: RunConfig):
    worst = 0.0
    for r in (0.3, 0.8, 1.5, 2.2, 3.0):
        cs = build_cs(Family.LOWERING, truncated_ladder(), r, truncation=60)
        closed = 0.5 + r / math.tanh(r)
        worst = max(worst, abs(energy_expectation(cs) - closed) / closed)
    return ("PASS" if worst < 1e-8 else "FAIL",
            f"max relative deviation {worst:.3e} (tol 1e-8)")


def _check_eigenrelation(config: RunConfig):
    worst = 0.0
    for z in (0.5, 1.0 + 0.5j, 2.0j, 2.0):
        cs = build_cs(Family.LOWERING, truncated_ladder(), z,
                      truncation=config.basis_size)
        worst = max(worst, eigen_residual(cs))
    return ("PASS" if worst < 1e-10 else "FAIL",
            f"max residual {worst:.3e} (tol 1e-10)")


def _check_identity_corrected(config: RunConfig):
    dev = identity_resolution_check(Family.LOWERING, truncated_ladder(),
                                    lowering_measure_corrected(), n_max=6,
                                    r_max=60.0, truncation=128)
    return ("PASS" if dev < 1e-6 else "FAIL",
            f"max moment deviation {dev:.3e} (tol 1e-6)")


def _check_identity_reference(config: RunConfig):
    dev = identity_resolution_check(Family.LOWERING, truncated_ladder(),
                                    lowering_measure_reference(), n_max=6,
                                    r_max=60.0, truncation=128)
    return "REPORT", (f"reference candidate density misses the moment test "
                      f"by {dev:.4g} (expected discrepancy, not a failure)")


def _check_matrix_elements(config: RunConfig):
    rule = gauss_halfline(degree=4 * 8 + 16)
    worst = 0.0
    for kind in (ObservableKind.X, ObservableKind.P):
        quad = build_table(kind, 8, rule=rule)
        for n in range(9):
            for m in range(n + 1):
                worst = max(worst, abs(matrix_element_closed(kind, n, m)
                                       - quad.entries[n, m]))
    return ("PASS" if worst < 1e-8 else "FAIL",
            f"X and P closed vs quadrature, max |diff| {worst:.3e} (tol 1e-8)")


def _check_x2p2_offdiag(config: RunConfig):
    rows = discrepancy_report(n_max=8, tol=1e-8)
    if not rows:
        return "REPORT", "no closed-form/quadrature mismatches above 1e-8"
    worst = max(r["abs_diff"] for r in rows)
    kinds = sorted({r["kind"] for r in rows})
    return "REPORT", (f"{len(rows)} off-diagonal closed-form mismatches in "
                      f"{'/'.join(kinds)}, max |diff| {worst:.3e} "
                      f"(expected discrepancy, quadrature is authoritative)")


def _check_uncertainty_floor(config: RunConfig):
    records = uncertainty_scan(Family.LOWERING, truncated_ladder(),
                               [0.5, 2.0, 5.0], truncation=config.basis_size)
    floor_ok = all(r.product >= 0.5 - 5e-3 for r in records)
    tail_ok = abs(records[-1].product - 0.5) < 0.05
    return ("PASS" if floor_ok and tail_ok else "FAIL",
            f"products {[f'{r.product:.4f}' for r in records]}, floor 0.5-5e-3, "
            f"tail |p-0.5| < 0.05")


def _check_lin_crossing(config: RunConfig):
    records = uncertainty_scan(Family.LIN_LOWERING, truncated_ladder(), [1.0],
                               truncation=config.basis_size)
    gap = abs(records[0].sigma_x - records[0].sigma_p)
    return ("PASS" if gap < 0.02 else "FAIL",
            f"|sigma_x - sigma_p| = {gap:.4f} at |z| = 1 (tol 0.02)")


def _check_susy_potential(config: RunConfig):
    model = _susy.q4_model()
    grid = np.linspace(0.1, 6.0, 400)
    seeds = tuple(_susy.seed_solution(e, n) for e, n in
                  zip(_susy.Q4_SEED_ENERGIES, _susy.Q4_SEED_ASYMMETRY))
    dev = float(np.max(np.abs(_susy.wronskian_potential(seeds, grid)
                              - model.potential(grid))))
    return ("PASS" if dev < 1e-6 else "FAIL",
            f"Wronskian-built vs closed-form potential, max |diff| {dev:.3e} "
            f"(tol 1e-6)")


def _check_susy_eigen(config: RunConfig):
    model = _susy.q4_model()
    grid = np.linspace(0.1, 6.0, 300)
    worst = 0.0
    for j, energy_val in ((0, -4.5), (1, -2.5)):
        rows = _susy.new_eigenfunction_derivatives(model, j, grid, order=2)
        worst = max(worst, float(np.max(np.abs(
            -0.5 * rows[2] + model.potential(grid) * rows[0] - energy_val * rows[0]))))
    for n in range(6):
        rows = _susy.iso_eigenfunction_derivatives(model, n, grid, order=2)
        e_n = 2 * n + 1.5
        worst = max(worst, float(np.max(np.abs(
            -0.5 * rows[2] + model.potential(grid) * rows[0] - e_n * rows[0]))))
    rule = gauss_halfline(degree=160)
    vals = np.vstack(
        [_susy.new_weighted_rows(model, j, rule.nodes, order=0)[0]
         for j in range(2)]
        + [_susy.iso_weighted_rows(model, n, rule.nodes, order=0)[0]
           for n in range(6)])
    gram = (vals * rule.weights) @ vals.T
    gram_dev = float(np.max(np.abs(gram - np.eye(8))))
    ok = worst < 1e-6 and gram_dev < 1e-8
    return ("PASS" if ok else "FAIL",
            f"max eigen-residual {worst:.3e} (tol 1e-6), "
            f"8-function Gram vs identity {gram_dev:.3e} (tol 1e-8)")


def _check_susy_ladder(config: RunConfig):
    model = _susy.q4_model()
    ladder = _susy.ladder_for(model)
    spec = _susy.iso_linear_ladder()
    comm_dev = max(abs((spec.raise_sq(n + 1) - spec.lower_sq(n)) - 2.0)
                   for n in range(21))
    full_e1 = _susy.susy_ladder_action(ladder, Basis.SUSY_ISO, "lower", 1,
                                       operator="full")[0]
    six_ok = full_e1 == math.sqrt(8640.0)
    h_dev = 0.0
    for r in (0.4, 1.1, 2.0):
        cs = _susy.susy_cs(model, Basis.SUSY_ISO, r, truncation=64)
        mean = sum(abs(a) ** 2 * (2 * k + 1.5)
                   for k, a in enumerate(cs.vector.amplitudes))
        h_dev = max(h_dev, abs(mean - (1.5 + 4.0 * r * r)))
    ok = comm_dev == 0.0 and six_ok and h_dev < 1e-8
    return ("PASS" if ok else "FAIL",
            f"commutator deviation {comm_dev:.1e} (exact), six-factor on level 1 "
            f"{'exact' if six_ok else 'WRONG'}, mean-energy deviation {h_dev:.3e}")


def _check_susy_new_norm(config: RunConfig):
    model = _susy.q4_model()
    worst = 0.0
    for r in (0.2, 0.35, 0.9):
        closed = _susy.new_norm_constant_closed(model, r)
        worst = max(worst, abs(closed - (1.0 - 6.0 * r * r)))
        cs = _susy.susy_cs(model, Basis.SUSY_NEW, r, truncation=8)
        direct = float(np.sum(np.abs(cs.vector.amplitudes) ** 2))
        worst = max(worst, abs(direct - 1.0))
    return ("PASS" if worst < 1e-12 else "FAIL",
            f"signed closed sum vs 1 - 6|z|^2 and direct normalization, "
            f"max deviation {worst:.3e} (tol 1e-12)")


def _check_beamsplitter(config: RunConfig):
    worst = 0.0
    worst_bch = 0.0
    setting = BeamSplitterSetting(math.pi / 2.0, 0.0)
    for total in range(11):
        oracle = beamsplitter_block_oracle(total, setting)
        worst = max(worst, float(np.max(np.abs(
            beamsplitter_block(total, setting.theta, setting.phi) - oracle))))
        worst_bch = max(worst_bch, float(np.max(np.abs(
            beamsplitter_block_bch(total, setting.theta, setting.phi) - oracle))))
    amps = np.zeros((4, 4), dtype=complex)
    amps[1, 1] = 1.0
    out = beamsplitter_apply(TwoModeState(amps), setting).amplitudes
    hom = abs(out[1, 1])
    ok = worst < 1e-8 and worst_bch < 1e-8 and hom < 1e-12
    return ("PASS" if ok else "FAIL",
            f"blocks vs exponential oracle {worst:.3e} (spectral) / "
            f"{worst_bch:.3e} (factorized), interference null {hom:.3e}")


def _check_overlaps(config: RunConfig):
    worst = 0.0
    for a in range(7):
        for b in range(7):
            closed = halfline_overlap(a, b, method="auto")
            quad = halfline_overlap(a, b, method="quadrature")
            worst = max(worst, abs(closed - quad))
    spots = (abs(halfline_overlap(0, 1) - 1.0),
             abs(halfline_overlap(1, 1) - math.sqrt(math.pi)),
             abs(halfline_overlap(0, 0) - math.sqrt(math.pi) / 2.0))
    ok = worst < 1e-10 and max(spots) < 1e-12
    return ("PASS" if ok else "FAIL",
            f"closed vs quadrature max |diff| {worst:.3e} (tol 1e-10), "
            f"spot values max |diff| {max(spots):.3e}")


def _check_entropy_theta0(config: RunConfig):
    records = entropy_scan(Family.LOWERING, [0.7],
                           setting=BeamSplitterSetting(0.0, 0.0),
                           cutoff=32, n_terms=12)
    s = records[0].entropy
    return ("PASS" if abs(s) < 1e-8 else "FAIL",
            f"S = {s:.3e} at theta = 0 (tol 1e-8)")


def _check_new_measure(config: RunConfig):
    model = _susy.q4_model()
    dev = _susy.new_measure_check(model, n_max=4, r_max=20.0)
    return "REPORT", (f"radial kernel reproduces the required moments; the "
                      f"positivity defect of the printed density is {dev:.1f} "
                      f"(sign-alternating weights; expected discrepancy)")


def _check_iso_measure(config: RunConfig):
    dev = _susy.iso_measure_check(n_max=6, r_max=8.0, truncation=320)
    return ("PASS" if dev < 1e-6 else "FAIL",
            f"flat-density moment deviation {dev:.3e} (tol 1e-6)")


def parse_seed_config(path: str) -> tuple:
    """Read 'epsilon nu' pairs; nu accepts inf/-inf for the odd branch."""
    pairs = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise ConfigError(
                        f"{path}:{lineno}: expected 'epsilon nu', got {raw!r}")
                try:
                    eps = float(parts[0])
                    nu = float(parts[1])
                except ValueError as exc:
                    raise ConfigError(f"{path}:{lineno}: {exc}") from exc
                if math.isnan(eps) or math.isnan(nu):
                    raise ConfigError(f"{path}:{lineno}: NaN is not a value")
                pairs.append((eps, nu))
    except OSError as exc:
        raise ConfigError(f"cannot read seed config {path}: {exc}") from exc
    if not pairs:
        raise ConfigError(f"seed config {path} holds no seed lines")
    return tuple(pairs)


def _check_seed_config(config: RunConfig):
    pairs = parse_seed_config(config.seed_config)
    eps = [p[0] for p in pairs]
    if len(pairs) % 2 != 0:
        return "FAIL", f"need an even number of seeds, got {len(pairs)}"
    if any(e2 <= e1 for e1, e2 in zip(eps, eps[1:])):
        return "FAIL", f"factorization energies must increase strictly: {eps}"
    if max(eps) >= 0.5:
        return "FAIL", (f"factorization energies must stay below the 1/2 "
                        f"threshold: max is {max(eps)}")
    grid = np.linspace(0.05, 8.0, 500)
    sample = np.linspace(0.1, 6.0, 60)
    seeds = []
    for e, nu in pairs:
        seed = _susy.seed_solution(e, nu)
        u = seed(sample)
        u2 = seed.second_derivative_direct(sample)
        res = float(np.max(np.abs(-0.5 * u2 + (0.5 * sample ** 2 - e) * u)))
        scale = float(np.max(np.abs(u)))
        if res > 1e-8 * max(scale, 1.0):
            return "FAIL", (f"seed (epsilon={e}, nu={nu}) misses its defining "
                            f"equation by {res:.3e}")
        seeds.append(seed)
    try:
        _susy.wronskian_potential(tuple(seeds), grid)
    except (SingularWronskian, ValueError) as exc:
        return "FAIL", f"seed grid gives a singular construction: {exc}"
    return "PASS", (f"{len(pairs)} seeds verified against the series oracle; "
                    f"Wronskian regular on (0, 8]")


_CHECKS = (
    _Check("lowering-norm-closed", 64, _check_lowering_norm),
    _Check("displacement-norm-closed", 64, _check_displacement_norm),
    _Check("mean-energy-closed", 64, _check_mean_energy),
    _Check("lowering-eigenrelation", 64, _check_eigenrelation),
    _Check("identity-resolution-corrected", 64, _check_identity_corrected),
    _Check("identity-resolution-reference", 64, _check_identity_reference),
    _Check("matrix-elements-x-p", 0, _check_matrix_elements),
    _Check("matrix-elements-x2-p2-offdiag", 0, _check_x2p2_offdiag),
    _Check("uncertainty-floor", 64, _check_uncertainty_floor),
    _Check("linearised-crossing", 64, _check_lin_crossing),
    _Check("susy-potential-wronskian", 0, _check_susy_potential),
    _Check("susy-eigen-residuals", 0, _check_susy_eigen),
    _Check("susy-ladder-coefficients", 0, _check_susy_ladder),
    _Check("susy-new-norm-closed", 0, _check_susy_new_norm),
    _Check("beamsplitter-blocks", 0, _check_beamsplitter),
    _Check("halfline-overlaps", 0, _check_overlaps),
    _Check("entropy-theta0", 32, _check_entropy_theta0),
    _Check("new-measure-moments", 0, _check_new_measure),
    _Check("iso-measure-identity", 64, _check_iso_measure),
)


def cmd_validate(config: RunConfig) -> int:
    checks = list(_CHECKS)
    if config.seed_config is not None:
        checks.append(_Check("seed-config-model", 0, _check_seed_config))
    results = []
    for check in checks:
        if config.basis_size < check.min_basis:
            results.append((check.name, "SKIP",
                            f"needs basis_size >= {check.min_basis}, "
                            f"have {config.basis_size}"))
            continue
        try:
            status, detail = check.run(config)
        except ConfigError:
            raise
        except Exception as exc:  # a crashed check is a failed check
            status, detail = "FAIL", f"{type(exc).__name__}: {exc}"
        results.append((check.name, status, detail))
    n_fail = sum(1 for _, status, _ in results if status == "FAIL")
    n_skip = sum(1 for _, status, _ in results if status == "SKIP")
    for name, status, detail in results:
        print(f"{status:7s} {name}: {detail}", file=sys.stderr)
    if n_skip:
        print(f"warning: {n_skip} truncation-sensitive checks skipped at "
              f"basis_size {config.basis_size}", file=sys.stderr)
    print(f"validate: {len(results)} checks, {n_fail} failures, {n_skip} skipped",
          file=sys.stderr)
    if config.output_path is not None:
        _write_csv(config, ["check", "status", "detail"],
                   [[name, status, f'"{detail}"'] for name, status, detail in results])
    return EXIT_VALIDATION if n_fail else EXIT_OK


# ----------------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------------

_HANDLERS = {
    "density": cmd_density,
    "uncertainty": cmd_uncertainty,
    "entropy": cmd_entropy,
    "validate": cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = RunConfig(command=args.command, family=args.family, model=args.model,
                       z_min=args.z_min, z_max=args.z_max, z_steps=args.z_steps,
                       basis_size=args.basis_size, theta=args.theta, phi=args.phi,
                       output_path=args.output_path, seed_config=args.seed_config)
    try:
        config.validate()
        if config.seed_config is not None and config.command == "validate":
            parse_seed_config(config.seed_config)  # surface parse errors early
        return _HANDLERS[config.command](config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TruncOscError as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
