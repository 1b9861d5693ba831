"""Higher-order partner Hamiltonians of the half-line oscillator.

Contents:

* general seed solutions of the oscillator equation at arbitrary energy,
  with analytic derivatives to fifth order,
* Wronskian partner potentials for any number of seeds, with analytic
  first and second determinant derivatives (no finite differences),
* the explicit fourth-order model (seed energies -11/2..-5/2) as frozen
  polynomial data: partner potential, fourth-order intertwiner
  coefficients, and the two bound states of the finite tower,
* sixth-order and linearised ladder coefficients on both towers,
* coherent states on each tower and the measure diagnostics for the
  finite one.

Seed-parity constants for the explicit model were recovered numerically
(the kernel of the printed intertwiner pins the log-derivative of each
seed through a Riccati identity; a grid fit of the Wronskian potential
against the closed form confirms the same choice):
the seeds alternate odd, even, odd, even with increasing energy, i.e.
asymmetry values (inf, 0, inf, 0); the plain-normalized Wronskian then
satisfies W(x) e^{-2x^2} / den(x) = 16/45.

The finite-tower coherent state uses the principal complex branch for
square roots of negative rising factorials; probabilities use moduli,
so the branch shows up only in relative phases.  Its normalization is
always the direct modulus-squared sum; the closed-form norm constant
printed in the source material evaluates to the SIGNED series
1 - 6|z|^2 for this model and is exposed for side-by-side logging only.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln, gammasgn

from .coherent import CoherentState, Family, build_cs, iso_measure, identity_resolution_check
from .errors import (
    GammaPole,
    IndexOutOfRange,
    SingularWronskian,
    UnsupportedModel,
)
from .fock import (
    Basis,
    FockVector,
    LadderSpec,
    eigenfunction_derivatives,
    weighted_eigenfunction_derivatives,
)
from .numerics import (
    DEFAULT_CONFIG,
    SpecialFunctionConfig,
    hyp1f1,
    meijer_g_2012,
    rising_factorial,
)

__all__ = [
    "SeedSolution",
    "seed_solution",
    "SusyModel",
    "SusyLadder",
    "q4_model",
    "iso_linear_ladder",
    "wronskian_values",
    "wronskian_potential",
    "transformed_eigenfunction_rows",
    "iso_eigenfunction",
    "iso_eigenfunction_derivatives",
    "iso_weighted_rows",
    "new_eigenfunction",
    "new_eigenfunction_derivatives",
    "new_weighted_rows",
    "ladder_for",
    "susy_ladder_action",
    "susy_cs",
    "new_norm_constant_closed",
    "new_measure_check",
    "iso_measure_check",
    "g_moment",
    "export_model_csv",
    "Q4_SEED_ENERGIES",
    "Q4_SEED_ASYMMETRY",
]

# ----------------------------------------------------------------------------
# seed solutions
# ----------------------------------------------------------------------------

def _is_nonpositive_integer(value: float) -> bool:
    return value <= 0 and float(value).is_integer()


@dataclass(frozen=True)
class SeedSolution:
    """Solution of -u''/2 + (x^2/2) u = epsilon u with parity asymmetry nu.

    nu = 0 selects the even series branch, nu = +-inf the odd branch
    (returned as the plain odd series, dropping the diverging gamma-ratio
    scale), and finite nonzero nu mixes them with the coefficient
    2 nu Gamma((3-2e)/4) / Gamma((1-2e)/4).
    """

    epsilon: float
    nu: float
    config: SpecialFunctionConfig = field(default=DEFAULT_CONFIG, compare=False)

    def __post_init__(self) -> None:
        if math.isfinite(self.nu) and self.nu != 0.0:
            if _is_nonpositive_integer(self._a_even) or _is_nonpositive_integer(self._a_odd):
                raise GammaPole(
                    f"gamma-ratio pole at epsilon={self.epsilon}; "
                    "use nu = 0 or nu = +-inf to select a parity branch")

    @property
    def _a_even(self) -> float:
        return (1.0 - 2.0 * self.epsilon) / 4.0

    @property
    def _a_odd(self) -> float:
        return (3.0 - 2.0 * self.epsilon) / 4.0

    @property
    def _mixing(self) -> Optional[float]:
        """Odd-branch coefficient; None encodes the pure odd branch."""
        if not math.isfinite(self.nu):
            return None
        if self.nu == 0.0:
            return 0.0
        log_ratio = gammaln(self._a_odd) - gammaln(self._a_even)
        sign = gammasgn(self._a_odd) * gammasgn(self._a_even)
        return 2.0 * self.nu * sign * math.exp(log_ratio)

    def _series(self, a: float, b: float, x: np.ndarray) -> np.ndarray:
        return np.array([hyp1f1(a, b, float(t) * float(t), self.config) for t in x])

    def _value_and_slope(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ae, ao = self._a_even, self._a_odd
        w = np.exp(-x * x / 2.0)
        c = self._mixing
        coeff = math.copysign(1.0, self.nu) if c is None else c
        u = np.zeros_like(x, dtype=float)
        du = np.zeros_like(u)
        if coeff != 0.0:
            fo = self._series(ao, 1.5, x)
            fo1 = self._series(ao + 1.0, 2.5, x)
            u_odd = w * x * fo
            du_odd = w * (fo + x * x * (-fo + (4.0 * ao / 3.0) * fo1))
            u += coeff * u_odd
            du += coeff * du_odd
        if c is not None:
            fe = self._series(ae, 0.5, x)
            fe1 = self._series(ae + 1.0, 1.5, x)
            u += w * fe
            du += w * x * (-fe + 4.0 * ae * fe1)
        return u, du

    def derivatives(self, x: Sequence[float], order: int = 5) -> np.ndarray:
        """Rows u, u', ..., u^(order) on x, via the differentiated equation.

        u'' = (x^2 - 2 epsilon) u seeds a three-term Leibniz recurrence:
        u^(n+2) = (x^2 - 2e) u^(n) + 2 n x u^(n-1) + n (n-1) u^(n-2).
        """
        x = np.asarray(x, dtype=float)
        u, du = self._value_and_slope(x)
        rows = [u, du]
        for k in range(2, order + 1):
            n = k - 2
            term = (x * x - 2.0 * self.epsilon) * rows[n]
            if n >= 1:
                term = term + 2.0 * n * x * rows[n - 1]
            if n >= 2:
                term = term + n * (n - 1) * rows[n - 2]
            rows.append(term)
        return np.array(rows)

    def second_derivative_direct(self, x: Sequence[float]) -> np.ndarray:
        """u'' from the twice-differentiated series (independent oracle).

        Uses only the contiguous derivative identity of the confluent
        series, never the differential equation, so it can certify the
        recurrence route.
        """
        x = np.asarray(x, dtype=float)
        ae, ao = self._a_even, self._a_odd
        c = self._mixing
        coeff = math.copysign(1.0, self.nu) if c is None else c
        h = np.zeros_like(x, dtype=float)
        h1 = np.zeros_like(h)
        h2 = np.zeros_like(h)
        if coeff != 0.0:
            fo = self._series(ao, 1.5, x)
            fo1 = self._series(ao + 1.0, 2.5, x)
            fo2 = self._series(ao + 2.0, 3.5, x)
            g = x * fo
            g1 = fo + (4.0 * ao / 3.0) * x * x * fo1
            g2 = 3.0 * (4.0 * ao / 3.0) * x * fo1 + (16.0 / 15.0) * ao * (ao + 1.0) * x ** 3 * fo2
            h += coeff * g
            h1 += coeff * g1
            h2 += coeff * g2
        if c is not None:
            fe = self._series(ae, 0.5, x)
            fe1 = self._series(ae + 1.0, 1.5, x)
            fe2 = self._series(ae + 2.0, 2.5, x)
            h += fe
            h1 += 4.0 * ae * x * fe1
            h2 += 4.0 * ae * fe1 + (16.0 / 3.0) * ae * (ae + 1.0) * x * x * fe2
        w = np.exp(-x * x / 2.0)
        return w * (h2 - 2.0 * x * h1 + (x * x - 1.0) * h)

    def __call__(self, x: Sequence[float]) -> np.ndarray:
        return self.derivatives(x, order=0)[0]


def seed_solution(epsilon: float, nu: float,
                  config: SpecialFunctionConfig = DEFAULT_CONFIG) -> SeedSolution:
    """Factory for SeedSolution (see the dataclass for conventions)."""
    return SeedSolution(epsilon=epsilon, nu=nu, config=config)


# ----------------------------------------------------------------------------
# Wronskian machinery
# ----------------------------------------------------------------------------

def _det_over_columns(stack: np.ndarray, cols: Sequence[int]) -> np.ndarray:
    """det of the (function x derivative-order) minor at every grid point.

    stack has shape (q, max_order+1, nx); cols picks derivative orders.
    """
    minor = stack[:, list(cols), :].transpose(2, 0, 1)
    return np.linalg.det(minor)


def wronskian_values(seeds: Sequence[SeedSolution], x: Sequence[float]
                     ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(W, W', W'') of the seed Wronskian, all from analytic derivative rows.

    W' bumps the last derivative column by one; W'' adds the twice-bumped
    column determinant and (when q >= 2) the doubly-single-bumped one.
    """
    q = len(seeds)
    x = np.asarray(x, dtype=float)
    if q == 0:
        ones = np.ones_like(x)
        return ones, np.zeros_like(x), np.zeros_like(x)
    stack = np.array([s.derivatives(x, order=q + 1) for s in seeds])
    base = list(range(q))
    w = _det_over_columns(stack, base)
    wp = _det_over_columns(stack, base[:-1] + [q])
    wpp = _det_over_columns(stack, base[:-1] + [q + 1])
    if q >= 2:
        wpp = wpp + _det_over_columns(stack, base[:-2] + [q - 1, q])
    return w, wp, wpp


def wronskian_potential(seeds: Sequence[SeedSolution], grid: Sequence[float]) -> np.ndarray:
    """Partner potential x^2/2 - (ln W)'' on the grid.

    Raises SingularWronskian when W changes sign between grid points or
    dips far below its neighbors (a grid point sitting on a zero); the
    message reports where.  W itself grows like exp(q x^2 / 2), so wide
    grids can overflow, which is reported separately.
    """
    grid = np.asarray(grid, dtype=float)
    if np.any(grid <= 0):
        raise ValueError("grid points must be positive")
    if len(seeds) == 0:
        return grid * grid / 2.0
    w, wp, wpp = wronskian_values(seeds, grid)
    _raise_if_singular(w, grid)
    return grid * grid / 2.0 - (wpp * w - wp * wp) / (w * w)


def _raise_if_singular(w: np.ndarray, grid: np.ndarray) -> None:
    if not np.all(np.isfinite(w)):
        i = int(np.argmax(~np.isfinite(w)))
        raise ValueError(
            f"Wronskian overflows near x = {grid[i]:.6g}; shrink the grid")
    crossing = w[:-1] * w[1:] < 0
    if np.any(crossing):
        i = int(np.argmax(crossing))
        raise SingularWronskian(f"Wronskian changes sign near x = {grid[i]:.6g}")
    mag = np.abs(w)
    if mag.size >= 2:
        local = np.maximum(np.roll(mag, 1), np.roll(mag, -1))
        local[0], local[-1] = mag[1], mag[-2]
        dip = (mag < 1e-8 * local) | (mag == 0.0)
    else:
        dip = mag == 0.0
    if np.any(dip):
        i = int(np.argmax(dip))
        raise SingularWronskian(f"Wronskian vanishes near x = {grid[i]:.6g}")


def transformed_eigenfunction_rows(seeds: Sequence[SeedSolution], n: int,
                                   x: Sequence[float]) -> np.ndarray:
    """(phi, phi', phi'') of the Wronskian-transformed eigenfunction.

    phi = W(u_1..u_q, psi_n) / W(u_1..u_q), unnormalized; valid for any
    seed count q >= 1.  Used as the general-q route (the explicit
    fourth-order model has the faster intertwiner path).
    """
    q = len(seeds)
    if q < 1:
        raise ValueError("need at least one seed")
    x = np.asarray(x, dtype=float)
    order = q + 2
    stack = np.empty((q + 1, order + 1, x.size))
    for i, s in enumerate(seeds):
        stack[i] = s.derivatives(x, order=order)
    stack[q] = eigenfunction_derivatives(n, x, order=order)
    big = list(range(q + 1))
    a = _det_over_columns(stack, big)
    ap = _det_over_columns(stack, big[:-1] + [q + 1])
    app = _det_over_columns(stack, big[:-1] + [q + 2])
    app = app + _det_over_columns(stack, big[:-2] + [q, q + 1])
    seed_stack = stack[:q]
    base = list(range(q))
    b = _det_over_columns(seed_stack, base)
    bp = _det_over_columns(seed_stack, base[:-1] + [q])
    bpp = _det_over_columns(seed_stack, base[:-1] + [q + 1])
    if q >= 2:
        bpp = bpp + _det_over_columns(seed_stack, base[:-2] + [q - 1, q])
    _raise_if_singular(b, x)
    phi = a / b
    phip = (ap - phi * bp) / b
    phipp = (app - 2.0 * phip * bp - phi * bpp) / b
    return np.array([phi, phip, phipp])


# ----------------------------------------------------------------------------
# the explicit fourth-order model (frozen polynomial data)
# ----------------------------------------------------------------------------

Q4_SEED_ENERGIES = (-5.5, -4.5, -3.5, -2.5)
Q4_SEED_ASYMMETRY = (math.inf, 0.0, math.inf, 0.0)

_P = np.polynomial.Polynomial
_DEN = _P([45.0, 0, 0, 0, 120.0, 0, -64.0, 0, 16.0])
_V_NUM = _P([2025.0, 0, 16200.0, 0, -10800.0, 0, -10080.0, 0, 27360.0, 0,
             -19584.0, 0, 10496.0, 0, -2560.0, 0, 256.0])
_ETA_NUM = {
    3: _P([0, -180.0, 0, -480.0, 0, -96.0, 0, 128.0, 0, -64.0]),
    2: _P([-630.0, 0, 990.0, 0, -720.0, 0, 528.0, 0, -96.0, 0, 96.0]),
    1: _P([0, 1260.0, 0, 3660.0, 0, 192.0, 0, -864.0, 0, 64.0, 0, -64.0]),
    0: _P([1935.0, 0, -7110.0, 0, -795.0, 0, 240.0, 0, 360.0, 0, -32.0, 0, 16.0]),
}
_PHI_NEW_NUM = {
    0: _P([0, 15.0, 0, 10.0, 0, -4.0, 0, 8.0]) * (4.0 * math.sqrt(3.0) / math.pi ** 0.25),
    1: _P([0, -135.0, 0, 0, 0, 72.0, 0, 0, 0, 16.0]) * (2.0 / (math.sqrt(3.0) * math.pi ** 0.25)),
}


@dataclass(frozen=True)
class _Rational:
    """Polynomial quotient with exact derivative via the quotient rule."""

    num: np.polynomial.Polynomial
    den: np.polynomial.Polynomial

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def deriv(self) -> "_Rational":
        return _Rational(self.num.deriv() * self.den - self.num * self.den.deriv(),
                         self.den * self.den)


@dataclass(frozen=True)
class SusyModel:
    """A partner model: seed set plus (for q=4) frozen closed-form data."""

    q: int
    seeds: tuple[SeedSolution, ...]
    kappa: int
    new_energies: tuple[float, ...]
    delta1: float

    def __post_init__(self) -> None:
        eps = [s.epsilon for s in self.seeds]
        if sorted(eps) != eps or len(set(eps)) != len(eps):
            raise ValueError("seed energies must be strictly increasing")
        if eps and eps[-1] >= 0.5:
            raise ValueError("largest seed energy must lie below 1/2")
        if self.kappa != self.q // 2:
            raise ValueError("kappa must be q // 2")
        for j, e in enumerate(self.new_energies):
            if abs(e - (self.new_energies[0] + 2.0 * j)) > 1e-12:
                raise ValueError("added energies must be equally spaced by 2")
        if self.new_energies and abs(
                self.delta1 - (1.5 - self.new_energies[0])) > 1e-12:
            raise ValueError("delta1 must equal 3/2 - lowest added energy")

    # -- closed forms (q = 4 explicit model only) --------------------------

    def _require_explicit(self) -> None:
        if self.q != 4 or tuple(s.epsilon for s in self.seeds) != Q4_SEED_ENERGIES:
            raise UnsupportedModel("explicit closed-form data exists only for "
                                   "the frozen fourth-order model")

    def potential(self, x) -> np.ndarray:
        """Partner potential x^2/2 - 4 num / den^2 (closed form)."""
        self._require_explicit()
        x = np.asarray(x, dtype=float)
        d = _DEN(x)
        return x * x / 2.0 - 4.0 * _V_NUM(x) / (d * d)

    def eta(self, j: int) -> Callable[[np.ndarray], np.ndarray]:
        """Intertwiner coefficient function eta_j, j in 0..3."""
        self._require_explicit()
        rat = _Rational(_ETA_NUM[j], _DEN)
        return rat

    def iso_norm_factor(self, n: int) -> float:
        """sqrt((2n+4)(2n+5)(2n+6)(2n+7)): the product of E_n - eps_i."""
        return math.sqrt((2 * n + 4) * (2 * n + 5) * (2 * n + 6) * (2 * n + 7))


@lru_cache(maxsize=1)
def q4_model() -> SusyModel:
    """The frozen explicit fourth-order model.

    Seed parities (odd, even, odd, even) are the recovered constants; see
    the module docstring for the recovery route.
    """
    seeds = tuple(SeedSolution(e, nu)
                  for e, nu in zip(Q4_SEED_ENERGIES, Q4_SEED_ASYMMETRY))
    model = SusyModel(q=4, seeds=seeds, kappa=2, new_energies=(-4.5, -2.5),
                      delta1=6.0)
    # non-singularity of the frozen denominator on the working half-line
    grid = np.linspace(1e-3, 40.0, 4001)
    if np.min(_DEN(grid)) <= 0:
        raise SingularWronskian("frozen denominator vanishes on (0, 40]")
    return model


@lru_cache(maxsize=8)
def _eta_rationals(order: int) -> tuple:
    """(eta_j, eta_j', eta_j'') rational evaluators for j = 0..3."""
    out = []
    for j in range(4):
        r0 = _Rational(_ETA_NUM[j], _DEN)
        r1 = r0.deriv()
        r2 = r1.deriv()
        out.append((r0, r1, r2))
    return tuple(out)


# -- infinite-tower eigenfunctions via the intertwiner -----------------------

def iso_weighted_rows(model: SusyModel, n: int, x: Sequence[float],
                      order: int = 1) -> np.ndarray:
    """Rows phi_n^{(k)} e^{+x^2/2}, k = 0..order (order <= 2).

    These are the overflow-safe integrand factors for Gauss rules that
    carry the e^{-x^2} weight.
    """
    model._require_explicit()
    if n < 0:
        raise IndexOutOfRange("level index must be non-negative")
    if order > 2:
        raise ValueError("weighted rows available up to second derivative")
    x = np.asarray(x, dtype=float)
    psi = weighted_eigenfunction_derivatives(n, x, order=4 + order)
    etas = _eta_rationals(order)
    norm = model.iso_norm_factor(n)
    rows = []
    q_val = psi[4].copy()
    for j in range(4):
        q_val += etas[j][0](x) * psi[j]
    rows.append(q_val / (4.0 * norm))
    if order >= 1:
        q1 = psi[5].copy()
        for j in range(4):
            q1 += etas[j][1](x) * psi[j] + etas[j][0](x) * psi[j + 1]
        rows.append(q1 / (4.0 * norm))
    if order >= 2:
        q2 = psi[6].copy()
        for j in range(4):
            q2 += (etas[j][2](x) * psi[j] + 2.0 * etas[j][1](x) * psi[j + 1]
                   + etas[j][0](x) * psi[j + 2])
        rows.append(q2 / (4.0 * norm))
    return np.array(rows)


def iso_eigenfunction_derivatives(model: SusyModel, n: int, x: Sequence[float],
                                  order: int = 2) -> np.ndarray:
    """Rows phi_n, phi_n', ..., as plain values (Gaussian folded back in).

    Note the weighted rows are derivatives THEN weighted, so the plain
    rows are simply weighted rows times e^{-x^2/2}.
    """
    x = np.asarray(x, dtype=float)
    return iso_weighted_rows(model, n, x, order=order) * np.exp(-x * x / 2.0)


def iso_eigenfunction(model: SusyModel, n: int) -> Callable[[np.ndarray], np.ndarray]:
    """phi_n as a plain callable x -> value."""
    model._require_explicit()

    def evaluate(x):
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        vals = iso_eigenfunction_derivatives(model, n, x_arr, order=0)[0]
        return vals if np.ndim(x) else float(vals[0])

    return evaluate


# -- finite-tower eigenfunctions (closed forms) ------------------------------

@lru_cache(maxsize=8)
def _phi_new_rationals(j: int) -> tuple:
    r0 = _Rational(_PHI_NEW_NUM[j], _DEN)
    r1 = r0.deriv()
    r2 = r1.deriv()
    return r0, r1, r2


def new_weighted_rows(model: SusyModel, j: int, x: Sequence[float],
                      order: int = 1) -> np.ndarray:
    """Rows phi_Ej^{(k)} e^{+x^2/2} for the finite tower (j = 0 or 1)."""
    model._require_explicit()
    if j not in (0, 1):
        raise IndexOutOfRange("finite tower has levels 0 and 1 only")
    if order > 2:
        raise ValueError("weighted rows available up to second derivative")
    x = np.asarray(x, dtype=float)
    r0, r1, r2 = _phi_new_rationals(j)
    f = r0(x)
    rows = [f]
    if order >= 1:
        f1 = r1(x)
        rows.append(f1 - x * f)
    if order >= 2:
        f2 = r2(x)
        rows.append(f2 - 2.0 * x * f1 + (x * x - 1.0) * f)
    return np.array(rows)


def new_eigenfunction_derivatives(model: SusyModel, j: int, x: Sequence[float],
                                  order: int = 2) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return new_weighted_rows(model, j, x, order=order) * np.exp(-x * x / 2.0)


def new_eigenfunction(model: SusyModel, j: int) -> Callable[[np.ndarray], np.ndarray]:
    """The finite-tower bound state phi_Ej as a plain callable."""
    model._require_explicit()

    def evaluate(x):
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        vals = new_eigenfunction_derivatives(model, j, x_arr, order=0)[0]
        return vals if np.ndim(x) else float(vals[0])

    return evaluate


# ----------------------------------------------------------------------------
# ladder operators on the partner towers
# ----------------------------------------------------------------------------

def iso_linear_ladder() -> LadderSpec:
    """Linearised ladder on the infinite partner tower: steps sqrt(2n)."""
    return LadderSpec(lower_sq=lambda k: 2.0 * k, raise_sq=lambda k: 2.0 * k,
                      level_energy=lambda k: 2.0 * k + 1.5, basis=Basis.SUSY_ISO)


@dataclass(frozen=True)
class SusyLadder:
    """Coefficient engine for the sixth-order and linearised ladders."""

    seed_energies: tuple[float, float, float, float]
    kappa: int
    new_energies: tuple[float, ...]
    delta1: float

    @property
    def gamma_roots(self) -> tuple[float, float, float, float, float]:
        """Roots of the inverse-square-root normalizer gamma(H)."""
        e = self.seed_energies
        return (0.5, e[0], e[1], e[-2] + 2.0, e[-1] + 2.0)

    def six_factor(self, energy: float) -> float:
        """The degree-six product whose square root scales the full ladder."""
        e = self.seed_energies
        return ((energy - 0.5) * (energy - 1.5) * (energy - e[0]) * (energy - e[1])
                * (energy - e[-2] - 2.0) * (energy - e[-1] - 2.0))

    def full_coefficient(self, energy_target: float) -> complex:
        val = self.six_factor(energy_target)
        root = complex(np.sqrt(complex(val)))
        return root.real if abs(root.imag) < 1e-14 else root

    def lin_coeff_iso(self, n: int) -> float:
        return math.sqrt(2.0 * n)

    def lin_coeff_new(self, j: int) -> complex:
        return complex(np.sqrt(complex(2.0 * j - self.delta1)))


def ladder_for(model: SusyModel) -> SusyLadder:
    return SusyLadder(seed_energies=tuple(s.epsilon for s in model.seeds),
                      kappa=model.kappa, new_energies=model.new_energies,
                      delta1=model.delta1)


def susy_ladder_action(ladder: SusyLadder, subspace: Basis, direction: str,
                       index: int, operator: str = "linearized"
                       ) -> tuple[complex, Optional[int]]:
    """(coefficient, target index) of a ladder step; annihilation -> (0, None).

    subspace is the infinite tower (susy-iso) or the finite one (susy-new);
    operator selects the sixth-order ("full") or linearised form.
    """
    subspace = Basis(subspace)
    if direction not in ("lower", "raise"):
        raise ValueError("direction must be 'lower' or 'raise'")
    if operator not in ("full", "linearized"):
        raise ValueError("operator must be 'full' or 'linearized'")
    if index < 0:
        raise IndexOutOfRange("index must be non-negative")
    if subspace == Basis.SUSY_ISO:
        if direction == "lower":
            if index == 0:
                return 0.0, None
            coeff = (ladder.full_coefficient(2.0 * index + 1.5)
                     if operator == "full" else ladder.lin_coeff_iso(index))
            return coeff, index - 1
        coeff = (ladder.full_coefficient(2.0 * (index + 1) + 1.5)
                 if operator == "full" else math.sqrt(2.0 * index + 2.0))
        return coeff, index + 1
    if subspace == Basis.SUSY_NEW:
        if index >= ladder.kappa:
            raise IndexOutOfRange(f"finite tower has {ladder.kappa} levels")
        energies = ladder.new_energies
        if direction == "lower":
            if index == 0:
                return 0.0, None
            coeff = (ladder.full_coefficient(energies[index])
                     if operator == "full" else ladder.lin_coeff_new(index))
            return coeff, index - 1
        if index == ladder.kappa - 1:
            # explicit annihilation at the tower top (the linearised
            # coefficient sqrt(2j+2-delta1) does not vanish by itself)
            return 0.0, None
        coeff = (ladder.full_coefficient(energies[index] + 2.0)
                 if operator == "full"
                 else complex(np.sqrt(complex(2.0 * index + 2.0 - ladder.delta1))))
        return coeff, index + 1
    raise ValueError(f"subspace must be a partner-tower basis, got {subspace}")


# ----------------------------------------------------------------------------
# coherent states on the partner towers
# ----------------------------------------------------------------------------

def susy_cs(model: SusyModel, subspace: Basis, z: complex,
            truncation: int = 64) -> CoherentState:
    """Displacement-type coherent state on either partner tower.

    Infinite tower: amplitudes (sqrt(2) z)^n / sqrt(n!) (the linearised
    displacement series).  Finite tower: amplitudes
    (sqrt(2) z)^j / j! * sqrt((-delta1/2)_j) under the principal branch,
    truncated at kappa levels.  Both are normalized by the direct
    modulus-squared sum.
    """
    subspace = Basis(subspace)
    z = complex(z)
    if subspace == Basis.SUSY_ISO:
        cs = build_cs(Family.LIN_DISPLACEMENT, iso_linear_ladder(), z,
                      alpha=2.0, truncation=truncation)
        return CoherentState(family=Family.SUSY_ISO, z=z, alpha=2.0,
                             vector=cs.vector, norm_constant=cs.norm_constant,
                             spec=cs.spec)
    if subspace != Basis.SUSY_NEW:
        raise ValueError(f"subspace must be a partner-tower basis, got {subspace}")
    kappa = model.kappa
    c = np.zeros(kappa, dtype=complex)
    for j in range(kappa):
        poch = rising_factorial(-model.delta1 / 2.0, j)
        c[j] = ((math.sqrt(2.0) * z) ** j / math.factorial(j)
                * complex(np.sqrt(complex(poch))))
    norm = float(np.linalg.norm(c))
    vec = FockVector(Basis.SUSY_NEW, c / norm)
    return CoherentState(family=Family.SUSY_NEW, z=z, alpha=2.0, vector=vec,
                         norm_constant=1.0 / norm, spec=None,
                         energies=model.new_energies)


def new_norm_constant_closed(model: SusyModel, z: complex,
                             config: SpecialFunctionConfig = DEFAULT_CONFIG) -> float:
    """The closed-form norm constant of the finite-tower state, as printed.

    For the explicit model this evaluates to the signed series
    1 - 6|z|^2 (negative beyond |z| = 1/sqrt(6)), which cannot be a
    squared norm; exposed for side-by-side logging against the direct
    normalization, never used in construction.
    """
    kappa, d = model.kappa, model.delta1
    u = 2.0 * abs(z) ** 2
    first = hyp1f1(-d / 2.0, 1.0, u, config)
    # the gamma ratio Gamma(kappa - d/2) / Gamma(-d/2) is a rising factorial
    ratio = rising_factorial(-d / 2.0, kappa)
    from .numerics import hyp2f2
    second = (abs(z) ** (2 * kappa) * 2.0 ** kappa * ratio
              / math.factorial(kappa) ** 2
              * hyp2f2(1.0, kappa - d / 2.0, kappa + 1.0, kappa + 1.0, u, config))
    return float(first - second)


# ----------------------------------------------------------------------------
# measures on the partner towers
# ----------------------------------------------------------------------------

def g_moment(j: int, a1: float, t_max: float = 900.0,
             config: SpecialFunctionConfig = DEFAULT_CONFIG) -> float:
    """int_0^t_max t^j G(t) dt for the Mellin-contour kernel at parameter a1.

    Small t uses a low contour (the integrand is analytic for Re s > 0,
    and the default contour suffers cancellation noise as t -> 0).
    """
    def g_small(t):
        return float(meijer_g_2012(a1, float(t), config, contour_re=0.6))

    def g_large(t):
        return float(meijer_g_2012(a1, float(t), config))

    lo, _ = quad(lambda t: t ** j * g_small(t), 0.0, 1.0, limit=200)
    hi, _ = quad(lambda t: t ** j * g_large(t), 1.0, t_max, limit=400)
    return lo + hi


def new_measure_check(model: SusyModel, n_max: int = 5, r_max: float = 20.0,
                      config: SpecialFunctionConfig = DEFAULT_CONFIG) -> float:
    """Deviation of the finite-tower measure's diagonal moments from 1.

    The printed measure carries a Gamma(-delta1/2) prefactor that is a
    pole for the explicit model; folding it against Gamma(j - delta1/2)
    analytically (their ratio is 1/(-delta1/2)_j) leaves
    M_jj = |(-d/2)_j| / (-d/2)_j, i.e. the SIGN of the rising factorial.
    The kernel moments int t^j G dt = (j!)^2 / Gamma(j - d/2) are checked
    numerically to 1e-4 before the fold is trusted.  Off-diagonal moments
    vanish by the phase integral.  Returns max_j |M_jj - 1| (reported,
    not patched: the value 2 for the explicit model documents the signed
    measure's failure against honest probabilities).
    """
    d = model.delta1
    a1 = -(d + 2.0) / 2.0
    t_max = min(900.0, 2.0 * r_max * r_max)
    for j in range(min(n_max, 5) + 1):
        target = 0.0
        arg = j - d / 2.0
        if not _is_nonpositive_integer(arg):
            target = math.factorial(j) ** 2 * gammasgn(arg) * math.exp(-gammaln(arg))
        got = g_moment(j, a1, t_max=t_max, config=config)
        scale = max(1.0, abs(target))
        if abs(got - target) > 1e-4 * scale:
            raise ValueError(
                f"kernel moment {j} is {got:.6g}, expected {target:.6g}")
    deviation = 0.0
    for j in range(model.kappa):
        poch = rising_factorial(-d / 2.0, j)
        m_jj = abs(poch) / poch
        deviation = max(deviation, abs(m_jj - 1.0))
    return deviation


def iso_measure_check(n_max: int = 10, r_max: float = 8.0,
                      truncation: int = 320) -> float:
    """Flat-measure identity check for the infinite-tower state family.

    The infinite-tower amplitudes coincide with the linearised
    displacement series, so the existing radial moment checker applies.
    """
    from .fock import truncated_ladder
    return identity_resolution_check(Family.LIN_DISPLACEMENT, truncated_ladder(),
                                     iso_measure(), n_max=n_max, r_max=r_max,
                                     truncation=truncation)


# ----------------------------------------------------------------------------
# export
# ----------------------------------------------------------------------------

def export_model_csv(model: SusyModel, path: str,
                     grid: Optional[Sequence[float]] = None) -> None:
    """Write x, V, the two finite-tower states, and phi_0..phi_5 as CSV."""
    model._require_explicit()
    if grid is None:
        grid = np.linspace(0.01, 8.0, 800)
    grid = np.asarray(grid, dtype=float)
    v = model.potential(grid)
    new0 = new_eigenfunction_derivatives(model, 0, grid, order=0)[0]
    new1 = new_eigenfunction_derivatives(model, 1, grid, order=0)[0]
    iso = [iso_eigenfunction_derivatives(model, n, grid, order=0)[0]
           for n in range(6)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "V", "phi_E0", "phi_E1"]
                        + [f"phi_{n}" for n in range(6)])
        for i, xv in enumerate(grid):
            writer.writerow([f"{xv:.8g}", f"{v[i]:.12g}", f"{new0[i]:.12g}",
                             f"{new1[i]:.12g}"]
                            + [f"{iso[n][i]:.12g}" for n in range(6)])
