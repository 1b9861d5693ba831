"""Two-mode beam-splitter entanglement over the half-line.

Pipeline: embed a coherent state (and the relevant extremal state) into
full-line oscillator levels, apply the su(2) beam splitter in its
factorized form, re-express both modes in the orthonormal half-line
basis built from odd full-line levels, partial-trace, and take the
linear entropy.

The splitter exp(tau K+ - tau* K-) with tau = (theta/2) e^{i phi}
factorizes as

    exp(e^{i phi} tan(theta/2) K+) (cos(theta/2))^{-2 K0}
    exp(-e^{-i phi} tan(theta/2) K-)

— note the tangent in the outer factors; the middle factor carries the
cosine of theta/2 itself.  All blocks conserve total photon number, so
each factor is a finite sum inside a fixed-total block.

Inside the fixed-total block the generators form an su(2) triple
(K+ steps up, K- steps down, K0 is half the mode-number difference),
so the block unitary is a spin rotation.  The triangular factorized
evaluation above is exact arithmetic but numerically explosive: its
outer factors carry entries of size ~ tan(theta/2)^k sqrt(binomials),
which grow like e^{total} and cancel catastrophically in float64 —
unitarity is already off by 1e-5 at total 30 and by many orders of
magnitude at total > 60.  The production evaluation therefore
diagonalizes the (real symmetric tridiagonal) rotation generator and
exponentiates its spectrum, which is unitary to machine precision at
any block size; the factorized triangular form is kept as
`beamsplitter_block_bch` for cross-checks on small blocks.

Half-line geometry: restrictions of full-line levels to (0, inf) are
not orthogonal across parities; their normalized overlaps form the Gram
matrix.  Restricted odd levels, scaled by sqrt(2), are orthonormal AND
complete on the half-line, so they serve as the working basis for the
partial trace, and the change of basis is just sqrt(2) times the odd
rows of the Gram matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal, expm

from .coherent import CoherentState, Family, build_cs
from .errors import (
    CutoffExceeded,
    ExpansionResidualTooLarge,
    GramNotPSD,
)
from .fock import Basis, LadderSpec, hermite_normalized, truncated_ladder
from .numerics import QuadratureRule, gauss_halfline

__all__ = [
    "GramMatrix",
    "TwoModeState",
    "BeamSplitterSetting",
    "EntropyRecord",
    "halfline_overlap",
    "gram_matrix",
    "beamsplitter_block",
    "beamsplitter_block_bch",
    "beamsplitter_block_oracle",
    "beamsplitter_apply",
    "embed_cs_in_two_modes",
    "reduced_density",
    "linear_entropy",
    "entropy_scan",
]


# ----------------------------------------------------------------------------
# half-line overlaps and the Gram matrix
# ----------------------------------------------------------------------------

def _overlap_quadrature(alpha: int, beta: int) -> float:
    rule = gauss_halfline(alpha + beta + 16)
    h = hermite_normalized(max(alpha, beta), rule.nodes)
    log_scale = 0.5 * ((alpha + beta) * math.log(2.0)
                       + math.lgamma(alpha + 1) + math.lgamma(beta + 1))
    return float(np.sum(rule.weights * h[alpha] * h[beta]) * math.exp(log_scale))


def halfline_overlap(alpha: int, beta: int, method: str = "auto") -> float:
    """int_0^inf e^{-x^2} H_alpha H_beta dx (physicists' polynomials).

    Closed form sqrt(pi) 2F1[-a,-b; 1-(a+b)/2; 1/2] / (2^{1-a-b}
    Gamma(1-(a+b)/2)) where the Gamma argument is off its poles
    (a+b odd, or a+b = 0); Gauss quadrature otherwise and as the oracle
    everywhere (method="quadrature").
    """
    if alpha < 0 or beta < 0:
        raise ValueError("indices must be non-negative")
    if method not in ("auto", "closed", "quadrature"):
        raise ValueError("method must be auto, closed, or quadrature")
    if method == "quadrature":
        return _overlap_quadrature(alpha, beta)
    c = 1.0 - (alpha + beta) / 2.0
    pole = c <= 0 and float(c).is_integer()
    if pole:
        if method == "closed":
            raise ValueError("closed form hits a Gamma pole; use quadrature")
        return _overlap_quadrature(alpha, beta)
    from scipy.special import gamma as _gamma
    from .numerics import hyp2f1_terminating
    f = hyp2f1_terminating(-alpha, -beta, c, 0.5)
    return float(math.sqrt(math.pi) * f / (2.0 ** (1 - alpha - beta) * _gamma(c)))


@dataclass(frozen=True)
class GramMatrix:
    """Half-line overlaps of NORMALIZED full-line levels, size x size.

    Odd-odd (and even-even) blocks are diagonal with value 1/2; the
    parity-mixing entries are the nontrivial content.  Positive
    definiteness is a construction invariant (restricted levels are
    linearly independent).
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        g = np.asarray(self.entries, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("Gram matrix must be square")
        if np.max(np.abs(g - g.T)) > 1e-12:
            raise GramNotPSD("Gram matrix is not symmetric")
        if np.min(np.linalg.eigvalsh(g)) < -1e-10:
            raise GramNotPSD("Gram matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", g)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def odd_rows_scaled(self) -> np.ndarray:
        """sqrt(2) G[odd, :]: the change of basis onto the orthonormal
        restricted odd-level basis (rows k <-> full-line level 2k+1)."""
        return math.sqrt(2.0) * self.entries[1::2, :]


@lru_cache(maxsize=8)
def gram_matrix(size: int, degree: Optional[int] = None) -> GramMatrix:
    """Gram matrix of the first `size` restricted normalized levels.

    Gauss half-line quadrature is exact here (pure polynomial integrands
    against e^{-x^2}), so this IS the closed form, uniformly stable in
    the level indices.
    """
    if size < 1:
        raise ValueError("size must be positive")
    rule = gauss_halfline(2 * size + 16 if degree is None else degree)
    h = hermite_normalized(size - 1, rule.nodes)
    g = (h * rule.weights) @ h.T / math.sqrt(math.pi)
    return GramMatrix(0.5 * (g + g.T))


# ----------------------------------------------------------------------------
# two-mode states
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoModeState:
    """Amplitudes over |alpha, beta> full-line levels, alpha, beta < cutoff."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("amplitudes must be a square matrix")
        if not np.all(np.isfinite(a.view(float))):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", a)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.shape[0]

    def fullline_norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def halfline_norm(self, gram: GramMatrix) -> float:
        """Norm under the half-line metric G (x) G."""
        if gram.size != self.cutoff:
            raise ValueError("Gram size must match the cutoff")
        a, g = self.amplitudes, gram.entries
        val = np.trace(g @ a.conj() @ g @ a.T).real
        return math.sqrt(max(val, 0.0))


@dataclass(frozen=True)
class BeamSplitterSetting:
    """Splitter angle theta and phase phi; amplitudes r, t derive from them."""

    theta: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.theta < math.pi):
            raise ValueError("theta must lie in [0, pi) for the factorized form")

    @property
    def r(self) -> complex:
        return -np.exp(-1j * self.phi) * math.sin(self.theta / 2.0)

    @property
    def t(self) -> float:
        return math.cos(self.theta / 2.0)

    @property
    def tau(self) -> complex:
        """Generator coefficient (theta/2) e^{i phi}."""
        return (self.theta / 2.0) * np.exp(1j * self.phi)

    @property
    def tau_tan(self) -> complex:
        """Outer-factor coefficient e^{i phi} tan(theta/2)."""
        return np.exp(1j * self.phi) * math.tan(self.theta / 2.0)


# ----------------------------------------------------------------------------
# the beam splitter
# ----------------------------------------------------------------------------

@lru_cache(maxsize=512)
def beamsplitter_block(total: int, theta: float, phi: float) -> np.ndarray:
    """(total+1)^2 unitary on the fixed-total block, basis |k, total-k>.

    Spectral evaluation: conjugating by the diagonal phases
    e^{i(phi - pi/2)k} turns the block generator tau K+ - tau* K- into
    i theta S with S real symmetric tridiagonal (off-diagonal entries
    sqrt((k+1)(total-k))/2), so the block is V e^{i theta lambda} V^T
    dressed with those phases.  Unitary to machine precision at any
    block size, unlike the triangular factorized form (see
    `beamsplitter_block_bch`).
    """
    n = total + 1
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    k = np.arange(n)
    off = 0.5 * np.sqrt((k[:-1] + 1.0) * (total - k[:-1]))
    lam, vec = eigh_tridiagonal(np.zeros(n), off)
    core = (vec * np.exp(1j * theta * lam)) @ vec.T
    phase = np.exp(1j * (phi - 0.5 * math.pi) * k)
    return core * np.outer(phase, phase.conj())


@lru_cache(maxsize=64)
def beamsplitter_block_bch(total: int, theta: float, phi: float) -> np.ndarray:
    """Same block from the factorized form: lowering sum, diagonal cos
    factor t^{total-2k}, raising sum, each as finite triangular matrices.

    Exact in exact arithmetic but float-unstable for large blocks (the
    triangular factors are individually non-unitary with exponentially
    large entries); intended as a cross-check for total <~ 20.
    """
    setting = BeamSplitterSetting(theta, phi)
    n = total + 1
    tt = setting.tau_tan
    low = np.zeros((n, n), dtype=complex)
    for k in range(n):
        amp = 1.0 + 0.0j
        low[k, k] = amp
        for j in range(1, k + 1):
            amp = amp * (-np.conj(tt)) * math.sqrt(
                (k - j + 1) * (total - k + j)) / j
            low[k - j, k] = amp
    diag = setting.t ** (total - 2.0 * np.arange(n))
    high = np.zeros((n, n), dtype=complex)
    for k in range(n):
        amp = 1.0 + 0.0j
        high[k, k] = amp
        for i in range(1, n - k):
            amp = amp * tt * math.sqrt((k + i) * (total - k - i + 1)) / i
            high[k + i, k] = amp
    return high @ (diag[:, None] * low)


def beamsplitter_block_oracle(total: int, setting: BeamSplitterSetting) -> np.ndarray:
    """Same block by direct matrix exponential of tau K+ - tau* K-."""
    n = total + 1
    kp = np.zeros((n, n), dtype=complex)
    for k in range(total):
        kp[k + 1, k] = math.sqrt((k + 1) * (total - k))
    gen = setting.tau * kp - np.conj(setting.tau) * kp.conj().T
    return expm(gen)


def beamsplitter_apply(state: TwoModeState, setting: BeamSplitterSetting
                       ) -> TwoModeState:
    """Apply the splitter; exact block structure, total photons conserved.

    Raises CutoffExceeded when a populated entry's total photon number
    reaches the cutoff (its block would spill outside the matrix).
    """
    a = state.amplitudes
    n2 = state.cutoff
    rows, cols = np.nonzero(np.abs(a) > 0.0)
    if rows.size and int(np.max(rows + cols)) >= n2:
        raise CutoffExceeded(
            f"populated total photon number {int(np.max(rows + cols))} "
            f"needs cutoff > {n2}")
    out = np.zeros_like(a)
    populated_totals = sorted(set((rows + cols).tolist()))
    for total in populated_totals:
        k = np.arange(total + 1)
        vec = a[k, total - k]
        block = beamsplitter_block(total, setting.theta, setting.phi)
        out[k, total - k] = block @ vec
    return TwoModeState(out)


# ----------------------------------------------------------------------------
# embedding coherent states
# ----------------------------------------------------------------------------

def _susy_level_projections(model, basis: Basis, n_levels: int, cutoff: int
                            ) -> np.ndarray:
    """Coefficients of the tower states over the restricted odd basis.

    Row n holds <e_k, phi_n> for e_k = sqrt(2) x (level 2k+1 restricted),
    k < cutoff // 2, via the shared Gauss rule (orthonormal basis, so the
    Gram inverse is the identity here).
    """
    from . import susy as _susy
    k_count = cutoff // 2
    rule = gauss_halfline(2 * cutoff + 64)
    h = hermite_normalized(2 * k_count - 1, rule.nodes)
    basis_rows = (math.sqrt(2.0) / math.pi ** 0.25) * h[1::2, :]
    out = np.empty((n_levels, k_count))
    for n in range(n_levels):
        if basis == Basis.SUSY_ISO:
            w = _susy.iso_weighted_rows(model, n, rule.nodes, order=0)[0]
        else:
            w = _susy.new_weighted_rows(model, n, rule.nodes, order=0)[0]
        out[n] = (basis_rows * rule.weights) @ w
    return out


def embed_cs_in_two_modes(cs: CoherentState, cutoff: int = 64,
                          model=None) -> TwoModeState:
    """|extremal> (x) |cs> over full-line levels, both modes half-line states.

    Mode A carries the extremal state annihilated by the lowering
    ladder: the truncated-oscillator ground state, or — for either
    partner tower — the lowest newly created level of the partner
    Hamiltonian.  Mode B carries the coherent state.

    Truncated-oscillator states sit exactly at odd levels (level index
    2n+1 for tower index n); partner-tower states are expanded over the
    restricted odd basis by quadrature and must recover at least
    1 - 1e-6 of their norm (ExpansionResidualTooLarge otherwise).
    """
    basis = cs.vector.basis
    amps = cs.vector.amplitudes
    if basis == Basis.TRUNCATED:
        if cutoff < 2 * amps.size + 3:
            raise ValueError("cutoff must be at least 2*truncation + 3")
        u = np.zeros(cutoff, dtype=complex)
        v = np.zeros(cutoff, dtype=complex)
        u[1] = 1.0
        v[1:2 * amps.size + 1:2] = amps
        return TwoModeState(np.outer(u, v))
    if basis not in (Basis.SUSY_ISO, Basis.SUSY_NEW):
        raise ValueError(f"cannot embed states over basis {basis}")
    if model is None:
        raise ValueError("partner-tower embedding needs the model")
    if cutoff < 2 * amps.size + 3:
        raise ValueError("cutoff must be at least 2*truncation + 3")
    proj = _susy_level_projections(model, basis, amps.size, cutoff)
    if basis == Basis.SUSY_NEW:
        mode_a = proj[0]
    else:
        mode_a = _susy_level_projections(model, Basis.SUSY_NEW, 1, cutoff)[0]
    recovered_a = float(np.sum(mode_a ** 2))
    mode_b = amps @ proj
    recovered_b = float(np.linalg.norm(mode_b) ** 2)
    if recovered_a < 1.0 - 1e-6 or recovered_b < 1.0 - 1e-6:
        raise ExpansionResidualTooLarge(
            f"projection recovers {min(recovered_a, recovered_b):.8f} of the norm "
            f"at cutoff {cutoff}")
    u = np.zeros(cutoff, dtype=complex)
    v = np.zeros(cutoff, dtype=complex)
    u[1:2 * mode_a.size:2] = mode_a
    v[1:2 * mode_b.size:2] = mode_b
    return TwoModeState(np.outer(u, v))


# ----------------------------------------------------------------------------
# reduction and entropy
# ----------------------------------------------------------------------------

def reduced_density(out_state: TwoModeState, gram: GramMatrix) -> np.ndarray:
    """Mode-A density matrix in the orthonormal restricted odd basis.

    Both modes are pushed through T = sqrt(2) G[odd, :] (the expansion of
    every restricted level over the complete orthonormal odd basis), the
    result is renormalized under the half-line metric, and mode B is
    traced out.
    """
    if gram.size != out_state.cutoff:
        raise ValueError("Gram size must match the state cutoff")
    t = gram.odd_rows_scaled()
    m = t @ out_state.amplitudes @ t.T
    norm_sq = float(np.sum(np.abs(m) ** 2))
    if norm_sq <= 0.0:
        raise ValueError("state has zero half-line norm")
    return (m @ m.conj().T) / norm_sq


def linear_entropy(rho: np.ndarray) -> float:
    """1 - Tr(rho^2) for a Hermitian unit-trace density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if np.max(np.abs(rho - rho.conj().T)) > 1e-8:
        raise ValueError("density matrix must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-8:
        raise ValueError("density matrix must have unit trace")
    return float(1.0 - np.sum(np.abs(rho) ** 2))


@dataclass(frozen=True)
class EntropyRecord:
    z_abs: float
    theta: float
    phi: float
    entropy: float
    entropy_refined: float
    converged: bool
    cutoff: int


def _entropy_single(family: Family, z_abs: float, setting: BeamSplitterSetting,
                    cutoff: int, n_terms: int, model, alpha: float) -> float:
    family = Family(family)
    if family in (Family.SUSY_ISO, Family.SUSY_NEW):
        from . import susy as _susy
        subspace = Basis.SUSY_ISO if family == Family.SUSY_ISO else Basis.SUSY_NEW
        cs = _susy.susy_cs(model, subspace, z_abs,
                           truncation=n_terms if subspace == Basis.SUSY_ISO else 64)
        state = embed_cs_in_two_modes(cs, cutoff=cutoff, model=model)
    else:
        cs = build_cs(family, truncated_ladder(), z_abs, alpha=alpha,
                      truncation=n_terms)
        state = embed_cs_in_two_modes(cs, cutoff=cutoff)
    # both modes can populate levels up to cutoff-1, so splitter blocks
    # reach total 2*cutoff-2; pad so no block spills over the edge
    padded_size = 2 * cutoff - 1
    padded = np.zeros((padded_size, padded_size), dtype=complex)
    padded[:cutoff, :cutoff] = state.amplitudes
    out = beamsplitter_apply(TwoModeState(padded), setting)
    rho = reduced_density(out, gram_matrix(padded_size))
    return linear_entropy(rho)


def entropy_scan(family: Family, z_moduli: Sequence[float],
                 setting: Optional[BeamSplitterSetting] = None,
                 cutoff: int = 64, n_terms: int = 20, model=None,
                 alpha: float = 2.0) -> list[EntropyRecord]:
    """Linear entropy against |z| with a 1.5x-cutoff convergence probe.

    Records are flagged unconverged when the two cutoffs disagree by
    5e-3 or more.  The Gram matrices and splitter blocks are cached and
    shared across points.
    """
    if setting is None:
        setting = BeamSplitterSetting(math.pi / 2.0, 0.0)
    refined_cutoff = int(cutoff * 1.5)
    records = []
    for z_abs in z_moduli:
        s0 = _entropy_single(family, float(z_abs), setting, cutoff,
                             n_terms, model, alpha)
        s1 = _entropy_single(family, float(z_abs), setting, refined_cutoff,
                             n_terms, model, alpha)
        records.append(EntropyRecord(z_abs=float(z_abs), theta=setting.theta,
                                     phi=setting.phi, entropy=s0,
                                     entropy_refined=s1,
                                     converged=abs(s0 - s1) < 5e-3,
                                     cutoff=cutoff))
    return records
