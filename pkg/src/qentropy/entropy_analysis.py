"""Entropy preservation as executable predicates and constructors.

For a bi-stochastic channel phi and a state rho, three statements are
equivalent: the channel preserves the entropy of the state; rho is a fixed
point of adjoint(phi) o phi; and the space splits as a direct sum of tensor
blocks H^L_k (x) H^R_k on which phi acts as (unitary conjugation) (x)
(bi-stochastic map) while rho is block diagonal with maximally mixed right
factors.  This module turns each leg of that equivalence into something a
program can check or build:

* :func:`entropy_preservation_report` compares entropy equality against the
  fixed-point condition and exposes both residuals;
* :func:`fixed_point_space` computes the fixed-point space of
  adjoint(phi) o phi, which for bi-stochastic phi is a dagger-closed unital
  matrix algebra;
* :func:`decompose_fixed_point_algebra` block-diagonalizes that algebra into
  isometries exhibiting the tensor structure;
* :func:`verify_block_structure` certifies a claimed structure against a
  concrete (channel, state) pair and extracts the block data;
* :func:`synthesize_pair` goes the other way, building a preserving pair from
  a block specification;
* :func:`entropy_monotonicity_check`, :func:`check_petz_equality` and
  :func:`map_entropy_preservation_report` cover the relative-entropy
  monotonicity, the recovery-map equality condition, and the map-entropy
  analogue of the equivalence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import (
    KrausChannel,
    adjoint,
    apply_channel,
    classify,
    compose,
    kraus_channel,
    petz_recovery,
    superoperator_matrix,
    unvec,
    vec,
)
from .choi import map_entropy
from .errors import (
    AmbiguousGroupingError,
    DimensionMismatchError,
    InvalidSpecError,
    NotAnAlgebraError,
    NotBistochasticError,
    NotStochasticError,
    StructureMismatchError,
    SupportViolationError,
)
from .generators import random_bistochastic_channel, random_density, random_unitary
from .states import (
    DensityMatrix,
    entropy_of_matrix,
    frozen_array,
    relative_entropy,
    support_projector,
    validate_state,
    von_neumann_entropy,
)
from .tolerances import DEFAULT_TOL, ToleranceConfig

__all__ = [
    "PreservationReport",
    "MonotonicityReport",
    "PetzEqualityReport",
    "MapEntropyReport",
    "FixedPointBasis",
    "Block",
    "BlockStructure",
    "BlockSpec",
    "BlockVerification",
    "parse_block_spec",
    "entropy_preservation_report",
    "entropy_monotonicity_check",
    "check_petz_equality",
    "fixed_point_space",
    "decompose_fixed_point_algebra",
    "block_form_residual",
    "verify_block_structure",
    "synthesize_pair",
    "map_entropy_preservation_report",
    "phase_invariant_unitary_distance",
]

# Relative singular-value cut used for numerical rank decisions inside the
# algebra machinery; true spectra here are separated by many orders.
_RANK_RTOL = 1e-9


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PreservationReport:
    """Entropy equality vs the fixed-point condition for one (channel, state)."""

    entropy_in: float
    entropy_out: float
    fixed_point_residual: float
    entropy_preserved: bool
    fixed_point: bool
    agreement: bool

    def as_dict(self) -> dict:
        return {
            "entropy_in_bits": self.entropy_in,
            "entropy_out_bits": self.entropy_out,
            "entropy_gap_bits": abs(self.entropy_out - self.entropy_in),
            "fixed_point_residual": self.fixed_point_residual,
            "entropy_preserved": self.entropy_preserved,
            "fixed_point": self.fixed_point,
            "agreement": self.agreement,
        }


@dataclass(frozen=True)
class MonotonicityReport:
    """Relative entropies before and after a stochastic channel.

    ``entropy_in``/``entropy_out``/``entropy_gain`` are filled only when the
    channel is bi-stochastic and the reference state is maximally mixed, the
    case in which monotonicity specializes to entropy non-decrease.
    """

    relative_entropy_in: float
    relative_entropy_out: float
    slack: float
    entropy_in: float | None = None
    entropy_out: float | None = None
    entropy_gain: float | None = None

    def as_dict(self) -> dict:
        out = {
            "relative_entropy_in_bits": self.relative_entropy_in,
            "relative_entropy_out_bits": self.relative_entropy_out,
            "slack_bits": self.slack,
        }
        if self.entropy_gain is not None:
            out["entropy_in_bits"] = self.entropy_in
            out["entropy_out_bits"] = self.entropy_out
            out["entropy_gain_bits"] = self.entropy_gain
        return out


@dataclass(frozen=True)
class PetzEqualityReport:
    """Relative-entropy equality vs exact recovery by the sigma-weighted map."""

    relative_entropy_in: float
    relative_entropy_out: float
    equality_gap: float
    recovery_residual: float
    equality: bool
    recovery: bool
    agreement: bool

    def as_dict(self) -> dict:
        return {
            "relative_entropy_in_bits": self.relative_entropy_in,
            "relative_entropy_out_bits": self.relative_entropy_out,
            "equality_gap_bits": self.equality_gap,
            "recovery_residual": self.recovery_residual,
            "equality": self.equality,
            "recovery": self.recovery,
            "agreement": self.agreement,
        }


@dataclass(frozen=True)
class MapEntropyReport:
    """Map-entropy equality vs the superoperator fixed-point condition."""

    map_entropy_in: float
    map_entropy_composed: float
    entropy_gap: float
    composition_residual: float
    entropy_preserved: bool
    composition_fixed: bool
    agreement: bool

    def as_dict(self) -> dict:
        return {
            "map_entropy_in_bits": self.map_entropy_in,
            "map_entropy_composed_bits": self.map_entropy_composed,
            "entropy_gap_bits": self.entropy_gap,
            "composition_residual": self.composition_residual,
            "entropy_preserved": self.entropy_preserved,
            "composition_fixed": self.composition_fixed,
            "agreement": self.agreement,
        }


# ---------------------------------------------------------------------------
# Structures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FixedPointBasis:
    """Orthonormal basis of the fixed-point space of adjoint(phi) o phi.

    Basis elements are Hermitian whenever the Hermitian representative
    construction succeeds (it does for every dagger-closed space).
    ``spectral_gap`` is the distance from 1 to the largest non-fixed
    eigenvalue of the superoperator, so tests can assert the cut was
    unambiguous; it is +inf when everything is fixed.
    """

    dim: int
    basis: tuple[np.ndarray, ...]
    eigenvalue_residuals: tuple[float, ...]
    spectral_gap: float


@dataclass(frozen=True)
class Block:
    """One tensor block: an isometry onto H^L (x) H^R with the two factor dims."""

    isometry: np.ndarray
    dim_left: int
    dim_right: int


@dataclass(frozen=True)
class BlockStructure:
    dim: int
    blocks: tuple[Block, ...]

    @property
    def block_dims(self) -> tuple[tuple[int, int], ...]:
        return tuple((b.dim_left, b.dim_right) for b in self.blocks)


@dataclass(frozen=True)
class BlockSpec:
    """Specification for synthesizing an entropy-preserving pair.

    ``blocks`` lists (left dim, right dim) pairs; ``weights`` are the block
    probabilities (random simplex point when omitted); ``left_states`` and
    ``left_unitaries`` pin the per-block state and unitary (random when
    omitted).
    """

    blocks: tuple[tuple[int, int], ...]
    weights: tuple[float, ...] | None = None
    left_states: tuple[np.ndarray, ...] | None = None
    left_unitaries: tuple[np.ndarray, ...] | None = None

    @property
    def dim(self) -> int:
        return sum(dl * dr for dl, dr in self.blocks)


@dataclass(frozen=True)
class BlockVerification:
    """Residuals and extracted data from verifying a block structure."""

    block_dims: tuple[tuple[int, int], ...]
    weights: tuple[float, ...]
    left_states: tuple[np.ndarray, ...]
    left_unitaries: tuple[np.ndarray, ...]
    block_diagonal_residual: float
    factorization_residual: float
    invariance_residual: float
    action_residual: float
    unitary_residual: float
    right_bistochastic_residual: float

    def as_dict(self) -> dict:
        return {
            "block_dims": [list(d) for d in self.block_dims],
            "weights": list(self.weights),
            "block_diagonal_residual": self.block_diagonal_residual,
            "factorization_residual": self.factorization_residual,
            "invariance_residual": self.invariance_residual,
            "action_residual": self.action_residual,
            "unitary_residual": self.unitary_residual,
            "right_bistochastic_residual": self.right_bistochastic_residual,
        }


def parse_block_spec(text: str) -> BlockSpec:
    """Parse a block list like ``"2x1,1x2"`` into a :class:`BlockSpec`."""
    blocks = []
    for piece in text.split(","):
        piece = piece.strip().lower()
        parts = piece.split("x")
        if len(parts) != 2:
            raise InvalidSpecError(f"bad block {piece!r}; expected format like 2x1")
        try:
            dl, dr = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise InvalidSpecError(f"bad block {piece!r}: {exc}") from exc
        blocks.append((dl, dr))
    return BlockSpec(blocks=tuple(blocks))


def phase_invariant_unitary_distance(u: np.ndarray, v: np.ndarray) -> float:
    """min over phases theta of ||u - e^(i theta) v||_F."""
    n = u.shape[0]
    overlap = abs(complex(np.trace(u.conj().T @ v)))
    return math.sqrt(max(0.0, 2.0 * n - 2.0 * overlap))


# ---------------------------------------------------------------------------
# Verdict reports
# ---------------------------------------------------------------------------


def entropy_preservation_report(
    phi: KrausChannel, rho: DensityMatrix, tol: ToleranceConfig = DEFAULT_TOL
) -> PreservationReport:
    """Evaluate entropy preservation and the fixed-point condition side by side."""
    cls = classify(phi, tol)
    if not cls.bistochastic:
        raise NotBistochasticError(
            f"report needs a bi-stochastic channel; stochastic residual "
            f"{cls.stochastic_residual:.3e}, unital residual {cls.unital_residual:.3e}"
        )
    if phi.dim != rho.dim:
        raise DimensionMismatchError(f"dims differ: channel {phi.dim}, state {rho.dim}")
    s_in = von_neumann_entropy(rho)
    out = apply_channel(phi, rho.matrix)
    s_out = entropy_of_matrix(out)
    residual = float(np.linalg.norm(apply_channel(adjoint(phi), out) - rho.matrix))
    preserved = abs(s_out - s_in) <= tol.eq
    fixed = residual <= tol.fix
    return PreservationReport(
        entropy_in=s_in,
        entropy_out=s_out,
        fixed_point_residual=residual,
        entropy_preserved=preserved,
        fixed_point=fixed,
        agreement=preserved == fixed,
    )


def _require_support(rho: DensityMatrix, sigma: DensityMatrix, tol: ToleranceConfig) -> None:
    p_rho = support_projector(rho, tol)
    p_sigma = support_projector(sigma, tol)
    leak = float(np.linalg.norm((np.eye(rho.dim) - p_sigma) @ p_rho))
    if leak > tol.psd:
        raise SupportViolationError(
            f"supp(rho) is not contained in supp(sigma); leakage {leak:.3e}"
        )


def entropy_monotonicity_check(
    phi: KrausChannel,
    rho: DensityMatrix,
    sigma: DensityMatrix,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> MonotonicityReport:
    """Relative entropy before vs after the channel; slack must be >= -tol.eq."""
    cls = classify(phi, tol)
    if not cls.stochastic:
        raise NotStochasticError(
            f"monotonicity needs a trace-preserving channel; "
            f"residual {cls.stochastic_residual:.3e}"
        )
    if not (phi.dim == rho.dim == sigma.dim):
        raise DimensionMismatchError(
            f"dims differ: channel {phi.dim}, states {rho.dim} and {sigma.dim}"
        )
    _require_support(rho, sigma, tol)
    s_before = relative_entropy(rho, sigma, tol)
    out_rho = validate_state(apply_channel(phi, rho.matrix), tol)
    out_sigma = validate_state(apply_channel(phi, sigma.matrix), tol)
    s_after = relative_entropy(out_rho, out_sigma, tol)
    slack = s_before - s_after
    entropy_in = entropy_out = gain = None
    n = phi.dim
    if cls.bistochastic and np.linalg.norm(sigma.matrix - np.eye(n) / n) <= tol.eq:
        entropy_in = von_neumann_entropy(rho)
        entropy_out = von_neumann_entropy(out_rho)
        gain = entropy_out - entropy_in
    return MonotonicityReport(
        relative_entropy_in=s_before,
        relative_entropy_out=s_after,
        slack=slack,
        entropy_in=entropy_in,
        entropy_out=entropy_out,
        entropy_gain=gain,
    )


def check_petz_equality(
    phi: KrausChannel,
    rho: DensityMatrix,
    sigma: DensityMatrix,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> PetzEqualityReport:
    """Compare relative-entropy equality against recovery by the sigma-weighted map.

    Equality of S(rho||sigma) across the channel holds exactly when the
    recovery channel built from sigma undoes the channel on rho; the report
    carries both residuals and the two verdicts.
    """
    cls = classify(phi, tol)
    if not cls.stochastic:
        raise NotStochasticError(
            f"equality check needs a trace-preserving channel; "
            f"residual {cls.stochastic_residual:.3e}"
        )
    if not (phi.dim == rho.dim == sigma.dim):
        raise DimensionMismatchError(
            f"dims differ: channel {phi.dim}, states {rho.dim} and {sigma.dim}"
        )
    _require_support(rho, sigma, tol)
    s_before = relative_entropy(rho, sigma, tol)
    out_rho = validate_state(apply_channel(phi, rho.matrix), tol)
    out_sigma = validate_state(apply_channel(phi, sigma.matrix), tol)
    s_after = relative_entropy(out_rho, out_sigma, tol)
    gap = abs(s_after - s_before)
    recovery_map = petz_recovery(phi, sigma, tol)
    recovered = apply_channel(recovery_map, out_rho.matrix)
    residual = float(np.linalg.norm(recovered - rho.matrix))
    equality = gap <= tol.eq
    recovery = residual <= tol.fix
    return PetzEqualityReport(
        relative_entropy_in=s_before,
        relative_entropy_out=s_after,
        equality_gap=gap,
        recovery_residual=residual,
        equality=equality,
        recovery=recovery,
        agreement=equality == recovery,
    )


def map_entropy_preservation_report(
    phi: KrausChannel, psi: KrausChannel, tol: ToleranceConfig = DEFAULT_TOL
) -> MapEntropyReport:
    """Map entropy of the composition vs the superoperator fixed-point condition."""
    cls_phi = classify(phi, tol)
    if not cls_phi.bistochastic:
        raise NotBistochasticError(
            f"outer channel must be bi-stochastic; stochastic residual "
            f"{cls_phi.stochastic_residual:.3e}, unital residual "
            f"{cls_phi.unital_residual:.3e}"
        )
    cls_psi = classify(psi, tol)
    if not cls_psi.stochastic:
        raise NotStochasticError(
            f"inner channel must be trace preserving; "
            f"residual {cls_psi.stochastic_residual:.3e}"
        )
    if phi.dim != psi.dim:
        raise DimensionMismatchError(f"channel dims differ: {phi.dim} vs {psi.dim}")
    s_inner = map_entropy(psi, tol)
    s_composed = map_entropy(compose(phi, psi), tol)
    gap = abs(s_composed - s_inner)
    s_phi = superoperator_matrix(phi).matrix
    s_psi = superoperator_matrix(psi).matrix
    residual = float(np.linalg.norm(s_phi.conj().T @ s_phi @ s_psi - s_psi))
    preserved = gap <= tol.eq
    fixed = residual <= tol.fix
    return MapEntropyReport(
        map_entropy_in=s_inner,
        map_entropy_composed=s_composed,
        entropy_gap=gap,
        composition_residual=residual,
        entropy_preserved=preserved,
        composition_fixed=fixed,
        agreement=preserved == fixed,
    )


# ---------------------------------------------------------------------------
# Fixed-point space
# ---------------------------------------------------------------------------


def _hermitian_basis(mats: list[np.ndarray] | tuple[np.ndarray, ...]) -> list[np.ndarray]:
    """Hermitian orthonormal basis of the complex span of a dagger-closed set.

    Hermitian and anti-Hermitian parts of the inputs are stacked as real
    vectors; an SVD picks an orthonormal real basis of their span, which for
    dagger-closed spaces has the same dimension as the complex span and
    consists of Hermitian matrices.
    """
    n = mats[0].shape[0]
    rows = []
    for m in mats:
        h = (m + m.conj().T) / 2.0
        a = (m - m.conj().T) / 2.0j
        rows.append(np.concatenate([h.real.ravel(), h.imag.ravel()]))
        rows.append(np.concatenate([a.real.ravel(), a.imag.ravel()]))
    stacked = np.stack(rows)
    _, svals, vh = np.linalg.svd(stacked, full_matrices=False)
    rank = int(np.sum(svals > _RANK_RTOL * max(1.0, float(svals[0]))))
    out = []
    for row in vh[:rank]:
        out.append(row[: n * n].reshape(n, n) + 1j * row[n * n :].reshape(n, n))
    return out


def fixed_point_space(phi: KrausChannel, tol: ToleranceConfig = DEFAULT_TOL) -> FixedPointBasis:
    """Orthonormal basis of {X : adjoint(phi)(phi(X)) = X} for bi-stochastic phi.

    The superoperator of adjoint(phi) o phi is Hermitian PSD and a
    Hilbert-Schmidt contraction, so its spectrum lies in [0, 1] and the fixed
    space is the eigenvalue-1 eigenspace; eigenvalues >= 1 - tol.fix are
    taken as fixed.
    """
    cls = classify(phi, tol)
    if not cls.bistochastic:
        raise NotBistochasticError(
            f"fixed-point space needs a bi-stochastic channel; stochastic residual "
            f"{cls.stochastic_residual:.3e}, unital residual {cls.unital_residual:.3e}"
        )
    s = superoperator_matrix(phi).matrix
    g = s.conj().T @ s
    g = (g + g.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(g)
    fixed_mask = vals >= 1.0 - tol.fix
    if not np.any(fixed_mask):
        raise AmbiguousGroupingError(
            "no eigenvalue within tol.fix of 1; the identity should always be fixed"
        )
    below = vals[~fixed_mask]
    gap = float(1.0 - below.max()) if below.size else math.inf
    mats = [unvec(vecs[:, i]) for i in np.nonzero(fixed_mask)[0]]
    herm = _hermitian_basis(mats)
    basis = herm if len(herm) == len(mats) else mats
    adj = adjoint(phi)
    residuals = tuple(
        float(np.linalg.norm(apply_channel(adj, apply_channel(phi, b)) - b)) for b in basis
    )
    return FixedPointBasis(
        dim=phi.dim,
        basis=tuple(frozen_array(b) for b in basis),
        eigenvalue_residuals=residuals,
        spectral_gap=gap,
    )


# ---------------------------------------------------------------------------
# Algebra decomposition
# ---------------------------------------------------------------------------


class _Ambiguous(Exception):
    """Internal retry signal: generic-element randomness was unlucky."""


def _group_eigenvalues(vals: np.ndarray, tol: ToleranceConfig) -> list[np.ndarray]:
    """Group sorted eigenvalues whose relative gap is below tol.group.

    Raises the internal retry signal when a gap falls inside the ambiguous
    window just above the grouping threshold, where degenerate and distinct
    eigenvalues cannot be told apart.
    """
    scale = max(1.0, float(vals[-1] - vals[0]))
    threshold = tol.group * scale
    gaps = np.diff(vals)
    if np.any((gaps > threshold) & (gaps < 100.0 * threshold)):
        raise _Ambiguous("eigenvalue gap inside the ambiguous window")
    groups = []
    start = 0
    for i, gap in enumerate(gaps):
        if gap > threshold:
            groups.append(np.arange(start, i + 1))
            start = i + 1
    groups.append(np.arange(start, vals.size))
    return groups


def _partial_trace_right(m: np.ndarray, dl: int, dr: int) -> np.ndarray:
    return np.einsum("arbr->ab", m.reshape(dl, dr, dl, dr))


def _partial_trace_left(m: np.ndarray, dl: int, dr: int) -> np.ndarray:
    return np.einsum("aras->rs", m.reshape(dl, dr, dl, dr))


def _orthonormal_span(mats, n: int) -> tuple[np.ndarray, int]:
    """Row matrix of an orthonormal basis (as vectors) of the span, plus rank."""
    stacked = np.stack([vec(m) for m in mats])
    _, svals, vh = np.linalg.svd(stacked, full_matrices=False)
    rank = int(np.sum(svals > _RANK_RTOL * max(1.0, float(svals[0]))))
    return vh[:rank], rank


def _span_residual(onb_rows: np.ndarray, m: np.ndarray) -> float:
    x = vec(m)
    return float(np.linalg.norm(x - onb_rows.T @ (onb_rows.conj() @ x)))


def _check_algebra_closure(
    basis: tuple[np.ndarray, ...], onb_rows: np.ndarray, n: int, tol: ToleranceConfig
) -> None:
    for b in basis:
        if _span_residual(onb_rows, b.conj().T) > tol.fix * max(1.0, float(np.linalg.norm(b))):
            raise NotAnAlgebraError("span is not closed under conjugate transpose")
    if _span_residual(onb_rows, np.eye(n)) > tol.fix * math.sqrt(n):
        raise NotAnAlgebraError("identity is not in the span")
    for left in basis:
        for right in basis:
            prod = left @ right
            if _span_residual(onb_rows, prod) > tol.fix * max(1.0, float(np.linalg.norm(prod))):
                raise NotAnAlgebraError("span is not closed under products")


def _center_basis(work: list[np.ndarray], tol: ToleranceConfig) -> list[np.ndarray]:
    """Basis of {X in span : [X, W_i] = 0 for all spanning W_i}."""
    columns = []
    for w_j in work:
        col = np.concatenate([vec(w_j @ w_i - w_i @ w_j) for w_i in work])
        columns.append(col)
    k = np.stack(columns, axis=1)
    _, svals, vh = np.linalg.svd(k, full_matrices=True)
    d = len(work)
    null_mask = np.ones(d, dtype=bool)
    null_mask[: svals.size] = svals <= tol.fix * max(1.0, float(svals[0]) if svals.size else 1.0)
    coeffs = vh.conj().T[:, null_mask]
    center = []
    for c in coeffs.T:
        center.append(sum(cj * wj for cj, wj in zip(c, work)))
    if not center:
        raise NotAnAlgebraError("center is empty; the identity should be central")
    return center


def _factor_isometry(
    y: np.ndarray,
    work: list[np.ndarray],
    rng: np.random.Generator,
    tol: ToleranceConfig,
) -> tuple[np.ndarray, int, int]:
    """Order an orthonormal basis of one central block into tensor form.

    ``y`` holds orthonormal columns spanning the block.  The compressed
    algebra on the block is a factor, i.e. unitarily equivalent to
    (full matrix algebra of size dL) (x) (scalars on dR); a generic Hermitian
    element has dL eigenspaces of dimension dR, and polar parts of a generic
    connecting element align their bases, yielding columns ordered as
    |l> (x) |r| with l outer.
    """
    nk = y.shape[1]
    compressed = [y.conj().T @ w @ y for w in work]
    onb_rows, m = _orthonormal_span(compressed, nk)
    dl = math.isqrt(m)
    if dl * dl != m or nk % dl != 0:
        raise _Ambiguous("compressed block dimension is not a perfect square")
    dr = nk // dl
    if dl == 1:
        return y, dl, dr
    cb = [unvec(row) for row in onb_rows]
    hb = _hermitian_basis(cb)
    if len(hb) != m:
        raise _Ambiguous("hermitian basis of the block has the wrong dimension")
    generic = sum(g * h for g, h in zip(rng.standard_normal(m), hb))
    vals, vecs = np.linalg.eigh(generic)
    groups = _group_eigenvalues(vals, tol)
    if len(groups) != dl or any(g.size != dr for g in groups):
        raise _Ambiguous("generic element does not separate the left factor")
    connector = sum(
        (g + 1j * h) * c
        for g, h, c in zip(rng.standard_normal(m), rng.standard_normal(m), cb)
    )
    base = vecs[:, groups[0]]
    columns = [base]
    for g in groups[1:]:
        e_l = vecs[:, g]
        link = e_l.conj().T @ connector @ base
        u_l, svals, vh_l = np.linalg.svd(link)
        if svals[-1] <= 1e-8 * max(1.0, float(svals[0])):
            raise _Ambiguous("connecting element is numerically singular")
        columns.append(e_l @ (u_l @ vh_l))
    return y @ np.concatenate(columns, axis=1), dl, dr


def _canonical_blocks(blocks: list[Block]) -> tuple[Block, ...]:
    """Deterministic block order: by dims, then by rounded isometry entries."""

    def key(b: Block):
        ent = np.round(
            np.concatenate([b.isometry.real.ravel(), b.isometry.imag.ravel()]), 6
        )
        return (b.dim_left, b.dim_right, tuple(ent.tolist()))

    return tuple(sorted(blocks, key=key))


def block_form_residual(f: FixedPointBasis, structure: BlockStructure) -> float:
    """Worst deviation of the conjugated basis from block (left (x) scalar) form."""
    worst = 0.0
    isos = [b.isometry for b in structure.blocks]
    for mat in f.basis:
        for j, vj in enumerate(isos):
            for k, vk in enumerate(isos):
                cross = vj.conj().T @ mat @ vk
                if j != k:
                    worst = max(worst, float(np.linalg.norm(cross)))
                else:
                    dl, dr = structure.blocks[j].dim_left, structure.blocks[j].dim_right
                    left = _partial_trace_right(cross, dl, dr) / dr
                    rebuilt = np.kron(left, np.eye(dr))
                    worst = max(worst, float(np.linalg.norm(cross - rebuilt)))
    return worst


def decompose_fixed_point_algebra(
    f: FixedPointBasis, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0
) -> BlockStructure:
    """Block-diagonalize a dagger-closed unital matrix algebra.

    The algebra (given by a spanning fixed-point basis) is decomposed into
    isometries V_k onto subspaces H^L_k (x) H^R_k such that conjugating any
    algebra element by V_k yields (arbitrary on H^L_k) (x) (scalar identity
    on H^R_k).  Procedure: certify dagger/product closure and unitality;
    compute the center by solving the commutation system inside the span;
    split the space along the eigenspaces of a generic Hermitian central
    element (minimal central projections); inside each block, read off the
    factor dimensions from the compressed algebra's dimension, separate the
    left factor with a generic Hermitian element and align the right bases by
    polar-decomposing a generic connecting element between its eigenspaces.

    Generic elements are drawn from ``seed``; grouping ambiguity retries with
    fresh randomness up to 3 times before raising
    :class:`~qentropy.errors.AmbiguousGroupingError`.  The result is verified
    against the input basis before it is returned.
    """
    n = f.dim
    basis = tuple(np.asarray(b, dtype=complex) for b in f.basis)
    onb_rows, rank = _orthonormal_span(basis, n)
    if rank != len(basis):
        raise NotAnAlgebraError("basis elements are not linearly independent")
    _check_algebra_closure(basis, onb_rows, n, tol)
    work = [unvec(row) for row in onb_rows]
    center = _center_basis(work, tol)
    center_herm = _hermitian_basis(center)
    if len(center_herm) != len(center):
        raise NotAnAlgebraError("center is not closed under conjugate transpose")
    n_blocks = len(center)

    last_failure = "eigenvalue grouping remained ambiguous"
    for attempt in range(4):
        rng = np.random.default_rng([abs(int(seed)), attempt])
        try:
            central = sum(
                g * z for g, z in zip(rng.standard_normal(n_blocks), center_herm)
            )
            vals, vecs = np.linalg.eigh(central)
            groups = _group_eigenvalues(vals, tol)
            if len(groups) != n_blocks:
                raise _Ambiguous("central element does not separate the blocks")
            blocks = []
            for g in groups:
                iso, dl, dr = _factor_isometry(vecs[:, g], work, rng, tol)
                blocks.append(Block(isometry=frozen_array(iso), dim_left=dl, dim_right=dr))
            structure = BlockStructure(dim=n, blocks=_canonical_blocks(blocks))
            if block_form_residual(f, structure) > 10.0 * tol.fix:
                raise _Ambiguous("conjugated basis misses the block form")
            return structure
        except _Ambiguous as exc:
            last_failure = str(exc)
    raise AmbiguousGroupingError(f"{last_failure} after 3 retries")


# ---------------------------------------------------------------------------
# Structure verification
# ---------------------------------------------------------------------------


def _matrix_unit(n: int, row: int, col: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=complex)
    out[row, col] = 1.0
    return out


def verify_block_structure(
    structure: BlockStructure,
    phi: KrausChannel,
    rho: DensityMatrix,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> BlockVerification:
    """Certify that (phi, rho) realize the claimed block structure.

    Checks, in order: the structure's own isometry invariants; that rho is
    block diagonal across the claimed ranges; that each diagonal block of rho
    factorizes as (left state) (x) (maximally mixed right factor); and that
    phi maps each block range into itself acting as (unitary conjugation) (x)
    (bi-stochastic map) on a spanning set of product matrix units.  Extracted
    weights, left states and left unitaries (up to phase) are returned with
    the residuals; any failed sub-check raises
    :class:`~qentropy.errors.StructureMismatchError` naming it.
    """
    n = structure.dim
    if phi.dim != n or rho.dim != n:
        raise DimensionMismatchError(
            f"dims differ: structure {n}, channel {phi.dim}, state {rho.dim}"
        )
    if sum(dl * dr for dl, dr in structure.block_dims) != n:
        raise StructureMismatchError("block dimensions do not add up to the space")
    isos = [b.isometry for b in structure.blocks]
    for k, v in enumerate(isos):
        res = float(np.linalg.norm(v.conj().T @ v - np.eye(v.shape[1])))
        if res > tol.recon * n:
            raise StructureMismatchError(f"isometry {k} columns are not orthonormal")
    for j in range(len(isos)):
        for k in range(j + 1, len(isos)):
            if float(np.linalg.norm(isos[j].conj().T @ isos[k])) > tol.recon * n:
                raise StructureMismatchError(f"blocks {j} and {k} have overlapping ranges")

    # (a) state block diagonal across ranges
    diag_res = 0.0
    for j in range(len(isos)):
        for k in range(len(isos)):
            if j != k:
                cross = isos[j].conj().T @ rho.matrix @ isos[k]
                diag_res = max(diag_res, float(np.linalg.norm(cross)))
    if diag_res > tol.eq:
        raise StructureMismatchError(
            f"state couples distinct blocks (residual {diag_res:.3e})"
        )

    # (b) block factorization rho_k = p_k * (left state) (x) I/dR
    weights = []
    left_states = []
    fact_res = 0.0
    for block, v in zip(structure.blocks, isos):
        dl, dr = block.dim_left, block.dim_right
        rho_k = v.conj().T @ rho.matrix @ v
        p_k = float(np.real(np.trace(rho_k)))
        weights.append(p_k)
        if p_k <= tol.psd:
            left_states.append(np.eye(dl) / dl)
            continue
        left = _partial_trace_right(rho_k, dl, dr) / p_k
        rebuilt = p_k * np.kron(left, np.eye(dr) / dr)
        fact_res = max(fact_res, float(np.linalg.norm(rho_k - rebuilt)))
        left_states.append(left)
    if fact_res > tol.eq * n:
        raise StructureMismatchError(
            f"a block of the state does not factor as left (x) maximally mixed "
            f"(residual {fact_res:.3e})"
        )

    # (c) channel action: block invariance and (unitary (x) channel) form
    inv_res = 0.0
    act_res = 0.0
    uni_res = 0.0
    right_res = 0.0
    left_unitaries = []
    for block, v in zip(structure.blocks, isos):
        dl, dr = block.dim_left, block.dim_right
        proj = v @ v.conj().T

        def on_block(x: np.ndarray) -> tuple[np.ndarray, float]:
            big = apply_channel(phi, v @ x @ v.conj().T)
            leak = float(np.linalg.norm(big - proj @ big @ proj))
            return v.conj().T @ big @ v, leak

        # left action and its Choi matrix; rank one exactly for Ad_U
        j_left = np.zeros((dl * dl, dl * dl), dtype=complex)
        for a in range(dl):
            for b in range(dl):
                unit = _matrix_unit(dl, a, b)
                image, leak = on_block(np.kron(unit, np.eye(dr)))
                inv_res = max(inv_res, leak)
                j_left += np.kron(_partial_trace_right(image, dl, dr) / dr, unit)
        if inv_res > tol.eq * n:
            raise StructureMismatchError(
                f"channel maps a block outside itself (residual {inv_res:.3e})"
            )
        vals, vecs = np.linalg.eigh((j_left + j_left.conj().T) / 2.0)
        if dl > 1 and float(abs(vals[-2])) > tol.eq * dl:
            raise StructureMismatchError(
                f"left action is not a unitary conjugation "
                f"(secondary Choi eigenvalue {vals[-2]:.3e})"
            )
        u_hat = math.sqrt(max(float(vals[-1]), 0.0)) * vecs[:, -1].reshape(dl, dl)
        u_dev = float(np.linalg.norm(u_hat.conj().T @ u_hat - np.eye(dl)))
        uni_res = max(uni_res, u_dev)
        if u_dev > tol.eq * dl:
            raise StructureMismatchError(
                f"extracted left factor is not unitary (residual {u_dev:.3e})"
            )
        left_unitaries.append(u_hat)

        # right action on matrix units, with bistochasticity residuals
        right_images = {}
        tp_res = 0.0
        for c in range(dr):
            for d in range(dr):
                unit = _matrix_unit(dr, c, d)
                image, leak = on_block(np.kron(np.eye(dl), unit))
                inv_res = max(inv_res, leak)
                right_images[(c, d)] = _partial_trace_left(image, dl, dr) / dl
                expected_trace = 1.0 if c == d else 0.0
                tp_res = max(
                    tp_res, abs(complex(np.trace(right_images[(c, d)])) - expected_trace)
                )
        unital_image = sum(right_images[(c, c)] for c in range(dr))
        right_res = max(
            tp_res, float(np.linalg.norm(unital_image - np.eye(dr))), right_res
        )
        if right_res > tol.eq * n:
            raise StructureMismatchError(
                f"extracted right factor is not bi-stochastic (residual {right_res:.3e})"
            )

        # product form on the spanning set of matrix units
        for a in range(dl):
            for b in range(dl):
                left_unit = _matrix_unit(dl, a, b)
                conj_left = u_hat @ left_unit @ u_hat.conj().T
                for c in range(dr):
                    for d in range(dr):
                        image, _ = on_block(np.kron(left_unit, _matrix_unit(dr, c, d)))
                        expected = np.kron(conj_left, right_images[(c, d)])
                        act_res = max(act_res, float(np.linalg.norm(image - expected)))
        if act_res > tol.eq * n:
            raise StructureMismatchError(
                f"block action differs from unitary (x) channel on product inputs "
                f"(residual {act_res:.3e})"
            )

    return BlockVerification(
        block_dims=structure.block_dims,
        weights=tuple(weights),
        left_states=tuple(frozen_array(s) for s in left_states),
        left_unitaries=tuple(frozen_array(u) for u in left_unitaries),
        block_diagonal_residual=diag_res,
        factorization_residual=fact_res,
        invariance_residual=inv_res,
        action_residual=act_res,
        unitary_residual=uni_res,
        right_bistochastic_residual=right_res,
    )


# ---------------------------------------------------------------------------
# Pair synthesis
# ---------------------------------------------------------------------------


def synthesize_pair(
    spec: BlockSpec, seed: int, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[KrausChannel, DensityMatrix, BlockStructure]:
    """Build an entropy-preserving (channel, state) pair from a block spec.

    Each block contributes Kraus operators (U_k (x) M) for the block's random
    bi-stochastic right channel, embedded into its own range; the state is
    the weighted direct sum of (left state) (x) (maximally mixed).  The whole
    construction is conjugated by one random global unitary so nothing is
    axis-aligned.  Per-block Kraus operators are embedded separately, which
    makes the channel annihilate cross-block coherences: the fixed-point
    algebra of adjoint(phi) o phi is then exactly the direct sum the spec
    asked for, so decomposition round-trips recover the block dimensions.

    Deterministic given (spec, seed).
    """
    if not spec.blocks:
        raise InvalidSpecError("spec needs at least one block")
    for dl, dr in spec.blocks:
        if dl < 1 or dr < 1:
            raise InvalidSpecError(f"block dims must be positive, got ({dl}, {dr})")
    n = spec.dim
    k_blocks = len(spec.blocks)
    rng = np.random.default_rng(abs(int(seed)))

    def child_seed() -> int:
        return int(rng.integers(0, 2**63))

    if spec.weights is not None:
        weights = np.asarray(spec.weights, dtype=float)
        if weights.shape != (k_blocks,):
            raise InvalidSpecError(
                f"expected {k_blocks} weights, got shape {weights.shape}"
            )
        if np.min(weights) < -tol.psd or abs(float(weights.sum()) - 1.0) > tol.eq:
            raise InvalidSpecError("weights must be a probability vector")
        weights = np.clip(weights, 0.0, None)
    else:
        weights = rng.dirichlet(np.ones(k_blocks))

    left_states = []
    for k, (dl, _) in enumerate(spec.blocks):
        if spec.left_states is not None:
            state = validate_state(spec.left_states[k], tol)
            if state.dim != dl:
                raise InvalidSpecError(
                    f"left state {k} has dim {state.dim}, expected {dl}"
                )
            left_states.append(state.matrix)
        else:
            left_states.append(random_density(dl, dl, child_seed(), tol).matrix)

    unitaries = []
    for k, (dl, _) in enumerate(spec.blocks):
        if spec.left_unitaries is not None:
            u = np.asarray(spec.left_unitaries[k], dtype=complex)
            if u.shape != (dl, dl):
                raise InvalidSpecError(f"unitary {k} has shape {u.shape}, expected ({dl}, {dl})")
            if float(np.linalg.norm(u.conj().T @ u - np.eye(dl))) > tol.recon * dl:
                raise InvalidSpecError(f"matrix {k} is not unitary")
            unitaries.append(u)
        else:
            unitaries.append(np.asarray(random_unitary(dl, child_seed())))

    right_channels = []
    for dl, dr in spec.blocks:
        if dr == 1:
            right_channels.append(kraus_channel([np.eye(1)], tol))
        else:
            # three mixed unitaries keep the right factor's own fixed space
            # trivial, so the synthesized fixed algebra matches the spec
            right_channels.append(random_bistochastic_channel(dr, 3, child_seed(), tol))

    basis_change = np.asarray(random_unitary(n, child_seed()))

    kraus_ops = []
    rho = np.zeros((n, n), dtype=complex)
    blocks = []
    offset = 0
    for (dl, dr), w, left, u, right in zip(
        spec.blocks, weights, left_states, unitaries, right_channels
    ):
        size = dl * dr
        for m in right.kraus:
            big = np.zeros((n, n), dtype=complex)
            big[offset : offset + size, offset : offset + size] = np.kron(u, m)
            kraus_ops.append(basis_change @ big @ basis_change.conj().T)
        rho[offset : offset + size, offset : offset + size] = w * np.kron(
            left, np.eye(dr) / dr
        )
        blocks.append(
            Block(
                isometry=frozen_array(basis_change[:, offset : offset + size]),
                dim_left=dl,
                dim_right=dr,
            )
        )
        offset += size

    phi = kraus_channel(kraus_ops, tol)
    rho_state = validate_state(basis_change @ rho @ basis_change.conj().T, tol)
    structure = BlockStructure(dim=n, blocks=_canonical_blocks(blocks))
    return phi, rho_state, structure
