"""Measurement channels, coarse-grained Markov maps and channel fixed points.

A unitary step followed by a projective measurement in the occupation basis
turns quantum evolution into a classical Markov chain on measurement
outcomes.  Aggregating outcomes into classes (e.g. "both particles in the
same mode" vs "different modes") gives a small column-stochastic transfer
matrix whose fixed point is the equilibrium distribution over classes.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    IncompletePartitionError,
    InvalidArgumentError,
    NonUniqueSteadyStateError,
    NumericalContractError,
)
from .fock import FockVector, OccupationVector, ParticleKind, as_occupation, enumerate_basis
from .optics import SingleParticleUnitary, as_unitary, lifted_matrix

STOCHASTIC_TOL = 1e-12
UNIQUENESS_TOL = 1e-10
DENSITY_TOL = 1e-10
OVERLAP_TOL = 1e-8


@dataclass(frozen=True)
class CoarseGraining:
    """Named partition of measurement outcomes into disjoint classes."""

    name: str
    labels: tuple[str, ...]
    classes: tuple[frozenset[OccupationVector], ...]

    def __post_init__(self) -> None:
        if len(self.labels) != len(self.classes):
            raise InvalidArgumentError("one label per class is required")
        classes = tuple(frozenset(as_occupation(o) for o in c) for c in self.classes)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "classes", classes)
        if any(not c for c in classes):
            raise IncompletePartitionError("coarse-graining classes must be non-empty")
        seen: set[OccupationVector] = set()
        for c in classes:
            if seen & c:
                raise IncompletePartitionError("coarse-graining classes overlap")
            seen |= c

    def class_of(self, occ: OccupationVector) -> int:
        for i, c in enumerate(self.classes):
            if occ in c:
                return i
        raise IncompletePartitionError(f"{occ} belongs to no class of {self.name!r}")

    def validate(self, kind: ParticleKind, num_modes: int, num_particles: int) -> None:
        basis = set(enumerate_basis(kind, num_modes, num_particles))
        covered = set().union(*self.classes)
        if covered != basis:
            missing = sorted(basis - covered, reverse=True)
            extra = sorted(covered - basis, reverse=True)
            raise IncompletePartitionError(
                f"{self.name!r} does not partition the ({kind.value}, N={num_modes}, "
                f"M={num_particles}) basis; missing={[str(o) for o in missing]}, "
                f"foreign={[str(o) for o in extra]}"
            )


def same_vs_different(num_modes: int, num_particles: int = 2) -> CoarseGraining:
    """Classes ``same`` (every particle in one mode) and ``diff`` (everything else)."""
    basis = enumerate_basis(ParticleKind.BOSON, num_modes, num_particles)
    same = frozenset(o for o in basis if max(o.counts) == num_particles)
    diff = frozenset(o for o in basis if max(o.counts) != num_particles)
    return CoarseGraining("same/diff", ("same", "diff"), (same, diff))


def finest_grading(kind: ParticleKind | str, num_modes: int, num_particles: int) -> CoarseGraining:
    basis = enumerate_basis(kind, num_modes, num_particles)
    return CoarseGraining("occupation", tuple(str(o) for o in basis), tuple(frozenset([o]) for o in basis))


@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    labels: tuple[str, ...]
    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or len(p) != len(self.labels):
            raise DimensionMismatchError("labels and probabilities differ in length")
        if np.any(p < -STOCHASTIC_TOL) or abs(p.sum() - 1.0) > STOCHASTIC_TOL:
            raise InvalidArgumentError(f"not a probability vector: {p.tolist()}")
        p.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "probs", p)

    def __getitem__(self, label: str) -> float:
        return float(self.probs[self.labels.index(label)])

    def as_dict(self) -> dict[str, float]:
        return {k: float(v) for k, v in zip(self.labels, self.probs)}

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "probs": [float(x) for x in self.probs]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "probability"])
        for k, v in zip(self.labels, self.probs):
            w.writerow([k, repr(float(v))])
        return buf.getvalue()


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """Column-stochastic map: entry (i, j) is P(class i after one cycle | class j before)."""

    labels: tuple[str, ...]
    entries: np.ndarray

    def __post_init__(self) -> None:
        t = np.array(self.entries, dtype=float)
        n = len(self.labels)
        if t.shape != (n, n):
            raise DimensionMismatchError(f"expected a {n}x{n} matrix, got {t.shape}")
        if np.any(t < -STOCHASTIC_TOL) or np.any(t > 1 + STOCHASTIC_TOL):
            raise NumericalContractError("transfer matrix entries must lie in [0, 1]")
        colsum = t.sum(axis=0)
        if np.max(np.abs(colsum - 1.0)) > STOCHASTIC_TOL:
            raise NumericalContractError(f"columns do not sum to 1: {colsum.tolist()}")
        t.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "entries", t)

    def apply(self, p: ProbabilityVector) -> ProbabilityVector:
        if p.labels != self.labels:
            raise DimensionMismatchError(f"labels {p.labels} do not match {self.labels}")
        return ProbabilityVector(self.labels, _clip_normalize(self.entries @ p.probs))

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "entries": self.entries.tolist()}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["to\\from", *self.labels])
        for label, row in zip(self.labels, self.entries):
            w.writerow([label, *(repr(float(x)) for x in row)])
        return buf.getvalue()


def _clip_normalize(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, None)
    return p / p.sum()


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self) -> None:
        rho = np.array(self.matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise DimensionMismatchError(f"density matrix must be square, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > DENSITY_TOL:
            raise NumericalContractError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > DENSITY_TOL:
            raise NumericalContractError(f"trace is {np.trace(rho)}, expected 1")
        if np.min(np.linalg.eigvalsh(rho)) < -DENSITY_TOL:
            raise NumericalContractError("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, psi) -> "DensityMatrix":
        v = np.asarray(psi, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim) / dim)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


def measurement_collapse(state: FockVector) -> dict[OccupationVector, float]:
    """Born-rule outcome probabilities of an occupation-number measurement."""
    return {occ: abs(a) ** 2 for occ, a in state.amplitudes.items()}


def derive_transfer_matrix(
    u,
    grading: CoarseGraining,
    kind: ParticleKind | str = ParticleKind.BOSON,
) -> TransferMatrix:
    """Coarse-grained Markov matrix of one unitary-then-measure cycle.

    Within a class the pre-cycle state is taken to be the uniform classical
    mixture of its basis states.
    """
    kind = ParticleKind.parse(kind)
    u = as_unitary(u)
    num_particles = next(iter(grading.classes[0])).total
    grading.validate(kind, u.n, num_particles)
    basis, lifted = lifted_matrix(u, kind, num_particles)
    probs = np.abs(lifted) ** 2
    membership = np.zeros((len(grading.classes), len(basis)))
    for k, occ in enumerate(basis):
        membership[grading.class_of(occ), k] = 1.0
    # column-wise averages within the source class, sums within the target class
    sizes = membership.sum(axis=1)
    entries = membership @ probs @ membership.T / sizes[np.newaxis, :]
    return TransferMatrix(grading.labels, entries)


def fixed_space_dimension(matrix: np.ndarray, tol: float = UNIQUENESS_TOL) -> int:
    """Dimension of the null space of ``matrix - I``."""
    a = np.asarray(matrix) - np.eye(matrix.shape[0])
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s < tol))


def steady_state(t: TransferMatrix) -> ProbabilityVector:
    """Unique probability vector with ``T p = p``."""
    n = len(t.labels)
    mult = fixed_space_dimension(t.entries)
    if mult != 1:
        raise NonUniqueSteadyStateError(
            f"eigenvalue 1 has multiplicity {mult}; the steady state is not unique", mult
        )
    # replace one balance equation by the normalization constraint
    a = t.entries - np.eye(n)
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    pi = np.linalg.solve(a, b)
    resid = np.max(np.abs(t.entries @ pi - pi))
    if resid >= 1e-12:
        raise NumericalContractError(f"steady-state residual {resid:.3e} too large")
    return ProbabilityVector(t.labels, pi)


def iterate_map(t: TransferMatrix, steps: int) -> TransferMatrix:
    if steps < 0:
        raise InvalidArgumentError("steps must be non-negative")
    return TransferMatrix(t.labels, np.linalg.matrix_power(t.entries, steps))


def l1_distance(p: ProbabilityVector | np.ndarray, q: ProbabilityVector | np.ndarray) -> float:
    a = p.probs if isinstance(p, ProbabilityVector) else np.asarray(p)
    b = q.probs if isinstance(q, ProbabilityVector) else np.asarray(q)
    return float(np.sum(np.abs(a - b)))


def mixing_profile(
    t: TransferMatrix, initial: ProbabilityVector, epsilon: float, max_steps: int = 100_000
) -> int:
    """Smallest k with ``||T^k p0 - pi||_1 <= epsilon``."""
    if epsilon <= 0:
        raise InvalidArgumentError("epsilon must be positive")
    pi = steady_state(t).probs
    p = np.array(initial.probs, dtype=float)
    for k in range(max_steps + 1):
        if np.sum(np.abs(p - pi)) <= epsilon:
            return k
        p = t.entries @ p
    raise NumericalContractError(f"no convergence to within {epsilon} in {max_steps} steps")


def convergence_trace(
    t: TransferMatrix, initial: ProbabilityVector, steps: int
) -> list[tuple[int, tuple[float, ...], float]]:
    """Rows ``(step, probabilities, l1 distance to steady state)`` for steps 0..steps."""
    pi = steady_state(t).probs
    p = np.array(initial.probs, dtype=float)
    rows = []
    for k in range(steps + 1):
        rows.append((k, tuple(float(x) for x in p), float(np.sum(np.abs(p - pi)))))
        p = t.entries @ p
    return rows


def _basis_matrix(basis) -> np.ndarray:
    return np.asarray(basis.matrix if isinstance(basis, SingleParticleUnitary) else basis, dtype=complex)


def dephase(rho: DensityMatrix, basis) -> DensityMatrix:
    """Remove coherences between the columns of ``basis``."""
    w = _basis_matrix(basis)
    if w.shape != rho.matrix.shape:
        raise DimensionMismatchError(f"basis {w.shape} vs density matrix {rho.matrix.shape}")
    out = _dephase_array(rho.matrix, w)
    return DensityMatrix((out + out.conj().T) / 2)


def _dephase_array(rho: np.ndarray, w: np.ndarray) -> np.ndarray:
    in_basis = w.conj().T @ rho @ w
    # linear in rho; also used on non-Hermitian operators when building superoperators
    return w @ np.diag(np.diag(in_basis)) @ w.conj().T


@dataclass(frozen=True, eq=False)
class FixedPointReport:
    fixed_point: DensityMatrix
    multiplicity: int
    overlap_condition: bool
    min_overlap: float
    superoperator: np.ndarray

    @property
    def is_unique(self) -> bool:
        return self.multiplicity == 1

    def distance_from_maximally_mixed(self) -> float:
        d = self.fixed_point.dim
        return float(np.max(np.abs(self.fixed_point.matrix - np.eye(d) / d)))


def competing_channel(hamiltonian_step, complementary_basis):
    """The map ``rho -> dephase(V rho V^+, W)`` as a callable on arrays."""
    v = _basis_matrix(hamiltonian_step)
    w = _basis_matrix(complementary_basis)

    def channel(rho: np.ndarray) -> np.ndarray:
        return _dephase_array(v @ rho @ v.conj().T, w)

    return channel


def channel_superoperator(channel, dim: int) -> np.ndarray:
    """Matrix of a linear map on dim x dim matrices in the row-major vec convention."""
    sup = np.empty((dim * dim, dim * dim), dtype=complex)
    for k in range(dim * dim):
        e = np.zeros(dim * dim, dtype=complex)
        e[k] = 1.0
        sup[:, k] = channel(e.reshape(dim, dim)).reshape(-1)
    return sup


def energy_basis_overlap(hamiltonian_step, complementary_basis) -> np.ndarray:
    """|<e_i|w_j>| between eigenvectors of the Hamiltonian step and the complementary basis."""
    v = _basis_matrix(hamiltonian_step)
    w = _basis_matrix(complementary_basis)
    if np.allclose(v, np.diag(np.diag(v)), atol=1e-14):
        e = np.eye(v.shape[0])
    else:
        _, e = np.linalg.eig(v)
    return np.abs(e.conj().T @ w)


def competing_channel_fixed_point(
    hamiltonian_step: SingleParticleUnitary,
    complementary_basis: SingleParticleUnitary,
    dim: int | None = None,
) -> FixedPointReport:
    """Fixed point of alternating energy-basis evolution and complementary-basis dephasing.

    The channel is unital, so the maximally mixed state is always fixed; the
    report states whether it is the only one (``multiplicity == 1``).  The
    overlap condition is checked and reported but never enforced.
    """
    v = as_unitary(hamiltonian_step)
    w = as_unitary(complementary_basis)
    dim = v.n if dim is None else dim
    if v.n != dim or w.n != dim:
        raise DimensionMismatchError(f"dim={dim} but unitaries have sizes {v.n} and {w.n}")
    overlap = energy_basis_overlap(v, w)
    min_overlap = float(overlap.min())

    sup = channel_superoperator(competing_channel(v, w), dim)
    a = sup - np.eye(dim * dim)
    _, s, vh = np.linalg.svd(a)
    null = vh[s < UNIQUENESS_TOL].conj()
    multiplicity = int(null.shape[0])
    if multiplicity == 0:
        raise NumericalContractError("channel has no fixed point within tolerance")

    # orthogonal projection of I/dim onto the fixed space, renormalized
    seed = (np.eye(dim) / dim).reshape(-1)
    vec = null.T @ (null.conj() @ seed)
    rho = vec.reshape(dim, dim)
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho)
    return FixedPointReport(
        fixed_point=DensityMatrix(rho),
        multiplicity=multiplicity,
        overlap_condition=min_overlap > OVERLAP_TOL,
        min_overlap=min_overlap,
        superoperator=sup,
    )
