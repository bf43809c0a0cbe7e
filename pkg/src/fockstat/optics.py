"""Linear-optical evolution of identical particles.

A single particle evolves as ``|n> -> sum_m U[n, m] |m>``; equivalently each
creation operator maps as ``c_n^+ -> sum_m U[n, m] c_m^+``.  Row index is the
input mode, column index the output mode.  The many-particle evolution is
the unique lift of this map to the occupation-number basis.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from scipy.stats import unitary_group

from .errors import (
    DimensionMismatchError,
    InvalidArgumentError,
    NonUnitaryError,
    PauliExclusionError,
    TotalMismatchError,
    UndefinedRatioError,
)
from .fock import (
    FockVector,
    OccupationVector,
    ParticleKind,
    as_occupation,
    enumerate_basis,
)
from .kernels import amplitude_submatrix, determinant, permanent

UNITARITY_TOL = 1e-10
BEAMSPLITTER_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SingleParticleUnitary:
    """N x N unitary acting on one particle; ``matrix[n, m]`` is the amplitude n -> m."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatchError(f"unitary must be a non-empty square matrix, got {a.shape}")
        err = np.max(np.abs(a @ a.conj().T - np.eye(a.shape[0])))
        if err > UNITARITY_TOL:
            raise NonUnitaryError(f"matrix is not unitary: max |U U^+ - I| = {err:.3e}")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other: "SingleParticleUnitary") -> "SingleParticleUnitary":
        return SingleParticleUnitary(self.matrix @ other.matrix)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "rows": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "SingleParticleUnitary":
        try:
            n = int(data["n"])
            rows = data["rows"]
            mat = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"malformed unitary JSON: {exc}") from None
        if mat.shape != (n, n):
            raise DimensionMismatchError(f"declared n={n} but rows have shape {mat.shape}")
        return cls(mat)


def load_unitary(path) -> SingleParticleUnitary:
    with open(path) as fh:
        return SingleParticleUnitary.from_json(json.load(fh))


def as_unitary(u) -> SingleParticleUnitary:
    return u if isinstance(u, SingleParticleUnitary) else SingleParticleUnitary(u)


@dataclass(frozen=True)
class BeamsplitterSpec:
    """Real transmission and reflection amplitudes with t^2 + r^2 = 1."""

    t: float = 1 / math.sqrt(2)
    r: float = 1 / math.sqrt(2)

    def __post_init__(self) -> None:
        if not (0.0 <= self.t <= 1.0 and 0.0 <= self.r <= 1.0):
            raise InvalidArgumentError(f"t and r must lie in [0, 1], got t={self.t}, r={self.r}")
        if abs(self.t**2 + self.r**2 - 1.0) > BEAMSPLITTER_TOL:
            raise InvalidArgumentError(f"t^2 + r^2 = {self.t**2 + self.r**2!r}, expected 1")

    @classmethod
    def balanced(cls) -> "BeamsplitterSpec":
        return cls(1 / math.sqrt(2), 1 / math.sqrt(2))


def beamsplitter(spec: BeamsplitterSpec | None = None) -> SingleParticleUnitary:
    """``a'^+ = t a^+ + i r b^+`` and ``b'^+ = t b^+ + i r a^+`` as a 2x2 unitary."""
    spec = BeamsplitterSpec.balanced() if spec is None else spec
    t, r = spec.t, spec.r
    return SingleParticleUnitary(np.array([[t, 1j * r], [1j * r, t]], dtype=complex))


def fourier_unitary(n: int) -> SingleParticleUnitary:
    k = np.arange(n)
    return SingleParticleUnitary(np.exp(2j * np.pi * np.outer(k, k) / n) / np.sqrt(n))


def phase_unitary(phases: Sequence[float]) -> SingleParticleUnitary:
    return SingleParticleUnitary(np.diag(np.exp(1j * np.asarray(phases, dtype=float))))


def random_unitary(n: int, seed=None) -> SingleParticleUnitary:
    """Haar-random unitary."""
    if n == 1:
        rng = np.random.default_rng(seed)
        return SingleParticleUnitary(np.array([[np.exp(2j * np.pi * rng.random())]]))
    return SingleParticleUnitary(unitary_group.rvs(n, random_state=seed))


def pauli_amplitude_is_zero(input_occ, output_occ) -> bool:
    """True when a fermionic amplitude between these occupations vanishes by exclusion."""
    inp, out = as_occupation(input_occ), as_occupation(output_occ)
    return not (inp.is_valid_for(ParticleKind.FERMION) and out.is_valid_for(ParticleKind.FERMION))


def _factorial_product(occ: OccupationVector) -> int:
    return math.prod(math.factorial(c) for c in occ.counts)


def transition_amplitude(
    u,
    input_occ,
    output_occ,
    kind: ParticleKind | str = ParticleKind.BOSON,
    strict: bool = True,
) -> complex:
    """<output| U_lifted |input>.

    Bosons: ``per(S) / sqrt(prod in_n! prod out_m!)`` with ``S`` the amplitude
    submatrix.  Fermions: ``det(S)`` under the ascending-mode sign convention.

    A fermionic occupation above one raises :class:`PauliExclusionError`
    unless ``strict=False``, in which case the (vanishing) amplitude 0 is
    returned.
    """
    kind = ParticleKind.parse(kind)
    u = as_unitary(u)
    inp, out = as_occupation(input_occ), as_occupation(output_occ)
    if inp.num_modes != u.n or out.num_modes != u.n:
        raise DimensionMismatchError(f"occupations {inp}, {out} do not match a {u.n}-mode unitary")
    if inp.total != out.total:
        raise TotalMismatchError(f"particle numbers differ: {inp.total} vs {out.total}")
    if kind is ParticleKind.FERMION:
        if pauli_amplitude_is_zero(inp, out):
            if strict:
                raise PauliExclusionError(f"fermionic transition {inp} -> {out} needs double occupancy")
            return 0j
        return determinant(amplitude_submatrix(u.matrix, inp, out))
    sub = amplitude_submatrix(u.matrix, inp, out)
    norm = math.sqrt(_factorial_product(inp) * _factorial_product(out))
    return permanent(sub) / norm


def lifted_matrix(
    u, kind: ParticleKind | str, num_particles: int
) -> tuple[list[OccupationVector], np.ndarray]:
    """Matrix of the lifted evolution on the fixed-particle-number basis.

    Entry ``[i, j]`` is the amplitude from ``basis[j]`` to ``basis[i]`` so that
    column vectors of amplitudes evolve by left multiplication.
    """
    kind = ParticleKind.parse(kind)
    u = as_unitary(u)
    basis = enumerate_basis(kind, u.n, num_particles)
    mat = np.empty((len(basis), len(basis)), dtype=complex)
    for j, src in enumerate(basis):
        for i, dst in enumerate(basis):
            mat[i, j] = transition_amplitude(u, src, dst, kind)
    return basis, mat


def evolve(u, state: FockVector) -> FockVector:
    """Apply the lifted single-particle unitary to a many-particle state."""
    u = as_unitary(u)
    if state.num_modes != u.n:
        raise DimensionMismatchError(f"{state.num_modes}-mode state vs {u.n}-mode unitary")
    out: dict[OccupationVector, complex] = {}
    for dst in enumerate_basis(state.kind, u.n, state.num_particles):
        amp = 0j
        for src, a in state.amplitudes.items():
            amp += a * transition_amplitude(u, src, dst, state.kind)
        out[dst] = amp
    return FockVector(state.kind, u.n, out)


def bunching_enhancement(u, distinct_input_modes: Sequence[int], target_mode: int) -> float:
    """Ratio of the bosonic to the classical probability that all particles land in ``target_mode``.

    For M bosons entering M different modes this equals M!.
    """
    u = as_unitary(u)
    modes = list(distinct_input_modes)
    if not modes:
        raise InvalidArgumentError("at least one input mode is required")
    if len(set(modes)) != len(modes):
        raise InvalidArgumentError(
            f"input modes {modes} repeat; the bunching ratio is defined for distinct inputs only"
        )
    if not all(0 <= m < u.n for m in modes) or not 0 <= target_mode < u.n:
        raise InvalidArgumentError("mode index out of range")
    inp = [0] * u.n
    for m in modes:
        inp[m] = 1
    out = [0] * u.n
    out[target_mode] = len(modes)
    p_quantum = abs(transition_amplitude(u, inp, out)) ** 2
    p_classical = math.prod(abs(u.matrix[m, target_mode]) ** 2 for m in modes)
    if p_classical == 0.0:
        raise UndefinedRatioError("classical probability is zero; ratio undefined")
    return p_quantum / p_classical


def output_distribution(u, state: FockVector) -> dict[OccupationVector, float]:
    evolved = evolve(u, state)
    return {occ: abs(evolved.amplitude(occ)) ** 2 for occ in evolved.basis()}


def hom_distribution(spec: BeamsplitterSpec | None, input_occ) -> dict[OccupationVector, float]:
    """Output photon-number distribution of a two-mode beamsplitter."""
    inp = as_occupation(input_occ)
    if inp.num_modes != 2:
        raise DimensionMismatchError(f"beamsplitter input must have 2 modes, got {inp}")
    return output_distribution(beamsplitter(spec), FockVector.basis_state(ParticleKind.BOSON, inp))


def distribution_to_csv(dist: Mapping[OccupationVector, float]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["occupation", "probability"])
    for occ, p in dist.items():
        writer.writerow([str(occ), repr(float(p))])
    return buf.getvalue()


def distribution_to_json(dist: Mapping[OccupationVector, float]) -> list[dict]:
    return [{"occupation": occ.to_json(), "probability": float(p)} for occ, p in dist.items()]


def distribution_from_json(data: Iterable[Mapping[str, Any]]) -> dict[OccupationVector, float]:
    return {OccupationVector(row["occupation"]): float(row["probability"]) for row in data}
