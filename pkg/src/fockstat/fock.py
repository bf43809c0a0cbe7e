"""Occupation-number states for identical bosons and fermions.

A state of ``M`` identical particles distributed over ``N`` modes is stored
in second quantization: a superposition of occupation vectors
``|n_0, ..., n_{N-1}>``.  Exchange symmetry is therefore built into the
representation and never has to be imposed by hand.

Fermionic sign convention: the basis state ``|n>`` equals the product of
creation operators applied in ascending mode order to the vacuum, i.e.
``c_{i_1}^+ c_{i_2}^+ ... c_{i_M}^+ |vac>`` with ``i_1 < i_2 < ... < i_M``
(``c_{i_1}^+`` leftmost).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidArgumentError,
    NumericalContractError,
    PauliExclusionError,
)

PRUNE_TOL = 1e-14
NORM_TOL = 1e-10


class ParticleKind(enum.Enum):
    BOSON = "boson"
    FERMION = "fermion"

    @classmethod
    def parse(cls, value: "ParticleKind | str") -> "ParticleKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidArgumentError(f"unknown particle kind {value!r}") from None


@dataclass(frozen=True, order=True)
class OccupationVector:
    """Fock basis element ``|n_0, ..., n_{N-1}>``.

    Ordering compares ``counts`` lexicographically, so ``sorted(..., reverse=True)``
    reproduces the canonical basis order.
    """

    counts: tuple[int, ...]

    def __init__(self, counts: Iterable[int]):
        values = tuple(int(c) for c in counts)
        if len(values) < 1:
            raise InvalidArgumentError("an occupation vector needs at least one mode")
        if any(c < 0 for c in values):
            raise InvalidArgumentError(f"negative occupation in {values}")
        object.__setattr__(self, "counts", values)

    @property
    def num_modes(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def is_valid_for(self, kind: ParticleKind) -> bool:
        return kind is ParticleKind.BOSON or all(c <= 1 for c in self.counts)

    def occupied_modes(self) -> list[int]:
        """Mode indices with multiplicity, ascending: (2,0,1) -> [0, 0, 2]."""
        return [m for m, c in enumerate(self.counts) for _ in range(c)]

    def __iter__(self) -> Iterator[int]:
        return iter(self.counts)

    def __len__(self) -> int:
        return len(self.counts)

    def __getitem__(self, index: int) -> int:
        return self.counts[index]

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.counts) + ")"

    def to_json(self) -> list[int]:
        return list(self.counts)

    @classmethod
    def from_json(cls, data: Sequence[int]) -> "OccupationVector":
        return cls(data)


def as_occupation(value: "OccupationVector | Iterable[int]") -> OccupationVector:
    if isinstance(value, OccupationVector):
        return value
    return OccupationVector(value)


def parse_occupation(text: str) -> OccupationVector:
    """Parse ``"2,0"`` or ``"(2,0)"`` into an occupation vector."""
    stripped = text.strip().strip("()[]")
    try:
        return OccupationVector(int(tok) for tok in stripped.split(",") if tok.strip())
    except ValueError as exc:
        raise InvalidArgumentError(f"malformed occupation {text!r}: {exc}") from None


def _check_kind_occupation(kind: ParticleKind, occ: OccupationVector) -> None:
    if not occ.is_valid_for(kind):
        raise PauliExclusionError(f"fermionic occupation {occ} has a mode with more than one particle")


def basis_size(kind: ParticleKind, num_modes: int, num_particles: int) -> int:
    kind = ParticleKind.parse(kind)
    if kind is ParticleKind.BOSON:
        return math.comb(num_modes + num_particles - 1, num_particles)
    return math.comb(num_modes, num_particles)


def enumerate_basis(kind: ParticleKind | str, num_modes: int, num_particles: int) -> list[OccupationVector]:
    """All occupation vectors with the given totals, in descending lexicographic order.

    >>> [str(v) for v in enumerate_basis("boson", 2, 2)]
    ['(2,0)', '(1,1)', '(0,2)']
    """
    kind = ParticleKind.parse(kind)
    if num_modes < 1:
        raise InvalidArgumentError("num_modes must be >= 1")
    if num_particles < 0:
        raise InvalidArgumentError("num_particles must be >= 0")
    cap = num_particles if kind is ParticleKind.BOSON else 1
    if kind is ParticleKind.FERMION and num_particles > num_modes:
        raise PauliExclusionError(
            f"{num_particles} fermions do not fit into {num_modes} modes"
        )

    out: list[OccupationVector] = []
    prefix: list[int] = []

    def fill(mode: int, remaining: int) -> None:
        if mode == num_modes - 1:
            if remaining <= cap:
                out.append(OccupationVector(prefix + [remaining]))
            return
        for c in range(min(cap, remaining), -1, -1):
            prefix.append(c)
            fill(mode + 1, remaining - c)
            prefix.pop()

    fill(0, num_particles)
    return out


@dataclass(frozen=True, eq=True)
class FockVector:
    """Normalized superposition of occupation vectors at fixed particle number.

    Build instances with :meth:`from_terms`, :meth:`basis_state` or
    :func:`fock_from_single_modes`; the raw constructor performs the same
    validation but does not normalize.
    """

    kind: ParticleKind
    num_modes: int
    amplitudes: Mapping[OccupationVector, complex] = field(compare=True)

    def __post_init__(self) -> None:
        kind = ParticleKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        cleaned: dict[OccupationVector, complex] = {}
        total = None
        for occ, amp in self.amplitudes.items():
            occ = as_occupation(occ)
            if occ.num_modes != self.num_modes:
                raise DimensionMismatchError(
                    f"occupation {occ} does not have {self.num_modes} modes"
                )
            _check_kind_occupation(kind, occ)
            if total is None:
                total = occ.total
            elif occ.total != total:
                raise InvalidArgumentError("all terms must carry the same particle number")
            amp = complex(amp)
            if abs(amp) >= PRUNE_TOL:
                cleaned[occ] = cleaned.get(occ, 0j) + amp
        if not cleaned:
            raise InvalidArgumentError("a Fock vector needs at least one non-negligible amplitude")
        norm_sq = sum(abs(a) ** 2 for a in cleaned.values())
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise NumericalContractError(f"state is not normalized: norm^2 = {norm_sq!r}")
        ordered = dict(sorted(cleaned.items(), key=lambda kv: kv[0], reverse=True))
        object.__setattr__(self, "amplitudes", MappingProxyType(ordered))
        object.__setattr__(self, "_num_particles", total)

    @classmethod
    def from_terms(
        cls,
        kind: ParticleKind | str,
        num_modes: int,
        terms: Mapping[Any, complex] | Iterable[tuple[Any, complex]],
        normalize: bool = True,
    ) -> "FockVector":
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[OccupationVector, complex] = {}
        for occ, amp in items:
            occ = as_occupation(occ)
            merged[occ] = merged.get(occ, 0j) + complex(amp)
        if normalize:
            norm = math.sqrt(sum(abs(a) ** 2 for a in merged.values()))
            if norm == 0.0:
                raise InvalidArgumentError("cannot normalize the zero vector")
            merged = {k: v / norm for k, v in merged.items()}
        return cls(ParticleKind.parse(kind), num_modes, merged)

    @classmethod
    def basis_state(cls, kind: ParticleKind | str, occ: OccupationVector | Iterable[int]) -> "FockVector":
        occ = as_occupation(occ)
        return cls(ParticleKind.parse(kind), occ.num_modes, {occ: 1.0})

    @property
    def num_particles(self) -> int:
        return self._num_particles  # type: ignore[attr-defined]

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values()))

    def amplitude(self, occ: OccupationVector | Iterable[int]) -> complex:
        return self.amplitudes.get(as_occupation(occ), 0j)

    def basis(self) -> list[OccupationVector]:
        return enumerate_basis(self.kind, self.num_modes, self.num_particles)

    def to_array(self, basis: Sequence[OccupationVector] | None = None) -> np.ndarray:
        basis = self.basis() if basis is None else basis
        index = {occ: i for i, occ in enumerate(basis)}
        vec = np.zeros(len(basis), dtype=complex)
        for occ, amp in self.amplitudes.items():
            vec[index[occ]] = amp
        return vec

    @classmethod
    def from_array(
        cls, kind: ParticleKind | str, basis: Sequence[OccupationVector], vector: np.ndarray
    ) -> "FockVector":
        if len(basis) != len(vector):
            raise DimensionMismatchError("basis and vector lengths differ")
        return cls(ParticleKind.parse(kind), basis[0].num_modes, dict(zip(basis, vector)))

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "num_modes": self.num_modes,
            "terms": [
                {"counts": occ.to_json(), "re": amp.real, "im": amp.imag}
                for occ, amp in self.amplitudes.items()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "FockVector":
        terms = {OccupationVector(t["counts"]): complex(t["re"], t["im"]) for t in data["terms"]}
        return cls(ParticleKind.parse(data["kind"]), int(data["num_modes"]), terms)

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def __str__(self) -> str:
        parts = [f"({a.real:+.6g}{a.imag:+.6g}j)|{occ}>" for occ, a in self.amplitudes.items()]
        return " + ".join(parts)


def fock_from_single_modes(
    kind: ParticleKind | str, num_modes: int, occupied_modes: Sequence[int]
) -> FockVector:
    """Basis state with one particle created in each listed mode.

    Bosons may repeat a mode; the order of ``occupied_modes`` is irrelevant.
    A repeated fermionic mode raises :class:`PauliExclusionError`.
    """
    kind = ParticleKind.parse(kind)
    counts = [0] * num_modes
    for mode in occupied_modes:
        if not 0 <= mode < num_modes:
            raise InvalidArgumentError(f"mode index {mode} out of range for {num_modes} modes")
        counts[mode] += 1
    if kind is ParticleKind.FERMION and any(c > 1 for c in counts):
        raise PauliExclusionError(f"repeated fermionic mode in {list(occupied_modes)}")
    return FockVector.basis_state(kind, counts)


def inner_product(x: FockVector, y: FockVector) -> complex:
    """<x|y>, conjugate-linear in ``x``."""
    if x.kind is not y.kind:
        raise DimensionMismatchError("states describe different particle kinds")
    if x.num_modes != y.num_modes or x.num_particles != y.num_particles:
        raise DimensionMismatchError(
            f"cannot pair {x.num_modes}-mode/{x.num_particles}-particle state with "
            f"{y.num_modes}-mode/{y.num_particles}-particle state"
        )
    return sum((a.conjugate() * y.amplitude(occ) for occ, a in x.amplitudes.items()), 0j)
