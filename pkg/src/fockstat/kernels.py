"""Permanents and determinants of amplitude submatrices.

Bosonic many-particle amplitudes are permanents, fermionic ones are
determinants, of the single-particle matrix with rows and columns repeated
according to the input and output occupations.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import DimensionMismatchError, InvalidArgumentError, TotalMismatchError
from .fock import OccupationVector, as_occupation

MAX_PERMANENT_SIZE = 20
NAIVE_CUTOFF = 4


def _as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    return a


def permanent_naive(m) -> complex:
    """Sum over all permutations. Exponential in n! and only meant for small n."""
    a = _as_square(m)
    n = a.shape[0]
    total = 0j
    rows = range(n)
    for sigma in itertools.permutations(range(n)):
        prod = 1 + 0j
        for i in rows:
            prod *= a[i, sigma[i]]
        total += prod
    return complex(total)


def permanent_ryser(m) -> complex:
    """Ryser's inclusion-exclusion formula, visiting column subsets in Gray-code order.

    per(A) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} a_ij

    Consecutive Gray codes differ in one column, so each step updates the
    row sums with a single vector addition: O(2^n n) work overall.
    """
    a = _as_square(m)
    n = a.shape[0]
    if n == 0:
        return 1 + 0j
    cols = [a[:, j].copy() for j in range(n)]
    row_sums = np.zeros(n, dtype=complex)
    total = 0j
    gray = 0
    for k in range(1, 1 << n):
        flip = (k & -k).bit_length() - 1
        bit = 1 << flip
        gray ^= bit
        if gray & bit:
            row_sums += cols[flip]
        else:
            row_sums -= cols[flip]
        term = np.prod(row_sums)
        # one bit flips per step, so |S| is odd exactly when k is odd
        if k & 1:
            total -= term
        else:
            total += term
    return complex(total if n % 2 == 0 else -total)


def permanent(m) -> complex:
    """Matrix permanent: direct expansion for n <= 4, Ryser/Gray code above."""
    a = _as_square(m)
    n = a.shape[0]
    if n > MAX_PERMANENT_SIZE:
        raise InvalidArgumentError(
            f"permanent size {n} exceeds the supported maximum of {MAX_PERMANENT_SIZE}"
        )
    if n <= NAIVE_CUTOFF:
        return permanent_naive(a)
    return permanent_ryser(a)


def determinant(m) -> complex:
    # LAPACK getrf: LU with partial pivoting
    a = _as_square(m)
    if a.shape[0] == 0:
        return 1 + 0j
    return complex(np.linalg.det(a))


def amplitude_submatrix(u, input_occ, output_occ) -> np.ndarray:
    """M x M matrix of ``u`` with row n repeated input_occ[n] times and column m
    repeated output_occ[m] times, both in ascending mode order."""
    u = _as_square(u)
    inp: OccupationVector = as_occupation(input_occ)
    out: OccupationVector = as_occupation(output_occ)
    if inp.num_modes != u.shape[0] or out.num_modes != u.shape[0]:
        raise DimensionMismatchError(
            f"occupations {inp}, {out} do not match a {u.shape[0]}-mode matrix"
        )
    if inp.total != out.total:
        raise TotalMismatchError(f"particle numbers differ: {inp.total} vs {out.total}")
    rows = inp.occupied_modes()
    cols = out.occupied_modes()
    return u[np.ix_(rows, cols)]
