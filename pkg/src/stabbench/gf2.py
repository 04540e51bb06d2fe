"""Dense GF(2) linear algebra on int bitsets, plus exact minimum-weight searches.

Vectors are packed little-endian into Python ints (bit i of ``bits`` is
coordinate i), so XOR/AND/popcount run at machine-word speed regardless of
length.  All solvers here are exact at desk scale: they either return the
true optimum or a certified statement that none exists below the cap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass


def _mask(length: int) -> int:
    return (1 << length) - 1


@dataclass(frozen=True)
class BitVector:
    """A length-tagged GF(2) vector packed into a single int."""

    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("negative length")
        if self.bits & ~_mask(self.length):
            raise ValueError("set bits beyond declared length")

    @classmethod
    def from_indices(cls, length: int, indices) -> "BitVector":
        bits = 0
        for i in indices:
            if not 0 <= i < length:
                raise ValueError(f"index {i} out of range for length {length}")
            bits |= 1 << i
        return cls(length, bits)

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise ValueError("length mismatch")
        return BitVector(self.length, self.bits ^ other.bits)

    def __and__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise ValueError("length mismatch")
        return BitVector(self.length, self.bits & other.bits)

    def get(self, i: int) -> int:
        return (self.bits >> i) & 1

    def weight(self) -> int:
        return self.bits.bit_count()

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.length) if (self.bits >> i) & 1)

    def is_zero(self) -> bool:
        return self.bits == 0

    def __str__(self) -> str:
        return "".join("1" if self.get(i) else "0" for i in range(self.length))


@dataclass(frozen=True)
class BitMatrix:
    """A list of equal-length rows over GF(2)."""

    rows: tuple[BitVector, ...]
    cols: int

    def __post_init__(self):
        for r in self.rows:
            if r.length != self.cols:
                raise ValueError("row length differs from declared column count")

    @classmethod
    def from_rows(cls, rows, cols: int | None = None) -> "BitMatrix":
        rows = tuple(
            r if isinstance(r, BitVector) else BitVector(cols, r) for r in rows
        )
        if cols is None:
            if not rows:
                raise ValueError("cannot infer column count of an empty matrix")
            cols = rows[0].length
        return cls(rows, cols)

    @classmethod
    def from_dense(cls, array) -> "BitMatrix":
        rows = []
        ncols = len(array[0]) if len(array) else 0
        for row in array:
            bits = 0
            for j, v in enumerate(row):
                if int(v) % 2:
                    bits |= 1 << j
            rows.append(BitVector(ncols, bits))
        return cls(tuple(rows), ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def row_ints(self) -> list[int]:
        return [r.bits for r in self.rows]

    def transpose(self) -> "BitMatrix":
        cols = []
        for j in range(self.cols):
            bits = 0
            for i, r in enumerate(self.rows):
                if r.get(j):
                    bits |= 1 << i
            cols.append(BitVector(self.nrows, bits))
        return BitMatrix(tuple(cols), self.nrows)

    def mul_left(self, x: BitVector) -> BitVector:
        """Row combination x^T * self (x selects rows to XOR)."""
        if x.length != self.nrows:
            raise ValueError("selector length must equal row count")
        acc = 0
        xb = x.bits
        for r in self.rows:
            if xb & 1:
                acc ^= r.bits
            xb >>= 1
        return BitVector(self.cols, acc)


def rank(m: BitMatrix) -> int:
    """GF(2) rank via row elimination; the input is not modified."""
    work = m.row_ints()
    r = 0
    for col in range(m.cols):
        pivot = None
        for i in range(r, len(work)):
            if (work[i] >> col) & 1:
                pivot = i
                break
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        for i in range(len(work)):
            if i != r and ((work[i] >> col) & 1):
                work[i] ^= work[r]
        r += 1
        if r == len(work):
            break
    return r


def _eliminate_with_combos(a: BitMatrix):
    """Row-reduce ``a`` while tracking which input rows combine into each
    reduced row.  Returns (reduced rows, combo ints, pivot columns)."""
    work = a.row_ints()
    combos = [1 << i for i in range(len(work))]
    pivots: list[int] = []
    r = 0
    for col in range(a.cols):
        pivot = None
        for i in range(r, len(work)):
            if (work[i] >> col) & 1:
                pivot = i
                break
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        combos[r], combos[pivot] = combos[pivot], combos[r]
        for i in range(len(work)):
            if i != r and ((work[i] >> col) & 1):
                work[i] ^= work[r]
                combos[i] ^= combos[r]
        pivots.append(col)
        r += 1
        if r == len(work):
            break
    return work, combos, pivots


def solve_affine(a: BitMatrix, b: BitVector):
    """Solve x^T a = b^T over GF(2).

    Returns None when b is outside the rowspace of ``a``; otherwise a pair
    (particular solution, nullspace basis) where the basis spans
    {x : x^T a = 0}.  Both live in F_2^{rows}.
    """
    if b.length != a.cols:
        raise ValueError("right-hand side length must equal column count")
    work, combos, pivots = _eliminate_with_combos(a)
    nrank = len(pivots)
    # Express b over the pivot rows.
    residual = b.bits
    x = 0
    for i in range(nrank):
        col = pivots[i]
        if (residual >> col) & 1:
            residual ^= work[i]
            x ^= combos[i]
    if residual:
        return None
    null_basis = [
        BitVector(a.nrows, combos[i]) for i in range(nrank, a.nrows) if combos[i]
    ]
    return BitVector(a.nrows, x), null_basis


def min_support_solution(a: BitMatrix, b: BitVector, cap: int):
    """Exact minimum Hamming weight of x with x^T a = b^T, if it is <= cap.

    Returns None for infeasible systems and when every solution weighs more
    than ``cap``.  Searches breadth-first over weight classes; above 24 rows
    a meet-in-the-middle sweep over half-subsets replaces the direct
    enumeration.
    """
    if cap < 0:
        raise ValueError("cap must be >= 0")
    sol = solve_affine(a, b)
    if sol is None:
        return None
    if b.is_zero():
        return 0
    m = a.nrows
    rows = a.row_ints()
    target = b.bits
    if m <= 24:
        for w in range(1, min(cap, m) + 1):
            for comb in itertools.combinations(range(m), w):
                acc = 0
                for i in comb:
                    acc ^= rows[i]
                if acc == target:
                    return w
        return None
    best = _mitm_min_weight(rows, target)
    if best is not None and best <= cap:
        return best
    return None


def _mitm_min_weight(rows: list[int], target: int):
    """Meet-in-the-middle: min |x| with sum of selected rows == target."""
    half = len(rows) // 2
    left, right = rows[:half], rows[half:]
    best_left: dict[int, int] = {}
    for bits in range(1 << len(left)):
        acc = 0
        t = bits
        while t:
            acc ^= left[(t & -t).bit_length() - 1]
            t &= t - 1
        w = bits.bit_count()
        if acc not in best_left or w < best_left[acc]:
            best_left[acc] = w
    best = None
    for bits in range(1 << len(right)):
        acc = 0
        t = bits
        while t:
            acc ^= right[(t & -t).bit_length() - 1]
            t &= t - 1
        need = acc ^ target
        if need in best_left:
            w = bits.bit_count() + best_left[need]
            if best is None or w < best:
                best = w
    return best


def in_rowspace(a: BitMatrix, b: BitVector) -> bool:
    return solve_affine(a, b) is not None


def nullspace(a: BitMatrix) -> list[BitVector]:
    """Basis of {v in F_2^cols : a v = 0} (right nullspace)."""
    work, _, pivots = _eliminate_with_combos(a)
    pivot_set = set(pivots)
    free = [j for j in range(a.cols) if j not in pivot_set]
    basis = []
    for j in free:
        v = 1 << j
        # Back-substitute: each pivot row fixes its pivot coordinate.
        for i in reversed(range(len(pivots))):
            col = pivots[i]
            if (work[i] & v).bit_count() & 1:
                v ^= 1 << col
        basis.append(BitVector(a.cols, v))
    return basis


def min_weight_codeword(gen: BitMatrix, coset: BitVector, w_max: int):
    """Minimum Hamming weight of (x^T gen) XOR coset over all x.

    The all-zero word is excluded when ``coset`` is zero, so for coset = 0
    this is the minimum distance of the rowspace.  Returns None when the
    minimum exceeds ``w_max``, which certifies the bound "weight >= w_max+1".

    Enumerates candidate words in increasing weight (with a rowspace
    membership test) when the generator has many rows; for <= 20 rows a
    Gray-code walk over all 2^rows combinations is faster and exact.
    """
    if w_max < 1:
        raise ValueError("w_max must be >= 1")
    if coset.length != gen.cols:
        raise ValueError("coset length must equal column count")
    rows = gen.row_ints()
    m = len(rows)
    if m <= 20:
        best = None
        word = coset.bits
        prev = 0
        exclude_zero = coset.is_zero()
        for g in range(1 << m):
            gray = g ^ (g >> 1)
            diff = gray ^ prev
            if diff:
                word ^= rows[diff.bit_length() - 1]
            prev = gray
            w = word.bit_count()
            if w == 0 and exclude_zero:
                continue
            if best is None or w < best:
                best = w
                if best == 0:
                    break
        return best if (best is not None and best <= w_max) else None
    # Wide generator: walk candidate words by weight, testing membership in
    # the affine space coset + rowspace via elimination.
    work, _, pivots = _eliminate_with_combos(gen)
    n = gen.cols

    def in_space(word: int) -> bool:
        residual = word ^ coset.bits
        for i, col in enumerate(pivots):
            if (residual >> col) & 1:
                residual ^= work[i]
        return residual == 0

    exclude_zero = coset.is_zero()
    for w in range(0 if not exclude_zero else 1, w_max + 1):
        if w == 0:
            if in_space(0):
                return 0
            continue
        for comb in itertools.combinations(range(n), w):
            word = 0
            for i in comb:
                word |= 1 << i
            if in_space(word):
                return w
    return None
