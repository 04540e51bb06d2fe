"""Hermitian Pauli strings in bit-packed symplectic form.

A string is stored as (n, x, z, sign) meaning sign * i^{|x & z|} X^x Z^z,
which is Hermitian with sign in {+1, -1}; overlapping x and z bits are Y
factors.  Products of two strings are only representable when they commute
(otherwise the result picks up a factor of i), and ``multiply`` rejects
that case.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gf2 import BitVector

_CHAR_TO_XZ = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_XZ_TO_CHAR = {v: k for k, v in _CHAR_TO_XZ.items()}


@dataclass(frozen=True)
class PauliString:
    n: int
    x: int = 0
    z: int = 0
    sign: int = 1

    def __post_init__(self):
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("x/z bits outside qubit range")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def from_label(cls, label: str, sign: int = 1) -> "PauliString":
        """Parse e.g. "XIZY" (qubit 0 first)."""
        x = z = 0
        for i, ch in enumerate(label):
            xi, zi = _CHAR_TO_XZ[ch]
            x |= xi << i
            z |= zi << i
        return cls(len(label), x, z, sign)

    @classmethod
    def single(cls, n: int, kind: str, qubit: int) -> "PauliString":
        xi, zi = _CHAR_TO_XZ[kind]
        return cls(n, xi << qubit, zi << qubit)

    @classmethod
    def from_support(cls, n: int, kind: str, qubits) -> "PauliString":
        """Uniform product like X_{q1} X_{q2} ... over the given qubits."""
        x = z = 0
        xi, zi = _CHAR_TO_XZ[kind]
        for q in qubits:
            x |= xi << q
            z |= zi << q
        return cls(n, x, z)

    def label(self) -> str:
        return "".join(
            _XZ_TO_CHAR[((self.x >> i) & 1, (self.z >> i) & 1)] for i in range(self.n)
        )

    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def support(self) -> frozenset[int]:
        m = self.x | self.z
        return frozenset(i for i in range(self.n) if (m >> i) & 1)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def x_vector(self) -> BitVector:
        return BitVector(self.n, self.x)

    def z_vector(self) -> BitVector:
        return BitVector(self.n, self.z)

    def __str__(self) -> str:
        prefix = "" if self.sign == 1 else "-"
        return prefix + self.label()


def commutes(p: PauliString, q: PauliString) -> bool:
    """Symplectic-form test: even total X/Z overlap means commutation."""
    if p.n != q.n:
        raise ValueError("qubit count mismatch")
    overlap = (p.x & q.z).bit_count() + (p.z & q.x).bit_count()
    return overlap % 2 == 0


def multiply(p: PauliString, q: PauliString) -> PauliString:
    """Product p*q with the +-1 sign from X/Z reordering.

    Requires [p, q] = 0 so the product is again Hermitian; anticommuting
    inputs would produce an anti-Hermitian string and are rejected.
    """
    if p.n != q.n:
        raise ValueError("qubit count mismatch")
    x3 = p.x ^ q.x
    z3 = p.z ^ q.z
    # Phase exponent of i: from unpacking both canonical Y factors, crossing
    # Z^z1 past X^x2, and repacking the result's Y factors.
    t = (
        (p.x & p.z).bit_count()
        + (q.x & q.z).bit_count()
        + 2 * (p.z & q.x).bit_count()
        - (x3 & z3).bit_count()
    ) % 4
    if t % 2:
        raise ValueError("product of anticommuting strings is not Hermitian")
    sign = p.sign * q.sign * (1 if t == 0 else -1)
    return PauliString(p.n, x3, z3, sign)


def multiply_phase(p: PauliString, q: PauliString) -> tuple[complex, PauliString]:
    """General product p*q = phase * (canonical +1 string).

    Unlike ``multiply`` this accepts anticommuting inputs; the phase is then
    imaginary.  Useful for commutators, where [P, Q] = 2 phase * canon when
    P and Q anticommute.
    """
    if p.n != q.n:
        raise ValueError("qubit count mismatch")
    x3 = p.x ^ q.x
    z3 = p.z ^ q.z
    t = (
        (p.x & p.z).bit_count()
        + (q.x & q.z).bit_count()
        + 2 * (p.z & q.x).bit_count()
        - (x3 & z3).bit_count()
    ) % 4
    phase = p.sign * q.sign * (1j) ** t
    return phase, PauliString(p.n, x3, z3)


def product(paulis, n: int | None = None) -> PauliString:
    """Ordered product of a (possibly empty) iterable of commuting strings."""
    paulis = list(paulis)
    if not paulis:
        if n is None:
            raise ValueError("need n for an empty product")
        return PauliString.identity(n)
    acc = paulis[0]
    for p in paulis[1:]:
        acc = multiply(acc, p)
    return acc
