"""Syndrome-resolved quasi-local operators.

An operator is a sum of local terms keyed by (strong support S, syndrome s):
every Pauli in a term's payload acts inside S, shares the syndrome s, and
every check that anticommutes with the payload lies inside S.  The strong
support assigned here is the canonical minimal choice

    S(P) = support(P)  union  supports of all checks flipped by P,

which makes the key unique per Pauli and the decomposition exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .code import StabilizerCode, syndrome_of
from .gf2 import BitVector
from .matrices import operator_dense, pauli_transform
from .pauli import PauliString

PATCH_LIMIT = 14  # norm evaluations refuse patches beyond 2^14 dimensions
DENSE_PATCH_LIMIT = 12  # dense patch algebra (projectors, splits, solves)


class PatchTooLargeError(ValueError):
    pass


def _compress_bits(bits: int, positions: tuple[int, ...]) -> int:
    out = 0
    for j, pos in enumerate(positions):
        if (bits >> pos) & 1:
            out |= 1 << j
    return out


def _expand_bits(bits: int, positions: tuple[int, ...]) -> int:
    out = 0
    for j, pos in enumerate(positions):
        if (bits >> j) & 1:
            out |= 1 << pos
    return out


@dataclass(frozen=True)
class LocalTerm:
    """Weighted Pauli sum with a declared strong support and syndrome."""

    n: int
    support: frozenset
    syndrome: BitVector
    paulis: tuple  # of (complex coeff, PauliString)

    @property
    def patch_qubits(self) -> tuple[int, ...]:
        return tuple(sorted(self.support))

    @property
    def patch_dim(self) -> int:
        return 1 << len(self.support)

    def patch_paulis(self) -> list:
        qubits = self.patch_qubits
        out = []
        for coeff, p in self.paulis:
            out.append(
                (
                    coeff,
                    PauliString(
                        len(qubits),
                        _compress_bits(p.x, qubits),
                        _compress_bits(p.z, qubits),
                        p.sign,
                    ),
                )
            )
        return out

    def patch_matrix(self) -> np.ndarray:
        if len(self.support) > DENSE_PATCH_LIMIT:
            raise PatchTooLargeError(
                f"patch on {len(self.support)} qubits exceeds the dense limit"
            )
        return operator_dense(len(self.support), self.patch_paulis())

    def operator_norm(self) -> float:
        if len(self.support) > PATCH_LIMIT:
            raise PatchTooLargeError(
                f"norm evaluation rejected: |S| = {len(self.support)} > {PATCH_LIMIT}"
            )
        if not self.paulis:
            return 0.0
        from .matrices import payload_norm

        return payload_norm(len(self.support), self.patch_paulis())

    def scaled(self, factor: complex) -> "LocalTerm":
        return LocalTerm(
            self.n,
            self.support,
            self.syndrome,
            tuple((factor * c, p) for c, p in self.paulis),
        )


@dataclass
class QuasiLocalOperator:
    code: StabilizerCode
    terms: tuple

    _norm_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def key_index(self) -> dict:
        return {(t.support, t.syndrome.bits): t for t in self.terms}

    def pauli_items(self) -> list:
        out = []
        for t in self.terms:
            out.extend(t.paulis)
        return out

    def to_dense(self) -> np.ndarray:
        return operator_dense(self.code.n, self.pauli_items())

    def term_norm(self, term: LocalTerm) -> float:
        key = (term.support, term.syndrome.bits)
        if key not in self._norm_cache:
            self._norm_cache[key] = term.operator_norm()
        return self._norm_cache[key]

    def scaled(self, factor: complex) -> "QuasiLocalOperator":
        return QuasiLocalOperator(
            self.code, tuple(t.scaled(factor) for t in self.terms)
        )

    def add(self, other: "QuasiLocalOperator",
            drop_tol: float = 1e-14) -> "QuasiLocalOperator":
        merged: dict = {}
        for t in list(self.terms) + list(other.terms):
            key = (t.support, t.syndrome.bits)
            if key in merged:
                merged[key] = _merge_terms(merged[key], t, drop_tol)
            else:
                merged[key] = t
        terms = tuple(t for t in merged.values() if t.paulis)
        return QuasiLocalOperator(self.code, terms)

    def max_support(self) -> int:
        return max((len(t.support) for t in self.terms), default=0)


def _merge_terms(a: LocalTerm, b: LocalTerm, drop_tol: float) -> LocalTerm:
    acc: dict = {}
    for coeff, p in list(a.paulis) + list(b.paulis):
        key = (p.x, p.z)
        base = PauliString(p.n, p.x, p.z)
        acc[key] = acc.get(key, 0.0) + coeff * p.sign
    paulis = tuple(
        (c, PauliString(a.n, x, z)) for (x, z), c in acc.items()
        if abs(c) > drop_tol
    )
    return LocalTerm(a.n, a.support, a.syndrome, paulis)


def strong_support(code: StabilizerCode, p: PauliString,
                   synd: BitVector | None = None) -> frozenset:
    """Minimal strong support: the Pauli's own support plus every check it
    flips."""
    if synd is None:
        synd = syndrome_of(code, p)
    sup = set(p.support())
    for c in synd.indices():
        sup |= code.checks[c].support()
    return frozenset(sup)


def decompose(op_terms, code: StabilizerCode,
              drop_tol: float = 1e-14) -> QuasiLocalOperator:
    """Group a weighted Pauli sum into (strong support, syndrome) terms.

    ``op_terms`` is an iterable of (coeff, PauliString).  Paulis with equal
    (x, z) are combined first; the resulting decomposition reproduces the
    input exactly (coefficient-level identity).
    """
    combined: dict = {}
    for coeff, p in op_terms:
        if p.n != code.n:
            raise ValueError("operator qubit count differs from code")
        key = (p.x, p.z)
        combined[key] = combined.get(key, 0.0) + coeff * p.sign
    grouped: dict = {}
    for (x, z), coeff in combined.items():
        if abs(coeff) <= drop_tol:
            continue
        p = PauliString(code.n, x, z)
        synd = syndrome_of(code, p)
        sup = strong_support(code, p, synd)
        key = (sup, synd.bits)
        grouped.setdefault(key, []).append((coeff, p))
    terms = tuple(
        LocalTerm(code.n, sup, BitVector(code.num_checks, sbits), tuple(paulis))
        for (sup, sbits), paulis in grouped.items()
    )
    return QuasiLocalOperator(code, terms)


def kappa_norm(op: QuasiLocalOperator, kappa: float) -> float:
    """max_i sum_{S containing i} sum_s ||O_{S,s}|| e^{kappa |S|}.

    Terms with empty support (identity components) never contain a qubit
    and therefore do not contribute.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    per_qubit = np.zeros(op.code.n)
    for t in op.terms:
        if not t.support:
            continue
        w = op.term_norm(t) * np.exp(kappa * len(t.support))
        for q in t.support:
            per_qubit[q] += w
    return float(per_qubit.max()) if op.code.n else 0.0


def checks_inside(code: StabilizerCode, region: frozenset) -> list[int]:
    return [
        i for i, c in enumerate(code.checks) if c.support() <= region
    ]


def _apply_patch_pauli_left(p: PauliString, M: np.ndarray) -> np.ndarray:
    """Q @ M for a patch Pauli Q given as perm+phase, without a matmul."""
    dim = M.shape[0]
    basis = np.arange(dim, dtype=np.int64)
    phase = p.sign * (1j) ** ((p.x & p.z).bit_count() % 4)
    par = np.bitwise_count(basis & np.int64(p.z)) & 1
    phases = phase * (1.0 - 2.0 * par.astype(float))
    out = np.empty_like(M, dtype=complex)
    out[basis ^ np.int64(p.x), :] = phases[:, None] * M
    return out


def local_projectors(code: StabilizerCode, region, space: str = "patch"):
    """(P_S, Q_S): projector onto the joint +1 space of checks inside S.

    ``space="patch"`` returns 2^|S| matrices over the region's qubits in
    sorted order; ``space="full"`` returns 2^n matrices.
    """
    region = frozenset(region)
    inside = checks_inside(code, region)
    if space == "full":
        dim = 1 << code.n
        P = np.eye(dim, dtype=complex)
        for i in inside:
            P = 0.5 * (P + _apply_patch_pauli_left(code.checks[i], P))
        return P, np.eye(dim) - P
    qubits = tuple(sorted(region))
    if len(qubits) > DENSE_PATCH_LIMIT:
        raise PatchTooLargeError(f"projector patch too large: {len(qubits)}")
    dim = 1 << len(qubits)
    P = np.eye(dim, dtype=complex)
    for i in inside:
        c = code.checks[i]
        patch = PauliString(
            len(qubits),
            _compress_bits(c.x, qubits),
            _compress_bits(c.z, qubits),
            c.sign,
        )
        P = 0.5 * (P + _apply_patch_pauli_left(patch, P))
    return P, np.eye(dim) - P


def patch_hamiltonian(code: StabilizerCode, region) -> np.ndarray:
    """H_S = sum over checks inside S of lambda (I - Q)/2, on the patch."""
    region = frozenset(region)
    qubits = tuple(sorted(region))
    if len(qubits) > DENSE_PATCH_LIMIT:
        raise PatchTooLargeError(f"patch too large: {len(qubits)}")
    dim = 1 << len(qubits)
    H = np.zeros((dim, dim), dtype=complex)
    eye = np.eye(dim, dtype=complex)
    for i in checks_inside(code, region):
        c = code.checks[i]
        patch = PauliString(
            len(qubits),
            _compress_bits(c.x, qubits),
            _compress_bits(c.z, qubits),
            c.sign,
        )
        H += code.lambdas[i] * 0.5 * (eye - _apply_patch_pauli_left(patch, eye))
    return H


def _patch_matrix_to_term(M: np.ndarray, template: LocalTerm,
                          drop_tol: float = 1e-13) -> LocalTerm:
    """Re-expand a patch matrix into Paulis lifted back to full indices."""
    qubits = template.patch_qubits
    coeffs = pauli_transform(M, tol=drop_tol)
    paulis = tuple(
        (
            c,
            PauliString(
                template.n,
                _expand_bits(x, qubits),
                _expand_bits(z, qubits),
            ),
        )
        for (x, z), c in coeffs.items()
    )
    return LocalTerm(template.n, template.support, template.syndrome, paulis)


def block_split(term: LocalTerm, code: StabilizerCode):
    """(P_S V P_S + Q_S V Q_S, P_S V Q_S + Q_S V P_S) for one local term.

    Both halves keep the term's support and syndrome; their sum is the
    input and neither operator norm exceeds the input's.
    """
    P, Q = local_projectors(code, term.support)
    V = term.patch_matrix()
    diag = P @ V @ P + Q @ V @ Q
    off = V - diag
    return (
        _patch_matrix_to_term(diag, term),
        _patch_matrix_to_term(off, term),
    )


def commutator_qlo(d: QuasiLocalOperator, a: QuasiLocalOperator,
                   drop_tol: float = 1e-14) -> QuasiLocalOperator:
    """[D, A] with the pairwise term assignment: the commutator of terms
    keyed (S', s') and (S, s) lands in key (S' u S, s' + s)."""
    from .pauli import commutes as _commutes, multiply_phase

    code = d.code
    grouped: dict = {}
    for td in d.terms:
        for ta in a.terms:
            if not (td.support & ta.support) and td.support and ta.support:
                continue  # disjoint supports commute
            sup = td.support | ta.support
            sbits = td.syndrome.bits ^ ta.syndrome.bits
            acc = grouped.setdefault((sup, sbits), {})
            for cd, pd in td.paulis:
                for ca, pa in ta.paulis:
                    if _commutes(pd, pa):
                        continue
                    phase, canon = multiply_phase(pd, pa)
                    key = (canon.x, canon.z)
                    acc[key] = acc.get(key, 0.0) + 2.0 * cd * ca * phase
    terms = []
    for (sup, sbits), acc in grouped.items():
        paulis = tuple(
            (c, PauliString(code.n, x, z)) for (x, z), c in acc.items()
            if abs(c) > drop_tol
        )
        if paulis:
            terms.append(
                LocalTerm(code.n, sup, BitVector(code.num_checks, sbits), paulis)
            )
    return QuasiLocalOperator(code, tuple(terms))


def block_diagonal_part(op: QuasiLocalOperator,
                        keep_offdiag: bool = False):
    """Apply the local block split across all terms of an operator."""
    diags, offs = [], []
    for t in op.terms:
        d, o = block_split(t, op.code)
        if d.paulis:
            diags.append(d)
        if o.paulis:
            offs.append(o)
    pv = QuasiLocalOperator(op.code, tuple(diags))
    if keep_offdiag:
        return pv, QuasiLocalOperator(op.code, tuple(offs))
    return pv
