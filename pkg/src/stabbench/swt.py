"""Iterated Schrieffer-Wolff machinery on exactly materialized Hamiltonians.

Each order solves [H0, A] + V = PV term-by-term on local patches (the
strong-support structure makes the patch solution exact globally), rotates
the full Hamiltonian by the matrix exponential, re-expands the remainder
over Paulis, and routes wide-support terms into an untracked garbage
matrix.  Spectral verification (ground clusters, gaps, splittings, Weyl
stability, projector distances) runs dense to n = 12 and via Lanczos
matvecs beyond.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .code import StabilizerCode, graph_distance, num_logical_qubits, validate
from .flow import kappa_m
from .gf2 import BitMatrix, BitVector, solve_affine
from .matrices import (
    code_hamiltonian_dense,
    code_hamiltonian_terms,
    codespace_projector_dense,
    lowest_eigenvalues_sparse,
    operator_dense,
    pauli_transform,
)
from .pauli import PauliString
from .quasilocal import (
    QuasiLocalOperator,
    _patch_matrix_to_term,
    block_split,
    decompose,
    kappa_norm,
    local_projectors,
    patch_hamiltonian,
)


class GeneratorConsistencyError(RuntimeError):
    """A zero-syndrome term produced a nonzero off-diagonal block."""


def solve_generator(code: StabilizerCode, v: QuasiLocalOperator,
                    tol: float = 1e-10) -> QuasiLocalOperator:
    """Anti-Hermitian generator solving [H0, A] + V = PV term by term.

    Per term: A_{S,s} = P_S V Q_S H_S^+ - H_S^+ Q_S V P_S on the patch,
    with H_S^+ the pseudo-inverse of the patch Hamiltonian (kernel = local
    codespace).  Terms with empty syndrome contribute nothing; a nonzero
    off-diagonal block there would contradict the decomposition invariant.
    """
    out_terms = []
    for t in v.terms:
        P, Q = local_projectors(code, t.support)
        V = t.patch_matrix()
        if t.syndrome.is_zero():
            off = P @ V @ Q
            if np.linalg.norm(off) > tol * max(np.linalg.norm(V), 1.0):
                raise GeneratorConsistencyError(
                    f"zero-syndrome term on {sorted(t.support)} has an "
                    "off-diagonal block"
                )
            continue
        H = patch_hamiltonian(code, t.support)
        Hpinv = np.linalg.pinv(H, rcond=1e-12, hermitian=True)
        A = P @ V @ Q @ Hpinv - Hpinv @ Q @ V @ P
        term = _patch_matrix_to_term(A, t)
        if term.paulis:
            out_terms.append(term)
    return QuasiLocalOperator(code, tuple(out_terms))


def _expm_antihermitian(A: np.ndarray) -> np.ndarray:
    M = -1j * A  # Hermitian
    vals, vecs = np.linalg.eigh(0.5 * (M + M.conj().T))
    return (vecs * np.exp(1j * vals)) @ vecs.conj().T


@dataclass
class StepResult:
    d_next: QuasiLocalOperator
    v_next: QuasiLocalOperator
    e_next: np.ndarray
    generator: QuasiLocalOperator
    unitary: np.ndarray
    conjugation_residual: float


class SwtEngine:
    """Runs exact SWT orders for one code at dense-tractable size."""

    def __init__(self, code: StabilizerCode, d_s: int | None = None,
                 kappa1: float = 1.0, prune_tol: float = 1e-13):
        if code.n > 12:
            raise ValueError("dense engine is limited to n <= 12")
        self.code = code
        self.d_s = d_s if d_s is not None else code.n + 1
        self.kappa1 = kappa1
        self.prune_tol = prune_tol
        self.h0 = code_hamiltonian_dense(code)

    def split_input(self, v_terms):
        """Initial (V_1, E_1): wide-support terms go straight to garbage."""
        qlo = v_terms if isinstance(v_terms, QuasiLocalOperator) else decompose(
            v_terms, self.code
        )
        small, big = [], []
        for t in qlo.terms:
            (small if len(t.support) < self.d_s else big).append(t)
        v1 = QuasiLocalOperator(self.code, tuple(small))
        e1 = operator_dense(self.code.n, QuasiLocalOperator(
            self.code, tuple(big)).pauli_items()) if big else np.zeros_like(self.h0)
        return v1, e1

    def step(self, d_m: QuasiLocalOperator, v_m: QuasiLocalOperator,
             e_m: np.ndarray) -> StepResult:
        code = self.code
        a_m = solve_generator(code, v_m)
        pv = _block_diag_qlo(v_m)
        d_next = d_m.add(pv)
        a_dense = a_m.to_dense()
        U = _expm_antihermitian(a_dense)
        tracked = self.h0 + d_m.to_dense() + v_m.to_dense()
        conj_tracked = U.conj().T @ tracked @ U
        remainder = conj_tracked - self.h0 - d_next.to_dense()
        coeffs = pauli_transform(remainder, tol=self.prune_tol)
        small_terms = []
        term_items = [
            (c, PauliString(code.n, x, z)) for (x, z), c in coeffs.items()
        ]
        rdec = decompose(term_items, code)
        for t in rdec.terms:
            if len(t.support) < self.d_s:
                small_terms.append(t)
        v_next = QuasiLocalOperator(code, tuple(small_terms))
        # Garbage absorbs everything not tracked as a small term, including
        # re-expansion dust, so the conjugation identity is exact.
        e_next = (U.conj().T @ e_m @ U) + (remainder - v_next.to_dense())
        total_next = self.h0 + d_next.to_dense() + v_next.to_dense() + e_next
        residual = float(
            np.linalg.norm(U.conj().T @ (tracked + e_m) @ U - total_next, 2)
        )
        return StepResult(d_next, v_next, e_next, a_m, U, residual)


def _block_diag_qlo(v: QuasiLocalOperator) -> QuasiLocalOperator:
    terms = []
    for t in v.terms:
        d, _ = block_split(t, v.code)
        if d.paulis:
            terms.append(d)
    return QuasiLocalOperator(v.code, tuple(terms))


def _block_offdiag_qlo(v: QuasiLocalOperator) -> QuasiLocalOperator:
    terms = []
    for t in v.terms:
        _, o = block_split(t, v.code)
        if o.paulis:
            terms.append(o)
    return QuasiLocalOperator(v.code, tuple(terms))


@dataclass
class SWTRunResult:
    orders: int
    v_norms: list          # v_m at kappa_m
    v_tilde_norms: list    # off-diagonal norms at kappa_m
    generator_norms: list  # ||A_m|| at kappa_m
    schedule_sup: float    # max_m 2^m ||A_m||_{kappa1/2}
    conjugation_residuals: list
    d_final: QuasiLocalOperator
    v_final: QuasiLocalOperator
    e_final: np.ndarray
    generators: list
    unitary: np.ndarray
    diverging: bool

    def unitarity_defect(self) -> float:
        dim = self.unitary.shape[0]
        return float(
            np.linalg.norm(self.unitary.conj().T @ self.unitary - np.eye(dim), 2)
        )


def swt_run(code: StabilizerCode, v_terms, m_target: int,
            d_s: int | None = None, kappa1: float = 1.0) -> SWTRunResult:
    """Iterate SWT steps to order m_target, assembling U = e^{A_1} ... .

    Per order records the kappa_m-norms of V_m and its off-diagonal part,
    the generator norms, and the sup over the piecewise generator schedule
    A(t) = 2^m A_m measured at kappa_1/2.  Divergence (three consecutive
    growing v_m) is flagged, not fatal.
    """
    engine = SwtEngine(code, d_s=d_s, kappa1=kappa1)
    v_m, e_m = engine.split_input(v_terms)
    d_m = QuasiLocalOperator(code, ())
    dim = 1 << code.n
    U = np.eye(dim, dtype=complex)
    v_norms, vt_norms, a_norms, residuals, gens = [], [], [], [], []
    schedule_sup = 0.0
    for m in range(1, m_target + 1):
        km = kappa_m(kappa1, m)
        v_norms.append(kappa_norm(v_m, km))
        vt_norms.append(kappa_norm(_block_offdiag_qlo(v_m), km))
        if m == m_target:
            break
        res = engine.step(d_m, v_m, e_m)
        gens.append(res.generator)
        a_norms.append(kappa_norm(res.generator, km))
        schedule_sup = max(
            schedule_sup,
            2.0 ** m * kappa_norm(res.generator, kappa1 / 2.0),
        )
        residuals.append(res.conjugation_residual)
        U = U @ res.unitary
        d_m, v_m, e_m = res.d_next, res.v_next, res.e_next
    diverging = any(
        v_norms[i] < v_norms[i + 1] < v_norms[i + 2]
        for i in range(len(v_norms) - 2)
    )
    return SWTRunResult(
        orders=m_target,
        v_norms=v_norms,
        v_tilde_norms=vt_norms,
        generator_norms=a_norms,
        schedule_sup=schedule_sup,
        conjugation_residuals=residuals,
        d_final=d_m,
        v_final=v_m,
        e_final=e_m,
        generators=gens,
        unitary=U,
        diverging=diverging,
    )


@dataclass
class SpectralReport:
    epsilon: float
    eigenvalues: np.ndarray
    k: int
    cluster_size: int
    splitting: float            # spread of the detected ground cluster
    gap: float                  # detected cluster to the next level
    splitting_2k: float         # spread of the lowest 2^k states
    gap_after_2k: float
    well_separated: bool        # cluster gap >= 10x intra-cluster spread
    mode: str
    projector_distance: float | None = None
    weyl_margin: float | None = None

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "k": self.k,
            "cluster_size": self.cluster_size,
            "splitting": self.splitting,
            "gap": self.gap,
            "splitting_2k": self.splitting_2k,
            "gap_after_2k": self.gap_after_2k,
            "well_separated": self.well_separated,
            "mode": self.mode,
            "projector_distance": self.projector_distance,
            "weyl_margin": self.weyl_margin,
        }


def identify_ground_cluster(vals: np.ndarray, k: int) -> int:
    """Cluster size = position of the largest gap within the lowest 2^k+1
    levels."""
    limit = min(2 ** k, len(vals) - 1)
    gaps = [vals[c] - vals[c - 1] for c in range(1, limit + 1)]
    return int(np.argmax(gaps)) + 1 if gaps else 1


def spectral_report(
    code: StabilizerCode,
    v_terms,
    epsilon: float,
    num_eigs: int | None = None,
    mode: str = "dense",
    k: int | None = None,
    seed: int = 7,
    swt_result: SWTRunResult | None = None,
    weyl_check: bool = False,
) -> SpectralReport:
    """Low-lying spectrum of H0 + eps * V with ground-cluster statistics.

    Dense mode (n <= 12) diagonalizes fully; sparse mode (n <= 20) runs a
    seeded Lanczos for the extremal eigenvalues.  When an SWT run is
    supplied the distance between the perturbed ground projector and the
    rotated unperturbed one is reported as well.
    """
    if k is None:
        k = num_logical_qubits(code)
    if num_eigs is None:
        num_eigs = 2 ** k + 4
    v_list = list(v_terms)
    if mode == "dense":
        if code.n > 12:
            raise ValueError("dense mode is limited to n <= 12")
        H0 = code_hamiltonian_dense(code)
        H = H0 + epsilon * operator_dense(code.n, v_list)
        vals, vecs = np.linalg.eigh(0.5 * (H + H.conj().T))
    elif mode == "sparse":
        if code.n > 20:
            raise ValueError("sparse mode is limited to n <= 20")
        terms = code_hamiltonian_terms(code) + [
            (epsilon * c, p) for c, p in v_list
        ]
        vals = lowest_eigenvalues_sparse(code.n, terms, k=num_eigs, seed=seed)
        vecs = None
    else:
        raise ValueError(f"unknown mode {mode!r}")
    low = np.sort(vals)[: max(num_eigs, 2 ** k + 1)]
    csize = identify_ground_cluster(low, k)
    splitting = float(low[csize - 1] - low[0])
    gap = float(low[csize] - low[csize - 1]) if csize < len(low) else float("nan")
    splitting_2k = float(low[2 ** k - 1] - low[0]) if len(low) >= 2 ** k else float("nan")
    gap_after_2k = (
        float(low[2 ** k] - low[2 ** k - 1]) if len(low) > 2 ** k else float("nan")
    )
    well_sep = gap >= 10.0 * max(splitting, 1e-300)
    proj_dist = None
    if swt_result is not None and vecs is not None:
        ground = vecs[:, : 2 ** k]
        p_new = ground @ ground.conj().T
        P = codespace_projector_dense(code)
        U = swt_result.unitary
        proj_dist = float(np.linalg.norm(p_new - U @ P @ U.conj().T, 2))
    weyl_margin = None
    if weyl_check and mode == "dense":
        vals0 = np.linalg.eigvalsh(code_hamiltonian_dense(code))
        vnorm = float(np.linalg.norm(operator_dense(code.n, v_list), 2))
        weyl_margin = float(
            epsilon * vnorm - np.max(np.abs(np.sort(vals) - np.sort(vals0)))
        )
    return SpectralReport(
        epsilon=epsilon,
        eigenvalues=low,
        k=k,
        cluster_size=csize,
        splitting=splitting,
        gap=gap,
        splitting_2k=splitting_2k,
        gap_after_2k=gap_after_2k,
        well_separated=well_sep,
        mode=mode,
        projector_distance=proj_dist,
        weyl_margin=weyl_margin,
    )


@dataclass
class LtoReport:
    holds: bool
    counterexample: PauliString | None
    region: frozenset
    candidates_checked: int
    exhaustive: bool


def local_indistinguishability_check(
    code: StabilizerCode,
    s,
    r: int,
    region=None,
    max_enumeration: int = 4096,
    samples: int = 512,
    seed: int = 0,
) -> LtoReport:
    """Test whether every operator supported in S is locally trivial on the
    enlarged region (the r-neighborhood of S unless given explicitly).

    Works symbolically: a Pauli in S that anticommutes with a check inside
    the region is compressed to zero by the local projector, so the only
    candidates are Paulis commuting with all inside checks; such a Pauli
    acts as a scalar on the local ground space iff (up to sign) it is a
    product of inside checks, a pure GF(2) membership question.  Returns
    the first counterexample otherwise.
    """
    S = frozenset(s)
    if region is None:
        metrics = validate(code)
        dist = graph_distance(metrics, S)
        region = frozenset(q for q, d in dist.items() if d <= r)
    else:
        region = frozenset(region)
    if not S <= region:
        raise ValueError("region must contain S")
    inside = [
        i for i, c in enumerate(code.checks) if c.support() <= region
    ]
    squbits = tuple(sorted(S))
    ns = len(squbits)
    # Unknown Pauli on S: bits (x_0..x_{ns-1}, z_0..z_{ns-1}).  Commutation
    # with check c needs even overlap of x with c.z and z with c.x.
    rows = []
    for i in inside:
        c = code.checks[i]
        row = 0
        for j, q in enumerate(squbits):
            if (c.z >> q) & 1:
                row |= 1 << j
            if (c.x >> q) & 1:
                row |= 1 << (ns + j)
        rows.append(BitVector(2 * ns, row))
    from .gf2 import nullspace

    cand_basis = nullspace(BitMatrix.from_rows(rows, 2 * ns)) if rows else [
        BitVector(2 * ns, 1 << j) for j in range(2 * ns)
    ]
    dim = len(cand_basis)
    inside_sym = BitMatrix.from_rows(
        [
            BitVector(2 * code.n, code.checks[i].x | (code.checks[i].z << code.n))
            for i in inside
        ],
        2 * code.n,
    )

    def lift(bits: int) -> PauliString:
        x = z = 0
        for j, q in enumerate(squbits):
            if (bits >> j) & 1:
                x |= 1 << q
            if (bits >> (ns + j)) & 1:
                z |= 1 << q
        return PauliString(code.n, x, z)

    exhaustive = (1 << dim) <= max_enumeration
    if exhaustive:
        combos = range(1, 1 << dim)
    else:
        rng = np.random.default_rng(seed)
        combos = (int(rng.integers(1, 1 << dim)) for _ in range(samples))
    checked = 0
    for combo in combos:
        bits = 0
        for j in range(dim):
            if (combo >> j) & 1:
                bits ^= cand_basis[j].bits
        if bits == 0:
            continue
        checked += 1
        p = lift(bits)
        vec = BitVector(2 * code.n, p.x | (p.z << code.n))
        if solve_affine(inside_sym, vec) is None:
            return LtoReport(False, p, region, checked, exhaustive)
    return LtoReport(True, None, region, checked, exhaustive)


def operator_locally_trivial(code: StabilizerCode, p: PauliString,
                             region) -> bool:
    """Whether a single Pauli acts as a scalar on the joint +1 space of the
    checks contained in ``region``: it either anticommutes with one of them
    or is (up to sign) a product of them."""
    region = frozenset(region)
    inside = [i for i, c in enumerate(code.checks) if c.support() <= region]
    from .pauli import commutes

    for i in inside:
        if not commutes(code.checks[i], p):
            return True
    inside_sym = BitMatrix.from_rows(
        [
            BitVector(2 * code.n, code.checks[i].x | (code.checks[i].z << code.n))
            for i in inside
        ],
        2 * code.n,
    )
    vec = BitVector(2 * code.n, p.x | (p.z << code.n))
    return solve_affine(inside_sym, vec) is not None


def relative_bound_estimate(code: StabilizerCode, d_matrix: np.ndarray,
                            tol: float = 1e-9):
    """Smallest c with (D - c_D)^2 <= c^2 H0^2 away from the H0 kernel.

    c_D is the codespace expectation of D; when D is not block diagonal
    within tolerance the offset is still the least-squares choice but a
    warning flag is set.  The optimal c comes from a generalized
    eigenproblem restricted to the excited eigenbasis of H0.
    """
    H0 = code_hamiltonian_dense(code)
    P = codespace_projector_dense(code)
    tr = float(np.trace(P).real)
    c_d = float((np.trace(P @ d_matrix) / tr).real)
    off = P @ d_matrix @ (np.eye(d_matrix.shape[0]) - P)
    block_ok = np.linalg.norm(off, 2) <= tol * max(np.linalg.norm(d_matrix, 2), 1.0)
    vals, vecs = np.linalg.eigh(0.5 * (H0 + H0.conj().T))
    sel = vals > 1e-9
    B = vecs[:, sel]
    Dt = d_matrix - c_d * np.eye(d_matrix.shape[0])
    G1 = B.conj().T @ Dt.conj().T @ Dt @ B
    G2 = np.diag(vals[sel] ** 2)
    gen = scipy.linalg.eigh(
        0.5 * (G1 + G1.conj().T), G2, eigvals_only=True
    )
    c = float(np.sqrt(max(0.0, float(gen[-1]))))
    return c, c_d, block_ok
