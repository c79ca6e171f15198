"""Builders for universal and probabilistic cloning machines.

Every machine acts on registers ordered as (input clones, blank copies,
machine ancilla). Basis conventions:

* the designated blank ``|b>`` is blank basis state 0 (all blank qudits in
  level 0) and ``|b_perp>`` is basis state 1 on a single-qubit blank;
* the initial machine state ``|M>`` is ancilla basis state 0;
* named orthonormal ancilla kets are assigned ancilla basis states in the
  order in which they are enumerated (occupation vectors lexicographically
  ascending; robust N -> M ancillas flattened j-major as ``j_index * B + beta``
  with ``B`` the blank dimension).

Each builder writes down the defining equations as (input, output) vector
pairs and completes them to a full unitary with
:func:`blankclone.tensor.complete_isometry`.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from math import prod, sqrt
from typing import Sequence

import numpy as np

from .errors import DegeneratePairError, NotIsometryError, PreconditionError, SizeError
from .symmetric import (
    OccupationVector,
    alpha,
    embed_symmetric,
    enumerate_occupations,
    machine_dim,
    sym_dim,
)
from .tensor import ATOL, StateVector, as_matrix, complete_isometry, kron, unitarity_error

MAX_DIM = 2**12
MAX_DIM_ROBUST = 2**11

VARIANTS = (
    "qubit12-fixed",
    "qubit12-robust",
    "quditNM-fixed",
    "quditNM-robust",
    "prob-fixed",
    "prob-robust",
)
ROBUST_VARIANTS = frozenset(v for v in VARIANTS if v.endswith("robust"))
PROB_VARIANTS = frozenset({"prob-fixed", "prob-robust"})

BASIS_CONVENTIONS = {
    "register_order": "input clones, blank copies, machine ancilla (big-endian)",
    "designated_blank": "blank basis state 0",
    "initial_machine_state": "ancilla basis state 0",
    "occupation_ordering": "lexicographic ascending on counts",
    "robust_ancilla_index": "j_index * blank_dim + beta (j-major)",
    "completion": "Gram-Schmidt over standard basis in index order, residual cutoff 1e-10",
}


@dataclass(frozen=True, eq=False)
class CloningMachine:
    """A cloning unitary together with its register layout and provenance.

    ``layout`` lists one entry per physical register: ``n_clones`` qudit
    registers (the first ``n_inputs`` carry the input, the rest the blank),
    followed by the ancilla. ``domain_spec`` holds the defining
    (input, output) pairs before completion.
    """

    variant: str
    params: dict
    layout: tuple[int, ...]
    n_inputs: int
    unitary: np.ndarray
    domain_spec: tuple[tuple[np.ndarray, np.ndarray], ...] = ()
    success_projector: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown machine variant {self.variant!r}")
        u = as_matrix(self.unitary, copy=True)
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "layout", tuple(int(x) for x in self.layout))
        if u.shape != (self.dim, self.dim):
            raise ValueError(f"unitary shape {u.shape} does not match layout {self.layout}")

    @property
    def dim(self) -> int:
        return prod(self.layout)

    @property
    def n_clones(self) -> int:
        return len(self.layout) - 1

    @property
    def d(self) -> int:
        return self.layout[0]

    @property
    def input_dim(self) -> int:
        return self.d**self.n_inputs

    @property
    def blank_dim(self) -> int:
        return self.d ** (self.n_clones - self.n_inputs)

    @property
    def machine_dim(self) -> int:
        return self.layout[-1]

    @property
    def clone_registers(self) -> list[int]:
        return list(range(self.n_clones))

    @property
    def blank_registers(self) -> list[int]:
        return list(range(self.n_inputs, self.n_clones))

    @property
    def is_robust(self) -> bool:
        return self.variant in ROBUST_VARIANTS

    @property
    def is_probabilistic(self) -> bool:
        return self.variant in PROB_VARIANTS

    def validate(self, atol: float = ATOL, domain_atol: float = 1e-12) -> None:
        """Check unitarity and that each defining pair is reproduced."""
        err = unitarity_error(self.unitary)
        if err > atol:
            raise ValueError(f"{self.variant}: U^dagger U deviates from I by {err:.3e}")
        for k, (vin, vout) in enumerate(self.domain_spec):
            dev = np.max(np.abs(self.unitary @ vin - vout))
            if dev > domain_atol:
                raise ValueError(f"{self.variant}: defining equation {k} violated by {dev:.3e}")


def _check_size(total: int, cap: int) -> None:
    if total > cap:
        raise SizeError(total, cap, "total Hilbert-space dimension")


def orthonormalize_domain(pairs, atol: float = ATOL):
    """Re-express a linear map given on independent vectors on an orthonormal basis.

    Args:
        pairs: sequence of (input, output) vectors defining the map by
            linearity.
        atol: maximum tolerated mismatch between input and output Gram
            matrices.

    Returns:
        A list of (input, output) array pairs with orthonormal inputs that
        define the same map on the span. Orthonormal inputs come back
        unchanged.

    Raises:
        NotIsometryError: if the map does not preserve inner products.
        PreconditionError: if the inputs are linearly dependent.
    """
    a = np.stack([as_matrix(p[0]).reshape(-1) for p in pairs], axis=1)
    b = np.stack([as_matrix(p[1]).reshape(-1) for p in pairs], axis=1)
    ga, gb = a.conj().T @ a, b.conj().T @ b
    dev = np.abs(ga - gb)
    worst = float(dev.max())
    if worst > atol:
        i, j = np.unravel_index(np.argmax(dev), dev.shape)
        raise NotIsometryError(worst, (int(i), int(j)))
    if np.max(np.abs(ga - np.eye(ga.shape[0]))) <= 1e-14:
        return [(a[:, k], b[:, k]) for k in range(a.shape[1])]
    try:
        chol = np.linalg.cholesky(ga)
    except np.linalg.LinAlgError:
        raise PreconditionError("defining input vectors are linearly dependent") from None
    # A @ inv(L^dagger) has orthonormal columns since (A^dagger A) = L L^dagger
    t = np.linalg.inv(chol.conj().T)
    a2, b2 = a @ t, b @ t
    return [(a2[:, k], b2[:, k]) for k in range(a.shape[1])]


def _finish(variant, params, layout, n_inputs, pairs, *, projector=None, metadata=None):
    dim = prod(layout)
    ortho = orthonormalize_domain(pairs)
    u = complete_isometry([o for _, o in ortho], domain=[i for i, _ in ortho], dim=dim)
    machine = CloningMachine(
        variant=variant,
        params=params,
        layout=tuple(layout),
        n_inputs=n_inputs,
        unitary=u,
        domain_spec=tuple((np.asarray(i), np.asarray(o)) for i, o in pairs),
        success_projector=projector,
        metadata={"basis_conventions": dict(BASIS_CONVENTIONS), **(metadata or {})},
    )
    machine.validate()
    return machine


def _basis(index: int, dim: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[index] = 1.0
    return e


_K0, _K1 = _basis(0, 2), _basis(1, 2)
_SYM01 = (kron(_K0, _K1) + kron(_K1, _K0))


def _qubit12_block(blank: int, m_same: int, m_flip: int, machine: int):
    """The two 1 -> 2 equations for one blank basis state.

    ``|0>|blank>|M> -> sqrt(2/3)|00>|m_same> + sqrt(1/6)(|01>+|10>)|m_flip>``
    and the mirror image for input ``|1>``.
    """
    e_m = lambda k: _basis(k, machine)  # noqa: E731
    b = _basis(blank, 2)
    m0 = _basis(0, machine)
    a, c = sqrt(2 / 3), sqrt(1 / 6)
    return [
        (kron(_K0, b, m0), a * kron(_K0, _K0, e_m(m_same)) + c * kron(_SYM01, e_m(m_flip))),
        (kron(_K1, b, m0), a * kron(_K1, _K1, e_m(m_flip)) + c * kron(_SYM01, e_m(m_same))),
    ]


def build_qubit12_fixed() -> CloningMachine:
    """Optimal universal 1 -> 2 qubit cloner for the designated blank.

    The ancilla is a qubit with ``|m> = |0>`` and ``|m_perp> = |1>``.
    """
    pairs = _qubit12_block(blank=0, m_same=0, m_flip=1, machine=2)
    return _finish("qubit12-fixed", {"N": 1, "M": 2, "d": 2}, (2, 2, 2), 1, pairs)


def build_qubit12_robust() -> CloningMachine:
    """1 -> 2 qubit cloner that works for any blank, with a 4-level ancilla.

    Blank ``|b>`` writes ancilla states M0/M1, blank ``|b_perp>`` writes M2/M3.
    """
    pairs = _qubit12_block(0, 0, 1, 4) + _qubit12_block(1, 2, 3, 4)
    return _finish("qubit12-robust", {"N": 1, "M": 2, "d": 2}, (2, 2, 4), 1, pairs)


def _nm_pairs(N: int, M: int, d: int, blank_states: int):
    js = enumerate_occupations(M - N, d)
    anc = len(js) * blank_states
    blank_dim = d ** (M - N)
    m0 = _basis(0, anc)
    pairs = []
    for beta in range(blank_states):
        blank = _basis(beta, blank_dim)
        for n in enumerate_occupations(N, d):
            vin = kron(embed_symmetric(n).amplitudes, blank, m0)
            vout = np.zeros(d**M * anc, dtype=complex)
            for jdx, j in enumerate(js):
                vout += alpha(n, j, N, M, d) * kron(
                    embed_symmetric(n + j).amplitudes, _basis(jdx * blank_states + beta, anc)
                )
            pairs.append((vin, vout))
    return pairs, anc


def _nm_check(N: int, M: int, d: int) -> None:
    if not 1 <= N < M:
        raise ValueError(f"need M > N >= 1, got N={N}, M={M}")
    if d < 2:
        raise ValueError(f"local dimension must be >= 2, got {d}")


def build_quditNM_fixed(N: int, M: int, d: int, max_dim: int = MAX_DIM) -> CloningMachine:
    """Universal N -> M qudit cloner with a fixed all-zero blank.

    The unitary is defined by its action on the symmetric subspace of the
    input register; the rest of the input space is filled by completion only.
    """
    _nm_check(N, M, d)
    D = machine_dim(N, M, d)
    _check_size(d**M * D, max_dim)
    pairs, anc = _nm_pairs(N, M, d, 1)
    return _finish(
        "quditNM-fixed",
        {"N": N, "M": M, "d": d, "D": D, "s": sym_dim(N, d)},
        (d,) * M + (anc,),
        N,
        pairs,
    )


def build_quditNM_robust(N: int, M: int, d: int, max_dim: int = MAX_DIM_ROBUST) -> CloningMachine:
    """Universal N -> M qudit cloner accepting any (possibly entangled) blank.

    The ancilla has dimension ``D * d**(M-N)``: one copy of the fixed-blank
    ancilla basis per blank basis state.
    """
    _nm_check(N, M, d)
    D = machine_dim(N, M, d)
    blanks = d ** (M - N)
    _check_size(d**M * D * blanks, max_dim)
    pairs, anc = _nm_pairs(N, M, d, blanks)
    return _finish(
        "quditNM-robust",
        {"N": N, "M": M, "d": d, "D": D, "s": sym_dim(N, d)},
        (d,) * M + (anc,),
        N,
        pairs,
    )


def _vector(psi) -> np.ndarray:
    return psi.amplitudes if isinstance(psi, StateVector) else StateVector(psi).amplitudes


def prepare_pair(psi0, psi1, atol: float = ATOL):
    """Normalize a candidate pair and rotate psi1 so <psi0|psi1> is real, >= 0.

    Returns ``(psi0, psi1_adjusted, overlap, phase)`` where ``psi1_adjusted =
    exp(-i phase) * psi1``.
    """
    v0, v1 = _vector(psi0), _vector(psi1)
    if v0.shape != (2,) or v1.shape != (2,):
        raise ValueError("probabilistic cloners take qubit candidate states")
    ov = complex(np.vdot(v0, v1))
    s = abs(ov)
    if s > 1 - atol:
        raise DegeneratePairError(f"candidate states are parallel (|<psi0|psi1>| = {s!r})")
    phase = cmath.phase(ov) if s > 0 else 0.0
    v1 = v1 * cmath.exp(-1j * phase)
    return v0, v1, s, phase


def success_probability_formula(overlap: float) -> float:
    return 1.0 / (1.0 + overlap)


def _prob_params(v0, v1, s, phase, gamma):
    return {
        "psi0": v0.tolist(),
        "psi1": v1.tolist(),
        "overlap": s,
        "gamma": gamma,
    }, {"phase_adjustment": phase}


def build_prob_fixed(psi0, psi1) -> CloningMachine:
    """Probabilistic exact 1 -> 2 cloner of two non-orthogonal qubits.

    Success is flagged by the ancilla in ``|m> = |0>``; the failure branch is
    ``|Phi> = |00>|1>``. The success probability is ``1/(1 + |<psi0|psi1>|)``.
    """
    v0, v1, s, phase = prepare_pair(psi0, psi1)
    gamma = success_probability_formula(s)
    e = lambda k: _basis(k, 2)  # noqa: E731
    phi = kron(_K0, _K0, e(1))
    pairs = [
        (kron(v, e(0), e(0)), sqrt(gamma) * kron(v, v, e(0)) + sqrt(1 - gamma) * phi)
        for v in (v0, v1)
    ]
    projector = kron(np.eye(4), np.outer(e(0), e(0)))
    params, meta = _prob_params(v0, v1, s, phase, gamma)
    return _finish("prob-fixed", params, (2, 2, 2), 1, pairs, projector=projector, metadata=meta)


def build_prob_robust(psi0, psi1) -> CloningMachine:
    """Probabilistic exact cloner that keeps its efficiency for any blank.

    Ancilla states: M0, M1 flag success for blanks ``|b>``, ``|b_perp>``;
    the failure branches are ``|Phi> = |00>|M2>`` and ``|Phi'> = |00>|M3>``.
    """
    v0, v1, s, phase = prepare_pair(psi0, psi1)
    gamma = success_probability_formula(s)
    e = lambda k: _basis(k, 4)  # noqa: E731
    pairs = []
    for beta in (0, 1):
        fail = kron(_K0, _K0, e(2 + beta))
        for v in (v0, v1):
            vin = kron(v, _basis(beta, 2), e(0))
            pairs.append((vin, sqrt(gamma) * kron(v, v, e(beta)) + sqrt(1 - gamma) * fail))
    projector = kron(np.eye(4), np.diag([1, 1, 0, 0]).astype(complex))
    params, meta = _prob_params(v0, v1, s, phase, gamma)
    return _finish("prob-robust", params, (2, 2, 4), 1, pairs, projector=projector, metadata=meta)


def build(variant: str, **params) -> CloningMachine:
    """Dispatch to the builder of ``variant`` with keyword parameters."""
    if variant == "qubit12-fixed":
        return build_qubit12_fixed()
    if variant == "qubit12-robust":
        return build_qubit12_robust()
    if variant == "quditNM-fixed":
        return build_quditNM_fixed(params["N"], params["M"], params["d"])
    if variant == "quditNM-robust":
        return build_quditNM_robust(params["N"], params["M"], params["d"])
    if variant == "prob-fixed":
        return build_prob_fixed(params["psi0"], params["psi1"])
    if variant == "prob-robust":
        return build_prob_robust(params["psi0"], params["psi1"])
    raise ValueError(f"unknown machine variant {variant!r}")


def counterpart(machine: CloningMachine) -> CloningMachine:
    """The fixed-blank machine for a robust one, and vice versa."""
    base, kind = machine.variant.rsplit("-", 1)
    other = f"{base}-{'fixed' if kind == 'robust' else 'robust'}"
    return build(other, **machine.params)


def conditional_machine_states(
    machine: CloningMachine, n: OccupationVector, blank: Sequence[complex] | StateVector
) -> np.ndarray:
    """Ancilla states X_j conditioned on each output ket |n+j>, as columns.

    Computed from the unitary itself: the output for ``|n>|blank>|M>`` is
    projected onto ``<n+j|`` on the clone registers and divided by alpha.
    Only meaningful for the N -> M and 1 -> 2 universal variants.
    """
    N, M, d = machine.params["N"], machine.params["M"], machine.params["d"]
    blank = _vector(blank) if not isinstance(blank, StateVector) else blank.amplitudes
    vin = kron(embed_symmetric(n).amplitudes, blank, _basis(0, machine.machine_dim))
    out = (machine.unitary @ vin).reshape(d**M, machine.machine_dim)
    cols = []
    for j in enumerate_occupations(M - N, d):
        ket = embed_symmetric(n + j).amplitudes
        cols.append((ket.conj() @ out) / alpha(n, j, N, M, d))
    return np.stack(cols, axis=1)
