"""Running cloning machines on pure, mixed and noisy blanks."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import BlankMismatchError, UnsupportedVariantError
from .machines import CloningMachine
from .sampling import SeedLike, haar_random_state, random_density, random_rank2_state, rng_from
from .symmetric import OccupationVector, embed_symmetric, symmetric_projector
from .tensor import (
    ATOL,
    DensityMatrix,
    StateVector,
    as_matrix,
    bloch_vector,
    fidelity,
    fidelity_pure,
    kron,
    partial_trace,
    trace_distance,
)

COMPLETION_NOTE = "blank outside the defining domain: result depends on the unitary completion"


# ---------------------------------------------------------------- noise


def _weyl_operators(d: int) -> list[np.ndarray]:
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return [
        np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
        for a in range(d)
        for b in range(d)
    ]


@dataclass(frozen=True, eq=False)
class NoiseChannel:
    """A trace-preserving channel given by Kraus operators.

    Use the ``depolarizing``, ``dephasing`` and ``amplitude_damping``
    constructors; each takes a strength ``p`` in [0, 1].
    """

    kind: str
    strength: float
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError(f"channel strength must be in [0, 1], got {self.strength}")
        ks = tuple(as_matrix(k) for k in self.kraus)
        dim = ks[0].shape[0]
        total = sum(k.conj().T @ k for k in ks)
        if np.max(np.abs(total - np.eye(dim))) > ATOL:
            raise ValueError(f"{self.kind} Kraus operators are not trace preserving")
        object.__setattr__(self, "kraus", ks)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    @classmethod
    def depolarizing(cls, p: float, d: int = 2) -> "NoiseChannel":
        """rho -> (1 - p) rho + p I/d, via the d^2 Weyl operators."""
        ws = _weyl_operators(d)
        ks = [np.sqrt(1 - p + p / d**2) * ws[0]] + [np.sqrt(p) / d * w for w in ws[1:]]
        return cls("depolarizing", p, tuple(ks))

    @classmethod
    def dephasing(cls, p: float, d: int = 2) -> "NoiseChannel":
        """rho -> (1 - p) rho + p diag(rho)."""
        ks = [np.sqrt(1 - p) * np.eye(d)]
        for k in range(d):
            e = np.zeros((d, d))
            e[k, k] = np.sqrt(p)
            ks.append(e)
        return cls("dephasing", p, tuple(ks))

    @classmethod
    def amplitude_damping(cls, p: float, d: int = 2) -> "NoiseChannel":
        if d != 2:
            raise ValueError("amplitude damping is defined for qubits only")
        k0 = np.array([[1, 0], [0, np.sqrt(1 - p)]])
        k1 = np.array([[0, np.sqrt(p)], [0, 0]])
        return cls("amplitude-damping", p, (k0, k1))

    @classmethod
    def from_name(cls, kind: str, p: float, d: int = 2) -> "NoiseChannel":
        makers = {
            "depolarizing": cls.depolarizing,
            "dephasing": cls.dephasing,
            "amplitude-damping": cls.amplitude_damping,
            "amplitude_damping": cls.amplitude_damping,
        }
        if kind not in makers:
            raise ValueError(f"unknown channel {kind!r}; choose from {sorted(makers)}")
        return makers[kind](p, d)


def _apply_kraus(m: np.ndarray, kraus) -> np.ndarray:
    return sum(k @ m @ k.conj().T for k in kraus)


def apply_noise(blank: DensityMatrix | StateVector, channel: NoiseChannel) -> DensityMatrix:
    """Apply ``channel`` to a blank state.

    If the channel dimension equals the full blank dimension it acts on the
    whole register; if it equals every register dimension of the layout it
    acts independently on each qudit.
    """
    if isinstance(blank, StateVector):
        blank = blank.density()
    if channel.dim == blank.dim:
        kraus = channel.kraus
    elif all(x == channel.dim for x in blank.layout):
        kraus = channel.kraus
        for _ in blank.layout[1:]:
            kraus = [np.kron(a, b) for a in kraus for b in channel.kraus]
    else:
        raise ValueError(f"channel of dimension {channel.dim} cannot act on layout {blank.layout}")
    m = _apply_kraus(blank.matrix, kraus)
    return DensityMatrix((m + m.conj().T) / 2, blank.layout)


# ---------------------------------------------------------------- reports


@dataclass
class CloneReport:
    machine_variant: str
    input_descriptor: dict
    blank_descriptor: dict
    per_clone_states: list[DensityMatrix]
    per_clone_fidelity: list[float]
    shrink_factor: float | None = None
    success_probability: float | None = None
    blank_invariance_distance: float | None = None
    joint_fidelity: float | None = None
    seed: int | None = None
    notes: list[str] = field(default_factory=list)

    def max_pairwise_distance(self) -> float:
        s = self.per_clone_states
        return max((trace_distance(a, b) for a in s for b in s), default=0.0)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["per_clone_states"] = [
            [[[z.real, z.imag] for z in row] for row in rho.matrix.tolist()]
            for rho in self.per_clone_states
        ]
        return out


def _input_vector(machine: CloningMachine, inp):
    """Full input-register vector, single-system reference state, descriptor, notes."""
    d, N = machine.d, machine.n_inputs
    notes = []
    if isinstance(inp, OccupationVector):
        if inp.d != d or inp.total != N:
            raise ValueError(f"occupation {inp} does not fit {N} qudits of dimension {d}")
        vec = embed_symmetric(inp)
        return vec.amplitudes, partial_trace(vec, [0]), {"occupation": list(inp.counts)}, notes
    if not isinstance(inp, StateVector):
        inp = StateVector(inp)
    if inp.dim == d:
        vec = inp.amplitudes
        for _ in range(N - 1):
            vec = np.kron(vec, inp.amplitudes)
        return vec, inp, {"state": _complex_list(inp.amplitudes), "copies": N}, notes
    if inp.dim == d**N:
        sym = symmetric_projector(N, d) @ inp.amplitudes
        if np.linalg.norm(sym - inp.amplitudes) > ATOL:
            notes.append("input outside the symmetric subspace: unsupported, completion-dependent")
        full = StateVector(inp.amplitudes, (d,) * N)
        return full.amplitudes, partial_trace(full, [0]), {"state": _complex_list(inp.amplitudes)}, notes
    raise ValueError(f"input of dimension {inp.dim} does not fit {N} qudits of dimension {d}")


def _complex_list(v) -> list[list[float]]:
    return [[complex(z).real, complex(z).imag] for z in np.asarray(v).reshape(-1)]


def _check_blank_pure(machine: CloningMachine, blank, force: bool):
    if blank is None:
        blank = StateVector.basis(0, machine.blank_dim)
    elif not isinstance(blank, StateVector):
        blank = StateVector(blank)
    if blank.dim != machine.blank_dim:
        raise ValueError(f"blank has dimension {blank.dim}, machine expects {machine.blank_dim}")
    notes = []
    if not machine.is_robust and abs(blank.amplitudes[0]) < 1 - ATOL:
        if not force:
            raise BlankMismatchError(
                f"{machine.variant} is only defined for its designated blank |0>; "
                "use force_blank=True to run anyway"
            )
        notes.append(COMPLETION_NOTE)
    return blank, notes


def _check_blank_mixed(machine: CloningMachine, blank: DensityMatrix, force: bool):
    if blank.dim != machine.blank_dim:
        raise ValueError(f"blank has dimension {blank.dim}, machine expects {machine.blank_dim}")
    notes = []
    if not machine.is_robust:
        if not force:
            raise UnsupportedVariantError(
                f"{machine.variant} does not accept mixed blanks; use force_blank=True to run anyway"
            )
        if blank.matrix[0, 0].real < 1 - ATOL:
            notes.append(COMPLETION_NOTE)
    return notes


def _machine_ket(machine: CloningMachine) -> np.ndarray:
    m = np.zeros(machine.machine_dim, dtype=complex)
    m[0] = 1.0
    return m


def _shrink(reference, clone: DensityMatrix) -> float | None:
    ref = reference.density() if isinstance(reference, StateVector) else reference
    r_in = bloch_vector(ref)
    if np.linalg.norm(r_in) < 1e-12:
        return None
    return float(np.linalg.norm(bloch_vector(clone)) / np.linalg.norm(r_in))


def _fid(reference, rho: DensityMatrix) -> float:
    if isinstance(reference, StateVector):
        return fidelity_pure(reference, rho)
    return fidelity(reference, rho)


def _assemble(machine, out, reference, in_desc, blank_desc, notes, **extra) -> CloneReport:
    clones = [partial_trace(out, [k]) for k in machine.clone_registers]
    report = CloneReport(
        machine_variant=machine.variant,
        input_descriptor=in_desc,
        blank_descriptor=blank_desc,
        per_clone_states=clones,
        per_clone_fidelity=[_fid(reference, c) for c in clones],
        notes=list(notes),
        **extra,
    )
    if machine.d == 2:
        report.shrink_factor = _shrink(reference, clones[0])
    return report


def run_pure(machine: CloningMachine, input, blank=None, *, force_blank: bool = False) -> CloneReport:
    """Clone ``input`` with a pure ``blank`` (default: the designated blank).

    ``input`` may be a single-qudit state (cloned as N copies), a state on the
    full N-qudit input register, or an ``OccupationVector``.

    Raises:
        BlankMismatchError: for a fixed-blank machine given another blank,
            unless ``force_blank`` is set.
    """
    vec, reference, in_desc, notes = _input_vector(machine, input)
    blank, blank_notes = _check_blank_pure(machine, blank, force_blank)
    full = kron(vec, blank.amplitudes, _machine_ket(machine))
    out = StateVector(machine.unitary @ full, machine.layout)
    extra = {}
    if machine.success_projector is not None:
        v = out.amplitudes
        extra["success_probability"] = float(np.vdot(v, machine.success_projector @ v).real)
    return _assemble(
        machine, out, reference, in_desc,
        {"kind": "pure", "state": _complex_list(blank.amplitudes)},
        notes + blank_notes, **extra,
    )


def run_mixed_blank(
    machine: CloningMachine, input, blank: DensityMatrix, *, force_blank: bool = False
) -> CloneReport:
    """Clone ``input`` with a mixed blank by evolving the full density matrix.

    Raises:
        UnsupportedVariantError: for fixed-blank machines unless ``force_blank``.
    """
    vec, reference, in_desc, notes = _input_vector(machine, input)
    notes += _check_blank_mixed(machine, blank, force_blank)
    m = _machine_ket(machine)
    rho = kron(np.outer(vec, vec.conj()), blank.matrix, np.outer(m, m.conj()))
    u = machine.unitary
    out_m = u @ rho @ u.conj().T
    out = DensityMatrix((out_m + out_m.conj().T) / 2, machine.layout)
    extra = {}
    if machine.success_projector is not None:
        extra["success_probability"] = float(np.trace(machine.success_projector @ out.matrix).real)
    return _assemble(
        machine, out, reference, in_desc,
        {"kind": "mixed", "matrix": [_complex_list(r) for r in blank.matrix]},
        notes, **extra,
    )


def run_postselect(
    machine: CloningMachine, which: int, blank=None, *, force_blank: bool = False
) -> CloneReport:
    """Run a probabilistic cloner on candidate ``which`` and post-select success.

    ``success_probability`` is the weight of the success projector; the clone
    states are those of the renormalized success branch and ``joint_fidelity``
    is its overlap with |psi_which>|psi_which> on the two clone registers.
    """
    if not machine.is_probabilistic:
        raise UnsupportedVariantError(f"{machine.variant} has no success projector")
    if which not in (0, 1):
        raise ValueError(f"which must be 0 or 1, got {which}")
    psi = StateVector(machine.params[f"psi{which}"])
    proj = machine.success_projector
    u = machine.unitary
    m = _machine_ket(machine)
    if isinstance(blank, DensityMatrix):
        notes = _check_blank_mixed(machine, blank, force_blank)
        rho = kron(psi.density().matrix, blank.matrix, np.outer(m, m.conj()))
        out = proj @ u @ rho @ u.conj().T @ proj
        p = float(np.trace(out).real)
        out = (out + out.conj().T) / (2 * p)
        post = DensityMatrix(out, machine.layout)
        blank_desc = {"kind": "mixed", "matrix": [_complex_list(r) for r in blank.matrix]}
    else:
        blank, notes = _check_blank_pure(machine, blank, force_blank)
        out = proj @ (u @ kron(psi.amplitudes, blank.amplitudes, m))
        p = float(np.vdot(out, out).real)
        post = StateVector(out, machine.layout)
        blank_desc = {"kind": "pure", "state": _complex_list(blank.amplitudes)}
    pair = partial_trace(post, [0, 1])
    joint = fidelity_pure(kron(psi.amplitudes, psi.amplitudes), pair)
    return _assemble(
        machine, post, psi, {"which": which, "state": _complex_list(psi.amplitudes)},
        blank_desc, notes, success_probability=p, joint_fidelity=joint,
    )


# ---------------------------------------------------------------- scans


def sample_blanks(dim: int, trials: int, seed: SeedLike, layout=None):
    """Blank states for invariance scans.

    Even trials are Haar-random pure states; odd trials alternate between the
    two-term mixtures a|a1><a1| + (1-a)|a2><a2| and full-rank random states.
    A maximally mixed blank is appended as a final extra trial.
    """
    rng = rng_from(seed)
    blanks = []
    for t in range(trials):
        if t % 2 == 0:
            blanks.append(haar_random_state(dim, rng, layout))
        elif t % 4 == 1 or dim == 2:
            blanks.append(random_rank2_state(dim, rng, layout))
        else:
            blanks.append(random_density(dim, rng, layout))
    blanks.append(DensityMatrix.maximally_mixed(layout or dim))
    return blanks


def _run_any(machine, input, blank, force_blank):
    if machine.is_probabilistic:
        return run_postselect(machine, input, blank, force_blank=force_blank)
    if isinstance(blank, DensityMatrix):
        return run_mixed_blank(machine, input, blank, force_blank=force_blank)
    return run_pure(machine, input, blank, force_blank=force_blank)


def blank_invariance_scan(
    machine: CloningMachine,
    input,
    trials: int,
    seed: SeedLike,
    *,
    force_blank: bool = False,
) -> float:
    """Largest clone trace distance from the designated-blank clones over random blanks.

    For probabilistic machines ``input`` is the candidate index (0 or 1) and
    post-selected clones are compared. Fixed-blank machines require
    ``force_blank``; their value then reflects the completion only.
    """
    if not machine.is_robust and not force_blank:
        raise UnsupportedVariantError(f"{machine.variant} is not blank-robust; pass force_blank=True")
    ref = _run_any(machine, input, None, force_blank).per_clone_states
    layout = (machine.d,) * (machine.n_clones - machine.n_inputs)
    worst = 0.0
    for blank in sample_blanks(machine.blank_dim, trials, seed, layout):
        states = _run_any(machine, input, blank, force_blank).per_clone_states
        worst = max(worst, max(trace_distance(a, b) for a, b in zip(ref, states)))
    return worst


def mix_reports(weights, reports: list[CloneReport]) -> list[DensityMatrix]:
    """Convex combination of the per-clone states of several reports."""
    n = len(reports[0].per_clone_states)
    return [
        DensityMatrix(sum(w * r.per_clone_states[k].matrix for w, r in zip(weights, reports)))
        for k in range(n)
    ]
