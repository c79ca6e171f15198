"""Dense complex linear algebra for small composite quantum systems.

States and operators carry an explicit register layout: a tuple of local
dimensions, big-endian (register 0 is the most significant tensor factor).
Plain ``numpy`` complex128 arrays play the role of matrices; the two state
classes are thin immutable wrappers that validate on construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import PreconditionError, SizeError

ATOL = 1e-10
KRON_CAP = 2**20

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


def as_matrix(a, *, copy: bool = False) -> np.ndarray:
    """Coerce ``a`` to a finite complex128 array (1-D or 2-D)."""
    arr = np.array(a, dtype=np.complex128, copy=copy or None)
    if arr.ndim not in (1, 2):
        raise ValueError(f"expected a vector or matrix, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


def _check_layout(layout: Sequence[int], size: int) -> tuple[int, ...]:
    layout = tuple(int(x) for x in layout)
    if any(x < 1 for x in layout):
        raise ValueError(f"register dimensions must be positive: {layout}")
    if prod(layout) != size:
        raise ValueError(f"layout {layout} does not match dimension {size}")
    return layout


@dataclass(frozen=True, eq=False)
class StateVector:
    """A normalized pure state on a tensor-product register layout.

    The constructor normalizes the given amplitudes; a zero vector is rejected.
    ``layout`` defaults to a single register of the full dimension.
    """

    amplitudes: np.ndarray
    layout: tuple[int, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        amps = as_matrix(self.amplitudes).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm < 1e-300:
            raise ValueError("cannot normalize a zero state vector")
        if abs(norm - 1.0) > 1e-15:
            amps = amps / norm
        layout = (amps.size,) if self.layout is None else self.layout
        object.__setattr__(self, "layout", _check_layout(layout, amps.size))
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def basis(cls, index: int, layout: Sequence[int] | int) -> "StateVector":
        layout = (layout,) if isinstance(layout, (int, np.integer)) else tuple(layout)
        dim = prod(layout)
        if not 0 <= index < dim:
            raise ValueError(f"basis index {index} out of range for dimension {dim}")
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps, layout)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def tensor(self, *others: "StateVector") -> "StateVector":
        amps = kron(self.amplitudes, *(o.amplitudes for o in others))
        layout = self.layout + sum((o.layout for o in others), ())
        return StateVector(amps, layout)

    def density(self) -> "DensityMatrix":
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()), self.layout)

    def inner(self, other: "StateVector") -> complex:
        """Return <self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator with a layout."""

    matrix: np.ndarray
    layout: tuple[int, ...] = None  # type: ignore[assignment]
    atol: float = ATOL

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        layout = (m.shape[0],) if self.layout is None else self.layout
        object.__setattr__(self, "layout", _check_layout(layout, m.shape[0]))
        herm_err = np.max(np.abs(m - m.conj().T), initial=0.0)
        if herm_err > self.atol:
            raise ValueError(f"matrix is not Hermitian (max deviation {herm_err:.3e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > self.atol:
            raise ValueError(f"trace must be 1, got {tr!r}")
        min_eig = np.linalg.eigvalsh((m + m.conj().T) / 2).min()
        if min_eig < -self.atol:
            raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def maximally_mixed(cls, layout: Sequence[int] | int) -> "DensityMatrix":
        layout = (layout,) if isinstance(layout, (int, np.integer)) else tuple(layout)
        dim = prod(layout)
        return cls(np.eye(dim, dtype=complex) / dim, layout)

    @classmethod
    def mixture(cls, weights: Iterable[float], states: Iterable[StateVector]) -> "DensityMatrix":
        states = list(states)
        m = sum(w * s.density().matrix for w, s in zip(weights, states))
        return cls(m, states[0].layout)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def tensor(self, *others: "DensityMatrix") -> "DensityMatrix":
        m = kron(self.matrix, *(o.matrix for o in others))
        return DensityMatrix(m, self.layout + sum((o.layout for o in others), ()))


def kron(*ops, cap: int = KRON_CAP) -> np.ndarray:
    """Kronecker product of vectors or matrices, left factor most significant.

    Raises:
        SizeError: if the number of entries of the result would exceed ``cap``.
    """
    if not ops:
        raise ValueError("kron needs at least one operand")
    arrs = [as_matrix(o) for o in ops]
    entries = prod(a.size for a in arrs)
    if entries > cap:
        raise SizeError(entries, cap, "kron result size")
    out = arrs[0]
    for a in arrs[1:]:
        out = np.kron(out, a)
    return out


def _keep_indices(layout: tuple[int, ...], keep) -> list[int]:
    if isinstance(keep, (int, np.integer)):
        keep = [keep]
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one register")
    if keep[0] < 0 or keep[-1] >= len(layout):
        raise ValueError(f"register index out of range for layout {layout}: {keep}")
    return keep


def partial_trace(rho: DensityMatrix | StateVector, keep) -> DensityMatrix:
    """Reduced state on the registers in ``keep`` (kept in their original order).

    A ``StateVector`` is accepted directly, which avoids forming the full
    density matrix.
    """
    layout = rho.layout
    keep = _keep_indices(layout, keep)
    rest = [i for i in range(len(layout)) if i not in keep]
    dk = prod(layout[i] for i in keep)
    if isinstance(rho, StateVector):
        psi = rho.amplitudes.reshape(layout).transpose(keep + rest).reshape(dk, -1)
        red = psi @ psi.conj().T
    else:
        n = len(layout)
        t = rho.matrix.reshape(layout + layout)
        row = list(range(n))
        col = [i + n if i in keep else i for i in range(n)]
        out = keep + [i + n for i in keep]
        red = np.einsum(t, row + col, out).reshape(dk, dk)
    # exact Hermitian symmetrization removes rounding asymmetry
    red = (red + red.conj().T) / 2
    return DensityMatrix(red, tuple(layout[i] for i in keep))


def orthonormal_completion(vectors: np.ndarray, atol: float = ATOL) -> np.ndarray:
    """Extend orthonormal columns to a full unitary basis.

    The given columns are kept verbatim. Standard basis vectors are then
    appended in index order after two rounds of Gram-Schmidt against the
    current basis; candidates with residual norm below ``atol`` are skipped.
    """
    vectors = as_matrix(vectors)
    if vectors.ndim == 1:
        vectors = vectors[:, None]
    n, k = vectors.shape
    basis = np.zeros((n, n), dtype=complex)
    basis[:, :k] = vectors
    filled = k
    for i in range(n):
        if filled == n:
            break
        q = basis[:, :filled]
        r = -q @ q[i].conj()
        r[i] += 1.0
        r -= q @ (q.conj().T @ r)
        norm = np.linalg.norm(r)
        if norm < atol:
            continue
        basis[:, filled] = r / norm
        filled += 1
    if filled != n:
        raise PreconditionError(f"completion produced only {filled} of {n} columns")
    return basis


def _check_orthonormal(mat: np.ndarray, what: str, atol: float) -> None:
    gram = mat.conj().T @ mat
    dev = np.abs(gram - np.eye(gram.shape[0]))
    if dev.size and dev.max() > atol:
        i, j = np.unravel_index(np.argmax(dev), dev.shape)
        raise PreconditionError(
            f"{what} are not orthonormal: Gram entry ({i}, {j}) = {gram[i, j]:.6g}"
        )


def _stack(vecs, dim: int | None) -> np.ndarray:
    cols = [v.amplitudes if isinstance(v, StateVector) else as_matrix(v).reshape(-1) for v in vecs]
    if not cols:
        if dim is None:
            raise ValueError("dimension required when no columns are given")
        return np.zeros((dim, 0), dtype=complex)
    mat = np.stack(cols, axis=1)
    if dim is not None and mat.shape[0] != dim:
        raise ValueError(f"columns have dimension {mat.shape[0]}, expected {dim}")
    return mat


def complete_isometry(columns, domain=None, dim: int | None = None, atol: float = ATOL) -> np.ndarray:
    """Build a unitary ``U`` with ``U @ domain[i] == columns[i]``.

    Args:
        columns: orthonormal output vectors (``StateVector`` or arrays).
        domain: orthonormal input vectors, same count as ``columns``. Defaults
            to the first ``len(columns)`` standard basis vectors, in which case
            ``columns`` become the leading columns of ``U`` exactly.
        dim: full dimension; inferred from the columns if omitted.
        atol: orthonormality tolerance and completion residual cutoff.

    Returns:
        A square complex unitary. Off the domain it is fixed by the
        deterministic completion of :func:`orthonormal_completion` applied to
        both the domain and the outputs.

    Raises:
        PreconditionError: if either family is not orthonormal.
    """
    out = _stack(columns, dim)
    n, k = out.shape
    if k > n:
        raise PreconditionError(f"{k} columns cannot be orthonormal in dimension {n}")
    _check_orthonormal(out, "columns", atol)
    w_out = orthonormal_completion(out, atol)
    if domain is None:
        return w_out
    inp = _stack(domain, n)
    if inp.shape[1] != k:
        raise ValueError(f"{inp.shape[1]} domain vectors for {k} columns")
    _check_orthonormal(inp, "domain vectors", atol)
    w_in = orthonormal_completion(inp, atol)
    return w_out @ w_in.conj().T


def unitarity_error(u: np.ndarray) -> float:
    """Max-entry norm of U^dagger U - I."""
    u = as_matrix(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1]))))


def _vec(psi) -> np.ndarray:
    return psi.amplitudes if isinstance(psi, StateVector) else as_matrix(psi).reshape(-1)


def _mat(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else as_matrix(rho)


def fidelity_pure(psi: StateVector, rho: DensityMatrix) -> float:
    """<psi|rho|psi>, clamped to [0, 1]."""
    v, m = _vec(psi), _mat(rho)
    if m.shape != (v.size, v.size):
        raise ValueError(f"dimension mismatch: state {v.size}, density matrix {m.shape}")
    f = np.vdot(v, m @ v).real
    return float(min(1.0, max(0.0, f)))


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    # eigenvalues at rounding level are zeros; their square roots would not be
    w = np.where(w > 1e-13, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 in [0, 1]."""
    a, b = _mat(rho), _mat(sigma)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    # nuclear norm of sqrt(a) sqrt(b); avoids square roots of rounding noise
    f = np.sum(np.linalg.svd(_psd_sqrt(a) @ _psd_sqrt(b), compute_uv=False)) ** 2
    return float(min(1.0, max(0.0, f)))


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Half the trace norm of a - b."""
    ma, mb = _mat(a), _mat(b)
    if ma.shape != mb.shape:
        raise ValueError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    diff = ma - mb
    s = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return float(min(1.0, 0.5 * np.sum(np.abs(s))))


def bloch_vector(rho: DensityMatrix) -> np.ndarray:
    """Real Bloch vector (tr rho X, tr rho Y, tr rho Z) of a qubit state."""
    m = _mat(rho)
    if m.shape != (2, 2):
        raise ValueError(f"Bloch vector needs a qubit density matrix, got shape {m.shape}")
    return np.array([np.trace(m @ p).real for p in PAULIS])


def density_from_bloch(r) -> DensityMatrix:
    r = np.asarray(r, dtype=float)
    if r.shape != (3,) or np.linalg.norm(r) > 1 + ATOL:
        raise ValueError(f"Bloch vector must be a real 3-vector of norm <= 1, got {r}")
    m = 0.5 * (I2 + sum(c * p for c, p in zip(r, PAULIS)))
    return DensityMatrix(m)


def bloch_state(theta: float, phi: float) -> StateVector:
    """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
    return StateVector([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
