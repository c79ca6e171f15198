import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blankclone.errors import PreconditionError, SizeError
from blankclone.sampling import haar_random_state, random_density
from blankclone.tensor import (
    I2,
    PAULI_X,
    DensityMatrix,
    StateVector,
    bloch_vector,
    complete_isometry,
    density_from_bloch,
    fidelity,
    fidelity_pure,
    kron,
    partial_trace,
    trace_distance,
    unitarity_error,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def e(i, dim=2):
    v = np.zeros(dim, dtype=complex)
    v[i] = 1
    return v


class TestKron:
    def test_basis_vectors(self):
        np.testing.assert_array_equal(kron(e(0), e(1)), e(1, 4))

    def test_identities(self):
        np.testing.assert_array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_pauli_product(self):
        # (X (x) I)(I (x) X) written out by hand
        x_i = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])
        i_x = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
        np.testing.assert_array_equal(x_i @ i_x, kron(PAULI_X, PAULI_X))
        np.testing.assert_array_equal(kron(PAULI_X, I2), x_i)

    def test_cap(self):
        with pytest.raises(SizeError):
            kron(np.eye(64), np.eye(64), cap=2**20 // 2**8)

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            kron(np.array([np.nan, 1.0]), e(0))


class TestStates:
    def test_state_vector_normalizes(self):
        psi = StateVector([3, 4j])
        assert np.isclose(np.linalg.norm(psi.amplitudes), 1, atol=1e-15)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            StateVector([0, 0])

    def test_layout_mismatch(self):
        with pytest.raises(ValueError):
            StateVector(np.ones(4), (2, 3))

    def test_immutable(self):
        psi = StateVector([1, 0])
        with pytest.raises(ValueError):
            psi.amplitudes[0] = 2

    @pytest.mark.parametrize(
        "m",
        [
            np.array([[1, 1], [0, 0]]),  # not Hermitian
            np.diag([0.6, 0.6]),  # trace
            np.diag([1.5, -0.5]),  # negative eigenvalue
        ],
    )
    def test_density_invariants(self, m):
        with pytest.raises(ValueError):
            DensityMatrix(m)


class TestPartialTrace:
    def test_bell_marginal(self):
        bell = StateVector([1, 0, 0, 1], (2, 2))
        np.testing.assert_allclose(partial_trace(bell, [0]).matrix, I2 / 2, atol=1e-15)
        np.testing.assert_allclose(partial_trace(bell.density(), [1]).matrix, I2 / 2, atol=1e-15)

    def test_product_state(self, rng):
        a, b = random_density(2, rng), random_density(3, rng)
        joint = a.tensor(b)
        np.testing.assert_allclose(partial_trace(joint, [0]).matrix, a.matrix, atol=1e-14)
        np.testing.assert_allclose(partial_trace(joint, [1]).matrix, b.matrix, atol=1e-14)

    def test_eq1_output_on_zero(self):
        # hand expansion: sqrt(2/3)|00>|0> + sqrt(1/6)(|01>+|10>)|1>
        amps = np.zeros(8)
        amps[0b000] = np.sqrt(2 / 3)
        amps[0b011] = amps[0b101] = np.sqrt(1 / 6)
        rho = partial_trace(StateVector(amps, (2, 2, 2)), [0])
        np.testing.assert_allclose(rho.matrix, np.diag([5 / 6, 1 / 6]), atol=1e-15)

    def test_keeps_order_and_layout(self, rng):
        a, b, c = random_density(2, rng), random_density(3, rng), random_density(2, rng)
        red = partial_trace(a.tensor(b, c), [2, 0])
        assert red.layout == (2, 2)
        np.testing.assert_allclose(red.matrix, kron(a.matrix, c.matrix), atol=1e-14)

    @pytest.mark.parametrize("keep", [[], [3], [-1]])
    def test_bad_keep(self, keep):
        with pytest.raises(ValueError):
            partial_trace(StateVector(np.ones(8), (2, 2, 2)), keep)

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds, keep=st.sets(st.integers(0, 2), min_size=1))
    def test_trace_and_positivity_preserved(self, seed, keep):
        rho = random_density(12, seed, (2, 3, 2))
        red = partial_trace(rho, keep)
        assert abs(np.trace(red.matrix) - 1) <= 1e-10
        assert np.linalg.eigvalsh(red.matrix).min() >= -1e-10


class TestCompleteIsometry:
    def test_single_column(self):
        np.testing.assert_array_equal(complete_isometry([e(0)]), np.eye(2))

    def test_swap(self):
        np.testing.assert_array_equal(complete_isometry([e(1), e(0)]), np.array([[0, 1], [1, 0]]))

    def test_robust_qubit_block(self):
        a, c = np.sqrt(2 / 3), np.sqrt(1 / 6)
        m = np.eye(4)
        sym = kron(e(0), e(1)) + kron(e(1), e(0))
        cols = [
            a * kron(e(0), e(0), m[0]) + c * kron(sym, m[1]),
            a * kron(e(1), e(1), m[1]) + c * kron(sym, m[0]),
            a * kron(e(0), e(0), m[2]) + c * kron(sym, m[3]),
            a * kron(e(1), e(1), m[3]) + c * kron(sym, m[2]),
        ]
        u = complete_isometry(cols)
        assert u.shape == (16, 16)
        assert unitarity_error(u) <= 1e-10

    def test_non_orthonormal_reports_entry(self):
        with pytest.raises(PreconditionError, match=r"Gram entry \(\d, \d\)"):
            complete_isometry([e(0), (e(0) + e(1)) / np.sqrt(2)])

    def test_custom_domain(self, rng):
        dom = np.linalg.qr(rng.normal(size=(5, 2)) + 1j * rng.normal(size=(5, 2)))[0]
        out = np.linalg.qr(rng.normal(size=(5, 2)) + 1j * rng.normal(size=(5, 2)))[0]
        u = complete_isometry(list(out.T), domain=list(dom.T))
        np.testing.assert_allclose(u @ dom, out, atol=1e-12)
        assert unitarity_error(u) <= 1e-10

    def test_deterministic(self, rng):
        cols = list(np.linalg.qr(rng.normal(size=(6, 3)) + 0j)[0].T)
        assert np.array_equal(complete_isometry(cols), complete_isometry(cols))

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds, n=st.integers(1, 8), data=st.data())
    def test_unitary_and_columns_exact(self, seed, n, data):
        k = data.draw(st.integers(0, n))
        g = np.random.default_rng(seed)
        cols = np.linalg.qr(g.normal(size=(n, n)) + 1j * g.normal(size=(n, n)))[0][:, :k]
        u = complete_isometry(list(cols.T), dim=n)
        assert unitarity_error(u) <= 1e-10
        assert np.max(np.abs(u[:, :k] - cols), initial=0.0) <= 1e-12


class TestMetrics:
    def test_fidelity_examples(self):
        assert fidelity_pure(StateVector([1, 0]), DensityMatrix(np.diag([1, 0]))) == 1
        plus = StateVector([1, 1]).density()
        assert abs(fidelity_pure(StateVector([1, 0]), plus) - 0.5) <= 1e-15

    def test_fidelity_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity_pure(StateVector([1, 0, 0]), DensityMatrix(np.eye(2) / 2))

    def test_uhlmann_reduces_to_pure(self, rng):
        psi = haar_random_state(3, rng)
        rho = random_density(3, rng)
        assert abs(fidelity(psi.density(), rho) - fidelity_pure(psi, rho)) <= 1e-10

    def test_trace_distance_examples(self, rng):
        rho = random_density(3, rng)
        assert trace_distance(rho, rho) == 0
        assert trace_distance(DensityMatrix(np.diag([1, 0])), DensityMatrix(np.diag([0, 1]))) == 1
        assert abs(trace_distance(DensityMatrix(I2 / 2), DensityMatrix(np.diag([0.75, 0.25]))) - 0.25) <= 1e-15

    def test_bloch_examples(self):
        np.testing.assert_allclose(bloch_vector(DensityMatrix(np.diag([1, 0]))), [0, 0, 1])
        np.testing.assert_allclose(bloch_vector(DensityMatrix(I2 / 2)), [0, 0, 0])

    def test_bloch_needs_qubit(self):
        with pytest.raises(ValueError):
            bloch_vector(DensityMatrix(np.eye(3) / 3))

    def test_pure_fidelity_is_one(self, rng):
        for _ in range(100):
            psi = haar_random_state(4, rng)
            assert abs(fidelity_pure(psi, psi.density()) - 1) <= 1e-12

    @settings(max_examples=60, deadline=None)
    @given(seed=seeds)
    def test_triangle_inequality(self, seed):
        g = np.random.default_rng(seed)
        a, b, c = (random_density(3, g) for _ in range(3))
        assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-10

    def test_bloch_round_trip(self, rng):
        for _ in range(100):
            r = rng.normal(size=3)
            r *= rng.uniform() ** (1 / 3) / np.linalg.norm(r)
            np.testing.assert_allclose(bloch_vector(density_from_bloch(r)), r, atol=1e-10)
