"""Diagonalization bijection, transforms, real criterion, realification."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from obtusewalk import (
    ObtuseRV,
    Tensor3,
    diagonalize,
    extract_phases,
    haar_unitary,
    is_real_tensor,
    obtuse_fixed_points,
    random_system,
    realify,
    relate_same_probabilities,
    tensor_from_family,
    tensor_of,
    transform,
    triangularize_system,
)
from obtusewalk.errors import (
    NotDoublySymmetric,
    NotOrthogonal,
    NotUnitary,
    S0NotUnitary,
    WrongCount,
)
from conftest import (
    REFERENCE_PROBS,
    REFERENCE_VALUES,
    bernoulli_rv,
    greedy_match,
    imaginary_rv,
)


def random_orthogonal_family(dim, count, rng):
    """Random pairwise-orthogonal non-zero vectors with random lengths."""
    u = haar_unitary(dim, rng)
    scales = rng.uniform(0.4, 2.5, size=count)
    return u[:, :count].T * scales[:, None]


class TestApply:
    def test_single_direction_fixed_point(self):
        v = np.array([0.7, 1.1j], dtype=complex)
        tensor = tensor_from_family([v])
        np.testing.assert_allclose(tensor.apply(v), np.outer(v, v), atol=1e-12)

    def test_contraction_on_basis_vector(self, reference_tensor):
        # S(e_0) picks out the k = 0 entries of the tensor
        e0 = np.array([1.0, 0.0, 0.0], dtype=complex)
        np.testing.assert_allclose(
            reference_tensor.apply(e0), reference_tensor.entries[:, :, 0], atol=1e-14
        )

    def test_zero_vector(self, reference_tensor):
        np.testing.assert_allclose(
            reference_tensor.apply(np.zeros(3)), np.zeros((3, 3))
        )


class TestFromFamily:
    def test_canonical_basis_gives_delta_tensor(self):
        tensor = tensor_from_family(np.eye(4))
        expected = np.zeros((4, 4, 4))
        for m in range(4):
            expected[m, m, m] = 1.0
        np.testing.assert_allclose(tensor.entries, expected, atol=1e-14)

    def test_hatted_system_reproduces_variable_tensor(self, reference_rv):
        tensor = tensor_from_family(reference_rv.hatted, has_constant=True)
        np.testing.assert_allclose(
            tensor.entries, tensor_of(reference_rv).entries, atol=1e-13
        )

    def test_single_vector_entries(self):
        tensor = tensor_from_family([[1.0, 1j]])
        # 1/|v|^2 v^i v^j conj(v^k) with v = (1, i)
        assert tensor.entries[0, 0, 0] == pytest.approx(0.5)
        assert tensor.entries[1, 1, 1] == pytest.approx(0.5j)
        assert tensor.entries[0, 1, 1] == pytest.approx(0.5)
        assert check_sym(tensor)

    def test_rejects_non_orthogonal(self):
        with pytest.raises(NotOrthogonal):
            tensor_from_family([[1.0, 0.0], [1.0, 1.0]])


def check_sym(tensor):
    from obtusewalk import check_symmetries

    return check_symmetries(tensor, tol=1e-10, include_constant=False).doubly_symmetric


class TestDiagonalize:
    def test_reference_tensor_fixed_points(self, reference_rv, reference_tensor):
        result = diagonalize(reference_tensor)
        assert len(result.vectors) == 3
        np.testing.assert_allclose(result.vectors[:, 0], np.ones(3), atol=1e-9)
        assert greedy_match(result.vectors, reference_rv.hatted) <= 1e-9

    def test_zero_tensor(self):
        result = diagonalize(Tensor3(np.zeros((3, 3, 3)), has_constant=False))
        assert len(result.vectors) == 0

    def test_round_trip_random_pair(self):
        rng = np.random.default_rng(17)
        family = random_orthogonal_family(4, 2, rng)
        tensor = tensor_from_family(family)
        result = diagonalize(tensor)
        # the fixed-point equation pins the phase: exact match, not mod phase
        assert greedy_match(result.vectors, family) <= 1e-8

    def test_bijection_on_fifty_random_families(self):
        rng = np.random.default_rng(29)
        for _ in range(50):
            dim = int(rng.integers(1, 7))
            count = int(rng.integers(1, dim + 1))
            family = random_orthogonal_family(dim, count, rng)
            tensor = tensor_from_family(family)
            recovered = diagonalize(tensor)
            assert greedy_match(recovered.vectors, family) <= 1e-8
            rebuilt = tensor_from_family(recovered.vectors)
            assert np.max(np.abs(rebuilt.entries - tensor.entries)) <= 1e-8

    def test_rejects_asymmetric_tensor(self):
        entries = np.zeros((2, 2, 2), dtype=complex)
        entries[0, 1, 0] = 1.0
        with pytest.raises(NotDoublySymmetric):
            diagonalize(Tensor3(entries, has_constant=False))

    @given(seed=st.integers(0, 10**6))
    @settings(deadline=None, max_examples=20, derandomize=True)
    def test_bijection_property(self, seed):
        rng = np.random.default_rng(seed)
        dim = int(rng.integers(1, 6))
        count = int(rng.integers(1, dim + 1))
        family = random_orthogonal_family(dim, count, rng)
        recovered = diagonalize(tensor_from_family(family))
        assert greedy_match(recovered.vectors, family) <= 1e-8


class TestObtuseFixedPoints:
    def test_reference_tensor(self, reference_rv, reference_tensor):
        system = obtuse_fixed_points(reference_tensor)
        np.testing.assert_allclose(
            np.sort(system.probabilities), np.sort(REFERENCE_PROBS), atol=1e-10
        )
        assert greedy_match(system.values, REFERENCE_VALUES) <= 1e-9

    def test_delta_tensor_rejected(self):
        delta = tensor_from_family(np.eye(3), has_constant=True)
        with pytest.raises(WrongCount):
            obtuse_fixed_points(delta)

    def test_bernoulli(self):
        system = obtuse_fixed_points(tensor_of(bernoulli_rv()))
        assert greedy_match(system.values, [[1.0], [-1.0]]) <= 1e-10
        np.testing.assert_allclose(system.probabilities, [0.5, 0.5], atol=1e-12)


class TestTransform:
    def test_identity(self, reference_tensor):
        out = transform(np.eye(2), reference_tensor)
        np.testing.assert_allclose(out.entries, reference_tensor.entries, atol=1e-14)

    def test_round_trip(self, reference_tensor):
        u = haar_unitary(2, np.random.default_rng(31))
        out = transform(u.conj().T, transform(u, reference_tensor))
        np.testing.assert_allclose(out.entries, reference_tensor.entries, atol=1e-12)

    def test_equivariance_with_diagonalize(self):
        rng = np.random.default_rng(37)
        for _ in range(20):
            dim = int(rng.integers(1, 6))
            count = int(rng.integers(1, dim + 1))
            family = random_orthogonal_family(dim, count, rng)
            tensor = tensor_from_family(family)
            u = haar_unitary(dim, rng)
            rotated = transform(u, tensor)
            recovered = diagonalize(rotated)
            assert greedy_match(recovered.vectors, family @ u.T) <= 1e-8

    def test_rejects_non_unitary(self, reference_tensor):
        with pytest.raises(NotUnitary):
            transform(np.ones((2, 2)), reference_tensor)


class TestRealCriterion:
    def test_imaginary_pair_not_real(self):
        tensor = tensor_of(imaginary_rv())
        assert np.max(np.abs(tensor.entries.imag)) == 0.0
        assert not is_real_tensor(tensor)

    def test_bernoulli_real(self):
        assert is_real_tensor(tensor_of(bernoulli_rv()))

    def test_reference_tensor_not_real(self, reference_tensor):
        assert not is_real_tensor(reference_tensor)

    def test_criterion_tracks_real_atoms(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            dim = int(rng.integers(1, 5))
            system = random_system(dim, rng)
            tensor = tensor_of(ObtuseRV(system))
            all_real = float(np.max(np.abs(system.values.imag))) <= 1e-12
            assert is_real_tensor(tensor, tol=1e-9) == all_real


class TestRealify:
    def test_reference_tensor(self, reference_tensor):
        result = realify(reference_tensor)
        s0 = reference_tensor.entries[:, :, 0]
        assert np.max(np.abs(result.v @ result.v.T - s0)) <= 1e-9
        assert result.imag_residual() <= 1e-8
        np.testing.assert_allclose(
            np.sort(result.real_system.probabilities),
            np.sort(REFERENCE_PROBS),
            atol=1e-10,
        )
        assert np.max(np.abs(result.real_system.values.imag)) <= 1e-8

    def test_already_real_tensor(self):
        tensor = tensor_of(bernoulli_rv())
        result = realify(tensor)
        assert is_real_tensor(result.real_tensor)
        assert np.max(np.abs(result.v @ result.v.T - tensor.entries[:, :, 0])) <= 1e-9

    def test_realified_system_has_same_law(self, reference_rv, reference_tensor):
        # the recovered real variable is a unitary image of the original
        result = realify(reference_tensor)
        u, _ = relate_same_probabilities(
            reference_rv, ObtuseRV(result.real_system)
        )
        assert np.max(np.abs(u.conj().T @ u - np.eye(2))) <= 1e-9

    def test_transformed_real_tensor_round_trips(self):
        rng = np.random.default_rng(43)
        for _ in range(5):
            dim = int(rng.integers(1, 5))
            probs = rng.dirichlet(np.full(dim + 1, 5.0))
            from obtusewalk import system_from_probabilities

            real_sys = system_from_probabilities(probs)
            tensor = tensor_of(ObtuseRV(real_sys))
            u = haar_unitary(dim, rng)
            rotated = transform(u, tensor)
            result = realify(rotated)
            # same probabilities, both real: same distribution up to rotation
            np.testing.assert_allclose(
                np.sort(result.real_system.probabilities), np.sort(probs), atol=1e-9
            )
            assert np.max(np.abs(result.real_system.values.imag)) <= 1e-8

    def test_rejects_bad_time_zero_slice(self, reference_tensor):
        entries = reference_tensor.entries.copy()
        entries[:, :, 0] = 0.0
        entries[:, 0, :] = np.eye(3)
        with pytest.raises((S0NotUnitary, NotDoublySymmetric)):
            realify(Tensor3(entries))


class TestTriangularize:
    def test_reference_system(self):
        u, tri = triangularize_system(REFERENCE_VALUES)
        assert abs(tri[0, 1]) <= 1e-12  # first vector supported on coord 1
        phases, real_sys = extract_phases(tri)
        assert np.max(np.abs(np.abs(phases) - 1.0)) <= 1e-12
        assert np.max(np.abs(real_sys.values.imag)) <= 1e-9
        np.testing.assert_allclose(
            np.sort(real_sys.probabilities), np.sort(REFERENCE_PROBS), atol=1e-10
        )

    def test_already_real_system(self):
        from obtusewalk import system_from_probabilities

        system = system_from_probabilities([0.2, 0.3, 0.5])
        _, tri = triangularize_system(system.values)
        phases, real_sys = extract_phases(tri)
        np.testing.assert_allclose(np.abs(phases.real), np.ones(2), atol=1e-12)
        np.testing.assert_allclose(
            np.sort(real_sys.probabilities), [0.2, 0.3, 0.5], atol=1e-12
        )

    def test_one_dimensional_imaginary_pair(self):
        _, tri = triangularize_system(np.array([[1j], [-1j]]))
        phases, real_sys = extract_phases(tri)
        assert greedy_match(real_sys.values, [[1.0], [-1.0]]) <= 1e-12

    def test_agrees_with_realify_in_law(self, reference_rv, reference_tensor):
        _, tri = triangularize_system(REFERENCE_VALUES)
        _, real_a = extract_phases(tri)
        real_b = realify(reference_tensor).real_system
        u, _ = relate_same_probabilities(ObtuseRV(real_a), ObtuseRV(real_b))
        assert np.max(np.abs(u.conj().T @ u - np.eye(2))) <= 1e-9
