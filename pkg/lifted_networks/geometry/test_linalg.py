# Copyright (c) 2026, sanika and Contributors
# See license.txt

import unittest

import numpy as np

from ..exceptions import DomainError, InvalidInputError
from .linalg import (
	as_symmetric,
	matrix_exp,
	matrix_exp_vjp,
	singular_values,
	smallest_singular_value,
	spectral_fn,
	spectral_fn_vjp,
	sym_eig,
)


def random_symmetric(rng, d):
	M = rng.standard_normal((d, d))
	return 0.5 * (M + M.T)


def random_spd(rng, d):
	M = rng.standard_normal((d, d))
	return M @ M.T + d * np.eye(d)


class TestSymEig(unittest.TestCase):
	def test_reconstruction_and_orthogonality(self):
		rng = np.random.default_rng(0)
		for d in (1, 2, 5, 12):
			S = random_symmetric(rng, d)
			Q, lam = sym_eig(S)
			np.testing.assert_allclose(Q @ np.diag(lam) @ Q.T, S, atol=1e-10)
			np.testing.assert_allclose(Q.T @ Q, np.eye(d), atol=1e-10)

	def test_every_dimension_up_to_twenty(self):
		rng = np.random.default_rng(10)
		for d in range(2, 21):
			for _ in range(10):
				M = rng.standard_normal((d, d))
				S = M + M.T
				Q, lam = sym_eig(S)
				scale = max(1.0, np.linalg.norm(S))
				self.assertLessEqual(np.linalg.norm(Q @ np.diag(lam) @ Q.T - S) / scale, 1e-10, d)
				np.testing.assert_allclose(Q.T @ Q, np.eye(d), atol=1e-10)

	def test_nearly_converged_input(self):
		rng = np.random.default_rng(11)
		S = np.diag(np.arange(1.0, 9.0)) + 1e-9 * random_symmetric(rng, 8)
		Q, lam = sym_eig(S)
		np.testing.assert_allclose(Q @ np.diag(lam) @ Q.T, S, atol=1e-12)

	def test_descending_and_matches_numpy(self):
		S = random_symmetric(np.random.default_rng(1), 6)
		_, lam = sym_eig(S)
		self.assertTrue(np.all(np.diff(lam) <= 0))
		np.testing.assert_allclose(lam, np.linalg.eigvalsh(S)[::-1], atol=1e-10)

	def test_stack(self):
		rng = np.random.default_rng(2)
		S = np.stack([random_symmetric(rng, 3) for _ in range(7)]).reshape(7, 3, 3)
		Q, lam = sym_eig(S)
		self.assertEqual(Q.shape, (7, 3, 3))
		self.assertEqual(lam.shape, (7, 3))
		np.testing.assert_allclose(np.einsum("nij,nj,nkj->nik", Q, lam, Q), S, atol=1e-10)

	def test_diagonal_is_exact(self):
		Q, lam = sym_eig(np.diag([1.0, 3.0, 2.0]))
		np.testing.assert_array_equal(lam, [3.0, 2.0, 1.0])

	def test_rejects_non_square(self):
		with self.assertRaises(InvalidInputError):
			sym_eig(np.ones((2, 3)))

	def test_as_symmetric_averages(self):
		np.testing.assert_array_equal(as_symmetric([[1.0, 2.0], [0.0, 1.0]]), [[1.0, 1.0], [1.0, 1.0]])


class TestSpectralFunctions(unittest.TestCase):
	def test_sqrt_of_diagonal(self):
		np.testing.assert_allclose(spectral_fn(np.diag([4.0, 9.0]), "sqrt"), np.diag([2.0, 3.0]), atol=1e-14)

	def test_exp_log_round_trip(self):
		S = random_spd(np.random.default_rng(3), 4)
		np.testing.assert_allclose(spectral_fn(spectral_fn(S, "log"), "exp"), S, rtol=1e-10, atol=1e-10)

	def test_inv_sqrt(self):
		S = random_spd(np.random.default_rng(4), 3)
		R = spectral_fn(S, "inv_sqrt")
		np.testing.assert_allclose(R @ S @ R, np.eye(3), atol=1e-10)

	def test_log_needs_positive_definite(self):
		with self.assertRaises(DomainError):
			spectral_fn(np.diag([1.0, -1.0]), "log")

	def test_unknown_function(self):
		with self.assertRaises(InvalidInputError):
			spectral_fn(np.eye(2), "cube")

	def test_vjp_matches_finite_differences(self):
		rng = np.random.default_rng(5)
		S = random_spd(rng, 3)
		G = random_symmetric(rng, 3)
		analytic = spectral_fn_vjp(S, "log", G)
		numeric = np.zeros_like(S)
		step = 1e-6
		for i in range(3):
			for j in range(3):
				E = np.zeros_like(S)
				E[i, j] += step / 2
				E[j, i] += step / 2
				plus = np.sum(G * spectral_fn(S + E, "log"))
				minus = np.sum(G * spectral_fn(S - E, "log"))
				numeric[i, j] = (plus - minus) / (2 * step)
		np.testing.assert_allclose(analytic, numeric, atol=1e-6)


class TestMatrixExp(unittest.TestCase):
	def test_zero_is_identity(self):
		np.testing.assert_array_equal(matrix_exp(np.zeros((3, 3))), np.eye(3))

	def test_diagonal(self):
		np.testing.assert_allclose(matrix_exp(np.diag([1.0, -2.0])), np.diag([np.e, np.exp(-2.0)]), rtol=1e-13)

	def test_rotation(self):
		t = 2.5
		E = matrix_exp(np.array([[0.0, -t], [t, 0.0]]))
		np.testing.assert_allclose(E, [[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]], atol=1e-12)

	def test_large_norm_uses_squaring(self):
		A = np.diag([6.0, -6.0])
		np.testing.assert_allclose(matrix_exp(A), np.diag(np.exp([6.0, -6.0])), rtol=1e-11)

	def test_inverse_is_exp_of_negative(self):
		A = np.random.default_rng(6).standard_normal((4, 4))
		np.testing.assert_allclose(matrix_exp(A) @ matrix_exp(-A), np.eye(4), atol=1e-10)

	def test_vjp_matches_finite_differences(self):
		rng = np.random.default_rng(7)
		A = 1.5 * rng.standard_normal((3, 3))
		G = rng.standard_normal((3, 3))
		analytic = matrix_exp_vjp(A, G)
		numeric = np.zeros_like(A)
		step = 1e-6
		for idx in np.ndindex(A.shape):
			E = np.zeros_like(A)
			E[idx] = step
			numeric[idx] = (np.sum(G * matrix_exp(A + E)) - np.sum(G * matrix_exp(A - E))) / (2 * step)
		np.testing.assert_allclose(analytic, numeric, rtol=1e-5, atol=1e-6)

	def test_rejects_non_square(self):
		with self.assertRaises(InvalidInputError):
			matrix_exp(np.ones((2, 3)))


class TestSingularValues(unittest.TestCase):
	def test_diagonal(self):
		np.testing.assert_allclose(singular_values(np.diag([3.0, 2.0])), [3.0, 2.0], atol=1e-12)

	def test_rectangular(self):
		A = np.random.default_rng(8).standard_normal((5, 3))
		np.testing.assert_allclose(singular_values(A), np.linalg.svd(A, compute_uv=False), rtol=1e-8)

	def test_rank_deficient_is_zero(self):
		self.assertEqual(smallest_singular_value([[1.0, 1.0], [1.0, 1.0]]), 0.0)

	def test_cutoff_is_relative(self):
		self.assertAlmostEqual(smallest_singular_value(np.exp(-20.0) * np.eye(3)) / np.exp(-20.0), 1.0, places=10)
		self.assertEqual(smallest_singular_value(np.diag([1.0, 1e-7])), 0.0)
		self.assertAlmostEqual(smallest_singular_value(np.diag([1.0, 1e-5])), 1e-5, places=12)
		self.assertEqual(smallest_singular_value(np.zeros((2, 2))), 0.0)
