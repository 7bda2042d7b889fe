"""
Dense Linear Algebra Kernels
Eigendecomposition, spectral matrix functions and the general matrix exponential

Features:
- Cyclic Jacobi eigensolver for (stacks of) small dense symmetric matrices
- Spectral functions sqrt / log / exp / inv_sqrt with their reverse-mode adjoints
- Scaling-and-squaring matrix exponential with an exact series gradient
- Singular values via the Gram matrix
"""

import logging
import math

import numpy as np

from ..exceptions import DomainError, InvalidInputError, NumericalFailureError

logger = logging.getLogger(__name__)

RECONSTRUCTION_TOLERANCE = 1e-10
JACOBI_OFF_TOLERANCE = 1e-14
JACOBI_MAX_SWEEPS = 100
# σ/σ_max cutoff for the Gram route; squaring limits it to about sqrt(machine eps).
# models.random_network resolves 1e-10 ratios through a direct SVD instead.
RANK_TOLERANCE = 1e-6
LOEWNER_TOLERANCE = 1e-8

EXP_TAYLOR_ORDER = 18
EXP_SCALED_NORM = 0.5
EXP_COEFFICIENTS = [1.0 / math.factorial(k) for k in range(EXP_TAYLOR_ORDER + 1)]


def as_matrix(A, name="matrix"):
	"""Coerce to a finite 2-D float64 array"""
	A = np.asarray(A, dtype=float)
	if A.ndim != 2:
		raise InvalidInputError(f"{name} must be 2-dimensional, got shape {A.shape}")
	if not np.all(np.isfinite(A)):
		raise InvalidInputError(f"{name} has non-finite entries")
	return A


def as_square(A, name="matrix"):
	A = as_matrix(A, name)
	if A.shape[0] != A.shape[1]:
		raise InvalidInputError(f"{name} must be square, got shape {A.shape}")
	return A


def as_symmetric(S, name="matrix"):
	"""
	Coerce a matrix, or a stack of matrices with shape (..., d, d), to exactly
	symmetric float64 by averaging with the transpose.
	"""
	S = np.asarray(S, dtype=float)
	if S.ndim < 2 or S.shape[-1] != S.shape[-2]:
		raise InvalidInputError(f"{name} must be square, got shape {S.shape}")
	if not np.all(np.isfinite(S)):
		raise InvalidInputError(f"{name} has non-finite entries")
	return 0.5 * (S + np.swapaxes(S, -1, -2))


def _off_diagonal_norm(A):
	"""Frobenius norm of the off-diagonal part, summed from the entries themselves"""
	d = A.shape[-1]
	off = (A * A)[:, ~np.eye(d, dtype=bool)]
	return np.sqrt(np.sum(off, axis=1))


def _jacobi_rotate(A, V, p, q):
	"""Annihilate A[:, p, q] in every matrix of the stack with one Givens rotation each; returns the rotation count"""
	apq = A[:, p, q]
	active = apq != 0.0
	theta = np.where(active, (A[:, q, q] - A[:, p, p]) / (2.0 * np.where(active, apq, 1.0)), 0.0)
	sign = np.where(theta >= 0.0, 1.0, -1.0)
	t = np.where(active, sign / (np.abs(theta) + np.hypot(theta, 1.0)), 0.0)
	c = (1.0 / np.sqrt(t * t + 1.0))[:, None]
	s = t[:, None] * c

	row_p = A[:, p, :].copy()
	row_q = A[:, q, :].copy()
	A[:, p, :] = c * row_p - s * row_q
	A[:, q, :] = s * row_p + c * row_q

	col_p = A[:, :, p].copy()
	col_q = A[:, :, q].copy()
	A[:, :, p] = c * col_p - s * col_q
	A[:, :, q] = s * col_p + c * col_q

	A[:, p, q] = np.where(active, 0.0, A[:, p, q])
	A[:, q, p] = np.where(active, 0.0, A[:, q, p])

	vec_p = V[:, :, p].copy()
	vec_q = V[:, :, q].copy()
	V[:, :, p] = c * vec_p - s * vec_q
	V[:, :, q] = s * vec_p + c * vec_q
	return int(np.count_nonzero(active))


def sym_eig(S):
	"""
	Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations

	Args:
		S: symmetric matrix (d, d) or stack (..., d, d)

	Returns:
		(Q, lam) with Q orthogonal (columns are eigenvectors) and lam sorted
		descending, so that Q diag(lam) Qᵀ = S.
	"""
	S = as_symmetric(S)
	d = S.shape[-1]
	batch_shape = S.shape[:-2]
	A = S.reshape(-1, d, d).copy()
	n = A.shape[0]
	V = np.broadcast_to(np.eye(d), (n, d, d)).copy()
	scale = np.maximum(1.0, np.linalg.norm(A, axis=(1, 2)))

	for sweep in range(JACOBI_MAX_SWEEPS):
		worst = float(np.max(_off_diagonal_norm(A) / scale)) if n else 0.0
		if worst <= JACOBI_OFF_TOLERANCE:
			break
		rotations = 0
		for p in range(d - 1):
			for q in range(p + 1, d):
				rotations += _jacobi_rotate(A, V, p, q)
		if rotations == 0:
			break

	lam = np.einsum("nii->ni", A).copy()
	order = np.argsort(-lam, axis=1, kind="stable")
	lam = np.take_along_axis(lam, order, axis=1)
	V = np.take_along_axis(V, order[:, None, :], axis=2)

	reconstruction = np.einsum("nij,nj,nkj->nik", V, lam, V)
	residual = np.linalg.norm(reconstruction - S.reshape(-1, d, d), axis=(1, 2)) / scale
	if n and float(np.max(residual)) > RECONSTRUCTION_TOLERANCE:
		worst_residual = float(np.max(residual))
		logger.error(f"Jacobi eigensolver did not converge: relative residual {worst_residual:.3e}")
		raise NumericalFailureError(
			f"Jacobi eigensolver did not converge (relative residual {worst_residual:.3e})",
			residual=worst_residual,
		)

	return V.reshape(*batch_shape, d, d), lam.reshape(*batch_shape, d)


def _sqrt_derivative(lam):
	return 0.5 / np.sqrt(lam)


def _inv_sqrt(lam):
	return 1.0 / np.sqrt(lam)


def _inv_sqrt_derivative(lam):
	return -0.5 / (lam * np.sqrt(lam))


def _reciprocal(lam):
	return 1.0 / lam


# name -> (f, f', requires positive spectrum)
SPECTRAL_FUNCTIONS = {
	"sqrt": (np.sqrt, _sqrt_derivative, True),
	"log": (np.log, _reciprocal, True),
	"exp": (np.exp, np.exp, False),
	"inv_sqrt": (_inv_sqrt, _inv_sqrt_derivative, True),
}


def _spectral_entry(name):
	try:
		return SPECTRAL_FUNCTIONS[name]
	except KeyError:
		raise InvalidInputError(
			f"Unknown spectral function '{name}', expected one of {sorted(SPECTRAL_FUNCTIONS)}"
		)


def _check_spectrum(name, lam, needs_positive):
	if needs_positive and lam.size and float(np.min(lam)) <= 0.0:
		smallest = float(np.min(lam))
		raise DomainError(
			f"spectral {name} needs a positive-definite argument, smallest eigenvalue is {smallest:.3e}",
			value=smallest,
		)


def spectral_fn(S, f):
	"""Apply a scalar function to the spectrum: Q f(Λ) Qᵀ (accepts stacks)"""
	fn, _, needs_positive = _spectral_entry(f)
	Q, lam = sym_eig(S)
	_check_spectrum(f, lam, needs_positive)
	result = np.einsum("...ij,...j,...kj->...ik", Q, fn(lam), Q)
	return 0.5 * (result + np.swapaxes(result, -1, -2))


def spectral_fn_vjp(S, f, G):
	"""
	Reverse-mode adjoint of S ↦ spectral_fn(S, f)

	Uses the Loewner matrix of divided differences: for S = QΛQᵀ the
	gradient is Q (L ∘ (Qᵀ G Q)) Qᵀ with L_ij = (f(λi) − f(λj)) / (λi − λj),
	and f'(λ) on the (near) diagonal.
	"""
	fn, dfn, needs_positive = _spectral_entry(f)
	Q, lam = sym_eig(S)
	_check_spectrum(f, lam, needs_positive)
	G = np.asarray(G, dtype=float)

	values = fn(lam)
	slopes = dfn(lam)
	li = lam[..., :, None]
	lj = lam[..., None, :]
	gap = li - lj
	close = np.abs(gap) <= LOEWNER_TOLERANCE * np.maximum(1.0, np.maximum(np.abs(li), np.abs(lj)))
	divided = (values[..., :, None] - values[..., None, :]) / np.where(close, 1.0, gap)
	loewner = np.where(close, 0.5 * (slopes[..., :, None] + slopes[..., None, :]), divided)

	rotated = np.einsum("...ji,...jk,...kl->...il", Q, G, Q)
	return np.einsum("...ij,...jk,...lk->...il", Q, loewner * rotated, Q)


def _exp_scaling(A):
	norm = float(np.linalg.norm(A))
	if norm <= EXP_SCALED_NORM:
		return 0
	return int(math.ceil(math.log2(norm / EXP_SCALED_NORM)))


def _matrix_exp_forward(A):
	squarings = _exp_scaling(A)
	scaled = A / 2.0**squarings
	identity = np.eye(A.shape[0])

	# horner[j] = H_{K-j},  H_K = c_K I,  H_k = S H_{k+1} + c_k I
	horner = [EXP_COEFFICIENTS[EXP_TAYLOR_ORDER] * identity]
	for k in range(EXP_TAYLOR_ORDER - 1, -1, -1):
		horner.append(scaled @ horner[-1] + EXP_COEFFICIENTS[k] * identity)

	squares = [horner[-1]]
	for _ in range(squarings):
		squares.append(squares[-1] @ squares[-1])

	return squares[-1], (scaled, squarings, horner, squares)


def matrix_exp(A):
	"""
	Matrix exponential by scaling and squaring of a truncated Taylor series

	A is scaled by 2^-s until its Frobenius norm is at most 0.5, the series
	is evaluated in Horner form and the result squared s times.
	exp(0) is exactly the identity.
	"""
	A = as_square(A)
	E, _ = _matrix_exp_forward(A)
	return E


def matrix_exp_vjp(A, G):
	"""Gradient of ⟨G, exp(A)⟩ with respect to A, through every squaring and series term"""
	A = as_square(A)
	G = np.asarray(G, dtype=float)
	if G.shape != A.shape:
		raise InvalidInputError(f"upstream gradient shape {G.shape} does not match {A.shape}")
	_, (scaled, squarings, horner, squares) = _matrix_exp_forward(A)

	for i in range(squarings - 1, -1, -1):
		E = squares[i]
		G = G @ E.T + E.T @ G

	grad_scaled = np.zeros_like(scaled)
	for j in range(len(horner) - 1, 0, -1):
		grad_scaled += G @ horner[j - 1].T
		G = scaled.T @ G

	return grad_scaled / 2.0**squarings


def singular_values(A):
	"""Singular values in descending order, from the eigenvalues of the smaller Gram matrix"""
	A = as_matrix(A)
	gram = A.T @ A if A.shape[0] >= A.shape[1] else A @ A.T
	_, lam = sym_eig(gram)
	sigma = np.sqrt(np.clip(lam, 0.0, None))
	return np.where(sigma <= RANK_TOLERANCE * sigma[0], 0.0, sigma)


def smallest_singular_value(A):
	"""λ*(A): the smallest singular value, exactly 0 for rank-deficient A"""
	return float(singular_values(A)[-1])
