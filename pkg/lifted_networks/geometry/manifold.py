"""
Cartan-Hadamard Geometries
The SPD manifold P_d⁺ and the generalized hyperbolic (Poincaré ball) space D^n_c

SPD:
- spd_exp / spd_log: Riemannian exponential and logarithm at a base point
- spd_dist: affine-invariant geodesic distance d₊
- spd_vectorize / spd_unvectorize: isometric flat coordinates for symmetric matrices

Poincaré ball:
- mobius_add, poincare_dist, poincare_exp0 / poincare_log0 at the origin

Every array-level helper (suffix _batch) works row-wise on stacks so the
feature and readout maps can apply them to whole datasets.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..exceptions import DomainError, InvalidInputError
from .linalg import as_symmetric, spectral_fn, spectral_fn_vjp, sym_eig

logger = logging.getLogger(__name__)

SPD_TOLERANCE = 1e-12
BALL_MARGIN = 1e-12
BALL_CLAMP = 1e-9
ZERO_NORM = 1e-12


@dataclass(frozen=True, eq=False)
class SPDPoint:
	"""A d×d symmetric positive-definite matrix"""

	matrix: np.ndarray

	def __post_init__(self):
		matrix = as_symmetric(self.matrix, "SPD point")
		if matrix.ndim != 2:
			raise InvalidInputError(f"SPD point must be a single matrix, got shape {matrix.shape}")
		_, lam = sym_eig(matrix)
		if lam[-1] <= SPD_TOLERANCE:
			raise DomainError(
				f"matrix is not positive definite: smallest eigenvalue {lam[-1]:.3e}", value=float(lam[-1])
			)
		matrix.setflags(write=False)
		object.__setattr__(self, "matrix", matrix)

	@property
	def dim(self):
		return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class PoincarePoint:
	"""A point of D^n_c = {x : c‖x‖² < 1}"""

	coords: np.ndarray
	c: float = 1.0

	def __post_init__(self):
		if not self.c > 0:
			raise InvalidInputError(f"curvature parameter c must be positive, got {self.c}")
		coords = np.asarray(self.coords, dtype=float).copy()
		if coords.ndim != 1 or not np.all(np.isfinite(coords)):
			raise InvalidInputError("Poincaré point coordinates must be a finite vector")
		if self.c * float(coords @ coords) >= 1.0:
			raise DomainError(f"point lies outside the ball of curvature {self.c}")
		coords.setflags(write=False)
		object.__setattr__(self, "coords", coords)
		object.__setattr__(self, "c", float(self.c))

	@property
	def dim(self):
		return self.coords.shape[0]


@dataclass(frozen=True, eq=False)
class TangentVec:
	"""Tangent vector; for SPD geometry the coords are a symmetric matrix"""

	coords: np.ndarray

	def __post_init__(self):
		coords = np.asarray(self.coords, dtype=float).copy()
		if not np.all(np.isfinite(coords)):
			raise InvalidInputError("tangent vector has non-finite entries")
		coords.setflags(write=False)
		object.__setattr__(self, "coords", coords)

	@property
	def dim(self):
		return self.coords.shape[0]


def _as_spd(point):
	return point if isinstance(point, SPDPoint) else SPDPoint(point)


def _root_pair(base):
	"""√A and √A⁻¹ from a single eigendecomposition"""
	Q, lam = sym_eig(base.matrix)
	root = (Q * np.sqrt(lam)) @ Q.T
	inv_root = (Q / np.sqrt(lam)) @ Q.T
	return root, inv_root


# ----------------------------------------------------------------------------
# SPD manifold
# ----------------------------------------------------------------------------


def spd_exp_batch(base, V):
	"""Exp_A(V) = √A exp(√A⁻¹ V √A⁻¹) √A for a stack of symmetric V"""
	base = _as_spd(base)
	root, inv_root = _root_pair(base)
	V = as_symmetric(V, "tangent matrix")
	inner = inv_root @ V @ inv_root
	return root @ spectral_fn(inner, "exp") @ root


def spd_log_batch(base, X):
	"""Log_A(X) = √A log(√A⁻¹ X √A⁻¹) √A for a stack of SPD X"""
	base = _as_spd(base)
	root, inv_root = _root_pair(base)
	X = as_symmetric(X, "SPD matrix")
	inner = inv_root @ X @ inv_root
	return root @ spectral_fn(inner, "log") @ root


def spd_exp_vjp_batch(base, V, G):
	"""Adjoint of V ↦ Exp_A(V) for upstream gradients G of the same shape"""
	base = _as_spd(base)
	root, inv_root = _root_pair(base)
	V = as_symmetric(V, "tangent matrix")
	inner = inv_root @ V @ inv_root
	grad_exp = root @ np.asarray(G, dtype=float) @ root
	grad_inner = spectral_fn_vjp(inner, "exp", grad_exp)
	grad = inv_root @ grad_inner @ inv_root
	return 0.5 * (grad + np.swapaxes(grad, -1, -2))


def spd_exp(base, V):
	"""Riemannian exponential of the symmetric tangent matrix V at base"""
	V = as_symmetric(V.coords if isinstance(V, TangentVec) else V, "tangent matrix")
	if V.ndim != 2:
		raise InvalidInputError("spd_exp expects a single tangent matrix; use spd_exp_batch for stacks")
	return SPDPoint(spd_exp_batch(base, V))


def spd_log(base, target):
	"""Riemannian logarithm of target at base, a symmetric matrix"""
	target = _as_spd(target)
	return spd_log_batch(base, target.matrix)


def spd_dist(A, B):
	"""
	Geodesic distance d₊(A, B) = ‖log(√A⁻¹ B √A⁻¹)‖_F

	This is the norm of Log_A(B) in the Riemannian metric at A, which makes
	d₊ symmetric and consistent with spd_exp along geodesics.
	"""
	A = _as_spd(A)
	B = _as_spd(B)
	return float(spd_dist_batch(A, B.matrix[None])[0])


def spd_dist_batch(A, B):
	"""d₊ between a fixed A (or a stack matching B) and a stack of SPD B"""
	A_stack = A.matrix if isinstance(A, SPDPoint) else as_symmetric(A)
	B = as_symmetric(B, "SPD matrix")
	Q, lam = sym_eig(A_stack)
	if float(np.min(lam)) <= SPD_TOLERANCE:
		raise DomainError(f"matrix is not positive definite: smallest eigenvalue {np.min(lam):.3e}")
	inv_root = np.einsum("...ij,...j,...kj->...ik", Q, 1.0 / np.sqrt(lam), Q)
	_, inner_lam = sym_eig(inv_root @ B @ inv_root)
	if float(np.min(inner_lam)) <= 0.0:
		raise DomainError(f"matrix is not positive definite: smallest eigenvalue {np.min(inner_lam):.3e}")
	return np.sqrt(np.sum(np.log(inner_lam) ** 2, axis=-1))


def _triu(d):
	rows, cols = np.triu_indices(d)
	weights = np.where(rows == cols, 1.0, np.sqrt(2.0))
	return rows, cols, weights


def spd_vectorize(S):
	"""
	Flat coordinates of a symmetric matrix (or stack) of length d(d+1)/2

	Entries are taken row by row from the upper triangle, each row starting at
	its diagonal entry; off-diagonal entries are scaled by √2 so the map is a
	linear isometry from the Frobenius norm to the Euclidean norm.
	"""
	S = as_symmetric(S)
	rows, cols, weights = _triu(S.shape[-1])
	return S[..., rows, cols] * weights


def spd_unvectorize(v, d=None):
	"""Inverse of spd_vectorize; d is inferred from the length when omitted"""
	v = np.asarray(v, dtype=float)
	length = v.shape[-1]
	inferred = int(round((np.sqrt(8 * length + 1) - 1) / 2))
	if inferred * (inferred + 1) // 2 != length or (d is not None and d != inferred):
		raise InvalidInputError(f"vector of length {length} does not unvectorize to a {d or '?'}×{d or '?'} matrix")
	rows, cols, weights = _triu(inferred)
	S = np.zeros(v.shape[:-1] + (inferred, inferred))
	S[..., rows, cols] = v / weights
	S[..., cols, rows] = v / weights
	return S


# ----------------------------------------------------------------------------
# Poincaré ball
# ----------------------------------------------------------------------------


def _check_curvature(c):
	if not c > 0:
		raise InvalidInputError(f"curvature parameter c must be positive, got {c}")
	return float(c)


def project_to_ball(x, c):
	"""Pull rows that rounding pushed onto (or past) the boundary back inside the ball"""
	x = np.asarray(x, dtype=float)
	sq = c * np.sum(x * x, axis=-1, keepdims=True)
	outside = sq > 1.0 - BALL_MARGIN
	if np.any(outside):
		logger.warning(f"Clamping {int(np.sum(outside))} point(s) onto the ball of curvature {c}")
		radius = np.sqrt((1.0 - BALL_CLAMP) / c)
		norm = np.sqrt(np.where(outside, np.sum(x * x, axis=-1, keepdims=True), 1.0))
		x = np.where(outside, x * (radius / norm), x)
	return x


def mobius_add_batch(x, y, c):
	"""Möbius sum x ⊕_c y along the last axis"""
	c = _check_curvature(c)
	x = np.asarray(x, dtype=float)
	y = np.asarray(y, dtype=float)
	xy = np.sum(x * y, axis=-1, keepdims=True)
	x2 = np.sum(x * x, axis=-1, keepdims=True)
	y2 = np.sum(y * y, axis=-1, keepdims=True)
	numerator = (1.0 + 2.0 * c * xy + c * y2) * x + (1.0 - c * x2) * y
	denominator = 1.0 + 2.0 * c * xy + c * c * x2 * y2
	return project_to_ball(numerator / denominator, c)


def _check_pair(x, y):
	if x.dim != y.dim or x.c != y.c:
		raise InvalidInputError(
			f"points live in different balls: dim {x.dim} vs {y.dim}, c {x.c} vs {y.c}"
		)


def mobius_add(x, y):
	"""x ⊕_c y for two points of the same ball"""
	_check_pair(x, y)
	return PoincarePoint(mobius_add_batch(x.coords, y.coords, x.c), x.c)


def poincare_dist_batch(x, y, c):
	"""d_c(x, y) = (2/√c) artanh(√c ‖(−x) ⊕_c y‖) along the last axis"""
	c = _check_curvature(c)
	difference = mobius_add_batch(-np.asarray(x, dtype=float), y, c)
	norm = np.sqrt(np.sum(difference * difference, axis=-1))
	return 2.0 / np.sqrt(c) * np.arctanh(np.sqrt(c) * norm)


def poincare_dist(x, y):
	_check_pair(x, y)
	return float(poincare_dist_batch(x.coords, y.coords, x.c))


def poincare_exp0_batch(V, c):
	"""Exp₀(v) = tanh(√c‖v‖) v / (√c‖v‖), exp0(0) = 0"""
	c = _check_curvature(c)
	V = np.asarray(V, dtype=float)
	if not np.all(np.isfinite(V)):
		raise InvalidInputError("tangent vector has non-finite entries")
	scaled = np.sqrt(c) * np.sqrt(np.sum(V * V, axis=-1, keepdims=True))
	small = scaled < ZERO_NORM
	factor = np.where(small, 1.0, np.tanh(scaled) / np.where(small, 1.0, scaled))
	return project_to_ball(factor * V, c)


def poincare_log0_batch(Y, c):
	"""Log₀(y) = artanh(√c‖y‖) y / (√c‖y‖), the inverse of poincare_exp0_batch"""
	c = _check_curvature(c)
	Y = np.asarray(Y, dtype=float)
	sq = c * np.sum(Y * Y, axis=-1, keepdims=True)
	if np.any(sq > 1.0 - BALL_MARGIN):
		raise DomainError(f"log0 needs points strictly inside the ball of curvature {c}")
	scaled = np.sqrt(sq)
	small = scaled < ZERO_NORM
	factor = np.where(small, 1.0, np.arctanh(scaled) / np.where(small, 1.0, scaled))
	return factor * Y


def poincare_exp0_vjp_batch(V, G, c):
	"""Adjoint of v ↦ Exp₀(v): h(r) g + (h'(r)/r) v ⟨v, g⟩ with h(r) = tanh(√c r)/(√c r)"""
	c = _check_curvature(c)
	V = np.asarray(V, dtype=float)
	G = np.asarray(G, dtype=float)
	r = np.sqrt(np.sum(V * V, axis=-1, keepdims=True))
	u = np.sqrt(c) * r
	small = u < 1e-4
	safe_u = np.where(small, 1.0, u)
	safe_r = np.where(small, 1.0, r)
	h = np.where(small, 1.0 - u * u / 3.0, np.tanh(safe_u) / safe_u)
	# (dh/dr) / r, with the series limit −2c/3 near the origin
	slope = np.sqrt(c) * (safe_u / np.cosh(safe_u) ** 2 - np.tanh(safe_u)) / safe_u**2
	h_prime_over_r = np.where(small, -2.0 * c / 3.0, slope / safe_r)
	return h * G + h_prime_over_r * V * np.sum(V * G, axis=-1, keepdims=True)


def poincare_exp0(v, c=1.0):
	"""Exponential map of D^n_c at the origin"""
	coords = v.coords if isinstance(v, TangentVec) else np.asarray(v, dtype=float)
	return PoincarePoint(poincare_exp0_batch(coords, c), c)


def poincare_log0(y):
	"""Logarithm map of D^n_c at the origin"""
	return TangentVec(poincare_log0_batch(y.coords, y.c))
