"""
Feature and Readout Maps
Fixed maps pre- and post-composed with a trainable core network

A FeatureMap φ: X → R^m must be continuous and injective for the lifted
family {ρ ∘ f ∘ φ} to stay dense; a ReadoutMap ρ: R^n → Y needs a continuous
section on its image. Both carry their claims as metadata so the empirical
checks (round trips, check_injectivity) can be run against them.

All maps act row-wise on 2-D batches (N, in_dim); a 1-D vector is treated as
a single row.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from ..exceptions import InvalidInputError, InvalidParameterError, NumericalFailureError
from ..geometry.manifold import (
	SPDPoint,
	poincare_exp0_batch,
	poincare_exp0_vjp_batch,
	poincare_log0_batch,
	spd_exp_batch,
	spd_exp_vjp_batch,
	spd_log_batch,
	spd_unvectorize,
	spd_vectorize,
)
from .activations import logistic, logit

logger = logging.getLogger(__name__)

SOFT_RANGE_TOLERANCE = 1e-9


def _rows(X, dim, what):
	X = np.asarray(X, dtype=float)
	single = X.ndim == 1
	if single:
		X = X[None, :]
	if X.ndim != 2 or X.shape[1] != dim:
		raise InvalidInputError(f"{what} expects rows of length {dim}, got shape {X.shape}")
	return X, single


@dataclass(frozen=True, eq=False)
class FeatureMap:
	"""
	φ: R^in_dim → R^out_dim with injectivity / invertibility claims

	kind tags the construction ("identity", "stack", "random", "skip",
	"spd_log", "poincare_log0", "custom"); stack holds the frozen layers of
	stack-based maps so they can be checkpointed.
	"""

	in_dim: int
	out_dim: int
	fn: Callable
	claims_injective: bool = False
	invertible: bool = False
	inverse_fn: Optional[Callable] = None
	kind: str = "custom"
	stack: Any = None
	metadata: dict = field(default_factory=dict)

	def apply(self, X):
		X, single = _rows(X, self.in_dim, f"feature map '{self.kind}'")
		out = np.asarray(self.fn(X), dtype=float)
		return out[0] if single else out

	__call__ = apply

	def inverse(self, Y):
		if not self.invertible or self.inverse_fn is None:
			raise InvalidInputError(f"feature map '{self.kind}' has no inverse")
		Y, single = _rows(Y, self.out_dim, f"inverse of feature map '{self.kind}'")
		out = np.asarray(self.inverse_fn(Y), dtype=float)
		return out[0] if single else out


@dataclass(frozen=True, eq=False)
class ReadoutMap:
	"""
	ρ: R^in_dim → Y ⊆ R^out_dim with an optional section and vector-Jacobian product

	vjp_fn(Z, G) returns ∂⟨G, ρ(Z)⟩/∂Z row-wise; it is what lets a core
	network be trained through a frozen readout.
	"""

	in_dim: int
	out_dim: int
	fn: Callable
	surjective_onto: str = ""
	has_section: bool = False
	section_fn: Optional[Callable] = None
	vjp_fn: Optional[Callable] = None
	kind: str = "custom"
	stack: Any = None
	metadata: dict = field(default_factory=dict)

	def apply(self, Z):
		Z, single = _rows(Z, self.in_dim, f"readout '{self.kind}'")
		out = np.asarray(self.fn(Z), dtype=float)
		return out[0] if single else out

	__call__ = apply

	def section(self, Y):
		if not self.has_section or self.section_fn is None:
			raise InvalidInputError(f"readout '{self.kind}' has no section")
		Y, single = _rows(Y, self.out_dim, f"section of readout '{self.kind}'")
		out = np.asarray(self.section_fn(Y), dtype=float)
		return out[0] if single else out

	def vjp(self, Z, G):
		if self.vjp_fn is None:
			raise InvalidInputError(f"readout '{self.kind}' does not provide gradients")
		Z, _ = _rows(Z, self.in_dim, f"readout '{self.kind}'")
		G, _ = _rows(G, self.out_dim, f"readout '{self.kind}' upstream gradient")
		return np.asarray(self.vjp_fn(Z, G), dtype=float)


# ----------------------------------------------------------------------------
# Euclidean maps
# ----------------------------------------------------------------------------


def identity_feature(n):
	return FeatureMap(n, n, lambda X: X.copy(), True, True, lambda Y: Y.copy(), kind="identity")


def identity_readout(n):
	return ReadoutMap(
		n,
		n,
		lambda Z: Z.copy(),
		surjective_onto=f"R^{n}",
		has_section=True,
		section_fn=lambda Y: Y.copy(),
		vjp_fn=lambda Z, G: G.copy(),
		kind="identity",
	)


def skip_feature(g, in_dim, g_dim=None):
	"""
	φ_g(x) = (x, g(x)): injective for any g because the first block is x itself

	g is any callable on (N, in_dim) batches (a function, FeatureMap or frozen
	stack). Its output width is measured on a zero row when g_dim is omitted.
	"""
	if g_dim is None:
		g_dim = int(np.asarray(g(np.zeros((1, in_dim)))).reshape(1, -1).shape[1])

	def fn(X):
		G = np.asarray(g(X), dtype=float).reshape(X.shape[0], g_dim)
		if not np.all(np.isfinite(G)):
			raise NumericalFailureError("skip connection function produced non-finite values")
		return np.concatenate([X, G], axis=1)

	stack = getattr(g, "stack", None) if isinstance(g, FeatureMap) else g if hasattr(g, "layers") else None
	return FeatureMap(
		in_dim,
		in_dim + g_dim,
		fn,
		claims_injective=True,
		invertible=False,
		kind="skip",
		stack=stack,
		metadata={"g_dim": g_dim},
	)


def logistic_readout(n):
	"""Component-wise logistic R^n → (0, 1)^n; its section is the logit"""

	def vjp(Z, G):
		s = logistic(Z)
		return G * s * (1.0 - s)

	return ReadoutMap(
		n,
		n,
		logistic,
		surjective_onto=f"(0,1)^{n}",
		has_section=True,
		section_fn=logit,
		vjp_fn=vjp,
		kind="logistic",
	)


def hard_threshold(alpha=0.5):
	"""
	Thresholding I_(α,1] applied component-wise to soft scores in [0, 1]

	Returns a function mapping soft scores to {0, 1}; a score exactly equal
	to α maps to 0.
	"""
	if not 0.0 < alpha < 1.0:
		raise InvalidParameterError(f"threshold alpha must lie in (0, 1), got {alpha}")

	def threshold(soft):
		soft = np.asarray(soft, dtype=float)
		if np.any(soft < -SOFT_RANGE_TOLERANCE) or np.any(soft > 1.0 + SOFT_RANGE_TOLERANCE):
			raise InvalidInputError("soft scores must lie in [0, 1]")
		return (soft > alpha).astype(int)

	return threshold


# ----------------------------------------------------------------------------
# Geometric maps
# ----------------------------------------------------------------------------


def spd_log_feature(base):
	"""P_d⁺ → R^{d(d+1)/2}: x ↦ vec(Log_A(x)), inputs given as flattened d×d matrices"""
	base = base if isinstance(base, SPDPoint) else SPDPoint(base)
	base_matrix = base.matrix
	d = base_matrix.shape[0]

	def fn(X):
		return spd_vectorize(spd_log_batch(base, X.reshape(-1, d, d)))

	def inverse(Y):
		return spd_exp_batch(base, spd_unvectorize(Y, d)).reshape(-1, d * d)

	return FeatureMap(
		d * d,
		d * (d + 1) // 2,
		fn,
		claims_injective=True,
		invertible=True,
		inverse_fn=inverse,
		kind="spd_log",
		metadata={"base": base_matrix, "d": d},
	)


def spd_exp_readout(base):
	"""R^{d(d+1)/2} → P_d⁺: z ↦ Exp_B(unvec(z)), outputs flattened d×d matrices"""
	base = base if isinstance(base, SPDPoint) else SPDPoint(base)
	base_matrix = base.matrix
	d = base_matrix.shape[0]
	log_feature = spd_log_feature(base)

	def fn(Z):
		return spd_exp_batch(base, spd_unvectorize(Z, d)).reshape(-1, d * d)

	def vjp(Z, G):
		grad = spd_exp_vjp_batch(base, spd_unvectorize(Z, d), G.reshape(-1, d, d))
		return spd_vectorize(grad)

	return ReadoutMap(
		d * (d + 1) // 2,
		d * d,
		fn,
		surjective_onto=f"P_{d}+",
		has_section=True,
		section_fn=log_feature.fn,
		vjp_fn=vjp,
		kind="spd_exp",
		metadata={"base": base_matrix, "d": d},
	)


def poincare_log0_feature(n, c=1.0):
	"""D^n_c → R^n: Log₀, a diffeomorphism onto the tangent space at the origin"""
	return FeatureMap(
		n,
		n,
		lambda X: poincare_log0_batch(X, c),
		claims_injective=True,
		invertible=True,
		inverse_fn=lambda Y: poincare_exp0_batch(Y, c),
		kind="poincare_log0",
		metadata={"c": c},
	)


def poincare_exp0_readout(n, c=1.0):
	"""R^n → D^n_c: Exp₀ with section Log₀"""
	return ReadoutMap(
		n,
		n,
		lambda Z: poincare_exp0_batch(Z, c),
		surjective_onto=f"D^{n}_{c}",
		has_section=True,
		section_fn=lambda Y: poincare_log0_batch(Y, c),
		vjp_fn=lambda Z, G: poincare_exp0_vjp_batch(Z, G, c),
		kind="poincare_exp0",
		metadata={"c": c},
	)


# ----------------------------------------------------------------------------
# Injectivity diagnostics
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class InjectivityReport:
	n_pairs: int
	violations: int
	min_separation_ratio: float


def uniform_box_sampler(dim, low=-1.0, high=1.0):
	"""Sampler drawing rows uniformly from the box [low, high]^dim"""

	def sample(rng, n):
		return rng.uniform(low, high, size=(n, dim))

	return sample


def check_injectivity(phi, sampler, n_pairs, tol=1e-6, rng=None, seed=0, max_redraws=100):
	"""
	Empirical injectivity check on random pairs

	Pairs closer than tol in input space are redrawn. A pair is a violation
	when its images are closer than tol·1e-3. The report also carries the
	smallest ratio of output to input separation over all pairs.
	"""
	if n_pairs < 1:
		raise InvalidParameterError(f"n_pairs must be at least 1, got {n_pairs}")
	rng = rng if rng is not None else np.random.default_rng(seed)

	first = np.asarray(sampler(rng, n_pairs), dtype=float)
	second = np.asarray(sampler(rng, n_pairs), dtype=float)
	for _ in range(max_redraws):
		close = np.linalg.norm(first - second, axis=1) < tol
		if not np.any(close):
			break
		second[close] = np.asarray(sampler(rng, int(np.sum(close))), dtype=float)
	else:
		logger.warning("check_injectivity could not separate every pair; keeping the closest ones")

	input_gap = np.linalg.norm(first - second, axis=1)
	output_gap = np.linalg.norm(phi(first) - phi(second), axis=1)
	violations = int(np.sum(output_gap < tol * 1e-3))
	ratio = float(np.min(output_gap / np.maximum(input_gap, np.finfo(float).tiny)))

	if violations:
		logger.info(f"check_injectivity: {violations}/{n_pairs} pairs collapsed under '{getattr(phi, 'kind', phi)}'")
	return InjectivityReport(n_pairs=n_pairs, violations=violations, min_separation_ratio=ratio)
