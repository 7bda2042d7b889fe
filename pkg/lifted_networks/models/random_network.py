"""
Randomized First Layers
Frozen random affine + activation layers used as a feature map (the NN[2,k] family)

Features:
- Standardized entry laws: Bernoulli ±1 and standard Gaussian
- Full-rank certificate λ*(A)/σ_max(A) > 1e-10 per layer, resampling on failure
- Realized matrices kept on the stack so checkpoints replay without the RNG
- Empirical rank acceptance rate for a given law and size
"""

import dataclasses
import logging
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import InvalidParameterError, RankFailureError
from ..maps.activations import require_injective
from .network import Layer, LayerStack

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10
DISTRIBUTIONS = ("bernoulli_pm1", "standard_gaussian")
DEFAULT_ACTIVATION = {"bernoulli_pm1": "prelu:0.25", "standard_gaussian": "sigmoid"}


@dataclass(frozen=True)
class RandomAffineSpec:
	d_in: int
	d_out: int
	distribution: str = "bernoulli_pm1"
	seed: int = None

	def __post_init__(self):
		if self.distribution not in DISTRIBUTIONS:
			raise InvalidParameterError(
				f"Unknown entry distribution '{self.distribution}', expected one of {DISTRIBUTIONS}"
			)
		if not 1 <= self.d_in <= self.d_out:
			raise InvalidParameterError(f"random layers need 1 <= d_in <= d_out, got {self.d_in} -> {self.d_out}")


@dataclass
class RandomStack:
	k: int
	specs: list
	activation: str
	matrices: list = field(default_factory=list)
	biases: list = field(default_factory=list)
	retries: int = 0

	def to_layer_stack(self):
		layers = [
			Layer("dense", A, b, self.activation, trainable=False) for A, b in zip(self.matrices, self.biases)
		]
		return LayerStack(layers, name="random_stack")


def _draw(distribution, shape, rng):
	if distribution == "bernoulli_pm1":
		return rng.integers(0, 2, size=shape).astype(float) * 2.0 - 1.0
	return rng.standard_normal(size=shape)


def sample_random_affine(spec, rng=None):
	"""A (d_out × d_in) and b (d_out) with i.i.d. entries drawn from spec.distribution"""
	if rng is None:
		rng = np.random.default_rng(spec.seed)
	A = _draw(spec.distribution, (spec.d_out, spec.d_in), rng)
	b = _draw(spec.distribution, (spec.d_out,), rng)
	return A, b


def _rank_margin(matrices):
	"""λ*/σ_max for a stack of (n, d_out, d_in) matrices"""
	# SVD rather than the Gram spectrum: squaring would push 1e-10 below float resolution
	sv = np.linalg.svd(np.asarray(matrices, dtype=float), compute_uv=False)
	largest = sv[:, 0]
	return np.where(largest > 0, sv[:, -1] / np.where(largest > 0, largest, 1.0), 0.0)


def _layer_dims(k, dims):
	if np.isscalar(dims):
		return [int(dims)] * (k + 1)
	dims = [int(d) for d in dims]
	if len(dims) != k + 1:
		raise InvalidParameterError(f"expected {k + 1} layer widths for k={k}, got {len(dims)}")
	if any(a > b for a, b in zip(dims, dims[1:])):
		raise InvalidParameterError(f"random layer widths must be non-decreasing, got {dims}")
	return dims


def build_random_stack(k, dims, sigma=None, dist="bernoulli_pm1", rng=None, max_retries=10, sampler=None):
	"""
	Sample k frozen random layers, resampling any rank-deficient layer

	Args:
		k: number of random layers
		dims: constant width d or the k+1 widths d_0 ≤ … ≤ d_k
		sigma: strictly increasing activation (defaults to PReLU(0.25) for
			Bernoulli and sigmoid for Gaussian entries)
		rng: numpy Generator
		max_retries: resampling attempts per layer
		sampler: replacement for sample_random_affine(spec, rng)

	Returns:
		RandomStack with the realized matrices and biases
	"""
	if k < 1:
		raise InvalidParameterError(f"k must be at least 1, got {k}")
	sigma = require_injective(sigma or DEFAULT_ACTIVATION.get(dist, "prelu:0.25"))
	rng = rng if rng is not None else np.random.default_rng(0)
	sampler = sampler or sample_random_affine
	widths = _layer_dims(k, dims)
	specs = [RandomAffineSpec(d_in, d_out, dist) for d_in, d_out in zip(widths, widths[1:])]

	result = RandomStack(k=k, specs=specs, activation=sigma.descriptor)
	for i, spec in enumerate(specs):
		for attempt in range(max_retries + 1):
			A, b = sampler(spec, rng)
			margin = float(_rank_margin(np.asarray(A, dtype=float)[None])[0])
			if margin > RANK_TOLERANCE:
				break
			result.retries += 1
			logger.warning(f"Random layer {i} is rank deficient (λ*/σ_max = {margin:.3e}); resampling")
		else:
			logger.error(f"Random layer {i} stayed rank deficient after {max_retries} retries")
			raise RankFailureError(
				f"random layer {i} stayed rank deficient after {max_retries} retries (λ* = {margin:.3e})",
				smallest_singular_value=margin,
			)
		result.matrices.append(np.asarray(A, dtype=float))
		result.biases.append(np.asarray(b, dtype=float))

	if result.retries:
		logger.info(f"Random stack accepted after {result.retries} resample(s)")
	return result


def build_random_feature(k, dims, sigma=None, dist="bernoulli_pm1", rng=None, max_retries=10, sampler=None):
	"""Frozen injective FeatureMap x ↦ σ•W_k(…σ•W_1(x)) over a full-rank random stack"""
	random_stack = build_random_stack(k, dims, sigma, dist, rng, max_retries, sampler)
	feature = random_stack.to_layer_stack().freeze(kind="random", claims_injective=True)
	return dataclasses.replace(feature, metadata={"random_stack": random_stack, "distribution": dist})


def rank_acceptance_rate(dist, d, trials, seed=0):
	"""Share of sampled d×d matrices whose λ*/σ_max exceeds the rank tolerance"""
	if trials < 1:
		raise InvalidParameterError(f"trials must be at least 1, got {trials}")
	if dist not in DISTRIBUTIONS:
		raise InvalidParameterError(f"Unknown entry distribution '{dist}', expected one of {DISTRIBUTIONS}")
	rng = np.random.default_rng(seed)
	matrices = _draw(dist, (trials, d, d), rng)
	return float(np.mean(_rank_margin(matrices) > RANK_TOLERANCE))
