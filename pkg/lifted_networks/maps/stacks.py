"""
Sub-Minimal Width Layer Stacks
Width-preserving stacks φ_j(x) = σ•(exp(A_j) φ_{j−1}(x) + b_j)

exp(A_j) is always invertible, so a continuous strictly increasing σ makes
the stack injective; if σ is also surjective onto R (GPReLU, leaky ReLU) the
stack is a homeomorphism with inverse y ↦ exp(−A_j)(σ⁻¹(y) − b_j) applied
layer by layer in reverse.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import InvalidParameterError, RejectedActivationError
from ..models.network import Layer, LayerStack
from .activations import get_activation, require_injective

logger = logging.getLogger(__name__)


@dataclass
class LayerStackParams:
	"""J generators A_j (all m×m), biases b_j and one activation descriptor"""

	generators: list
	biases: list = field(default_factory=list)
	activation: str = "gprelu:0.25:1.5"

	def __post_init__(self):
		self.generators = [np.asarray(A, dtype=float) for A in self.generators]
		if not self.generators:
			raise InvalidParameterError("a layer stack needs at least one generator")
		m = self.generators[0].shape[0]
		for j, A in enumerate(self.generators):
			if A.shape != (m, m):
				raise InvalidParameterError(f"generator {j} has shape {A.shape}, expected ({m}, {m})")
		if not self.biases:
			self.biases = [np.zeros(m) for _ in self.generators]
		self.biases = [np.asarray(b, dtype=float).reshape(-1) for b in self.biases]
		if len(self.biases) != len(self.generators) or any(b.shape != (m,) for b in self.biases):
			raise InvalidParameterError(f"expected {len(self.generators)} biases of length {m}")

	@property
	def depth(self):
		return len(self.generators)

	@property
	def width(self):
		return self.generators[0].shape[0]

	@classmethod
	def identity(cls, width, depth, activation="gprelu:0.25:1.5"):
		return cls([np.zeros((width, width)) for _ in range(depth)], activation=activation)

	@classmethod
	def random(cls, width, depth, activation="gprelu:0.25:1.5", scale=0.5, rng=None):
		rng = rng if rng is not None else np.random.default_rng(0)
		generators = [rng.normal(0.0, scale / np.sqrt(width), size=(width, width)) for _ in range(depth)]
		biases = [rng.normal(0.0, scale, size=width) for _ in range(depth)]
		return cls(generators, biases, activation)


def exp_stack(params, trainable=True, name="exp_stack"):
	"""Trainable LayerStack of exp-generator layers initialised from params"""
	activation = get_activation(params.activation)
	layers = [
		Layer("exp", A, b, activation, trainable=trainable) for A, b in zip(params.generators, params.biases)
	]
	return LayerStack(layers, name=name)


def injective_stack(params):
	"""
	Frozen injective FeatureMap built from exp-generator layers

	Raises RejectedActivationError for activations that are not continuous
	and strictly increasing (ReLU in particular).
	"""
	activation = require_injective(params.activation)
	stack = exp_stack(params, trainable=False, name="injective_stack")
	feature = stack.freeze(kind="stack", claims_injective=True)
	logger.debug(
		f"Built injective stack: J={params.depth}, width={params.width}, σ={activation.descriptor}, "
		f"invertible={feature.invertible}"
	)
	return feature


def invertible_readout(params):
	"""Frozen exp-generator stack used as a readout, its inverse serving as the section"""
	activation = require_injective(params.activation)
	if not activation.surjective:
		raise RejectedActivationError(
			f"activation '{activation.descriptor}' is not surjective onto R, so the stack has no global section"
		)
	stack = exp_stack(params, trainable=False, name="invertible_readout")
	return stack.freeze_readout(kind="stack", surjective_onto=f"R^{params.width}")
