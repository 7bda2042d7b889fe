"""
Feed-Forward Network
Affine layers with component-wise activations and exact reverse-mode gradients

Layer kinds:
- dense: h ↦ σ(W h + b) with W stored directly (Glorot-uniform init)
- exp:   h ↦ σ(exp(A) h + b) with the generator A stored (zero init, so the
         layer starts as the identity and exp(A) is always invertible)

A LayerStack is any chain of layers; a Network is a LayerStack whose final
layer is affine, the core f of a lifted model ρ ∘ f ∘ φ.
"""

import copy
import logging

import numpy as np

from ..exceptions import InvalidCompositionError, InvalidInputError, NumericalFailureError
from ..geometry.linalg import matrix_exp, matrix_exp_vjp
from ..maps.activations import get_activation
from ..maps.feature_maps import FeatureMap, ReadoutMap

logger = logging.getLogger(__name__)

LAYER_KINDS = ("dense", "exp")


def glorot_uniform(fan_in, fan_out, rng):
	limit = np.sqrt(6.0 / (fan_in + fan_out))
	return rng.uniform(-limit, limit, size=(fan_out, fan_in))


class Layer:
	"""One affine map followed by an optional activation"""

	def __init__(self, kind, weight, bias, activation=None, trainable=True):
		if kind not in LAYER_KINDS:
			raise InvalidInputError(f"Unknown layer kind '{kind}', expected one of {LAYER_KINDS}")
		weight = np.array(weight, dtype=float)
		bias = np.array(bias, dtype=float).reshape(-1)
		if weight.ndim != 2:
			raise InvalidInputError(f"layer weight must be a matrix, got shape {weight.shape}")
		if kind == "exp" and weight.shape[0] != weight.shape[1]:
			raise InvalidInputError(f"exp-generator layers need a square generator, got {weight.shape}")
		if bias.shape[0] != weight.shape[0]:
			raise InvalidInputError(f"bias of length {bias.shape[0]} does not match {weight.shape[0]} outputs")
		if not (np.all(np.isfinite(weight)) and np.all(np.isfinite(bias))):
			raise InvalidInputError("layer parameters must be finite")

		self.kind = kind
		self.weight = weight
		self.bias = bias
		self.activation = get_activation(activation)
		self.trainable = trainable

	@classmethod
	def dense(cls, in_dim, out_dim, activation=None, rng=None, trainable=True):
		rng = rng if rng is not None else np.random.default_rng(0)
		return cls("dense", glorot_uniform(in_dim, out_dim, rng), np.zeros(out_dim), activation, trainable)

	@classmethod
	def exp_generator(cls, dim, activation=None, trainable=True):
		return cls("exp", np.zeros((dim, dim)), np.zeros(dim), activation, trainable)

	@property
	def in_dim(self):
		return self.weight.shape[1]

	@property
	def out_dim(self):
		return self.weight.shape[0]

	@property
	def descriptor(self):
		return self.activation.descriptor if self.activation is not None else "none"

	def weight_matrix(self):
		return matrix_exp(self.weight) if self.kind == "exp" else self.weight

	def parameters(self):
		return [self.weight, self.bias]

	def forward(self, X):
		W = self.weight_matrix()
		Z = X @ W.T + self.bias
		H = self.activation(Z) if self.activation is not None else Z
		return H, (X, Z, W)

	def backward(self, cache, G):
		"""Returns ([∂weight, ∂bias], ∂input) for upstream gradient G on the output"""
		X, Z, W = cache
		if self.activation is not None:
			G = G * self.activation.derivative(Z)
		grad_W = G.T @ X
		grad_bias = G.sum(axis=0)
		grad_input = G @ W
		if self.kind == "exp":
			grad_W = matrix_exp_vjp(self.weight, grad_W)
		return [grad_W, grad_bias], grad_input

	def inverse(self, Y):
		if self.activation is not None:
			Y = self.activation.inverse(Y)
		shifted = Y - self.bias
		if self.kind == "exp":
			return shifted @ matrix_exp(-self.weight).T
		return np.linalg.solve(self.weight, shifted.T).T

	@property
	def invertible(self):
		square = self.weight.shape[0] == self.weight.shape[1]
		return square and (self.activation is None or self.activation.invertible)

	def __repr__(self):
		return f"Layer({self.kind}, {self.in_dim}->{self.out_dim}, {self.descriptor})"


class LayerStack:
	"""Chain of layers x ↦ L_J(…L_1(x)); trainable layers expose their parameters"""

	def __init__(self, layers, name="stack"):
		layers = list(layers)
		if not layers:
			raise InvalidCompositionError("a layer stack needs at least one layer", boundary=name)
		for i, (left, right) in enumerate(zip(layers, layers[1:])):
			if left.out_dim != right.in_dim:
				raise InvalidCompositionError(
					f"{name}: layer {i} outputs {left.out_dim} values but layer {i + 1} expects {right.in_dim}",
					boundary=f"{name}[{i}]->{name}[{i + 1}]",
				)
		self.layers = layers
		self.name = name

	@property
	def in_dim(self):
		return self.layers[0].in_dim

	@property
	def out_dim(self):
		return self.layers[-1].out_dim

	def _rows(self, X):
		X = np.asarray(X, dtype=float)
		single = X.ndim == 1
		if single:
			X = X[None, :]
		if X.ndim != 2 or X.shape[1] != self.in_dim:
			raise InvalidInputError(f"{self.name} expects inputs of length {self.in_dim}, got shape {X.shape}")
		return X, single

	def forward(self, X, keep_cache=False):
		X, single = self._rows(X)
		caches = []
		for layer in self.layers:
			X, cache = layer.forward(X)
			caches.append(cache)
		out = X[0] if single else X
		return (out, caches) if keep_cache else out

	__call__ = forward

	def backward(self, caches, G):
		"""Parameter gradients (aligned with parameters()) and the input gradient"""
		grads = []
		for layer, cache in zip(reversed(self.layers), reversed(caches)):
			layer_grads, G = layer.backward(cache, G)
			if layer.trainable:
				grads = layer_grads + grads
		return grads, G

	def parameters(self):
		return [p for layer in self.layers if layer.trainable for p in layer.parameters()]

	def parameter_count(self):
		return int(sum(p.size for p in self.parameters()))

	@property
	def invertible(self):
		return all(layer.invertible for layer in self.layers)

	@property
	def injective(self):
		"""exp-generator layers with strictly increasing activations compose to an injection"""
		return all(
			layer.kind == "exp" and (layer.activation is None or layer.activation.strictly_increasing)
			for layer in self.layers
		)

	def inverse(self, Y):
		if not self.invertible:
			raise InvalidInputError(f"{self.name} is not invertible")
		Y = np.asarray(Y, dtype=float)
		single = Y.ndim == 1
		Y = Y[None, :] if single else Y
		for layer in reversed(self.layers):
			Y = layer.inverse(Y)
		return Y[0] if single else Y

	def copy(self, trainable=None):
		clone = copy.deepcopy(self)
		if trainable is not None:
			for layer in clone.layers:
				layer.trainable = trainable
		return clone

	def freeze(self, kind="stack", claims_injective=None):
		"""Snapshot as an immutable FeatureMap; later training of self does not affect it"""
		frozen = self.copy(trainable=False)
		invertible = frozen.invertible
		return FeatureMap(
			frozen.in_dim,
			frozen.out_dim,
			frozen.forward,
			claims_injective=frozen.injective if claims_injective is None else claims_injective,
			invertible=invertible,
			inverse_fn=frozen.inverse if invertible else None,
			kind=kind,
			stack=frozen,
		)

	def freeze_readout(self, kind="stack", surjective_onto=None):
		"""Snapshot as a ReadoutMap whose section is the stack inverse (when it exists)"""
		frozen = self.copy(trainable=False)
		invertible = frozen.invertible

		def vjp(Z, G):
			_, caches = frozen.forward(Z, keep_cache=True)
			return frozen.backward(caches, G)[1]

		return ReadoutMap(
			frozen.in_dim,
			frozen.out_dim,
			frozen.forward,
			surjective_onto=surjective_onto or (f"R^{frozen.out_dim}" if invertible else ""),
			has_section=invertible,
			section_fn=frozen.inverse if invertible else None,
			vjp_fn=vjp,
			kind=kind,
			stack=frozen,
		)

	def __repr__(self):
		return f"{type(self).__name__}({self.name}: {self.layers})"


class Network(LayerStack):
	"""Core network f(x) = W ∘ σ•(W_J … σ•(W_1 x)): the final layer carries no activation"""

	def __init__(self, layers, name="core"):
		super().__init__(layers, name)
		if self.layers[-1].activation is not None:
			raise InvalidCompositionError(
				f"{name}: the final layer must be affine, found activation '{self.layers[-1].descriptor}'",
				boundary=f"{name}[-1]",
			)

	@classmethod
	def feedforward(cls, in_dim, hidden, out_dim, activation="relu", rng=None, name="core"):
		"""Dense net in_dim → hidden[0] → … → hidden[-1] → out_dim with σ on hidden layers"""
		rng = rng if rng is not None else np.random.default_rng(0)
		widths = [in_dim, *hidden]
		layers = [Layer.dense(a, b, activation, rng) for a, b in zip(widths, widths[1:])]
		layers.append(Layer.dense(widths[-1], out_dim, None, rng))
		return cls(layers, name)


def forward(net, x):
	"""Evaluate a network on one vector or a batch of rows"""
	return net.forward(x)


def gradient(net, loss, batch, batch_index=0):
	"""
	Loss value and parameter gradients on one batch

	Args:
		net: LayerStack or Network
		loss: a Loss from models.losses
		batch: (X, Y) arrays with matching row counts

	Returns:
		(value, grads) with grads aligned with net.parameters()
	"""
	X, Y = batch
	X = np.atleast_2d(np.asarray(X, dtype=float))
	if X.shape[0] == 0:
		raise InvalidInputError("gradient needs a non-empty batch")
	Y = np.asarray(Y, dtype=float).reshape(X.shape[0], -1)
	out, caches = net.forward(X, keep_cache=True)
	value, G = loss.value_and_grad(out, Y)
	if not np.isfinite(value):
		logger.error(f"Non-finite {loss.name} loss on batch {batch_index}")
		raise NumericalFailureError(f"non-finite {loss.name} loss on batch {batch_index}", batch_index=batch_index)
	grads, _ = net.backward(caches, G)
	return value, grads
