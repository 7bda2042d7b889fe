"""
Lifted Model
The composition g = ρ ∘ f ∘ φ of a feature map, a core network and a readout

φ and ρ are either frozen maps (FeatureMap / ReadoutMap) or trainable
LayerStacks. Gradients flow through frozen readouts via their vjp, so the
core can be fitted through fixed manifold maps.
"""

import logging

import numpy as np

from ..exceptions import InvalidCompositionError, InvalidInputError, NumericalFailureError
from ..maps.feature_maps import FeatureMap, ReadoutMap
from .network import LayerStack

logger = logging.getLogger(__name__)


def _check_part(part, allowed, role):
	if not isinstance(part, (*allowed, LayerStack)):
		raise InvalidCompositionError(
			f"{role} must be a {' or '.join(t.__name__ for t in allowed)} or a LayerStack, got {type(part).__name__}",
			boundary=role,
		)


class LiftedModel:
	def __init__(self, phi, core, rho, name="lifted"):
		_check_part(phi, (FeatureMap,), "phi")
		_check_part(rho, (ReadoutMap,), "rho")
		if not isinstance(core, LayerStack):
			raise InvalidCompositionError(f"core must be a Network, got {type(core).__name__}", boundary="core")
		if phi.out_dim != core.in_dim:
			raise InvalidCompositionError(
				f"feature map outputs {phi.out_dim} values but the core expects {core.in_dim}",
				boundary="phi->core",
			)
		if core.out_dim != rho.in_dim:
			raise InvalidCompositionError(
				f"core outputs {core.out_dim} values but the readout expects {rho.in_dim}",
				boundary="core->rho",
			)
		self.phi = phi
		self.core = core
		self.rho = rho
		self.name = name

	@property
	def in_dim(self):
		return self.phi.in_dim

	@property
	def out_dim(self):
		return self.rho.out_dim

	@property
	def phi_trainable(self):
		return isinstance(self.phi, LayerStack) and bool(self.phi.parameters())

	@property
	def rho_trainable(self):
		return isinstance(self.rho, LayerStack) and bool(self.rho.parameters())

	def _parts(self):
		return [part for part in (self.phi, self.core, self.rho) if isinstance(part, LayerStack)]

	def parameters(self):
		return [p for part in self._parts() for p in part.parameters()]

	def trainable_parameter_count(self):
		return int(sum(p.size for p in self.parameters()))

	def snapshot(self):
		return [p.copy() for p in self.parameters()]

	def restore(self, snapshot):
		for p, saved in zip(self.parameters(), snapshot):
			p[...] = saved

	def features(self, X):
		"""φ(X) for a batch of rows"""
		return self.phi.forward(X) if isinstance(self.phi, LayerStack) else self.phi.apply(X)

	def forward_from_features(self, F):
		Z = self.core.forward(F)
		return self.rho.forward(Z) if isinstance(self.rho, LayerStack) else self.rho.apply(Z)

	def predict(self, X):
		X = np.asarray(X, dtype=float)
		single = X.ndim == 1
		out = self.forward_from_features(self.features(np.atleast_2d(X)))
		return out[0] if single else out

	__call__ = predict

	def loss_and_gradient(self, X, Y, loss, features=None, batch_index=0):
		"""
		Loss value and gradients aligned with parameters()

		features may carry a precomputed φ(X) when φ is frozen.
		"""
		X = np.atleast_2d(np.asarray(X, dtype=float))
		Y = np.asarray(Y, dtype=float).reshape(X.shape[0], -1)

		phi_cache = None
		if isinstance(self.phi, LayerStack):
			F, phi_cache = self.phi.forward(X, keep_cache=True)
		elif features is not None:
			F = np.atleast_2d(features)
		else:
			F = self.phi.apply(X)

		Z, core_cache = self.core.forward(F, keep_cache=True)
		rho_cache = None
		if isinstance(self.rho, LayerStack):
			out, rho_cache = self.rho.forward(Z, keep_cache=True)
		else:
			out = self.rho.apply(Z)

		value, G = loss.value_and_grad(out, Y)
		if not np.isfinite(value):
			logger.error(f"{self.name}: non-finite {loss.name} loss on batch {batch_index}")
			raise NumericalFailureError(
				f"non-finite {loss.name} loss on batch {batch_index}", batch_index=batch_index
			)

		rho_grads = []
		if rho_cache is not None:
			rho_grads, G = self.rho.backward(rho_cache, G)
		else:
			try:
				G = self.rho.vjp(Z, G)
			except InvalidInputError as e:
				raise InvalidCompositionError(str(e), boundary="core->rho")
		core_grads, G = self.core.backward(core_cache, G)
		phi_grads = []
		if phi_cache is not None:
			phi_grads, _ = self.phi.backward(phi_cache, G)

		return value, phi_grads + core_grads + rho_grads

	def __repr__(self):
		return f"LiftedModel({self.name}: {self.phi.in_dim}->{self.core.in_dim}->{self.core.out_dim}->{self.rho.out_dim})"


def lift(phi, core, rho, name="lifted"):
	"""The lifted model x ↦ ρ(f(φ(x)))"""
	return LiftedModel(phi, core, rho, name)
