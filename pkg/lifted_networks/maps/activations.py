"""
Activation Registry
Activations with their derivative, inverse (when it exists) and declared properties

The properties make the hypotheses of the layer constructions checkable:
an injective stack needs a continuous strictly increasing activation, an
invertible stack additionally needs it to be surjective onto R.

Descriptors are strings so they can be stored in configs and checkpoints:
    "identity", "relu", "sigmoid", "tanh", "leaky_relu[:slope]",
    "prelu[:slope]", "gprelu:alpha:beta"
"""

import logging

import numpy as np

from ..exceptions import DomainError, InvalidParameterError, RejectedActivationError

logger = logging.getLogger(__name__)

DEFAULT_LEAKY_SLOPE = 0.01
DEFAULT_PRELU_SLOPE = 0.25


class Activation:
	"""Component-wise activation σ with σ', optional σ⁻¹ and structural flags"""

	strictly_increasing = False
	surjective = False
	continuous = True

	def __init__(self, descriptor):
		self.descriptor = descriptor

	def __call__(self, x):
		raise NotImplementedError

	def derivative(self, x):
		raise NotImplementedError

	def inverse(self, y):
		raise DomainError(f"activation '{self.descriptor}' is not invertible")

	@property
	def invertible(self):
		return self.strictly_increasing and self.surjective

	def __repr__(self):
		return f"Activation({self.descriptor!r})"


class Identity(Activation):
	strictly_increasing = True
	surjective = True

	def __init__(self):
		super().__init__("identity")

	def __call__(self, x):
		return np.asarray(x, dtype=float)

	def derivative(self, x):
		return np.ones_like(np.asarray(x, dtype=float))

	def inverse(self, y):
		return np.asarray(y, dtype=float)


class ReLU(Activation):
	"""max(0, x): monotone but flat on the negative half-line, hence not injective"""

	def __init__(self):
		super().__init__("relu")

	def __call__(self, x):
		return np.maximum(x, 0.0)

	def derivative(self, x):
		return np.where(np.asarray(x) > 0, 1.0, 0.0)


class GPReLU(Activation):
	"""
	Generalized PReLU: σ(x) = βx for x ≥ 0 and αx for x < 0

	With α, β > 0 it is strictly increasing and surjective, so it is a
	homeomorphism of R with σ⁻¹(y) = y/β for y ≥ 0 and y/α for y < 0.
	The derivative at the kink uses the β branch.
	"""

	strictly_increasing = True
	surjective = True

	def __init__(self, alpha, beta, descriptor=None):
		if not (alpha > 0 and beta > 0):
			raise InvalidParameterError(
				f"GPReLU needs alpha > 0 and beta > 0 to stay monotone, got alpha={alpha}, beta={beta}"
			)
		self.alpha = float(alpha)
		self.beta = float(beta)
		super().__init__(descriptor or f"gprelu:{self.alpha!r}:{self.beta!r}")

	def __call__(self, x):
		x = np.asarray(x, dtype=float)
		return np.where(x >= 0, self.beta * x, self.alpha * x)

	def derivative(self, x):
		return np.where(np.asarray(x) >= 0, self.beta, self.alpha)

	def inverse(self, y):
		y = np.asarray(y, dtype=float)
		return np.where(y >= 0, y / self.beta, y / self.alpha)


class Sigmoid(Activation):
	"""Logistic function, strictly increasing onto (0, 1)"""

	strictly_increasing = True

	def __init__(self):
		super().__init__("sigmoid")

	def __call__(self, x):
		return logistic(x)

	def derivative(self, x):
		s = logistic(x)
		return s * (1.0 - s)

	def inverse(self, y):
		return logit(y)


class Tanh(Activation):
	strictly_increasing = True

	def __init__(self):
		super().__init__("tanh")

	def __call__(self, x):
		return np.tanh(x)

	def derivative(self, x):
		return 1.0 - np.tanh(x) ** 2

	def inverse(self, y):
		y = np.asarray(y, dtype=float)
		if np.any(np.abs(y) >= 1.0):
			raise DomainError("tanh inverse needs values in (-1, 1)")
		return np.arctanh(y)


def logistic(x):
	"""Numerically stable eˣ/(1+eˣ); saturates to 0 / 1 without overflow"""
	x = np.asarray(x, dtype=float)
	z = np.exp(-np.abs(x))
	return np.where(x >= 0, 1.0 / (1.0 + z), z / (1.0 + z))


def logit(p):
	"""Inverse of the logistic function on (0, 1)"""
	p = np.asarray(p, dtype=float)
	if np.any((p <= 0.0) | (p >= 1.0)):
		raise DomainError("logit is only defined on the open interval (0, 1)")
	return np.log(p) - np.log1p(-p)


def gprelu(alpha, beta):
	"""Generalized PReLU activation with negative slope alpha and positive slope beta"""
	return GPReLU(alpha, beta)


def _parse_slopes(parts, expected, defaults):
	values = [float(p) for p in parts[1:]]
	if len(values) > expected:
		raise InvalidParameterError(f"activation '{parts[0]}' takes at most {expected} parameter(s)")
	return values + list(defaults[len(values) :])


def get_activation(descriptor):
	"""Resolve an activation descriptor (or pass an Activation through)"""
	if isinstance(descriptor, Activation):
		return descriptor
	if descriptor is None:
		return None

	parts = str(descriptor).strip().lower().split(":")
	name = parts[0]
	try:
		if name == "identity":
			return Identity()
		if name == "relu":
			return ReLU()
		if name == "sigmoid":
			return Sigmoid()
		if name == "tanh":
			return Tanh()
		if name == "leaky_relu":
			(slope,) = _parse_slopes(parts, 1, [DEFAULT_LEAKY_SLOPE])
			return GPReLU(slope, 1.0, descriptor=f"leaky_relu:{slope!r}")
		if name == "prelu":
			(slope,) = _parse_slopes(parts, 1, [DEFAULT_PRELU_SLOPE])
			return GPReLU(slope, 1.0, descriptor=f"prelu:{slope!r}")
		if name == "gprelu":
			alpha, beta = _parse_slopes(parts, 2, [1.0, 1.0])
			return GPReLU(alpha, beta)
	except ValueError as e:
		if isinstance(e, InvalidParameterError):
			raise
		raise InvalidParameterError(f"Malformed activation descriptor '{descriptor}': {e}")

	raise InvalidParameterError(f"Unknown activation '{descriptor}'")


def require_injective(activation):
	"""Reject activations that cannot make a width-preserving layer injective"""
	activation = get_activation(activation)
	if isinstance(activation, ReLU):
		raise RejectedActivationError(
			"ReLU is rejected: it collapses the negative orthant, so a ReLU stack is not injective "
			"and the lifted family built on it is not dense"
		)
	if not (activation.continuous and activation.strictly_increasing):
		raise RejectedActivationError(
			f"activation '{activation.descriptor}' must be continuous and strictly increasing"
		)
	return activation
