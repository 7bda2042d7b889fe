"""First-order optimizers updating parameter arrays in place"""

import numpy as np

from ..exceptions import InvalidParameterError


class SGD:
	def __init__(self, learning_rate=1e-2):
		self.learning_rate = learning_rate

	def step(self, params, grads):
		for p, g in zip(params, grads):
			p -= self.learning_rate * g


class Adam:
	"""Adam with bias-corrected first and second moment estimates"""

	def __init__(self, learning_rate=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
		self.learning_rate = learning_rate
		self.beta1 = beta1
		self.beta2 = beta2
		self.eps = eps
		self.t = 0
		self.m = None
		self.v = None

	def step(self, params, grads):
		if self.m is None:
			self.m = [np.zeros_like(p) for p in params]
			self.v = [np.zeros_like(p) for p in params]
		self.t += 1
		correction1 = 1.0 - self.beta1**self.t
		correction2 = 1.0 - self.beta2**self.t
		for p, g, m, v in zip(params, grads, self.m, self.v):
			m *= self.beta1
			m += (1.0 - self.beta1) * g
			v *= self.beta2
			v += (1.0 - self.beta2) * g * g
			p -= self.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + self.eps)


OPTIMIZERS = {"sgd": SGD, "adam": Adam}


def get_optimizer(name, learning_rate):
	try:
		return OPTIMIZERS[str(name).lower()](learning_rate)
	except KeyError:
		raise InvalidParameterError(f"Unknown optimizer '{name}', expected one of {sorted(OPTIMIZERS)}")
