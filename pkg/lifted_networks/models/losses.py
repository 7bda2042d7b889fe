"""Training losses with their gradients with respect to the predictions"""

import numpy as np

from ..exceptions import InvalidInputError, InvalidParameterError

BCE_CLIP = 1e-12


class Loss:
	name = "loss"

	def value_and_grad(self, pred, target):
		raise NotImplementedError

	def __call__(self, pred, target):
		return self.value_and_grad(pred, target)[0]

	@staticmethod
	def _pair(pred, target):
		pred = np.asarray(pred, dtype=float)
		target = np.asarray(target, dtype=float)
		if pred.shape != target.shape:
			raise InvalidInputError(f"prediction shape {pred.shape} does not match target shape {target.shape}")
		return pred, target


class MeanSquaredError(Loss):
	name = "mse"

	def value_and_grad(self, pred, target):
		pred, target = self._pair(pred, target)
		diff = pred - target
		return float(np.mean(diff * diff)), 2.0 * diff / diff.size


class MeanAbsoluteError(Loss):
	name = "mae"

	def value_and_grad(self, pred, target):
		pred, target = self._pair(pred, target)
		diff = pred - target
		return float(np.mean(np.abs(diff))), np.sign(diff) / diff.size


class BinaryCrossEntropy(Loss):
	"""Cross entropy for probabilities in (0, 1); predictions are clipped away from 0 and 1"""

	name = "bce"

	def value_and_grad(self, pred, target):
		pred, target = self._pair(pred, target)
		p = np.clip(pred, BCE_CLIP, 1.0 - BCE_CLIP)
		value = -np.mean(target * np.log(p) + (1.0 - target) * np.log1p(-p))
		grad = (p - target) / (p * (1.0 - p)) / p.size
		return float(value), grad


LOSSES = {
	"mse": MeanSquaredError,
	"mae": MeanAbsoluteError,
	"bce": BinaryCrossEntropy,
	"binary_cross_entropy": BinaryCrossEntropy,
}


def get_loss(name):
	if isinstance(name, Loss):
		return name
	try:
		return LOSSES[str(name).lower()]()
	except KeyError:
		raise InvalidParameterError(f"Unknown loss '{name}', expected one of {sorted(LOSSES)}")
