"""
Sparse 1-D convolution of the deep CNN definition

A filter of sparsity s has taps w_0..w_s and is zero elsewhere;
(w⋆v)_i = Σ_j w_{i−j} v_j for i = 0..J+s−1.
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import InvalidInputError, InvalidParameterError


@dataclass(frozen=True)
class ConvFilter:
	sparsity: int
	taps: tuple

	def __post_init__(self):
		taps = tuple(float(w) for w in self.taps)
		if self.sparsity < 1:
			raise InvalidParameterError(f"filter sparsity must be at least 1, got {self.sparsity}")
		if len(taps) > self.sparsity + 1:
			raise InvalidParameterError(
				f"filter of sparsity {self.sparsity} has at most {self.sparsity + 1} taps, got {len(taps)}"
			)
		if not np.all(np.isfinite(taps)):
			raise InvalidParameterError("filter taps must be finite")
		object.__setattr__(self, "taps", taps + (0.0,) * (self.sparsity + 1 - len(taps)))

	@classmethod
	def delta(cls, sparsity=2):
		return cls(sparsity, (1.0,))

	def check_width(self, m):
		"""Conv^s layers over R^m need 2 ≤ s ≤ m"""
		if not 2 <= self.sparsity <= m:
			raise InvalidParameterError(f"filter sparsity {self.sparsity} must lie in [2, {m}]")


def conv1d_apply(w, v):
	"""w⋆v of length J + s"""
	v = np.asarray(v, dtype=float)
	if v.ndim != 1 or v.size == 0:
		raise InvalidInputError(f"convolution input must be a non-empty vector, got shape {v.shape}")
	return np.convolve(np.asarray(w.taps), v)


def conv_relu_layer(w, v, b):
	"""One deep-CNN level: relu(w⋆v − b)"""
	out = conv1d_apply(w, v)
	b = np.broadcast_to(np.asarray(b, dtype=float), out.shape)
	return np.maximum(out - b, 0.0)
