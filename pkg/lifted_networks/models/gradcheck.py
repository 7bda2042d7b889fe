"""Central finite-difference oracle for analytic gradients"""

import numpy as np

from .network import gradient

FD_STEP = 1e-5
RELATIVE_FLOOR = 1e-3
KINK_MARGIN = 1e-3


def numerical_gradient(value_fn, params, step=FD_STEP):
	"""Central differences of value_fn() with respect to every entry of params (perturbed in place)"""
	grads = []
	for p in params:
		g = np.zeros_like(p)
		for idx in np.ndindex(p.shape):
			original = p[idx]
			p[idx] = original + step
			plus = value_fn()
			p[idx] = original - step
			minus = value_fn()
			p[idx] = original
			g[idx] = (plus - minus) / (2.0 * step)
		grads.append(g)
	return grads


def max_relative_error(analytic, numeric, floor=RELATIVE_FLOOR):
	worst = 0.0
	for a, n in zip(analytic, numeric):
		scale = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
		worst = max(worst, float(np.max(np.abs(a - n) / scale)) if a.size else 0.0)
	return worst


def kink_margin(stack, X):
	"""Smallest |pre-activation| over layers whose activation has a kink at 0"""
	_, caches = stack.forward(X, keep_cache=True)
	margin = np.inf
	for layer, (_, Z, _) in zip(stack.layers, caches):
		descriptor = layer.descriptor
		if descriptor.startswith(("relu", "gprelu", "prelu", "leaky_relu")):
			margin = min(margin, float(np.min(np.abs(Z))))
	return margin


def check_network_gradient(net, loss, X, Y):
	"""Max relative error between backprop and finite differences for a LayerStack"""
	_, analytic = gradient(net, loss, (X, Y))
	numeric = numerical_gradient(lambda: loss(net.forward(X), Y), net.parameters())
	return max_relative_error(analytic, numeric)


def check_model_gradient(model, loss, X, Y):
	"""Same check for a LiftedModel, through frozen feature maps and readout vjps"""
	_, analytic = model.loss_and_gradient(X, Y, loss)
	numeric = numerical_gradient(lambda: loss(model.predict(X), Y), model.parameters())
	return max_relative_error(analytic, numeric)
