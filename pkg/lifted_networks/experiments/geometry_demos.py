"""
Manifold Regression Demos
Fit lifted networks Exp ∘ f ∘ Log between manifolds and track the uniform error over widths

- SPDRegressionDemo: P_d⁺ → P_d⁺ with φ = vec ∘ Log_A and ρ = Exp_B ∘ unvec
- HyperbolicRegressionDemo: D^n_c → D^n_c with φ = Log₀ and ρ = Exp₀, per curvature

Each target is fitted at increasing widths. The first core starts at the tangent
identity (core_init = tangent_identity) or at Glorot init; every wider core starts
from the previous fit with silent extra units. A trained core is kept only when it
does not raise the sup error on a held-out validation sample.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..config import default_config
from ..evaluation import sup_error_on_grid
from ..exceptions import ConfigError, NumericalFailureError, TrainingDivergedError
from ..geometry.manifold import (
	SPDPoint,
	poincare_exp0_batch,
	poincare_log0_batch,
	spd_exp_batch,
	spd_log_batch,
	spd_unvectorize,
	spd_vectorize,
)
from ..maps.feature_maps import (
	poincare_exp0_readout,
	poincare_log0_feature,
	spd_exp_readout,
	spd_log_feature,
)
from ..models.lifted_model import lift
from ..models.network import Layer, Network, glorot_uniform
from ..models.training import TrainConfig, train

logger = logging.getLogger(__name__)

TARGETS = ("identity", "linear", "nonlinear")
CORE_INITS = ("tangent_identity", "glorot")


@dataclass
class DemoResult:
	experiment: str
	rows: list = field(default_factory=list)
	models: dict = field(default_factory=dict)
	checks: dict = field(default_factory=dict)

	@property
	def passed(self):
		return all(self.checks.values())


def non_increasing(errors, slack=1e-12):
	return all(b <= a + slack for a, b in zip(errors, errors[1:]))


def tangent_target(kind, n, rng):
	"""Map on flat tangent coordinates: identity, random linear L, or L plus a smooth bend"""
	if kind not in TARGETS:
		raise ConfigError(f"Unknown target '{kind}', expected one of {TARGETS}")
	if kind == "identity":
		return lambda Z: Z.copy()
	L = np.eye(n) + 0.5 * rng.standard_normal((n, n)) / np.sqrt(n)
	if kind == "linear":
		return lambda Z: Z @ L.T
	return lambda Z: Z @ L.T + 0.5 * np.sin(2.0 * Z)


def random_spd(rng, count, d, spread=1.0):
	"""SPD matrices exp(S) for symmetric Gaussian S, flattened to rows of length d²"""
	S = rng.standard_normal((count, d, d)) * spread / np.sqrt(2.0)
	return spd_exp_batch(np.eye(d), S).reshape(count, d * d)


def random_ball(rng, count, n, radius):
	"""Points uniform in the Euclidean ball of the given radius"""
	direction = rng.standard_normal((count, n))
	direction /= np.linalg.norm(direction, axis=1, keepdims=True)
	r = radius * rng.uniform(0.0, 1.0, size=(count, 1)) ** (1.0 / n)
	return direction * r


def tangent_identity_core(dim, width, rng, name="core"):
	"""
	ReLU core equal to the identity on R^dim: units ±e_i carry x = relu(x) - relu(-x)

	Units past the first 2·dim get Glorot input weights and zero output weights,
	so they start silent and the network still computes the identity exactly.
	"""
	if width < 2 * dim:
		raise ConfigError(f"tangent_identity needs width >= {2 * dim} for dimension {dim}, got {width}")
	W1 = np.zeros((width, dim))
	W1[:dim] = np.eye(dim)
	W1[dim : 2 * dim] = -np.eye(dim)
	W1[2 * dim :] = glorot_uniform(dim, width, rng)[: width - 2 * dim]
	W2 = np.zeros((dim, width))
	W2[:, :dim] = np.eye(dim)
	W2[:, dim : 2 * dim] = -np.eye(dim)
	hidden = Layer("dense", W1, np.zeros(width), "relu")
	return Network([hidden, Layer("dense", W2, np.zeros(dim))], name=name)


def widen_core(core, width, rng):
	"""Copy of a one-hidden-layer core with extra silent units; computes the same function"""
	hidden, out = core.layers
	extra = width - hidden.out_dim
	if extra < 0:
		raise ConfigError(f"cannot narrow a width-{hidden.out_dim} core to {width}")
	W1 = np.vstack([hidden.weight, glorot_uniform(hidden.in_dim, width, rng)[:extra]])
	b1 = np.concatenate([hidden.bias, np.zeros(extra)])
	W2 = np.hstack([out.weight, np.zeros((out.out_dim, extra))])
	layers = [Layer("dense", W1, b1, hidden.descriptor), Layer("dense", W2, out.bias.copy())]
	return Network(layers, name=core.name)


@dataclass
class Problem:
	"""One target on one manifold: frozen maps, samples and the error metric"""

	phi: object
	rho: object
	X: np.ndarray
	target: object
	validation: np.ndarray
	test: np.ndarray
	metric: str


class _WidthSweep:
	name = "demo"

	def __init__(self, config=None):
		self.config = config or self._default_config()

	def _default_config(self):
		return default_config(self.name)

	def _targets(self):
		targets = tuple(self.config["targets"])
		if not targets:
			raise ConfigError("at least one target is required")
		for kind in targets:
			if kind not in TARGETS:
				raise ConfigError(f"Unknown target '{kind}', expected one of {TARGETS}")
		return targets

	def _widths(self):
		widths = [int(w) for w in self.config["widths"]]
		if not widths or any(b <= a for a, b in zip(widths, widths[1:])):
			raise ConfigError(f"widths must be strictly increasing, got {tuple(widths)}")
		return widths

	def _first_core(self, problem, width, rng):
		n_in, n_out = problem.phi.out_dim, problem.rho.in_dim
		init = self.config["core_init"]
		if init not in CORE_INITS:
			raise ConfigError(f"Unknown core_init '{init}', expected one of {CORE_INITS}")
		if init == "glorot":
			return Network.feedforward(n_in, [width], n_out, self.config["core_activation"], rng)
		if self.config["core_activation"] != "relu" or n_in != n_out:
			raise ConfigError("core_init tangent_identity needs a relu core between equal tangent dimensions")
		return tangent_identity_core(n_in, width, rng)

	def _fit(self, problem, core, rng, label):
		model = lift(problem.phi, core, problem.rho, name=label)
		start = model.snapshot()
		before = sup_error_on_grid(model.predict, problem.target, problem.validation, problem.metric)
		cfg = TrainConfig.from_config({**self.config, "train_seed": int(rng.integers(2**31))})
		train(model, (problem.X, problem.target(problem.X)), cfg)
		after = sup_error_on_grid(model.predict, problem.target, problem.validation, problem.metric)
		if not after <= before:
			logger.warning(f"{label}: training raised the validation sup error {before:.5f} -> {after:.5f}, keeping the start")
			model.restore(start)
		return model

	def _sweep(self, result, problem, seed_seq, extra):
		widths = self._widths()
		errors = []
		previous = None
		for width, stream in zip(widths, seed_seq.spawn(len(widths))):
			rng = np.random.default_rng(stream)
			label = "/".join([self.name, *(f"{k}={v}" for k, v in extra.items()), f"width={width}"])
			try:
				core = widen_core(previous, width, rng) if previous is not None else self._first_core(problem, width, rng)
				model = self._fit(problem, core, rng, label)
				error = sup_error_on_grid(model.predict, problem.target, problem.test, problem.metric)
				result.models[label] = model
				previous = model.core
			except (TrainingDivergedError, NumericalFailureError) as e:
				logger.error(f"{label} failed: {e}")
				error = float("nan")
			errors.append(error)
			result.rows.append({**extra, "width": width, "sup_error": error})
			logger.info(f"{label}: sup error {error:.5f}")
		return errors

	def _check(self, result, key, target, errors):
		finite = bool(np.all(np.isfinite(errors)))
		result.checks[f"{key}monotone_non_increasing"] = finite and non_increasing(errors, self.config["monotone_slack"])
		if target == "identity":
			result.checks[f"{key}identity_fit"] = finite and errors[0] <= self.config["identity_threshold"]
		if target in ("identity", "linear"):
			result.checks[f"{key}converged"] = finite and errors[-1] <= self.config["converge_threshold"]


class SPDRegressionDemo(_WidthSweep):
	name = "spd-demo"

	def target_map(self, A, B, rng, kind=None):
		"""g(X) = Exp_B(unvec(t(vec(Log_A X)))) on flattened SPD rows"""
		d = self.config["dim"]
		t = tangent_target(kind or self._targets()[0], d * (d + 1) // 2, rng)

		def g(X):
			Z = spd_vectorize(spd_log_batch(A, X.reshape(-1, d, d)))
			return spd_exp_batch(B, spd_unvectorize(t(Z), d)).reshape(-1, d * d)

		return g

	def run(self, bases=None):
		"""bases: optional (A, B) basepoints; random well-conditioned ones otherwise"""
		cfg = self.config
		d = cfg["dim"]
		targets = self._targets()
		data_seq, target_seq, fit_seq = np.random.SeedSequence(cfg["seed"]).spawn(3)
		data_rng = np.random.default_rng(data_seq)
		if bases is None:
			A, B = (SPDPoint(m.reshape(d, d)) for m in random_spd(data_rng, 2, d, 0.5))
		else:
			A, B = (b if isinstance(b, SPDPoint) else SPDPoint(b) for b in bases)

		X = random_spd(data_rng, cfg["n_train"], d, cfg["log_spread"])
		validation = random_spd(data_rng, cfg["n_val"], d, cfg["log_spread"])
		test = random_spd(data_rng, cfg["n_test"], d, cfg["log_spread"])

		result = DemoResult(self.name)
		for kind, t_seq, f_seq in zip(targets, target_seq.spawn(len(targets)), fit_seq.spawn(len(targets))):
			g = self.target_map(A, B, np.random.default_rng(t_seq), kind)
			problem = Problem(spd_log_feature(A), spd_exp_readout(B), X, g, validation, test, "spd")
			errors = self._sweep(result, problem, f_seq, {"dim": d, "target": kind})
			self._check(result, f"{kind}:", kind, errors)
		return result


class HyperbolicRegressionDemo(_WidthSweep):
	name = "hyperbolic-demo"

	def target_map(self, c, rng, kind=None):
		t = tangent_target(kind or self._targets()[0], self.config["dim"], rng)
		return lambda X: poincare_exp0_batch(t(poincare_log0_batch(X, c)), c)

	def run(self):
		cfg = self.config
		n = cfg["dim"]
		targets = self._targets()
		curvatures = list(cfg["curvatures"])
		result = DemoResult(self.name)
		for c, stream in zip(curvatures, np.random.SeedSequence(cfg["seed"]).spawn(len(curvatures))):
			if not c > 0:
				raise ConfigError(f"curvature must be positive, got {c}")
			data_seq, target_seq, fit_seq = stream.spawn(3)
			data_rng = np.random.default_rng(data_seq)
			radius = cfg["radius_factor"] / np.sqrt(c)
			X = random_ball(data_rng, cfg["n_train"], n, radius)
			validation = random_ball(data_rng, cfg["n_val"], n, radius)
			test = random_ball(data_rng, cfg["n_test"], n, radius)
			phi, rho = poincare_log0_feature(n, c), poincare_exp0_readout(n, c)
			for kind, t_seq, f_seq in zip(targets, target_seq.spawn(len(targets)), fit_seq.spawn(len(targets))):
				g = self.target_map(c, np.random.default_rng(t_seq), kind)
				problem = Problem(phi, rho, X, g, validation, test, f"poincare:{c}")
				errors = self._sweep(result, problem, f_seq, {"c": c, "target": kind})
				self._check(result, f"c={c}:{kind}:", kind, errors)
		return result
