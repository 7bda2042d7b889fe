"""
Property Battery
Randomized checks of the numerical invariants of every module, with worst-case residuals

Each check returns a CheckResult; run_battery(seed, scale) runs them all with
independent RNG streams so any single check can be replayed from the seed.
Expected-failure demonstrations (the ReLU counterexample) pass when the
failure they demonstrate is observed.
"""

import logging
import time
from dataclasses import dataclass

import numpy as np

from .evaluation import metrics, sup_error_on_grid
from .exceptions import InvalidParameterError, LiftedNetworksError
from .geometry.linalg import matrix_exp, spectral_fn, sym_eig
from .geometry.manifold import (
	poincare_dist_batch,
	poincare_exp0_batch,
	poincare_log0_batch,
	spd_dist_batch,
	spd_exp_batch,
	spd_log_batch,
	spd_vectorize,
)
from .maps.activations import logistic
from .maps.feature_maps import (
	check_injectivity,
	hard_threshold,
	identity_feature,
	logistic_readout,
	poincare_exp0_readout,
	poincare_log0_feature,
	spd_exp_readout,
	spd_log_feature,
	uniform_box_sampler,
)
from .maps.stacks import LayerStackParams, injective_stack, invertible_readout
from .models.gradcheck import KINK_MARGIN, check_model_gradient, check_network_gradient, kink_margin
from .models.lifted_model import lift
from .models.losses import MeanSquaredError
from .models.network import Layer, LayerStack, Network
from .models.random_network import build_random_feature, rank_acceptance_rate

logger = logging.getLogger(__name__)

SCALES = {
	"quick": {"cases": 20, "pairs": 1000, "grad_configs": 3, "rank_trials": 10000},
	"full": {"cases": 200, "pairs": 1000, "grad_configs": 20, "rank_trials": 10000},
}


@dataclass
class CheckResult:
	name: str
	passed: bool
	worst: float
	tolerance: float
	detail: str = ""
	expected_failure: bool = False


def _result(name, worst, tolerance, detail=""):
	return CheckResult(name, bool(worst <= tolerance), float(worst), tolerance, detail)


def _random_symmetric(rng, d):
	M = rng.standard_normal((d, d))
	return 0.5 * (M + M.T)


def _random_spd(rng, count, d, low=0.1, high=10.0):
	"""Stack of SPD matrices with eigenvalues uniform in [low, high]"""
	Q, _ = np.linalg.qr(rng.standard_normal((count, d, d)))
	lam = rng.uniform(low, high, size=(count, d))
	return np.einsum("nij,nj,nkj->nik", Q, lam, Q)


def _rel(a, b):
	return np.linalg.norm(a - b, axis=(-2, -1)) / np.maximum(1.0, np.linalg.norm(b, axis=(-2, -1)))


# ----------------------------------------------------------------------------
# linalg
# ----------------------------------------------------------------------------


def check_sym_eig(rng, scale):
	worst = 0.0
	for _ in range(scale["cases"] // 4):
		d = int(rng.integers(1, 21))
		S = _random_symmetric(rng, d)
		Q, lam = sym_eig(S)
		worst = max(worst, float(_rel(Q @ np.diag(lam) @ Q.T, S)), float(np.linalg.norm(Q.T @ Q - np.eye(d))))
	return _result("linalg.sym_eig_reconstruction", worst, 1e-10)


def check_exp_log(rng, scale):
	S = _random_spd(rng, scale["cases"], 4)
	back = spectral_fn(spectral_fn(S, "log"), "exp")
	return _result("linalg.exp_log_round_trip", float(np.max(_rel(back, S))), 1e-9)


def check_commuting_exp(rng, scale):
	worst = 0.0
	for _ in range(scale["cases"] // 4):
		d = int(rng.integers(1, 6))
		A = np.diag(rng.uniform(-2, 2, d))
		B = np.diag(rng.uniform(-2, 2, d))
		worst = max(worst, float(_rel(matrix_exp(A + B), matrix_exp(A) @ matrix_exp(B))))
	return _result("linalg.matrix_exp_commuting_product", worst, 1e-9)


def check_exp_determinant(rng, scale):
	worst = np.inf
	for _ in range(scale["cases"] // 4):
		d = int(rng.integers(1, 6))
		worst = min(worst, float(np.linalg.det(matrix_exp(rng.standard_normal((d, d))))))
	return CheckResult("linalg.matrix_exp_det_positive", worst > 0, worst, 0.0, "smallest determinant")


# ----------------------------------------------------------------------------
# manifold
# ----------------------------------------------------------------------------


def check_spd_round_trips(rng, scale):
	worst = 0.0
	for d in range(1, 7):
		A = _random_spd(rng, 1, d, 0.5, 2.0)[0]
		X = _random_spd(rng, scale["cases"] // 6, d, 0.2, 5.0)
		V = np.stack([_random_symmetric(rng, d) for _ in range(scale["cases"] // 6)])
		worst = max(
			worst,
			float(np.max(_rel(spd_exp_batch(A, spd_log_batch(A, X)), X))),
			float(np.max(_rel(spd_log_batch(A, spd_exp_batch(A, V)), V))),
		)
	return _result("manifold.spd_round_trips", worst, 1e-8)


def check_geodesic_speed(rng, scale):
	worst = 0.0
	d = 3
	for _ in range(scale["cases"] // 10):
		A = _random_spd(rng, 1, d, 0.5, 2.0)[0]
		V = _random_symmetric(rng, d)
		lam, Q = np.linalg.eigh(A)
		inv_root = (Q / np.sqrt(lam)) @ Q.T
		speed = np.linalg.norm(inv_root @ V @ inv_root)
		ts = np.linspace(0.0, 2.0, 9)
		points = spd_exp_batch(A, ts[:, None, None] * V)
		distances = spd_dist_batch(A, points)
		worst = max(worst, float(np.max(np.abs(distances - ts * speed))))
	return _result("manifold.geodesic_speed", worst, 1e-7)


def check_poincare_round_trip(rng, scale):
	V = rng.standard_normal((scale["cases"], 3))
	V *= rng.uniform(0.0, 5.0, size=(scale["cases"], 1)) / np.linalg.norm(V, axis=1, keepdims=True)
	worst = 0.0
	for c in (1.0, 0.5):
		back = poincare_log0_batch(poincare_exp0_batch(V, c), c)
		worst = max(worst, float(np.max(np.linalg.norm(back - V, axis=1) / np.maximum(1.0, np.linalg.norm(V, axis=1)))))
	return _result("manifold.poincare_round_trip", worst, 1e-10)


def check_poincare_base_distance(rng, scale):
	V = rng.uniform(-1.0, 1.0, size=(scale["cases"], 2))
	distances = poincare_dist_batch(np.zeros_like(V), poincare_exp0_batch(V, 1.0), 1.0)
	return _result(
		"manifold.poincare_base_distance", float(np.max(np.abs(distances - 2.0 * np.linalg.norm(V, axis=1)))), 1e-9
	)


def check_vectorize_isometry(rng, scale):
	S = np.stack([_random_symmetric(rng, 4) for _ in range(scale["cases"])])
	gap = np.abs(np.linalg.norm(spd_vectorize(S), axis=1) - np.linalg.norm(S, axis=(1, 2)))
	return _result("manifold.vectorize_isometry", float(np.max(gap)), 1e-12)


def check_triangle_inequality(rng, scale):
	n = scale["cases"] * 5
	A, B, C = (_random_spd(rng, n, 3, 0.2, 5.0) for _ in range(3))
	spd_excess = spd_dist_batch(A, C) - spd_dist_batch(A, B) - spd_dist_batch(B, C)
	x, y, z = (poincare_exp0_batch(rng.standard_normal((n, 2)), 1.0) for _ in range(3))
	ball_excess = poincare_dist_batch(x, z, 1.0) - poincare_dist_batch(x, y, 1.0) - poincare_dist_batch(y, z, 1.0)
	return _result("manifold.triangle_inequality", float(max(spd_excess.max(), ball_excess.max())), 1e-9)


# ----------------------------------------------------------------------------
# maps
# ----------------------------------------------------------------------------


def check_readout_sections(rng, scale):
	n = scale["cases"]
	B = _random_spd(rng, 1, 2, 0.5, 2.0)[0]
	params = LayerStackParams.random(3, 2, "gprelu:0.25:1.5", rng=rng)
	cases = [
		(logistic_readout(3), rng.uniform(0.001, 0.999, size=(n, 3))),
		(spd_exp_readout(B), _random_spd(rng, n, 2, 0.2, 5.0).reshape(n, 4)),
		(poincare_exp0_readout(2, 0.5), poincare_exp0_batch(rng.standard_normal((n, 2)), 0.5)),
		(invertible_readout(params), rng.standard_normal((n, 3)) * 3.0),
	]
	worst = 0.0
	for readout, Y in cases:
		worst = max(worst, float(np.max(np.abs(readout.apply(readout.section(Y)) - Y) / np.maximum(1.0, np.abs(Y)))))
	return _result("maps.readout_sections", worst, 1e-8)


def check_injective_stack(rng, scale):
	params = LayerStackParams.random(4, 3, "gprelu:0.25:1.5", rng=rng)
	phi = injective_stack(params)
	X = rng.standard_normal((scale["pairs"], 4)) * 3.0
	Y = rng.standard_normal((scale["pairs"], 4)) * 3.0
	worst = max(
		float(np.max(np.abs(phi.inverse(phi(X)) - X))),
		float(np.max(np.abs(phi(phi.inverse(Y)) - Y) / np.maximum(1.0, np.abs(Y)))),
	)
	report = check_injectivity(phi, uniform_box_sampler(4, -3.0, 3.0), scale["pairs"], rng=rng)
	result = _result("maps.injective_stack", worst, 1e-8, f"{report.violations} injectivity violations")
	result.passed = result.passed and report.violations == 0
	return result


def check_relu_counterexample(rng, scale):
	"""A ReLU stack with bias −10 collapses [0, 1]^m to a point"""
	m = 3
	stack = LayerStack([Layer("dense", np.eye(m), -10.0 * np.ones(m), "relu")], name="relu_stack")
	report = check_injectivity(stack.freeze(), uniform_box_sampler(m, 0.0, 1.0), scale["pairs"], rng=rng)
	return CheckResult(
		"maps.relu_counterexample",
		report.violations > 0,
		float(report.violations),
		1.0,
		f"{report.violations}/{report.n_pairs} pairs collapsed (expected)",
		expected_failure=True,
	)


def check_threshold_reparametrization(rng, scale):
	alpha = 0.6
	soft = rng.uniform(0.0, 1.0, size=(scale["pairs"], 4))
	soft[0, 0] = alpha
	same = np.array_equal(hard_threshold(alpha)(soft), hard_threshold(alpha**2)(soft**2))
	z = rng.uniform(-6.0, 6.0, size=(scale["pairs"], 2))
	logit_alpha = np.log(alpha / (1.0 - alpha))
	composed = np.array_equal(hard_threshold(alpha)(logistic(z)), (z > logit_alpha).astype(int))
	passed = same and composed
	return CheckResult("maps.threshold_reparametrization", passed, 0.0 if passed else 1.0, 0.0)


# ----------------------------------------------------------------------------
# net
# ----------------------------------------------------------------------------


def _kink_free(build, rng, X_shape, attempts=20):
	for _ in range(attempts):
		net = build(rng)
		X = rng.standard_normal(X_shape)
		if kink_margin(net, X) > KINK_MARGIN:
			return net, X
	return net, X


def check_gradients(rng, scale):
	loss = MeanSquaredError()
	worst = {}

	def record(kind, value):
		worst[kind] = max(worst.get(kind, 0.0), value)

	for _ in range(scale["grad_configs"]):
		m = int(rng.integers(2, 5))
		h = int(rng.integers(2, 6))

		net, X = _kink_free(lambda r: Network.feedforward(m, [h], 2, "tanh", r), rng, (6, m))
		record("dense", check_network_gradient(net, loss, X, rng.standard_normal((6, 2))))

		def exp_net(r):
			layers = [Layer("exp", 0.4 * r.standard_normal((m, m)), r.standard_normal(m), "gprelu:0.25:1.5")]
			return Network([*layers, Layer.dense(m, 1, None, r)])

		net, X = _kink_free(exp_net, rng, (6, m))
		record("exp_gprelu", check_network_gradient(net, loss, X, rng.standard_normal((6, 1))))

		core = Network.feedforward(m, [h], 2, "tanh", rng)
		model = lift(identity_feature(m), core, logistic_readout(2))
		X = rng.standard_normal((6, m))
		record("logistic_readout", check_model_gradient(model, loss, X, rng.uniform(0.1, 0.9, size=(6, 2))))

		A = _random_spd(rng, 1, 2, 0.5, 2.0)[0]
		B = _random_spd(rng, 1, 2, 0.5, 2.0)[0]
		core = Network.feedforward(3, [h], 3, "tanh", rng)
		for layer in core.layers:
			layer.weight *= 0.3
		model = lift(spd_log_feature(A), core, spd_exp_readout(B))
		X = _random_spd(rng, 5, 2, 0.3, 3.0).reshape(5, 4)
		Y = _random_spd(rng, 5, 2, 0.3, 3.0).reshape(5, 4)
		record("lifted_spd", check_model_gradient(model, loss, X, Y))

		core = Network.feedforward(2, [h], 2, "tanh", rng)
		model = lift(poincare_log0_feature(2, 1.0), core, poincare_exp0_readout(2, 1.0))
		X = poincare_exp0_batch(rng.standard_normal((5, 2)), 1.0)
		record("lifted_poincare", check_model_gradient(model, loss, X, poincare_exp0_batch(rng.standard_normal((5, 2)), 1.0)))

	detail = ", ".join(f"{k}={v:.2e}" for k, v in worst.items())
	return _result("net.gradient_oracle", max(worst.values()), 1e-4, detail)


def check_relu_homogeneity(rng, scale):
	worst = 0.0
	for _ in range(scale["cases"] // 10):
		layers = [Layer("dense", rng.standard_normal((5, 3)), np.zeros(5), "relu"), Layer("dense", rng.standard_normal((2, 5)), np.zeros(2))]
		net = Network(layers)
		x = rng.standard_normal(3)
		lam = rng.uniform(0.1, 10.0)
		worst = max(worst, float(np.max(np.abs(net.forward(lam * x) - lam * net.forward(x)))))
	return _result("net.relu_positive_homogeneity", worst, 1e-9)


# ----------------------------------------------------------------------------
# randomnet
# ----------------------------------------------------------------------------


def check_random_feature(rng, scale):
	worst = 0
	for dist in ("bernoulli_pm1", "standard_gaussian"):
		phi = build_random_feature(2, 4, dist=dist, rng=rng)
		report = check_injectivity(phi, uniform_box_sampler(4), scale["pairs"], rng=rng)
		worst = max(worst, report.violations)
	return _result("randomnet.injectivity", float(worst), 0.0)


def check_bernoulli_acceptance(rng, scale):
	rate = rank_acceptance_rate("bernoulli_pm1", 2, scale["rank_trials"], seed=int(rng.integers(2**31)))
	return _result("randomnet.bernoulli_acceptance", abs(rate - 0.5), 0.02, f"rate={rate:.4f}")


def check_random_head(rng, scale):
	m, width = 4, 8
	phi = build_random_feature(2, m, rng=rng)
	core = Network.feedforward(m, [width], 1, "relu", rng)
	model = lift(phi, core, logistic_readout(1))
	expected = m * width + width + width + 1
	gap = abs(model.trainable_parameter_count() - expected)
	return _result("randomnet.trainable_head_only", float(gap), 0.0)


# ----------------------------------------------------------------------------
# data
# ----------------------------------------------------------------------------


def check_metrics(rng, scale):
	y = rng.uniform(0.5, 5.0, size=scale["cases"])
	yhat = y + rng.normal(0.0, 0.3, size=y.shape)
	exact = metrics(y, y)
	scaled = abs(metrics(2 * y, 2 * yhat).mape - metrics(y, yhat).mape)
	worst = max(exact.mae, exact.mse, exact.mape, scaled)
	return _result("data.metrics_identities", worst, 1e-9)


def check_sup_error_pseudometric(rng, scale):
	grid = rng.uniform(-1.0, 1.0, size=(scale["cases"], 2))
	shifts = [rng.standard_normal((2, 2)) for _ in range(3)]
	f, g, h = (lambda X, W=W: np.tanh(X @ W) for W in shifts)
	d = lambda a, b: sup_error_on_grid(a, b, grid)
	worst = max(abs(d(f, g) - d(g, f)), d(f, f), d(f, h) - d(f, g) - d(g, h))
	return _result("data.sup_error_pseudometric", worst, 1e-12)


CHECKS = [
	check_sym_eig,
	check_exp_log,
	check_commuting_exp,
	check_exp_determinant,
	check_spd_round_trips,
	check_geodesic_speed,
	check_poincare_round_trip,
	check_poincare_base_distance,
	check_vectorize_isometry,
	check_triangle_inequality,
	check_readout_sections,
	check_injective_stack,
	check_relu_counterexample,
	check_threshold_reparametrization,
	check_gradients,
	check_relu_homogeneity,
	check_random_feature,
	check_bernoulli_acceptance,
	check_random_head,
	check_metrics,
	check_sup_error_pseudometric,
]


def run_battery(seed=0, scale="full", checks=None):
	"""Run every check with its own RNG stream; returns the list of CheckResults"""
	if scale not in SCALES:
		raise InvalidParameterError(f"Unknown scale '{scale}', expected one of {sorted(SCALES)}")
	checks = checks or CHECKS
	streams = np.random.SeedSequence(seed).spawn(len(checks))
	results = []
	for check, stream in zip(checks, streams):
		start = time.perf_counter()
		try:
			result = check(np.random.default_rng(stream), SCALES[scale])
		except LiftedNetworksError as e:
			logger.error(f"{check.__name__} raised {type(e).__name__}: {e}")
			result = CheckResult(check.__name__, False, float("inf"), 0.0, f"{type(e).__name__}: {e}")
		status = "pass" if result.passed else "FAIL"
		logger.info(f"{result.name}: {status} (worst {result.worst:.3e}) in {time.perf_counter() - start:.2f}s")
		results.append(result)
	return results
