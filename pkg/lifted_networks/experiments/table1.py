"""
California Housing Comparison
Four lifted models sharing one data split and one core shape, differing only in φ / ρ

Variants:
- vanilla: φ = identity, ρ = identity (the plain shallow network)
- good:    φ = trainable exp-generator GPReLU stack, ρ = 1×1 exp-generator GPReLU stack
- bad:     same shapes with ReLU and direct weights (not injective)
- rand:    φ = skip connection over a frozen Bernoulli / PReLU random network, ρ as good
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..config import default_config
from ..data_loader import load_california_csv, preprocess_split
from ..evaluation import metrics
from ..exceptions import ConfigError, NumericalFailureError, TrainingDivergedError
from ..maps.feature_maps import identity_feature, identity_readout, skip_feature
from ..maps.stacks import LayerStackParams, exp_stack
from ..models.lifted_model import lift
from ..models.network import Layer, LayerStack, Network
from ..models.random_network import build_random_feature
from ..models.training import TrainConfig, train

logger = logging.getLogger(__name__)

VARIANTS = ("vanilla", "good", "bad", "rand")
SPLITS = ("train", "test")

# median test-MAE bands over the acceptance seeds
BAD_RATIO = 2.0
NEAR_VANILLA = 0.05
GOOD_SLACK = 0.02
VANILLA_BAND = (0.28, 0.40)


@dataclass
class VariantResult:
	variant: str
	model: object = None
	metrics: dict = field(default_factory=dict)
	history: list = field(default_factory=list)
	failed: str = ""
	seconds: float = 0.0


@dataclass
class Table1Result:
	variants: dict
	dataset_rows: int
	split_sizes: dict

	def records(self):
		"""(model, split, Metrics or None) for every variant and split"""
		return [
			(name, split, result.metrics.get(split))
			for name, result in self.variants.items()
			for split in SPLITS
		]


class Table1Experiment:
	def __init__(self, config=None):
		self.config = config or self._default_config()

	def _default_config(self):
		return default_config("table1")

	def load_split(self):
		path = self.config["data"]
		if not path:
			raise ConfigError("table1 needs a dataset path (config key 'data' or --data)")
		ds = load_california_csv(path, include_categorical=self.config["include_categorical"])
		rows = len(ds)
		if self.config["max_rows"] and self.config["max_rows"] < rows:
			ds = ds.subset(np.arange(self.config["max_rows"]))
		train_ds, test_ds = preprocess_split(
			ds, self.config["test_fraction"], self.config["seed"], self.config["target_scale"]
		)
		return rows, train_ds, test_ds

	def _readout(self, rng, activation, direct):
		depth = self.config["readout_depth"]
		if direct:
			return LayerStack([Layer.dense(1, 1, activation, rng) for _ in range(depth)], name="rho")
		return exp_stack(LayerStackParams.identity(1, depth, activation), name="rho")

	def build_model(self, variant, m, rng):
		"""Fresh, untrained lifted model for one variant on m input features"""
		cfg = self.config
		depth = cfg["feature_depth"]
		if variant == "vanilla":
			phi, rho = identity_feature(m), identity_readout(1)
		elif variant == "good":
			phi = exp_stack(LayerStackParams.identity(m, depth, cfg["good_activation"]), name="phi")
			rho = self._readout(rng, cfg["good_activation"], direct=False)
		elif variant == "bad":
			phi = LayerStack([Layer.dense(m, m, cfg["bad_activation"], rng) for _ in range(depth)], name="phi")
			rho = self._readout(rng, cfg["bad_activation"], direct=True)
		elif variant == "rand":
			g = build_random_feature(
				cfg["rand_k"],
				m,
				sigma=cfg["rand_activation"],
				dist=cfg["rand_distribution"],
				rng=rng,
				max_retries=cfg["rand_max_retries"],
			)
			phi = skip_feature(g, m)
			rho = self._readout(rng, cfg["good_activation"], direct=False)
		else:
			raise ConfigError(f"Unknown variant '{variant}', expected one of {VARIANTS}")

		core = Network.feedforward(
			phi.out_dim, [cfg["hidden_width"]], 1, cfg["core_activation"], rng, name="core"
		)
		return lift(phi, core, rho, name=variant)

	def _run_variant(self, variant, seed_seq, train_ds, test_ds):
		result = VariantResult(variant)
		start = time.perf_counter()
		rng = np.random.default_rng(seed_seq)
		try:
			model = self.build_model(variant, train_ds.features.shape[1], rng)
			train_cfg = TrainConfig.from_config({**self.config, "train_seed": int(rng.integers(2**31))})
			trained = train(model, train_ds, train_cfg)
			result.model = model
			result.history = trained.history
			for split, ds in zip(SPLITS, (train_ds, test_ds)):
				prediction = model.predict(ds.features).reshape(-1)
				if not np.all(np.isfinite(prediction)):
					raise NumericalFailureError(f"{variant} produced non-finite predictions on {split}")
				result.metrics[split] = metrics(ds.targets, prediction)
		except (TrainingDivergedError, NumericalFailureError) as e:
			logger.error(f"Variant {variant} failed: {e}")
			result.failed = str(e)
			result.metrics = {}
		result.seconds = time.perf_counter() - start
		return result

	def run(self):
		rows, train_ds, test_ds = self.load_split()
		requested = list(self.config["variants"])
		for variant in requested:
			if variant not in VARIANTS:
				raise ConfigError(f"Unknown variant '{variant}', expected one of {VARIANTS}")

		# one stream per variant, independent of which variants are requested
		streams = dict(zip(VARIANTS, np.random.SeedSequence(self.config["seed"]).spawn(len(VARIANTS))))
		jobs = [(variant, streams[variant], train_ds, test_ds) for variant in requested]

		workers = max(1, int(self.config["workers"]))
		if workers > 1:
			with ThreadPoolExecutor(max_workers=workers) as pool:
				results = list(pool.map(lambda job: self._run_variant(*job), jobs))
		else:
			results = [self._run_variant(*job) for job in jobs]

		for result in results:
			if result.failed:
				logger.warning(f"{result.variant}: failed after {result.seconds:.1f}s")
			else:
				logger.info(
					f"{result.variant}: test MAE {result.metrics['test'].mae:.4f} in {result.seconds:.1f}s"
				)
		return Table1Result(
			variants={r.variant: r for r in results},
			dataset_rows=rows,
			split_sizes={"train": len(train_ds), "test": len(test_ds)},
		)

	def run_seeds(self):
		"""One run per acceptance seed: seed, seed + 1, ... (the first is the primary run)"""
		n = int(self.config["acceptance_seeds"])
		if n < 1:
			raise ConfigError(f"acceptance_seeds must be at least 1, got {n}")
		seed = int(self.config["seed"])
		runs = []
		for offset in range(n):
			logger.info(f"Table 1 run {offset + 1}/{n} with seed {seed + offset}")
			runs.append(Table1Experiment({**self.config, "seed": seed + offset}).run())
		return runs


def median_test_mae(runs):
	"""Median test MAE per variant over runs; NaN when any run of that variant failed"""
	medians = {}
	for name in runs[0].variants:
		values = [run.variants[name].metrics.get("test") for run in runs]
		if any(m is None for m in values):
			medians[name] = float("nan")
		else:
			medians[name] = float(np.median([m.mae for m in values]))
	return medians


def acceptance_checks(medians):
	"""
	Band checks on median test MAE; a check is skipped when a variant it needs was not run

	NaN medians compare False, so a failed variant fails every check it takes part in.
	"""
	checks = {}
	vanilla = medians.get("vanilla")
	if vanilla is None:
		return checks
	low, high = VANILLA_BAND
	checks["vanilla_band"] = bool(low <= vanilla <= high)
	if "bad" in medians:
		checks["bad_vs_vanilla"] = bool(medians["bad"] >= BAD_RATIO * vanilla)
	if "good" in medians:
		good = medians["good"]
		checks["good_vs_vanilla"] = bool(abs(good - vanilla) <= NEAR_VANILLA and good <= vanilla + GOOD_SLACK)
	if "rand" in medians:
		checks["rand_vs_vanilla"] = bool(abs(medians["rand"] - vanilla) <= NEAR_VANILLA)
	return checks
