"""
Model Training
Mini-batch training of lifted models with seeded shuffling and best-epoch restore

Features:
- SGD / Adam optimizers, MSE / MAE / BCE losses
- Seeded validation hold-out; parameters of the best validation epoch are restored
- φ(X) precomputed once when the feature map is frozen
- Divergence guard: abort when the loss exceeds the threshold
- Exp-generator weights checked for invertibility after every epoch
"""

import logging
from dataclasses import dataclass, field, fields

import numpy as np

from ..exceptions import InvalidParameterError, NumericalFailureError, TrainingDivergedError
from ..geometry.linalg import matrix_exp, smallest_singular_value
from .losses import LOSSES, get_loss
from .network import LayerStack
from .optimizers import OPTIMIZERS, get_optimizer

logger = logging.getLogger(__name__)


@dataclass
class TrainConfig:
	optimizer: str = "adam"
	learning_rate: float = 1e-3
	batch_size: int = 256
	epochs: int = 200
	seed: int = 0
	loss: str = "mse"
	validation_fraction: float = 0.1
	divergence_threshold: float = 1e12
	log_every: int = 20
	check_exp_layers: bool = True

	def __post_init__(self):
		if self.optimizer not in OPTIMIZERS:
			raise InvalidParameterError(f"Unknown optimizer '{self.optimizer}', expected one of {sorted(OPTIMIZERS)}")
		if self.loss not in LOSSES:
			raise InvalidParameterError(f"Unknown loss '{self.loss}', expected one of {sorted(LOSSES)}")
		if not self.learning_rate > 0:
			raise InvalidParameterError(f"learning rate must be positive, got {self.learning_rate}")
		if self.epochs < 1:
			raise InvalidParameterError(f"epochs must be at least 1, got {self.epochs}")
		if self.batch_size < 1:
			raise InvalidParameterError(f"batch size must be at least 1, got {self.batch_size}")
		if not 0.0 <= self.validation_fraction < 1.0:
			raise InvalidParameterError(
				f"validation fraction must lie in [0, 1), got {self.validation_fraction}"
			)

	@classmethod
	def from_config(cls, config, prefix="train_"):
		"""Pick train_* keys out of a flat experiment config"""
		names = {f.name for f in fields(cls)}
		values = {key[len(prefix) :]: value for key, value in config.items() if key.startswith(prefix)}
		return cls(**{key: value for key, value in values.items() if key in names})


@dataclass
class TrainResult:
	model: object
	history: list = field(default_factory=list)
	best_epoch: int = 0
	best_loss: float = float("inf")
	diverged: bool = False


def _as_arrays(data):
	if hasattr(data, "features") and hasattr(data, "targets"):
		X, Y = data.features, data.targets
	else:
		X, Y = data
	X = np.asarray(X, dtype=float)
	Y = np.asarray(Y, dtype=float).reshape(X.shape[0], -1)
	return X, Y


def _exp_layers(model):
	for part in (model.phi, model.core, model.rho):
		if isinstance(part, LayerStack):
			yield from (layer for layer in part.layers if layer.kind == "exp")


def _check_exp_invertible(model, epoch):
	for layer in _exp_layers(model):
		sigma = smallest_singular_value(matrix_exp(layer.weight))
		if not sigma > 0:
			raise NumericalFailureError(
				f"exp-generator weight became singular at epoch {epoch}", residual=sigma
			)


def train(model, data, cfg, validation=None):
	"""
	Fit a LiftedModel in place and return the best-epoch parameters

	Args:
		model: LiftedModel
		data: Dataset (features / targets) or an (X, Y) pair
		cfg: TrainConfig
		validation: optional held-out (X, Y); when omitted a seeded
			cfg.validation_fraction share of data is held out (0 means the
			training loss selects the best epoch)

	Returns:
		TrainResult with the loss history (one record per epoch)
	"""
	X, Y = _as_arrays(data)
	if X.shape[0] == 0:
		raise InvalidParameterError("training data is empty")

	rng = np.random.default_rng(cfg.seed)
	if validation is not None:
		X_val, Y_val = _as_arrays(validation)
	elif cfg.validation_fraction > 0 and X.shape[0] >= 10:
		order = rng.permutation(X.shape[0])
		n_val = max(1, int(np.floor(X.shape[0] * cfg.validation_fraction)))
		X_val, Y_val = X[order[:n_val]], Y[order[:n_val]]
		X, Y = X[order[n_val:]], Y[order[n_val:]]
	else:
		X_val = Y_val = None

	loss = get_loss(cfg.loss)
	optimizer = get_optimizer(cfg.optimizer, cfg.learning_rate)
	params = model.parameters()
	if not params:
		raise InvalidParameterError(f"{model.name} has no trainable parameters")

	frozen_phi = not isinstance(model.phi, LayerStack)
	features = model.features(X) if frozen_phi else None
	val_features = model.features(X_val) if frozen_phi and X_val is not None else None

	result = TrainResult(model=model)
	best = model.snapshot()
	n = X.shape[0]
	logger.info(
		f"Training {model.name}: {n} rows, {model.trainable_parameter_count()} parameters, "
		f"{cfg.optimizer} lr={cfg.learning_rate}, {cfg.epochs} epochs"
	)

	for epoch in range(1, cfg.epochs + 1):
		order = rng.permutation(n)
		total = 0.0
		for batch_index, start in enumerate(range(0, n, cfg.batch_size)):
			idx = order[start : start + cfg.batch_size]
			value, grads = model.loss_and_gradient(
				X[idx], Y[idx], loss, features=None if features is None else features[idx], batch_index=batch_index
			)
			if value > cfg.divergence_threshold:
				logger.error(f"{model.name} diverged at epoch {epoch}: loss {value:.3e}")
				raise TrainingDivergedError(
					f"{model.name} diverged at epoch {epoch} (loss {value:.3e})", epoch=epoch, loss=value
				)
			optimizer.step(params, grads)
			total += value * len(idx)

		if cfg.check_exp_layers:
			_check_exp_invertible(model, epoch)

		train_loss = total / n
		if X_val is not None:
			F_val = val_features if val_features is not None else model.features(X_val)
			val_loss = loss(model.forward_from_features(F_val), Y_val)
		else:
			val_loss = train_loss
		if not np.isfinite(val_loss) or val_loss > cfg.divergence_threshold:
			logger.error(f"{model.name} diverged at epoch {epoch}: validation loss {val_loss}")
			raise TrainingDivergedError(
				f"{model.name} diverged at epoch {epoch} (validation loss {val_loss})", epoch=epoch, loss=val_loss
			)

		result.history.append({"epoch": epoch, "train_loss": train_loss, "val_loss": float(val_loss)})
		if val_loss < result.best_loss:
			result.best_loss = float(val_loss)
			result.best_epoch = epoch
			best = model.snapshot()

		if epoch == 1 or epoch % cfg.log_every == 0 or epoch == cfg.epochs:
			logger.info(f"{model.name} epoch {epoch}/{cfg.epochs}: train {train_loss:.5f}, val {val_loss:.5f}")

	model.restore(best)
	logger.info(f"{model.name}: restored epoch {result.best_epoch} (loss {result.best_loss:.5f})")
	return result
