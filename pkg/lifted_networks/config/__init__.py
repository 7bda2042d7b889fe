"""
Experiment configuration

Flat `key = value` text files, `#` comments and blank lines ignored. Every
key must exist in the experiment's defaults; values are coerced to the type
of the default (bool, int, float, str or a comma-separated tuple).
"""

import hashlib
import logging
import os

from ..exceptions import ConfigError

logger = logging.getLogger(__name__)

_TRAIN_DEFAULTS = {
	"train_optimizer": "adam",
	"train_learning_rate": 1e-3,
	"train_batch_size": 256,
	"train_epochs": 200,
	"train_loss": "mse",
	"train_validation_fraction": 0.1,
	"train_log_every": 20,
	"train_check_exp_layers": True,
}

_DEFAULTS = {
	"table1": {
		"seed": 0,
		"data": "",
		"out": "runs/table1",
		"test_fraction": 0.3,
		"include_categorical": True,
		"target_scale": 100000.0,
		"max_rows": 0,
		"variants": ("vanilla", "good", "bad", "rand"),
		"hidden_width": 100,
		"core_activation": "relu",
		"feature_depth": 2,
		"readout_depth": 1,
		"good_activation": "gprelu:0.25:1.5",
		"bad_activation": "relu",
		"rand_k": 2,
		"rand_distribution": "bernoulli_pm1",
		"rand_activation": "prelu:0.25",
		"rand_max_retries": 10,
		"workers": 1,
		"acceptance_seeds": 3,
		"check_bands": True,
		**_TRAIN_DEFAULTS,
	},
	"spd-demo": {
		"seed": 0,
		"out": "runs/spd_demo",
		"dim": 2,
		"widths": (8, 32, 128),
		"targets": ("identity", "nonlinear"),
		"n_train": 2000,
		"n_test": 500,
		"n_val": 500,
		"log_spread": 1.0,
		"core_activation": "relu",
		"core_init": "tangent_identity",
		"identity_threshold": 1e-2,
		"converge_threshold": 0.1,
		"monotone_slack": 1e-5,
		**_TRAIN_DEFAULTS,
		"train_learning_rate": 3e-3,
		"train_batch_size": 64,
		"train_epochs": 300,
		"train_log_every": 50,
	},
	"hyperbolic-demo": {
		"seed": 0,
		"out": "runs/hyperbolic_demo",
		"dim": 2,
		"widths": (8, 32, 128),
		"curvatures": (1.0, 0.1),
		"targets": ("identity", "nonlinear"),
		"n_train": 2000,
		"n_test": 500,
		"n_val": 500,
		"radius_factor": 0.8,
		"core_activation": "relu",
		"core_init": "tangent_identity",
		"identity_threshold": 1e-2,
		"converge_threshold": 0.1,
		"monotone_slack": 1e-5,
		**_TRAIN_DEFAULTS,
		"train_learning_rate": 3e-3,
		"train_batch_size": 64,
		"train_epochs": 300,
		"train_log_every": 50,
	},
	"classify-demo": {
		"seed": 0,
		"out": "runs/classify_demo",
		"widths": (8, 32, 128),
		"alpha": 0.5,
		"soft_margin": 0.2,
		"band": 0.05,
		"grid_steps": 100,
		"box": 1.5,
		"disk_offset": 0.4,
		"disk_radius": 0.7,
		"n_train": 4000,
		"core_activation": "relu",
		"agreement_threshold": 0.95,
		"soft_error_threshold": 0.2,
		**_TRAIN_DEFAULTS,
		"train_learning_rate": 3e-3,
		"train_batch_size": 64,
		"train_epochs": 300,
		"train_log_every": 50,
	},
	"proptest": {
		"seed": 0,
		"out": "runs/proptest",
		"scale": "full",
	},
}

# --quick overrides: smoke scale for every experiment
_QUICK = {
	"table1": {"max_rows": 200, "train_epochs": 2, "hidden_width": 16, "acceptance_seeds": 1, "check_bands": False},
	"spd-demo": {"n_train": 200, "n_test": 50, "n_val": 50, "train_epochs": 5},
	"hyperbolic-demo": {"n_train": 200, "n_test": 50, "n_val": 50, "train_epochs": 5},
	"classify-demo": {"n_train": 300, "grid_steps": 20, "train_epochs": 5},
	"proptest": {"scale": "quick"},
}

EXPERIMENTS = tuple(_DEFAULTS)
TRUE_WORDS = {"1", "true", "yes", "on"}
FALSE_WORDS = {"0", "false", "no", "off"}


def default_config(experiment, quick=False):
	if experiment not in _DEFAULTS:
		raise ConfigError(f"Unknown experiment '{experiment}', expected one of {EXPERIMENTS}")
	config = {"experiment": experiment, **_DEFAULTS[experiment]}
	if quick:
		config.update(_QUICK[experiment])
	return config


def _coerce(key, text, default):
	text = text.strip()
	try:
		if isinstance(default, bool):
			word = text.lower()
			if word in TRUE_WORDS:
				return True
			if word in FALSE_WORDS:
				return False
			raise ValueError(f"expected a boolean, got '{text}'")
		if isinstance(default, int):
			return int(text)
		if isinstance(default, float):
			return float(text)
		if isinstance(default, tuple):
			item_type = type(default[0]) if default else str
			return tuple(_coerce(key, part, item_type()) for part in text.split(",") if part.strip())
		return text
	except ValueError as e:
		raise ConfigError(f"config key '{key}': {e}")


def parse_config(text, experiment, quick=False):
	"""Resolve config text against the experiment defaults"""
	config = default_config(experiment, quick)
	for lineno, raw in enumerate(text.splitlines(), 1):
		line = raw.split("#", 1)[0].strip()
		if not line:
			continue
		if "=" not in line:
			raise ConfigError(f"line {lineno}: expected 'key = value', got '{raw.strip()}'")
		key, value = (part.strip() for part in line.split("=", 1))
		if key == "experiment":
			if value != experiment:
				raise ConfigError(f"line {lineno}: config is for '{value}', not '{experiment}'")
			continue
		if key not in config:
			raise ConfigError(f"line {lineno}: unknown config key '{key}' for {experiment}")
		config[key] = _coerce(key, value, config[key])
	return config


def load_config(experiment, path=None, quick=False, overrides=None):
	"""Defaults, then the config file (if any), then explicit overrides"""
	if path:
		with open(path, encoding="utf-8") as f:
			config = parse_config(f.read(), experiment, quick)
		logger.info(f"Loaded {experiment} config from {path}")
	else:
		config = default_config(experiment, quick)
	for key, value in (overrides or {}).items():
		if value is None:
			continue
		if key not in config:
			raise ConfigError(f"unknown config key '{key}' for {experiment}")
		config[key] = value
	return config


def _format_value(value):
	if isinstance(value, bool):
		return "true" if value else "false"
	if isinstance(value, tuple):
		return ",".join(_format_value(v) for v in value)
	if isinstance(value, float):
		return repr(value)
	return str(value)


def format_config(config):
	"""Canonical text: one `key = value` line per key, sorted"""
	return "".join(f"{key} = {_format_value(config[key])}\n" for key in sorted(config))


def config_hash(config):
	return hashlib.sha256(format_config(config).encode("utf-8")).hexdigest()


def write_config(config, path):
	os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
	with open(path, "w", encoding="utf-8") as f:
		f.write(format_config(config))
	return path
