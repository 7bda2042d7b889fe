"""
California Housing Data Loader
Reads the housing CSV, imputes, one-hot encodes and splits it for training

Standard schema: longitude, latitude, housing_median_age, total_rooms,
total_bedrooms, population, households, median_income, median_house_value,
plus the optional categorical ocean_proximity.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd
from sklearn.impute import SimpleImputer
from sklearn.preprocessing import StandardScaler

from .exceptions import InvalidParameterError, SchemaError

logger = logging.getLogger(__name__)

NUMERIC_COLUMNS = [
	"longitude",
	"latitude",
	"housing_median_age",
	"total_rooms",
	"total_bedrooms",
	"population",
	"households",
	"median_income",
]
TARGET_COLUMN = "median_house_value"
CATEGORICAL_COLUMN = "ocean_proximity"
IMPUTED_COLUMN = "total_bedrooms"
TARGET_SCALE = 1e5
SPLIT_EPSILON = 1e-9


@dataclass(frozen=True, eq=False)
class Dataset:
	"""Feature matrix with targets; normalization holds what is needed to undo preprocessing"""

	features: np.ndarray
	targets: np.ndarray
	column_names: tuple
	normalization: dict = field(default_factory=dict)
	row_ids: np.ndarray = None

	def __post_init__(self):
		features = np.asarray(self.features, dtype=float)
		targets = np.asarray(self.targets, dtype=float)
		if features.ndim != 2 or targets.shape[0] != features.shape[0]:
			raise InvalidParameterError(
				f"features {features.shape} and targets {targets.shape} do not describe the same rows"
			)
		object.__setattr__(self, "features", features)
		object.__setattr__(self, "targets", targets)
		object.__setattr__(self, "column_names", tuple(self.column_names))
		if self.row_ids is None:
			object.__setattr__(self, "row_ids", np.arange(features.shape[0]))

	def __len__(self):
		return self.features.shape[0]

	def subset(self, index):
		return replace(self, features=self.features[index], targets=self.targets[index], row_ids=self.row_ids[index])


class CaliforniaHousingLoader:
	"""
	Loads the California housing CSV into a Dataset

	stats records how many rows were read, skipped and imputed by the last load.
	"""

	def __init__(self, config=None):
		self.config = config or self._default_config()
		self.stats = {"rows": 0, "loaded": 0, "skipped": 0, "imputed": 0}

	def _default_config(self):
		return {
			"include_categorical": True,
			"impute_strategy": "median",
		}

	def load(self, path):
		logger.info(f"Loading California housing data from {path}")
		raw = pd.read_csv(path, dtype=str, keep_default_na=False)
		raw.columns = [c.strip() for c in raw.columns]
		self.stats = {"rows": len(raw), "loaded": 0, "skipped": 0, "imputed": 0}

		for column in [*NUMERIC_COLUMNS, TARGET_COLUMN]:
			if column not in raw.columns:
				logger.error(f"Missing required column: {column}")
				raise SchemaError(f"required column '{column}' is missing from {path}", column=column)

		frame = self._parse_numeric(raw)
		frame = self._impute(frame)
		names = list(NUMERIC_COLUMNS)
		features = frame[NUMERIC_COLUMNS]

		if CATEGORICAL_COLUMN in raw.columns and self.config.get("include_categorical", True):
			categories = raw.loc[frame.index, CATEGORICAL_COLUMN].str.strip()
			dummies = pd.get_dummies(categories, prefix=CATEGORICAL_COLUMN, dtype=float)
			features = pd.concat([features, dummies], axis=1)
			names += list(dummies.columns)

		self.stats["loaded"] = len(frame)
		logger.info(
			f"Loaded {self.stats['loaded']} rows ({self.stats['skipped']} skipped, "
			f"{self.stats['imputed']} {IMPUTED_COLUMN} imputed), {len(names)} features"
		)
		return Dataset(
			features=features.to_numpy(dtype=float),
			targets=frame[TARGET_COLUMN].to_numpy(dtype=float),
			column_names=names,
			normalization={"target_scale": 1.0},
			row_ids=frame.index.to_numpy(),
		)

	def _parse_numeric(self, raw):
		parsed = {}
		bad = np.zeros(len(raw), dtype=bool)
		for column in [*NUMERIC_COLUMNS, TARGET_COLUMN]:
			text = raw[column].str.strip()
			values = pd.to_numeric(text.replace("", np.nan), errors="coerce")
			unparseable = values.isna() & (text != "")
			if column != IMPUTED_COLUMN:
				unparseable |= text == ""
			unparseable |= ~np.isfinite(values.fillna(0.0))
			bad |= unparseable.to_numpy()
			parsed[column] = values

		frame = pd.DataFrame(parsed, index=raw.index)
		if bad.any():
			skipped = np.flatnonzero(bad).tolist()
			self.stats["skipped"] = len(skipped)
			logger.warning(f"Skipping {len(skipped)} unparseable row(s) at index {skipped}")
		return frame.loc[~bad]

	def _impute(self, frame):
		missing = frame[IMPUTED_COLUMN].isna()
		self.stats["imputed"] = int(missing.sum())
		if missing.any():
			imputer = SimpleImputer(strategy=self.config.get("impute_strategy", "median"))
			frame = frame.copy()
			frame[[IMPUTED_COLUMN]] = imputer.fit_transform(frame[[IMPUTED_COLUMN]])
		return frame


def load_california_csv(path, include_categorical=True):
	return CaliforniaHousingLoader({"include_categorical": include_categorical, "impute_strategy": "median"}).load(path)


def preprocess_split(ds, test_fraction=0.3, seed=0, target_scale=TARGET_SCALE):
	"""
	Seeded shuffle and train/test split, standardization fitted on train only

	Targets are divided by target_scale (10⁵ dollars by default). Both splits
	carry the scaler statistics so predictions can be mapped back.
	"""
	if not 0.0 < test_fraction < 1.0:
		raise InvalidParameterError(f"test fraction must lie in (0, 1), got {test_fraction}")
	n = len(ds)
	n_test = int(np.floor(n * test_fraction + SPLIT_EPSILON))
	if n_test == 0 or n_test == n:
		raise InvalidParameterError(f"test fraction {test_fraction} of {n} rows leaves an empty split")

	order = np.random.default_rng(seed).permutation(n)
	test_index, train_index = order[:n_test], order[n_test:]

	scaler = StandardScaler().fit(ds.features[train_index])
	normalization = {
		"feature_mean": scaler.mean_.copy(),
		"feature_std": scaler.scale_.copy(),
		"target_scale": float(target_scale),
		"seed": seed,
	}

	def build(index):
		return Dataset(
			features=scaler.transform(ds.features[index]),
			targets=ds.targets[index] / target_scale,
			column_names=ds.column_names,
			normalization=normalization,
			row_ids=ds.row_ids[index],
		)

	train, test = build(train_index), build(test_index)
	logger.info(f"Split {n} rows into {len(train)} train / {len(test)} test (seed {seed})")
	return train, test


def unscale_targets(values, ds):
	"""Map scaled targets or predictions back to dollars"""
	return np.asarray(values, dtype=float) * ds.normalization.get("target_scale", 1.0)
