"""
Exception hierarchy for lifted_networks

Every failure raised by the library derives from LiftedNetworksError and from
the builtin exception a caller would naturally catch (ValueError for bad
arguments, ArithmeticError for numerical breakdowns).
"""


class LiftedNetworksError(Exception):
	"""Base class for all library errors"""


class InvalidInputError(LiftedNetworksError, ValueError):
	"""Argument has the wrong shape, is non-finite or otherwise malformed"""


class InvalidParameterError(LiftedNetworksError, ValueError):
	"""A hyper-parameter or constructor parameter is out of range"""


class ConfigError(LiftedNetworksError, ValueError):
	"""Experiment configuration is incomplete or unparseable"""


class DomainError(LiftedNetworksError, ValueError):
	"""Input lies outside the domain of a map (non-SPD matrix, ball boundary, ...)"""

	def __init__(self, message, value=None):
		super().__init__(message)
		self.value = value


class InvalidCompositionError(LiftedNetworksError, ValueError):
	"""Dimensions of a feature map, core network and readout do not chain"""

	def __init__(self, message, boundary=None):
		super().__init__(message)
		self.boundary = boundary


class RejectedActivationError(LiftedNetworksError, ValueError):
	"""Activation lacks a property (monotone, surjective) a construction needs"""


class SchemaError(LiftedNetworksError, ValueError):
	"""A required dataset column is missing"""

	def __init__(self, message, column=None):
		super().__init__(message)
		self.column = column


class NumericalFailureError(LiftedNetworksError, ArithmeticError):
	"""An iteration failed to converge or produced non-finite values"""

	def __init__(self, message, residual=None, batch_index=None):
		super().__init__(message)
		self.residual = residual
		self.batch_index = batch_index


class RankFailureError(LiftedNetworksError, ArithmeticError):
	"""Random layer stayed rank deficient after all resampling attempts"""

	def __init__(self, message, smallest_singular_value=None):
		super().__init__(message)
		self.smallest_singular_value = smallest_singular_value


class TrainingDivergedError(LiftedNetworksError, ArithmeticError):
	"""Training loss exceeded the divergence threshold"""

	def __init__(self, message, epoch=None, loss=None):
		super().__init__(message)
		self.epoch = epoch
		self.loss = loss
