"""
Model Checkpoints
Self-describing little-endian binary format for lifted models (.lnck)

Layout (all integers unsigned, little-endian; strings are a uint16 byte
length followed by UTF-8):

	header   magic "LNCK" | version u16 | seed u64 | config sha256 (32 raw bytes)
	         | model name str | phi tag str | rho tag str | section count u32
	section  role u8 (0 phi, 1 core, 2 rho) | kind u8 (1 dense, 2 exp)
	         | trainable u8 | in_dim u32 | out_dim u32 | activation str
	         | weight float64[out_dim * in_dim] row-major | bias float64[out_dim]

Exp-generator sections store the generator A, not exp(A). Frozen random
stacks store their realized matrices so runs replay without the RNG.
"""

import logging
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import InvalidInputError
from ..maps.feature_maps import (
	FeatureMap,
	ReadoutMap,
	identity_feature,
	identity_readout,
	logistic_readout,
	skip_feature,
)
from .lifted_model import LiftedModel
from .network import Layer, LayerStack, Network

logger = logging.getLogger(__name__)

MAGIC = b"LNCK"
VERSION = 1
ROLES = ("phi", "core", "rho")
KIND_CODES = {"dense": 1, "exp": 2}
KIND_NAMES = {code: kind for kind, code in KIND_CODES.items()}
NO_ACTIVATION = "none"


def _pack_str(text):
	data = text.encode("utf-8")
	return struct.pack("<H", len(data)) + data


class _Reader:
	def __init__(self, data):
		self.data = data
		self.offset = 0

	def take(self, fmt):
		size = struct.calcsize(fmt)
		if self.offset + size > len(self.data):
			raise InvalidInputError("checkpoint is truncated")
		values = struct.unpack_from(fmt, self.data, self.offset)
		self.offset += size
		return values if len(values) > 1 else values[0]

	def raw(self, size):
		if self.offset + size > len(self.data):
			raise InvalidInputError("checkpoint is truncated")
		chunk = self.data[self.offset : self.offset + size]
		self.offset += size
		return chunk

	def string(self):
		return self.raw(self.take("<H")).decode("utf-8")

	def floats(self, count):
		return np.frombuffer(self.raw(8 * count), dtype="<f8").astype(float)


def _part_tag(part):
	if isinstance(part, LayerStack):
		return "trainable"
	if part.stack is None:
		return part.kind
	return "frozen_stack" if part.kind == "stack" else part.kind


def _part_layers(part):
	if isinstance(part, LayerStack):
		return part.layers
	if isinstance(part, (FeatureMap, ReadoutMap)) and part.stack is not None:
		return part.stack.layers
	return []


def save_checkpoint(path, model, seed=0, config_digest=None):
	"""Write model to path; config_digest is the hex SHA-256 of the resolved config"""
	digest = bytes.fromhex(config_digest) if config_digest else bytes(32)
	if len(digest) != 32:
		raise InvalidInputError("config digest must be a SHA-256 hex string")

	sections = []
	for role, part in zip(ROLES, (model.phi, model.core, model.rho)):
		for layer in _part_layers(part):
			sections.append((ROLES.index(role), layer))

	chunks = [
		MAGIC,
		struct.pack("<HQ", VERSION, int(seed) & 0xFFFFFFFFFFFFFFFF),
		digest,
		_pack_str(model.name),
		_pack_str(_part_tag(model.phi)),
		_pack_str(_part_tag(model.rho)),
		struct.pack("<I", len(sections)),
	]
	for role, layer in sections:
		chunks.append(
			struct.pack(
				"<BBBII", role, KIND_CODES[layer.kind], int(layer.trainable), layer.in_dim, layer.out_dim
			)
		)
		chunks.append(_pack_str(layer.descriptor))
		chunks.append(np.ascontiguousarray(layer.weight, dtype="<f8").tobytes())
		chunks.append(np.ascontiguousarray(layer.bias, dtype="<f8").tobytes())

	os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
	tmp = f"{path}.tmp"
	with open(tmp, "wb") as f:
		f.write(b"".join(chunks))
	os.replace(tmp, path)
	logger.info(f"Saved checkpoint {path} ({len(sections)} layer sections)")
	return path


@dataclass
class Checkpoint:
	seed: int
	config_digest: str
	name: str
	phi_tag: str
	rho_tag: str
	stacks: dict = field(default_factory=dict)

	def to_model(self, phi=None, rho=None):
		"""
		Rebuild the LiftedModel; phi / rho must be passed for maps that carry
		no layers (geometric maps, custom functions).
		"""
		core = self.stacks["core"]
		phi = phi if phi is not None else self._restore_phi(core)
		rho = rho if rho is not None else self._restore_rho(core)
		return LiftedModel(phi, core, rho, name=self.name)

	def _restore_phi(self, core):
		stack = self.stacks.get("phi")
		if self.phi_tag == "trainable":
			return stack
		if self.phi_tag == "frozen_stack":
			return stack.freeze(kind="stack")
		if self.phi_tag == "random":
			return stack.freeze(kind="random", claims_injective=True)
		if self.phi_tag == "skip":
			return skip_feature(stack.freeze(kind="random", claims_injective=True), stack.in_dim)
		if self.phi_tag == "identity":
			return identity_feature(core.in_dim)
		raise InvalidInputError(f"feature map '{self.phi_tag}' is not stored in the checkpoint; pass phi")

	def _restore_rho(self, core):
		stack = self.stacks.get("rho")
		if self.rho_tag == "trainable":
			return stack
		if self.rho_tag == "frozen_stack":
			return stack.freeze_readout(kind="stack")
		if self.rho_tag == "identity":
			return identity_readout(core.out_dim)
		if self.rho_tag == "logistic":
			return logistic_readout(core.out_dim)
		raise InvalidInputError(f"readout '{self.rho_tag}' is not stored in the checkpoint; pass rho")


def load_checkpoint(path):
	with open(path, "rb") as f:
		reader = _Reader(f.read())

	if reader.raw(4) != MAGIC:
		raise InvalidInputError(f"{path} is not a lifted-network checkpoint")
	version, seed = reader.take("<HQ")
	if version != VERSION:
		raise InvalidInputError(f"unsupported checkpoint version {version}")
	digest = reader.raw(32)
	name = reader.string()
	phi_tag = reader.string()
	rho_tag = reader.string()
	count = reader.take("<I")

	layers = {role: [] for role in ROLES}
	for _ in range(count):
		role, kind, trainable, in_dim, out_dim = reader.take("<BBBII")
		if role >= len(ROLES) or kind not in KIND_NAMES:
			raise InvalidInputError(f"corrupt section header (role {role}, kind {kind})")
		descriptor = reader.string()
		weight = reader.floats(out_dim * in_dim).reshape(out_dim, in_dim)
		bias = reader.floats(out_dim)
		activation = None if descriptor == NO_ACTIVATION else descriptor
		layers[ROLES[role]].append(Layer(KIND_NAMES[kind], weight, bias, activation, trainable=bool(trainable)))
	if reader.offset != len(reader.data):
		raise InvalidInputError(f"{len(reader.data) - reader.offset} trailing bytes in checkpoint")

	stacks = {}
	for role, role_layers in layers.items():
		if role_layers:
			cls = Network if role == "core" else LayerStack
			stacks[role] = cls(role_layers, name=role)
	if "core" not in stacks:
		raise InvalidInputError("checkpoint has no core network")

	return Checkpoint(
		seed=seed,
		config_digest=digest.hex() if any(digest) else "",
		name=name,
		phi_tag=phi_tag,
		rho_tag=rho_tag,
		stacks=stacks,
	)
