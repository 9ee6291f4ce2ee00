"""
Operator types untuk propagation
================================

`OperatorMatrix` adalah matrix dense kecil (model 2-level), `ArrowHamiltonian`
adalah Hamiltonian system+bath dengan struktur "arrow": tiap bath mode hanya
terhubung ke satu system state, sehingga matvec O(N).
"""

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from config.config import Config
from .exceptions import DimensionMismatchError, InvalidParameterError


@dataclass(frozen=True)
class OperatorMatrix:
    """Square complex matrix with an optional Hermitian flag"""
    entries: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(f"Operator must be square, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise InvalidParameterError("Operator entries must be finite")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        if self.hermitian and not self.is_hermitian():
            raise InvalidParameterError("Operator flagged Hermitian but H != H^dagger")

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def is_hermitian(self, tol: float = None) -> bool:
        tol = Config.HERMITIAN_TOL if tol is None else tol
        scale = max(1.0, float(np.max(np.abs(self.entries))))
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol * scale)

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, self.hermitian)

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries, 2))

    def _check(self, vectors: np.ndarray):
        if vectors.shape[-1] != self.dimension:
            raise DimensionMismatchError(
                f"Operator of dimension {self.dimension} applied to vector of length {vectors.shape[-1]}"
            )

    def apply(self, vectors: np.ndarray) -> np.ndarray:
        """H|v>; rows of a 2-D array are treated as separate vectors"""
        vectors = np.asarray(vectors, dtype=complex)
        self._check(vectors)
        return vectors @ self.entries.T

    def expectation(self, vector: np.ndarray) -> complex:
        """<v|H|v> (not normalized)"""
        vector = np.asarray(vector, dtype=complex)
        return complex(np.vdot(vector, self.apply(vector)))

    def expectation_many(self, states: np.ndarray) -> np.ndarray:
        states = np.asarray(states, dtype=complex)
        self._check(states)
        return np.einsum("ti,ij,tj->t", states.conj(), self.entries, states)

    def rk4_step_matrix(self, dt: float) -> np.ndarray:
        """Degree-4 Taylor polynomial of exp(-i H dt): one RK4 step for constant H"""
        step = -1j * dt * self.entries
        term = np.eye(self.dimension, dtype=complex)
        total = term.copy()
        for order in range(1, 5):
            term = term @ step / order
            total = total + term
        return total

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if other.dimension != self.dimension:
            raise DimensionMismatchError("Cannot add operators of different dimension")
        return OperatorMatrix(self.entries + other.entries, self.hermitian and other.hermitian)


@dataclass(frozen=True)
class DecayChannel:
    """
    Jump operator o (shape m x d, mapping the tracked subspace to its post-jump
    image) with rate gamma. Only o^dagger o enters the no-jump generator.
    """
    label: str
    operator: np.ndarray
    rate: float

    def __post_init__(self):
        operator = np.atleast_2d(np.array(self.operator, dtype=complex))
        if self.rate < 0:
            raise InvalidParameterError(f"Decay rate of channel '{self.label}' is negative")
        operator.setflags(write=False)
        object.__setattr__(self, "operator", operator)

    @property
    def dimension(self) -> int:
        return self.operator.shape[1]

    def number_operator(self) -> np.ndarray:
        return self.operator.conj().T @ self.operator

    def jump_rates(self, states: np.ndarray) -> np.ndarray:
        """gamma * ||o psi||^2 for each row of `states`"""
        images = np.asarray(states, dtype=complex) @ self.operator.T
        return self.rate * np.einsum("ti,ti->t", images.conj(), images).real


@dataclass(frozen=True)
class BathBlock:
    """
    One reservoir: mode k couples with strength couplings[k] to system state
    `source` and has energy energies[k].
    """
    label: str
    source: int
    energies: np.ndarray
    couplings: np.ndarray


@dataclass
class ArrowHamiltonian:
    """
    Hermitian system-reservoir Hamiltonian restricted to one excitation.

    Layout: the system block first, then each bath block in order. A bath mode
    couples only to its block's source state, so `apply` costs O(dimension).
    """
    system_block: np.ndarray
    system_labels: Tuple[str, ...]
    blocks: List[BathBlock]
    system_excitations: np.ndarray = None
    hermitian: bool = field(default=True, init=False)

    def __post_init__(self):
        self.system_block = np.array(self.system_block, dtype=complex)
        size = self.system_block.shape[0]
        if self.system_block.shape != (size, size) or len(self.system_labels) != size:
            raise DimensionMismatchError("System block must be square and fully labeled")
        if np.max(np.abs(self.system_block - self.system_block.conj().T)) > Config.HERMITIAN_TOL:
            raise InvalidParameterError("System block of the joint Hamiltonian must be Hermitian")
        for block in self.blocks:
            if not 0 <= block.source < size:
                raise DimensionMismatchError(f"Bath block '{block.label}' has an invalid source state")
            if block.energies.shape != block.couplings.shape:
                raise DimensionMismatchError(f"Bath block '{block.label}' has mismatched arrays")
        if self.system_excitations is None:
            self.system_excitations = np.ones(size)
        self._offsets = np.cumsum([size] + [len(block.energies) for block in self.blocks])

    @property
    def system_size(self) -> int:
        return self.system_block.shape[0]

    @property
    def dimension(self) -> int:
        return int(self._offsets[-1])

    def block_slice(self, index: int) -> slice:
        return slice(int(self._offsets[index]), int(self._offsets[index + 1]))

    def basis_labels(self) -> Tuple[str, ...]:
        labels = [f"{label}|vac" for label in self.system_labels]
        for block in self.blocks:
            labels.extend(f"{block.label}[{k}]" for k in range(len(block.energies)))
        return tuple(labels)

    def excitation_numbers(self) -> np.ndarray:
        """Total excitation count of every basis state"""
        counts = [np.asarray(self.system_excitations, dtype=float)]
        counts.extend(np.ones(len(block.energies)) for block in self.blocks)
        return np.concatenate(counts)

    def apply(self, vectors: np.ndarray) -> np.ndarray:
        vectors = np.asarray(vectors, dtype=complex)
        if vectors.shape[-1] != self.dimension:
            raise DimensionMismatchError(
                f"Joint Hamiltonian of dimension {self.dimension} applied to length {vectors.shape[-1]}"
            )
        size = self.system_size
        result = np.empty_like(vectors)
        result[..., :size] = vectors[..., :size] @ self.system_block.T
        for index, block in enumerate(self.blocks):
            part = self.block_slice(index)
            modes = vectors[..., part]
            result[..., part] = block.energies * modes + block.couplings * vectors[..., block.source, None]
            result[..., block.source] += modes @ block.couplings
        return result

    def expectation(self, vector: np.ndarray) -> complex:
        vector = np.asarray(vector, dtype=complex)
        return complex(np.vdot(vector, self.apply(vector)))

    def expectation_many(self, states: np.ndarray) -> np.ndarray:
        states = np.asarray(states, dtype=complex)
        return np.einsum("ti,ti->t", states.conj(), self.apply(states))

    def is_hermitian(self, tol: float = None) -> bool:
        return True

    def to_dense(self) -> np.ndarray:
        if self.dimension > Config.DENSE_LIMIT:
            raise InvalidParameterError(
                f"Dense form refused above {Config.DENSE_LIMIT} states (got {self.dimension})"
            )
        return self.apply(np.eye(self.dimension, dtype=complex)).T
