"""State-vector core: registers, gates, the XOR query transform, and the
query-mass quantities the inequality suites are built on.

Register/encoding conventions (fixed, relied on by the file formats):

* A layout has tau working qubits (positions 0..tau-1), then the n-qubit
  query address half (positions tau..tau+n-1), then the n-qubit answer
  half (positions tau+n..tau+2n-1).
* Amplitudes live in one flat array of length 2**(tau+2n).  The address
  word occupies the n lowest index bits, the answer half the next n bits,
  the working register the top bits.  Within every register the word is
  read most-significant-bit first, matching the BitWord encoding.
* A gate's matrix is written in the basis |e(g_0), e(g_1), ...> of its
  target list, first target most significant.

States are values: every operation returns a fresh vector and never
mutates its inputs.  The total qubit count is capped (default 24, about
16M amplitudes); set QQLAB_QUBIT_CAP to override.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (CapExceededError, DuplicateTargetError, LayoutMismatchError,
                     NonUnitaryError, NotNormalizedError, TargetOutOfRangeError,
                     WidthMismatchError)
from .oracles import BitWord, OracleTable
from .rng import as_generator

DEFAULT_QUBIT_CAP = 24
UNITARITY_TOL = 1e-9
MAX_GATE_TARGETS = 4


def qubit_cap() -> int:
    return int(os.environ.get("QQLAB_QUBIT_CAP", DEFAULT_QUBIT_CAP))


@dataclass(frozen=True)
class QubitLayout:
    """tau working qubits plus a 2n-qubit query register."""

    work_count: int
    query_width: int

    def __post_init__(self):
        if self.query_width < 1:
            raise WidthMismatchError("query width must be >= 1")
        if self.work_count < 0:
            raise WidthMismatchError("working qubit count must be >= 0")
        cap = qubit_cap()
        if self.total > cap:
            raise CapExceededError(
                f"layout needs {self.total} qubits, cap is {cap} "
                "(set QQLAB_QUBIT_CAP to override)")

    @property
    def total(self) -> int:
        return self.work_count + 2 * self.query_width

    @property
    def dim(self) -> int:
        return 1 << self.total

    def index_bit(self, position: int) -> int:
        """Flat-index bit occupied by a qubit position."""
        tau, n = self.work_count, self.query_width
        if not 0 <= position < self.total:
            raise TargetOutOfRangeError(f"position {position} outside 0..{self.total - 1}")
        if position < tau:
            return 2 * n + (tau - 1 - position)
        if position < tau + n:
            return n - 1 - (position - tau)
        return 2 * n - 1 - (position - tau - n)

    def index_bits(self, positions) -> tuple[int, ...]:
        return tuple(self.index_bit(p) for p in positions)

    @property
    def work_positions(self) -> tuple[int, ...]:
        return tuple(range(self.work_count))

    @property
    def address_positions(self) -> tuple[int, ...]:
        return tuple(range(self.work_count, self.work_count + self.query_width))

    @property
    def answer_positions(self) -> tuple[int, ...]:
        return tuple(range(self.work_count + self.query_width, self.total))


@dataclass(frozen=True)
class BasisAssignment:
    """A 0/1 value for every qubit position."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise LayoutMismatchError("assignment bits must be 0 or 1")

    def address_word(self, layout: QubitLayout) -> BitWord:
        if len(self.bits) != layout.total:
            raise LayoutMismatchError("assignment does not cover the layout")
        return BitWord.from_bits(self.bits[p] for p in layout.address_positions)

    def word_at(self, positions) -> BitWord:
        return BitWord.from_bits(self.bits[p] for p in positions)


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes over the basic states of a layout.

    Computation states are unit norm; difference vectors are allowed to
    carry any norm (query masses remain meaningful on them).
    """

    layout: QubitLayout
    amplitudes: np.ndarray = field(compare=False)

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128)
        if a.shape != (self.layout.dim,):
            raise LayoutMismatchError(
                f"expected {self.layout.dim} amplitudes, got {a.shape}")
        a.flags.writeable = False
        object.__setattr__(self, "amplitudes", a)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class LocalUnitary:
    """A small unitary acting on an ordered list of qubit positions."""

    targets: tuple[int, ...]
    matrix: np.ndarray = field(compare=False)

    def __init__(self, targets, matrix, max_targets: int = MAX_GATE_TARGETS):
        targets = tuple(int(t) for t in targets)
        if len(set(targets)) != len(targets):
            raise DuplicateTargetError(f"duplicate gate targets {targets}")
        if not targets:
            raise TargetOutOfRangeError("gate needs at least one target")
        if len(targets) > max_targets:
            raise TargetOutOfRangeError(
                f"{len(targets)} targets exceeds gate cap {max_targets}")
        m = np.asarray(matrix, dtype=np.complex128)
        d = 1 << len(targets)
        if m.shape != (d, d):
            raise NonUnitaryError(f"matrix shape {m.shape} does not match {len(targets)} targets")
        err = np.abs(m @ m.conj().T - np.eye(d)).max()
        if err > UNITARITY_TOL:
            raise NonUnitaryError(f"matrix fails unitarity by {err:.3e}")
        m.flags.writeable = False
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "matrix", m)


def basis_state(layout: QubitLayout, assignment: BasisAssignment) -> StateVector:
    """Unit amplitude on one basic state."""
    if len(assignment.bits) != layout.total:
        raise LayoutMismatchError(
            f"assignment covers {len(assignment.bits)} positions, layout has {layout.total}")
    index = 0
    for p, b in enumerate(assignment.bits):
        index |= b << layout.index_bit(p)
    amps = np.zeros(layout.dim, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(layout, amps)


def _check_targets(layout: QubitLayout, u: LocalUnitary) -> tuple[int, ...]:
    for t in u.targets:
        if not 0 <= t < layout.total:
            raise TargetOutOfRangeError(f"target {t} outside layout of {layout.total} qubits")
    return layout.index_bits(u.targets)


def apply_local_unitary(state: StateVector, u: LocalUnitary) -> StateVector:
    """The working transform: u on its targets, identity elsewhere."""
    bits = _check_targets(state.layout, u)
    amps = state.amplitudes.copy()
    kernels.apply_matrix_inplace(amps, state.layout.total, bits, u.matrix)
    return StateVector(state.layout, amps)


def apply_query(state: StateVector, f: OracleTable) -> StateVector:
    """XOR query: |w, a, b> -> |w, a, f(a) xor b>."""
    n = state.layout.query_width
    if f.width != n:
        raise WidthMismatchError(f"oracle width {f.width} != query width {n}")
    amps = kernels.apply_query(state.amplitudes, state.layout.total, n, f.values)
    return StateVector(state.layout, amps)


def query_masses(vector: StateVector) -> np.ndarray:
    """Mass on every address word at once (length 2**n array)."""
    return kernels.address_masses(vector.amplitudes, vector.layout.query_width)


def query_mass(vector: StateVector, a: BitWord) -> float:
    """Total squared magnitude on basic states whose address half is a.

    Defined for any vector, normalized or not, so it can be evaluated on
    differences of states.
    """
    n = vector.layout.query_width
    if a.width != n:
        raise WidthMismatchError(f"word width {a.width} != query width {n}")
    block = vector.amplitudes.reshape(-1, 1 << n)[:, a.value]
    return float((block.real ** 2 + block.imag ** 2).sum())


def oracle_distance(state: StateVector, f: OracleTable, g: OracleTable) -> float:
    """Square root of the query mass on the words where f and g differ."""
    n = state.layout.query_width
    if f.width != n or g.width != n:
        raise WidthMismatchError("oracle widths must match the query register")
    mask = f.values != g.values
    if not mask.any():
        return 0.0
    return float(np.sqrt(query_masses(state)[mask].sum()))


def l2_distance(v1: StateVector, v2: StateVector) -> float:
    if v1.layout != v2.layout:
        raise LayoutMismatchError("states use different layouts")
    return float(np.linalg.norm(v1.amplitudes - v2.amplitudes))


def observe(state: StateVector, seed) -> BasisAssignment:
    """Sample one basic state under the squared-magnitude distribution.

    Pure sampling: the stored state is never collapsed, so repeated calls
    draw with replacement.  Deterministic given the seed.
    """
    p = state.amplitudes.real ** 2 + state.amplitudes.imag ** 2
    total = p.sum()
    if abs(np.sqrt(total) - 1.0) > 1e-6:
        raise NotNormalizedError(f"state norm {np.sqrt(total):.9f} is not 1 within 1e-6")
    rng = as_generator(seed)
    cum = np.cumsum(p)
    index = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    index = min(index, len(p) - 1)
    layout = state.layout
    bits = tuple((index >> layout.index_bit(pos)) & 1 for pos in range(layout.total))
    return BasisAssignment(bits)


# gate builders

_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
_CNOT = np.array([[1, 0, 0, 0],
                  [0, 1, 0, 0],
                  [0, 0, 0, 1],
                  [0, 0, 1, 0]], dtype=np.complex128)


def x_gate(position: int) -> LocalUnitary:
    return LocalUnitary((position,), _X)


def h_gate(position: int) -> LocalUnitary:
    return LocalUnitary((position,), _H)


def cnot_gate(control: int, target: int) -> LocalUnitary:
    return LocalUnitary((control, target), _CNOT)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_gate(targets, rng: np.random.Generator) -> LocalUnitary:
    return LocalUnitary(tuple(targets), haar_unitary(1 << len(targets), rng))


def state_dump(state: StateVector, nonzero_only: bool = True) -> str:
    """Debug dump: one "index re im" line per amplitude, 17 significant digits."""
    lines = []
    for i, amp in enumerate(state.amplitudes):
        if nonzero_only and amp == 0:
            continue
        lines.append(f"{i} {amp.real:.17g} {amp.imag:.17g}")
    return "\n".join(lines) + "\n"
