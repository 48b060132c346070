"""Collapsed query programs and their execution.

A program is a prelude of gates followed by t rounds; executing round i
means one oracle query and then the round's gate list U_i.  The trace
records the state chain chi_0 (after the prelude) through chi_t, so
chi_i is exactly the state the (i+1)-th query acts on.

Program input convention: the input word is written on the first n
working qubits, every other qubit starts at 0.  Output convention: the
result is read verbatim off the program's output region.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import LayoutMismatchError, TargetOutOfRangeError, WidthMismatchError
from .oracles import BitWord, OracleTable
from .qsim import (BasisAssignment, LocalUnitary, QubitLayout, StateVector,
                   basis_state, cnot_gate, random_gate)
from .rng import as_generator


@dataclass(frozen=True)
class QueryProgram:
    layout: QubitLayout
    prelude: tuple[LocalUnitary, ...]
    rounds: tuple[tuple[LocalUnitary, ...], ...]
    output_region: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "prelude", tuple(self.prelude))
        object.__setattr__(self, "rounds", tuple(tuple(r) for r in self.rounds))
        object.__setattr__(self, "output_region", tuple(self.output_region))
        total = self.layout.total
        for g in self.all_gates():
            for t in g.targets:
                if not 0 <= t < total:
                    raise TargetOutOfRangeError(f"gate target {t} outside layout")
        if len(set(self.output_region)) != len(self.output_region):
            raise TargetOutOfRangeError("output region positions must be distinct")
        for p in self.output_region:
            if not 0 <= p < total:
                raise TargetOutOfRangeError(f"output position {p} outside layout")

    @property
    def query_count(self) -> int:
        return len(self.rounds)

    def all_gates(self):
        yield from self.prelude
        for r in self.rounds:
            yield from r


@dataclass(frozen=True)
class Trace:
    """The state chain chi_0..chi_t of one run."""

    states: tuple[StateVector, ...]
    query_count: int


def initial_state(layout: QubitLayout, input_word: BitWord) -> StateVector:
    n = layout.query_width
    if input_word.width != n:
        raise WidthMismatchError(f"input width {input_word.width} != query width {n}")
    if input_word.value != 0 and layout.work_count < n:
        raise LayoutMismatchError(
            f"nonzero input needs {n} working qubits, layout has {layout.work_count}")
    bits = [0] * layout.total
    for j, b in enumerate(input_word.bits):
        if b:
            bits[j] = 1
    return basis_state(layout, BasisAssignment(tuple(bits)))


def _execute(prog: QueryProgram, f: OracleTable, input_word: BitWord, keep_states: bool):
    if f.width != prog.layout.query_width:
        raise WidthMismatchError(
            f"oracle width {f.width} != query width {prog.layout.query_width}")
    layout = prog.layout
    total = layout.total
    buf = initial_state(layout, input_word).amplitudes.copy()
    for g in prog.prelude:
        kernels.apply_matrix_inplace(buf, total, layout.index_bits(g.targets), g.matrix)
    states = [StateVector(layout, buf)]
    for rnd in prog.rounds:
        buf = kernels.apply_query(buf, total, layout.query_width, f.values)
        for g in rnd:
            kernels.apply_matrix_inplace(buf, total, layout.index_bits(g.targets), g.matrix)
        # the buffer is rebound at the next query, so the snapshot stays intact
        states.append(StateVector(layout, buf))
    if keep_states:
        return states
    return states[-1]


def run(prog: QueryProgram, f: OracleTable, input_word: BitWord) -> Trace:
    """Execute and keep the whole state chain."""
    states = _execute(prog, f, input_word, keep_states=True)
    return Trace(tuple(states), prog.query_count)


def run_final(prog: QueryProgram, f: OracleTable, input_word: BitWord) -> StateVector:
    """Execute keeping only the final state (memory-light path for sweeps)."""
    return _execute(prog, f, input_word, keep_states=False)


def output_distribution(prog: QueryProgram, final_state: StateVector) -> np.ndarray:
    """Probability of each output-region value in the final state."""
    bits = final_state.layout.index_bits(prog.output_region)
    return kernels.value_distribution(final_state.amplitudes, final_state.layout.total, bits)


def success_probability(prog: QueryProgram, f: OracleTable, input_word: BitWord,
                        target: BitWord) -> float:
    """Exact probability that observing the final state reads target off the
    output region (no sampling)."""
    if target.width != len(prog.output_region):
        raise WidthMismatchError(
            f"target width {target.width} != output region size {len(prog.output_region)}")
    final = run_final(prog, f, input_word)
    return float(output_distribution(prog, final)[target.value])


def classical_emulation_program(n: int, T: int) -> QueryProgram:
    """A T-query program computing the T-fold iteration of the oracle.

    Fixed reversible layout: working registers r_0..r_T of n qubits each,
    r_0 holding the input.  Round i copies the answer into r_{i+1}, copies
    it back onto the answer half to clear it, clears the address of r_i,
    and (except after the last query) loads r_{i+1} as the next address;
    the prelude loads r_0 as the first address.  The output region is r_T,
    and on every oracle the final state is a single basic state holding
    the T-th orbit word there.
    """
    if T < 1:
        raise ValueError("need at least one query")
    layout = QubitLayout(n * (T + 1), n)
    reg = [tuple(range(j * n, (j + 1) * n)) for j in range(T + 1)]
    addr = layout.address_positions
    answer = layout.answer_positions
    copy = lambda src, dst: [cnot_gate(src[j], dst[j]) for j in range(n)]
    prelude = copy(reg[0], addr)
    rounds = []
    for i in range(T):
        gates = copy(answer, reg[i + 1])      # capture f(r_i)
        gates += copy(reg[i + 1], answer)     # clear the answer half
        gates += copy(reg[i], addr)           # clear the address
        if i < T - 1:
            gates += copy(reg[i + 1], addr)   # load the next query address
        rounds.append(tuple(gates))
    return QueryProgram(layout, tuple(prelude), tuple(rounds), reg[T])


def random_program(n: int, work_qubits: int, t: int, seed) -> QueryProgram:
    """Haar-random small-gate program: 1..4 gates on 1 or 2 random targets
    in the prelude and in every round."""
    rng = as_generator(seed)
    layout = QubitLayout(work_qubits, n)

    def gate_block():
        gates = []
        for _ in range(int(rng.integers(1, 5))):
            k = int(rng.integers(1, 3))
            targets = tuple(int(x) for x in rng.choice(layout.total, size=k, replace=False))
            gates.append(random_gate(targets, rng))
        return tuple(gates)

    prelude = gate_block()
    rounds = tuple(gate_block() for _ in range(t))
    out_width = min(n, layout.total)
    return QueryProgram(layout, prelude, rounds, tuple(range(out_width)))


def truncate_after_query(prog: QueryProgram, k: int) -> QueryProgram:
    """First k rounds only; prelude and output region unchanged."""
    if not 0 <= k <= prog.query_count:
        raise IndexError(f"cannot keep {k} of {prog.query_count} rounds")
    return QueryProgram(prog.layout, prog.prelude, prog.rounds[:k], prog.output_region)


# program files

def _gate_to_obj(g: LocalUnitary) -> dict:
    flat = []
    for row in g.matrix:
        for z in row:
            flat.append([float(z.real), float(z.imag)])
    return {"targets": list(g.targets), "matrix": flat}


def _gate_from_obj(obj: dict) -> LocalUnitary:
    targets = tuple(obj["targets"])
    d = 1 << len(targets)
    flat = obj["matrix"]
    if len(flat) != d * d:
        raise ValueError(f"gate matrix must have {d * d} entries, got {len(flat)}")
    m = np.array([complex(re, im) for re, im in flat], dtype=np.complex128).reshape(d, d)
    return LocalUnitary(targets, m)


def program_to_json(prog: QueryProgram) -> str:
    obj = {
        "format": "qqlab-program-v1",
        "layout": {"work_count": prog.layout.work_count,
                   "query_width": prog.layout.query_width},
        "prelude": [_gate_to_obj(g) for g in prog.prelude],
        "rounds": [[_gate_to_obj(g) for g in rnd] for rnd in prog.rounds],
        "output_region": list(prog.output_region),
    }
    return json.dumps(obj, indent=1)


def program_from_json(text: str) -> QueryProgram:
    obj = json.loads(text)
    if obj.get("format") != "qqlab-program-v1":
        raise ValueError(f"unknown program format {obj.get('format')!r}")
    layout = QubitLayout(obj["layout"]["work_count"], obj["layout"]["query_width"])
    prelude = tuple(_gate_from_obj(g) for g in obj["prelude"])
    rounds = tuple(tuple(_gate_from_obj(g) for g in rnd) for rnd in obj["rounds"])
    return QueryProgram(layout, prelude, rounds, tuple(obj["output_region"]))


def save_program(prog: QueryProgram, path) -> None:
    with open(path, "w") as fh:
        fh.write(program_to_json(prog))


def load_program(path) -> QueryProgram:
    with open(path) as fh:
        return program_from_json(fh.read())
