import numpy as np
import pytest

from qqlab.analysis import (GapReport, adversary_bound_report,
                            build_hard_oracle, lemma1_check, lemma2_check,
                            pigeonhole_mutation_check, query_mass_matrix)
from qqlab.errors import TraceNotSucceededError
from qqlab.oracles import BitWord, make_oracle, mutate, sample_uniform_oracle
from qqlab.programs import (QueryProgram, classical_emulation_program,
                            random_program, truncate_after_query)
from qqlab.qsim import (QubitLayout, StateVector, h_gate, x_gate)
from qqlab.rng import generator


def w(s):
    return BitWord.from_string(s)


def random_state(layout, rng):
    amps = rng.standard_normal(layout.dim) + 1j * rng.standard_normal(layout.dim)
    return StateVector(layout, amps / np.linalg.norm(amps))


def concentrated_program(n: int, t: int, work: int = 1) -> QueryProgram:
    """Every pre-query state keeps all its query mass on the input word."""
    lay = QubitLayout(work, n)
    return QueryProgram(lay, (), tuple((x_gate(0),) for _ in range(t)),
                        tuple(range(min(n, lay.total))))


def uniform_address_program(n: int, t: int) -> QueryProgram:
    """Prelude spreads the address uniformly; rounds are gateless."""
    lay = QubitLayout(1, n)
    prelude = tuple(h_gate(p) for p in lay.address_positions)
    return QueryProgram(lay, prelude, ((),) * t, (0,))


class TestLemma1Check:
    def test_equal_oracles(self):
        lay = QubitLayout(1, 2)
        st = random_state(lay, generator(0, "l1", 0))
        f = sample_uniform_oracle(2, 0)
        rep = lemma1_check(st, f, f)
        assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.holds()

    def test_frozen_half_mass_example(self):
        # 4-amplitude computation by hand: lhs 1, rhs 2/sqrt(2)
        lay = QubitLayout(0, 1)
        amps = np.zeros(4, complex)
        amps[0] = amps[1] = 1 / np.sqrt(2)
        st = StateVector(lay, amps)
        f = make_oracle(1, [w("0"), w("1")])
        g = mutate(f, w("0"), w("1"))
        rep = lemma1_check(st, f, g)
        assert rep.lhs == pytest.approx(1.0, abs=1e-12)
        assert rep.rhs == pytest.approx(2 / np.sqrt(2), abs=1e-12)

    def test_random_sweep_never_violates(self):
        for trial in range(300):
            rng = generator(1, "l1sweep", trial)
            n = int(rng.integers(1, 4))
            lay = QubitLayout(int(rng.integers(0, 3)), n)
            st = random_state(lay, rng)
            rep = lemma1_check(st, sample_uniform_oracle(n, rng),
                               sample_uniform_oracle(n, rng))
            assert rep.slack >= -1e-9


class TestLemma2Check:
    def test_noop_mutation(self):
        prog = random_program(2, 2, 3, 4)
        f = sample_uniform_oracle(2, 4)
        a = w("01")
        rep = lemma2_check(prog, f, a, f(a), w("00"))
        assert rep.lhs == 0.0 and rep.rhs == 0.0

    def test_one_round_orthogonal_answers(self):
        # all mass on the mutated address: lhs sqrt(2), rhs 2
        lay = QubitLayout(0, 1)
        prog = QueryProgram(lay, (), ((),), (0,))
        f = make_oracle(1, [w("0"), w("1")])
        rep = lemma2_check(prog, f, w("0"), w("1"), w("0"))
        assert rep.lhs == pytest.approx(np.sqrt(2), abs=1e-12)
        assert rep.rhs == pytest.approx(2.0, abs=1e-12)

    def test_random_sweep_never_violates(self):
        for trial in range(60):
            rng = generator(2, "l2sweep", trial)
            n = int(rng.integers(1, 4))
            t = int(rng.integers(0, 7))
            prog = random_program(n, int(rng.integers(0, 5)), t, rng)
            f = sample_uniform_oracle(n, rng)
            a = BitWord(n, int(rng.integers(0, 1 << n)))
            y = BitWord(n, int(rng.integers(0, 1 << n)))
            rep = lemma2_check(prog, f, a, y, BitWord.zero(n))
            assert rep.slack >= -1e-9


class TestBuildHardOracle:
    def test_regime_enforced(self):
        prog = random_program(2, 2, 2, 0)
        with pytest.raises(ValueError):
            build_hard_oracle(prog, 2, 1.0, 0)  # needs t = T-1 = 1

    def test_zero_round_trace(self):
        # T = 1: threshold is 1, so only a full-mass word can be struck
        prog = concentrated_program(3, 0)
        trace = build_hard_oracle(prog, 1, 1.0, 7)
        assert trace.succeeded and trace.t == 0
        assert len(trace.steps) == 1
        assert trace.steps[0].pivot == w("000")
        assert len(trace.final_candidates) == 7  # the input word was struck
        assert trace.final_value is not None

    def test_concentrated_program_always_succeeds(self):
        # mass pinned to the input word: it is the only word ever struck
        for T in (2, 3, 4):
            prog = concentrated_program(3, T - 1)
            trace = build_hard_oracle(prog, T, 1.0, 21 + T)
            assert trace.succeeded
            assert all(len(s.candidates) >= 7 for s in trace.steps[1:])
            assert trace.steps[-1].pivot != w("000")

    def test_uniform_mass_exhausts(self):
        # two words of mass 0.5 against threshold 2**-5.5: both struck
        prog = uniform_address_program(1, 1)
        trace = build_hard_oracle(prog, 2, 1.0, 5)
        assert not trace.succeeded
        assert trace.exhausted_at == 1
        assert trace.final_value is None

    def test_pivot_light_in_every_state(self):
        # the last pivot's mass stays below the threshold in all recorded
        # states, including the initial one
        hits = 0
        for trial in range(25):
            rng = generator(3, "pivot", trial)
            n, T = 5, 2
            prog = random_program(n, 2, T - 1, rng)
            trace = build_hard_oracle(prog, T, 1.0, rng)
            if not trace.succeeded:
                continue
            hits += 1
            x_t = trace.steps[-1].pivot
            for step in trace.steps:
                assert step.masses[x_t.value] < trace.threshold
            assert trace.pivot_mass_max < trace.threshold
        assert hits >= 10

    def test_candidate_sets_shrink(self):
        prog = truncate_after_query(classical_emulation_program(3, 3), 2)
        trace = build_hard_oracle(prog, 3, 1.0, 9)
        assert trace.succeeded
        sets = [s.candidates for s in trace.steps[1:]]
        for a, b in zip(sets, sets[1:]):
            assert b.values <= a.values
        for s in trace.steps[1:]:
            assert s.pivot in s.candidates

    def test_deterministic(self):
        prog = truncate_after_query(classical_emulation_program(3, 3), 2)
        t1 = build_hard_oracle(prog, 3, 1.0, 13)
        t2 = build_hard_oracle(prog, 3, 1.0, 13)
        assert [s.pivot for s in t1.steps] == [s.pivot for s in t2.steps]
        assert t1.final_oracle == t2.final_oracle
        assert t1.final_value == t2.final_value

    def test_oracle_updates_at_previous_pivot(self):
        prog = truncate_after_query(classical_emulation_program(3, 4), 3)
        trace = build_hard_oracle(prog, 4, 1.0, 17)
        assert trace.succeeded
        for i in range(1, len(trace.steps)):
            prev, cur = trace.steps[i - 1], trace.steps[i]
            changed = np.nonzero(prev.oracle.values != cur.oracle.values)[0]
            assert set(changed) <= {prev.pivot.value}
            assert cur.oracle(prev.pivot) == cur.pivot


class TestAdversaryBoundReport:
    def test_zero_round_report(self):
        prog = concentrated_program(3, 0)
        trace = build_hard_oracle(prog, 1, 1.0, 7)
        rep = adversary_bound_report(prog, trace, 1, 1.0)
        assert rep.deltas == [] and rep.drifts == [0.0]
        assert rep.final_gap == pytest.approx(0.0, abs=1e-12)
        assert not rep.violations()

    def test_exhausted_trace_rejected(self):
        prog = uniform_address_program(1, 1)
        trace = build_hard_oracle(prog, 2, 1.0, 5)
        with pytest.raises(TraceNotSucceededError):
            adversary_bound_report(prog, trace, 2, 1.0)

    def test_first_drift_equals_first_delta(self):
        prog = truncate_after_query(classical_emulation_program(3, 3), 2)
        trace = build_hard_oracle(prog, 3, 1.0, 19)
        rep = adversary_bound_report(prog, trace, 3, 1.0)
        assert rep.drifts[1] == pytest.approx(rep.deltas[0], abs=1e-12)

    def test_emulation_checked_rows_pass(self):
        prog = truncate_after_query(classical_emulation_program(3, 3), 2)
        trace = build_hard_oracle(prog, 3, 1.0, 23)
        rep = adversary_bound_report(prog, trace, 3, 1.0)
        assert rep.violations() == []
        assert rep.final_gap <= rep.chain_rhs + 1e-9

    def test_concentrated_first_round_breaks_premise(self):
        """Documented defect of the rate-bound chain: a program whose first
        query concentrates on the input word detects the construction's very
        first redirection, so the measured first-round change is sqrt(2) and
        the alpha-rate bound cannot hold there.  The report must record the
        premise failure and leave those rows unchecked rather than hide them.
        """
        prog = truncate_after_query(classical_emulation_program(3, 3), 2)
        trace = build_hard_oracle(prog, 3, 1.0, 29)
        rep = adversary_bound_report(prog, trace, 3, 1.0)
        assert rep.premises[0] is False
        assert rep.premise_masses[0] == pytest.approx(1.0, abs=1e-9)
        assert rep.deltas[0] == pytest.approx(np.sqrt(2), abs=1e-9)
        first = [r for r in rep.rows if r.context == "round_change[i=0]"][0]
        assert not first.checked and not first.holds()
        # rounds after the first satisfy their premise by construction
        assert all(rep.premises[1:])

    def test_random_sweep_no_checked_violations(self):
        succeeded = 0
        for trial in range(20):
            rng = generator(4, "sweep", trial)
            n = int(rng.integers(4, 7))
            T = int(rng.integers(2, 5))
            prog = random_program(n, 2, T - 1, rng)
            trace = build_hard_oracle(prog, T, 1.0, rng)
            if not trace.succeeded:
                continue
            succeeded += 1
            rep = adversary_bound_report(prog, trace, T, 1.0)
            assert rep.violations() == []
        assert succeeded >= 8


class TestQueryMassMatrix:
    def test_never_queried_orbit_gives_zero_matrix(self):
        # input 11 under the identity oracle orbits at 11 forever, while the
        # program only ever queries address 00
        ident = make_oracle(2, [w("00"), w("01"), w("10"), w("11")])
        prog = concentrated_program(2, 2, work=2)
        m = query_mass_matrix(prog, ident, 3, w("11"))
        assert np.all(m.entries == 0.0)
        assert np.all(m.col_sums == 0.0)

    def test_emulation_diagonal(self):
        prog = classical_emulation_program(2, 3)
        four_cycle = make_oracle(2, [w("01"), w("10"), w("11"), w("00")])
        m = query_mass_matrix(prog, four_cycle, 3, w("00"))
        assert m.distinct_orbit
        assert np.allclose(m.entries, np.eye(3), atol=1e-9)
        assert np.allclose(m.col_sums, [1, 1, 1], atol=1e-9)
        assert np.allclose(m.row_sums, 1.0, atol=1e-9)

    def test_row_sums_bounded_on_random_pairs(self):
        for trial in range(100):
            rng = generator(5, "rows", trial)
            n = int(rng.integers(2, 5))
            t = int(rng.integers(1, 4))
            prog = random_program(n, 2, t, rng)
            f = sample_uniform_oracle(n, rng)
            m = query_mass_matrix(prog, f, int(rng.integers(1, 9)), BitWord.zero(n))
            assert np.all(m.row_sums <= 1 + 1e-9)

    def test_duplicate_orbit_columns_flagged(self):
        ident = make_oracle(2, [w("00"), w("01"), w("10"), w("11")])
        prog = random_program(2, 2, 2, 0)
        m = query_mass_matrix(prog, ident, 4, w("01"))
        assert not m.distinct_orbit  # fixed point repeats the same word


class TestPigeonholeMutation:
    def test_zero_column_means_zero_gap(self):
        ident = make_oracle(2, [w("00"), w("01"), w("10"), w("11")])
        prog = concentrated_program(2, 2, work=2)
        rep = pigeonhole_mutation_check(prog, ident, 3, w("11"), 1)
        assert rep.extra["column_sum"] == 0.0
        assert rep.lhs <= 1e-9

    def test_emulation_hits_the_bound_with_equality(self):
        prog = classical_emulation_program(2, 3)
        four_cycle = make_oracle(2, [w("01"), w("10"), w("11"), w("00")])
        rep = pigeonhole_mutation_check(prog, four_cycle, 3, w("00"), 2)
        assert rep.extra["j_star"] == 0      # smallest index among ties
        assert rep.extra["column_sum"] == pytest.approx(1.0, abs=1e-9)
        assert rep.extra["column_limit"] == pytest.approx(1.0)
        assert rep.holds()

    def test_sqrtT_regime_sweep(self):
        # t*t <= T/4: the gap respects both the column bound and 2t/sqrt(T)
        for trial in range(40):
            rng = generator(6, "sqrtT", trial)
            T, t, n = 16, 2, 6
            prog = random_program(n, 2, t, rng)
            f = sample_uniform_oracle(n, rng)
            rep = pigeonhole_mutation_check(prog, f, T, BitWord.zero(n), rng)
            assert rep.holds()
            assert rep.extra["column_sum"] <= t / T + 1e-9
            assert rep.lhs <= rep.extra["sqrtT_rhs"] + 1e-9

    def test_result_usually_changes(self):
        changed = 0
        for trial in range(20):
            rng = generator(7, "changed", trial)
            prog = random_program(5, 2, 2, rng)
            f = sample_uniform_oracle(5, rng)
            rep = pigeonhole_mutation_check(prog, f, 16, BitWord.zero(5), rng)
            changed += bool(rep.extra["result_changed"])
        assert changed >= 10


class TestGapReport:
    def test_slack_and_vacuous(self):
        r = GapReport("x", 1.0, 3.0)
        assert r.slack == 2.0 and r.vacuous and r.holds()
        r2 = GapReport("x", 1.0, 0.5)
        assert not r2.holds() and not r2.vacuous
