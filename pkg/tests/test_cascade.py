from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zenocascade.cascade import (DONE, CopyConflict, DataRace, DialectError,
                                 Micro, PhantomAccess, Status, TruncationMode,
                                 observed_schedule, predicted_schedule, run,
                                 spawn_root, step, trace_lines)
from zenocascade.lang import parse_source
from zenocascade.timebase import ONE, ZERO, Ordering, compare, make_dyadic

SKIP, PHANTOM = TruncationMode.SKIP, TruncationMode.PHANTOM_ZERO


def d(num, exp):
    return make_dyadic(num, exp)


def test_spawn_root(puzzle, thompson):
    s = spawn_root(puzzle, 3, SKIP)
    assert s.machines[1].status is Status.RUNNING
    assert s.machines[1].slot_start == ZERO
    assert s.machines[2].status is Status.NOT_SPAWNED
    assert s.machines[3].status is Status.NOT_SPAWNED
    assert list(spawn_root(puzzle, 1, SKIP).machines) == [1]
    with pytest.raises(DialectError):
        spawn_root(thompson, 4, SKIP)


def test_first_steps(puzzle):
    s = spawn_root(puzzle, 3, SKIP)
    ev = step(s)
    assert (ev.machine, ev.instruction_id, ev.start, ev.effect) == (1, 1, ZERO, d(1, 1))
    assert s.machines[2].status is Status.RUNNING
    assert s.machines[2].slot_start == d(1, 1)


def test_idle_spans_two_quanta(puzzle):
    r = run(puzzle, 3, SKIP)
    idle = [e for e in r.trace if e.machine == 2 and e.instruction_id == 2]
    assert idle[0].start == d(3, 4 - 2)
    third = next(e for e in r.trace if e.machine == 2 and e.instruction_id == 3)
    assert third.start == d(5, 2)


def test_last_machine_assign_is_noop_under_skip(puzzle):
    r = run(puzzle, 3, SKIP)
    last = [e for e in r.trace if e.machine == 3 and e.instruction_id == 3]
    assert [e.micro for e in last] == [Micro.EVAL, Micro.STORE]
    assert all(e.reads == () and e.writes == () for e in last)


@pytest.mark.parametrize("n, want", [(1, 0), (2, 1)])
def test_run_small(puzzle, n, want):
    r = run(puzzle, n, SKIP)
    assert r.final_values[1] == want
    assert r.completion_time == d(5, 1)
    assert not r.race_detected


def _hand_execute(n_machines, phantom=False):
    """Independent replay of the puzzle from the closed-form slot ends.

    Machine n samples cell n+1 at 1 + 2^(1-n) and stores at 1 + 3*2^-n.
    All sampled/stored effects are sorted by exact time and applied.
    """
    cells = {k: 0 for k in range(1, n_machines + 2)}
    events = []
    for k in range(1, n_machines + 1):
        events.append((1 + Fraction(2, 2 ** k), "eval", k))
        events.append((1 + Fraction(3, 2 ** k), "store", k))
    sampled = {}
    for t, kind, k in sorted(events):
        if k == n_machines and not phantom:
            continue
        if kind == "eval":
            sampled[k] = cells[k + 1] if k < n_machines else 0
        else:
            cells[k] = 1 - sampled[k]
    return {k: cells[k] for k in range(1, n_machines + 1)}


def test_run_four_machines_against_hand_execution(puzzle):
    r = run(puzzle, 4, SKIP)
    assert r.final_values == _hand_execute(4)
    assert r.final_values[1] == 1
    assert not r.race_detected


@pytest.mark.parametrize("n, want", [
    (1, (d(0, 0), d(1, 1), d(3, 1), d(5, 1))),
    (2, (d(1, 1), d(3, 2), d(5, 2), d(7, 2))),
    (3, (d(3, 2), d(7, 3), d(9, 3), d(11, 3))),
])
def test_predicted_schedule(n, want):
    assert predicted_schedule(n) == want


def test_predicted_schedule_closed_form():
    for n in range(1, 130):
        t1, t2, t3, t4 = (Fraction(t.numerator, 2 ** t.exponent) for t in predicted_schedule(n))
        q = Fraction(1, 2 ** n)
        assert t1 == sum(Fraction(1, 2 ** m) for m in range(1, n))
        assert (t2, t3, t4) == (t1 + q, t2 + 2 * q, t3 + 2 * q)


@pytest.mark.parametrize("big_n", [1, 2, 3, 7, 16, 64])
def test_schedule_equality(puzzle, big_n):
    r = run(puzzle, big_n, SKIP)
    for n in range(1, big_n + 1):
        assert observed_schedule(r.trace, n) == predicted_schedule(n)


def _effect(trace, machine, micro):
    return next(e.effect for e in trace if e.machine == machine and e.micro is micro)


@pytest.mark.parametrize("big_n", [2, 5, 33, 64])
def test_write_before_read(puzzle, big_n):
    r = run(puzzle, big_n, SKIP)
    for n in range(1, big_n):
        store_next = _effect(r.trace, n + 1, Micro.STORE)
        eval_n = _effect(r.trace, n, Micro.EVAL)
        assert store_next == ONE + d(3, n + 1)
        assert eval_n == ONE + d(2, n)
        assert compare(store_next, eval_n) is Ordering.LESS


def test_single_write_and_monotone_trace(puzzle):
    for big_n in (1, 2, 9, 30):
        r = run(puzzle, big_n, SKIP)
        writes = [c for e in r.trace for c, _ in e.writes]
        assert len(writes) == len(set(writes))
        effects = [e.effect for e in r.trace]
        assert effects == sorted(effects)
        assert all(len(e.writes) <= 1 for e in r.trace)
        for e in r.trace:
            assert e.effect == e.start + make_dyadic(1, e.machine)
        assert r.completion_time == max(effects)


def test_determinism(puzzle):
    a = trace_lines(run(puzzle, 12, SKIP).trace)
    b = trace_lines(run(puzzle, 12, SKIP).trace)
    assert a == b


def test_trace_record_format(puzzle):
    line = trace_lines(run(puzzle, 1, SKIP).trace)[0]
    assert line == ('{"machine": 1, "instruction_id": 1, "micro": "Whole", "start": "0/2^0", '
                    '"effect": "1/2^1", "reads": [], "writes": []}')


def test_phantom_zero_inverts(puzzle):
    for n in range(1, 11):
        assert run(puzzle, n, PHANTOM).final_values == _hand_execute(n, phantom=True)
        assert run(puzzle, n, PHANTOM).final_values[1] == 1 - run(puzzle, n, SKIP).final_values[1]


def test_diagnostic_mode_flags_phantom_access(puzzle):
    with pytest.raises(PhantomAccess):
        run(puzzle, 3, SKIP, diagnostics=True)


def test_data_race_detected():
    # every machine's second slot ends at t = 1; machine n reads cell n+1 while n+1 writes it
    racy = parse_source("PROGRAM r: COPY_PROGRAM_NEXT r; VALUE := VALUE_NEXT; END r;")
    with pytest.raises(DataRace) as info:
        run(racy, 3, SKIP)
    assert info.value.cell == 2 and info.value.time == ONE
    assert info.value.result.race_detected
    res = run(racy, 3, SKIP, raise_on_race=False)
    assert res.race_detected and res.completion_time == ONE
    assert not run(racy, 1, SKIP).race_detected


def test_copy_conflict():
    twice = parse_source("PROGRAM c: COPY_PROGRAM_NEXT c; COPY_PROGRAM_NEXT c; END c;")
    with pytest.raises(CopyConflict):
        run(twice, 3, SKIP)


def test_step_reports_done(puzzle):
    s = spawn_root(puzzle, 1, SKIP)
    events = []
    while (ev := step(s)) is not DONE:
        events.append(ev)
    assert len(events) == 5
    assert step(s) is DONE
    assert s.machines[1].status is Status.HALTED


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 64), st.sampled_from([SKIP, PHANTOM]))
def test_puzzle_invariants(n, mode):
    from conftest import load
    r = run(load("puzzle"), n, mode)
    assert not r.race_detected
    assert r.completion_time == d(5, 1)
    assert r.final_values[1] == (n % 2 == 0) ^ (mode is PHANTOM)
