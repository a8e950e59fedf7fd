import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zenocascade.cascade import DialectError, TruncationMode
from zenocascade.lang import parse_source
from zenocascade.supertask import (SequenceTooShort, VerdictKind, classify,
                                   classify_values, classify_zeno, freeness,
                                   run_zeno, sweep, write_sweep_csv,
                                   zeno_freeness)
from zenocascade.timebase import ZERO, make_dyadic

SKIP, PHANTOM = TruncationMode.SKIP, TruncationMode.PHANTOM_ZERO


def test_sweep_examples(puzzle):
    assert sweep(puzzle, 6, SKIP).values == [0, 1, 0, 1, 0, 1]
    assert sweep(puzzle, 1, SKIP).values == [0]
    assert sweep(puzzle, 6, PHANTOM).values == [1, 0, 1, 0, 1, 0]
    assert sweep(puzzle, 6)[2] == 1


def test_classify_examples(programs):
    v = classify([0, 1, 0, 1, 0, 1])
    assert v.kind is VerdictKind.PARADOX_UNDEFINED and v.evidence == 6
    assert str(classify([1, 1, 1, 1])) == "Converges(1)"
    relay = sweep(programs["relay"], 6, SKIP)
    assert relay.values == [0, 1, 1, 1, 1, 1]
    assert str(classify(relay)) == "Converges(1)"
    assert str(classify(sweep(programs["setone"], 8))) == "Converges(1)"


@pytest.mark.parametrize("values, kind", [
    ([0, 0, 1, 1], VerdictKind.UNKNOWN),
    ([0, 1, 1, 0, 1, 0, 0, 1], VerdictKind.UNKNOWN),
    ([1, 1, 0, 1, 0, 1], VerdictKind.PARADOX_UNDEFINED),
    ([1, 0, 0, 0, 0, 0], VerdictKind.CONVERGES),
    ([1, 1, 1, 0], VerdictKind.UNKNOWN),
])
def test_classify_tails(values, kind):
    assert classify(values).kind is kind


def test_classify_too_short():
    with pytest.raises(SequenceTooShort):
        classify([0, 1, 0])


@given(st.lists(st.integers(0, 1), min_size=4, max_size=40), st.integers(1, 30))
def test_classify_stable_under_period_extension(values, extra):
    v = classify_values(values)
    if v.kind is VerdictKind.CONVERGES:
        longer = values + [values[-1]] * extra
    elif v.kind is VerdictKind.PARADOX_UNDEFINED:
        longer = values + [values[-2 + (i % 2)] for i in range(extra)]
    else:
        return
    assert classify_values(longer).kind is v.kind
    assert classify_values(longer).value == v.value


@pytest.mark.parametrize("n_max", [4, 5, 17, 40, 64])
def test_puzzle_sweeps_are_paradoxical(puzzle, n_max):
    seq = sweep(puzzle, n_max, SKIP)
    assert classify(seq).kind is VerdictKind.PARADOX_UNDEFINED
    assert all(seq[n] == (1 if n % 2 == 0 else 0) for n in range(1, n_max + 1))
    dual = sweep(puzzle, n_max, PHANTOM)
    assert all(dual[n] == 1 - seq[n] for n in range(1, n_max + 1))


def test_run_zeno_examples(thompson):
    two = run_zeno(thompson, 2)
    assert (two.steps[1].time, two.steps[1].value) == (make_dyadic(1, 1), 1)
    three = run_zeno(thompson, 3)
    assert (three.steps[2].time, three.steps[2].value) == (make_dyadic(3, 2), 0)
    assert three.steps[0].time == ZERO and three.steps[0].value == 0
    assert three.limit_time == make_dyadic(1, 0)


def test_run_zeno_parity_induction(thompson):
    z = run_zeno(thompson, 30)
    for s in z.steps:
        assert s.value == s.k % 2
        assert s.time == make_dyadic(2 ** s.k - 1, s.k)


def test_run_zeno_rejects_cascade(puzzle):
    with pytest.raises(DialectError):
        run_zeno(puzzle, 3)


def test_classify_zeno(thompson, programs):
    assert classify_zeno(run_zeno(thompson, 20)).kind is VerdictKind.PARADOX_UNDEFINED
    assert str(classify_zeno(run_zeno(programs["steady"], 20))) == "Converges(1)"
    assert str(classify_zeno(run_zeno(programs["spin"], 20))) == "Converges(0)"


def test_zeno_idle_counts_operations():
    p = parse_source("PROGRAM w: a := 1; REPEAT IDLE 2; a := NOT a; UNTIL FALSE; END w;")
    assert run_zeno(p, 6).values == [1, 1, 1, 0, 0, 0, 1]


def test_freeness(puzzle, programs, thompson):
    rep = freeness(puzzle, 10)
    assert rep.bounded and rep.bound_witness == 1
    assert max(rep.per_cell_write_counts.values()) <= 1
    assert rep.per_cell_write_counts[(10, 10)] == 0
    rep2 = freeness(programs["twice"], 8)
    assert rep2.bounded and rep2.bound_witness == 2
    lamp = zeno_freeness(thompson, range(1, 15))
    assert not lamp.bounded
    assert all(lamp.per_cell_write_counts[(k, "a")] == k + 1 for k in range(1, 15))


def test_sweep_csv(puzzle):
    buf = io.StringIO()
    write_sweep_csv(sweep(puzzle, 5), buf)
    assert buf.getvalue().splitlines() == [
        "N,VALUE_1,verdict",
        "1,0,insufficient",
        "2,1,insufficient",
        "3,0,insufficient",
        "4,1,ParadoxUndefined",
        "5,0,ParadoxUndefined",
    ]
