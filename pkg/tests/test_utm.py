import json
from fractions import Fraction
from itertools import product

import pytest

from uailab.core import ComponentFormatError
from uailab.semimeasure import check_chronological, check_semimeasure
from uailab.utm import (
    MACHINE_DEFINITION,
    MACHINE_HASH,
    PROGRAM_COMPLEMENT,
    PROGRAM_CONST0,
    PROGRAM_ECHO,
    ChronEnumApprox,
    clear_memo,
    enumerate_chron,
    enumerate_joint,
    run_program,
)

F = Fraction


def bits_upto(n):
    for length in range(n + 1):
        for bits in product("01", repeat=length):
            yield "".join(bits)


def test_const0_outputs_zeros_within_budget():
    result = run_program(PROGRAM_CONST0, max_steps=100)
    assert result.output == (0,) * 50  # one output per two steps
    assert result.status == "step_limit"
    assert result.consumed_bits == 6


def test_empty_program_consumes_nothing():
    result = run_program("", max_steps=100)
    assert result.output == ()
    assert result.consumed_bits == 0
    assert result.status == "program_exhausted"


def test_echo_reads_actions_chronologically():
    result = run_program(PROGRAM_ECHO, actions=(1, 0), max_steps=50)
    assert result.output == (1, 0)
    assert result.actions_read == 2
    assert result.status == "awaiting_input"
    assert result.consumed_bits == 9


def test_complement_program():
    result = run_program(PROGRAM_COMPLEMENT, actions=(1, 0, 1), max_steps=50)
    assert result.output == (0, 1, 0)
    assert result.consumed_bits == 12


def test_read_discipline_blocks_peeking():
    # READA READA: the second read would run one action ahead of the output.
    program = "011011"
    result = run_program(program, actions=(1, 0), max_steps=50)
    assert result.actions_read == 1
    assert result.status == "awaiting_input"


def test_monotone_output_exhaustive_small_programs():
    budgets = (5, 20, 80, 200)
    for program in bits_upto(8):
        previous = None
        for steps in budgets:
            result = run_program(program, max_steps=steps)
            if previous is not None:
                assert result.output[: len(previous.output)] == previous.output
                assert result.consumed_bits >= previous.consumed_bits
            previous = result


def test_determinism_same_run_twice():
    for program in (PROGRAM_CONST0, PROGRAM_ECHO, "101110001"):
        a = run_program(program, actions=(1, 1), max_steps=77)
        b = run_program(program, actions=(1, 1), max_steps=77)
        assert a == b


def test_zero_length_budget_has_no_programs():
    approx = enumerate_joint(0, 200, max_len=6)
    assert approx.eval(()) == 0
    assert approx.eval((0,)) == 0


def test_root_mass_at_most_one_for_all_budgets():
    for bits in range(0, 11):
        approx = enumerate_joint(bits, 200, max_len=6)
        assert approx.eval(()) <= 1


def test_budget_monotone_in_length_exhaustive():
    tables = {}
    for bits in range(0, 11):
        tables[bits] = enumerate_joint(bits, 200, max_len=8).table
    for bits in range(0, 10):
        lo, hi = tables[bits], tables[bits + 1]
        for key in set(lo) | set(hi):
            assert lo.get(key, F(0)) <= hi.get(key, F(0)), (bits, key)


def test_budget_monotone_in_steps():
    grids = [enumerate_joint(9, s, max_len=8).table for s in (0, 5, 25, 100, 200)]
    for lo, hi in zip(grids, grids[1:]):
        for key in set(lo) | set(hi):
            assert lo.get(key, F(0)) <= hi.get(key, F(0)), key


def test_enum_approx_is_semimeasure_at_every_budget():
    for bits, steps in ((3, 60), (6, 60), (9, 200), (10, 200)):
        approx = enumerate_joint(bits, steps, max_len=6)
        assert check_semimeasure(approx, 5).ok, (bits, steps)


def test_chron_enum_passes_chronological_check():
    for bits, steps in ((3, 60), (6, 200), (9, 200)):
        approx = ChronEnumApprox(bits, steps)
        assert check_chronological(approx, 5).ok, (bits, steps)


def test_chron_monotone_budgets_per_tape():
    tape = (1, 0, 1)
    masses = []
    for bits in (3, 6, 9, 12):
        approx = enumerate_chron(bits, 200, tape)
        masses.append(approx.eval(tape, tape))
    assert all(a <= b for a, b in zip(masses, masses[1:]))
    small = enumerate_chron(9, 40, tape)
    large = enumerate_chron(9, 200, tape)
    assert small.eval(tape, tape) <= large.eval(tape, tape)


def test_echo_lower_bounds_the_chron_mixture():
    # The echo program consumes 9 bits, so the copy sequence keeps mass
    # >= 2^-9 at every prefix once the budgets cover it.
    approx = enumerate_chron(9, 200, (1, 0, 1, 1))
    for t in range(1, 5):
        tape = (1, 0, 1, 1)[:t]
        assert approx.eval(tape, tape) >= F(1, 512)


def test_complement_lower_bounds_the_chron_mixture():
    approx = enumerate_chron(12, 200, (1, 0, 1))
    for t in range(1, 4):
        tape = (1, 0, 1)[:t]
        flipped = tuple(1 - a for a in tape)
        assert approx.eval(flipped, tape) >= F(1, 4096)


def test_const0_lower_bounds_the_joint_mixture():
    approx = enumerate_joint(6, 200, max_len=8)
    for length in range(9):
        assert approx.eval((0,) * length) >= F(1, 64)


def test_eval_at_budget_monotone_with_limit():
    approx = enumerate_joint(6, 50, max_len=6)
    for x in [(), (0,), (0, 0), (1, 1)]:
        values = [approx.eval_at_budget(x, k) for k in (0, 3, 6, 20, 50, 100)]
        assert all(a <= b for a, b in zip(values, values[1:]))
        assert values[-1] == approx.eval(x)


def test_eval_beyond_recorded_depth_raises():
    approx = enumerate_joint(6, 50, max_len=4)
    with pytest.raises(ComponentFormatError):
        approx.eval((0,) * 5)


def test_machine_definition_frozen():
    # The documented encoding is load-bearing: the worked programs and every
    # committed artifact assume exactly this machine.
    assert "000 OUT0; 001 OUT1; 010 OUTR; 011 READA" in MACHINE_DEFINITION
    assert len(MACHINE_HASH) == 64
    assert (len(PROGRAM_CONST0), len(PROGRAM_ECHO), len(PROGRAM_COMPLEMENT)) == (6, 9, 12)


def test_disk_cache_roundtrip(cache_dir):
    clear_memo()
    first = enumerate_joint(6, 60, max_len=6)
    files = list(cache_dir.glob("*joint_L6_S60*.json"))
    assert len(files) == 1
    payload = json.loads(files[0].read_text())
    assert payload["machine"] == MACHINE_HASH
    clear_memo()
    second = enumerate_joint(6, 60, max_len=6)
    assert first.table == second.table
    # A stale or foreign cache entry is ignored, not trusted.
    files[0].write_text(json.dumps({**payload, "machine": "0" * 64}))
    clear_memo()
    third = enumerate_joint(6, 60, max_len=6)
    assert third.table == first.table
    clear_memo()


def test_bad_program_strings_rejected():
    with pytest.raises(ComponentFormatError):
        run_program("01a")
    with pytest.raises(ComponentFormatError):
        run_program([0, 2])
