from fractions import Fraction

import pytest

from uailab.adversary import (
    copy_conditional_trace,
    domination_probe,
    greedy_antipredict,
)
from uailab.core import UndefinedConditionalError
from uailab.mixture import EnvMixture, JointMixture
from uailab.semimeasure import (
    anticopy_machine,
    copy_machine,
    defective_uniform,
    leaky_copy,
    mu_id,
    uniform_env,
    uniform_measure,
)
from uailab.transforms import env, normalize

F = Fraction


def test_greedy_tiebreak_and_recorded_conditional():
    mix = JointMixture([copy_machine(), anticopy_machine()], [F(3, 4), F(1, 4)])
    trace = greedy_antipredict(mix, 1)
    step = trace.steps[0]
    # Both actions give copy-conditional 3/4: tie resolves to action 0.
    assert step.action == 0
    assert step.conditional == F(3, 4)


def test_greedy_cannot_hurt_the_pure_copier():
    trace = greedy_antipredict(copy_machine(), 6)
    assert all(s.conditional == 1 for s in trace.steps)
    assert trace.final_product == 1


def test_greedy_on_uniform_measure_is_memoryless():
    trace = greedy_antipredict(uniform_measure(), 8)
    assert all(s.conditional == F(1, 2) for s in trace.steps)
    assert trace.final_product == F(1, 2) ** 8


def test_greedy_truncates_on_dead_prefix():
    # The pure anticopy machine zeroes every copy continuation immediately.
    trace = greedy_antipredict(anticopy_machine(), 5)
    assert trace.truncated
    assert len(trace.steps) == 1
    assert trace.steps[0].conditional == 0


def test_telescoping_product_equals_env_view():
    mix = JointMixture(
        [copy_machine(), uniform_measure(), anticopy_machine()],
        [F(1, 4), F(1, 2), F(1, 4)],
    )
    trace = greedy_antipredict(mix, 8)
    view = env(mix)
    for step in trace.steps:
        played = trace.actions[: step.t]
        assert view.eval(played, played) == step.cumulative
    products = [s.cumulative for s in trace.steps]
    assert all(b <= a for a, b in zip(products, products[1:]))  # factors <= 1


def test_greedy_step_choice_attains_the_minimum():
    mix = JointMixture(
        [copy_machine(), uniform_measure(), anticopy_machine()],
        [F(1, 4), F(1, 2), F(1, 4)],
    )
    trace = greedy_antipredict(mix, 6)
    prefix = ()
    for step in trace.steps:
        conds = {}
        for a in (0, 1):
            pending = prefix + (a,)
            if mix.eval(pending) > 0:
                conds[a] = mix.eval(pending + (a,)) / mix.eval(pending)
        assert step.conditional == min(conds.values())
        best = min(a for a, c in conds.items() if c == step.conditional)
        assert step.action == best
        prefix = prefix + (step.action, step.action)


def test_normalized_uniform_trace_is_half_forever():
    hat = normalize(uniform_measure())
    trace = copy_conditional_trace(hat, (1, 0, 1, 1))
    assert [s.conditional for s in trace.steps] == [F(1, 2)] * 4


def test_normalized_copy_mixture_learns_the_copier():
    # Bayes walk by hand: odds double each step, conditionals
    # (2^t + 1) / (2^t + 2) strictly increasing toward 1.
    mix = JointMixture([copy_machine(), uniform_measure()], [F(1, 2), F(1, 2)])
    trace = copy_conditional_trace(normalize(mix), (1,) * 8)
    conds = [s.conditional for s in trace.steps]
    assert conds[:3] == [F(3, 4), F(5, 6), F(9, 10)]
    assert all(b > a for a, b in zip(conds, conds[1:]))
    assert conds[-1] == F(257, 258)


def test_unnormalized_defective_mixture_stays_below_one():
    # The best copier in class leaks a quarter of its mass per step, so the
    # raw conditionals are bounded by 3/4 at every step (proved exactly by
    # the mass identity lc_t = (3/8) lc_{t-1}).
    mix = JointMixture(
        [leaky_copy(F(3, 4)), defective_uniform(F(1, 4))], [F(1, 2), F(1, 2)]
    )
    trace = copy_conditional_trace(mix, (1,) * 8)
    conds = [s.conditional for s in trace.steps]
    assert conds[0] == F(7, 12)
    assert conds[1] == F(37, 52)
    assert all(c < F(3, 4) for c in conds)
    hat_trace = copy_conditional_trace(normalize(mix), (1,) * 8)
    assert all(s.conditional > F(3, 4) for s in hat_trace.steps)


def test_copy_trace_truncates_on_dead_prefix():
    trace = copy_conditional_trace(copy_machine(), (1, 0))
    full = copy_conditional_trace(anticopy_machine(), (1, 1))
    assert not trace.truncated and len(trace.steps) == 2
    assert full.truncated and full.steps[0].conditional == 0


def test_domination_inclusion_bound():
    mix = JointMixture([copy_machine(), uniform_measure()], [F(1, 4), F(3, 4)])
    report = domination_probe(copy_machine(), mix, 5)
    assert report.max_ratio is not None and report.max_ratio <= 4
    assert not report.unbounded_witnesses
    # Hand check of the witness it found: all-zero strings maximize the
    # copier's share, ratio (1/4) / (1/16 + 3/64) = 16/7.
    assert report.max_ratio == F(16, 7)
    assert report.witness == (0, 0, 0, 0)


def test_domination_unbounded_witness():
    report = domination_probe(uniform_measure(), copy_machine(), 2)
    assert report.unbounded_witnesses  # uniform mass where copy has none


def test_domination_probe_rejects_mixed_kinds():
    with pytest.raises(TypeError):
        domination_probe(uniform_measure(), mu_id(), 3)


def test_theorem8_shadow_identity_floor():
    # Any chronological mixture holding the identity env at weight w keeps
    # value >= w on every copy sequence: exhaustive to depth 5 plus traces.
    from itertools import product as iproduct

    w_id = F(1, 2)
    chron = EnvMixture([mu_id(), uniform_env()], [w_id, F(1, 2)])
    for t in range(6):
        for actions in iproduct((0, 1), repeat=t):
            assert chron.eval(actions, actions) >= w_id
    joint = JointMixture(
        [uniform_measure(), anticopy_machine()], [F(1, 2), F(1, 2)]
    )
    trace = greedy_antipredict(joint, 10)
    for step in trace.steps:
        played = trace.actions[: step.t]
        assert chron.eval(played, played) >= w_id
        assert chron.eval(played, played) / step.cumulative >= 1
