from fractions import Fraction
from itertools import product

import pytest

from uailab.core import ComponentFormatError
from uailab.semimeasure import (
    ActionEchoJoint,
    ChronEnv,
    JointSemimeasure,
    MixturePolicy,
    NoisyCopyEnv,
    TableEnv,
    TableJoint,
    anticopy_machine,
    check_chronological,
    check_policy,
    check_semimeasure,
    complement_env,
    constant_policy,
    copy_machine,
    defective_uniform,
    leaky_copy,
    mu_id,
    table_component,
    uniform_env,
    uniform_measure,
    uniform_policy,
)

F = Fraction


class RawJoint(JointSemimeasure):
    """Arbitrary eval table for exercising the checker on bad inputs."""

    def __init__(self, table):
        self.table = table

    def eval(self, x):
        return self.table.get(tuple(x), F(0))


class RawEnv(ChronEnv):
    def __init__(self, table):
        self.table = table

    def eval(self, percepts, actions):
        return self.table.get((tuple(percepts), tuple(actions)), F(0))


def test_uniform_measure_checks_with_equality():
    report = check_semimeasure(uniform_measure(), 4)
    assert report.ok
    assert report.strict_rows == 0
    assert report.equal_rows == len(report.rows)
    assert report.declaration_verified is True


def test_defective_component_strict_everywhere():
    # nu(x) = 2^-2l(x): each side evaluated independently below.
    nu = defective_uniform(F(1, 4))
    report = check_semimeasure(nu, 4)
    assert report.ok
    assert report.strict_rows == len(report.rows)
    for x in [(), (0,), (1, 1), (0, 1, 0)]:
        lhs = F(1, 4) ** len(x)
        rhs = sum(F(1, 4) ** (len(x) + 1) for _ in range(2))
        assert nu.eval(x) == lhs and lhs > rhs


def test_checker_reports_violation_at_root():
    bad = RawJoint({(): F(1), (0,): F(7, 10), (1,): F(2, 5)})
    report = check_semimeasure(bad, 1)
    assert not report.ok
    assert report.violations[0].context == ()
    assert report.violations[0].rhs == F(11, 10)


def test_mu_id_chronological_equality_depth_4():
    report = check_chronological(mu_id(), 4)
    assert report.ok
    assert report.strict_rows == 0
    assert report.declaration_verified is True


def test_mu_id_copies_the_action_everywhere():
    env = mu_id()
    assert env.eval((1,), (1,)) == 1
    assert env.eval((1,), (0,)) == 0
    # No history dependence: the same conditional after any prefix.
    for prefix_a, prefix_e in [((0,), (0,)), ((1, 0), (1, 0))]:
        assert env.eval(prefix_e + (1,), prefix_a + (1,)) == env.eval(prefix_e, prefix_a)


def test_chronological_checker_flags_oversum():
    bad = RawEnv(
        {
            ((), ()): F(1),
            ((0,), (0,)): F(3, 5),
            ((1,), (0,)): F(3, 5),
        }
    )
    report = check_chronological(bad, 1)
    assert not report.ok
    assert any(r.context == ((), (), 0) and r.rhs == F(6, 5) for r in report.violations)


def test_copy_machine_values():
    nu = copy_machine()
    assert nu.eval((1, 1)) == F(1, 2)
    assert nu.eval((1, 0)) == 0
    assert nu.eval((1,)) == F(1, 2)
    assert nu.eval((1, 1, 0, 0)) == F(1, 4)


def test_copy_machine_mass_one_per_consistent_length_class():
    nu = copy_machine()
    for n in range(1, 4):
        total = F(0)
        for odd in product((0, 1), repeat=n):
            x = []
            for sym in odd:
                x.extend((sym, sym))
            total += nu.eval(tuple(x))
        assert total == 1


def test_env_of_positive_joint_passes_chronological():
    from uailab.transforms import env

    report = check_chronological(env(uniform_measure()), 3)
    assert report.ok


def test_markov_table_passes_depth_5():
    rows = {(): (F(1, 2), F(1, 2))}
    for length in range(1, 6):
        for ctx in product((0, 1), repeat=length):
            rows[ctx] = tuple(
                F(3, 4) if s == ctx[-1] else F(1, 4) for s in (0, 1)
            )
    nu = TableJoint(rows, default="uniform", declared_measure=True)
    report = check_semimeasure(nu, 5)
    assert report.ok
    assert report.declaration_verified is True


def test_empty_table_uniform_default_is_uniform_measure():
    nu = TableJoint({}, default="uniform")
    uni = uniform_measure()
    for length in range(4):
        for x in product((0, 1), repeat=length):
            assert nu.eval(x) == uni.eval(x)


def test_table_rejects_oversum_naming_context():
    with pytest.raises(ComponentFormatError) as err:
        TableJoint({(0,): (F(3, 5), F(1, 2))})
    assert "(0,)" in str(err.value)


def test_halt_default_makes_defect_explicit():
    nu = TableJoint({(): (F(1, 2), F(1, 2))}, default="halt")
    assert nu.eval((0,)) == F(1, 2)
    assert nu.eval((0, 1)) == 0
    assert check_semimeasure(nu, 3).ok


def test_table_component_loader_joint_and_env():
    joint = table_component(
        {
            "kind": "joint_table",
            "alphabet": {"actions": 2, "percepts": 2},
            "conditionals": {"": ["1/2", "1/2"], "0": ["3/4", "1/4"]},
            "default_rule": "uniform",
            "declared_measure": True,
        }
    )
    assert joint.eval((0, 0)) == F(3, 8)
    env_c = table_component(
        {
            "kind": "env_table",
            "alphabet": {"actions": 2, "percepts": 2},
            "conditionals": {"|1": ["0", "1"]},
            "default_rule": "halt",
        }
    )
    assert env_c.eval((1,), (1,)) == 1
    assert env_c.eval((0,), (1,)) == 0
    with pytest.raises(ComponentFormatError):
        table_component({"kind": "mystery"})


def test_builtin_declarations_verified_to_depth_6():
    from uailab.experiments import builtin_components

    for name, component in builtin_components().items():
        if isinstance(component, JointSemimeasure):
            report = check_semimeasure(component, 6)
        else:
            report = check_chronological(component, 6)
        assert report.ok, name
        assert report.declaration_verified is True, name
        assert report.root_mass <= 1


def test_monotonicity_checked_independently():
    bad = RawJoint({(): F(1, 4), (0,): F(1, 2)})
    report = check_semimeasure(bad, 0)
    assert (0,) in report.monotone_violations


def test_policies_satisfy_swapped_chronological_condition():
    for pi in (
        uniform_policy(),
        constant_policy(1),
        MixturePolicy((uniform_policy(), constant_policy(0)), (F(1, 2), F(1, 2))),
    ):
        report = check_policy(pi, 3)
        assert report.ok, pi


def test_eval_at_budget_is_limit_for_tables():
    nu = leaky_copy()
    for x in [(1,), (1, 1), (0, 0, 1, 1)]:
        for budget in (0, 1, 5):
            assert nu.eval_at_budget(x, budget) == nu.eval(x)


def test_echo_like_components_match_and_mismatch():
    assert anticopy_machine().eval((1, 0)) == F(1, 2)
    assert anticopy_machine().eval((1, 1)) == 0
    noisy = ActionEchoJoint(F(3, 4), F(1, 4))
    assert noisy.eval((1, 1)) == F(3, 8)
    assert noisy.eval((1, 0)) == F(1, 8)
    assert complement_env().eval((0, 1), (1, 0)) == 1
    assert NoisyCopyEnv(F(3, 4), F(1, 4)).eval((1,), (1,)) == F(3, 4)


def test_table_env_context_shape_enforced():
    with pytest.raises(ComponentFormatError):
        TableEnv({((0,), (0,)): (F(1, 2), F(1, 2))})  # needs one more action
