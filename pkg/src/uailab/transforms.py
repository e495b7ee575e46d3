"""Perspective maps between history distributions and environments.

``env`` turns a joint history distribution into an environment by stripping
its action conditionals: env(nu)(e_1:t || a_1:t) = prod_i nu(e_i | h_<i a_i).
It is computed lazily per query because well-definedness (positive
conditioning prefixes) is a per-prefix condition; undefined conditionals are
hard errors. ``dual`` goes the other way, combining an environment with a
policy into the history distribution they induce. ``chron_to_joint`` is the
semimeasure representation of an environment with a configurable action
filler (uniform by default). ``normalize`` rescales one-symbol conditionals
to sum to 1 (Solomonoff normalization).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .core import (
    ONE,
    ZERO,
    ComponentFormatError,
    NormalizationError,
    Prob,
    UndefinedConditionalError,
    frac_str,
)
from .semimeasure import ChronEnv, JointSemimeasure, Policy, StationaryPolicy


class EnvView(ChronEnv):
    """Lazy environment view of a joint semimeasure."""

    def __init__(self, base: JointSemimeasure):
        self.base = base
        self.action_arity = base.action_arity
        self.percept_arity = base.percept_arity
        self.declared_measure = False

    def eval(self, percepts: tuple[int, ...], actions: tuple[int, ...]) -> Prob:
        if len(percepts) != len(actions):
            raise ComponentFormatError("percept/action strings must have equal length")
        out = ONE
        prefix: tuple[int, ...] = ()
        for a, e in zip(actions, percepts):
            denom = self.base.eval(prefix + (a,))
            if denom == 0:
                raise UndefinedConditionalError(prefix + (a,), "env view")
            out *= self.base.eval(prefix + (a, e)) / denom
            prefix = prefix + (a, e)
        return out


def env(nu: JointSemimeasure) -> EnvView:
    """Environment view of a joint distribution (lazy; needs nu > 0 per query)."""
    return EnvView(nu)


class DualJoint(JointSemimeasure):
    """History distribution induced by an environment and a policy.

    Joint value on a complete prefix: pi(a_1:t || e_<t) * nu(e_1:t || a_1:t);
    on a pending action the policy factor includes the pending action. No
    positivity requirement: products of unconditional values, no division.
    """

    def __init__(self, nu: ChronEnv, pi: Policy):
        self.nu = nu
        self.pi = pi
        self.action_arity = nu.action_arity
        self.percept_arity = nu.percept_arity
        self.declared_measure = False

    def eval(self, x: tuple[int, ...]) -> Prob:
        actions = x[0::2]
        percepts = x[1::2]
        w = self.pi.weight(actions, percepts)
        if w == 0:
            return ZERO
        return w * self.nu.eval(percepts, actions[: len(percepts)])


def dual(nu: ChronEnv, pi: Policy) -> DualJoint:
    """Combine an environment and a policy into their history distribution."""
    return DualJoint(nu, pi)


def chron_to_joint(
    nu: ChronEnv, action_filler: Sequence[Fraction] | None = None
) -> DualJoint:
    """Semimeasure representation of an environment.

    Fills action positions with a history-independent distribution (uniform
    1/|A| by default, any element of the action simplex as config). The
    resulting joint semimeasure recovers nu under ``env`` wherever positivity
    holds; percepts in action positions are impossible by History typing.
    """
    if action_filler is None:
        filler = StationaryPolicy(
            tuple(Fraction(1, nu.action_arity) for _ in range(nu.action_arity))
        )
    else:
        filler = StationaryPolicy(tuple(action_filler))
    return DualJoint(nu, filler)


class NormalizedPredictor(JointSemimeasure):
    """Solomonoff normalization of a joint semimeasure.

    Conditionals are rescaled symbol-wise to sum to 1 at every context (both
    action and percept positions); environment-prediction experiments consume
    only the percept-position conditionals via ``env``. A context whose
    one-symbol continuations all have zero mass has no normalized
    conditional: hard error.
    """

    def __init__(self, base: JointSemimeasure):
        self.base = base
        self.action_arity = base.action_arity
        self.percept_arity = base.percept_arity
        self.declared_measure = True

    def conditional(self, x: tuple[int, ...], symbol: int) -> Prob:
        arity = self.arity_at(len(x))
        masses = [self.base.eval(x + (s,)) for s in range(arity)]
        total = sum(masses, ZERO)
        if total == 0:
            raise NormalizationError(x)
        return masses[symbol] / total

    def eval(self, x: tuple[int, ...]) -> Prob:
        out = ONE
        for i in range(len(x)):
            out *= self.conditional(x[:i], x[i])
            if out == 0:
                return ZERO
        return out


def normalize(nu: JointSemimeasure) -> NormalizedPredictor:
    """Per-symbol rescaling of conditionals to sum exactly to 1."""
    return NormalizedPredictor(nu)


@dataclass(frozen=True)
class MismatchRow:
    """A witness where two exactly-compared evaluations differ."""

    witness: tuple
    lhs: Fraction
    rhs: Fraction

    @property
    def verdict(self) -> str:
        return "equal" if self.lhs == self.rhs else "mismatch"


@dataclass(frozen=True)
class FactoringReport:
    """Exhaustive exact comparison backing the factoring identities.

    ``joint_rows``: mixture-of-duals vs dual-of-mixtures as joint values.
    ``env_rows``: env of the dual mixture vs the direct environment mixture
    on positive contexts (zero-mass contexts are skipped and counted).
    """

    depth: int
    joint_rows: tuple[MismatchRow, ...]
    env_rows: tuple[MismatchRow, ...]
    skipped_env_contexts: int

    @property
    def joint_mismatches(self) -> tuple[MismatchRow, ...]:
        return tuple(r for r in self.joint_rows if r.verdict == "mismatch")

    @property
    def env_mismatches(self) -> tuple[MismatchRow, ...]:
        return tuple(r for r in self.env_rows if r.verdict == "mismatch")

    @property
    def ok(self) -> bool:
        return not self.joint_mismatches and not self.env_mismatches


def factoring_check(
    envs: Sequence[ChronEnv],
    env_weights: Sequence[Fraction],
    policies: Sequence[Policy],
    policy_weights: Sequence[Fraction],
    depth: int,
    pair_weights: dict[tuple[int, int], Fraction] | None = None,
) -> FactoringReport:
    """Verify the product-prior factoring identities exhaustively to ``depth``.

    (i) the pairwise dual mixture equals dual(mixture policy, mixture env)
    as joint values on every interleaved string; (ii) the environment view
    of the dual mixture equals the direct environment mixture on positive
    contexts. Both hold exactly for factored pair weights w[nu,pi] =
    policy_w * env_w; a deliberately non-factored grid produces witnesses.
    """
    from .mixture import EnvMixture, dual_mixture
    from .semimeasure import MixturePolicy

    pair_mix = dual_mixture(envs, env_weights, policies, policy_weights, pair_weights)
    factored = dual(
        EnvMixture(envs, env_weights), MixturePolicy(tuple(policies), tuple(policy_weights))
    )
    joint_rows: list[MismatchRow] = []
    strings: list[tuple[int, ...]] = [()]
    frontier: list[tuple[int, ...]] = [()]
    for pos in range(depth):
        arity = pair_mix.arity_at(pos)
        frontier = [s + (sym,) for s in frontier for sym in range(arity)]
        strings.extend(frontier)
    for x in strings:
        joint_rows.append(MismatchRow(x, pair_mix.eval(x), factored.eval(x)))

    direct = EnvMixture(envs, env_weights)
    env_of_dual = env(pair_mix)
    env_rows: list[MismatchRow] = []
    skipped = 0
    t_max = depth // 2
    for t in range(t_max + 1):
        for actions in product(range(direct.action_arity), repeat=t):
            for percepts in product(range(direct.percept_arity), repeat=t):
                try:
                    lhs = env_of_dual.eval(percepts, actions)
                except UndefinedConditionalError:
                    skipped += 1
                    continue
                env_rows.append(
                    MismatchRow((percepts, actions), lhs, direct.eval(percepts, actions))
                )
    return FactoringReport(
        depth=depth,
        joint_rows=tuple(joint_rows),
        env_rows=tuple(env_rows),
        skipped_env_contexts=skipped,
    )


def check_env_dual_roundtrip(
    nu: ChronEnv, pi: Policy, depth: int
) -> tuple[list[MismatchRow], int]:
    """env(dual(nu, pi)) == nu on every positive context, exhaustively.

    Returns (mismatch rows, contexts skipped for zero mass).
    """
    joint = dual(nu, pi)
    view = env(joint)
    mismatches: list[MismatchRow] = []
    skipped = 0
    for t in range(depth + 1):
        for actions in product(range(nu.action_arity), repeat=t):
            for percepts in product(range(nu.percept_arity), repeat=t):
                try:
                    lhs = view.eval(percepts, actions)
                except UndefinedConditionalError:
                    skipped += 1
                    continue
                rhs = nu.eval(percepts, actions)
                if lhs != rhs:
                    mismatches.append(MismatchRow((percepts, actions), lhs, rhs))
    return mismatches, skipped


def check_representation_roundtrip(
    nu: ChronEnv, action_filler: Sequence[Fraction] | None, depth: int
) -> tuple[list[MismatchRow], int]:
    """env(chron_to_joint(nu, filler)) == nu on positive contexts."""
    joint = chron_to_joint(nu, action_filler)
    view = env(joint)
    mismatches: list[MismatchRow] = []
    skipped = 0
    for t in range(depth + 1):
        for actions in product(range(nu.action_arity), repeat=t):
            for percepts in product(range(nu.percept_arity), repeat=t):
                try:
                    lhs = view.eval(percepts, actions)
                except UndefinedConditionalError:
                    skipped += 1
                    continue
                rhs = nu.eval(percepts, actions)
                if lhs != rhs:
                    mismatches.append(MismatchRow((percepts, actions), lhs, rhs))
    return mismatches, skipped


def check_normalization_dominance(
    nu: JointSemimeasure, depth: int
) -> tuple[list[MismatchRow], int]:
    """Normalized conditionals never fall below the raw ones, pointwise.

    The normalizing denominator of a semimeasure is at most 1, so wherever
    both sides are defined the normalized conditional must be >= the raw
    conditional. Returns (violation rows carrying (raw, normalized), count
    of contexts skipped because either side was undefined).
    """
    hat = normalize(nu)
    violations: list[MismatchRow] = []
    skipped = 0
    strings: list[tuple[int, ...]] = [()]
    frontier: list[tuple[int, ...]] = [()]
    for pos in range(depth):
        arity = nu.arity_at(pos)
        frontier = [s + (sym,) for s in frontier for sym in range(arity)]
        strings.extend(frontier)
    for x in strings:
        raw_prefix = nu.eval(x)
        if raw_prefix == 0:
            skipped += 1
            continue
        for s in range(nu.arity_at(len(x))):
            raw = nu.eval(x + (s,)) / raw_prefix
            try:
                hatted = hat.conditional(x, s)
            except NormalizationError:
                skipped += 1
                continue
            if hatted < raw:
                violations.append(MismatchRow((x, s), raw, hatted))
    return violations, skipped


@dataclass(frozen=True)
class RatioProbeReport:
    """Max exact ratio of env-of-mixture over mixture-of-envs, with witness.

    Records evidence only (no pass/fail): whether the environment-side
    mixture dominates the environment view of the joint mixture with a
    scenario-computable constant is recorded, not asserted.
    """

    depth: int
    max_ratio: Fraction | None
    witness: tuple | None
    rows: tuple[MismatchRow, ...]
    skipped_contexts: int


def env_view_ratio_probe(
    envs: Sequence[ChronEnv],
    env_weights: Sequence[Fraction],
    policies: Sequence[Policy],
    policy_weights: Sequence[Fraction],
    depth: int,
    pair_weights: dict[tuple[int, int], Fraction] | None = None,
) -> RatioProbeReport:
    """Compare env(joint mixture) against the direct environment mixture.

    lhs = env(sum_pairs w dual(nu, pi)), rhs = sum_nu w_nu nu. Contexts where
    either side is undefined or rhs is 0 are skipped and counted.
    """
    from .mixture import EnvMixture, dual_mixture

    pair_mix = dual_mixture(envs, env_weights, policies, policy_weights, pair_weights)
    env_of_mix = env(pair_mix)
    direct = EnvMixture(envs, env_weights)
    rows: list[MismatchRow] = []
    skipped = 0
    best: Fraction | None = None
    witness: tuple | None = None
    for t in range(depth + 1):
        for actions in product(range(direct.action_arity), repeat=t):
            for percepts in product(range(direct.percept_arity), repeat=t):
                try:
                    lhs = env_of_mix.eval(percepts, actions)
                except UndefinedConditionalError:
                    skipped += 1
                    continue
                rhs = direct.eval(percepts, actions)
                if rhs == 0:
                    skipped += 1
                    continue
                rows.append(MismatchRow((percepts, actions), lhs, rhs))
                ratio = lhs / rhs
                if best is None or ratio > best:
                    best, witness = ratio, (percepts, actions)
    return RatioProbeReport(
        depth=depth, max_ratio=best, witness=witness, rows=tuple(rows), skipped_contexts=skipped
    )
