"""Finite Bayesian mixtures over joint or chronological components.

A mixture is a weighted component list with all weights positive and summing
to at most 1 (deficient priors allowed; shipped scenarios use weights as
given). Mixtures of joint components are joint semimeasures; mixtures of
environments are chronological environments. Predictive conditionals and
history-conditional posterior weights are exact; the reference posterior is
recomputed from scratch per query, with an optional incremental tracker that
must match it exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import (
    ONE,
    ZERO,
    ComponentFormatError,
    History,
    Prob,
    UndefinedConditionalError,
)
from .semimeasure import ChronEnv, JointSemimeasure, Policy


def uniform_prior(n: int) -> tuple[Fraction, ...]:
    """Default prior over a scenario's component list."""
    return tuple(Fraction(1, n) for _ in range(n))


def harmonic_prior(n: int) -> tuple[Fraction, ...]:
    """w_i = 1/(i(i+1)) for enumeration-ordered components; sums to n/(n+1)."""
    return tuple(Fraction(1, i * (i + 1)) for i in range(1, n + 1))


def _validate_weights(components: Sequence, weights: Sequence[Fraction]) -> None:
    if len(components) != len(weights):
        raise ComponentFormatError("component/weight length mismatch")
    if not components:
        raise ComponentFormatError("mixture needs at least one component")
    if any(w <= 0 for w in weights):
        raise ComponentFormatError("mixture weights must be > 0")
    if sum(weights) > 1:
        raise ComponentFormatError("mixture weights must sum to <= 1")


class JointMixture(JointSemimeasure):
    """xi(x) = sum_i w_i nu_i(x), itself a joint semimeasure."""

    def __init__(
        self,
        components: Sequence[JointSemimeasure],
        weights: Sequence[Fraction],
        names: Sequence[str] | None = None,
    ):
        _validate_weights(components, weights)
        self.components = tuple(components)
        self.weights = tuple(weights)
        self.names = tuple(names) if names else tuple(
            f"component_{i}" for i in range(len(self.components))
        )
        self.action_arity = self.components[0].action_arity
        self.percept_arity = self.components[0].percept_arity
        self.declared_measure = all(c.declared_measure for c in self.components) and (
            sum(self.weights) == 1
        )

    def eval(self, x: tuple[int, ...]) -> Prob:
        return sum((w * c.eval(x) for c, w in zip(self.components, self.weights)), ZERO)

    def eval_at_budget(self, x: tuple[int, ...], budget: int) -> Prob:
        return sum(
            (w * c.eval_at_budget(x, budget) for c, w in zip(self.components, self.weights)),
            ZERO,
        )


class EnvMixture(ChronEnv):
    """Mixture of environments: (e, a) -> sum_i w_i nu_i(e || a)."""

    def __init__(
        self,
        components: Sequence[ChronEnv],
        weights: Sequence[Fraction],
        names: Sequence[str] | None = None,
    ):
        _validate_weights(components, weights)
        self.components = tuple(components)
        self.weights = tuple(weights)
        self.names = tuple(names) if names else tuple(
            f"env_{i}" for i in range(len(self.components))
        )
        self.action_arity = self.components[0].action_arity
        self.percept_arity = self.components[0].percept_arity
        self.declared_measure = all(c.declared_measure for c in self.components) and (
            sum(self.weights) == 1
        )

    def eval(self, percepts: tuple[int, ...], actions: tuple[int, ...]) -> Prob:
        return sum(
            (w * c.eval(percepts, actions) for c, w in zip(self.components, self.weights)),
            ZERO,
        )


def joint_eval(mixture: JointMixture, x: tuple[int, ...]) -> Prob:
    """Exact mixture mass of an interleaved string."""
    return mixture.eval(x)


def env_mixture(
    envs: Sequence[ChronEnv],
    weights: Sequence[Fraction],
    names: Sequence[str] | None = None,
) -> EnvMixture:
    """Mix environments directly (the environment-side universal mixture analog)."""
    return EnvMixture(envs, weights, names)


def dual_mixture(
    envs: Sequence[ChronEnv],
    env_weights: Sequence[Fraction],
    policies: Sequence[Policy],
    policy_weights: Sequence[Fraction],
    pair_weights: dict[tuple[int, int], Fraction] | None = None,
) -> JointMixture:
    """Mixture over dual(env, policy) for all pairs.

    With the default factored prior, the pair (nu_j, pi_k) gets weight
    policy_weights[k] * env_weights[j] (agent and environment independent).
    An explicit non-factored ``pair_weights`` grid (keyed by (env index,
    policy index), missing entries meaning zero) is accepted for
    counterexample construction.
    """
    from .transforms import dual

    _validate_weights(envs, env_weights)
    _validate_weights(policies, policy_weights)
    components: list[JointSemimeasure] = []
    weights: list[Fraction] = []
    names: list[str] = []
    for j, nu in enumerate(envs):
        for k, pi in enumerate(policies):
            if pair_weights is None:
                w = policy_weights[k] * env_weights[j]
            else:
                w = pair_weights.get((j, k), ZERO)
                if w == 0:
                    continue
            components.append(dual(nu, pi))
            weights.append(w)
            names.append(f"dual_env{j}_policy{k}")
    return JointMixture(components, weights, names)


@dataclass(frozen=True)
class PosteriorState:
    """Exact posterior weights after a history plus a pending action.

    posterior[i] = w_i nu_i(prefix) / xi(prefix); components with zero mass
    on the prefix get posterior exactly 0. By construction
    sum_i posterior[i] * xi(prefix) = sum_i w_i nu_i(prefix), exactly.
    """

    prefix: tuple[int, ...]
    prior: tuple[Fraction, ...]
    component_masses: tuple[Fraction, ...]
    mixture_mass: Fraction
    posterior: tuple[Fraction, ...]


def _pending_prefix(h: History, action: int) -> tuple[int, ...]:
    return h.with_action(action).symbols()


def posterior_weights(mixture: JointMixture, h: History, action: int) -> PosteriorState:
    """History-conditional component weights under the mixture.

    Errors on a zero-probability prefix: the posterior is undefined there.
    """
    prefix = _pending_prefix(h, action)
    masses = tuple(c.eval(prefix) for c in mixture.components)
    total = sum((w * m for w, m in zip(mixture.weights, masses)), ZERO)
    if total == 0:
        raise UndefinedConditionalError(prefix, "posterior weights")
    post = tuple(w * m / total for w, m in zip(mixture.weights, masses))
    return PosteriorState(
        prefix=prefix,
        prior=mixture.weights,
        component_masses=masses,
        mixture_mass=total,
        posterior=post,
    )


def predictive(mixture: JointMixture, h: History, action: int) -> dict[int, Fraction]:
    """Next-percept distribution e -> xi(prefix + e) / xi(prefix).

    Equals the posterior-weighted component conditionals (checked exactly by
    the test suite over all histories to depth 4).
    """
    prefix = _pending_prefix(h, action)
    denom = mixture.eval(prefix)
    if denom == 0:
        raise UndefinedConditionalError(prefix, "predictive distribution")
    return {
        e: mixture.eval(prefix + (e,)) / denom for e in range(mixture.percept_arity)
    }


def check_predictive_consistency(
    mixture: JointMixture, depth: int
) -> list[tuple[tuple, Fraction, Fraction]]:
    """Mismatches between the two faces of the predictive conditional.

    For every complete history to ``depth``, action, and percept with a
    positive pending prefix: the mixture conditional xi(e | prefix) must
    equal the posterior-weighted component conditionals (components with
    zero posterior contribute nothing). Returns mismatch triples
    (witness, lhs, rhs); empty means exact agreement everywhere.
    """
    from itertools import product as iproduct

    mismatches: list[tuple[tuple, Fraction, Fraction]] = []
    for t in range(depth + 1):
        for actions in iproduct(range(mixture.action_arity), repeat=t):
            for percepts in iproduct(range(mixture.percept_arity), repeat=t):
                h = History(actions, percepts)
                for a in range(mixture.action_arity):
                    prefix = h.with_action(a).symbols()
                    if mixture.eval(prefix) == 0:
                        continue
                    state = posterior_weights(mixture, h, a)
                    lhs_map = predictive(mixture, h, a)
                    for e in range(mixture.percept_arity):
                        rhs = ZERO
                        for i, c in enumerate(mixture.components):
                            if state.posterior[i] == 0:
                                continue
                            rhs += state.posterior[i] * (
                                c.eval(prefix + (e,)) / state.component_masses[i]
                            )
                        if lhs_map[e] != rhs:
                            mismatches.append(((prefix, e), lhs_map[e], rhs))
    return mismatches


class PosteriorTracker:
    """Incremental posterior along a growing history.

    Optimization companion to :func:`posterior_weights`; must match the
    from-scratch computation exactly (enforced by tests).
    """

    def __init__(self, mixture: JointMixture):
        self.mixture = mixture
        self.prefix: tuple[int, ...] = ()
        # Running unconditional component masses nu_i(prefix).
        self.masses = [c.eval(()) for c in mixture.components]

    def extend(self, symbol: int) -> None:
        new_prefix = self.prefix + (symbol,)
        for i, c in enumerate(self.mixture.components):
            if self.masses[i] != 0:
                self.masses[i] = c.eval(new_prefix)
        self.prefix = new_prefix

    def state(self) -> PosteriorState:
        masses = tuple(self.masses)
        total = sum(
            (w * m for w, m in zip(self.mixture.weights, masses)), ZERO
        )
        if total == 0:
            raise UndefinedConditionalError(self.prefix, "posterior weights")
        post = tuple(w * m / total for w, m in zip(self.mixture.weights, masses))
        return PosteriorState(
            prefix=self.prefix,
            prior=self.mixture.weights,
            component_masses=masses,
            mixture_mass=total,
            posterior=post,
        )
