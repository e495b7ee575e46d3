"""Adversarial action sequences against joint predictors, and domination probes.

The adversary plays against a predictor while the true environment is the
identity (the percept repeats the action). At each step it picks the action
whose copy-conditional — the predictor's probability that the percept will
equal the action — is smallest, then the percept copies it. The recorded
cumulative product equals the predictor's environment-view value of the
played (a, a) pair, exactly (telescoping). The greedy finite construction is
deliberately myopic: the asymptotic diagonal constructions are incomputable,
and the greedy analog's drop thresholds are computed by oracle runs, never
assumed.

Domination probes report the exact max ratio mu/xi over all strings to a
depth, with witnesses; ratios against zero are reported as unbounded
witnesses, never silently skipped.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .core import ONE, ZERO, Prob, UndefinedConditionalError
from .semimeasure import ChronEnv, JointSemimeasure


@dataclass(frozen=True)
class AdversaryStep:
    """One adversary move: the chosen action and its copy-conditional."""

    t: int
    action: int
    conditional: Fraction
    cumulative: Fraction


@dataclass(frozen=True)
class AdversaryTrace:
    """Adversarial action sequence with per-step conditionals and products.

    ``truncated`` flags traces stopped early by a zero-mass prefix. The
    cumulative column is exactly the telescoping product of the recorded
    conditionals and is non-increasing in t.
    """

    steps: tuple[AdversaryStep, ...]
    truncated: bool

    @property
    def actions(self) -> tuple[int, ...]:
        return tuple(s.action for s in self.steps)

    @property
    def final_product(self) -> Fraction:
        return self.steps[-1].cumulative if self.steps else ONE


def _copy_conditional(xi: JointSemimeasure, prefix: tuple[int, ...], action: int) -> Fraction:
    """xi(percept == action | prefix, action); error on zero pending prefix."""
    pending = prefix + (action,)
    denom = xi.eval(pending)
    if denom == 0:
        raise UndefinedConditionalError(pending, "copy conditional")
    return xi.eval(pending + (action,)) / denom


def greedy_antipredict(xi: JointSemimeasure, steps: int) -> AdversaryTrace:
    """Greedily minimize the predictor's copy-conditional for ``steps`` moves.

    At each step every action with a positive pending-prefix mass is a
    candidate; the smallest conditional wins, ties to the smallest action.
    When no candidate remains (zero-mass prefix in every direction) the
    trace is truncated and flagged.
    """
    trace: list[AdversaryStep] = []
    prefix: tuple[int, ...] = ()
    cumulative = ONE
    for t in range(1, steps + 1):
        candidates: list[tuple[Fraction, int]] = []
        for a in range(xi.action_arity):
            try:
                candidates.append((_copy_conditional(xi, prefix, a), a))
            except UndefinedConditionalError:
                continue
        if not candidates:
            return AdversaryTrace(tuple(trace), truncated=True)
        conditional, action = min(candidates)  # ties: smallest action
        cumulative *= conditional
        trace.append(AdversaryStep(t, action, conditional, cumulative))
        prefix = prefix + (action, action)  # the true environment copies
        if cumulative == 0:
            return AdversaryTrace(tuple(trace), truncated=True)
    return AdversaryTrace(tuple(trace), truncated=False)


def copy_conditional_trace(
    xi: JointSemimeasure, actions: Sequence[int]
) -> AdversaryTrace:
    """Copy-conditionals of a predictor along a supplied action sequence.

    The percepts copy the actions (identity environment); the recorded
    conditionals are the predictor's per-step probabilities of that copy,
    i.e. its predictions at the percept positions. Accepts normalized
    predictors as well. Truncates with a flag on a zero-mass prefix.
    """
    trace: list[AdversaryStep] = []
    prefix: tuple[int, ...] = ()
    cumulative = ONE
    for t, a in enumerate(tuple(actions), start=1):
        try:
            conditional = _copy_conditional(xi, prefix, a)
        except (UndefinedConditionalError, ZeroDivisionError):
            return AdversaryTrace(tuple(trace), truncated=True)
        cumulative *= conditional
        trace.append(AdversaryStep(t, a, conditional, cumulative))
        prefix = prefix + (a, a)
        if cumulative == 0:
            return AdversaryTrace(tuple(trace), truncated=True)
    return AdversaryTrace(tuple(trace), truncated=False)


@dataclass(frozen=True)
class DominationReport:
    """Exact max of mu/xi over the probed region, with witness.

    ``unbounded_witnesses`` lists contexts where mu > 0 while xi = 0 (no
    finite constant works); 0/0 contexts are skipped and counted. Used both
    to confirm inclusion domination (mixtures dominate their components by
    1/weight) and to search for failures in the opposite direction.
    """

    depth: int
    max_ratio: Fraction | None
    witness: tuple | None
    unbounded_witnesses: tuple
    skipped_zero_zero: int
    contexts_checked: int


def domination_probe(
    mu: JointSemimeasure | ChronEnv,
    xi: JointSemimeasure | ChronEnv,
    depth: int,
) -> DominationReport:
    """Max over strings (or (e || a) pairs) to ``depth`` of mu/xi, exact.

    Both arguments must be the same kind: joint semimeasures are compared on
    interleaved strings, environments on percept/action pairs for every
    action string.
    """
    joint_side = isinstance(mu, JointSemimeasure)
    if joint_side != isinstance(xi, JointSemimeasure):
        raise TypeError("domination_probe needs two components of the same kind")

    best: Fraction | None = None
    witness: tuple | None = None
    unbounded: list = []
    skipped = 0
    checked = 0

    def consider(context, m: Fraction, x: Fraction) -> None:
        nonlocal best, witness, skipped, checked
        checked += 1
        if x == 0:
            if m == 0:
                skipped += 1
            else:
                unbounded.append(context)
            return
        ratio = m / x
        if best is None or ratio > best:
            best, witness = ratio, context

    if joint_side:
        strings: list[tuple[int, ...]] = [()]
        frontier: list[tuple[int, ...]] = [()]
        for pos in range(depth):
            arity = mu.arity_at(pos)
            frontier = [s + (sym,) for s in frontier for sym in range(arity)]
            strings.extend(frontier)
        for x_str in strings:
            consider(x_str, mu.eval(x_str), xi.eval(x_str))
    else:
        for t in range(depth + 1):
            for acts in product(range(mu.action_arity), repeat=t):
                for percs in product(range(mu.percept_arity), repeat=t):
                    consider((percs, acts), mu.eval(percs, acts), xi.eval(percs, acts))
    return DominationReport(
        depth=depth,
        max_ratio=best,
        witness=witness,
        unbounded_witnesses=tuple(unbounded),
        skipped_zero_zero=skipped,
        contexts_checked=checked,
    )
