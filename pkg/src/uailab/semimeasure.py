"""Joint semimeasures, chronological environments, policies, and their checkers.

A joint semimeasure assigns exact mass to finite interleaved action/percept
strings and satisfies nu(x) >= sum_s nu(xs) at every context. A chronological
environment nu(e_1:t || a_1:t) satisfies the one-sided version: for every
action extension, the next-percept masses sum to at most the prefix mass.
Checkers enumerate every context up to a depth exhaustively and report each
violation as data (never as an exception).

Components declare whether they are measures (equality everywhere) or
strictly defective; checkers verify the declaration up to the checked depth.
Lower semicomputability is realized operationally: every component exposes
``eval_at_budget(x, k)``, nondecreasing in k with ``eval`` as its limit.
Finite tables reach the limit at k=0; machine enumerations at finite budget.

All components are immutable after construction; evaluation is pure.
"""
from __future__ import annotations

import abc
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Callable, Mapping, Sequence

from .core import (
    HALF,
    ONE,
    ZERO,
    ComponentFormatError,
    History,
    Prob,
    frac_str,
    prob,
)


class JointSemimeasure(abc.ABC):
    """Evaluable exact distribution over finite interleaved strings.

    Positions are 0-indexed; even positions hold action symbols, odd
    positions percept symbols. Equal arities give the classical single-
    alphabet case.
    """

    action_arity: int = 2
    percept_arity: int = 2
    declared_measure: bool = False

    @abc.abstractmethod
    def eval(self, x: tuple[int, ...]) -> Prob:
        """Exact mass of the interleaved string x."""

    def eval_at_budget(self, x: tuple[int, ...], budget: int) -> Prob:
        """Lower approximation at the given budget; defaults to the limit."""
        return self.eval(x)

    def arity_at(self, position: int) -> int:
        return self.action_arity if position % 2 == 0 else self.percept_arity

    def conditional(self, x: tuple[int, ...], symbol: int) -> Prob:
        """nu(symbol | x) = nu(x + symbol) / nu(x); error on zero prefix."""
        from .core import UndefinedConditionalError

        denom = self.eval(x)
        if denom == 0:
            raise UndefinedConditionalError(x)
        return self.eval(x + (symbol,)) / denom


class ChronEnv(abc.ABC):
    """Two-argument chronological semimeasure nu(e_1:t || a_1:t)."""

    action_arity: int = 2
    percept_arity: int = 2
    declared_measure: bool = False

    @abc.abstractmethod
    def eval(self, percepts: tuple[int, ...], actions: tuple[int, ...]) -> Prob:
        """Exact mass of producing ``percepts`` under ``actions`` (equal lengths)."""

    def eval_at_budget(
        self, percepts: tuple[int, ...], actions: tuple[int, ...], budget: int
    ) -> Prob:
        return self.eval(percepts, actions)

    def conditional(self, history: History, action: int, percept: int) -> Prob:
        """nu(percept | history, action); error on zero-mass history."""
        from .core import UndefinedConditionalError

        denom = self.eval(history.percepts, history.actions)
        if denom == 0:
            raise UndefinedConditionalError((history.percepts, history.actions))
        return (
            self.eval(history.percepts + (percept,), history.actions + (action,)) / denom
        )


class Policy(abc.ABC):
    """A policy, evaluable as a chronological semimeasure over actions.

    ``weight(actions, percepts)`` is the joint probability of emitting the
    action prefix given the percepts seen before each action; only
    ``percepts[:len(actions) - 1]`` is consulted. Deterministic policies also
    expose ``act(history)``.
    """

    action_arity: int = 2

    @abc.abstractmethod
    def weight(self, actions: tuple[int, ...], percepts: tuple[int, ...]) -> Prob:
        ...


class DeterministicPolicy(Policy):
    """Total function from histories to actions, wrapped as a policy."""

    def __init__(self, fn: Callable[[History], int], action_arity: int = 2):
        self.fn = fn
        self.action_arity = action_arity

    def act(self, history: History) -> int:
        return self.fn(history)

    def weight(self, actions: tuple[int, ...], percepts: tuple[int, ...]) -> Prob:
        for i, a in enumerate(actions):
            if self.fn(History(actions[:i], percepts[:i])) != a:
                return ZERO
        return ONE


@dataclass(frozen=True)
class StationaryPolicy(Policy):
    """History-independent action distribution (sums to <= 1)."""

    probs: tuple[Fraction, ...] = (HALF, HALF)

    def __post_init__(self):
        if sum(self.probs) > 1:
            raise ComponentFormatError("action distribution exceeds mass 1")

    @property
    def action_arity(self) -> int:  # type: ignore[override]
        return len(self.probs)

    def weight(self, actions: tuple[int, ...], percepts: tuple[int, ...]) -> Prob:
        out = ONE
        for a in actions:
            out *= self.probs[a]
        return out


def uniform_policy(action_arity: int = 2) -> StationaryPolicy:
    return StationaryPolicy(tuple(Fraction(1, action_arity) for _ in range(action_arity)))


def constant_policy(action: int, action_arity: int = 2) -> DeterministicPolicy:
    return DeterministicPolicy(lambda h: action, action_arity)


@dataclass(frozen=True)
class MixturePolicy(Policy):
    """Weighted mixture of policies, mixed at the joint-value level."""

    policies: tuple[Policy, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.policies) != len(self.weights):
            raise ComponentFormatError("policy/weight length mismatch")
        if any(w <= 0 for w in self.weights) or sum(self.weights) > 1:
            raise ComponentFormatError("policy weights must be positive and sum to <= 1")

    @property
    def action_arity(self) -> int:  # type: ignore[override]
        return self.policies[0].action_arity

    def weight(self, actions: tuple[int, ...], percepts: tuple[int, ...]) -> Prob:
        return sum(
            (w * p.weight(actions, percepts) for p, w in zip(self.policies, self.weights)),
            ZERO,
        )


# ---------------------------------------------------------------------------
# Built-in joint components
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductJoint(JointSemimeasure):
    """Position-wise independent symbol masses: nu(x) = prod p_pos(x_i).

    A measure iff the masses sum to 1 at both action and percept positions;
    smaller sums make it strictly defective (per-symbol halting leak).
    """

    action_probs: tuple[Fraction, ...] = (HALF, HALF)
    percept_probs: tuple[Fraction, ...] = (HALF, HALF)

    def __post_init__(self):
        for probs in (self.action_probs, self.percept_probs):
            if any(p < 0 for p in probs) or sum(probs) > 1:
                raise ComponentFormatError("symbol masses must be >= 0 and sum to <= 1")

    @property
    def action_arity(self) -> int:  # type: ignore[override]
        return len(self.action_probs)

    @property
    def percept_arity(self) -> int:  # type: ignore[override]
        return len(self.percept_probs)

    @property
    def declared_measure(self) -> bool:  # type: ignore[override]
        return sum(self.action_probs) == 1 and sum(self.percept_probs) == 1

    def eval(self, x: tuple[int, ...]) -> Prob:
        out = ONE
        for i, sym in enumerate(x):
            out *= self.action_probs[sym] if i % 2 == 0 else self.percept_probs[sym]
            if out == 0:
                return ZERO
        return out


def uniform_measure(action_arity: int = 2, percept_arity: int = 2) -> ProductJoint:
    """The uniform joint measure nu(x) = prod 1/arity."""
    return ProductJoint(
        tuple(Fraction(1, action_arity) for _ in range(action_arity)),
        tuple(Fraction(1, percept_arity) for _ in range(percept_arity)),
    )


def defective_uniform(symbol_mass: Fraction = Fraction(1, 4)) -> ProductJoint:
    """Strictly defective i.i.d. component: nu(x) = symbol_mass^len(x)."""
    return ProductJoint((symbol_mass, symbol_mass), (symbol_mass, symbol_mass))


@dataclass(frozen=True)
class ActionEchoJoint(JointSemimeasure):
    """Uniform actions; percept echoes the preceding action (binary).

    The percept matches the action with mass ``match`` and mismatches with
    mass ``mismatch``; slack 1 - match - mismatch is a per-step halting leak.
    match=1 is the pure copy machine (joint value 2^-ceil(len/2) on
    copy-consistent strings, 0 elsewhere); match=0, mismatch=1 the pure
    anticopy machine.
    """

    match: Fraction = ONE
    mismatch: Fraction = ZERO

    def __post_init__(self):
        if self.match < 0 or self.mismatch < 0 or self.match + self.mismatch > 1:
            raise ComponentFormatError("match/mismatch masses must be >= 0, sum <= 1")

    @property
    def declared_measure(self) -> bool:  # type: ignore[override]
        return self.match + self.mismatch == 1

    def eval(self, x: tuple[int, ...]) -> Prob:
        out = ONE
        for i in range(0, len(x), 2):
            out *= HALF
            if i + 1 < len(x):
                out *= self.match if x[i + 1] == x[i] else self.mismatch
                if out == 0:
                    return ZERO
        return out


def copy_machine() -> ActionEchoJoint:
    """Uniform at action positions, deterministic copy at percept positions."""
    return ActionEchoJoint(ONE, ZERO)


def anticopy_machine() -> ActionEchoJoint:
    """Uniform at action positions, deterministic complement at percept positions."""
    return ActionEchoJoint(ZERO, ONE)


def leaky_copy(match: Fraction = Fraction(3, 4)) -> ActionEchoJoint:
    """Copy machine with a per-step halting leak at percept positions."""
    return ActionEchoJoint(match, ZERO)


# ---------------------------------------------------------------------------
# Built-in chronological environments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoisyCopyEnv(ChronEnv):
    """Binary env emitting e_t = a_t with mass ``match``, 1-a_t with ``mismatch``.

    History-independent; match=1 is the identity environment (the percept
    deterministically repeats the action, a measure per action sequence).
    """

    match: Fraction = ONE
    mismatch: Fraction = ZERO

    def __post_init__(self):
        if self.match < 0 or self.mismatch < 0 or self.match + self.mismatch > 1:
            raise ComponentFormatError("match/mismatch masses must be >= 0, sum <= 1")

    @property
    def declared_measure(self) -> bool:  # type: ignore[override]
        return self.match + self.mismatch == 1

    def eval(self, percepts: tuple[int, ...], actions: tuple[int, ...]) -> Prob:
        if len(percepts) != len(actions):
            raise ComponentFormatError("percept/action strings must have equal length")
        out = ONE
        for e, a in zip(percepts, actions):
            out *= self.match if e == a else self.mismatch
            if out == 0:
                return ZERO
        return out


def mu_id() -> NoisyCopyEnv:
    """The identity environment: the percept equals the action, always.

    Binary actions, empty observation space, binary reward space; a measure
    per action sequence.
    """
    return NoisyCopyEnv(ONE, ZERO)


def complement_env() -> NoisyCopyEnv:
    """Deterministic environment emitting the complement of the action."""
    return NoisyCopyEnv(ZERO, ONE)


@dataclass(frozen=True)
class IIDEnv(ChronEnv):
    """Action-independent i.i.d. percept distribution."""

    percept_probs: tuple[Fraction, ...] = (HALF, HALF)

    def __post_init__(self):
        if any(p < 0 for p in self.percept_probs) or sum(self.percept_probs) > 1:
            raise ComponentFormatError("percept masses must be >= 0 and sum to <= 1")

    @property
    def percept_arity(self) -> int:  # type: ignore[override]
        return len(self.percept_probs)

    @property
    def declared_measure(self) -> bool:  # type: ignore[override]
        return sum(self.percept_probs) == 1

    def eval(self, percepts: tuple[int, ...], actions: tuple[int, ...]) -> Prob:
        if len(percepts) != len(actions):
            raise ComponentFormatError("percept/action strings must have equal length")
        out = ONE
        for e in percepts:
            out *= self.percept_probs[e]
            if out == 0:
                return ZERO
        return out


def uniform_env(percept_arity: int = 2) -> IIDEnv:
    return IIDEnv(tuple(Fraction(1, percept_arity) for _ in range(percept_arity)))


def constant_env(symbol: int, percept_arity: int = 2) -> IIDEnv:
    """Deterministic environment that always emits ``symbol``."""
    probs = tuple(ONE if e == symbol else ZERO for e in range(percept_arity))
    return IIDEnv(probs)


# ---------------------------------------------------------------------------
# Explicit finite tables
# ---------------------------------------------------------------------------


def _check_row(context: Any, row: Sequence[Fraction], arity: int) -> tuple[Fraction, ...]:
    vals = tuple(prob(v) for v in row)
    if len(vals) != arity:
        raise ComponentFormatError(f"row at context {context!r} has arity {len(vals)} != {arity}")
    if sum(vals) > 1:
        raise ComponentFormatError(
            f"conditionals at context {context!r} sum to {frac_str(sum(vals))} > 1"
        )
    return vals


class TableJoint(JointSemimeasure):
    """Joint semimeasure from an explicit conditional table.

    ``rows`` maps a context string (tuple of symbol indices) to the
    conditional masses of the next symbol. Beyond the defined contexts the
    component extends by ``default``: "uniform" (proper conditionals) or
    "halt" (all further mass 0, making defectiveness explicit).
    """

    def __init__(
        self,
        rows: Mapping[tuple[int, ...], Sequence[Fraction]],
        default: str = "halt",
        action_arity: int = 2,
        percept_arity: int = 2,
        declared_measure: bool = False,
    ):
        if default not in ("halt", "uniform"):
            raise ComponentFormatError(f"unknown default rule {default!r}")
        self.action_arity = action_arity
        self.percept_arity = percept_arity
        self.default = default
        self.declared_measure = declared_measure
        self.rows = {
            tuple(ctx): _check_row(tuple(ctx), row, self.arity_at(len(ctx)))
            for ctx, row in rows.items()
        }

    def _conditional_row(self, ctx: tuple[int, ...]) -> tuple[Fraction, ...]:
        row = self.rows.get(ctx)
        if row is not None:
            return row
        arity = self.arity_at(len(ctx))
        if self.default == "uniform":
            return tuple(Fraction(1, arity) for _ in range(arity))
        return tuple(ZERO for _ in range(arity))

    def eval(self, x: tuple[int, ...]) -> Prob:
        out = ONE
        for i, sym in enumerate(x):
            out *= self._conditional_row(x[:i])[sym]
            if out == 0:
                return ZERO
        return out


class TableEnv(ChronEnv):
    """Chronological environment from an explicit conditional table.

    ``rows`` maps (percept prefix, action prefix including the current
    action) to conditional masses of the next percept. Beyond defined
    contexts, extends by the declared default rule.
    """

    def __init__(
        self,
        rows: Mapping[tuple[tuple[int, ...], tuple[int, ...]], Sequence[Fraction]],
        default: str = "halt",
        action_arity: int = 2,
        percept_arity: int = 2,
        declared_measure: bool = False,
    ):
        if default not in ("halt", "uniform"):
            raise ComponentFormatError(f"unknown default rule {default!r}")
        self.action_arity = action_arity
        self.percept_arity = percept_arity
        self.default = default
        self.declared_measure = declared_measure
        self.rows = {}
        for (e_ctx, a_ctx), row in rows.items():
            key = (tuple(e_ctx), tuple(a_ctx))
            if len(key[1]) != len(key[0]) + 1:
                raise ComponentFormatError(
                    f"context {key!r} must supply one more action than percepts"
                )
            self.rows[key] = _check_row(key, row, percept_arity)

    def _conditional_row(
        self, e_ctx: tuple[int, ...], a_ctx: tuple[int, ...]
    ) -> tuple[Fraction, ...]:
        row = self.rows.get((e_ctx, a_ctx))
        if row is not None:
            return row
        if self.default == "uniform":
            return tuple(Fraction(1, self.percept_arity) for _ in range(self.percept_arity))
        return tuple(ZERO for _ in range(self.percept_arity))

    def eval(self, percepts: tuple[int, ...], actions: tuple[int, ...]) -> Prob:
        if len(percepts) != len(actions):
            raise ComponentFormatError("percept/action strings must have equal length")
        out = ONE
        for i, e in enumerate(percepts):
            out *= self._conditional_row(percepts[:i], actions[: i + 1])[e]
            if out == 0:
                return ZERO
        return out


def table_component(definition: Mapping[str, Any]) -> JointSemimeasure | ChronEnv:
    """Build a table component from a parsed definition dict.

    Expected fields: kind ("joint_table" | "env_table"), alphabet
    ({"actions": n, "percepts": n}), conditionals, default_rule,
    declared_measure. See docs/component_format.md for the exact schema;
    conditional values are exact rational strings, never floats.
    """
    kind = definition.get("kind")
    alphabet = definition.get("alphabet", {})
    action_arity = int(alphabet.get("actions", 2))
    percept_arity = int(alphabet.get("percepts", 2))
    default = definition.get("default_rule", "halt")
    declared = bool(definition.get("declared_measure", False))
    conditionals = definition.get("conditionals", {})
    if kind == "joint_table":
        rows = {
            tuple(int(c) for c in ctx): [prob(v) for v in row]
            for ctx, row in conditionals.items()
        }
        return TableJoint(rows, default, action_arity, percept_arity, declared)
    if kind == "env_table":
        rows = {}
        for ctx, row in conditionals.items():
            e_part, _, a_part = ctx.partition("|")
            key = (
                tuple(int(c) for c in e_part),
                tuple(int(c) for c in a_part),
            )
            rows[key] = [prob(v) for v in row]
        return TableEnv(rows, default, action_arity, percept_arity, declared)
    raise ComponentFormatError(f"unknown component kind {kind!r}")


# ---------------------------------------------------------------------------
# Exhaustive checkers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckRow:
    """One checked context: the prefix mass vs the summed extension mass."""

    context: Any
    lhs: Fraction
    rhs: Fraction

    @property
    def verdict(self) -> str:
        if self.lhs > self.rhs:
            return "strict"
        if self.lhs == self.rhs:
            return "equal"
        return "violation"


@dataclass(frozen=True)
class CheckReport:
    """Deterministic report of an exhaustive defining-condition check."""

    kind: str
    depth: int
    root_mass: Fraction
    rows: tuple[CheckRow, ...]
    monotone_violations: tuple[Any, ...]
    declared_measure: bool

    @property
    def violations(self) -> tuple[CheckRow, ...]:
        return tuple(r for r in self.rows if r.verdict == "violation")

    @property
    def strict_rows(self) -> int:
        return sum(1 for r in self.rows if r.verdict == "strict")

    @property
    def equal_rows(self) -> int:
        return sum(1 for r in self.rows if r.verdict == "equal")

    @property
    def ok(self) -> bool:
        return not self.violations and not self.monotone_violations and self.root_mass <= 1

    @property
    def declaration_verified(self) -> bool | None:
        """True/False when the measure declaration is confirmed/refuted up to
        the checked depth; None when a defect declaration could not be
        confirmed at this depth."""
        if self.declared_measure:
            return self.strict_rows == 0
        return True if self.strict_rows > 0 else None


def _strings_upto(depth: int, arity_at: Callable[[int], int]) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = [()]
    frontier: list[tuple[int, ...]] = [()]
    for pos in range(depth):
        frontier = [s + (sym,) for s in frontier for sym in range(arity_at(pos))]
        out.extend(frontier)
    return out


def check_semimeasure(nu: JointSemimeasure, depth: int) -> CheckReport:
    """Exhaustively check subadditivity (and monotonicity) up to ``depth``.

    Every context x with len(x) <= depth is compared against the summed mass
    of its one-symbol extensions. Violations are data, not failures; rows are
    ordered lexicographically by (length, symbols).
    """
    rows: list[CheckRow] = []
    monotone_bad: list[Any] = []
    for x in _strings_upto(depth, nu.arity_at):
        lhs = nu.eval(x)
        children = [nu.eval(x + (s,)) for s in range(nu.arity_at(len(x)))]
        rows.append(CheckRow(x, lhs, sum(children, ZERO)))
        for s, cm in enumerate(children):
            if cm > lhs:
                monotone_bad.append(x + (s,))
    return CheckReport(
        kind="semimeasure",
        depth=depth,
        root_mass=nu.eval(()),
        rows=tuple(rows),
        monotone_violations=tuple(monotone_bad),
        declared_measure=nu.declared_measure,
    )


def check_chronological(nu: ChronEnv, depth: int) -> CheckReport:
    """Exhaustively check the chronological condition up to ``depth``.

    For every (e, a) pair with t <= depth and every next action a', verifies
    nu(e || a) >= sum_e' nu(e e' || a a'). One row per (e, a, a').
    """
    rows: list[CheckRow] = []
    monotone_bad: list[Any] = []
    pairs: list[tuple[tuple[int, ...], tuple[int, ...]]] = [((), ())]
    frontier = [((), ())]
    for _ in range(depth):
        nxt = []
        for e, a in frontier:
            for a_next in range(nu.action_arity):
                for e_next in range(nu.percept_arity):
                    nxt.append((e + (e_next,), a + (a_next,)))
        pairs.extend(nxt)
        frontier = nxt
    for e, a in pairs:
        lhs = nu.eval(e, a)
        for a_next in range(nu.action_arity):
            children = [
                nu.eval(e + (e_next,), a + (a_next,)) for e_next in range(nu.percept_arity)
            ]
            rows.append(CheckRow((e, a, a_next), lhs, sum(children, ZERO)))
            for e_next, cm in enumerate(children):
                if cm > lhs:
                    monotone_bad.append((e + (e_next,), a + (a_next,)))
    return CheckReport(
        kind="chronological",
        depth=depth,
        root_mass=nu.eval((), ()),
        rows=tuple(rows),
        monotone_violations=tuple(monotone_bad),
        declared_measure=nu.declared_measure,
    )


def check_policy(pi: Policy, depth: int, percept_arity: int = 2) -> CheckReport:
    """Chronological condition with action/percept roles swapped."""
    rows: list[CheckRow] = []
    for t in range(depth):
        for actions in product(range(pi.action_arity), repeat=t):
            for percepts in product(range(percept_arity), repeat=t):
                lhs = pi.weight(actions, percepts[: max(0, t - 1)])
                children = [
                    pi.weight(actions + (a,), percepts) for a in range(pi.action_arity)
                ]
                rows.append(CheckRow((actions, percepts), lhs, sum(children, ZERO)))
    return CheckReport(
        kind="policy",
        depth=depth,
        root_mass=pi.weight((), ()),
        rows=tuple(rows),
        monotone_violations=(),
        declared_measure=False,
    )
