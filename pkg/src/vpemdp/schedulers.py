"""Memoryless and weight-based schedulers plus their text format.

Scheduler files look like::

    bound 8
    at c 0 choose alpha
    at c 5 choose beta 1/2 alpha 1/2
    tail c choose beta

Below-bound pairs that are not listed fall back to the tail choice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import ParseError, ValidationError
from .mdp import Mdp
from .numeric import format_rational, rational_parse

Distribution = Mapping[str, Fraction]


def point(action: str) -> dict[str, Fraction]:
    return {action: Fraction(1)}


def _check_dist(m: Mdp, s: str, dist: Distribution, where: str) -> None:
    if s not in m.index or s == m.goal:
        raise ValidationError(f"{where}: no decisions are made in state {s!r}")
    names = {a.name for a in m.actions[s]}
    for a, p in dist.items():
        if a not in names:
            raise ValidationError(f"{where}: action {a!r} not enabled", state=s)
        if p <= 0:
            raise ValidationError(f"{where}: non-positive probability for {a!r}", state=s)
    if sum(dist.values(), Fraction(0)) != 1:
        raise ValidationError(f"{where}: choice probabilities do not sum to 1", state=s)


@dataclass(frozen=True)
class MemorylessScheduler:
    choice: Mapping[str, Distribution]

    @classmethod
    def deterministic(cls, choices: Mapping[str, str]) -> "MemorylessScheduler":
        return cls({s: point(a) for s, a in choices.items()})

    def dist(self, s: str) -> Distribution:
        return self.choice[s]

    @property
    def is_deterministic(self) -> bool:
        return all(len(d) == 1 for d in self.choice.values())

    def action(self, s: str) -> str:
        (a,) = self.choice[s]
        return a

    def validate(self, m: Mdp) -> None:
        for s in m.nongoal:
            if s not in self.choice:
                raise ValidationError("tail choice missing", state=s)
            _check_dist(m, s, self.choice[s], "tail")


@dataclass(frozen=True)
class WeightBasedScheduler:
    """Choices keyed by (state, accumulated weight) below ``bound``; ``tail`` above."""

    bound: int
    tail: MemorylessScheduler
    table: Mapping[tuple[str, int], Distribution] = field(default_factory=dict)

    def dist(self, s: str, w: int) -> Distribution:
        if w < self.bound:
            d = self.table.get((s, w))
            if d is not None:
                return d
        return self.tail.choice[s]

    @property
    def is_deterministic(self) -> bool:
        return self.tail.is_deterministic and all(len(d) == 1 for d in self.table.values())

    def validate(self, m: Mdp) -> None:
        if self.bound < 0:
            raise ValidationError("bound must be a natural number")
        self.tail.validate(m)
        for (s, w), d in self.table.items():
            if not 0 <= w < self.bound:
                raise ValidationError(f"table weight {w} outside [0, {self.bound})", state=s)
            _check_dist(m, s, d, f"at weight {w}")

    def with_bound(self, bound: int) -> "WeightBasedScheduler":
        """Same behaviour expressed with a larger bound."""
        if bound < self.bound:
            raise ValueError("bound can only grow")
        return WeightBasedScheduler(bound, self.tail, dict(self.table))


def memoryless(tail: MemorylessScheduler | Mapping[str, str], bound: int = 1) -> WeightBasedScheduler:
    if not isinstance(tail, MemorylessScheduler):
        tail = MemorylessScheduler.deterministic(tail)
    return WeightBasedScheduler(bound, tail, {})


def _parse_choice(tok: list[str], lineno: int) -> dict[str, Fraction]:
    if len(tok) == 1:
        return point(tok[0])
    if len(tok) % 2:
        raise ParseError("expected 'choose <action>' or 'choose (<action> <prob>)+'", lineno)
    dist: dict[str, Fraction] = {}
    for a, ptok in zip(tok[::2], tok[1::2]):
        if a in dist:
            raise ParseError(f"action {a!r} listed twice", lineno)
        try:
            dist[a] = rational_parse(ptok)
        except ParseError as exc:
            raise type(exc)(str(exc), lineno) from None
    return dist


def parse_scheduler(text: str, m: Mdp, default_tail: Mapping[str, str] | None = None) -> WeightBasedScheduler:
    """Parse a scheduler file against model ``m``.

    Tail entries may be omitted for single-action states and, when
    ``default_tail`` is given, for any state it covers.
    """
    bound = None
    table: dict[tuple[str, int], dict[str, Fraction]] = {}
    tail: dict[str, dict[str, Fraction]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "bound":
            if len(tok) != 2 or not tok[1].isdigit():
                raise ParseError("expected 'bound <natural>'", lineno)
            if bound is not None:
                raise ParseError("duplicate 'bound' line", lineno)
            bound = int(tok[1])
        elif tok[0] == "at":
            if len(tok) < 5 or tok[3] != "choose":
                raise ParseError("expected 'at <state> <weight> choose ...'", lineno)
            try:
                w = int(tok[2])
            except ValueError:
                raise ParseError(f"weight {tok[2]!r} is not an integer", lineno) from None
            key = (tok[1], w)
            if key in table:
                raise ParseError(f"duplicate entry for {key}", lineno)
            table[key] = _parse_choice(tok[4:], lineno)
        elif tok[0] == "tail":
            if len(tok) < 4 or tok[2] != "choose":
                raise ParseError("expected 'tail <state> choose ...'", lineno)
            if tok[1] in tail:
                raise ParseError(f"duplicate tail entry for {tok[1]!r}", lineno)
            tail[tok[1]] = _parse_choice(tok[3:], lineno)
        else:
            raise ParseError(f"unknown directive {tok[0]!r}", lineno)
    if bound is None:
        raise ParseError("missing 'bound' line")
    for s in m.nongoal:
        if s in tail:
            continue
        if len(m.actions[s]) == 1:
            tail[s] = point(m.actions[s][0].name)
        elif default_tail is not None and s in default_tail:
            tail[s] = point(default_tail[s])
    sched = WeightBasedScheduler(bound, MemorylessScheduler(tail), table)
    sched.validate(m)
    return sched


def _format_choice(d: Distribution) -> str:
    if len(d) == 1:
        return next(iter(d))
    return " ".join(f"{a} {format_rational(p)}" for a, p in d.items())


def serialize_scheduler(sched: WeightBasedScheduler, m: Mdp) -> str:
    lines = [f"bound {sched.bound}"]
    for (s, w) in sorted(sched.table, key=lambda k: (k[1], m.index[k[0]])):
        lines.append(f"at {s} {w} choose {_format_choice(sched.table[s, w])}")
    for s in m.nongoal:
        if s in sched.tail.choice:
            lines.append(f"tail {s} choose {_format_choice(sched.tail.choice[s])}")
    return "\n".join(lines) + "\n"
