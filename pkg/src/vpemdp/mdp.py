"""Weighted MDP data model and its line-based text format.

File format (``#`` starts a comment, blank lines are ignored)::

    states s_init a b goal
    init s_init
    goal goal
    trans s_init alpha 0 a 1
    trans b tau 1 goal 2/3 b 1/3

Every ``trans`` line declares one action: ``trans <src> <action> <weight>``
followed by one or more ``<dst> <prob>`` pairs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

from .errors import ParseError, ValidationError
from .numeric import format_rational, rational_parse


@dataclass(frozen=True)
class Action:
    name: str
    weight: int
    successors: tuple[tuple[str, Fraction], ...]

    def prob(self, t: str) -> Fraction:
        for u, p in self.successors:
            if u == t:
                return p
        return Fraction(0)


@dataclass(frozen=True, eq=False)
class Mdp:
    """Finite MDP with exact probabilities and integer weights.

    ``actions`` maps every state to its enabled actions in declaration order;
    the goal maps to an empty tuple. Instances are immutable and validated on
    construction.
    """

    states: tuple[str, ...]
    init: str
    goal: str
    actions: Mapping[str, tuple[Action, ...]] = field(repr=False)
    # derived sub-models (e.g. pruned to optimal actions) may strand states
    check_init_reach: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        validate(self, self.check_init_reach)

    def __eq__(self, other):
        if not isinstance(other, Mdp):
            return NotImplemented
        return (
            self.states == other.states
            and self.init == other.init
            and self.goal == other.goal
            and all(self.actions[s] == other.actions[s] for s in self.states)
        )

    def __hash__(self):
        return hash((self.states, self.init, self.goal))

    def enabled(self, s: str) -> tuple[Action, ...]:
        return self.actions[s]

    def action(self, s: str, name: str) -> Action:
        for a in self.actions[s]:
            if a.name == name:
                return a
        raise KeyError(f"action {name!r} not enabled in state {s!r}")

    @cached_property
    def index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.states)}

    @property
    def n(self) -> int:
        return len(self.states)

    @cached_property
    def max_weight(self) -> int:
        return max((a.weight for s in self.states for a in self.actions[s]), default=0)

    @cached_property
    def min_prob(self) -> Fraction:
        """Smallest positive transition probability."""
        return min(p for s in self.states for a in self.actions[s] for _, p in a.successors)

    @cached_property
    def nonnegative(self) -> bool:
        return all(a.weight >= 0 for s in self.states for a in self.actions[s])

    @property
    def nongoal(self) -> list[str]:
        return [s for s in self.states if s != self.goal]

    def restrict(self, keep: Mapping[str, Iterable[str]]) -> "Mdp":
        """Sub-MDP keeping only the named actions per state (order preserved)."""
        acts = {}
        for s in self.states:
            if s == self.goal:
                acts[s] = ()
                continue
            names = set(keep[s])
            acts[s] = tuple(a for a in self.actions[s] if a.name in names)
        return Mdp(self.states, self.init, self.goal, acts, check_init_reach=False)


def build_mdp(states, init, goal, transitions) -> Mdp:
    """Convenience constructor.

    ``transitions`` is an iterable of ``(src, action, weight, {dst: prob})``.
    """
    acts: dict[str, list[Action]] = {s: [] for s in states}
    for src, name, weight, dist in transitions:
        succ = tuple((t, Fraction(p)) for t, p in dist.items())
        acts.setdefault(src, []).append(Action(name, int(weight), succ))
    return Mdp(tuple(states), init, goal, {s: tuple(v) for s, v in acts.items()})


def validate(m: Mdp, check_init_reach: bool = True) -> None:
    known = set(m.states)
    if len(known) != len(m.states):
        raise ValidationError("duplicate state identifiers")
    if m.init not in known:
        raise ValidationError("init is not a declared state", state=m.init)
    if m.goal not in known:
        raise ValidationError("goal is not a declared state", state=m.goal)
    if set(m.actions) != known:
        raise ValidationError("action table does not match the state list")
    for s in m.states:
        seen = set()
        for a in m.actions[s]:
            if a.name in seen:
                raise ValidationError(f"duplicate action {a.name!r}", state=s)
            seen.add(a.name)
            targets = [t for t, _ in a.successors]
            if len(set(targets)) != len(targets):
                raise ValidationError(f"action {a.name!r} lists a successor twice", state=s)
            for t, p in a.successors:
                if t not in known:
                    raise ValidationError(f"action {a.name!r} targets unknown state {t!r}", state=s)
                if not 0 < p <= 1:
                    raise ValidationError(f"action {a.name!r} has probability {p} outside (0,1]", state=s)
            total = sum((p for _, p in a.successors), Fraction(0))
            if total != 1:
                raise ValidationError(
                    f"stochasticity: probabilities of {a.name!r} sum to {format_rational(total)}", state=s
                )
    if m.actions[m.goal]:
        raise ValidationError("goal must have no enabled actions", state=m.goal)
    traps = [s for s in m.states if s != m.goal and not m.actions[s]]
    if traps:
        raise ValidationError(f"unique trap: states without actions besides goal: {traps}", state=traps[0])
    fwd = _reach(m.init, lambda s: (t for a in m.actions[s] for t, _ in a.successors))
    missing = [s for s in m.states if s not in fwd]
    if missing and check_init_reach:
        raise ValidationError(f"reachability: states unreachable from init: {missing}", state=missing[0])
    preds: dict[str, set[str]] = {s: set() for s in m.states}
    for s in m.states:
        for a in m.actions[s]:
            for t, _ in a.successors:
                preds[t].add(s)
    bwd = _reach(m.goal, lambda s: preds[s])
    stuck = [s for s in m.states if s not in bwd]
    if stuck:
        raise ValidationError(f"reachability: goal unreachable from {stuck}", state=stuck[0])


def _reach(src, succ) -> set:
    seen = {src}
    todo = deque([src])
    while todo:
        s = todo.popleft()
        for t in succ(s):
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return seen


def parse_mdp(text: str) -> Mdp:
    states = None
    init = goal = None
    trans: list[tuple[int, str, str, int, dict]] = []
    pairs_seen: dict[tuple[str, str], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        key = tok[0]
        if key == "states":
            if states is not None:
                raise ParseError("duplicate 'states' line", lineno)
            if len(tok) < 2:
                raise ParseError("'states' needs at least one state", lineno)
            states = tok[1:]
        elif key in ("init", "goal"):
            if len(tok) != 2:
                raise ParseError(f"'{key}' takes exactly one state", lineno)
            if (init if key == "init" else goal) is not None:
                raise ParseError(f"duplicate '{key}' line", lineno)
            if key == "init":
                init = tok[1]
            else:
                goal = tok[1]
        elif key == "trans":
            if len(tok) < 6 or (len(tok) - 4) % 2:
                raise ParseError("expected 'trans <src> <action> <weight> (<dst> <prob>)+'", lineno)
            src, name = tok[1], tok[2]
            try:
                weight = int(tok[3])
            except ValueError:
                raise ParseError(f"weight {tok[3]!r} is not an integer", lineno) from None
            if (src, name) in pairs_seen:
                raise ParseError(
                    f"duplicate action {name!r} for state {src!r} (first on line {pairs_seen[src, name]})", lineno
                )
            pairs_seen[src, name] = lineno
            dist: dict[str, Fraction] = {}
            for dst, ptok in zip(tok[4::2], tok[5::2]):
                try:
                    p = rational_parse(ptok)
                except ParseError as exc:
                    raise type(exc)(str(exc), lineno) from None
                if dst in dist:
                    raise ParseError(f"successor {dst!r} listed twice", lineno)
                dist[dst] = p
            trans.append((lineno, src, name, weight, dist))
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)
    if states is None:
        raise ParseError("missing 'states' line")
    if init is None:
        raise ParseError("missing 'init' line")
    if goal is None:
        raise ParseError("missing 'goal' line")
    known = set(states)
    acts: dict[str, list[Action]] = {s: [] for s in states}
    for lineno, src, name, weight, dist in trans:
        if src not in known:
            raise ValidationError(f"unknown source state {src!r}", line=lineno)
        for dst, p in dist.items():
            if dst not in known:
                raise ValidationError(f"unknown target state {dst!r}", line=lineno)
            if p <= 0 or p > 1:
                raise ValidationError(f"probability {format_rational(p)} outside (0,1]", line=lineno)
        total = sum(dist.values(), Fraction(0))
        if total != 1:
            raise ValidationError(
                f"stochasticity: probabilities sum to {format_rational(total)}", line=lineno, state=src
            )
        acts[src].append(Action(name, weight, tuple(dist.items())))
    return Mdp(tuple(states), init, goal, {s: tuple(v) for s, v in acts.items()})


def serialize_mdp(m: Mdp) -> str:
    lines = [
        "states " + " ".join(m.states),
        f"init {m.init}",
        f"goal {m.goal}",
    ]
    for s in m.states:
        for a in m.actions[s]:
            succ = " ".join(f"{t} {format_rational(p)}" for t, p in a.successors)
            lines.append(f"trans {s} {a.name} {a.weight} {succ}")
    return "\n".join(lines) + "\n"


def load_mdp(path) -> Mdp:
    with open(path, encoding="utf-8") as fh:
        return parse_mdp(fh.read())


def load_fixture(name: str) -> Mdp:
    """Load one of the bundled models: ``intro``, ``geo`` or ``micro``."""
    from importlib.resources import files

    if not name.endswith(".mdp"):
        name += ".mdp"
    return parse_mdp(files("vpemdp").joinpath("data").joinpath(name).read_text(encoding="utf-8"))
