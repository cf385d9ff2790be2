"""Plant models, observation alphabets, and natural projection.

A plant is a deterministic finite automaton with a partial transition
function.  States are dense integers assigned at construction; the original
labels are kept for parsing and display.  Everything here is immutable after
construction, and every enumeration is returned in a canonical order
(length, then lexicographic on event ids) so that downstream artifacts are
reproducible byte for byte.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

Trace = tuple[str, ...]

EPSILON: Trace = ()


class ModelError(ValueError):
    """A model or observation profile violates a structural constraint."""


class ParseError(ModelError):
    """Malformed model text; the message carries the offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _check_symbol(kind: str, token: str) -> str:
    if not token or not token.isprintable() or any(c.isspace() for c in token):
        raise ModelError(f"{kind} id {token!r} must be printable, nonempty, whitespace-free")
    return token


@dataclass(frozen=True)
class FiniteAutomaton:
    """Deterministic plant with a partial transition map and secret states.

    ``labels[i]`` is the display name of state ``i``; ``delta`` maps
    ``(state, event)`` pairs to successor states and is partial.
    """

    labels: tuple[str, ...]
    events: tuple[str, ...]
    delta: Mapping[tuple[int, str], int]
    initial: int
    secret: frozenset[int]

    def __post_init__(self):
        n = len(self.labels)
        if n == 0:
            raise ModelError("automaton needs at least one state")
        if len(set(self.labels)) != n:
            raise ModelError("state labels must be unique")
        if len(set(self.events)) != len(self.events):
            raise ModelError("event ids must be unique")
        for label in self.labels:
            _check_symbol("state", label)
        for event in self.events:
            _check_symbol("event", event)
        if not 0 <= self.initial < n:
            raise ModelError("initial state out of range")
        if not all(0 <= s < n for s in self.secret):
            raise ModelError("secret state out of range")
        events = set(self.events)
        arcs: list[dict[str, int]] = [dict() for _ in range(n)]
        for (src, event), dst in self.delta.items():
            if not 0 <= src < n or not 0 <= dst < n:
                raise ModelError(f"transition ({src},{event},{dst}) references unknown state")
            if event not in events:
                raise ModelError(f"transition event {event!r} not declared")
            arcs[src][event] = dst
        # per-state successor maps in sorted event order, for deterministic walks
        object.__setattr__(
            self, "_arcs", tuple({e: a[e] for e in sorted(a)} for a in arcs)
        )

    @property
    def n_states(self) -> int:
        return len(self.labels)

    def arcs(self, state: int) -> Mapping[str, int]:
        """Successors of ``state`` keyed by event, in sorted event order."""
        return self._arcs[state]  # type: ignore[attr-defined]

    def step(self, state: int, event: str) -> Optional[int]:
        return self._arcs[state].get(event)  # type: ignore[attr-defined]

    def run(self, state: int, trace: Iterable[str]) -> Optional[int]:
        cur: Optional[int] = state
        for event in trace:
            if cur is None:
                return None
            cur = self._arcs[cur].get(event)  # type: ignore[attr-defined]
        return cur

    def enabled(self, state: int) -> tuple[str, ...]:
        return tuple(self._arcs[state])  # type: ignore[attr-defined]

    def is_secret(self, state: int) -> bool:
        return state in self.secret

    def state_named(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ModelError(f"unknown state label {label!r}") from None


@dataclass(frozen=True)
class ObservationProfile:
    """The observable alphabet and the intruder/defender sub-alphabets.

    ``intruder`` and ``defender`` are both subsets of ``observable`` but need
    not be comparable to each other.  The unobservable alphabet is derived,
    never stored.
    """

    observable: frozenset[str]
    intruder: frozenset[str]
    defender: frozenset[str]

    def __post_init__(self):
        if not self.intruder <= self.observable:
            raise ModelError("intruder alphabet must be a subset of the observable one")
        if not self.defender <= self.observable:
            raise ModelError("defender alphabet must be a subset of the observable one")

    def validate(self, aut: FiniteAutomaton) -> None:
        if not self.observable <= set(aut.events):
            raise ModelError("observable alphabet mentions undeclared events")

    def unobservable(self, aut: FiniteAutomaton) -> frozenset[str]:
        return frozenset(aut.events) - self.observable


def extended_transition(aut: FiniteAutomaton, state: int, trace: Iterable[str]) -> Optional[int]:
    """State reached from ``state`` by consuming ``trace``; None if undefined."""
    return aut.run(state, trace)


def project(trace: Iterable[str], alphabet: Iterable[str]) -> Trace:
    """Natural projection: erase every event outside ``alphabet``."""
    keep = alphabet if isinstance(alphabet, (set, frozenset)) else frozenset(alphabet)
    return tuple(e for e in trace if e in keep)


def generated_language(aut: FiniteAutomaton, depth: int) -> list[Trace]:
    """All defined traces of length <= depth, in length-then-lex order."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    out: list[Trace] = [EPSILON]
    level: list[tuple[Trace, int]] = [(EPSILON, aut.initial)]
    for _ in range(depth):
        nxt: list[tuple[Trace, int]] = []
        for trace, state in level:
            for event, dst in aut.arcs(state).items():
                nxt.append((trace + (event,), dst))
        if not nxt:
            break
        out.extend(t for t, _ in nxt)
        level = nxt
    return out


def inverse_projection_members(
    aut: FiniteAutomaton, observed: Trace, alphabet: Iterable[str], depth: int
) -> list[Trace]:
    """Traces of L(G) up to ``depth`` whose projection equals ``observed``.

    Rejects ``depth < len(observed)`` since no trace that short can project
    onto the full observation.
    """
    keep = frozenset(alphabet)
    if depth < len(observed):
        raise ValueError("depth must be at least the observed length")
    found: list[Trace] = []
    level: list[tuple[Trace, int, int]] = [(EPSILON, aut.initial, 0)]
    if not observed:
        found.append(EPSILON)
    for _ in range(depth):
        nxt: list[tuple[Trace, int, int]] = []
        for trace, state, pos in level:
            for event, dst in aut.arcs(state).items():
                if event in keep:
                    if pos < len(observed) and observed[pos] == event:
                        nxt.append((trace + (event,), dst, pos + 1))
                else:
                    nxt.append((trace + (event,), dst, pos))
        for trace, _, pos in nxt:
            if pos == len(observed):
                found.append(trace)
        level = nxt
    return found


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

_DIRECTIVES = (
    "states", "initial", "secret", "events",
    "observable", "intruder", "defender", "trans",
)


def parse_model(text: str) -> tuple[FiniteAutomaton, ObservationProfile]:
    """Parse the one-directive-per-line model format.

    Unknown directives, duplicate transitions from the same (state, event)
    pair, and references to undeclared symbols are hard errors carrying the
    line number.
    """
    states: list[str] = []
    events: list[str] = []
    sets: dict[str, list[tuple[int, str]]] = {
        "secret": [], "observable": [], "intruder": [], "defender": []
    }
    initial: Optional[tuple[int, str]] = None
    trans: list[tuple[int, str, str, str]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        directive, args = tokens[0], tokens[1:]
        if directive not in _DIRECTIVES:
            raise ParseError(lineno, f"unknown directive {directive!r}")
        if directive == "states":
            for tok in args:
                if tok in states:
                    raise ParseError(lineno, f"state {tok!r} declared twice")
                states.append(tok)
        elif directive == "events":
            for tok in args:
                if tok in events:
                    raise ParseError(lineno, f"event {tok!r} declared twice")
                events.append(tok)
        elif directive == "initial":
            if len(args) != 1:
                raise ParseError(lineno, "initial takes exactly one state")
            if initial is not None:
                raise ParseError(lineno, "initial declared twice")
            initial = (lineno, args[0])
        elif directive == "trans":
            if len(args) != 3:
                raise ParseError(lineno, "trans takes: source event target")
            trans.append((lineno, args[0], args[1], args[2]))
        else:
            sets[directive].extend((lineno, tok) for tok in args)

    if not states:
        raise ParseError(0, "no states declared")
    if not events:
        raise ParseError(0, "no events declared")
    if initial is None:
        raise ParseError(0, "no initial state declared")

    index = {label: i for i, label in enumerate(states)}
    event_set = set(events)

    def state_ref(lineno: int, tok: str) -> int:
        if tok not in index:
            raise ParseError(lineno, f"undeclared state {tok!r}")
        return index[tok]

    def event_ref(lineno: int, tok: str) -> str:
        if tok not in event_set:
            raise ParseError(lineno, f"undeclared event {tok!r}")
        return tok

    delta: dict[tuple[int, str], int] = {}
    for lineno, src, event, dst in trans:
        key = (state_ref(lineno, src), event_ref(lineno, event))
        if key in delta:
            raise ParseError(lineno, f"duplicate transition from {src!r} on {event!r}")
        delta[key] = state_ref(lineno, dst)

    secret = frozenset(state_ref(ln, tok) for ln, tok in sets["secret"])
    observable = frozenset(event_ref(ln, tok) for ln, tok in sets["observable"])
    for kind in ("intruder", "defender"):
        for ln, tok in sets[kind]:
            event_ref(ln, tok)
            if tok not in observable:
                raise ParseError(ln, f"{kind} event {tok!r} is not observable")
    intruder = frozenset(tok for _, tok in sets["intruder"])
    defender = frozenset(tok for _, tok in sets["defender"])

    initial_id = state_ref(*initial)
    try:
        aut = FiniteAutomaton(
            labels=tuple(states),
            events=tuple(events),
            delta=delta,
            initial=initial_id,
            secret=secret,
        )
    except ModelError as exc:
        raise ParseError(initial[0], str(exc)) from exc
    profile = ObservationProfile(observable=observable, intruder=intruder, defender=defender)
    profile.validate(aut)
    return aut, profile


def format_model(aut: FiniteAutomaton, profile: ObservationProfile) -> str:
    """Render a model back into the text format (canonical ordering)."""
    lines = [
        "states " + " ".join(aut.labels),
        "initial " + aut.labels[aut.initial],
    ]
    if aut.secret:
        lines.append("secret " + " ".join(aut.labels[s] for s in sorted(aut.secret)))
    lines.append("events " + " ".join(aut.events))
    lines.append("observable " + " ".join(sorted(profile.observable)))
    if profile.intruder:
        lines.append("intruder " + " ".join(sorted(profile.intruder)))
    if profile.defender:
        lines.append("defender " + " ".join(sorted(profile.defender)))
    for src in range(aut.n_states):
        for event, dst in aut.arcs(src).items():
            lines.append(f"trans {aut.labels[src]} {event} {aut.labels[dst]}")
    return "\n".join(lines) + "\n"


def fmt_state_set(aut: FiniteAutomaton, states: frozenset[int]) -> str:
    """Render a set of plant states as ``{1,3}`` using display labels."""
    return "{" + ",".join(aut.labels[s] for s in sorted(states)) + "}"
