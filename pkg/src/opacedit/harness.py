"""End-to-end simulation, the brute-force enforceability oracle, and
random-instance generation for property testing.

The oracle evaluates the definitional checks over all observable behavior
up to a depth; the exhaustive strategy search is its converse companion: it
backtracks over every deterministic history-based editor and reports one
that passes, or certifies that none in the bounded family does.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .automata import FiniteAutomaton, ObservationProfile, Trace, project
from .game import EditAction, enumerate_actions
from .mechanism import MealyEditFunction
from .observers import StateSet, build_observer
from .opacity import (
    EditorRun,
    SupportsEdit,
    evaluate_editor,
    nonsecret_explanation_exists,
)


class SimulationError(ValueError):
    """The plant trace is not in the generated language."""


class EditUndefinedError(RuntimeError):
    """The editor had no defined response; carries the offending prefix."""

    def __init__(self, prefix: Trace):
        super().__init__(f"editor undefined after observable prefix {' '.join(prefix) or 'ε'}")
        self.prefix = prefix


@dataclass(frozen=True)
class SimulationStep:
    plant_event: str
    editor_output: Trace
    intruder_estimate: StateSet
    defender_estimate: StateSet
    plant_state: int
    leak: bool


def simulate(
    aut: FiniteAutomaton,
    profile: ObservationProfile,
    fe: SupportsEdit,
    trace: Trace,
) -> list[SimulationStep]:
    """Drive plant, editor, and both observers along one plant trace.

    A step leaks when the intruder estimate sits inside the secret set while
    the plant is actually in a secret state.
    """
    profile.validate(aut)
    if aut.run(aut.initial, trace) is None:
        raise SimulationError(f"trace {' '.join(trace) or 'ε'} is not generated by the plant")
    o_intr = build_observer(aut, profile.intruder, profile.observable)
    o_def = build_observer(aut, profile.defender, profile.observable)
    run = EditorRun(fe, profile, o_intr, o_def)
    steps: list[SimulationStep] = []
    state = aut.initial
    seen: list[str] = []
    for event in trace:
        state = aut.step(state, event)
        assert state is not None
        seen.append(event)
        if event in profile.observable:
            word = run.feed(event)
            if word is None:
                raise EditUndefinedError(tuple(project(seen, profile.observable)))
        else:
            word = ()
        steps.append(SimulationStep(
            plant_event=event,
            editor_output=word,
            intruder_estimate=run.x_intr,
            defender_estimate=run.x_def,
            plant_state=state,
            leak=run.x_intr <= aut.secret and state in aut.secret,
        ))
    return steps


@dataclass(frozen=True)
class OracleVerdict:
    ok: bool
    failed_property: Optional[str] = None
    counterexample: Optional[Trace] = None


def oracle_ic_enforcing(
    aut: FiniteAutomaton, profile: ObservationProfile, fe: SupportsEdit, depth: int
) -> OracleVerdict:
    """Exhaustive definitional check; reports the first failing prefix."""
    report = evaluate_editor(aut, profile, fe, depth)
    if report.first_violation is None:
        return OracleVerdict(True)
    kind, sigma = report.first_violation
    return OracleVerdict(False, failed_property=kind, counterexample=sigma)


def certifying_depth(
    aut: FiniteAutomaton,
    profile: ObservationProfile,
    fe: MealyEditFunction,
    cap: int,
) -> int:
    """Joint-configuration count of plant, observers, and transducer, capped.

    Behavior repeats once the joint configuration does, so this depth is
    enough to certify the bounded checks whenever it is below the cap.
    """
    o_intr = build_observer(aut, profile.intruder, profile.observable)
    o_def = build_observer(aut, profile.defender, profile.observable)
    start = (aut.initial, o_intr.initial, o_def.initial, fe.initial)
    seen = {start}
    queue = deque([start])
    while queue and len(seen) <= cap:
        x, xi, xd, q = queue.popleft()
        for event in aut.arcs(x):
            dst = aut.step(x, event)
            if event not in profile.observable:
                nxt = (dst, xi, xd, q)
            else:
                step = fe.step(q, event)
                if step is None:
                    continue
                word, q2 = step
                nxi = o_intr.run(word, xi)
                nxd = o_def.run(word, xd)
                if nxi is None or nxd is None:
                    continue
                nxt = (dst, nxi, nxd, q2)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return min(len(seen) + 1, cap)


def exact_ic_check(
    aut: FiniteAutomaton, profile: ObservationProfile, editor: SupportsEdit
) -> bool:
    """Enforceability over all trace lengths, by joint-configuration search.

    Walks the finite product of plant state, both estimates, and editor
    state.  Undefined editor or observer steps fail availability; a
    configuration whose plant state is secret while the intruder estimate
    sits inside the secret set fails confidentiality, since the estimate
    collects exactly the endpoints of the traces explaining the emitted
    word.  Only valid for editors whose state depends on defender
    observations alone (Mealy and history editors); such editors satisfy
    defender-view consistency by construction.
    """
    o_intr = build_observer(aut, profile.intruder, profile.observable)
    o_def = build_observer(aut, profile.defender, profile.observable)
    start = (aut.initial, o_intr.initial, o_def.initial, editor.initial)
    seen = {start}
    queue = deque([start])
    while queue:
        x, xi, xd, q = queue.popleft()
        if x in aut.secret and xi <= aut.secret:
            return False
        for event, dst in aut.arcs(x).items():
            if event not in profile.observable:
                nxt = (dst, xi, xd, q)
            else:
                step = editor.step(q, event)
                if step is None:
                    return False
                word, q2 = step
                if event not in profile.defender and word != (event,):
                    raise ValueError("editor rewrote an event it cannot observe")
                nxi = o_intr.run(word, xi)
                nxd = o_def.run(word, xd)
                if nxi is None or nxd is None:
                    return False
                nxt = (dst, nxi, nxd, q2)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return True


def brute_force_cso(aut: FiniteAutomaton, profile: ObservationProfile, depth: int) -> bool:
    """Literal opacity check over all traces up to depth.

    Each secret-reaching trace must have a non-secret trace with the same
    intruder view; explanations are sought exactly, with no length bound.
    """
    level: list[tuple[Trace, int]] = [((), aut.initial)]
    checked: set[Trace] = set()
    for _ in range(depth + 1):
        for trace, state in level:
            if state in aut.secret:
                beta = project(trace, profile.intruder)
                if beta not in checked:
                    checked.add(beta)
                    if not nonsecret_explanation_exists(aut, beta, profile.intruder):
                        return False
        level = [
            (trace + (event,), dst)
            for trace, state in level
            for event, dst in aut.arcs(state).items()
        ]
        if not level:
            break
    return True


def random_instance(
    seed: int, max_states: int = 5, max_events: int = 4
) -> tuple[FiniteAutomaton, ObservationProfile]:
    """Seed-deterministic connected plant with sampled observation alphabets.

    All events are observable.  The intruder and defender alphabets are
    forced incomparable roughly seven times out of ten and sampled freely
    otherwise, so nested profiles occur across seeds too.
    """
    if max_states < 2 or max_events < 2:
        raise ValueError("need at least two states and two events")
    rng = random.Random(seed)
    n_states = rng.randint(2, max_states)
    n_events = rng.randint(2, max_events)
    labels = tuple(str(i + 1) for i in range(n_states))
    events = tuple("abcdefghij"[i] for i in range(n_events))

    delta: dict[tuple[int, str], int] = {}
    for state in range(1, n_states):
        # connect each state to the part already reachable
        while True:
            src = rng.randrange(state)
            event = rng.choice(events)
            if (src, event) not in delta:
                delta[(src, event)] = state
                break
    for src in range(n_states):
        for event in events:
            if (src, event) not in delta and rng.random() < 0.35:
                delta[(src, event)] = rng.randrange(n_states)

    n_secret = rng.randint(1, max(1, n_states // 2))
    secret = frozenset(rng.sample(range(n_states), n_secret))

    observable = frozenset(events)

    def sample_alphabet() -> frozenset[str]:
        size = rng.randint(1, n_events)
        return frozenset(rng.sample(events, size))

    force_incomparable = n_events >= 2 and rng.random() < 0.7
    while True:
        intruder, defender = sample_alphabet(), sample_alphabet()
        if not force_incomparable:
            break
        if not intruder <= defender and not defender <= intruder:
            break

    aut = FiniteAutomaton(
        labels=labels, events=events, delta=delta,
        initial=0, secret=secret,
    )
    profile = ObservationProfile(
        observable=observable, intruder=intruder, defender=defender
    )
    return aut, profile


# ---------------------------------------------------------------------------
# Exhaustive strategy search
# ---------------------------------------------------------------------------

class HistoryEditor:
    """Editor keyed by the full sequence of defender observations so far.

    This is the most general deterministic causal editor: its response may
    depend on everything it has ever observed.  Used as the search space of
    the exhaustive converse check.
    """

    def __init__(self, decisions: dict[Trace, EditAction], defender: frozenset[str]):
        self.decisions = dict(decisions)
        self.defender = defender
        self.initial: Trace = ()

    def step(self, state: Trace, event: str) -> Optional[tuple[Trace, Trace]]:
        if event not in self.defender:
            return ((event,), state)
        key = state + (event,)
        act = self.decisions.get(key)
        if act is None:
            return None
        return (act.word(event), key)


def iter_memoryless_editors(
    profile: ObservationProfile, k: int, ops: frozenset[str]
) -> "Iterable[MealyEditFunction]":
    """Every single-state editor: one fixed response per defender event.

    Complements the bounded-history search in the converse direction, since
    a memoryless editor loops forever and so covers behavior the bounded
    history family cannot express.
    """
    import itertools

    events = sorted(profile.defender)
    menus = [enumerate_actions(e, profile, k, ops) for e in events]
    for combo in itertools.product(*menus):
        yield MealyEditFunction(
            alphabet=profile.defender,
            n_states=1,
            initial=0,
            output={(0, e): act.word(e) for e, act in zip(events, combo)},
            next_state={(0, e): 0 for e in events},
            policy="memoryless",
        )


def find_edit_strategy(
    aut: FiniteAutomaton,
    profile: ObservationProfile,
    k: int,
    ops: frozenset[str],
    depth: int,
) -> Optional[HistoryEditor]:
    """Search every bounded deterministic editor; return a passing one or None.

    Decision points are defender observation histories of length at most
    ``depth``; this bounds the strategy family, not the check.  Assignments
    are evaluated over the joint configuration graph of plant and
    estimates, so a returned editor is enforcing at every trace length and
    None certifies that no editor in the bounded family is.  Two histories
    awaiting a decision are never prefixes of one another, so the subproblem
    below each history is solved independently and memoized on the budget,
    the observed event, and the parked configuration set.
    """
    profile.validate(aut)
    o_intr = build_observer(aut, profile.intruder, profile.observable)
    o_def = build_observer(aut, profile.defender, profile.observable)
    action_menu = {
        e: enumerate_actions(e, profile, k, ops) for e in sorted(profile.defender)
    }
    secret = aut.secret

    def violates(x: int, xi: StateSet) -> bool:
        return x in secret and xi <= secret

    def expand(seeds) -> Optional[dict[str, frozenset]]:
        """Walk configurations (plant, intruder est., defender est.) from
        ``seeds`` through moves needing no new decision; configurations
        awaiting one are grouped by the observed event.  None on violation."""
        queue = deque(seeds)
        seen = set(seeds)
        parked: dict[str, set] = {}
        while queue:
            x, xi, xd = queue.popleft()
            if violates(x, xi):
                return None
            for event, dst in aut.arcs(x).items():
                if event in profile.defender:
                    parked.setdefault(event, set()).add((dst, xi, xd))
                    continue
                if event in profile.intruder:
                    nxi = o_intr.run((event,), xi)
                    if nxi is None:
                        return None
                else:
                    nxi = xi
                child = (dst, nxi, xd)
                if child not in seen:
                    seen.add(child)
                    queue.append(child)
        return {e: frozenset(nodes) for e, nodes in parked.items()}

    memo: dict[tuple, Optional[dict]] = {}

    def solve_key(budget: int, event: str, parked: frozenset) -> Optional[dict]:
        """Relative decision map for one observation subtree, or None."""
        token = (budget, event, parked)
        if token in memo:
            return memo[token]
        result = None
        for act in action_menu[event]:
            word = act.word(event)
            children = []
            ok = True
            for (dst, xi, xd) in parked:
                nxi = o_intr.run(word, xi)
                nxd = o_def.run(word, xd)
                if nxi is None or nxd is None:
                    ok = False
                    break
                children.append((dst, nxi, nxd))
            if not ok:
                continue
            grouped = expand(children)
            if grouped is None:
                continue
            if grouped and budget == 0:
                continue
            decisions = {(): act}
            for ev, nodes in grouped.items():
                sub = solve_key(budget - 1, ev, nodes)
                if sub is None:
                    ok = False
                    break
                decisions.update({(ev,) + suffix: a for suffix, a in sub.items()})
            if ok:
                result = decisions
                break
        memo[token] = result
        return result

    root = (aut.initial, o_intr.initial, o_def.initial)
    grouped = expand([root])
    if grouped is None:
        return None
    if grouped and depth == 0:
        return None
    decisions: dict[Trace, EditAction] = {}
    for event, nodes in grouped.items():
        sub = solve_key(depth - 1, event, nodes)
        if sub is None:
            return None
        decisions.update({(event,) + suffix: act for suffix, act in sub.items()})
    editor = HistoryEditor(decisions, profile.defender)
    assert exact_ic_check(aut, profile, editor)
    return editor
