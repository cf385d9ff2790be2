"""Pruning of problematic game states, supervisory-control style.

System moves are uncontrollable: an information state dies as soon as one
observable event leads into a dead augmented state.  Defender moves are
controllable: individual edit actions into dead information states are
disabled, and an augmented state dies only when no response survives.
The fixpoint runs backwards over a worklist; a naive full-sweep variant is
kept for cross-checking since both must compute the same fixpoint.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .game import (
    AugmentedState,
    EditAction,
    EditGameStructure,
    InfoState,
    aug_key,
    info_key,
)


@dataclass(frozen=True)
class TrimmedGameStructure:
    """Surviving game plus the per-state sets of enabled edit actions."""

    game: EditGameStructure
    control: dict[AugmentedState, tuple[EditAction, ...]]
    disabled: dict[AugmentedState, tuple[EditAction, ...]]
    removed_a: tuple[InfoState, ...]
    removed_f: tuple[AugmentedState, ...]


def _finish(
    game: EditGameStructure, bad: set
) -> Optional[TrimmedGameStructure]:
    if game.initial in bad:
        return None

    control: dict[AugmentedState, dict[EditAction, InfoState]] = {}
    disabled: dict[AugmentedState, tuple[EditAction, ...]] = {}
    for vf in game.f_states:
        if vf in bad:
            continue
        live = {act: tgt for act, tgt in game.def_moves[vf].items() if tgt not in bad}
        dead = tuple(sorted(
            (act for act, tgt in game.def_moves[vf].items() if tgt in bad),
            key=EditAction.sort_key,
        ))
        assert live, "surviving augmented state lost every action"
        control[vf] = live
        if dead:
            disabled[vf] = dead

    # accessible part only; surviving system moves cannot point at dead states
    reach_a: dict[InfoState, None] = {game.initial: None}
    reach_f: dict[AugmentedState, None] = {}
    queue = deque([game.initial])
    while queue:
        v = queue.popleft()
        for vf in game.sys_moves[v].values():
            assert vf not in bad, "uncontrollable move into a pruned state survived"
            if vf in reach_f:
                continue
            reach_f[vf] = None
            for tgt in control[vf].values():
                if tgt not in reach_a:
                    reach_a[tgt] = None
                    queue.append(tgt)

    sub_sys = {v: dict(game.sys_moves[v]) for v in reach_a}
    sub_def = {vf: dict(control[vf]) for vf in reach_f}
    utility = {v: 1 for v in reach_a}
    utility.update({vf: 1 for vf in reach_f})
    trimmed = EditGameStructure(
        profile=game.profile,
        k=game.k,
        ops=game.ops,
        initial=game.initial,
        a_states=tuple(sorted(reach_a, key=info_key)),
        f_states=tuple(sorted(reach_f, key=aug_key)),
        sys_moves=sub_sys,
        def_moves=sub_def,
        utility=utility,
    )
    return TrimmedGameStructure(
        game=trimmed,
        control={vf: tuple(sorted(sub_def[vf], key=EditAction.sort_key)) for vf in reach_f},
        disabled={vf: disabled[vf] for vf in reach_f if vf in disabled},
        removed_a=tuple(sorted((v for v in game.a_states if v in bad), key=info_key)),
        removed_f=tuple(sorted((v for v in game.f_states if v in bad), key=aug_key)),
    )


def trim_game(game: EditGameStructure) -> Optional[TrimmedGameStructure]:
    """Prune utility-0 states to a fixpoint; None when the initial state dies."""
    bad: set = {v for v in game.a_states if game.utility[v] == 0}
    bad |= {vf for vf in game.f_states if game.utility[vf] == 0}

    a_parents: dict[AugmentedState, list[InfoState]] = {vf: [] for vf in game.f_states}
    for v in game.a_states:
        for vf in game.sys_moves[v].values():
            a_parents[vf].append(v)
    f_in: dict[InfoState, list[AugmentedState]] = {v: [] for v in game.a_states}
    live_count: dict[AugmentedState, int] = {}
    for vf in game.f_states:
        live_count[vf] = len(game.def_moves[vf])
        for tgt in game.def_moves[vf].values():
            f_in[tgt].append(vf)

    queue = deque(sorted((v for v in bad if isinstance(v, InfoState)), key=info_key))
    queue.extend(sorted((v for v in bad if isinstance(v, AugmentedState)), key=aug_key))
    while queue:
        v = queue.popleft()
        if isinstance(v, InfoState):
            for vf in f_in[v]:
                live_count[vf] -= 1
                if live_count[vf] == 0 and vf not in bad:
                    bad.add(vf)
                    queue.append(vf)
        else:
            for parent in a_parents[v]:
                if parent not in bad:
                    bad.add(parent)
                    queue.append(parent)
    return _finish(game, bad)


def trim_game_naive(game: EditGameStructure) -> Optional[TrimmedGameStructure]:
    """Restart-the-sweep formulation of the same fixpoint, for cross-checks."""
    bad: set = {v for v in game.a_states if game.utility[v] == 0}
    bad |= {vf for vf in game.f_states if game.utility[vf] == 0}
    changed = True
    while changed:
        changed = False
        for v in game.a_states:
            if v in bad:
                continue
            if any(vf in bad for vf in game.sys_moves[v].values()):
                bad.add(v)
                changed = True
        for vf in game.f_states:
            if vf in bad:
                continue
            if all(tgt in bad for tgt in game.def_moves[vf].values()):
                bad.add(vf)
                changed = True
    return _finish(game, bad)
