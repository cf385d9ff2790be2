"""Opacity verification and edit-function synthesis for partially observed
discrete event systems with incomparable intruder/defender observations."""

from .automata import (
    EPSILON,
    FiniteAutomaton,
    ModelError,
    ObservationProfile,
    ParseError,
    Trace,
    extended_transition,
    fmt_state_set,
    format_model,
    generated_language,
    inverse_projection_members,
    parse_model,
    project,
)
from .observers import (
    ObserverAutomaton,
    build_observer,
    observer_run,
    reach_set,
    standard_observers,
)
from .game import (
    DELETE,
    EditAction,
    EditGameStructure,
    AugmentedState,
    InfoState,
    OPS_ALL,
    PASSTHROUGH,
    apply_defender_move,
    build_edit_game,
    enumerate_actions,
    insertion,
    state_utility,
    substitution,
)
from .trimming import TrimmedGameStructure, trim_game, trim_game_naive
from .mechanism import (
    MealyEditFunction,
    Mechanism,
    POLICIES,
    build_uem,
    format_mealy,
    parse_mealy,
    refine_to_em,
    synthesize,
    unobservable_closure,
)
from .opacity import (
    OpacityVerdict,
    check_c_available,
    check_confidential,
    check_i_available,
    check_integrity,
    default_depth,
    evaluate_editor,
    ic_enforcing,
    nonsecret_explanation_exists,
    verify_cso,
)
from .harness import (
    EditUndefinedError,
    HistoryEditor,
    OracleVerdict,
    SimulationError,
    SimulationStep,
    brute_force_cso,
    certifying_depth,
    exact_ic_check,
    find_edit_strategy,
    iter_memoryless_editors,
    oracle_ic_enforcing,
    random_instance,
    simulate,
)

__version__ = "0.1.0"
