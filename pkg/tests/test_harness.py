import pytest

import opacedit as oe

from conftest import sset


def T(s):
    return tuple(s)


class TestSimulate:
    def test_synthesized_editor_hides_the_secret(self, fig3, fig3_fe):
        aut, profile = fig3
        steps = oe.simulate(aut, profile, fig3_fe, T("abc"))
        emitted = tuple(e for s in steps for e in s.editor_output)
        assert emitted == T("acd")
        assert steps[-1].intruder_estimate in (sset(aut, "4"), sset(aut, "6"))
        assert not any(s.leak for s in steps)

    def test_identity_editor_leaks(self, fig3):
        aut, profile = fig3
        ident = oe.MealyEditFunction.identity(profile.defender)
        steps = oe.simulate(aut, profile, ident, T("abc"))
        assert steps[-1].intruder_estimate == sset(aut, "5")
        assert steps[2].leak
        assert steps[0].leak is False

    def test_empty_trace(self, fig3, fig3_fe):
        aut, profile = fig3
        assert oe.simulate(aut, profile, fig3_fe, ()) == []

    def test_rejects_traces_outside_the_language(self, fig3, fig3_fe):
        aut, profile = fig3
        with pytest.raises(oe.SimulationError):
            oe.simulate(aut, profile, fig3_fe, T("dd"))

    def test_undefined_editor_reports_the_prefix(self, fig3):
        aut, profile = fig3
        empty = oe.MealyEditFunction(
            alphabet=profile.defender, n_states=1, initial=0, output={}, next_state={}
        )
        with pytest.raises(oe.EditUndefinedError) as err:
            oe.simulate(aut, profile, empty, T("ab"))
        assert err.value.prefix == T("ab")

    def test_plant_states_follow_the_trace(self, fig3, fig3_fe):
        aut, profile = fig3
        steps = oe.simulate(aut, profile, fig3_fe, T("abc"))
        assert [aut.labels[s.plant_state] for s in steps] == ["3", "5", "5"]

    def test_outputs_interleave_passthroughs(self, fig3, fig3_fe):
        aut, profile = fig3
        trace = T("abc")
        steps = oe.simulate(aut, profile, fig3_fe, trace)
        state = fig3_fe.initial
        for step, event in zip(steps, trace):
            if event in profile.defender:
                word, state = fig3_fe.step(state, event)
            else:
                word = (event,)
            assert step.editor_output == word

    def test_leak_definition(self, fig3):
        aut, profile = fig3
        ident = oe.MealyEditFunction.identity(profile.defender)
        for step in oe.simulate(aut, profile, ident, T("abcc")):
            expected = (
                step.intruder_estimate <= aut.secret
                and step.plant_state in aut.secret
            )
            assert step.leak == expected

    def test_true_run_consistent_with_a_belief_member(self, fig3, fig3_fe):
        aut, profile = fig3
        assert fig3_fe.beliefs
        for trace in oe.generated_language(aut, 6):
            steps = oe.simulate(aut, profile, fig3_fe, trace)
            state = fig3_fe.initial
            for step, event in zip(steps, trace):
                if event in profile.defender:
                    state = fig3_fe.next_state[(state, event)]
                belief = fig3_fe.beliefs[state]
                assert any(step.plant_state in member.sys for member in belief)


class TestOracle:
    def test_synthesized_editor_passes(self, fig3, fig3_fe):
        aut, profile = fig3
        assert oe.oracle_ic_enforcing(aut, profile, fig3_fe, 6).ok

    def test_identity_fails_confidentiality_with_minimal_witness(self, fig3):
        aut, profile = fig3
        ident = oe.MealyEditFunction.identity(profile.defender)
        verdict = oe.oracle_ic_enforcing(aut, profile, ident, 3)
        assert not verdict.ok
        assert verdict.failed_property == "confidentiality"
        # minimized: the length-2 prefix of abc already reveals the secret
        assert verdict.counterexample == T("ab")
        assert T("abc")[: len(verdict.counterexample)] == verdict.counterexample

    def test_no_secret_means_everything_passes(self, fig3):
        aut, profile = fig3
        bare = oe.FiniteAutomaton(
            labels=aut.labels, events=aut.events, delta=dict(aut.delta),
            initial=aut.initial, secret=frozenset(),
        )
        ident = oe.MealyEditFunction.identity(profile.defender)
        assert oe.oracle_ic_enforcing(bare, profile, ident, 5).ok

    def test_exact_check_agrees_with_deep_oracle(self, fig3, fig3_fe):
        aut, profile = fig3
        assert oe.exact_ic_check(aut, profile, fig3_fe)
        ident = oe.MealyEditFunction.identity(profile.defender)
        assert not oe.exact_ic_check(aut, profile, ident)


class TestRandomInstance:
    def test_deterministic(self):
        for seed in (0, 7, 99):
            assert oe.random_instance(seed) == oe.random_instance(seed)

    def test_profiles_are_well_formed(self):
        for seed in range(50):
            aut, profile = oe.random_instance(seed)
            assert profile.intruder <= profile.observable
            assert profile.defender <= profile.observable
            assert profile.observable <= set(aut.events)
            assert aut.secret
            assert all(
                aut.run(aut.initial, t) is not None
                for t in oe.generated_language(aut, 3)
            )

    def test_incomparable_majority_and_nested_presence(self):
        incomparable = nested = 0
        for seed in range(100):
            _, profile = oe.random_instance(seed)
            if profile.intruder <= profile.defender or profile.defender <= profile.intruder:
                nested += 1
            else:
                incomparable += 1
        assert incomparable >= 50
        assert nested >= 1

    def test_connected(self):
        for seed in range(30):
            aut, _ = oe.random_instance(seed)
            reached = set()
            stack = [aut.initial]
            while stack:
                state = stack.pop()
                if state in reached:
                    continue
                reached.add(state)
                stack.extend(aut.arcs(state).values())
            assert reached == set(range(aut.n_states))

    def test_size_bounds(self):
        for seed in range(30):
            aut, _ = oe.random_instance(seed, max_states=5, max_events=4)
            assert 2 <= aut.n_states <= 5
            assert 2 <= len(aut.events) <= 4


class TestStrategySearch:
    def test_running_example_needs_a_stateful_looping_editor(self, fig3, fig3_fe):
        # the plant loops on defender-visible events, so no bounded-history
        # editor stays available forever; and under substitution only, the
        # right response to c depends on the defender estimate, so no
        # memoryless editor works either -- only the synthesized transducer,
        # which has both memory and loops, enforces
        aut, profile = fig3
        subs = frozenset({"substitute"})
        assert oe.find_edit_strategy(aut, profile, 0, subs, 6) is None
        assert not any(
            oe.exact_ic_check(aut, profile, fe)
            for fe in oe.iter_memoryless_editors(profile, 0, subs)
        )
        assert oe.exact_ic_check(aut, profile, fig3_fe)
        # deletion changes the picture: erasing everything is enforcing
        with_delete = [
            fe
            for fe in oe.iter_memoryless_editors(profile, 0, frozenset({"substitute", "delete"}))
            if oe.exact_ic_check(aut, profile, fe)
        ]
        assert with_delete
        assert all(oe.oracle_ic_enforcing(aut, profile, fe, 6).ok for fe in with_delete)

    def test_finds_a_strategy_when_defender_behavior_is_bounded(self):
        aut, profile = oe.parse_model(
            "states 1 2 3 4\ninitial 1\nsecret 2\nevents a b c\n"
            "observable a b c\nintruder a b\ndefender b c\n"
            "trans 1 b 2\ntrans 1 c 3\ntrans 2 c 4\ntrans 3 b 4\n"
        )
        editor = oe.find_edit_strategy(aut, profile, 1, oe.OPS_ALL, 6)
        if editor is not None:
            assert oe.exact_ic_check(aut, profile, editor)
            assert oe.oracle_ic_enforcing(aut, profile, editor, 6).ok

    def test_unenforceable_instance_yields_nothing(self):
        aut, profile = oe.parse_model(
            "states s t\ninitial s\nsecret s\nevents a b\nobservable a b\n"
            "intruder a b\ndefender a b\ntrans s a t\n"
        )
        assert oe.find_edit_strategy(aut, profile, 1, oe.OPS_ALL, 6) is None

    def test_memoryless_family_is_complete_per_event_menu(self, fig3_profile):
        editors = list(oe.iter_memoryless_editors(fig3_profile, 0, frozenset({"substitute"})))
        # three defender events with three possible responses each
        assert len(editors) == 27

    @pytest.mark.parametrize("seed", range(40))
    def test_agreement_with_the_pipeline(self, seed):
        aut, profile = oe.random_instance(seed)
        game = oe.build_edit_game(aut, profile, k=1)
        tgs = oe.trim_game(game)
        em = oe.refine_to_em(oe.build_uem(tgs)) if tgs else None
        if em is not None:
            fe = oe.synthesize(em)
            assert oe.exact_ic_check(aut, profile, fe)
        else:
            assert oe.find_edit_strategy(aut, profile, 1, oe.OPS_ALL, 8) is None
            for editor in oe.iter_memoryless_editors(profile, 1, oe.OPS_ALL):
                assert not oe.exact_ic_check(aut, profile, editor)


class TestBruteForceCso:
    def test_fig3(self, fig3):
        aut, profile = fig3
        assert not oe.brute_force_cso(aut, profile, 3)

    def test_empty_secret(self, fig3):
        aut, profile = fig3
        bare = oe.FiniteAutomaton(
            labels=aut.labels, events=aut.events, delta=dict(aut.delta),
            initial=aut.initial, secret=frozenset(),
        )
        assert oe.brute_force_cso(bare, profile, 6)
