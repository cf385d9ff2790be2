import pytest

import opacedit as oe
from opacedit.game import PASSTHROUGH

from conftest import SUBS_ONLY, info


def T(s):
    return tuple(s)


class TestUnobservableClosure:
    def test_initial_closure_absorbs_the_silent_prefix(self, fig3_aut, fig3_tgs):
        got = oe.unobservable_closure(fig3_tgs, {fig3_tgs.game.initial})
        assert got == {
            info(fig3_aut, "1", "14", "13"),
            info(fig3_aut, "3", "36", "13"),
        }

    def test_fixed_point_without_silent_moves(self, fig3_aut, fig3_tgs):
        still = info(fig3_aut, "5", "36", "46")
        assert oe.unobservable_closure(fig3_tgs, {still}) == {still}

    def test_idempotent(self, fig3_tgs):
        once = oe.unobservable_closure(fig3_tgs, {fig3_tgs.game.initial})
        assert oe.unobservable_closure(fig3_tgs, once) == once


class TestBuildUem:
    def test_initial_member_pair(self, fig3_aut, fig3_uem):
        assert fig3_uem.initial == frozenset({
            info(fig3_aut, "1", "14", "13"),
            info(fig3_aut, "3", "36", "13"),
        })

    def test_observation_b_merges_the_two_branches(self, fig3_aut, fig3_uem):
        vuf = fig3_uem.moves_in[fig3_uem.initial]["b"]
        assert vuf.observed == "b"
        assert vuf.members == frozenset({
            oe.AugmentedState(info(fig3_aut, "2", "14", "13"), "b"),
            oe.AugmentedState(info(fig3_aut, "5", "36", "13"), "b"),
        })

    def test_passthrough_after_b_is_partial(self, fig3_aut, fig3_uem):
        vuf = fig3_uem.moves_in[fig3_uem.initial]["b"]
        assert (vuf, PASSTHROUGH) in fig3_uem.partial
        assert fig3_uem.moves_out[vuf][PASSTHROUGH] == frozenset({
            info(fig3_aut, "2", "2", "25"),
        })

    def test_members_share_the_observation(self, fig3_uem):
        for vuf in fig3_uem.uf_states:
            assert all(m.pending == vuf.observed for m in vuf.members)

    def test_full_defender_alphabet_means_no_merging(self, fig3_aut):
        profile = oe.ObservationProfile(
            observable=frozenset("abcd"),
            intruder=frozenset("abd"),
            defender=frozenset("abcd"),
        )
        game = oe.build_edit_game(fig3_aut, profile, k=0, ops=SUBS_ONLY)
        tgs = oe.trim_game(game)
        uem = oe.build_uem(tgs)
        assert all(len(v) == 1 for v in uem.ua_states)
        assert all(len(v.members) == 1 for v in uem.uf_states)
        assert len(uem.ua_states) == len(tgs.game.a_states)

    def test_no_duplicate_member_sets(self, fig3_uem):
        assert len(set(fig3_uem.ua_states)) == len(fig3_uem.ua_states)
        assert len(set(fig3_uem.uf_states)) == len(fig3_uem.uf_states)


class TestRefineToEm:
    def test_partial_passthrough_successor_is_gone(self, fig3_aut, fig3_em):
        vuf = fig3_em.moves_in[fig3_em.initial]["b"]
        assert PASSTHROUGH not in fig3_em.moves_out[vuf]
        ghost = frozenset({info(fig3_aut, "2", "2", "25")})
        assert ghost not in set(fig3_em.ua_states)

    def test_nonempty_and_guaranteed(self, fig3_em):
        assert fig3_em.guaranteed
        assert not fig3_em.partial
        for vuf in fig3_em.uf_states:
            assert fig3_em.moves_out[vuf]

    def test_total_mechanism_is_unchanged(self, fig3_aut):
        profile = oe.ObservationProfile(
            observable=frozenset("abcd"),
            intruder=frozenset("abd"),
            defender=frozenset("abcd"),
        )
        game = oe.build_edit_game(fig3_aut, profile, k=0, ops=SUBS_ONLY)
        uem = oe.build_uem(oe.trim_game(game))
        assert not uem.partial
        em = oe.refine_to_em(uem)
        assert em is not None
        assert set(em.ua_states) == set(uem.ua_states)
        assert set(em.uf_states) == set(uem.uf_states)

    def test_forced_leak_refines_to_nothing(self):
        # the defender cannot see b at all, so it cannot counter the leak of
        # the b-branch; merging makes every response partial
        aut, profile = oe.parse_model(
            "states 1 2 3\ninitial 1\nsecret 2\nevents a b\n"
            "observable a b\nintruder a b\ndefender a\n"
            "trans 1 b 2\ntrans 1 a 3\ntrans 2 a 2\ntrans 3 a 3\n"
        )
        game = oe.build_edit_game(aut, profile, k=1)
        tgs = oe.trim_game(game)
        if tgs is None:
            return
        em = oe.refine_to_em(oe.build_uem(tgs))
        assert em is None

    def test_member_totality_after_refinement(self, fig3_tgs, fig3_em):
        for vuf in fig3_em.uf_states:
            for act in fig3_em.moves_out[vuf]:
                for member in vuf.members:
                    assert act in fig3_tgs.game.def_moves[member]


class TestSynthesize:
    def test_fig3_transducer_maps_bc_to_cd(self, fig3_fe):
        state = fig3_fe.initial
        word1, state = fig3_fe.step(state, "b")
        word2, state = fig3_fe.step(state, "c")
        assert word1 == T("c")
        assert word2 == T("d")

    def test_full_emission_for_abc(self, fig3_fe):
        out = []
        state = fig3_fe.initial
        for event in T("abc"):
            word, state = fig3_fe.step(state, event)
            out.extend(word)
        assert tuple(out) == T("acd")

    def test_never_selects_the_pruned_passthrough(self, fig3_em):
        for policy in oe.POLICIES:
            fe = oe.synthesize(fig3_em, policy=policy)
            assert fe.step(fe.initial, "b")[0] != T("b")

    def test_policy_independent_when_nothing_to_choose(self, fig3_em):
        from opacedit.mechanism import Mechanism

        key = oe.POLICIES["prefer-passthrough"]
        narrowed = Mechanism(
            defender=fig3_em.defender,
            initial=fig3_em.initial,
            ua_states=fig3_em.ua_states,
            uf_states=fig3_em.uf_states,
            moves_in=fig3_em.moves_in,
            moves_out={
                vuf: {min(acts, key=key): acts[min(acts, key=key)]}
                for vuf, acts in fig3_em.moves_out.items()
            },
            partial=frozenset(),
            guaranteed=True,
        )
        behaviors = {
            (fe.n_states, fe.initial, tuple(sorted(fe.output.items())),
             tuple(sorted(fe.next_state.items())))
            for fe in (oe.synthesize(narrowed, policy=p) for p in oe.POLICIES)
        }
        assert len(behaviors) == 1

    def test_policies_can_disagree(self, fig3_em):
        passthrough = oe.synthesize(fig3_em, policy="prefer-passthrough")
        substitute = oe.synthesize(fig3_em, policy="prefer-substitute")
        assert oe.format_mealy(passthrough) != oe.format_mealy(substitute)

    def test_unknown_policy_rejected(self, fig3_em):
        with pytest.raises(ValueError):
            oe.synthesize(fig3_em, policy="nope")

    def test_requires_refined_mechanism(self, fig3_uem):
        with pytest.raises(ValueError):
            oe.synthesize(fig3_uem)

    def test_deterministic_output(self, fig3_em):
        once = oe.format_mealy(oe.synthesize(fig3_em))
        again = oe.format_mealy(oe.synthesize(fig3_em))
        assert once == again


class TestSerialization:
    def test_round_trip(self, fig3_fe):
        text = oe.format_mealy(fig3_fe)
        back = oe.parse_mealy(text)
        assert back == fig3_fe
        assert oe.format_mealy(back) == text

    def test_epsilon_and_insertion_words(self, fig3_profile):
        fe = oe.MealyEditFunction(
            alphabet=fig3_profile.defender,
            n_states=2,
            initial=0,
            output={(0, "b"): (), (0, "c"): T("db"), (1, "d"): T("d")},
            next_state={(0, "b"): 1, (0, "c"): 0, (1, "d"): 1},
            policy="hand",
        )
        back = oe.parse_mealy(oe.format_mealy(fe))
        assert back == fe

    def test_malformed_edge_rejected(self):
        with pytest.raises(ValueError, match="malformed"):
            oe.parse_mealy("alphabet a\nnot an edge\n")

    def test_duplicate_edge_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            oe.parse_mealy("alphabet a b\n0 a / b 0\n0 a / a 0\n")

    def test_missing_alphabet_rejected(self):
        with pytest.raises(ValueError, match="alphabet"):
            oe.parse_mealy("0 a / b 0\n")


class TestMechanismAgreement:
    @pytest.mark.parametrize("seed", range(25))
    def test_synthesized_editors_enforce(self, seed):
        aut, profile = oe.random_instance(seed)
        game = oe.build_edit_game(aut, profile, k=1)
        tgs = oe.trim_game(game)
        em = oe.refine_to_em(oe.build_uem(tgs)) if tgs else None
        if em is None:
            return
        for policy in oe.POLICIES:
            fe = oe.synthesize(em, policy=policy)
            assert oe.exact_ic_check(aut, profile, fe)
