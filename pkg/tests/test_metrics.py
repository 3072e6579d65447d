import math

import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from app.core.metrics import (
    check_master_theorem,
    cluster,
    entropy,
    gini,
    largest_bloc,
    nakamoto,
    pairwise_aligned,
    sign_vector,
    vbe,
)
from app.core.generators import sweep_lemma
from app.models.metrics import ClusteringSpec, EntropyKind, EntropySpec, Partition
from app.models.scenario import Scenario
from app.utils.exceptions import EntropyClusteringMismatchException, TokenTotalMismatchException

MIN = EntropySpec(EntropyKind.MIN)
SHANNON = EntropySpec(EntropyKind.SHANNON)


@pytest.mark.parametrize("row, expected", [
    ((5.0, -2.0), (1, -1)),
    ((0.05, 0.01), (0, 0)),
    ((0.1, -3.0), (0, -1)),
])
def test_sign_vector(row, expected):
    assert sign_vector(row, 0.1) == expected


def test_cluster_four_player_example(four_player):
    partition = cluster(four_player)
    assert partition.as_lists() == [["u1", "u2"], ["u3"], ["u4"]]
    assert partition.apathy_bloc == frozenset({"u4"})


def test_solo_clustering_gives_singletons(four_player):
    partition = cluster(four_player, ClusteringSpec.solo())
    assert len(partition.blocs) == 4
    assert partition.solo


def test_pairwise_alignment_is_not_transitive():
    assert pairwise_aligned((5, 0.01), (5, 0.05), 0.1)
    assert pairwise_aligned((5, 0.01), (5, -0.05), 0.1)
    assert not pairwise_aligned((5, 0.01), (5, -5), 0.1)


def test_bloc_members_are_pairwise_aligned(four_player):
    partition = cluster(four_player)
    for bloc in partition.blocs:
        for a in bloc:
            for b in bloc:
                assert pairwise_aligned(four_player.row(a), four_player.row(b), four_player.epsilon)


def test_entropy_values():
    tokens = {"a": 2.0, "b": 1.0, "c": 1.0, "d": 1.0}
    three = Partition(blocs=({"a"}, {"b"}, {"c", "d"}))
    assert entropy(three, {"a": 2.0, "b": 1.0, "c": 0.5, "d": 0.5}, MIN) == pytest.approx(1.0)
    assert entropy(Partition(blocs=({"a", "b", "c", "d"},)), tokens, MIN) == 0.0

    four = Partition(blocs=({"a"}, {"b"}, {"c"}, {"d"}))
    assert entropy(four, {p: 1.0 for p in "abcd"}, SHANNON) == pytest.approx(2.0)

    two = Partition(blocs=({"a"}, {"b"}))
    assert entropy(two, {"a": 3.0, "b": 1.0}, SHANNON) == pytest.approx(0.8113, abs=1e-4)


def test_neg_sum_sq_requires_solo(four_player):
    with pytest.raises(EntropyClusteringMismatchException):
        entropy(cluster(four_player), four_player.tokens, EntropySpec(EntropyKind.NEG_SUM_SQ))


def test_neg_sum_sq_identical_rows_is_zero():
    s = Scenario(
        players=("a", "b"),
        tokens={"a": 1.0, "b": 1.0},
        elections=("e1",),
        utilities={"a": {"e1": 2.0}, "b": {"e1": 2.0}},
    )
    assert vbe(s, ClusteringSpec.solo(), EntropySpec(EntropyKind.NEG_SUM_SQ)) == 0.0


def test_vbe_four_player_example(four_player):
    assert vbe(four_player) == pytest.approx(-math.log2(0.75), abs=1e-9)


def test_single_holder_has_zero_vbe(four_player):
    tokens = {p: 0.0 for p in four_player.players}
    tokens["u3"] = 10.0
    assert vbe(four_player.replace(tokens=tokens)) == 0.0


def test_largest_bloc_tie_goes_to_smallest_id():
    partition = Partition(blocs=({"b"}, {"a"}))
    bloc, amount = largest_bloc(partition, {"a": 4.0, "b": 4.0})
    assert bloc == frozenset({"a"})
    assert amount == 4.0


def test_largest_bloc_ties_within_tolerance():
    partition = Partition(blocs=({"b", "c"}, {"a"}))
    bloc, amount = largest_bloc(partition, {"a": 0.3, "b": 0.1, "c": 0.2})
    assert bloc == frozenset({"a"})
    assert amount == pytest.approx(0.3)


def test_master_theorem_identity(four_player):
    verdict = check_master_theorem(four_player, four_player)
    assert verdict.holds
    assert verdict.vbe_before == verdict.vbe_after


def test_master_theorem_rejects_different_totals(four_player):
    richer = four_player.replace(tokens={**four_player.tokens, "u1": 40.0})
    with pytest.raises(TokenTotalMismatchException):
        check_master_theorem(four_player, richer)


def test_gini_and_nakamoto():
    assert gini({"a": 5.0, "b": 5.0}) == 0.0
    assert nakamoto({"A": 99.0, "B": 1.0}, 0.5) == 1
    assert nakamoto({"A": 1.0, "B": 1.0, "C": 1.0, "D": 1.0}, 0.5) == 3


rows = st.lists(st.sampled_from([-2.0, -0.5, 0.0, 0.5, 2.0]), min_size=2, max_size=2)


@hyp_settings(max_examples=200, deadline=None)
@given(
    balances=st.lists(st.integers(min_value=0, max_value=20), min_size=1, max_size=6),
    utility_rows=st.lists(rows, min_size=6, max_size=6),
    epsilon=st.sampled_from([0.0, 0.5, 1.0]),
)
def test_solo_entropy_bounds_bloc_entropy(balances, utility_rows, epsilon):
    if sum(balances) == 0:
        balances[0] = 1
    players = tuple(f"p{i}" for i in range(len(balances)))
    s = Scenario(
        players=players,
        tokens={p: float(b) for p, b in zip(players, balances)},
        elections=("e1", "e2"),
        utilities={p: {"e1": r[0], "e2": r[1]} for p, r in zip(players, utility_rows)},
        epsilon=epsilon,
    )
    for f in (MIN, SHANNON):
        assert vbe(s, ClusteringSpec.solo(), f) >= vbe(s, ClusteringSpec(), f) - 1e-9


def test_solo_bound_on_generated_scenarios():
    assert sweep_lemma(500, seed=3) == 0


@pytest.mark.slow
def test_solo_bound_sweep():
    assert sweep_lemma(10_000, seed=11) == 0
