from fractions import Fraction as Fr
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tfm_lab.mechanism_core import (
    BidGrid,
    GridMechanism,
    InvalidParams,
    Outcome,
    Profile,
    bidder_utility,
    builtin_mechanism,
    check_basic_properties,
    joint_utility,
    miner_utility,
)

G5 = BidGrid((0, Fr(1, 4), Fr(1, 2), 1, 2))
G20 = BidGrid(tuple(range(21)))
THIRD = builtin_mechanism("third_price", G5, 3)


def kth_oracle(bids, k):
    """Winner and payment of a k-th price auction written from scratch."""
    live = [(b, -i) for i, b in enumerate(bids) if b > 0]
    if not live:
        return None, 0
    live.sort(reverse=True)
    winner = -live[0][1]
    pay = bids[winner] if k == 1 else (live[k - 1][0] if len(live) >= k else 0)
    return winner, pay


class TestGrid:
    def test_uniform(self):
        g = BidGrid.uniform(1, 4)
        assert g.levels == (0, Fr(1, 4), Fr(1, 2), Fr(3, 4), 1)
        assert g.L == 5

    def test_floor(self):
        assert G5.floor(Fr(3, 4)) == Fr(1, 2)
        assert G5.floor(5) == 2
        assert G5.digit(Fr(1, 2)) == 2

    def test_rejects_bad_levels(self):
        with pytest.raises(InvalidParams):
            BidGrid((1, 2))
        with pytest.raises(InvalidParams):
            BidGrid((0, 2, 1))

    def test_midpoints(self):
        assert BidGrid((0, 1, 2)).midpoints() == (Fr(1, 2), Fr(3, 2))


class TestTables:
    def test_row_order(self):
        m = THIRD
        assert m.offsets[:3] == (0, 1, 6)
        assert m.row_index(()) == 0
        assert m.row_index((Fr(1, 4),)) == 2
        # bidder 0 is the least significant digit
        assert m.row_index((0, Fr(1, 4))) == 6 + 5

    def test_profiles_enumerate_every_row(self):
        assert len(list(THIRD.profiles())) == len(THIRD.rows) == 1 + 5 + 25 + 125

    @pytest.mark.parametrize("k,kind", [(1, "first_price"), (2, "second_price"), (3, "third_price")])
    def test_kth_price_matches_oracle(self, k, kind):
        m = builtin_mechanism(kind, G5, 3)
        for bids in m.profiles():
            out = m.outcome(bids)
            w, pay = kth_oracle(bids, k)
            assert out.winner == w
            if w is not None:
                assert out.pay[w] == pay
            assert sum(out.pay) == pay

    def test_outcome_accepts_profile(self):
        p = Profile((1, Fr(1, 2)), (Fr(1, 4),))
        assert THIRD.outcome(p) == THIRD.outcome((1, Fr(1, 2), Fr(1, 4)))

    def test_off_grid_bid(self):
        with pytest.raises(InvalidParams):
            THIRD.outcome((Fr(1, 3),))


class TestUtilities:
    def test_third_price_example(self):
        bids = (1, Fr(1, 2), Fr(1, 4))
        assert THIRD.outcome(bids).winner == 0
        assert THIRD.outcome(bids).pay[0] == Fr(1, 4)
        assert bidder_utility(THIRD, Profile(bids), 0, 1) == Fr(3, 4)
        assert miner_utility(THIRD, Profile(bids)) == Fr(1, 4)

    def test_third_price_joint(self):
        vals = (1, Fr(1, 2), Fr(1, 4))
        assert joint_utility(THIRD, Profile(vals), vals, {1}) == Fr(1, 4)
        assert joint_utility(THIRD, Profile((1, 2, Fr(1, 4))), vals, {1}) == Fr(1, 2)
        assert joint_utility(THIRD, Profile(vals), vals, {0, 1, 2}) == 1

    def test_posted_price(self):
        m = builtin_mechanism("posted_price", G20, 1, price=10, burn=0)
        assert m.outcome((10,)) == Outcome(0, (10,), (0,))
        assert bidder_utility(m, Profile((4,)), 0, 4) == 0
        assert bidder_utility(m, Profile((10,)), 0, 20) == 10

    def test_posted_burn_pays_miner_nothing(self):
        m = builtin_mechanism("posted_burn", G20, 2, burn=3)
        assert m.outcome((5,)) == Outcome(0, (3,), (3,))
        for bids in m.profiles():
            assert miner_utility(m, Profile(bids)) == 0

    def test_fake_burn_costs_miner(self):
        m = builtin_mechanism("posted_burn", G20, 2, burn=3)
        assert miner_utility(m, Profile((0,), (5,))) == -3

    def test_empty_profile(self):
        assert miner_utility(THIRD, Profile(())) == 0

    def test_burn_above_price_rejected(self):
        with pytest.raises(InvalidParams):
            builtin_mechanism("posted_price", G20, 1, price=Fr(1, 2), burn=Fr(3, 5))

    def test_unknown_kind(self):
        with pytest.raises(InvalidParams):
            builtin_mechanism("fourth_price", G5)


class TestBasicProperties:
    def test_posted_price_single_bidder(self):
        assert check_basic_properties(builtin_mechanism("posted_price", G20, 1, price=10, burn=0))

    def test_priority_posted_price_is_not_anonymous(self):
        rep = check_basic_properties(builtin_mechanism("posted_price", G20, 2, price=10, burn=0))
        assert not rep and "swapping" in rep.witness.deviation

    @pytest.mark.parametrize("kind", ["first_price", "second_price", "third_price"])
    def test_kth_price(self, kind):
        assert check_basic_properties(builtin_mechanism(kind, G5, 3))

    def test_third_price_two_bids_pays_zero(self):
        for a, b in product(G5.levels[1:], repeat=2):
            out = THIRD.outcome((a, b))
            assert sum(out.pay) == 0

    def test_overcharging_mutant(self):
        def rule(bids):
            w = next((i for i, b in enumerate(bids) if b > 0), None)
            pay = tuple((bids[i] + 1 if i == w else 0) for i in range(len(bids)))
            return w, pay, (0,) * len(bids)
        rep = check_basic_properties(GridMechanism.from_rule(G5, 2, rule, "greedy"))
        assert not rep
        assert "above bid" in rep.witness.deviation


@given(st.lists(st.sampled_from(G5.levels), max_size=3))
def test_outcomes_deterministic_single_winner(bids):
    bids = tuple(bids)
    a, b = THIRD.outcome(bids), THIRD.outcome(bids)
    assert a == b
    assert sum(1 for p in a.pay if p > 0) <= 1
    assert a.winner is None or bids[a.winner] > 0
