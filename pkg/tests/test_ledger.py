"""Portfolio state machine: applying events, lot matching, step-up."""

import pytest

from realize import (
    AcquisitionMethod,
    Borrow,
    Buy,
    CoverByOwnedLot,
    CoverByPurchase,
    Death,
    Fifo,
    Lot,
    Money,
    PortfolioState,
    PricePath,
    SellOwned,
    ShortSell,
    SpecificId,
    apply_event,
    match_lots,
    step_up,
)
from realize.errors import (
    InsufficientOwnedShares,
    InvalidQuantity,
    MissingPrice,
    NoOpenBorrow,
    OverCover,
    UnknownLotId,
)

ABC_PRICES = PricePath.from_table(
    {"ABC": {1: Money.from_pesos(50), 2: Money.from_pesos(100), 3: Money.from_pesos(30)}}
)


def apply_all(events, path=ABC_PRICES, state=None):
    state = state or PortfolioState()
    effects = []
    for ev in events:
        state, eff = apply_event(state, ev, path)
        effects.append(eff)
    return state, effects


class TestBuyAndSell:
    def test_buy_opens_lot_and_spends_cash(self):
        state, (eff,) = apply_all([Buy(1, "ABC", 100_000)])
        (lot,) = state.lots
        assert lot.qty == 100_000
        assert lot.basis_per_share == Money.from_pesos(50)
        assert lot.method is AcquisitionMethod.PURCHASE
        assert state.cash == Money.from_pesos(-5_000_000)
        assert eff.lot_created == lot

    def test_one_buy_one_sell_cash(self):
        state, _ = apply_all([Buy(1, "ABC", 100_000), SellOwned(2, "ABC", 100_000)])
        assert state.lots == ()
        assert state.cash == (Money.from_pesos(100) - Money.from_pesos(50)) * 100_000

    def test_sell_more_than_owned(self):
        with pytest.raises(InsufficientOwnedShares):
            apply_all([Buy(1, "ABC", 100), SellOwned(2, "ABC", 101)])

    def test_event_quantities_must_be_positive(self):
        with pytest.raises(InvalidQuantity):
            Buy(1, "ABC", 0)
        with pytest.raises(InvalidQuantity):
            SellOwned(1, "ABC", -5)

    def test_missing_price_propagates(self):
        with pytest.raises(MissingPrice):
            apply_all([Buy(9, "ABC", 100)])


class TestBorrowAndShort:
    def test_borrow_then_short_sell(self):
        state, effects = apply_all(
            [Borrow(2, "ABC", 100_000), ShortSell(2, "ABC", 100_000)]
        )
        (pos,) = state.borrows
        assert pos.qty_outstanding == 100_000
        assert pos.qty_sold_short == 100_000
        assert pos.short_proceeds_per_share == Money.from_pesos(100)
        assert pos.sold_at == 2
        assert state.cash == Money.from_pesos(10_000_000)
        assert effects[1].shorts_sold[0].proceeds_per_share == Money.from_pesos(100)

    def test_short_sell_without_borrow(self):
        with pytest.raises(NoOpenBorrow):
            apply_all([ShortSell(2, "ABC", 1)])

    def test_short_sell_beyond_borrowed(self):
        with pytest.raises(NoOpenBorrow):
            apply_all([Borrow(2, "ABC", 100), ShortSell(2, "ABC", 101)])

    def test_partial_short_splits_position(self):
        state, _ = apply_all([Borrow(1, "ABC", 1000), ShortSell(1, "ABC", 400)])
        sold, unsold = state.borrows
        assert sold.qty_borrowed == sold.qty_sold_short == 400
        assert unsold.qty_borrowed == 1000 - 400
        assert unsold.qty_sold_short == 0
        # A later sale at a different price lands on its own position.
        state, _ = apply_all([ShortSell(2, "ABC", 600)], state=state)
        prices = {p.short_proceeds_per_share for p in state.borrows}
        assert prices == {Money.from_pesos(50), Money.from_pesos(100)}

    def test_borrowed_shares_never_count_as_owned(self):
        state, _ = apply_all([Borrow(1, "ABC", 100)])
        assert state.owned_qty("ABC") == 0
        assert state.borrowed_unsold_qty("ABC") == 100


class TestCover:
    def test_cover_by_purchase_closes_position_and_spends_cash(self):
        state, effects = apply_all(
            [
                Borrow(2, "ABC", 100_000),
                ShortSell(2, "ABC", 100_000),
                CoverByPurchase(3, "ABC", 100_000),
            ]
        )
        assert state.borrows == ()
        assert state.cash == Money.from_pesos(10_000_000 - 3_000_000)
        (slice_,) = effects[2].shorts_covered
        assert slice_.proceeds_per_share == Money.from_pesos(100)

    def test_cover_with_owned_lot_moves_no_cash(self):
        state, effects = apply_all(
            [
                Buy(1, "ABC", 100_000),
                Borrow(2, "ABC", 100_000),
                ShortSell(2, "ABC", 100_000),
                CoverByOwnedLot(3, "ABC", 100_000),
            ]
        )
        assert state.lots == ()
        assert state.borrows == ()
        assert state.cash == Money.from_pesos(-5_000_000 + 10_000_000)
        eff = effects[3]
        assert eff.cash_delta == Money.zero()
        assert eff.lots_consumed[0].basis_per_share == Money.from_pesos(50)
        assert eff.shorts_covered[0].proceeds_per_share == Money.from_pesos(100)

    def test_cover_with_owned_lot_without_inventory(self):
        with pytest.raises(InsufficientOwnedShares):
            apply_all(
                [
                    Borrow(2, "ABC", 100),
                    ShortSell(2, "ABC", 100),
                    CoverByOwnedLot(3, "ABC", 100),
                ]
            )

    def test_over_cover(self):
        with pytest.raises(OverCover):
            apply_all(
                [
                    Borrow(2, "ABC", 100),
                    ShortSell(2, "ABC", 100),
                    CoverByPurchase(3, "ABC", 101),
                ]
            )

    def test_cover_of_never_sold_borrow_is_rejected(self):
        # Returning borrowed-but-never-sold shares is not a short-sale cover.
        with pytest.raises(OverCover):
            apply_all([Borrow(2, "ABC", 100), CoverByPurchase(3, "ABC", 100)])

    def test_covers_consume_positions_fifo(self):
        state, effects = apply_all(
            [
                Borrow(1, "ABC", 100),
                ShortSell(1, "ABC", 100),
                Borrow(2, "ABC", 100),
                ShortSell(2, "ABC", 100),
                CoverByPurchase(3, "ABC", 150),
            ]
        )
        covered = effects[-1].shorts_covered
        assert [s.qty for s in covered] == [100, 50]
        assert covered[0].proceeds_per_share == Money.from_pesos(50)
        assert covered[1].proceeds_per_share == Money.from_pesos(100)
        assert state.sold_uncovered_qty("ABC") == 50


class TestMatchLots:
    def two_lot_state(self):
        return PortfolioState(
            lots=(
                Lot(0, "ABC", 60_000, Money.from_pesos(50), 1),
                Lot(1, "ABC", 60_000, Money.from_pesos(80), 2),
            ),
            next_lot_id=2,
        )

    def test_single_lot_full_take(self):
        state = PortfolioState(lots=(Lot(0, "ABC", 100_000, Money.from_pesos(50), 1),))
        (s,) = match_lots(state, "ABC", 100_000)
        assert (s.lot_id, s.qty, s.basis_per_share) == (0, 100_000, Money.from_pesos(50))

    def test_fifo_spills_into_second_lot(self):
        # Forced by the FIFO definition: the older lot empties first.
        a, b = match_lots(self.two_lot_state(), "ABC", 100_000)
        assert (a.lot_id, a.qty, a.basis_per_share) == (0, 60_000, Money.from_pesos(50))
        assert (b.lot_id, b.qty, b.basis_per_share) == (1, 40_000, Money.from_pesos(80))

    def test_zero_request_rejected(self):
        with pytest.raises(InvalidQuantity):
            match_lots(self.two_lot_state(), "ABC", 0)

    def test_specific_id_order(self):
        b, a = match_lots(self.two_lot_state(), "ABC", 100_000, SpecificId((1, 0)))
        assert (b.lot_id, b.qty) == (1, 60_000)
        assert (a.lot_id, a.qty) == (0, 40_000)

    def test_specific_id_unknown_lot(self):
        with pytest.raises(UnknownLotId):
            match_lots(self.two_lot_state(), "ABC", 10, SpecificId((7,)))

    def test_fifo_caps_limit_each_lot(self):
        a, b = match_lots(self.two_lot_state(), "ABC", 70_000, Fifo(caps=((0, 20_000),)))
        assert (a.lot_id, a.qty) == (0, 20_000)
        assert (b.lot_id, b.qty) == (1, 50_000)


class TestStepUp:
    DEATH_PRICES = PricePath.from_table(
        {"ABC": {1: Money.from_pesos(50), 3: Money.from_pesos(130)}}
    )

    def test_basis_steps_up_to_death_price(self):
        state, _ = apply_all([Buy(1, "ABC", 100_000)], path=self.DEATH_PRICES)
        after = step_up(state, 3, self.DEATH_PRICES)
        (lot,) = after.lots
        assert lot.basis_per_share == Money.from_pesos(130)
        assert lot.method is AcquisitionMethod.INHERITANCE
        assert lot.acquired_at == 3
        assert after.owner_generation == 1

    def test_step_up_to_same_price_keeps_value(self):
        state = PortfolioState(lots=(Lot(0, "ABC", 100, Money.from_pesos(130), 1),))
        after = step_up(state, 3, self.DEATH_PRICES)
        assert after.lots[0].basis_per_share == Money.from_pesos(130)

    def test_open_borrow_transmits_unchanged(self):
        path = PricePath.from_table(
            {"ABC": {2: Money.from_pesos(100), 3: Money.from_pesos(130)}}
        )
        state, _ = apply_all([Borrow(2, "ABC", 100), ShortSell(2, "ABC", 100)], path=path)
        after = step_up(state, 3, path)
        assert after.borrows == state.borrows

    def test_step_up_idempotent_on_price(self):
        state, _ = apply_all([Buy(1, "ABC", 100)], path=self.DEATH_PRICES)
        once = step_up(state, 3, self.DEATH_PRICES)
        twice = step_up(once, 3, self.DEATH_PRICES)
        assert [l.basis_per_share for l in once.lots] == [l.basis_per_share for l in twice.lots]

    def test_missing_price_at_death_tick(self):
        state, _ = apply_all([Buy(1, "ABC", 100)], path=self.DEATH_PRICES)
        with pytest.raises(MissingPrice):
            step_up(state, 2, self.DEATH_PRICES)

    def test_death_event_applies_step_up(self):
        state, _ = apply_all([Buy(1, "ABC", 100)], path=self.DEATH_PRICES)
        after, eff = apply_event(state, Death(3, heir="Y"), self.DEATH_PRICES)
        assert after.owner_generation == 1
        assert eff.cash_delta == Money.zero()
