"""Event-sourced portfolio state: owned lots, borrow positions, cash.

The ledger applies transaction events in scenario order and reports exactly
what moved through a ``LedgerEffects`` record: lots consumed with their bases,
borrow positions opened or covered, market prices used, and the cash delta.
Tax treatment lives entirely downstream; the ledger knows nothing about
realization regimes, which is what makes cash flow regime-invariant by
construction.

Two inventories are kept deliberately separate.  Owned lots carry purchase or
inheritance basis.  Borrowed shares, although title passes to the borrower the
moment they are lent (SEC securities borrowing rules treat the "loan" as a
transfer of title), are tracked as ``BorrowPosition`` records and are never
matched as owned shares: the downstream constructive-sale trigger must see
only shares the taxpayer owned outright, and the two-realization-event
accounting of a cover-by-owned-lot needs the distinction.

A borrow position is always either fully unsold or fully sold short; a short
sale that partially fills a position splits it so that every sold position
has a single proceeds price.  Covers consume sold positions first-in
first-out and are only permitted against shares actually sold short:
returning borrowed-but-never-sold shares has no defined tax meaning here and
raises ``OverCover``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Union

from .errors import (
    InsufficientOwnedShares,
    InvalidQuantity,
    NoOpenBorrow,
    OverCover,
    UnknownLotId,
)
from .market import Money, PricePath, SecurityId, Tick


class AcquisitionMethod(Enum):
    PURCHASE = "purchase"
    INHERITANCE = "inheritance"


@dataclass(frozen=True)
class Lot:
    """An owned parcel of identical shares with a single per-share basis."""

    id: int
    sec: SecurityId
    qty: int
    basis_per_share: Money
    acquired_at: Tick
    method: AcquisitionMethod = AcquisitionMethod.PURCHASE


@dataclass(frozen=True)
class BorrowPosition:
    """An open securities-borrowing obligation.

    ``qty_outstanding`` is what is still owed to the lender.  Once sold short
    the position records the proceeds price; realization of the short-sale
    gain or loss is deferred to the cover under the existing rule.
    """

    id: int
    sec: SecurityId
    qty_borrowed: int
    borrowed_at: Tick
    qty_sold_short: int = 0
    short_proceeds_per_share: Money | None = None
    sold_at: Tick | None = None
    qty_covered: int = 0

    @property
    def qty_outstanding(self) -> int:
        return self.qty_borrowed - self.qty_covered

    @property
    def qty_unsold(self) -> int:
        return self.qty_borrowed - self.qty_sold_short

    @property
    def qty_sold_uncovered(self) -> int:
        return self.qty_sold_short - self.qty_covered


def _positive_qty(qty: int) -> None:
    if qty <= 0:
        raise InvalidQuantity(f"quantity must be positive, got {qty}")


@dataclass(frozen=True)
class Buy:
    at: Tick
    sec: SecurityId
    qty: int

    def __post_init__(self) -> None:
        _positive_qty(self.qty)


@dataclass(frozen=True)
class Borrow:
    at: Tick
    sec: SecurityId
    qty: int

    def __post_init__(self) -> None:
        _positive_qty(self.qty)


@dataclass(frozen=True)
class ShortSell:
    at: Tick
    sec: SecurityId
    qty: int

    def __post_init__(self) -> None:
        _positive_qty(self.qty)


@dataclass(frozen=True)
class SellOwned:
    at: Tick
    sec: SecurityId
    qty: int

    def __post_init__(self) -> None:
        _positive_qty(self.qty)


@dataclass(frozen=True)
class CoverByPurchase:
    at: Tick
    sec: SecurityId
    qty: int

    def __post_init__(self) -> None:
        _positive_qty(self.qty)


@dataclass(frozen=True)
class CoverByOwnedLot:
    at: Tick
    sec: SecurityId
    qty: int

    def __post_init__(self) -> None:
        _positive_qty(self.qty)


@dataclass(frozen=True)
class Death:
    """Transmission of the whole portfolio to a single heir, with basis step-up."""

    at: Tick
    heir: str | None = None


TransactionEvent = Union[Buy, Borrow, ShortSell, SellOwned, CoverByPurchase, CoverByOwnedLot, Death]


@dataclass(frozen=True)
class Fifo:
    """Match lots first-in first-out, optionally capping the take per lot."""

    caps: tuple[tuple[int, int], ...] | None = None  # (lot id, max take)

    def cap_for(self, lot: Lot) -> int:
        if self.caps is None:
            return lot.qty
        for lot_id, cap in self.caps:
            if lot_id == lot.id:
                return min(cap, lot.qty)
        return lot.qty


@dataclass(frozen=True)
class SpecificId:
    """Match the named lots, in the given order, filling each before the next."""

    ids: tuple[int, ...]


@dataclass(frozen=True)
class Plan:
    """Match an explicit (lot id, qty) schedule.  Internal plumbing for the runner."""

    slices: tuple[tuple[int, int], ...]


LotPolicy = Union[Fifo, SpecificId, Plan]


@dataclass(frozen=True)
class LotSlice:
    """A quantity taken from one lot, with the basis it carried."""

    lot_id: int
    qty: int
    basis_per_share: Money
    acquired_at: Tick
    method: AcquisitionMethod
    qty_before: int


@dataclass(frozen=True)
class ShortSlice:
    """A quantity of one borrow position sold short or covered."""

    position_id: int
    qty: int
    proceeds_per_share: Money
    sold_at: Tick


@dataclass(frozen=True)
class LedgerEffects:
    """What one applied event moved.  The realization module consumes this."""

    event: TransactionEvent
    at: Tick
    sec: SecurityId | None
    qty: int
    price: Money | None
    cash_delta: Money
    lot_created: Lot | None = None
    borrow_opened: BorrowPosition | None = None
    lots_consumed: tuple[LotSlice, ...] = ()
    shorts_sold: tuple[ShortSlice, ...] = ()
    shorts_covered: tuple[ShortSlice, ...] = ()
    owned_lots: tuple[Lot, ...] = ()  # snapshot at a short sale, for the trigger check


@dataclass(frozen=True)
class PortfolioState:
    """Immutable portfolio value; every applied event returns a new state."""

    lots: tuple[Lot, ...] = ()
    borrows: tuple[BorrowPosition, ...] = ()
    cash: Money = field(default_factory=Money.zero)
    owner_generation: int = 0
    next_lot_id: int = 0
    next_borrow_id: int = 0

    def lots_of(self, sec: SecurityId) -> tuple[Lot, ...]:
        return tuple(lot for lot in self.lots if lot.sec == sec)

    def owned_qty(self, sec: SecurityId) -> int:
        return sum(lot.qty for lot in self.lots if lot.sec == sec)

    def borrowed_unsold_qty(self, sec: SecurityId) -> int:
        return sum(p.qty_unsold for p in self.borrows if p.sec == sec)

    def sold_uncovered_qty(self, sec: SecurityId) -> int:
        return sum(p.qty_sold_uncovered for p in self.borrows if p.sec == sec)

    def outstanding_qty(self, sec: SecurityId) -> int:
        return sum(p.qty_outstanding for p in self.borrows if p.sec == sec)


def match_lots(
    state: PortfolioState,
    sec: SecurityId,
    qty: int,
    policy: LotPolicy = Fifo(),
) -> list[LotSlice]:
    """Select owned-lot slices totalling ``qty`` under the matching policy.

    Pure query: the returned slices describe what a disposal would consume;
    ``apply_event`` performs the actual consumption.
    """
    if qty <= 0:
        raise InvalidQuantity(f"quantity must be positive, got {qty}")

    by_id = {lot.id: lot for lot in state.lots if lot.sec == sec}
    slices: list[LotSlice] = []
    remaining = qty

    def take(lot: Lot, amount: int, already_taken: int) -> None:
        slices.append(
            LotSlice(
                lot_id=lot.id,
                qty=amount,
                basis_per_share=lot.basis_per_share,
                acquired_at=lot.acquired_at,
                method=lot.method,
                qty_before=lot.qty - already_taken,
            )
        )

    if isinstance(policy, Fifo):
        for lot in state.lots:
            if lot.sec != sec or remaining == 0:
                continue
            available = policy.cap_for(lot)
            amount = min(remaining, available)
            if amount > 0:
                take(lot, amount, 0)
                remaining -= amount
    elif isinstance(policy, SpecificId):
        for lot_id in policy.ids:
            if lot_id not in by_id:
                raise UnknownLotId(f"no owned lot {lot_id} of {sec}")
            if remaining == 0:
                continue
            lot = by_id[lot_id]
            amount = min(remaining, lot.qty)
            if amount > 0:
                take(lot, amount, 0)
                remaining -= amount
    elif isinstance(policy, Plan):
        taken: dict[int, int] = {}
        for lot_id, amount in policy.slices:
            if amount <= 0:
                raise InvalidQuantity(f"plan slice quantity must be positive, got {amount}")
            if lot_id not in by_id:
                raise UnknownLotId(f"no owned lot {lot_id} of {sec}")
            lot = by_id[lot_id]
            already = taken.get(lot_id, 0)
            if already + amount > lot.qty:
                raise InsufficientOwnedShares(
                    f"plan takes {already + amount} shares from lot {lot_id} holding {lot.qty}"
                )
            take(lot, amount, already)
            taken[lot_id] = already + amount
            remaining -= amount
        if remaining != 0:
            raise InvalidQuantity(
                f"plan covers {qty - remaining} shares but {qty} were requested"
            )
    else:  # pragma: no cover - exhaustive over LotPolicy
        raise TypeError(f"unknown lot policy {policy!r}")

    if remaining > 0:
        raise InsufficientOwnedShares(
            f"need {qty} shares of {sec}, only {qty - remaining} available under {type(policy).__name__}"
        )
    return slices


def _consume_lots(lots: tuple[Lot, ...], slices: list[LotSlice]) -> tuple[Lot, ...]:
    taken: dict[int, int] = {}
    for s in slices:
        taken[s.lot_id] = taken.get(s.lot_id, 0) + s.qty
    out: list[Lot] = []
    for lot in lots:
        t = taken.get(lot.id, 0)
        if t == 0:
            out.append(lot)
        elif t < lot.qty:
            out.append(replace(lot, qty=lot.qty - t))
        # fully consumed lots drop out
    return tuple(out)


def step_up(state: PortfolioState, at: Tick, path: PricePath) -> PortfolioState:
    """Transmit the portfolio to the heir with basis stepped up to the death-date price.

    Every owned lot is re-based to fair market value at the death tick and is
    thereafter an inherited holding; open borrow positions transmit unchanged,
    since the heir inherits the contractual obligation to return the shares.
    """
    stepped = tuple(
        replace(
            lot,
            basis_per_share=path.price_at(lot.sec, at),
            acquired_at=at,
            method=AcquisitionMethod.INHERITANCE,
        )
        for lot in state.lots
    )
    return replace(state, lots=stepped, owner_generation=state.owner_generation + 1)


def apply_event(
    state: PortfolioState,
    ev: TransactionEvent,
    path: PricePath,
    lot_policy: LotPolicy | None = None,
) -> tuple[PortfolioState, LedgerEffects]:
    """Apply one transaction event, returning the new state and its effects."""
    if isinstance(ev, Buy):
        price = path.price_at(ev.sec, ev.at)
        lot = Lot(
            id=state.next_lot_id,
            sec=ev.sec,
            qty=ev.qty,
            basis_per_share=price,
            acquired_at=ev.at,
        )
        cash_delta = -(price * ev.qty)
        new = replace(
            state,
            lots=state.lots + (lot,),
            cash=state.cash + cash_delta,
            next_lot_id=state.next_lot_id + 1,
        )
        return new, LedgerEffects(
            event=ev, at=ev.at, sec=ev.sec, qty=ev.qty, price=price,
            cash_delta=cash_delta, lot_created=lot,
        )

    if isinstance(ev, Borrow):
        pos = BorrowPosition(
            id=state.next_borrow_id, sec=ev.sec, qty_borrowed=ev.qty, borrowed_at=ev.at,
        )
        new = replace(
            state,
            borrows=state.borrows + (pos,),
            next_borrow_id=state.next_borrow_id + 1,
        )
        return new, LedgerEffects(
            event=ev, at=ev.at, sec=ev.sec, qty=ev.qty, price=None,
            cash_delta=Money.zero(), borrow_opened=pos,
        )

    if isinstance(ev, ShortSell):
        price = path.price_at(ev.sec, ev.at)
        if state.borrowed_unsold_qty(ev.sec) < ev.qty:
            raise NoOpenBorrow(
                f"short sale of {ev.qty} {ev.sec} exceeds borrowed-unsold "
                f"{state.borrowed_unsold_qty(ev.sec)}"
            )
        remaining = ev.qty
        next_borrow_id = state.next_borrow_id
        new_borrows: list[BorrowPosition] = []
        slices: list[ShortSlice] = []
        for pos in state.borrows:
            if pos.sec != ev.sec or pos.qty_unsold == 0 or remaining == 0:
                new_borrows.append(pos)
                continue
            amount = min(remaining, pos.qty_unsold)
            if amount == pos.qty_borrowed:
                sold = replace(
                    pos,
                    qty_sold_short=amount,
                    short_proceeds_per_share=price,
                    sold_at=ev.at,
                )
                new_borrows.append(sold)
            else:
                # Split so every sold position carries exactly one proceeds price.
                sold = replace(
                    pos,
                    qty_borrowed=amount,
                    qty_sold_short=amount,
                    short_proceeds_per_share=price,
                    sold_at=ev.at,
                )
                rest = BorrowPosition(
                    id=next_borrow_id,
                    sec=pos.sec,
                    qty_borrowed=pos.qty_borrowed - amount,
                    borrowed_at=pos.borrowed_at,
                )
                next_borrow_id += 1
                new_borrows.extend([sold, rest])
            slices.append(ShortSlice(pos.id, amount, price, ev.at))
            remaining -= amount
        cash_delta = price * ev.qty
        new = replace(
            state,
            borrows=tuple(new_borrows),
            cash=state.cash + cash_delta,
            next_borrow_id=next_borrow_id,
        )
        return new, LedgerEffects(
            event=ev, at=ev.at, sec=ev.sec, qty=ev.qty, price=price,
            cash_delta=cash_delta, shorts_sold=tuple(slices),
            owned_lots=state.lots_of(ev.sec),
        )

    if isinstance(ev, SellOwned):
        price = path.price_at(ev.sec, ev.at)
        slices = match_lots(state, ev.sec, ev.qty, lot_policy or Fifo())
        cash_delta = price * ev.qty
        new = replace(
            state,
            lots=_consume_lots(state.lots, slices),
            cash=state.cash + cash_delta,
        )
        return new, LedgerEffects(
            event=ev, at=ev.at, sec=ev.sec, qty=ev.qty, price=price,
            cash_delta=cash_delta, lots_consumed=tuple(slices),
        )

    if isinstance(ev, (CoverByPurchase, CoverByOwnedLot)):
        price = path.price_at(ev.sec, ev.at)
        coverable = state.sold_uncovered_qty(ev.sec)
        if coverable < ev.qty:
            raise OverCover(
                f"cover of {ev.qty} {ev.sec} exceeds open sold-short quantity {coverable}"
            )
        remaining = ev.qty
        new_borrows = []
        covered: list[ShortSlice] = []
        for pos in state.borrows:
            if pos.sec != ev.sec or pos.qty_sold_uncovered == 0 or remaining == 0:
                if pos.qty_outstanding > 0:
                    new_borrows.append(pos)
                continue
            amount = min(remaining, pos.qty_sold_uncovered)
            assert pos.short_proceeds_per_share is not None and pos.sold_at is not None
            covered.append(ShortSlice(pos.id, amount, pos.short_proceeds_per_share, pos.sold_at))
            after = replace(pos, qty_covered=pos.qty_covered + amount)
            if after.qty_outstanding > 0:
                new_borrows.append(after)
            remaining -= amount

        if isinstance(ev, CoverByPurchase):
            cash_delta = -(price * ev.qty)
            new = replace(
                state,
                borrows=tuple(new_borrows),
                cash=state.cash + cash_delta,
            )
            return new, LedgerEffects(
                event=ev, at=ev.at, sec=ev.sec, qty=ev.qty, price=price,
                cash_delta=cash_delta, shorts_covered=tuple(covered),
            )

        slices = match_lots(state, ev.sec, ev.qty, lot_policy or Fifo())
        new = replace(
            state,
            lots=_consume_lots(state.lots, slices),
            borrows=tuple(new_borrows),
        )
        return new, LedgerEffects(
            event=ev, at=ev.at, sec=ev.sec, qty=ev.qty, price=price,
            cash_delta=Money.zero(),
            lots_consumed=tuple(slices), shorts_covered=tuple(covered),
        )

    if isinstance(ev, Death):
        new = step_up(state, ev.at, path)
        return new, LedgerEffects(
            event=ev, at=ev.at, sec=None, qty=0, price=None, cash_delta=Money.zero(),
        )

    raise TypeError(f"unknown transaction event {ev!r}")  # pragma: no cover
