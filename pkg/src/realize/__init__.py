"""Capital-gains-tax realization simulator for ordinary and short sales.

Simulates how and when gains and losses on unlisted shares become taxable
under the existing Philippine realization rule and under a proposed
constructive-sale rule, with exact integer-centavo arithmetic throughout.
"""

from . import errors
from .ledger import (
    AcquisitionMethod,
    Borrow,
    BorrowPosition,
    Buy,
    CoverByOwnedLot,
    CoverByPurchase,
    Death,
    Fifo,
    LedgerEffects,
    Lot,
    PortfolioState,
    SellOwned,
    ShortSell,
    SpecificId,
    apply_event,
    match_lots,
    step_up,
)
from .market import Money, PricePath, Rate, apply_rate, price_at
from .realization import (
    ConstructiveReservation,
    RealizationEvent,
    RealizationKind,
    Regime,
    ReservationBook,
    realize,
    trigger_check,
)
from .scenario import (
    BUILTIN_NAMES,
    ComparisonReport,
    GridRow,
    RunReport,
    Scenario,
    builtin,
    compare,
    format_scenario,
    offset_grid_rows,
    parse_scenario,
    run,
)
from .taxation import NettingWindow, RateSchedule, TaxLine, net_by_period, tax_due, tax_timeline

__version__ = "0.1.0"

__all__ = [
    "AcquisitionMethod",
    "BUILTIN_NAMES",
    "Borrow",
    "BorrowPosition",
    "Buy",
    "ComparisonReport",
    "ConstructiveReservation",
    "CoverByOwnedLot",
    "CoverByPurchase",
    "Death",
    "Fifo",
    "GridRow",
    "LedgerEffects",
    "Lot",
    "Money",
    "NettingWindow",
    "PortfolioState",
    "PricePath",
    "Rate",
    "RateSchedule",
    "RealizationEvent",
    "RealizationKind",
    "Regime",
    "ReservationBook",
    "RunReport",
    "Scenario",
    "SellOwned",
    "ShortSell",
    "SpecificId",
    "TaxLine",
    "apply_event",
    "apply_rate",
    "builtin",
    "compare",
    "errors",
    "format_scenario",
    "match_lots",
    "net_by_period",
    "offset_grid_rows",
    "parse_scenario",
    "price_at",
    "realize",
    "run",
    "step_up",
    "tax_due",
    "tax_timeline",
    "trigger_check",
]
