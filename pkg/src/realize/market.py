"""Exact money arithmetic, tax rates, and per-tick price quotes.

Every amount in the engine is an integer count of centavos.  Floating point
never enters any computation; the single place rounding can occur is
``apply_rate``, which rounds half-to-even at the centavo.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import MissingPrice, NegativeBase

Tick = int
SecurityId = str

CENTAVOS_PER_PESO = 100

_MONEY_RE = re.compile(r"(-?)(\d+)(?:\.(\d{1,2}))?")


@dataclass(frozen=True, order=True)
class Money:
    """A signed peso amount stored as exact integer centavos."""

    centavos: int

    def __post_init__(self) -> None:
        if not isinstance(self.centavos, int) or isinstance(self.centavos, bool):
            raise TypeError(f"centavos must be int, got {type(self.centavos).__name__}")

    @classmethod
    def zero(cls) -> Money:
        return cls(0)

    @classmethod
    def from_pesos(cls, pesos: int) -> Money:
        return cls(pesos * CENTAVOS_PER_PESO)

    @classmethod
    def parse(cls, text: str) -> Money:
        """Parse a decimal peso string ("50", "-1.25") into exact centavos.

        At most two decimal places are accepted so that every parsed amount
        is exactly representable.
        """
        m = _MONEY_RE.fullmatch(text.strip())
        if m is None:
            raise ValueError(f"not a peso amount: {text!r}")
        sign, whole, frac = m.groups()
        centavos = int(whole) * 100 + int((frac or "").ljust(2, "0"))
        return cls(-centavos if sign else centavos)

    def __add__(self, other: Money) -> Money:
        return Money(self.centavos + other.centavos)

    def __sub__(self, other: Money) -> Money:
        return Money(self.centavos - other.centavos)

    def __neg__(self) -> Money:
        return Money(-self.centavos)

    def __mul__(self, qty: int) -> Money:
        if not isinstance(qty, int):
            return NotImplemented
        return Money(self.centavos * qty)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return self.centavos != 0

    @property
    def is_negative(self) -> bool:
        return self.centavos < 0

    def __str__(self) -> str:
        sign = "-" if self.centavos < 0 else ""
        a = abs(self.centavos)
        return f"{sign}{a // 100:,}.{a % 100:02d}"


def sum_money(amounts: Iterable[Money]) -> Money:
    total = 0
    for a in amounts:
        total += a.centavos
    return Money(total)


@dataclass(frozen=True)
class Rate:
    """A tax rate as an exact fraction, never exceeding 100%."""

    numerator: int
    denominator: int

    def __post_init__(self) -> None:
        if self.denominator <= 0:
            raise ValueError("rate denominator must be positive")
        if not 0 <= self.numerator <= self.denominator:
            raise ValueError("rate must lie between 0% and 100%")

    @classmethod
    def percent(cls, pct: int) -> Rate:
        return cls(pct, 100)

    def __str__(self) -> str:
        if self.denominator == 100:
            return f"{self.numerator}%"
        return f"{self.numerator}/{self.denominator}"


def apply_rate(amount: Money, rate: Rate) -> Money:
    """Multiply a non-negative amount by a rate, rounding half-to-even.

    Raises NegativeBase for negative amounts: the engine never applies a tax
    rate to a loss.
    """
    if amount.centavos < 0:
        raise NegativeBase(f"cannot apply {rate} to negative amount {amount}")
    scaled = amount.centavos * rate.numerator
    q, r = divmod(scaled, rate.denominator)
    twice = 2 * r
    if twice > rate.denominator or (twice == rate.denominator and q % 2 == 1):
        q += 1
    return Money(q)


@dataclass(frozen=True)
class PricePath:
    """Per-share price quotes keyed by (security, tick)."""

    quotes: Mapping[tuple[SecurityId, Tick], Money]

    @classmethod
    def from_table(cls, table: Mapping[SecurityId, Mapping[Tick, Money]]) -> PricePath:
        quotes: dict[tuple[SecurityId, Tick], Money] = {}
        for sec, by_tick in table.items():
            for t, price in by_tick.items():
                quotes[(sec, t)] = price
        return cls(quotes)

    def has(self, sec: SecurityId, t: Tick) -> bool:
        return (sec, t) in self.quotes

    def price_at(self, sec: SecurityId, t: Tick) -> Money:
        """Pure, repeatable lookup of the per-share price for (sec, t)."""
        try:
            return self.quotes[(sec, t)]
        except KeyError:
            raise MissingPrice(sec, t) from None

    def securities(self) -> tuple[SecurityId, ...]:
        return tuple(sorted({sec for sec, _ in self.quotes}))

    def ticks(self, sec: SecurityId) -> tuple[Tick, ...]:
        return tuple(sorted(t for s, t in self.quotes if s == sec))


def price_at(path: PricePath, sec: SecurityId, t: Tick) -> Money:
    return path.price_at(sec, t)
