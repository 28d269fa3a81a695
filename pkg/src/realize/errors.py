"""Exception hierarchy shared by every engine module."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class MissingPrice(EngineError):
    """A scenario referenced a (security, tick) pair with no quoted price."""

    def __init__(self, sec: str, tick: int) -> None:
        self.sec = sec
        self.tick = tick
        super().__init__(f"no quoted price for {sec} at tick {tick}")


class NegativeBase(EngineError):
    """A tax rate was applied to a negative amount; rates never apply to losses."""


class InsufficientOwnedShares(EngineError):
    """A disposal asked for more owned shares of a security than are available."""


class NoOpenBorrow(EngineError):
    """A short sale exceeded the borrowed-and-not-yet-sold share count."""


class OverCover(EngineError):
    """A cover exceeded the open short obligation for that security."""


class InvalidQuantity(EngineError):
    """A share quantity was zero or negative.

    Carries an optional source position when raised by the scenario parser.
    """

    def __init__(self, message: str, line: int | None = None, col: int | None = None) -> None:
        self.line = line
        self.col = col
        if line is not None:
            message = f"line {line}, col {col}: {message}"
        super().__init__(message)


class UnknownLotId(EngineError):
    """A specific-identification match named a lot id that does not exist."""


class ReservationMismatch(EngineError):
    """Internal consistency guard for the constructive-sale bookkeeping.

    Raised when a proposed-regime cover delivers owned shares that do not
    line up with the shares deemed disposed at the short-sale tick.
    """


class UnknownScenario(EngineError):
    """Requested built-in scenario name does not exist."""

    def __init__(self, name: str, known: tuple[str, ...]) -> None:
        self.name = name
        super().__init__(f"unknown scenario {name!r}; built-ins: {', '.join(known)}")


class ParseError(EngineError):
    """Scenario DSL error with a line/column diagnostic."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None) -> None:
        self.line = line
        self.col = col
        self.bare_message = message
        if line is not None:
            message = f"line {line}, col {col}: {message}"
        super().__init__(message)


class UnknownDirective(ParseError):
    """First token of a DSL line is not a recognized directive or verb."""


class NonMonotonicTick(ParseError):
    """Event ticks must be non-decreasing in scenario order."""


class UndefinedPrice(ParseError):
    """An event references a (security, tick) with no price directive."""
