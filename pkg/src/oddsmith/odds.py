"""Bookmaker-style 1x2 odds: probability -> decimal odds with overround.

Decimal odds are payout multipliers >= 1. A book with margin m quotes
odds o_i = 1 / (p_i * (1 + m)), so the implied probabilities 1/o_i sum
to 1 + m: the overround is the bookmaker's built-in profit.

Edge handling: probabilities below PROB_FLOOR are clipped up before
inversion (capping odds at 1/PROB_FLOOR), and implied probabilities
above 1 are clipped down (flooring odds at 1.0). Both bounds are
configurable per call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .metrics import LengthMismatch

PROB_FLOOR = 1e-4  # default epsilon: odds cap at 10000.0

# class code -> 1x2 symbol (1 = home win, X = draw, 2 = away win)
OUTCOME_SYMBOL = {1: "1", 0: "X", 2: "2"}
SYMBOL_CLASS = {v: k for k, v in OUTCOME_SYMBOL.items()}


class NonPositiveAfterClip(ValueError):
    pass


class OddsBelowOne(ValueError):
    pass


class InvalidProbTriple(ValueError):
    pass


@dataclass(frozen=True)
class ProbTriple:
    """Class probabilities in result-code order: draw (0), home (1), away (2)."""

    p_draw: float
    p_home: float
    p_away: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_draw, self.p_home, self.p_away)

    def by_class(self, cls: int) -> float:
        return self.as_tuple()[cls]

    def validate(self, tol: float = 1e-9) -> "ProbTriple":
        vals = self.as_tuple()
        if any(not math.isfinite(v) or v < 0.0 or v > 1.0 for v in vals):
            raise InvalidProbTriple(f"components outside [0, 1]: {vals}")
        if abs(sum(vals) - 1.0) > tol:
            raise InvalidProbTriple(f"components sum to {sum(vals)!r}, expected 1")
        return self


@dataclass(frozen=True)
class Margin:
    """Overround m >= 0 (0.05 = a 5% book)."""

    m: float

    def __post_init__(self):
        if not (0.0 <= self.m < 1.0) or not math.isfinite(self.m):
            raise ValueError(f"margin must be in [0, 1), got {self.m!r}")


@dataclass(frozen=True)
class OddsTriple:
    """Decimal 1x2 odds: home ("1"), draw ("X"), away ("2")."""

    home: float
    draw: float
    away: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.home, self.draw, self.away)

    def by_class(self, cls: int) -> float:
        return {1: self.home, 0: self.draw, 2: self.away}[cls]

    def overround(self) -> float:
        """Sum of implied probabilities minus 1."""
        return sum(1.0 / o for o in self.as_tuple()) - 1.0


def prob_to_odds(p: float, eps: float = PROB_FLOOR) -> float:
    """Decimal odds 1/p, with p clipped up to eps. Rejects p <= 0 outright."""
    if not math.isfinite(p) or p <= 0.0:
        raise NonPositiveAfterClip(f"probability must be positive, got {p!r}")
    if p > 1.0:
        raise InvalidProbTriple(f"probability above 1: {p!r}")
    return 1.0 / max(p, eps)


def implied_prob(odds: float) -> float:
    """Probability encoded by a decimal price: 1/odds."""
    if not math.isfinite(odds) or odds < 1.0:
        raise OddsBelowOne(f"decimal odds must be >= 1, got {odds!r}")
    return 1.0 / odds


def make_book(probs: ProbTriple, margin: Margin, eps: float = PROB_FLOOR) -> OddsTriple:
    """Quote a 1x2 book: odds_i = 1 / clip(p_i * (1 + m), eps, 1).

    Pre-clipping the implied probabilities sum to exactly 1 + m; clipping
    floors each leg's odds at 1.0 and caps them at 1/eps.
    """
    probs.validate()
    scale = 1.0 + margin.m

    def leg(p: float) -> float:
        return 1.0 / min(max(p * scale, eps), 1.0)

    return OddsTriple(home=leg(probs.p_home), draw=leg(probs.p_draw), away=leg(probs.p_away))


@dataclass(frozen=True)
class FlatStakeArgmax:
    """Bet a fixed stake on the model's most probable outcome every fixture."""

    stake: float = 1.0

    def __post_init__(self):
        if not (self.stake > 0.0):
            raise ValueError(f"stake must be positive, got {self.stake!r}")


@dataclass(frozen=True)
class ClassOutcome:
    bets: int
    wins: int
    losses: int
    staked: float
    returned: float


@dataclass(frozen=True)
class BacktestReport:
    n_bets: int
    staked: float
    returned: float
    roi: float
    per_class: dict[int, ClassOutcome]

    def to_dict(self) -> dict:
        return {
            "n_bets": self.n_bets,
            "staked": self.staked,
            "returned": self.returned,
            "roi": self.roi,
            "per_class": {
                str(c): {
                    "bets": o.bets,
                    "wins": o.wins,
                    "losses": o.losses,
                    "staked": o.staked,
                    "returned": o.returned,
                }
                for c, o in self.per_class.items()
            },
        }


def backtest(
    model_probs: list[ProbTriple],
    actuals: list[int],
    book: list[OddsTriple],
    strategy: FlatStakeArgmax = FlatStakeArgmax(),
) -> BacktestReport:
    """Replay fixtures betting flat stakes on each argmax class.

    Ties in the probability triple go to the lowest class code. A win
    returns stake * odds for the backed outcome; a loss returns 0.
    """
    if not (len(model_probs) == len(actuals) == len(book)):
        raise LengthMismatch(
            f"probs/actuals/book lengths differ: "
            f"{len(model_probs)}/{len(actuals)}/{len(book)}"
        )

    stake = strategy.stake
    staked = 0.0
    returned = 0.0
    tally = {c: [0, 0, 0, 0.0, 0.0] for c in (0, 1, 2)}  # bets, wins, losses, staked, returned

    for probs, actual, odds in zip(model_probs, actuals, book):
        by_class = [(probs.by_class(c), c) for c in (0, 1, 2)]
        pick = max(by_class, key=lambda t: (t[0], -t[1]))[1]
        price = odds.by_class(pick)
        payout = stake * price if pick == actual else 0.0
        staked += stake
        returned += payout
        row = tally[pick]
        row[0] += 1
        row[1] += int(pick == actual)
        row[2] += int(pick != actual)
        row[3] += stake
        row[4] += payout

    return BacktestReport(
        n_bets=len(model_probs),
        staked=staked,
        returned=returned,
        roi=(returned - staked) / staked if staked > 0 else 0.0,
        per_class={c: ClassOutcome(*t) for c, t in tally.items()},
    )
