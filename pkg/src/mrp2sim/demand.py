"""Forecasts, monthly forecast-error realizations, and customer order streams.

Monthly demand is the forecast disturbed by a truncated-normal error whose
standard deviation is ``alpha`` times the forecast.  Orders arrive within the
month as a Poisson stream whose rate is the realized demand divided by the
mean order amount; amounts and required lead times are lognormal.  Every draw
consumes an explicitly derived RNG substream so results are reproducible and
independent across (replication, product, month).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CALENDAR_DAYS_PER_MONTH = 28.0

# mean/variance of the order amount per product group (even/odd ids)
ORDER_AMOUNT_MOMENTS = {0: (10.0, 2.25), 1: (15.0, 6.25)}
LEAD_TIME_MOMENTS = (3.0, 3.0)

_BASE_FORECAST = {0: 1000.0, 1: 1500.0}


def base_forecast(product: int) -> float:
    """Average pieces/month for a finished product (1000 or 1500 by id parity)."""
    return _BASE_FORECAST[product % 2]


def order_amount_moments(product: int) -> tuple[float, float]:
    return ORDER_AMOUNT_MOMENTS[product % 2]


def forecast_value(pattern: str, product: int, month: int, phase: str = "prose") -> float:
    """Forecast pieces/month for a finished product in a given month (1-based).

    The seasonal pattern is a sinusoid at +/-50% of the base value with period
    12.  The default ``prose`` phase starts at the base value in month 1,
    bottoms out in month 4 and peaks in month 10; ``table`` shifts the
    sinusoid two months earlier (trough month 2, peak month 8).
    """
    base = base_forecast(product)
    if pattern == "constant":
        return base
    if pattern != "seasonal":
        raise ValueError(f"unknown demand pattern {pattern!r}")
    anchor = 5 if phase == "table" else 7
    return base + 0.5 * base * math.sin(2.0 * math.pi * (month - anchor) / 12.0)


def annual_forecast(pattern: str, product: int, phase: str = "prose") -> float:
    return sum(forecast_value(pattern, product, t, phase) for t in range(1, 13))


# ---------------------------------------------------------------------------
# RNG substreams
# ---------------------------------------------------------------------------

# purpose tags keep the four draw kinds on disjoint substreams
_PURPOSES = {"error": 0, "arrival": 1, "amount": 2, "lead": 3}


def substream(base_seed: int, replication: int, product: int, month: int,
              purpose: str) -> np.random.Generator:
    """Derive an independent generator from (seed, replication, product, month).

    The derivation feeds the five integers into a ``SeedSequence`` entropy
    list, which is stable across process runs and versions of this package.
    """
    ss = np.random.SeedSequence(
        entropy=[int(base_seed), int(replication), int(product), int(month),
                 _PURPOSES[purpose]])
    return np.random.Generator(np.random.PCG64(ss))


# ---------------------------------------------------------------------------
# monthly realization
# ---------------------------------------------------------------------------

def draw_forecast_error(forecast: float, alpha: float, rng: np.random.Generator) -> float:
    """One truncated-normal error draw: N(0, (alpha*F)^2) truncated below at -F
    so realized demand stays non-negative.  alpha = 0 returns exactly 0."""
    if alpha <= 0.0 or forecast <= 0.0:
        return 0.0
    sd = alpha * forecast
    while True:
        eps = rng.normal(0.0, sd)
        if eps >= -forecast:
            return eps


def order_rate(demand: float, mean_amount: float) -> float:
    """Orders per month needed to realize ``demand`` pieces at the given mean
    order amount."""
    if mean_amount <= 0:
        raise ValueError("mean order amount must be positive")
    return max(0.0, demand) / mean_amount


@dataclass(frozen=True, slots=True)
class CustomerOrder:
    id: int
    product: int
    amount: int
    arrival: float      # day
    due: float          # day = arrival + required lead time

    def __post_init__(self) -> None:
        assert self.amount >= 1 and self.due >= self.arrival


def _lognormal_params(mean: float, var: float) -> tuple[float, float]:
    # moment matching: sigma^2 = ln(1 + var/mean^2), mu = ln(mean) - sigma^2/2
    sigma2 = math.log(1.0 + var / mean ** 2)
    return math.log(mean) - 0.5 * sigma2, math.sqrt(sigma2)


def generate_month_orders(product: int, month: int, rate: float, month_start: float,
                          rng_arrival: np.random.Generator,
                          rng_amount: np.random.Generator,
                          rng_lead: np.random.Generator,
                          id_start: int = 0,
                          degenerate: bool = False) -> list[CustomerOrder]:
    """Customer orders for one product-month.

    Arrivals form a Poisson process over the month's 28 calendar days (the
    rate is per month); amounts are lognormal draws rounded to integers with
    floor 1; the due date adds a lognormal required lead time in continuous
    days.  ``degenerate`` removes all randomness (evenly spaced arrivals,
    amount = E[O], lead time = E[L]) for deterministic test runs.
    """
    if rate <= 0.0:
        return []
    mean_amount, var_amount = order_amount_moments(product)
    mean_lead, var_lead = LEAD_TIME_MOMENTS

    arrivals: list[float] = []
    if degenerate:
        n = int(round(rate))
        gap = CALENDAR_DAYS_PER_MONTH / rate
        arrivals = [month_start + k * gap for k in range(n)]
    else:
        day_rate = rate / CALENDAR_DAYS_PER_MONTH
        t = month_start
        end = month_start + CALENDAR_DAYS_PER_MONTH
        while True:
            t += rng_arrival.exponential(1.0 / day_rate)
            if t >= end:
                break
            arrivals.append(t)

    orders: list[CustomerOrder] = []
    if degenerate:
        amount = max(1, int(round(mean_amount)))
        for k, arr in enumerate(arrivals):
            orders.append(CustomerOrder(id_start + k, product, amount, arr, arr + mean_lead))
        return orders

    mu_a, sd_a = _lognormal_params(mean_amount, var_amount)
    mu_l, sd_l = _lognormal_params(mean_lead, var_lead)
    for k, arr in enumerate(arrivals):
        amount = max(1, int(round(rng_amount.lognormal(mu_a, sd_a))))
        lead = rng_lead.lognormal(mu_l, sd_l)
        orders.append(CustomerOrder(id_start + k, product, amount, arr, arr + lead))
    return orders


@dataclass(frozen=True, slots=True)
class MonthRealization:
    product: int
    month: int              # 1-based absolute month
    forecast: float
    error: float
    demand: float
    rate: float


def realize_month(pattern: str, product: int, month: int, alpha: float,
                  base_seed: int, replication: int, phase: str = "prose") -> MonthRealization:
    """Draw the month's forecast error and derive demand and order rate."""
    fc = forecast_value(pattern, product, month, phase)
    rng = substream(base_seed, replication, product, month, "error")
    eps = draw_forecast_error(fc, alpha, rng)
    demand = max(0.0, fc + eps)
    mean_amount, _ = order_amount_moments(product)
    return MonthRealization(product, month, fc, eps, demand,
                            order_rate(demand, mean_amount))
