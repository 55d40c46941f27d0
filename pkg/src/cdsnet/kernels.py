"""Closed-form per-channel loss means and variances.

All quantities are functions of the default-fraction history ``m[s][tau]``
alone.  Six channels exist: direct exposures (d), unhedged loans (u), hedged
loans seen by the protection buyer (hb) and seller (hs), and speculative CDS
seen by buyer (sb) and seller (ss).

Two flavours of the CDS-channel means are provided:

* conditional on the owning node being alive at ``t`` -- these drive the
  macroscopic default dynamics (the step map needs the loss statistics of a
  surviving node);
* unconditional -- these are what the sector-wide average loss per node
  aggregates to, and are used for loss reporting.  Only in the unconditional
  form are intra-sector CDS exactly zero-sum.

Everything is vectorized: the history array may carry arbitrary leading axes
(e.g. a whole grid of macro-factor values), with sector and time as the two
trailing axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenarios import ScenarioSpec, Sector

CHANNELS = ("d", "u", "hb", "hs", "sb", "ss")


class DefaultHistory:
    """Per-sector default fractions ``m[..., sector, tau]`` for tau = 0..t.

    Values lie in [0, 1] and are non-decreasing in time (defaults are
    absorbing); ``m[..., 0] = 0``.
    """

    def __init__(self, m, validate=True):
        m = np.asarray(m, dtype=float)
        if m.ndim < 2 or m.shape[-2] != 3:
            raise ValueError("history must have shape (..., 3 sectors, t+1)")
        if validate:
            if np.any(m < -1e-12) or np.any(m > 1 + 1e-12):
                raise ValueError("default fractions must lie in [0, 1]")
            if np.any(np.diff(m, axis=-1) < -1e-12):
                raise ValueError("default fractions must be non-decreasing in time")
            if np.any(np.abs(m[..., 0]) > 1e-12):
                raise ValueError("history must start from m = 0")
        self.m = m

    @property
    def horizon(self):
        return self.m.shape[-1] - 1

    def sector(self, s: Sector):
        return self.m[..., int(s), :]


@dataclass
class ChannelMoments:
    """Mean and variance of one loss channel at time t (arrays broadcast over xi0)."""

    mean: np.ndarray
    var: np.ndarray
    channel: str
    t: int


def _as_history_array(history):
    if isinstance(history, DefaultHistory):
        return history.m
    return np.asarray(history, dtype=float)


def _growth(eps, t):
    # (1+eps)^(tau-1) for tau = 1..t
    return (1.0 + eps) ** np.arange(t)


# ---------------------------------------------------------------------------
# Per-contract channel terms (unit mean/sd); summed over sector targets by the
# public operations below.  mr / mv / ms are single-sector time series
# m[..., 0..t] for reference entity, CDS counterparty and owning node.
# ---------------------------------------------------------------------------

def _direct_terms(mr, t):
    mean = mr[..., t]
    var = mr[..., t]
    return mean, var


def _unhedged_terms(mr, eps, t):
    g = _growth(eps, t)
    alive = 1.0 - mr[..., 1:t + 1]
    late = mr[..., t, None] - mr[..., 1:t + 1]
    mean = mr[..., t] - eps * np.sum(g * alive, axis=-1)
    var = (mr[..., t]
           + eps * np.sum(g * (g + g * (1.0 + eps) - 2.0) * alive, axis=-1)
           - 2.0 * eps * np.sum(g * late, axis=-1))
    return mean, var


def _fee_fee(alive_rv, f0, f2, t):
    tau = np.arange(1, t + 1)
    return np.sum((f0 * f0 * (2 * tau - 1) + f2) * alive_rv, axis=-1)


def _hedged_buyer_terms(mr, mv, eps, f0, f2, t):
    g = _growth(eps, t)
    tau = np.arange(1, t + 1)
    dmr = np.diff(mr[..., :t + 1], axis=-1)
    alive_r = 1.0 - mr[..., 1:t + 1]
    alive_v = 1.0 - mv[..., 1:t + 1]
    mv_now = mv[..., 1:t + 1]
    # cumulative sums over tau' = 1..tau
    cs_v = np.cumsum(mv_now, axis=-1)
    cs_alive_v = tau - cs_v

    mean = np.sum(dmr * mv_now + f0 * alive_r * alive_v - eps * g * alive_r, axis=-1)

    var = np.sum(
        dmr * mv_now
        + (f0 * f0 * (2 * tau - 1) + f2) * alive_r * alive_v
        + eps * g * (g + g * (1.0 + eps) - 2.0) * alive_r
        + 2.0 * f0 * dmr * (tau * mv_now - cs_v)
        - 2.0 * (g - 1.0) * dmr * mv_now
        - 2.0 * f0 * ((g - 1.0) * alive_r * alive_v + eps * g * alive_r * cs_alive_v),
        axis=-1,
    )
    return mean, var


def _hedged_seller_terms(mr, mv, f0, f2, t):
    tau = np.arange(1, t + 1)
    dmr = np.diff(mr[..., :t + 1], axis=-1)
    alive_r = 1.0 - mr[..., 1:t + 1]
    alive_v = 1.0 - mv[..., 1:t + 1]
    # sum over tau' = 1..tau-1 of (1 - m_v,tau')
    cs_alive_v_prev = np.concatenate(
        [np.zeros(alive_v.shape[:-1] + (1,)), np.cumsum(alive_v, axis=-1)[..., :-1]], axis=-1)

    mean = mr[..., t] - f0 * np.sum(alive_r * alive_v, axis=-1)
    var = (mr[..., t]
           + _fee_fee(alive_r * alive_v, f0, f2, t)
           - 2.0 * f0 * np.sum(dmr * cs_alive_v_prev, axis=-1))
    return mean, var


def _spec_buyer_terms(mr, mv, f0, f2, t):
    tau = np.arange(1, t + 1)
    dmr = np.diff(mr[..., :t + 1], axis=-1)
    alive_r = 1.0 - mr[..., 1:t + 1]
    alive_v = 1.0 - mv[..., 1:t + 1]

    mean = -np.sum(dmr * alive_v - f0 * alive_r * alive_v, axis=-1)
    var = np.sum(
        dmr * alive_v
        + (f0 * f0 * (2 * tau - 1) + f2) * alive_r * alive_v
        - 2.0 * f0 * dmr * alive_v * (tau - 1),
        axis=-1,
    )
    return mean, var


def _spec_seller_terms(mr, mv, f0, f2, t):
    dmr = np.diff(mr[..., :t + 1], axis=-1)
    alive_r = 1.0 - mr[..., 1:t + 1]
    alive_v = 1.0 - mv[..., 1:t + 1]
    late_r = mr[..., t, None] - mr[..., 1:t + 1]

    mean = mr[..., t] - f0 * np.sum(alive_r * alive_v, axis=-1)
    var = (mr[..., t]
           + _fee_fee(alive_r * alive_v, f0, f2, t)
           - 2.0 * f0 * np.sum(late_r * alive_v, axis=-1))
    return mean, var


# unconditional means (owning node's survival not conditioned away); these are
# what the sector-wide average loss per node equals.

def _hedged_buyer_mean_unc(ms, mr, mv, eps, f0, t):
    g = _growth(eps, t)
    dmr = np.diff(mr[..., :t + 1], axis=-1)
    alive_s = 1.0 - ms[..., 1:t + 1]
    alive_r = 1.0 - mr[..., 1:t + 1]
    alive_v = 1.0 - mv[..., 1:t + 1]
    return np.sum(dmr * mv[..., 1:t + 1] + f0 * alive_s * alive_r * alive_v
                  - eps * g * alive_r, axis=-1)


def _hedged_seller_mean_unc(ms, mr, mv, f0, t):
    dmr = np.diff(mr[..., :t + 1], axis=-1)
    alive_s = 1.0 - ms[..., 1:t + 1]
    alive_r = 1.0 - mr[..., 1:t + 1]
    alive_v = 1.0 - mv[..., 1:t + 1]
    return np.sum(dmr * alive_s - f0 * alive_s * alive_r * alive_v, axis=-1)


def _spec_buyer_mean_unc(ms, mr, mv, f0, t):
    dmr = np.diff(mr[..., :t + 1], axis=-1)
    alive_s = 1.0 - ms[..., 1:t + 1]
    alive_r = 1.0 - mr[..., 1:t + 1]
    alive_v = 1.0 - mv[..., 1:t + 1]
    return -np.sum(dmr * alive_v - f0 * alive_s * alive_r * alive_v, axis=-1)


def _spec_seller_mean_unc(ms, mr, mv, f0, t):
    dmr = np.diff(mr[..., :t + 1], axis=-1)
    alive_s = 1.0 - ms[..., 1:t + 1]
    alive_r = 1.0 - mr[..., 1:t + 1]
    alive_v = 1.0 - mv[..., 1:t + 1]
    return np.sum(dmr * alive_s - f0 * alive_s * alive_r * alive_v, axis=-1)


# ---------------------------------------------------------------------------
# Public channel operations
# ---------------------------------------------------------------------------

def direct_moments(history, stats, t) -> ChannelMoments:
    """Direct-exposure losses: sums J-bar * m and J^2 * m over target sectors."""
    m = _as_history_array(history)
    mean = 0.0
    var = 0.0
    for p in stats:
        cm, cv = _direct_terms(m[..., int(p.target), :], t)
        mean = mean + p.mean * cm
        var = var + p.sd ** 2 * cv
    return ChannelMoments(mean, var, "d", t)


def unhedged_moments(history, stats, interest, t) -> ChannelMoments:
    """Unhedged-loan losses: contagion minus accrued interest income."""
    m = _as_history_array(history)
    mean = 0.0
    var = 0.0
    for p in stats:
        cm, cv = _unhedged_terms(m[..., int(p.target), :], interest, t)
        mean = mean + p.mean * cm
        var = var + p.sd ** 2 * cv
    return ChannelMoments(mean, var, "u", t)


def hedged_buyer_moments(history, triple_stats, interest, f0, f2, t) -> ChannelMoments:
    """Hedged-loan losses from the protection buyer's side, conditioned alive."""
    m = _as_history_array(history)
    mean = 0.0
    var = 0.0
    for tr in triple_stats:
        cm, cv = _hedged_buyer_terms(
            m[..., int(tr.reference), :], m[..., int(tr.seller), :], interest, f0, f2, t)
        mean = mean + tr.mean * cm
        var = var + tr.sd ** 2 * cv
    return ChannelMoments(mean, var, "hb", t)


def hedged_seller_moments(history, triple_stats, f0, f2, t) -> ChannelMoments:
    """Hedged-loan losses from the protection seller's side, conditioned alive."""
    m = _as_history_array(history)
    mean = 0.0
    var = 0.0
    for tr in triple_stats:
        cm, cv = _hedged_seller_terms(
            m[..., int(tr.reference), :], m[..., int(tr.buyer), :], f0, f2, t)
        mean = mean + tr.mean * cm
        var = var + tr.sd ** 2 * cv
    return ChannelMoments(mean, var, "hs", t)


def spec_buyer_moments(history, triple_stats, f0, f2, t) -> ChannelMoments:
    """Speculative protection buying, conditioned alive; payouts are income."""
    m = _as_history_array(history)
    mean = 0.0
    var = 0.0
    for tr in triple_stats:
        cm, cv = _spec_buyer_terms(
            m[..., int(tr.reference), :], m[..., int(tr.seller), :], f0, f2, t)
        mean = mean + tr.mean * cm
        var = var + tr.sd ** 2 * cv
    return ChannelMoments(mean, var, "sb", t)


def spec_seller_moments(history, triple_stats, f0, f2, t) -> ChannelMoments:
    """Speculative protection selling, conditioned alive."""
    m = _as_history_array(history)
    mean = 0.0
    var = 0.0
    for tr in triple_stats:
        cm, cv = _spec_seller_terms(
            m[..., int(tr.reference), :], m[..., int(tr.buyer), :], f0, f2, t)
        mean = mean + tr.mean * cm
        var = var + tr.sd ** 2 * cv
    return ChannelMoments(mean, var, "ss", t)


def total_moments(spec: ScenarioSpec, history, sector: Sector, t):
    """Total (mean, variance) of sector losses at time t, conditioned alive.

    Channels draw disjoint counterparty sets, so variances add.  This is the
    input to the macroscopic step map.
    """
    m = _as_history_array(history)
    f0 = spec.money.fee_mean
    f2 = spec.money.fee_var
    mean = np.zeros(m.shape[:-2])
    var = np.zeros(m.shape[:-2])

    ch = direct_moments(m, spec.pairs_from(sector, "d"), t)
    mean = mean + ch.mean
    var = var + ch.var
    for p in spec.pairs_from(sector, "u"):
        ch = unhedged_moments(m, [p], spec.money.interest(sector, p.target), t)
        mean = mean + ch.mean
        var = var + ch.var
    for tr in spec.triples_bought_by(sector, "hedge"):
        ch = hedged_buyer_moments(m, [tr], spec.money.interest(sector, tr.reference), f0, f2, t)
        mean = mean + ch.mean
        var = var + ch.var
    ch = hedged_seller_moments(m, spec.triples_sold_by(sector, "hedge"), f0, f2, t)
    mean = mean + ch.mean
    var = var + ch.var
    ch = spec_buyer_moments(m, spec.triples_bought_by(sector, "spec"), f0, f2, t)
    mean = mean + ch.mean
    var = var + ch.var
    ch = spec_seller_moments(m, spec.triples_sold_by(sector, "spec"), f0, f2, t)
    mean = mean + ch.mean
    var = var + ch.var
    return mean, var


def reported_mean(spec: ScenarioSpec, history, sector: Sector, t):
    """Sector-wide average loss per node at time t (unconditional means).

    This is the loss actually carried by the sector: CDS money-streams between
    counterparties inside one sector cancel exactly here, which makes
    intra-sector hedging and speculation zero-sum at the loss level.
    """
    m = _as_history_array(history)
    f0 = spec.money.fee_mean
    ms = m[..., int(sector), :]
    mean = np.zeros(m.shape[:-2])

    mean = mean + direct_moments(m, spec.pairs_from(sector, "d"), t).mean
    for p in spec.pairs_from(sector, "u"):
        mean = mean + unhedged_moments(m, [p], spec.money.interest(sector, p.target), t).mean
    for tr in spec.triples_bought_by(sector, "hedge"):
        eps = spec.money.interest(sector, tr.reference)
        mean = mean + tr.mean * _hedged_buyer_mean_unc(
            ms, m[..., int(tr.reference), :], m[..., int(tr.seller), :], eps, f0, t)
    for tr in spec.triples_sold_by(sector, "hedge"):
        mean = mean + tr.mean * _hedged_seller_mean_unc(
            ms, m[..., int(tr.reference), :], m[..., int(tr.buyer), :], f0, t)
    for tr in spec.triples_bought_by(sector, "spec"):
        mean = mean + tr.mean * _spec_buyer_mean_unc(
            ms, m[..., int(tr.reference), :], m[..., int(tr.seller), :], f0, t)
    for tr in spec.triples_sold_by(sector, "spec"):
        mean = mean + tr.mean * _spec_seller_mean_unc(
            ms, m[..., int(tr.reference), :], m[..., int(tr.buyer), :], f0, t)
    return mean
