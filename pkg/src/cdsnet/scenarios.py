"""Scenario parameterizations: types, validation, JSON round-trip, built-in catalog.

A scenario bundles everything needed to run the macroscopic solver or the
microscopic Monte Carlo oracle: per-channel exposure statistics between
sectors, CDS triple statistics, noise and heterogeneity settings, and the
interest/fee money streams.  Instances are immutable; all invariants are
checked at construction time.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace

from .errors import DomainError, NotFound, ParseError, ValidationError

HORIZON_MONTHS = 12

PAIR_CHANNELS = ("d", "u")
TRIPLE_KINDS = ("hedge", "spec")


class Sector(enum.IntEnum):
    """The three sectors: firms, banks, insurers."""

    F = 0
    B = 1
    I = 2

    @classmethod
    def parse(cls, token):
        try:
            return cls[token]
        except KeyError:
            raise ValidationError(f"unknown sector {token!r}; expected one of F, B, I")


SECTORS = (Sector.F, Sector.B, Sector.I)


@dataclass(frozen=True)
class PairExposureStats:
    """Mean/sd of pairwise exposures of ``source``-sector nodes to ``target``."""

    channel: str  # "d" (direct) or "u" (unhedged loan)
    source: Sector
    target: Sector
    mean: float
    sd: float
    kappa: float = 0.0  # forward-backward correlation; micro oracle only

    def __post_init__(self):
        if self.channel not in PAIR_CHANNELS:
            raise ValidationError(f"pair channel must be one of {PAIR_CHANNELS}, got {self.channel!r}")
        if self.sd < 0:
            raise ValidationError(f"pair sd_exposure must be >= 0, got {self.sd}")
        if not -1.0 <= self.kappa <= 1.0:
            raise ValidationError(f"kappa must lie in [-1, 1], got {self.kappa}")


@dataclass(frozen=True)
class TripleExposureStats:
    """Mean/sd of CDS exposures, stated from the protection buyer's perspective."""

    kind: str  # "hedge" or "spec"
    buyer: Sector
    reference: Sector
    seller: Sector
    mean: float
    sd: float

    def __post_init__(self):
        if self.kind not in TRIPLE_KINDS:
            raise ValidationError(f"triple kind must be one of {TRIPLE_KINDS}, got {self.kind!r}")
        if self.sd < 0:
            raise ValidationError(f"triple sd_exposure must be >= 0, got {self.sd}")


@dataclass(frozen=True)
class NoiseSpec:
    """Wealth-noise model: shared macro factor plus idiosyncratic term."""

    sigma: float = 1.0
    xi0_policy: str = "constant"  # macro factor held fixed over the year
    rho_rule: str = "basel2"  # map from annual PD to noise correlation

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValidationError(f"noise sigma must be > 0, got {self.sigma}")
        if self.xi0_policy != "constant":
            raise ValidationError(f"unsupported xi0_policy {self.xi0_policy!r}")
        if self.rho_rule != "basel2":
            raise ValidationError(f"unsupported rho_rule {self.rho_rule!r}")


@dataclass(frozen=True)
class HeterogeneitySpec:
    """Initial-wealth heterogeneity: Gaussian per sector, shared spread."""

    theta_mean: tuple = (2.75, 3.25, 3.75)  # indexed by Sector (F, B, I)
    theta_sd: float = 0.35
    quadrature_nodes: int = 64

    def __post_init__(self):
        if len(self.theta_mean) != 3:
            raise ValidationError("theta_mean must provide one value per sector")
        if self.theta_sd <= 0:
            raise ValidationError(f"theta_sd must be > 0, got {self.theta_sd}")
        if self.quadrature_nodes < 16:
            raise ValidationError(f"quadrature_nodes must be >= 16, got {self.quadrature_nodes}")


@dataclass(frozen=True)
class MoneyStreamSpec:
    """Interest and CDS-fee money streams (fractions of notional per month)."""

    monthly_interest: float = 0.005
    fee_mean: float = 0.0008
    fee_var: float = 0.0002
    # optional per sector-pair interest overrides, keyed "BF", "BB", ...
    interest_overrides: tuple = ()

    def __post_init__(self):
        if self.monthly_interest < 0:
            raise ValidationError(f"monthly_interest must be >= 0, got {self.monthly_interest}")
        if self.fee_var < 0:
            raise ValidationError(f"fee_var must be >= 0, got {self.fee_var}")
        for key, rate in self.interest_overrides:
            if len(key) != 2 or any(c not in "FBI" for c in key):
                raise ValidationError(f"interest override key {key!r} is not a sector pair")
            if rate < 0:
                raise ValidationError(f"interest override {key} must be >= 0, got {rate}")

    def interest(self, lender: Sector, borrower: Sector) -> float:
        key = lender.name + borrower.name
        for k, rate in self.interest_overrides:
            if k == key:
                return rate
        return self.monthly_interest


@dataclass(frozen=True)
class ScenarioSpec:
    """Complete parameterization of one scenario."""

    name: str
    pair_stats: tuple = ()
    triple_stats: tuple = ()
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    heterogeneity: HeterogeneitySpec = field(default_factory=HeterogeneitySpec)
    money: MoneyStreamSpec = field(default_factory=MoneyStreamSpec)
    horizon: int = HORIZON_MONTHS

    def __post_init__(self):
        object.__setattr__(self, "pair_stats", tuple(self.pair_stats))
        object.__setattr__(self, "triple_stats", tuple(self.triple_stats))
        if self.horizon < 1:
            raise ValidationError(f"horizon must be >= 1, got {self.horizon}")

    # -- channel accessors used by the loss kernels ------------------------

    def pairs_from(self, source: Sector, channel: str | None = None):
        return tuple(
            p for p in self.pair_stats
            if p.source == source and (channel is None or p.channel == channel)
        )

    def triples_bought_by(self, buyer: Sector, kind: str | None = None):
        return tuple(
            t for t in self.triple_stats
            if t.buyer == buyer and (kind is None or t.kind == kind)
        )

    def triples_sold_by(self, seller: Sector, kind: str | None = None):
        return tuple(
            t for t in self.triple_stats
            if t.seller == seller and (kind is None or t.kind == kind)
        )


# ---------------------------------------------------------------------------
# Built-in catalog
# ---------------------------------------------------------------------------

def _pair(channel, src, dst, mean, sd):
    return PairExposureStats(channel, Sector[src], Sector[dst], mean, sd)


def _triple(kind, buyer, ref, seller, mean, sd):
    return TripleExposureStats(kind, Sector[buyer], Sector[ref], Sector[seller], mean, sd)


_DIRECT_FF = _pair("d", "F", "F", 1.0, 1.0)
_DIRECT_BB = _pair("d", "B", "B", 0.0, 0.5)
_DIRECT_BB_TILDE = _pair("d", "B", "B", 0.25, 0.5)
_BASELINE_LOAN = (1.0, 0.5)  # unhedged B->F exposure statistics


def _scenario(name, pairs, triples=()):
    return ScenarioSpec(name=name, pair_stats=tuple(pairs), triple_stats=tuple(triples))


def _hedged_split(name, f_h, seller):
    """Unhedged B->F baseline exposure split into hedged/unhedged components.

    Catalog entries S3-S6 quote rounded values; they are generated here as
    exact fractions of the baseline statistics so that total notional is
    conserved along the hedging sweep.
    """
    jm, js = _BASELINE_LOAN
    pairs = [_DIRECT_FF, _DIRECT_BB, _pair("u", "B", "F", (1 - f_h) * jm, (1 - f_h) * js)]
    triples = [_triple("hedge", "B", "F", seller, f_h * jm, f_h * js)]
    return _scenario(name, pairs, triples)


def _build_catalog():
    base_pairs = [_DIRECT_FF, _DIRECT_BB, _pair("u", "B", "F", *_BASELINE_LOAN)]
    tilde_pairs = [_DIRECT_FF, _DIRECT_BB_TILDE, _pair("u", "B", "F", *_BASELINE_LOAN)]
    catalog = {
        "S0": _scenario("S0", base_pairs),
        "S1": _scenario("S1", [_DIRECT_FF, _DIRECT_BB, _pair("u", "B", "F", 2.0, 1.0)]),
        "S2": _scenario("S2", base_pairs + [_pair("u", "B", "B", 1.0, 0.5)]),
        "S3": _hedged_split("S3", 1 / 3, "B"),
        "S4": _hedged_split("S4", 2 / 3, "B"),
        "S5": _hedged_split("S5", 1 / 3, "I"),
        "S6": _hedged_split("S6", 2 / 3, "I"),
        "S7": _scenario(
            "S7",
            [_DIRECT_FF, _DIRECT_BB, _pair("u", "B", "F", 0.0, 0.0)],
            [_triple("hedge", "B", "F", "B", 0.5, 0.25), _triple("hedge", "B", "F", "I", 1.5, 0.75)],
        ),
        "S8": _scenario(
            "S8",
            [_DIRECT_FF, _DIRECT_BB, _pair("u", "B", "F", 0.0, 0.0)],
            [_triple("hedge", "B", "F", "B", 0.5, 0.25), _triple("hedge", "B", "F", "I", 2.5, 1.25)],
        ),
        "S9": _scenario("S9", base_pairs, [_triple("spec", "B", "F", "B", 1.0, 0.5)]),
        "S10": _scenario("S10", base_pairs, [_triple("spec", "B", "F", "B", 2.0, 1.0)]),
        "S11": _scenario(
            "S11", base_pairs,
            [_triple("spec", "B", "F", "B", 0.25, 0.125), _triple("spec", "B", "F", "I", 0.25, 0.125)],
        ),
        "S12": _scenario(
            "S12", base_pairs,
            [_triple("spec", "B", "F", "B", 0.5, 0.25), _triple("spec", "B", "F", "I", 0.5, 0.25)],
        ),
        "S~0": _scenario("S~0", tilde_pairs),
        "S~9": _scenario("S~9", tilde_pairs, [_triple("spec", "B", "F", "B", 1.0, 0.5)]),
        "S~10": _scenario("S~10", tilde_pairs, [_triple("spec", "B", "F", "B", 2.0, 1.0)]),
    }
    return catalog


_CATALOG = _build_catalog()


def _canonical_name(name):
    # accept the combining-tilde spelling of the modified scenarios
    return name.replace("̃", "~").replace("S~", "S~")


def scenario_names():
    """Names of the 16 built-in scenarios, in catalog order."""
    return tuple(_CATALOG)


def builtin_scenario(name: str) -> ScenarioSpec:
    """Look up one of the built-in scenarios S0-S12, S~0, S~9, S~10."""
    key = _canonical_name(name)
    try:
        return _CATALOG[key]
    except KeyError:
        raise NotFound(f"unknown scenario {name!r}; known: {', '.join(_CATALOG)}")


# ---------------------------------------------------------------------------
# Scenario transformations
# ---------------------------------------------------------------------------

def hedge_sweep(base: ScenarioSpec, f_h: float, counterparty: Sector) -> ScenarioSpec:
    """Hedge a fraction ``f_h`` of the unhedged B->F exposure via CDS.

    The unhedged channel keeps ``(1-f_h)`` of mean and sd; a hedge triple
    (buyer B, reference F, seller ``counterparty``) receives the remaining
    fraction.  Mean and sd both scale linearly, so total notional statistics
    are conserved for every ``f_h``.
    """
    if not 0.0 <= f_h <= 1.0:
        raise DomainError(f"hedged fraction must lie in [0, 1], got {f_h}")
    if f_h == 0.0:
        return base
    loans = [p for p in base.pair_stats if p.channel == "u" and p.source == Sector.B and p.target == Sector.F]
    if not loans:
        raise ValidationError("base scenario has no unhedged B->F channel to hedge")
    loan = loans[0]
    pairs = tuple(
        replace(p, mean=(1 - f_h) * p.mean, sd=(1 - f_h) * p.sd) if p is loan else p
        for p in base.pair_stats
    )
    triples = base.triple_stats + (
        TripleExposureStats("hedge", Sector.B, Sector.F, counterparty, f_h * loan.mean, f_h * loan.sd),
    )
    return replace(base, pair_stats=pairs, triple_stats=triples)


def with_speculative(base: ScenarioSpec, volume: float, counterparty: Sector = Sector.B) -> ScenarioSpec:
    """Add speculative CDS on firms of ``volume`` times the baseline loan statistics."""
    if volume < 0:
        raise DomainError(f"speculative volume must be >= 0, got {volume}")
    if volume == 0.0:
        return base
    jm, js = _BASELINE_LOAN
    triples = base.triple_stats + (
        TripleExposureStats("spec", Sector.B, Sector.F, counterparty, volume * jm, volume * js),
    )
    return replace(base, triple_stats=triples)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

def serialize_scenario(spec: ScenarioSpec) -> str:
    """Serialize to the JSON document format accepted by :func:`parse_scenario`."""
    doc = {
        "name": spec.name,
        "pair_stats": [
            {"channel": p.channel, "from": p.source.name, "to": p.target.name,
             "mean": p.mean, "sd": p.sd, "kappa": p.kappa}
            for p in spec.pair_stats
        ],
        "triple_stats": [
            {"kind": t.kind, "buyer": t.buyer.name, "reference": t.reference.name,
             "seller": t.seller.name, "mean": t.mean, "sd": t.sd}
            for t in spec.triple_stats
        ],
        "noise": {"sigma": spec.noise.sigma, "xi0_policy": spec.noise.xi0_policy,
                  "rho_rule": spec.noise.rho_rule},
        "heterogeneity": {
            "theta_mean": {s.name: spec.heterogeneity.theta_mean[s] for s in SECTORS},
            "theta_sd": spec.heterogeneity.theta_sd,
            "quadrature_nodes": spec.heterogeneity.quadrature_nodes,
        },
        "money": {
            "monthly_interest": spec.money.monthly_interest,
            "fee_mean": spec.money.fee_mean,
            "fee_var": spec.money.fee_var,
            "interest_overrides": {k: v for k, v in spec.money.interest_overrides},
        },
        "horizon": spec.horizon,
    }
    return json.dumps(doc, indent=2)


def _require(mapping, key, types, path):
    if key not in mapping:
        raise ParseError(f"{path}.{key}" if path else key, "missing required field")
    value = mapping[key]
    if not isinstance(value, types) or isinstance(value, bool):
        raise ParseError(f"{path}.{key}" if path else key,
                         f"expected {types if not isinstance(types, tuple) else '/'.join(t.__name__ for t in types)}, "
                         f"got {type(value).__name__}")
    return value


def _sector_at(mapping, key, path):
    token = _require(mapping, key, str, path)
    try:
        return Sector[token]
    except KeyError:
        raise ParseError(f"{path}.{key}", f"unknown sector {token!r}")


def parse_scenario(document) -> ScenarioSpec:
    """Parse a scenario document (JSON text or an already-decoded mapping).

    Raises :class:`ParseError` with a field path on schema violations, and
    :class:`ValidationError` when values violate model invariants.
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError("$", f"invalid JSON: {exc}")
    else:
        doc = document
    if not isinstance(doc, dict):
        raise ParseError("$", "top-level document must be an object")

    name = _require(doc, "name", str, "")
    num = (int, float)

    pairs = []
    for idx, entry in enumerate(_require(doc, "pair_stats", list, "")):
        path = f"pair_stats[{idx}]"
        if not isinstance(entry, dict):
            raise ParseError(path, "expected an object")
        channel = _require(entry, "channel", str, path)
        if channel not in PAIR_CHANNELS:
            raise ParseError(f"{path}.channel", f"must be one of {PAIR_CHANNELS}")
        pairs.append(PairExposureStats(
            channel=channel,
            source=_sector_at(entry, "from", path),
            target=_sector_at(entry, "to", path),
            mean=float(_require(entry, "mean", num, path)),
            sd=float(_require(entry, "sd", num, path)),
            kappa=float(entry.get("kappa", 0.0)),
        ))

    triples = []
    for idx, entry in enumerate(_require(doc, "triple_stats", list, "")):
        path = f"triple_stats[{idx}]"
        if not isinstance(entry, dict):
            raise ParseError(path, "expected an object")
        kind = _require(entry, "kind", str, path)
        if kind not in TRIPLE_KINDS:
            raise ParseError(f"{path}.kind", f"must be one of {TRIPLE_KINDS}")
        triples.append(TripleExposureStats(
            kind=kind,
            buyer=_sector_at(entry, "buyer", path),
            reference=_sector_at(entry, "reference", path),
            seller=_sector_at(entry, "seller", path),
            mean=float(_require(entry, "mean", num, path)),
            sd=float(_require(entry, "sd", num, path)),
        ))

    noise_doc = doc.get("noise", {})
    if not isinstance(noise_doc, dict):
        raise ParseError("noise", "expected an object")
    noise = NoiseSpec(
        sigma=float(noise_doc.get("sigma", 1.0)),
        xi0_policy=noise_doc.get("xi0_policy", "constant"),
        rho_rule=noise_doc.get("rho_rule", "basel2"),
    )

    het_doc = doc.get("heterogeneity", {})
    if not isinstance(het_doc, dict):
        raise ParseError("heterogeneity", "expected an object")
    theta_doc = het_doc.get("theta_mean", {"F": 2.75, "B": 3.25, "I": 3.75})
    if not isinstance(theta_doc, dict) or set(theta_doc) != {"F", "B", "I"}:
        raise ParseError("heterogeneity.theta_mean", "expected values for sectors F, B, I")
    het = HeterogeneitySpec(
        theta_mean=tuple(float(theta_doc[s.name]) for s in SECTORS),
        theta_sd=float(het_doc.get("theta_sd", 0.35)),
        quadrature_nodes=int(het_doc.get("quadrature_nodes", 64)),
    )

    money_doc = doc.get("money", {})
    if not isinstance(money_doc, dict):
        raise ParseError("money", "expected an object")
    overrides = money_doc.get("interest_overrides", {})
    if not isinstance(overrides, dict):
        raise ParseError("money.interest_overrides", "expected an object")
    money = MoneyStreamSpec(
        monthly_interest=float(money_doc.get("monthly_interest", 0.005)),
        fee_mean=float(money_doc.get("fee_mean", 0.0008)),
        fee_var=float(money_doc.get("fee_var", 0.0002)),
        interest_overrides=tuple(sorted((k, float(v)) for k, v in overrides.items())),
    )

    horizon = doc.get("horizon", HORIZON_MONTHS)
    if not isinstance(horizon, int) or isinstance(horizon, bool):
        raise ParseError("horizon", "expected an integer")

    return ScenarioSpec(
        name=name, pair_stats=tuple(pairs), triple_stats=tuple(triples),
        noise=noise, heterogeneity=het, money=money, horizon=horizon,
    )
