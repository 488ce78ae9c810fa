"""Exact exponent calculus for Gagliardo-Nirenberg type interpolation inequalities.

All index arithmetic uses `fractions.Fraction`; the top of the Lebesgue scale
is the distinguished value `INF`, whose reciprocal is exactly 0.  Floating
point is deliberately kept out of this module: conditions of the form
"k - j - n/r is a nonnegative integer" are not decidable in binary floats.

The central relation is the dimensional balance

    1/p = j/n + theta*(1/r - k/n) + (1 - theta)/q

which ties the intermediate-derivative norm index p to the top index r, the
low index q and the interpolation weight theta.  Everything else here
(special-case solvers, admissibility, the induction bookkeeping for chaining
inequalities, dilation deficits) is derived from it.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import total_ordering
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

from .errors import (
    AlphaOutOfRange,
    Degenerate,
    InvalidIndex,
    NegativeReciprocal,
    NoMatchingFactor,
    SelfPowerGeqOne,
)

Rational = Union[int, Fraction]


@total_ordering
class ExtReal:
    """An exact rational or +infinity.

    Finite floats are rejected on purpose: they would silently destroy the
    exactness the whole module is built on.  `float('inf')` is accepted.
    """

    __slots__ = ("_frac",)

    def __init__(self, value: Union["ExtReal", int, Fraction, str, float, None]):
        if isinstance(value, ExtReal):
            self._frac = value._frac
        elif value is None:
            self._frac = None
        elif isinstance(value, str):
            s = value.strip().lower()
            self._frac = None if s in ("inf", "infinity", "oo") else Fraction(s)
        elif isinstance(value, float):
            if math.isinf(value) and value > 0:
                self._frac = None
            else:
                raise TypeError(
                    "finite floats are not exact; pass int, Fraction or 'num/den'"
                )
        elif isinstance(value, (int, Fraction)):
            self._frac = Fraction(value)
        else:
            raise TypeError(f"cannot build ExtReal from {type(value)!r}")

    @classmethod
    def infinity(cls) -> "ExtReal":
        return cls(None)

    @classmethod
    def from_reciprocal(cls, recip: Fraction) -> "ExtReal":
        """Inverse of `.reciprocal()`; negative reciprocals are out of scale."""
        recip = Fraction(recip)
        if recip < 0:
            raise NegativeReciprocal(f"reciprocal {recip} is negative")
        if recip == 0:
            return cls(None)
        return cls(1 / recip)

    @property
    def is_infinite(self) -> bool:
        return self._frac is None

    @property
    def frac(self) -> Fraction:
        if self._frac is None:
            raise ValueError("infinite value has no finite Fraction")
        return self._frac

    def reciprocal(self) -> Fraction:
        return Fraction(0) if self._frac is None else 1 / self._frac

    def __float__(self) -> float:
        return math.inf if self._frac is None else float(self._frac)

    def __eq__(self, other) -> bool:
        if isinstance(other, ExtReal):
            return self._frac == other._frac
        if isinstance(other, (int, Fraction)):
            return self._frac is not None and self._frac == other
        if isinstance(other, float) and math.isinf(other) and other > 0:
            return self._frac is None
        return NotImplemented

    def __lt__(self, other) -> bool:
        oth = other._frac if isinstance(other, ExtReal) else other
        if isinstance(oth, float) and math.isinf(oth) and oth > 0:
            oth = None
        if self._frac is None:
            return False
        if oth is None:
            return True
        return self._frac < oth

    def __hash__(self):
        return hash(self._frac)

    def __str__(self) -> str:
        return "inf" if self._frac is None else str(self._frac)

    def __repr__(self) -> str:
        return f"ExtReal({self})"

    def to_json(self):
        return rational_to_json(self)


INF = ExtReal.infinity()


def as_extreal(x) -> ExtReal:
    return x if isinstance(x, ExtReal) else ExtReal(x)


def as_fraction(x) -> Fraction:
    """Finite exact value; raises on infinity and on finite floats."""
    if isinstance(x, ExtReal):
        return x.frac
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected exact rational, got {type(x)!r}")


def parse_rational(text: str) -> ExtReal:
    """Parse 'num/den', 'num' or 'inf' (the CLI wire format)."""
    return ExtReal(text)


def rational_to_json(x):
    """Rationals encode as {"num": int, "den": int}; infinity as "inf"."""
    if isinstance(x, ExtReal):
        if x.is_infinite:
            return "inf"
        x = x.frac
    f = Fraction(x)
    return {"num": f.numerator, "den": f.denominator}


def rational_from_json(obj) -> ExtReal:
    if obj == "inf":
        return INF
    if isinstance(obj, Mapping):
        return ExtReal(Fraction(obj["num"], obj["den"]))
    if isinstance(obj, int):
        return ExtReal(obj)
    if isinstance(obj, str):
        return ExtReal(obj)
    raise TypeError(f"cannot decode rational from {obj!r}")


class AdmissibilityReason(str, Enum):
    OK = "OK"
    THETA_OUT_OF_RANGE = "THETA_OUT_OF_RANGE"
    CRITICAL_INTEGER_CASE = "CRITICAL_INTEGER_CASE"
    P_NONPOSITIVE = "P_NONPOSITIVE"
    INDEX_OUT_OF_RANGE = "INDEX_OUT_OF_RANGE"


@dataclass(frozen=True)
class AdmissibilityVerdict:
    admissible: bool
    reason: AdmissibilityReason

    def __post_init__(self):
        if self.admissible != (self.reason == AdmissibilityReason.OK):
            raise ValueError("verdict flag inconsistent with reason")

    def __bool__(self) -> bool:
        return self.admissible


@dataclass(frozen=True)
class GNParams:
    """Full parameter tuple (n, j, k, theta, p, q, r), all exact.

    `p` does not have to satisfy the balance relation: deliberately detuned
    values are how sharpness scans probe the scaling deficit.
    """

    n: int
    j: int
    k: int
    theta: Fraction
    p: ExtReal
    q: ExtReal
    r: ExtReal

    def __post_init__(self):
        object.__setattr__(self, "theta", as_fraction(self.theta))
        for name in ("p", "q", "r"):
            object.__setattr__(self, name, as_extreal(getattr(self, name)))
        if self.n < 1:
            raise ValueError("dimension n must be >= 1")
        if not (0 <= self.j < self.k):
            raise InvalidIndex(f"need 0 <= j < k, got j={self.j}, k={self.k}")
        if not (0 <= self.theta <= 1):
            raise ValueError(f"theta={self.theta} outside [0, 1]")
        for name in ("p", "q", "r"):
            v = getattr(self, name)
            if not v.is_infinite and v.frac < 1:
                raise ValueError(f"{name}={v} below the Lebesgue scale")

    @classmethod
    def from_relation(cls, n, j, k, theta, q, r) -> "GNParams":
        theta = as_fraction(theta)
        p = solve_p(n, j, k, theta, q, r)
        return cls(n=n, j=j, k=k, theta=theta, p=p, q=as_extreal(q), r=as_extreal(r))

    def replace(self, **changes) -> "GNParams":
        return dataclasses.replace(self, **changes)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "j": self.j,
            "k": self.k,
            "theta": rational_to_json(self.theta),
            "p": rational_to_json(self.p),
            "q": rational_to_json(self.q),
            "r": rational_to_json(self.r),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "GNParams":
        theta = rational_from_json(obj["theta"])
        return cls(
            n=int(obj["n"]),
            j=int(obj["j"]),
            k=int(obj["k"]),
            theta=theta.frac,
            p=rational_from_json(obj["p"]),
            q=rational_from_json(obj["q"]),
            r=rational_from_json(obj["r"]),
        )


def solve_p(n: int, j: int, k: int, theta, q, r) -> ExtReal:
    """Solve the balance relation for p; INF when the reciprocal is exactly 0."""
    if j >= k:
        raise InvalidIndex(f"need j < k, got j={j}, k={k}")
    if n < 1:
        raise ValueError("dimension n must be >= 1")
    theta = as_fraction(theta)
    if not (0 <= theta <= 1):
        raise ValueError(f"theta={theta} outside [0, 1]")
    q, r = as_extreal(q), as_extreal(r)
    if r.is_infinite:
        raise ValueError("top index r must be finite")
    recip = (
        Fraction(j, n)
        + theta * (r.reciprocal() - Fraction(k, n))
        + (1 - theta) * q.reciprocal()
    )
    if recip < 0:
        raise NegativeReciprocal(
            f"1/p = {recip} < 0: parameters leave the Lebesgue scale"
        )
    return ExtReal.from_reciprocal(recip)


def solve_theta(n: int, j: int, k: int, p, q, r) -> Fraction:
    """Invert the balance relation for theta.

    Raises Degenerate when 1/r - k/n - 1/q = 0, in which case the relation
    is either vacuous or contradictory and carries no information on theta.
    """
    p, q, r = as_extreal(p), as_extreal(q), as_extreal(r)
    denom = r.reciprocal() - Fraction(k, n) - q.reciprocal()
    if denom == 0:
        raise Degenerate("relation does not determine theta (zero denominator)")
    return (p.reciprocal() - Fraction(j, n) - q.reciprocal()) / denom


def solve_special_p(j: int, k: int, q, r) -> ExtReal:
    """The theta = j/k case: 1/p = j/(k r) + (k - j)/(k q).

    The dimension cancels at this weight, so no n argument is needed; the
    result agrees with solve_p(n, j, k, j/k, q, r) for every n.
    """
    if j >= k:
        raise InvalidIndex(f"need j < k, got j={j}, k={k}")
    q, r = as_extreal(q), as_extreal(r)
    recip = Fraction(j, k) * r.reciprocal() + Fraction(k - j, k) * q.reciprocal()
    return ExtReal.from_reciprocal(recip)


def gagliardo_p(j: int, k: int, q, r) -> ExtReal:
    """Modular-form index p = k q r / (j q + (k - j) r); equals solve_special_p."""
    if not (0 < j < k):
        raise InvalidIndex(f"need 0 < j < k, got j={j}, k={k}")
    q, r = as_fraction(q), as_fraction(r)
    return ExtReal(Fraction(k) * q * r / (j * q + (k - j) * r))


def check_admissible_values(n: int, j: int, k: int, theta, q, r) -> AdmissibilityVerdict:
    """Side conditions under which the interpolation inequality holds.

    For r = 1 the weight may run over the whole range j/k <= theta <= 1.
    For 1 < r < infinity theta = 1 is excluded exactly when k - j - n/r is a
    nonnegative integer (the critical embedding where the estimate leaves the
    Lebesgue scale).  On top of the range conditions, 1/p computed from the
    balance relation must be >= 0; p = infinity itself is a legal endpoint.
    """
    def verdict(reason):
        return AdmissibilityVerdict(reason == AdmissibilityReason.OK, reason)

    theta = as_fraction(theta)
    q, r = as_extreal(q), as_extreal(r)
    if n < 1 or j < 0 or j >= k:
        return verdict(AdmissibilityReason.INDEX_OUT_OF_RANGE)
    if r.is_infinite or r.frac < 1 or q < 1:
        return verdict(AdmissibilityReason.INDEX_OUT_OF_RANGE)
    if theta < Fraction(j, k) or theta > 1:
        return verdict(AdmissibilityReason.THETA_OUT_OF_RANGE)
    if r > 1 and theta == 1:
        gap = k - j - n * r.reciprocal()
        if gap >= 0 and gap.denominator == 1:
            return verdict(AdmissibilityReason.CRITICAL_INTEGER_CASE)
    recip_p = (
        Fraction(j, n)
        + theta * (r.reciprocal() - Fraction(k, n))
        + (1 - theta) * q.reciprocal()
    )
    if recip_p < 0:
        return verdict(AdmissibilityReason.P_NONPOSITIVE)
    return verdict(AdmissibilityReason.OK)


def check_admissible(params: GNParams) -> AdmissibilityVerdict:
    return check_admissible_values(
        params.n, params.j, params.k, params.theta, params.q, params.r
    )


def scaling_deficit(params: GNParams) -> Fraction:
    """Exponent of s in the inequality ratio under dilation u -> u(s .).

    delta = (j - n/p) - theta*(k - n/r) + (1 - theta)*n/q; it vanishes exactly
    when p satisfies the balance relation.
    """
    n = params.n
    return (
        Fraction(params.j) - n * params.p.reciprocal()
        - params.theta * (Fraction(params.k) - n * params.r.reciprocal())
        + (1 - params.theta) * n * params.q.reciprocal()
    )


def interpolation_alpha(p, r, q) -> Fraction:
    """Weight alpha with 1/p = alpha/r + (1 - alpha)/q."""
    p, r, q = as_extreal(p), as_extreal(r), as_extreal(q)
    if r == q:
        if p == r:
            return Fraction(1)
        raise Degenerate("r = q but p differs; no interpolation weight exists")
    denom = r.reciprocal() - q.reciprocal()
    alpha = (p.reciprocal() - q.reciprocal()) / denom
    if not (0 <= alpha <= 1):
        raise AlphaOutOfRange(f"alpha = {alpha} outside [0, 1]")
    return alpha


def gagliardo_balance(p, q, r) -> Tuple[Fraction, Fraction]:
    """Exponents (lambda, mu) balancing the two-term modular bound.

    Writing the window length as l = a * ||u''||^lambda * ||u||^mu makes the
    two terms of the homogenized bound carry identical powers of ||u''|| and
    of ||u||.  Solving the two linear equations gives lambda = -1/2 for any
    indices and mu = q/(2r).
    """
    p, q, r = as_fraction(p), as_fraction(q), as_fraction(r)
    a = 2 * r / p
    lam = -(r / p) / a
    mu = (q / p) / a
    # balanced by construction; keep the cross-check cheap and explicit
    assert (a - 1) * lam + r / p == -lam
    assert (a - 1) * mu == -mu + q / p
    return lam, mu


def gagliardo_merged_exponents(p, q, r) -> Tuple[Fraction, Fraction]:
    """Powers of (||u''||, ||u||) in either merged term after balancing."""
    p, q, r = as_fraction(p), as_fraction(q), as_fraction(r)
    lam, mu = gagliardo_balance(p, q, r)
    e_dd = (2 * r / p - 1) * lam + r / p
    e_u = (2 * r / p - 1) * mu
    assert e_dd == -lam
    assert e_u == -mu + q / p
    return e_dd, e_u


def induction_step1_exponents(k: int, q, r) -> Tuple[ExtReal, ExtReal]:
    """Indices used to lift the order-(2,1) estimate to order (k+1,1).

    p solves 1/p = (1/(k+1))/r + (k/(k+1))/q and the intermediate index
    p_tilde solves 2/p = 1/p_tilde + 1/q.  The pair automatically satisfies
    the order-(k,1) relation for the gradient: 1/p_tilde = (1/k)/r + (1-1/k)/p.
    """
    if k < 2:
        raise InvalidIndex(f"need k >= 2, got k={k}")
    q, r = as_extreal(q), as_extreal(r)
    _require_lebesgue(q, r)
    rp = Fraction(1, k + 1) * r.reciprocal() + Fraction(k, k + 1) * q.reciprocal()
    rpt = 2 * rp - q.reciprocal()
    if not (0 <= rpt <= 1):
        raise NegativeReciprocal(f"1/p_tilde = {rpt} outside [0, 1]")
    assert rpt == Fraction(1, k) * r.reciprocal() + (1 - Fraction(1, k)) * rp
    return ExtReal.from_reciprocal(rp), ExtReal.from_reciprocal(rpt)


def induction_step2_exponents(k: int, j: int, q, r) -> Tuple[ExtReal, ExtReal]:
    """Indices used to lift order (k,j) to order (k+1,j+1).

    p solves 1/p = ((j+1)/(k+1))/r + ((k-j)/(k+1))/q and q_tilde solves
    1/p = (j/k)/r + (1-j/k)/q_tilde; q_tilde then satisfies the order-(j+1,1)
    relation 1/q_tilde = (1/(j+1))/p + (j/(j+1))/q as well.
    """
    if not (1 <= j < k):
        raise InvalidIndex(f"need 1 <= j < k, got j={j}, k={k}")
    q, r = as_extreal(q), as_extreal(r)
    _require_lebesgue(q, r)
    rp = (
        Fraction(j + 1, k + 1) * r.reciprocal()
        + Fraction(k - j, k + 1) * q.reciprocal()
    )
    rqt = (rp - Fraction(j, k) * r.reciprocal()) * Fraction(k, k - j)
    if not (0 <= rqt <= 1):
        raise NegativeReciprocal(f"1/q_tilde = {rqt} outside [0, 1]")
    assert rqt == Fraction(1, j + 1) * rp + Fraction(j, j + 1) * q.reciprocal()
    return ExtReal.from_reciprocal(rp), ExtReal.from_reciprocal(rqt)


def _require_lebesgue(*vals: ExtReal):
    for v in vals:
        if not v.is_infinite and v.frac < 1:
            raise ValueError(f"index {v} below the Lebesgue scale")


@dataclass(frozen=True)
class NormFactor:
    order: int
    exp: ExtReal
    power: Fraction

    def __post_init__(self):
        object.__setattr__(self, "exp", as_extreal(self.exp))
        object.__setattr__(self, "power", as_fraction(self.power))


@dataclass(frozen=True)
class InequalityRecord:
    """Symbolic record  |D^a u|_pa <= prod C_i^{c_i} * prod |D^b u|_pb^{gamma_b}.

    Factor powers must sum to 1 (the statement is multiplicatively
    homogeneous of degree one in u).  Constants are named atoms with rational
    powers; no numeric values are attached.
    """

    lhs_order: int
    lhs_exp: ExtReal
    factors: Tuple[NormFactor, ...]
    constants: Tuple[Tuple[str, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "lhs_exp", as_extreal(self.lhs_exp))
        factors = tuple(
            f if isinstance(f, NormFactor) else NormFactor(*f) for f in self.factors
        )
        object.__setattr__(self, "factors", factors)
        consts = tuple(sorted((str(n), as_fraction(p)) for n, p in self.constants))
        object.__setattr__(self, "constants", consts)
        total = sum((f.power for f in factors), Fraction(0))
        if total != 1:
            raise ValueError(f"factor powers sum to {total}, expected 1")

    def constants_dict(self) -> Dict[str, Fraction]:
        return dict(self.constants)

    def factor_power(self, order: int, exp) -> Fraction:
        exp = as_extreal(exp)
        for f in self.factors:
            if f.order == order and f.exp == exp:
                return f.power
        raise KeyError((order, exp))

    def describe(self) -> str:
        consts = " ".join(f"{n}^{{{p}}}" for n, p in self.constants) or "C"
        rhs = " ".join(
            f"|D^{f.order} u|_{{{f.exp}}}^{{{f.power}}}" for f in self.factors
        )
        return f"|D^{self.lhs_order} u|_{{{self.lhs_exp}}} <= {consts} {rhs}"


def gn_record(k: int, j: int, p, r, q, constant: str = "C") -> InequalityRecord:
    """Record of the theta = j/k inequality with top order k, target order j."""
    theta = Fraction(j, k)
    return InequalityRecord(
        lhs_order=j,
        lhs_exp=as_extreal(p),
        factors=(
            NormFactor(k, as_extreal(r), theta),
            NormFactor(0, as_extreal(q), 1 - theta),
        ),
        constants=((constant, Fraction(1)),),
    )


def chain_records(a: InequalityRecord, b: InequalityRecord) -> InequalityRecord:
    """Substitute record b into the matching factor of a and renormalize.

    When the substitution reintroduces a's left-hand norm on the right, the
    record is solved for that norm, which rescales every remaining power by
    1/(1 - sigma); sigma >= 1 means the substitution carries no information.
    """
    w = None
    for f in a.factors:
        if f.order == b.lhs_order and f.exp == b.lhs_exp:
            w = f.power
            break
    if w is None:
        raise NoMatchingFactor(
            f"no factor of order {b.lhs_order} with exponent {b.lhs_exp}"
        )

    merged: Dict[Tuple[int, ExtReal], Fraction] = {}
    for f in a.factors:
        if f.order == b.lhs_order and f.exp == b.lhs_exp:
            continue
        key = (f.order, f.exp)
        merged[key] = merged.get(key, Fraction(0)) + f.power
    for f in b.factors:
        key = (f.order, f.exp)
        merged[key] = merged.get(key, Fraction(0)) + w * f.power

    self_key = (a.lhs_order, a.lhs_exp)
    sigma = merged.pop(self_key, Fraction(0))
    if sigma >= 1:
        raise SelfPowerGeqOne(f"self power {sigma} >= 1; cannot solve")
    scale = 1 / (1 - sigma)

    consts: Dict[str, Fraction] = dict(a.constants)
    for name, power in b.constants:
        consts[name] = consts.get(name, Fraction(0)) + w * power
    consts = {n: p * scale for n, p in consts.items() if p != 0}

    factors = tuple(
        NormFactor(order, exp, power * scale)
        for (order, exp), power in merged.items()
        if power != 0
    )
    return InequalityRecord(
        lhs_order=a.lhs_order,
        lhs_exp=a.lhs_exp,
        factors=factors,
        constants=tuple(consts.items()),
    )
