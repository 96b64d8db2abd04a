"""Parameter validation, classification, and integral bases for the fields.

Two families of quartic Galois extensions of the rationals are handled:

* cyclic fields Q(sqrt(a(d + b*sqrt(d)))) with a odd squarefree, b, c > 0,
  d = b^2 + c^2 squarefree and coprime to a; the reference basis is
  {1, sqrt(d), z, w} with z = sqrt(a(d + b*sqrt(d))), w = sqrt(a(d - b*sqrt(d)));
* biquadratic fields Q(sqrt(m), sqrt(n)) with m, n squarefree, writing
  d = gcd adjusted so d | m, d | n and k = m*n/d^2; the reference basis is
  {1, sqrt(m), sqrt(n), sqrt(k)}.

Each family splits into congruence classes (five cyclic cases, three
biquadratic types) with a known integral basis, returned here as rational
coordinate rows over the reference basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .errors import (
    DegenerateProductError,
    EvenParameterError,
    NonPositiveError,
    NotCoprimeError,
    NotSquarefreeError,
    ValidationError,
)

SQUAREFREE_LIMIT = 10**12


def is_squarefree(n: int) -> bool:
    """True iff no prime square divides |n|.

    Trial division up to the cube root; the remaining cofactor has at most two
    prime factors, so it is squarefree unless it is a perfect square.
    """
    if n == 0:
        raise ValidationError("squarefree test needs a nonzero integer")
    n = abs(n)
    if n > SQUAREFREE_LIMIT:
        raise ValidationError(f"squarefree test supports |n| <= {SQUAREFREE_LIMIT}, got {n}")
    i = 2
    while i * i * i <= n:
        if n % i == 0:
            n //= i
            if n % i == 0:
                return False
        i += 1
    return not (n > 1 and isqrt(n) ** 2 == n)


# ---- cyclic quartic fields ----

@dataclass(frozen=True)
class CyclicQuarticParams:
    """Validated parameters (a, b, c) with d = b^2 + c^2."""

    a: int
    b: int
    c: int
    d: int


def validate_cyclic(a: int, b: int, c: int) -> CyclicQuarticParams:
    """Check the defining constraints and compute d = b^2 + c^2."""
    if b <= 0:
        raise NonPositiveError(f"b must be positive, got {b}")
    if c <= 0:
        raise NonPositiveError(f"c must be positive, got {c}")
    if a % 2 == 0:
        raise EvenParameterError(f"a must be odd, got {a}")
    if not is_squarefree(a):
        raise NotSquarefreeError(a)
    d = b * b + c * c
    if not is_squarefree(d):
        raise NotSquarefreeError(d)
    if gcd(a, d) != 1:
        raise NotCoprimeError(f"a and d must be coprime, got a={a}, d={d}")
    return CyclicQuarticParams(a, b, c, d)


def classify_cyclic_case(p: CyclicQuarticParams) -> int:
    """Congruence case (1-5) selecting the integral basis shape."""
    if p.d % 2 == 0:
        return 1
    if p.b % 2 == 1:
        return 2
    if (p.a + p.b) % 4 == 3:
        return 3
    if (p.a - p.c) % 4 == 0:
        return 4
    return 5


def integral_basis_cyclic(p: CyclicQuarticParams, case: int | None = None) -> list[list[Fraction]]:
    """Integral basis rows gamma_1..gamma_4 over {1, sqrt(d), z, w}."""
    if case is None:
        case = classify_cyclic_case(p)
    h = Fraction(1, 2)
    q = Fraction(1, 4)
    rows = {
        1: [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        2: [[1, 0, 0, 0], [h, h, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
        3: [[1, 0, 0, 0], [h, h, 0, 0], [0, 0, h, h], [0, 0, h, -h]],
        4: [[1, 0, 0, 0], [h, h, 0, 0], [q, q, q, q], [q, -q, q, -q]],
        5: [[1, 0, 0, 0], [h, h, 0, 0], [q, q, q, -q], [q, -q, q, q]],
    }[case]
    return [[Fraction(x) for x in row] for row in rows]


# ---- biquadratic fields ----

@dataclass(frozen=True)
class BiquadraticParams:
    """Canonical radicand triple (m, n, k) with d > 0, d | m, d | n, mn = d^2 k.

    `origins` records where each canonical slot came from ("first input",
    "second input", or "derived"), so results can be reported against the
    user's own subfield labels.
    """

    m: int
    n: int
    k: int
    d: int
    origins: tuple[str, str, str]

    @property
    def radicands(self) -> tuple[int, int, int]:
        return (self.m, self.n, self.k)


FIRST_INPUT = "first input"
SECOND_INPUT = "second input"
DERIVED = "derived"


def _check_radicand(value: int, label: str) -> None:
    if value in (0, 1):
        raise DegenerateProductError(f"{label} must generate a quadratic field, got {value}")
    if not is_squarefree(value):
        raise NotSquarefreeError(value)


def canonicalize_biquadratic(m_in: int, n_in: int) -> BiquadraticParams:
    """Order the three quadratic subfield radicands into canonical (m, n, k).

    The derived third radicand is m_in*n_in divided by the square of their
    (adjusted) gcd.  Canonical m is the radicand that determines the type:
    the one congruent to 1 mod 4 when there is exactly one, the one congruent
    to 3 mod 4 when none is; when all three are 1 mod 4 the input order is
    kept.  Remaining slots take the other user inputs in input order, with
    the derived radicand last.
    """
    _check_radicand(m_in, "m")
    _check_radicand(n_in, "n")
    if m_in == n_in:
        raise DegenerateProductError(f"radicands must be distinct, got {m_in} twice")
    d0 = gcd(abs(m_in), abs(n_in))
    k0 = (m_in * n_in) // (d0 * d0)
    if k0 in (0, 1):
        raise DegenerateProductError(f"third radicand degenerates to {k0}")

    labelled = [(m_in, FIRST_INPUT), (n_in, SECOND_INPUT), (k0, DERIVED)]
    ones = [item for item in labelled if item[0] % 4 == 1]
    if len(ones) == 3:
        ordered = labelled
    elif len(ones) == 1:
        lead = ones[0]
        ordered = [lead] + [item for item in labelled if item is not lead]
    else:
        threes = [item for item in labelled if item[0] % 4 == 3]
        if len(threes) != 1 or len(ones) != 0:
            raise ValidationError(
                f"radicands {[v for v, _ in labelled]} fit no residue pattern mod 4"
            )
        lead = threes[0]
        ordered = [lead] + [item for item in labelled if item is not lead]

    m, n, k = (v for v, _ in ordered)
    d = gcd(abs(m), abs(n))
    if m * n != d * d * k:
        raise ValidationError(f"inconsistent radicand triple {(m, n, k)}")
    return BiquadraticParams(m, n, k, d, tuple(o for _, o in ordered))


def classify_biquadratic_type(p: BiquadraticParams) -> str:
    """Type by count of radicands congruent to 1 mod 4 (0, 1, or all 3)."""
    ones = sum(1 for v in p.radicands if v % 4 == 1)
    if ones == 0:
        return "first"
    if ones == 1:
        return "second"
    if ones == 3:
        return "third"
    raise ValidationError(f"radicands {p.radicands} fit no residue pattern mod 4")


def integral_basis_biquadratic(p: BiquadraticParams) -> list[list[Fraction]]:
    """Integral basis rows gamma_1..gamma_4 over {1, sqrt(m), sqrt(n), sqrt(k)}.

    First type: {1, sqrt(m), sqrt(n), (sqrt(n)+sqrt(k))/2}.
    Second type: {1, (1+sqrt(m))/2, sqrt(n), (sqrt(n)+sqrt(k))/2}.
    Third type: {1, (1+sqrt(m))/2, (1+sqrt(n))/2, (1+sqrt(m))(1+sqrt(k))/4},
    whose last element expands to (1/4, 1/4, m/(4d), 1/4) using
    sqrt(m)*sqrt(k) = (m/d)*sqrt(n).
    """
    kind = classify_biquadratic_type(p)
    h = Fraction(1, 2)
    q = Fraction(1, 4)
    if kind == "first":
        rows = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, h, h]]
    elif kind == "second":
        rows = [[1, 0, 0, 0], [h, h, 0, 0], [0, 0, 1, 0], [0, 0, h, h]]
    else:
        rows = [[1, 0, 0, 0], [h, h, 0, 0], [h, 0, h, 0], [q, q, Fraction(p.m, 4 * p.d), q]]
    return [[Fraction(x) for x in row] for row in rows]
