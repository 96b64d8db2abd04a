"""Freeness of the ring of integers over its associated orders.

For each non-classical structure of a quartic field this module decides
whether the ring of integers is a free module over the associated order,
using the Pell-type solvability criteria together with explicit generator
formulas.  Every generator is re-verified through the determinant test
before it is reported.  Fast prescreens settle many inputs without touching
the Pell machinery, and an exhaustive box-scan oracle provides an
independent check for tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, isqrt, lcm
from typing import Iterator, Sequence

import numpy as np

from .errors import InternalInconsistencyError, ValidationError
from .fields import (
    DERIVED,
    FIRST_INPUT,
    SECOND_INPUT,
    BiquadraticParams,
    CyclicQuarticParams,
    classify_biquadratic_type,
    classify_cyclic_case,
    integral_basis_biquadratic,
    integral_basis_cyclic,
)
from .hopf import (
    ReductionReport,
    StructureId,
    action_matrix,
    change_basis,
    gram_nonclassical,
    reduction_report,
    structures_for,
    test_generator,
)
from .linalg import det, mat
from .pell import PellSolution, find_with_divisibility, jacobi, solve_all

FieldParams = CyclicQuarticParams | BiquadraticParams

FREE = "free"
NOT_FREE = "not_free"
UNKNOWN = "unknown"

STRUCTURAL_RULE = "determinant always a multiple of four while the index is two"


@dataclass(frozen=True)
class PrescreenVerdict:
    """Outcome of the fast solvability rules.

    `outcome` is "free", "not_free", or "unknown"; `reason` names the rule
    that fired (or "no rule applies").
    """

    outcome: str
    reason: str


UNDECIDED = PrescreenVerdict(UNKNOWN, "no rule applies")


@dataclass(frozen=True)
class FreenessReport:
    """Decision for one non-classical structure.

    `witness` is a solution (x, y) of x^2 - D*y^2 = `witness_target` backing
    a free decision, `generator` a verified free generator in integral-basis
    coordinates, `index` the module index of the structure basis inside the
    associated order, and `method` how the decision was reached:
    "prescreen:<rule>", "pell_criterion", or "brute_force".
    """

    structure: StructureId
    decision: str
    witness: tuple[int, int] | None
    witness_target: int | None
    generator: tuple[int, int, int, int] | None
    index: Fraction
    method: str


# ---- small arithmetic helpers ----

def _prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of |n| in increasing order."""
    n = abs(n)
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


def _is_prime(n: int) -> bool:
    return n > 1 and _prime_factors(n) == [n]


def _squarefree_kernel(n: int) -> int:
    """The squarefree part of |n| (product of primes with odd exponent)."""
    n = abs(n)
    kernel = 1
    for p in _prime_factors(n):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e % 2:
            kernel *= p
    return kernel


def _exact_div(num: int, den: int) -> int:
    if num % den:
        raise _NotDivisible(num, den)
    return num // den


class _NotDivisible(Exception):
    pass


# ---- shared pipeline pieces ----

def _structure_analysis(field: FieldParams, structure: StructureId,
                        descriptor: Sequence[Sequence[Fraction]]):
    """Gram matrix, action matrix, and reduction for one structure."""
    gram = change_basis(gram_nonclassical(field, structure), descriptor)
    action = action_matrix(gram)
    return gram, action, reduction_report(action)


def _first_verified(candidates: Iterator[tuple[int, int, int, int]],
                    report: ReductionReport,
                    action: Sequence[Sequence[Fraction]]) -> tuple[int, int, int, int] | None:
    for beta in candidates:
        if test_generator(report, action, beta):
            return beta
    return None


_SIGN_VARIANTS = ((1, 1), (-1, -1), (1, -1), (-1, 1))


# ---- cyclic decision procedure ----

def prescreen_cyclic(p: CyclicQuarticParams) -> PrescreenVerdict:
    """Fast rules for the cyclic criterion x^2 - d*y^2 = t, t | x - s*y.

    The target t is the odd one of {b, c}.  Sound but incomplete: "unknown"
    sends the caller to the full decision procedure.
    """
    case = classify_cyclic_case(p)
    target = p.b if case <= 2 else p.c
    if target == 1:
        return PrescreenVerdict(FREE, "target equals one")
    modulus = p.d if p.d % 2 else p.d // 2
    if jacobi(target % modulus, modulus) == -1:
        which = "d" if p.d % 2 else "d/2"
        return PrescreenVerdict(NOT_FREE, f"target is a quadratic non-residue modulo {which}")
    if _is_prime(p.d):
        if p.d % 4 == 3 and _squarefree_kernel(target) % 4 == 3:
            return PrescreenVerdict(NOT_FREE, "prime d and the target kernel are both 3 mod 4")
        for q in _prime_factors(target):
            if q != 2 and target % (q * q) and jacobi(p.d % q, q) == -1:
                return PrescreenVerdict(
                    NOT_FREE, "prime d is a non-residue modulo an odd prime factor of the target")
    if _is_prime(target) and solve_all(p.d, target).kind != "empty":
        return PrescreenVerdict(FREE, "prime target with solvable norm equation")
    return UNDECIDED


def _cyclic_candidates(case: int, target: int, cross: int,
                       x: int, y: int) -> Iterator[tuple[int, int, int, int]]:
    """Generator candidates for a cyclic solution, over sign variants."""
    for sx, sy in _SIGN_VARIANTS:
        u, v = sx * x, sy * y
        if (u - cross * v) % target:
            continue
        q = (u - cross * v) // target
        if case == 1:
            yield (1, 1, q, v)
        elif case == 2:
            yield (0, 1, q, v)
        elif case == 3:
            yield (0, 1, q, v)
        elif case == 4:
            if (v - q + 1) % 2:
                continue
            yield (-(v + (v % 2)) // 2, (v - q + 1) // 2, q, v)
        else:
            if (v - q + 1) % 2:
                continue
            half = (v - q + 1) // 2
            yield (-(v + (v % 2)) // 2 + half, -half, v, q)


def decide_cyclic(p: CyclicQuarticParams, use_prescreen: bool = True) -> FreenessReport:
    """Freeness decision for the unique non-classical cyclic structure.

    Cases 1-2 solve x^2 - d*y^2 = b with b | x - c*y; cases 3-5 swap the
    roles of b and c.  A found solution is turned into a generator by the
    per-case formula and verified by the determinant test.
    """
    case = classify_cyclic_case(p)
    structure = structures_for(p)[0]
    _, action, report = _structure_analysis(p, structure, integral_basis_cyclic(p, case))

    target, cross = (p.b, p.c) if case <= 2 else (p.c, p.b)
    pre = prescreen_cyclic(p) if use_prescreen else UNDECIDED
    if pre.outcome == NOT_FREE:
        return FreenessReport(structure, NOT_FREE, None, None, None,
                              report.index, f"prescreen:{pre.reason}")

    hit = find_with_divisibility(p.d, target, cross)
    if hit is None:
        if pre.outcome == FREE:
            raise InternalInconsistencyError(
                f"prescreen says free but the divisibility search failed for {p}")
        return FreenessReport(structure, NOT_FREE, None, None, None,
                              report.index, "pell_criterion")
    beta = _first_verified(_cyclic_candidates(case, target, cross, hit.x, hit.y),
                           report, action)
    if beta is None:
        raise InternalInconsistencyError(
            f"no sign variant of the case-{case} formula verifies for {p}, witness {hit}")
    method = f"prescreen:{pre.reason}" if pre.outcome == FREE else "pell_criterion"
    return FreenessReport(structure, FREE, (hit.x, hit.y), target, beta,
                          report.index, method)


# ---- biquadratic decision procedure ----

def _equation_table(p: BiquadraticParams, kind: str):
    """Per-structure (radicand, target) of x^2 + a*y^2 = +-target, or None."""
    if kind == "first":
        return ((p.m, 4 * p.d), (p.n, 2 * p.d), (p.k, 2 * (p.n // p.d)))
    if kind == "second":
        return ((p.m, 2 * p.d), None, None)
    return ((p.m, 2 * p.d), (p.n, 2 * p.d), (p.k, 2 * (p.n // p.d)))


def _viable_targets(a: int, base: int) -> tuple[int, ...]:
    """Both signs of the target unless the mod-8 obstruction rules one out.

    When a is 1 mod 4 and the target is twice an odd number, every solution
    of x^2 + a*y^2 = +-target has x, y odd, so the value is 1 + a mod 8 and
    at most one sign can match.
    """
    g = abs(base) // 2
    if a % 4 == 1 and g % 2 == 1 and abs(base) == 2 * g:
        residue = (1 + a) % 8
        return tuple(t for t in (abs(base), -abs(base)) if t % 8 == residue)
    return (base, -base)


def prescreen_biquadratic(
        p: BiquadraticParams) -> tuple[PrescreenVerdict, PrescreenVerdict, PrescreenVerdict]:
    """Fast rules for the three biquadratic structures, in canonical order."""
    kind = classify_biquadratic_type(p)
    m, n, k, d = p.m, p.n, p.k, p.d
    if kind == "first":
        if d == 1 or d == abs(m):
            h1 = PrescreenVerdict(FREE, "d equals 1 or |m|")
        elif m > 0:
            h1 = PrescreenVerdict(NOT_FREE, "positive radicand m with d not in {1, |m|}")
        else:
            h1 = UNDECIDED
        if abs(n) == 2 * d:
            h2 = PrescreenVerdict(FREE, "n equals plus or minus 2d")
            h3 = PrescreenVerdict(FREE, "n equals plus or minus 2d")
        else:
            h2 = (PrescreenVerdict(NOT_FREE, "positive radicand n with n != 2d")
                  if n > 0 else UNDECIDED)
            h3 = (PrescreenVerdict(NOT_FREE, "positive radicand k with |n| != 2d")
                  if k > 0 else UNDECIDED)
        return (h1, h2, h3)
    if kind == "second":
        blocked = PrescreenVerdict(NOT_FREE, STRUCTURAL_RULE)
        return (_small_radicand_rule(m), blocked, blocked)
    return tuple(_small_radicand_rule(a) for a in (m, n, k))


def _small_radicand_rule(a: int) -> PrescreenVerdict:
    """Rules for x^2 + a*y^2 = +-2g with a squarefree, 1 mod 4, g | |a|."""
    if a > 1:
        return PrescreenVerdict(NOT_FREE, "positive radicand exceeds one")
    if a in (-3, -7):
        return PrescreenVerdict(FREE, "radicand -3 or -7 solves every admissible target")
    return UNDECIDED


def _biquad_candidates(kind: str, idx: int, p: BiquadraticParams,
                       x: int, y: int) -> Iterator[tuple[int, int, int, int]]:
    """Generator candidates for one biquadratic solution, over sign variants."""
    m, n, k, d = p.m, p.n, p.k, p.d
    nd = n // d
    for sx, sy in _SIGN_VARIANTS:
        u, v = sx * x, sy * y
        try:
            if kind == "first":
                if idx == 0:
                    yield (1, 1, _exact_div(u - d * v, 2 * d), v)
                elif idx == 1:
                    yield (1, _exact_div(u, 2 * d), _exact_div(1 - v, 2), v)
                else:
                    yield (1, _exact_div(v, 2), _exact_div(u * d - n, 2 * n), 1)
            elif kind == "second":
                yield (1, -1, _exact_div(u - d * v, 2 * d), v)
            elif idx == 0:
                b3 = _exact_div(u - m * v, 2 * d)
                eps = b3 % 2
                yield ((-b3 - eps) // 2, _exact_div(1 - v, 2), b3, v)
            elif idx == 1:
                t = _exact_div(m * v - u, d)
                eps = t % 4
                yield ((t - eps) // 4, _exact_div(u - v * d, 2 * d),
                       _exact_div(d - m * v, 2 * d), v)
            else:
                t = _exact_div(k - u, nd) - v
                eps = (t % 4) - 2
                yield ((t + eps) // 4, _exact_div(v - 1, 2),
                       _exact_div(u - k, 2 * nd), 1)
        except _NotDivisible:
            continue


def decide_biquadratic(
        p: BiquadraticParams,
        use_prescreen: bool = True) -> tuple[FreenessReport, FreenessReport, FreenessReport]:
    """Freeness decisions for the three non-classical biquadratic structures.

    Each structure has a norm-form equation x^2 + a*y^2 = +-target; any
    solution yields a generator through the per-type formula (all required
    divisibilities hold automatically and are still asserted).  Second-type
    structures two and three are never free: their generator determinants
    are multiples of four while the index is two.
    """
    kind = classify_biquadratic_type(p)
    descriptor = integral_basis_biquadratic(p)
    pres = (prescreen_biquadratic(p) if use_prescreen
            else (UNDECIDED, UNDECIDED, UNDECIDED))
    equations = _equation_table(p, kind)
    reports = []
    for idx, structure in enumerate(structures_for(p)):
        _, action, red = _structure_analysis(p, structure, descriptor)
        equation = equations[idx]
        if equation is None:
            reports.append(FreenessReport(structure, NOT_FREE, None, None, None,
                                          red.index, f"prescreen:{STRUCTURAL_RULE}"))
            continue
        pre = pres[idx]
        if pre.outcome == NOT_FREE:
            reports.append(FreenessReport(structure, NOT_FREE, None, None, None,
                                          red.index, f"prescreen:{pre.reason}"))
            continue
        a, base = equation
        solved = None
        for target in _viable_targets(a, base):
            classes = solve_all(-a, target)
            if classes.kind != "empty":
                solved = (classes, target)
                break
        if solved is None:
            if pre.outcome == FREE:
                raise InternalInconsistencyError(
                    f"prescreen says free but x^2 + {a}y^2 = +-{base} has no solutions")
            reports.append(FreenessReport(structure, NOT_FREE, None, None, None,
                                          red.index, "pell_criterion"))
            continue
        classes, target = solved
        beta = witness = None
        for rep in classes.solutions:
            beta = _first_verified(_biquad_candidates(kind, idx, p, rep.x, rep.y),
                                   red, action)
            if beta is not None:
                witness = rep
                break
        if beta is None:
            raise InternalInconsistencyError(
                f"no sign variant of the {kind}-type formula verifies for {p}, "
                f"structure {idx + 1}, target {target}")
        method = f"prescreen:{pre.reason}" if pre.outcome == FREE else "pell_criterion"
        reports.append(FreenessReport(structure, FREE, (witness.x, witness.y),
                                      target, beta, red.index, method))
    return tuple(reports)


# ---- closed-form generator determinants ----

def closed_form_determinant(p: FieldParams, structure: StructureId,
                            beta: Sequence[int]) -> Fraction:
    """Factored closed form of the generator determinant.

    Independent of the matrix construction: evaluates the per-case product
    of two linear factors and one quadratic form in the coordinates of beta.
    """
    b1, b2, b3, b4 = (Fraction(x) for x in beta)
    if isinstance(p, CyclicQuarticParams):
        b, c = p.b, p.c
        case = classify_cyclic_case(p)
        if case == 1:
            return 16 * b1 * b2 * (b * b3**2 + 2 * c * b3 * b4 - b * b4**2)
        if case == 2:
            return 8 * b2 * (2 * b1 + b2) * (b * b3**2 + 2 * c * b3 * b4 - b * b4**2)
        if case == 3:
            return -8 * b2 * (2 * b1 + b2) * (c * b3**2 + 2 * b * b3 * b4 - c * b4**2)
        if case == 4:
            return (-2 * (2 * b2 + b3 - b4) * (4 * b1 + 2 * b2 + b3 + b4)
                    * (c * b3**2 + 2 * b * b3 * b4 - c * b4**2))
        return (2 * (2 * b2 + b3 - b4) * (4 * b1 + 2 * b2 + b3 + b4)
                * (-c * b3**2 + 2 * b * b3 * b4 + c * b4**2))
    m, n, k, d = p.m, p.n, p.k, p.d
    md, nd = m // d, n // d
    kind = classify_biquadratic_type(p)
    idx = structures_for(p).index(structure)
    if kind == "first":
        if idx == 0:
            return (-32 * b1 * b2
                    * (d * b3**2 + d * b3 * b4 + Fraction(d + md, 4) * b4**2))
        if idx == 1:
            return 8 * b1 * (2 * b3 + b4) * (2 * d * b2**2 + Fraction(n, 2 * d) * b4**2)
        return (8 * b1 * b4
                * (2 * md * b2**2 + 2 * nd * b3**2 + 2 * nd * b3 * b4
                   + Fraction(n, 2 * d) * b4**2))
    if kind == "second":
        if idx == 0:
            return (-8 * b2 * (2 * b1 + b2)
                    * (2 * d * b3**2 + 2 * d * b3 * b4 + Fraction(d + md, 2) * b4**2))
        if idx == 1:
            return 4 * (2 * b1 + b2) * (2 * b3 + b4) * (d * b2**2 + nd * b4**2)
        return (4 * b4 * (2 * b1 + b2)
                * (md * b2**2 + 4 * nd * b3**2 + 4 * nd * b3 * b4 + nd * b4**2))
    if idx == 0:
        return (-2 * (2 * b2 + b4) * (4 * b1 + 2 * b2 + 2 * b3 + b4)
                * (2 * d * b3**2 + 2 * m * b3 * b4 + md * Fraction(m + 1, 2) * b4**2))
    if idx == 1:
        return (2 * (2 * b3 + md * b4) * (4 * b1 + 2 * b2 + 2 * b3 + b4)
                * (2 * d * b2**2 + 2 * d * b2 * b4 + Fraction(d + nd, 2) * b4**2))
    return (2 * b4 * (4 * b1 + 2 * b2 + 2 * b3 + b4)
            * (2 * md * b2**2 + 2 * md * b2 * b4 + 2 * nd * b3**2
               + 2 * k * b3 * b4 + md * Fraction(k + 1, 2) * b4**2))


# ---- exhaustive oracle ----

_SIEVE_MODULUS = 32749  # prime; squares fit comfortably in int32


def _quartic_coefficients(action: Sequence[Sequence[Fraction]]) -> dict[tuple[int, ...], Fraction]:
    """Monomial coefficients of det(sum_j beta_j * block_j) as a quartic."""
    blocks = [[action[4 * j + t] for t in range(4)] for j in range(4)]
    coeffs: dict[tuple[int, ...], Fraction] = {}
    for js in product(range(4), repeat=4):
        value = det(mat([blocks[js[t]][t] for t in range(4)]))
        if value:
            key = [0, 0, 0, 0]
            for j in js:
                key[j] += 1
            key = tuple(key)
            coeffs[key] = coeffs.get(key, Fraction(0)) + value
    return {key: v for key, v in coeffs.items() if v}


def _evaluate_quartic(coeffs: dict[tuple[int, ...], int], beta: Sequence[int]) -> int:
    total = 0
    for (e1, e2, e3, e4), c in coeffs.items():
        total += c * beta[0]**e1 * beta[1]**e2 * beta[2]**e3 * beta[3]**e4
    return total


def _sieve_candidates(coeffs: dict[tuple[int, ...], int], bound: int,
                      target: int, modulus: int) -> list[tuple[int, int, int, int]]:
    """Grid indexes where the quartic is congruent to +-target, in C order.

    Works in int32: residues stay below the modulus p, so every product in
    the Horner recursion is below 2p^2 < 2^31.
    """
    size = 2 * bound + 1
    pows = np.ones((5, size), dtype=np.int32)
    pows[1] = np.arange(-bound, bound + 1, dtype=np.int64) % modulus
    for e in range(2, 5):
        pows[e] = pows[e - 1] * pows[1] % modulus
    layers = []
    for degree in range(5):
        layer = np.zeros((size, size, size), dtype=np.int32)
        for (e1, e2, e3, e4), c in coeffs.items():
            if e4 != degree:
                continue
            term = (c % modulus) * pows[e1].astype(np.int64) % modulus
            term = term.astype(np.int32)[:, None] * pows[e2][None, :] % modulus
            layer += term[:, :, None] * pows[e3][None, None, :] % modulus
        layers.append(layer % modulus)
    tpos, tneg = target % modulus, -target % modulus
    hits: list[tuple[int, int, int, int]] = []
    acc = np.empty_like(layers[0])
    for i4 in range(size):
        b4 = int(pows[1][i4])
        np.copyto(acc, layers[4])
        for degree in (3, 2, 1, 0):
            acc *= b4
            acc %= modulus
            acc += layers[degree]
        acc %= modulus
        for i1, i2, i3 in np.argwhere((acc == tpos) | (acc == tneg)):
            hits.append((int(i1), int(i2), int(i3), i4))
    hits.sort()
    return hits


def brute_force_generator(report: ReductionReport, action: Sequence[Sequence[Fraction]],
                          bound: int) -> tuple[int, int, int, int] | None:
    """First generator in the box [-bound, bound]^4, or None.

    Scans in ascending lexicographic order and returns the first beta whose
    determinant test passes.  The scan prefilters the grid with an exact
    congruence of the determinant polynomial modulo a fixed prime, so no
    point is ever missed; survivors are confirmed with exact arithmetic.
    """
    if bound < 0:
        raise ValidationError(f"scan bound must be nonnegative, got {bound}")
    rational = _quartic_coefficients(action)
    if not rational:
        return None
    scale = lcm(*(v.denominator for v in rational.values()))
    coeffs = {key: int(v * scale) for key, v in rational.items()}
    common = gcd(*coeffs.values())
    target = report.index * scale
    if target % common or target.denominator != 1:
        return None
    coeffs = {key: c // common for key, c in coeffs.items()}
    target = int(target) // common
    for i1, i2, i3, i4 in _sieve_candidates(coeffs, bound, target, _SIEVE_MODULUS):
        beta = (int(i1) - bound, int(i2) - bound, int(i3) - bound, int(i4) - bound)
        if abs(_evaluate_quartic(coeffs, beta)) != target:
            continue
        if not test_generator(report, action, beta):
            raise InternalInconsistencyError(
                f"polynomial and matrix determinants disagree at {beta}")
        return beta
    return None


# ---- aggregated field summary ----

@dataclass(frozen=True)
class StructureSummary:
    """Everything the pipeline knows about one non-classical structure."""

    structure: StructureId
    origin: str | None
    gram: list
    hnf: list
    index: Fraction
    order_basis: list
    prescreen: PrescreenVerdict
    report: FreenessReport


@dataclass(frozen=True)
class FieldSummary:
    """Per-field aggregate in the caller's own subfield labels."""

    family: str
    classification: str
    descriptor: list
    structures: tuple[StructureSummary, ...]


def summary(p: FieldParams) -> FieldSummary:
    """Aggregate classification, reduction data, and freeness per structure.

    Biquadratic structures are listed in the caller's order: the structure
    attached to the first input radicand first, then the second input, then
    the derived third radicand.
    """
    if isinstance(p, CyclicQuarticParams):
        case = classify_cyclic_case(p)
        descriptor = integral_basis_cyclic(p, case)
        report = decide_cyclic(p)
        gram, _, red = _structure_analysis(p, report.structure, descriptor)
        entry = StructureSummary(report.structure, None, gram, red.hnf, red.index,
                                 red.order_basis, prescreen_cyclic(p), report)
        return FieldSummary("cyclic", f"case {case}", descriptor, (entry,))
    kind = classify_biquadratic_type(p)
    descriptor = integral_basis_biquadratic(p)
    entries = []
    for idx, (pre, report) in enumerate(zip(prescreen_biquadratic(p), decide_biquadratic(p))):
        gram, _, red = _structure_analysis(p, report.structure, descriptor)
        entries.append(StructureSummary(report.structure, p.origins[idx], gram,
                                        red.hnf, red.index, red.order_basis, pre, report))
    rank = {FIRST_INPUT: 0, SECOND_INPUT: 1, DERIVED: 2}
    entries.sort(key=lambda entry: rank[entry.origin])
    return FieldSummary("biquadratic", kind, descriptor, tuple(entries))
