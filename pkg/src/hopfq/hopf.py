"""Gram matrices, action matrices, and the associated-order reduction.

A Hopf algebra acting on a quartic field is described here by its Gram matrix:
a 4x4 table whose (i, j) entry is the coordinate vector of w_i acting on the
j-th basis element of the field, where W = {w_1..w_4} is the algebra basis.
Stacking the per-column blocks gives the 16x4 action matrix; its Hermite
reduction yields the associated order, the index, and the determinant test
deciding whether a candidate element generates the ring of integers freely.

The non-classical structures all share one shape of basis,
(Id, mu, eta + mu*eta, z*(eta - mu*eta)), so their Gram matrices are built
from rows of the classical Gram matrix: one row copied (mu acts as a field
automorphism), one sum of two rows, and one difference of two rows multiplied
by the quadratic element z through the field's multiplication table.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import (
    GramFormatError,
    RankDeficientError,
    SingularDescriptorError,
    ValidationError,
)
from .fields import BiquadraticParams, CyclicQuarticParams
from .linalg import det, mat_inv, reduce_action_matrix

FieldParams = Union[CyclicQuarticParams, BiquadraticParams]

Vec = list  # length-4 list of Fraction
GramMatrix = list  # 4x4 nested list of Vec

CLASSICAL = "classical"
CYCLIC_NONCLASSICAL = "cyclic_nonclassical"
BIQUAD_H1 = "biquad_H1"
BIQUAD_H2 = "biquad_H2"
BIQUAD_H3 = "biquad_H3"


@dataclass(frozen=True)
class StructureId:
    """Identifies a Hopf-Galois structure by family and defining radical."""

    family: str
    subfield_tag: str


def structures_for(field: FieldParams) -> list[StructureId]:
    """The non-classical structures of the field, in canonical order."""
    if isinstance(field, CyclicQuarticParams):
        return [StructureId(CYCLIC_NONCLASSICAL, f"sqrt({field.d})")]
    return [
        StructureId(BIQUAD_H1, f"sqrt({field.m})"),
        StructureId(BIQUAD_H2, f"sqrt({field.n})"),
        StructureId(BIQUAD_H3, f"sqrt({field.k})"),
    ]


def classical_structure(field: FieldParams) -> StructureId:
    if isinstance(field, CyclicQuarticParams):
        return StructureId(CLASSICAL, f"sqrt({field.d})")
    return StructureId(CLASSICAL, f"sqrt({field.m})")


# ---- field arithmetic over the reference basis ----

def mult_table(field: FieldParams) -> list:
    """Structure constants: table[i][j] = coordinates of e_i * e_j.

    Cyclic reference basis {1, sqrt(d), z, w} with z^2 = a(d + b*sqrt(d)),
    w^2 = a(d - b*sqrt(d)), z*w = a*c*sqrt(d), sqrt(d)*z = b*z + c*w,
    sqrt(d)*w = c*z - b*w.  Biquadratic reference basis {1, sqrt(m), sqrt(n),
    sqrt(k)} with sqrt(m)*sqrt(n) = d*sqrt(k), sqrt(m)*sqrt(k) = (m/d)*sqrt(n),
    sqrt(n)*sqrt(k) = (n/d)*sqrt(m).
    """
    if isinstance(field, CyclicQuarticParams):
        a, b, c, d = field.a, field.b, field.c, field.d
        products = {
            (1, 1): [d, 0, 0, 0],
            (1, 2): [0, 0, b, c],
            (1, 3): [0, 0, c, -b],
            (2, 2): [a * d, a * b, 0, 0],
            (2, 3): [0, a * c, 0, 0],
            (3, 3): [a * d, -a * b, 0, 0],
        }
    else:
        m, n, k, d = field.m, field.n, field.k, field.d
        products = {
            (1, 1): [m, 0, 0, 0],
            (1, 2): [0, 0, 0, d],
            (1, 3): [0, 0, m // d, 0],
            (2, 2): [n, 0, 0, 0],
            (2, 3): [0, n // d, 0, 0],
            (3, 3): [k, 0, 0, 0],
        }
    table = [[None] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(4):
            if i == 0:
                vec = [Fraction(1 if t == j else 0) for t in range(4)]
            elif j == 0:
                vec = [Fraction(1 if t == i else 0) for t in range(4)]
            else:
                vec = [Fraction(x) for x in products[(min(i, j), max(i, j))]]
            table[i][j] = vec
    return table


def multiply(u: Sequence, v: Sequence, table: list) -> Vec:
    """Product of two field elements given by coordinates over the reference basis."""
    out = [Fraction(0)] * 4
    for i in range(4):
        if not u[i]:
            continue
        for j in range(4):
            coef = u[i] * v[j]
            if not coef:
                continue
            cell = table[i][j]
            for t in range(4):
                out[t] += coef * cell[t]
    return out


# ---- Gram matrices ----

def _unit(i: int) -> Vec:
    return [Fraction(1 if t == i else 0) for t in range(4)]


def gram_classical(field: FieldParams) -> GramMatrix:
    """Gram matrix of the Galois group action over the reference basis.

    Cyclic rows are 1, sigma, sigma^2, sigma^3 with sigma = (z, w, -z, -w);
    biquadratic rows are 1, sigma, tau, sigma*tau acting by sign flips on the
    three radicals.
    """
    if isinstance(field, CyclicQuarticParams):
        signatures = [
            [(0, 1), (1, 1), (2, 1), (3, 1)],
            [(0, 1), (1, -1), (3, 1), (2, -1)],
            [(0, 1), (1, 1), (2, -1), (3, -1)],
            [(0, 1), (1, -1), (3, -1), (2, 1)],
        ]
        rows = []
        for sig in signatures:
            rows.append([[Fraction(s if t == pos else 0) for t in range(4)] for pos, s in sig])
        return rows
    sign_rows = [
        [1, 1, 1, 1],
        [1, -1, 1, -1],
        [1, 1, -1, -1],
        [1, -1, -1, 1],
    ]
    return [
        [[Fraction(signs[j] if t == j else 0) for t in range(4)] for j in range(4)]
        for signs in sign_rows
    ]


# For each non-classical family: the classical row acting as mu, the rows
# acting as eta and mu*eta, and the reference-basis index of the quadratic
# element z multiplied into the difference row.
_NONCLASSICAL_RECIPE = {
    CYCLIC_NONCLASSICAL: (2, 1, 3, 1),
    BIQUAD_H1: (2, 1, 3, 1),
    BIQUAD_H2: (1, 2, 3, 2),
    BIQUAD_H3: (3, 1, 2, 3),
}


def gram_nonclassical(field: FieldParams, structure: StructureId) -> GramMatrix:
    """Gram matrix of a non-classical structure over the reference basis.

    Rows follow the basis (Id, mu, eta + mu*eta, z*(eta - mu*eta)): the first
    is the identity row, the second a single classical row, the third the sum
    of two classical rows, and the fourth z times their difference, expanded
    through the multiplication table.
    """
    if structure.family not in _NONCLASSICAL_RECIPE:
        raise ValidationError(f"not a non-classical structure: {structure.family}")
    if isinstance(field, CyclicQuarticParams) != (structure.family == CYCLIC_NONCLASSICAL):
        raise ValidationError(f"structure {structure.family} does not match the field family")
    mu, eta, mu_eta, z_index = _NONCLASSICAL_RECIPE[structure.family]
    classical = gram_classical(field)
    table = mult_table(field)
    z_vec = _unit(z_index)
    row1 = classical[0]
    row2 = classical[mu]
    row3 = [
        [classical[eta][j][t] + classical[mu_eta][j][t] for t in range(4)] for j in range(4)
    ]
    row4 = [
        multiply(
            z_vec,
            [classical[eta][j][t] - classical[mu_eta][j][t] for t in range(4)],
            table,
        )
        for j in range(4)
    ]
    return [row1, row2, row3, row4]


def change_basis(gram: GramMatrix, descriptor: Sequence[Sequence]) -> GramMatrix:
    """Re-express a Gram matrix in the integral basis given by the descriptor.

    The descriptor rows are the integral basis elements in reference-basis
    coordinates.  New column j is the action on gamma_j (a combination of old
    columns), and every resulting element is rewritten in integral-basis
    coordinates.
    """
    desc = [[Fraction(x) for x in row] for row in descriptor]
    try:
        to_integral = mat_inv([[desc[j][t] for j in range(4)] for t in range(4)])
    except RankDeficientError as exc:
        raise SingularDescriptorError("basis descriptor is singular") from exc
    out = []
    for i in range(4):
        new_row = []
        for j in range(4):
            combined = [Fraction(0)] * 4
            for l in range(4):
                coef = desc[j][l]
                if not coef:
                    continue
                for t in range(4):
                    combined[t] += coef * gram[i][l][t]
            new_row.append([
                sum(to_integral[t][s] * combined[s] for s in range(4)) for t in range(4)
            ])
        out.append(new_row)
    return out


# ---- action matrix and reduction ----

def action_matrix(gram: GramMatrix) -> list:
    """16x4 matrix: block j holds columns (w_i . gamma_j) for i = 1..4."""
    rows = []
    for j in range(4):
        for t in range(4):
            rows.append([gram[i][j][t] for i in range(4)])
    return rows


@dataclass(frozen=True)
class ReductionReport:
    """Associated-order data extracted from an action matrix.

    `hnf` is the invertible 4x4 Hermite form D of the action matrix; `index`
    is |det D|, the module index of the span of W inside the associated
    order; `order_basis` holds the columns of D^{-1}: the W-coordinates of a
    basis of the associated order (membership x is equivalent to D*x being
    integral, so the order is the preimage of the integer lattice under D).
    """

    hnf: list
    index: Fraction
    order_basis: list


def reduction_report(action: Sequence[Sequence]) -> ReductionReport:
    result = reduce_action_matrix(action)
    d_matrix = [
        [result.content * Fraction(x) for x in row] for row in result.hnf
    ]
    if len(d_matrix) != 4:
        raise RankDeficientError("action matrix does not have full column rank")
    index = abs(det(d_matrix))
    inverse = mat_inv(d_matrix)
    basis_columns = [[inverse[t][i] for t in range(4)] for i in range(4)]
    return ReductionReport(hnf=d_matrix, index=index, order_basis=basis_columns)


def generator_determinant(action: Sequence[Sequence], beta: Sequence[int]) -> Fraction:
    """Exact determinant of sum_j beta_j * (block j of the action matrix)."""
    combined = [[Fraction(0)] * 4 for _ in range(4)]
    for j in range(4):
        if not beta[j]:
            continue
        for t in range(4):
            row = action[4 * j + t]
            for i in range(4):
                combined[t][i] += beta[j] * row[i]
    return det(combined)


def test_generator(report: ReductionReport, action: Sequence[Sequence], beta: Sequence[int]) -> bool:
    """True iff beta freely generates: |det of its action| equals the index."""
    return abs(generator_determinant(action, beta)) == report.index


# ---- custom Gram ingestion ----

def parse_gram_text(text: str) -> GramMatrix:
    """Parse a Gram matrix from plain text.

    Four non-empty lines, each with four whitespace-separated entries; every
    entry is a comma-separated 4-tuple of exact rationals like 3/4 or -2.
    Lines starting with '#' are ignored.
    """
    lines = [
        line.strip()
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if len(lines) != 4:
        raise GramFormatError(f"expected 4 matrix lines, got {len(lines)}")
    gram = []
    for line_no, line in enumerate(lines, start=1):
        entries = line.split()
        if len(entries) != 4:
            raise GramFormatError(f"line {line_no}: expected 4 entries, got {len(entries)}")
        row = []
        for entry in entries:
            parts = entry.split(",")
            if len(parts) != 4:
                raise GramFormatError(
                    f"line {line_no}: entry {entry!r} is not a 4-tuple"
                )
            try:
                row.append([Fraction(p) for p in parts])
            except (ValueError, ZeroDivisionError) as exc:
                raise GramFormatError(f"line {line_no}: bad rational in {entry!r}") from exc
        gram.append(row)
    return gram


def format_gram_text(gram: GramMatrix) -> str:
    """Inverse of parse_gram_text."""
    return "\n".join(
        " ".join(",".join(str(x) for x in entry) for entry in row) for row in gram
    )
