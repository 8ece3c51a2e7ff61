"""Membership certificates for the 3x+1 semigroup and its inverse.

A certificate is a target rational together with a multiset of
generators with exponents; it proves membership by exact evaluation.
Side S is generated by 2 and (2k+1)/(3k+2), side W by 1/2 and
g(k) = (3k+2)/(2k+1).  The wire keyword for the first generator in
each family is `half` (value 2 on side S, 1/2 on side W), everything
else is `g <k>`.

The module also carries the seven built-in W-certificates for the
hand-made targets 5, 7, 11, 13, 23, 29, 43, plus a verbatim copy of
the printed two-line transcription they came from.  The transcription
has two defects (see raw_base_table_report), so the built-in table is
the repaired form, and the checker exists precisely so the repair is
visible instead of silent.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .core import ONE, format_rational, parse_rational


class Side(enum.Enum):
    S = "S"
    W = "W"

    def flipped(self) -> "Side":
        return Side.W if self is Side.S else Side.S

    def __str__(self) -> str:
        return self.value


class CertificateError(ValueError):
    """Misuse of the certificate algebra (side clash, bad inversion, ...)."""


class CertificateParseError(ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


@dataclass(frozen=True)
class GeneratorRef:
    """One generator of S or W; index None is the `half` token."""

    side: Side
    index: Optional[int] = None

    def __post_init__(self) -> None:
        if self.index is not None and self.index < 0:
            raise ValueError(f"generator index must be nonnegative, got {self.index}")

    @property
    def is_half(self) -> bool:
        return self.index is None

    def value(self) -> Fraction:
        if self.index is None:
            return Fraction(2) if self.side is Side.S else Fraction(1, 2)
        k = self.index
        if self.side is Side.S:
            return Fraction(2 * k + 1, 3 * k + 2)
        return Fraction(3 * k + 2, 2 * k + 1)

    def counterpart(self) -> "GeneratorRef":
        """Same generator slot on the opposite side (reciprocal value)."""
        return GeneratorRef(self.side.flipped(), self.index)

    def _sort_key(self) -> tuple[int, int]:
        # half sorts before every indexed generator
        return (0, 0) if self.index is None else (1, self.index)

    def __str__(self) -> str:
        return "half" if self.index is None else f"g({self.index})"


def half_ref(side: Side) -> GeneratorRef:
    return GeneratorRef(side, None)


def g_ref(side: Side, k: int) -> GeneratorRef:
    return GeneratorRef(side, k)


@dataclass(frozen=True)
class Certificate:
    """Target rational plus generator multiset; immutable and canonical.

    Construction merges duplicate generators and sorts, so equality is
    structural.  Nonpositive exponents and side clashes are preserved
    for verify_certificate to flag; they are not constructor errors.
    """

    side: Side
    target: Fraction
    factors: tuple[tuple[GeneratorRef, int], ...]

    def __post_init__(self) -> None:
        if self.target <= 0:
            raise ValueError(f"certificate target must be positive, got {self.target}")
        merged: dict[GeneratorRef, int] = {}
        for ref, exp in self.factors:
            merged[ref] = merged.get(ref, 0) + exp
        canon = tuple(
            sorted(merged.items(), key=lambda it: (it[0]._sort_key(), it[0].side.value))
        )
        object.__setattr__(self, "factors", canon)

    @property
    def generator_count(self) -> int:
        return len(self.factors)

    def exponent_of(self, ref: GeneratorRef) -> int:
        for r, e in self.factors:
            if r == ref:
                return e
        return 0


class VerifyStatus(enum.Enum):
    PASS = "pass"
    MISMATCH = "mismatch"
    INVALID = "invalid"


@dataclass(frozen=True)
class VerifyResult:
    status: VerifyStatus
    target: Fraction
    evaluated: Optional[Fraction] = None
    reason: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.status is VerifyStatus.PASS


def eval_certificate(cert: Certificate) -> Fraction:
    """Exact product of all generator values to their exponents.

    Does not look at the target; an empty factor list is the empty
    product 1.  Numerator and denominator are accumulated as plain
    integers and reduced once at the end: reducing after every factor
    (what a running Fraction product does) spends most of its time in
    gcd on certificates with thousands of factors.
    """
    num = den = 1
    for ref, exp in cert.factors:
        value = ref.value() ** exp  # exact for any sign of exp
        num *= value.numerator
        den *= value.denominator
    return Fraction(num, den)


def verify_certificate(cert: Certificate) -> VerifyResult:
    """Pass iff the product equals the target exactly.

    Structural violations (a factor on the wrong side, a nonpositive
    exponent) come back as INVALID rather than pass/fail, so callers
    can distinguish a wrong identity from a malformed object.
    """
    for ref, exp in cert.factors:
        if ref.side is not cert.side:
            return VerifyResult(
                VerifyStatus.INVALID,
                cert.target,
                reason=f"factor {ref} is on side {ref.side}, certificate is side {cert.side}",
            )
        if exp < 1:
            return VerifyResult(
                VerifyStatus.INVALID,
                cert.target,
                reason=f"factor {ref} has nonpositive exponent {exp}",
            )
    product = eval_certificate(cert)
    if product != cert.target:
        return VerifyResult(
            VerifyStatus.MISMATCH,
            cert.target,
            evaluated=product,
            reason=f"product {format_rational(product)} != target {format_rational(cert.target)}",
        )
    return VerifyResult(VerifyStatus.PASS, cert.target, evaluated=product)


def invert_certificate(cert: Certificate) -> Certificate:
    """Mirror a verifying certificate to the opposite side, reciprocal target."""
    check = verify_certificate(cert)
    if not check.ok:
        raise CertificateError(f"refusing to invert a certificate that does not verify: {check.reason}")
    return Certificate(
        side=cert.side.flipped(),
        target=1 / cert.target,
        factors=tuple((ref.counterpart(), exp) for ref, exp in cert.factors),
    )


def multiply_certificates(a: Certificate, b: Certificate) -> Certificate:
    if a.side is not b.side:
        raise CertificateError(f"cannot multiply certificates across sides {a.side} and {b.side}")
    return Certificate(a.side, a.target * b.target, a.factors + b.factors)


def certificate_power(cert: Certificate, exponent: int) -> Certificate:
    """cert raised to a positive integer power, exponentwise."""
    if exponent < 1:
        raise CertificateError(f"certificate power wants exponent >= 1, got {exponent}")
    return Certificate(
        cert.side,
        cert.target**exponent,
        tuple((ref, exp * exponent) for ref, exp in cert.factors),
    )


def identity_certificate(side: Side) -> Certificate:
    return Certificate(side, ONE, ())


# ---------------------------------------------------------------------------
# Built-in base certificates.
#
# The seven targets below were found by hand, not by the constructive
# search, and are shipped as data.  Each row is (target, ((k, exp), ...))
# with k = None meaning the half token.  The row for 13 is repaired:
# the transcription we inherited prints g(5)^3, whose product is
# 13*(17/11)^2, not 13; with g(5)^1 the row is exactly 11 * (1/2) g(5)
# g(8) = 13/11 times the row for 11, and it verifies.  The verbatim
# transcription is kept further down for raw_base_table_report().
# ---------------------------------------------------------------------------

BASE_TARGETS = (5, 7, 11, 13, 23, 29, 43)

_BASE_ROWS: tuple[tuple[int, tuple[tuple[Optional[int], int], ...]], ...] = (
    (5, ((None, 2), (3, 2), (5, 1), (8, 1), (27, 1), (32, 1), (41, 1))),
    (7, ((None, 2), (3, 1), (8, 1), (11, 1), (71, 1), (99, 1), (107, 1), (123, 1), (132, 1))),
    (11, ((None, 2), (3, 2), (8, 1), (11, 1), (71, 1), (99, 1), (107, 1), (123, 1), (132, 1))),
    (13, ((None, 3), (3, 2), (5, 1), (8, 2), (11, 1), (71, 1), (99, 1), (107, 1), (123, 1), (132, 1))),
    (
        23,
        (
            (None, 5),
            (3, 1),
            (8, 1),
            (11, 1),
            (15, 1),
            (45, 1),
            (51, 1),
            (68, 1),
            (71, 1),
            (99, 2),
            (107, 1),
            (117, 1),
            (123, 1),
            (132, 2),
            (176, 1),
        ),
    ),
    (
        29,
        ((None, 5), (3, 4), (5, 2), (8, 2), (9, 1), (12, 1), (27, 2), (32, 2), (41, 2)),
    ),
    (
        43,
        (
            (None, 11),
            (3, 5),
            (5, 2),
            (8, 3),
            (9, 1),
            (11, 1),
            (12, 1),
            (27, 2),
            (32, 2),
            (41, 2),
            (71, 1),
            (99, 1),
            (101, 1),
            (107, 1),
            (114, 1),
            (123, 1),
            (132, 1),
            (152, 1),
        ),
    ),
)


def _w_certificate(target: int, rows: tuple[tuple[Optional[int], int], ...]) -> Certificate:
    factors = tuple((GeneratorRef(Side.W, k), exp) for k, exp in rows)
    return Certificate(Side.W, Fraction(target), factors)


def base_table() -> tuple[Certificate, ...]:
    """The seven built-in W-certificates, every one of which verifies."""
    return tuple(_w_certificate(target, rows) for target, rows in _BASE_ROWS)


def base_certificate(target: int) -> Certificate:
    for t, rows in _BASE_ROWS:
        if t == target:
            return _w_certificate(t, rows)
    raise KeyError(f"no built-in certificate for {target}; have {BASE_TARGETS}")


# ---------------------------------------------------------------------------
# Verbatim transcription of the printed table the base certificates
# came from.  Each target is printed twice: once as explicit fractions
# (num, den, exp) and once by generator index (k, exp), k = None for
# the leading (1/2)^e.  Two rows are defective and the checker below
# must say so:
#   - 13: both printed lines multiply to 3757/121, not 13 (the g(5)
#     exponent should be 1, not 3);
#   - 43: the fraction line prints (125/87)^2 where the index line has
#     g(41)^2 = (125/83)^2; 125/87 is not any wild generator.
# ---------------------------------------------------------------------------

RAW_FRACTION_LINES: dict[int, tuple[tuple[int, int, int], ...]] = {
    5: ((1, 2, 2), (11, 7, 2), (17, 11, 1), (26, 17, 1), (83, 55, 1), (98, 65, 1), (125, 83, 1)),
    7: (
        (1, 2, 2),
        (11, 7, 1),
        (26, 17, 1),
        (35, 23, 1),
        (215, 143, 1),
        (299, 199, 1),
        (323, 215, 1),
        (371, 247, 1),
        (398, 265, 1),
    ),
    11: (
        (1, 2, 2),
        (11, 7, 2),
        (26, 17, 1),
        (35, 23, 1),
        (215, 143, 1),
        (299, 199, 1),
        (323, 215, 1),
        (371, 247, 1),
        (398, 265, 1),
    ),
    13: (
        (1, 2, 3),
        (11, 7, 2),
        (17, 11, 3),
        (26, 17, 2),
        (35, 23, 1),
        (215, 143, 1),
        (299, 199, 1),
        (323, 215, 1),
        (371, 247, 1),
        (398, 265, 1),
    ),
    23: (
        (1, 2, 5),
        (11, 7, 1),
        (26, 17, 1),
        (35, 23, 1),
        (47, 31, 1),
        (137, 91, 1),
        (155, 103, 1),
        (206, 137, 1),
        (215, 143, 1),
        (299, 199, 2),
        (323, 215, 1),
        (353, 235, 1),
        (371, 247, 1),
        (398, 265, 2),
        (530, 353, 1),
    ),
    29: (
        (1, 2, 5),
        (11, 7, 4),
        (17, 11, 2),
        (26, 17, 2),
        (29, 19, 1),
        (38, 25, 1),
        (83, 55, 2),
        (98, 65, 2),
        (125, 83, 2),
    ),
    43: (
        (1, 2, 11),
        (11, 7, 5),
        (17, 11, 2),
        (26, 17, 3),
        (29, 19, 1),
        (35, 23, 1),
        (38, 25, 1),
        (83, 55, 2),
        (98, 65, 2),
        (125, 87, 2),
        (215, 143, 1),
        (299, 199, 1),
        (305, 203, 1),
        (323, 215, 1),
        (344, 229, 1),
        (371, 247, 1),
        (398, 265, 1),
        (458, 305, 1),
    ),
}

RAW_GINDEX_LINES: dict[int, tuple[tuple[Optional[int], int], ...]] = {
    target: rows for target, rows in _BASE_ROWS
}
# the printed index line for 13 has the same defect as its fraction line
RAW_GINDEX_LINES[13] = (
    (None, 3),
    (3, 2),
    (5, 3),
    (8, 2),
    (11, 1),
    (71, 1),
    (99, 1),
    (107, 1),
    (123, 1),
    (132, 1),
)


@dataclass(frozen=True)
class RawRowReport:
    target: int
    issues: tuple[str, ...]

    @property
    def clean(self) -> bool:
        return not self.issues


def _index_for_fraction(num: int, den: int) -> Optional[int] | str:
    """Map a printed fraction to its generator index; 1/2 maps to the
    half token (None), anything that is no g(k) maps to 'no-match'."""
    if (num, den) == (1, 2):
        return None
    if num % 3 == 2:
        k = (num - 2) // 3
        if den == 2 * k + 1:
            return k
    return "no-match"


def raw_base_table_report(check_fraction_lines: bool = True) -> tuple[RawRowReport, ...]:
    """Audit the verbatim transcription against exact arithmetic.

    For each target: multiply out the index line, multiply out the
    fraction line, and map each printed fraction back to a generator
    index to confirm the two lines describe the same multiset.  Any
    disagreement or non-generator fraction becomes an issue string.
    With check_fraction_lines=False only the index lines are audited.
    """
    reports = []
    for target in BASE_TARGETS:
        issues: list[str] = []
        gindex = RAW_GINDEX_LINES[target]
        product = ONE
        for k, exp in gindex:
            product *= GeneratorRef(Side.W, k).value() ** exp
        if product != target:
            issues.append(
                f"index line multiplies to {format_rational(product)}, not {target}"
            )
        if check_fraction_lines:
            fline = RAW_FRACTION_LINES[target]
            fproduct = ONE
            mapped: dict[Optional[int], int] = {}
            for num, den, exp in fline:
                fproduct *= Fraction(num, den) ** exp
                k = _index_for_fraction(num, den)
                if k == "no-match":
                    issues.append(f"printed fraction {num}/{den} is not any wild generator")
                else:
                    mapped[k] = mapped.get(k, 0) + exp
            if fproduct != target:
                issues.append(
                    f"fraction line multiplies to {format_rational(fproduct)}, not {target}"
                )
            if all(_index_for_fraction(n, d) != "no-match" for n, d, _ in fline):
                if mapped != {k: e for k, e in gindex}:
                    issues.append("fraction line and index line disagree as multisets")
        reports.append(RawRowReport(target, tuple(issues)))
    return tuple(reports)


# ---------------------------------------------------------------------------
# Wire format.
#
#   CERT v1 <S|W>
#   target <num>/<den>       (the /den part is mandatory, /1 included)
#   half <exp>               (optional, at most once)
#   g <k> <exp>              (sorted by k, at most one line per k)
#
# '#' starts a comment; blank lines are ignored.
# ---------------------------------------------------------------------------


def serialize_certificate(cert: Certificate) -> str:
    check_side = all(ref.side is cert.side for ref, _ in cert.factors)
    if not check_side or any(exp < 1 for _, exp in cert.factors):
        raise CertificateError("cannot serialize a structurally invalid certificate")
    lines = [f"CERT v1 {cert.side}", f"target {format_rational(cert.target)}"]
    for ref, exp in cert.factors:  # canonical order: half first, then k ascending
        if ref.is_half:
            lines.append(f"half {exp}")
        else:
            lines.append(f"g {ref.index} {exp}")
    return "\n".join(lines) + "\n"


def _parse_exp(token: str, lineno: int) -> int:
    try:
        exp = int(token, 10)
    except ValueError:
        raise CertificateParseError(lineno, f"exponent is not an integer: {token!r}") from None
    if exp < 1:
        raise CertificateParseError(lineno, f"exponent must be >= 1, got {exp}")
    return exp


def parse_certificate(text: str) -> Certificate:
    side: Optional[Side] = None
    target: Optional[Fraction] = None
    factors: list[tuple[GeneratorRef, int]] = []
    seen_half = False
    last_k = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if side is None:
            if parts[0] != "CERT":
                raise CertificateParseError(lineno, f"expected CERT header, got {parts[0]!r}")
            if len(parts) != 3 or parts[1] != "v1":
                raise CertificateParseError(lineno, "header must be exactly 'CERT v1 <S|W>'")
            if parts[2] not in ("S", "W"):
                raise CertificateParseError(lineno, f"unknown side {parts[2]!r}")
            side = Side(parts[2])
            continue
        if parts[0] == "CERT":
            raise CertificateParseError(lineno, "stray second CERT header")
        if parts[0] == "target":
            if target is not None:
                raise CertificateParseError(lineno, "duplicate target line")
            if len(parts) != 2 or "/" not in parts[1]:
                raise CertificateParseError(lineno, "target must be 'target <num>/<den>'")
            try:
                target = parse_rational(parts[1])
            except ValueError as exc:
                raise CertificateParseError(lineno, str(exc)) from None
            continue
        if target is None:
            raise CertificateParseError(lineno, "target line must precede generator lines")
        if parts[0] == "half":
            if len(parts) != 2:
                raise CertificateParseError(lineno, "half line must be 'half <exp>'")
            if seen_half:
                raise CertificateParseError(lineno, "duplicate half line")
            seen_half = True
            factors.append((GeneratorRef(side, None), _parse_exp(parts[1], lineno)))
            continue
        if parts[0] == "g":
            if len(parts) != 3:
                raise CertificateParseError(lineno, "generator line must be 'g <k> <exp>'")
            try:
                k = int(parts[1], 10)
            except ValueError:
                raise CertificateParseError(lineno, f"generator index is not an integer: {parts[1]!r}") from None
            if k < 0:
                raise CertificateParseError(lineno, f"generator index must be >= 0, got {k}")
            if k <= last_k:
                raise CertificateParseError(lineno, f"g lines must be strictly sorted by k, got {k} after {last_k}")
            last_k = k
            factors.append((GeneratorRef(side, k), _parse_exp(parts[2], lineno)))
            continue
        raise CertificateParseError(lineno, f"unknown line keyword {parts[0]!r}")
    if side is None:
        raise CertificateParseError(1, "empty input, expected CERT header")
    if target is None:
        raise CertificateParseError(1, "missing target line")
    return Certificate(side, target, tuple(factors))
