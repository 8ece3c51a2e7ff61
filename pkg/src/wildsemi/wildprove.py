"""The arithmetic engine: sieves, smooth pairs, constructive certificates.

This module turns the existence arguments into running code.  A prime
q coprime to 3 gets a W-certificate through the smooth-pair route:
choose a in 1..8 with a*q = -1 mod 9, set r = (2aq-1)/3, find two
q-smooth integers s1, s2 below 6q and coprime to 6q whose product
lies in the progression 6q*k + r, and then n = 9k + a satisfies
n*q = 3l + 2 with 2l + 1 = s1*s2, so

    q = (1/n) * g(l) * s1 * s2

with every piece already in W by recursion on strictly smaller primes
(the recursion bottoms out at the built-in certificates for 2, 5, 7
and 11).  The same module houses the multiplier lift on the classes
-1 mod 2^k, the one-step reduction that combines the lift with the
coverage table, the prime-counting inequality, and the induction
driver that stitches all of it together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .certify import (
    BASE_TARGETS,
    Certificate,
    GeneratorRef,
    Side,
    base_certificate,
    certificate_power,
    identity_certificate,
    invert_certificate,
    multiply_certificates,
    parse_certificate,
    serialize_certificate,
    verify_certificate,
)
from .core import DEFAULT_TRAJECTORY_BUDGET, format_rational, t_iterate, trajectory_to_one
from .residue import CoverageTable, load_builtin_coverage, replay_steps, verify_coverage_table

ONESTEP_BOUND = Fraction(1235, 1264)
# (130/128) * (76/79): lift stretch at j >= 7 times the cover's worst ratio


class SieveTooSmallError(ValueError):
    pass


class NotInSemigroupError(ValueError):
    """The requested target provably lies outside the semigroup."""


class BudgetExhaustedError(RuntimeError):
    pass


class SmoothPairExhaustionError(RuntimeError):
    """No q-smooth pair below 6q hits the progression; small q only."""


class InductionError(RuntimeError):
    def __init__(self, k: int, hypothesis: int, witness: object, message: str):
        self.k = k
        self.hypothesis = hypothesis
        self.witness = witness
        super().__init__(f"k={k} hypothesis={hypothesis} witness={witness}: {message}")


# --------------------------------------------------------------------------
# Primes.
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeSieve:
    """Eratosthenes table with prefix prime counts for exact pi queries."""

    limit: int
    flags: np.ndarray
    counts: np.ndarray

    @classmethod
    def build(cls, limit: int) -> "PrimeSieve":
        if limit < 2:
            raise ValueError(f"sieve limit must be >= 2, got {limit}")
        flags = np.ones(limit + 1, dtype=bool)
        flags[:2] = False
        for p in range(2, math.isqrt(limit) + 1):
            if flags[p]:
                flags[p * p :: p] = False
        counts = np.cumsum(flags, dtype=np.int64)
        return cls(limit=limit, flags=flags, counts=counts)

    def is_prime(self, n: int) -> bool:
        if n > self.limit:
            raise SieveTooSmallError(f"sieve limit {self.limit} < {n}")
        return bool(self.flags[n]) if n >= 0 else False

    def pi(self, x: int) -> int:
        """Number of primes <= x."""
        if x > self.limit:
            raise SieveTooSmallError(f"sieve limit {self.limit} < {x}")
        return int(self.counts[x]) if x >= 2 else 0

    def primes(self, lo: int = 2, hi: Optional[int] = None) -> np.ndarray:
        hi = self.limit if hi is None else hi
        if hi > self.limit:
            raise SieveTooSmallError(f"sieve limit {self.limit} < {hi}")
        idx = np.nonzero(self.flags[: hi + 1])[0]
        return idx[idx >= lo]


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by 2-3-wheel trial division; fine to ~10^12."""
    if n < 1:
        raise ValueError(f"factorize wants a positive integer, got {n}")
    factors: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    p = 5
    step = 2  # alternate +2, +4 through 6k +- 1
    while p * p <= n:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
        p += step
        step = 6 - step
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def is_prime_int(n: int) -> bool:
    if n < 2:
        return False
    return factorize(n) == {n: 1}


def largest_prime_factor(n: int) -> int:
    if n == 1:
        return 1
    return max(factorize(n))


def is_q_smooth(n: int, q: int) -> bool:
    """All prime factors strictly below q (1 is smooth for every q)."""
    return largest_prime_factor(n) < q


# --------------------------------------------------------------------------
# The smooth-pair construction.
# --------------------------------------------------------------------------


def compute_a_r(q: int) -> tuple[int, int]:
    """The canonical residues of the construction for a prime q, 3 not dividing q.

    a is least in 1..8 with a*q = -1 mod 9 and r = (2aq-1)/3, which is
    always an integer with r = 5 mod 6 and gcd(r, 6q) = 1.
    """
    if q % 3 == 0:
        raise ValueError(f"q must not be divisible by 3, got {q}")
    if not is_prime_int(q):
        raise ValueError(f"q must be prime, got {q}")
    a = next(a for a in range(1, 9) if (a * q) % 9 == 8)
    r, rem = divmod(2 * a * q - 1, 3)
    assert rem == 0 and r % 6 == 5 and math.gcd(r, 6 * q) == 1
    return a, r


def smooth_residues(q: int, sieve: Optional[PrimeSieve] = None) -> tuple[int, ...]:
    """All q-smooth s in (0, 6q) coprime to 6q, 1 included, ascending."""
    if q < 5 or not is_prime_int(q):
        raise ValueError(f"smooth_residues wants a prime >= 5, got {q}")
    limit = 6 * q - 1
    if sieve is None or sieve.limit < limit:
        sieve = PrimeSieve.build(limit)
    gpf = np.zeros(limit + 1, dtype=np.int64)
    for p in sieve.primes(2, limit):
        gpf[p::p] = p
    s = np.arange(limit + 1)
    keep = (s % 2 == 1) & (s % 3 != 0) & (gpf < q) & (s > 0)
    # gpf < q already rules out the multiples q and 5q, so coprimality
    # to 6q needs no extra test
    return tuple(int(v) for v in s[keep])


@dataclass(frozen=True)
class SmoothMajorityVerdict:
    q: int
    size: int
    threshold: int  # q - 1
    invertible_classes: int  # phi(6q) = 2(q-1)
    passed: bool

    @property
    def majority(self) -> bool:
        # size > q - 1 is exactly "more than half of the invertible classes"
        return 2 * self.size > self.invertible_classes


def smooth_majority_check(q: int, sieve: Optional[PrimeSieve] = None) -> SmoothMajorityVerdict:
    """Does the smooth set fill more than half the invertible classes mod 6q?

    Guaranteed for q >= 257; smaller primes are allowed here so the
    failure (e.g. q = 13 has 9 smooth residues against threshold 12)
    stays demonstrable.
    """
    size = len(smooth_residues(q, sieve))
    return SmoothMajorityVerdict(
        q=q,
        size=size,
        threshold=q - 1,
        invertible_classes=2 * (q - 1),
        passed=size > q - 1,
    )


def smooth_counts_up_to(q_max: int) -> np.ndarray:
    """counts[q] = number of q-smooth s in (0, 6q) coprime to 6q, for all q <= q_max.

    One shared greatest-prime-factor sieve up to 6*q_max: an s coprime
    to 6 is counted for prime q exactly when q > gpf(s) and 6q > s, so
    each s contributes from threshold max(floor(s/6) + 1, gpf(s) + 1)
    upward, and a cumulative sum finishes the job.  Independent of the
    prime-counting route on purpose; the two are compared, not merged.
    """
    limit = 6 * q_max
    sieve = PrimeSieve.build(limit)
    gpf = np.zeros(limit + 1, dtype=np.int64)
    for p in sieve.primes(2, limit):
        gpf[p::p] = p
    s = np.arange(limit + 1, dtype=np.int64)
    coprime6 = (s % 2 == 1) & (s % 3 != 0)
    thresholds = np.maximum(s // 6 + 1, gpf + 1)[coprime6]
    thresholds = thresholds[thresholds <= q_max]
    counts = np.bincount(thresholds, minlength=q_max + 1)
    return np.cumsum(counts)


@dataclass(frozen=True)
class RangeCheckSummary:
    q_min: int
    q_max: int
    checked: int
    failures: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def smooth_majority_range(q_min: int, q_max: int) -> RangeCheckSummary:
    """The majority bound for every prime q in [q_min, q_max], batched."""
    counts = smooth_counts_up_to(q_max)
    sieve = PrimeSieve.build(q_max)
    qs = [int(q) for q in sieve.primes(max(q_min, 5), q_max)]
    failures = tuple(q for q in qs if counts[q] <= q - 1)
    return RangeCheckSummary(q_min=q_min, q_max=q_max, checked=len(qs), failures=failures)


@dataclass(frozen=True)
class PiInequalityVerdict:
    q: int
    above_q: int  # pi(6q) - pi(q)
    above_q_fifth: int  # pi(floor(6q/5)) - pi(q)
    bound: int  # q - 2
    passed: bool


def pi_inequality_check(q: int, sieve: Optional[PrimeSieve] = None) -> PiInequalityVerdict:
    """(pi(6q) - pi(q)) + (pi(floor(6q/5)) - pi(q)) <= q - 2, exactly."""
    if q <= 256:
        raise ValueError(f"the inequality is asserted for q > 256 only, got {q}")
    if sieve is None:
        sieve = PrimeSieve.build(6 * q)
    if sieve.limit < 6 * q:
        raise SieveTooSmallError(f"sieve limit {sieve.limit} < 6q = {6 * q}")
    above_q = sieve.pi(6 * q) - sieve.pi(q)
    above_fifth = sieve.pi(6 * q // 5) - sieve.pi(q)
    return PiInequalityVerdict(
        q=q,
        above_q=above_q,
        above_q_fifth=above_fifth,
        bound=q - 2,
        passed=above_q + above_fifth <= q - 2,
    )


def pi_inequality_range(q_min: int, q_max: int) -> RangeCheckSummary:
    """The inequality for every integer q in [q_min, q_max], batched."""
    if q_min <= 256:
        raise ValueError(f"range must start above 256, got {q_min}")
    sieve = PrimeSieve.build(6 * q_max)
    counts = sieve.counts
    qs = np.arange(q_min, q_max + 1, dtype=np.int64)
    lhs = (counts[6 * qs] - counts[qs]) + (counts[6 * qs // 5] - counts[qs])
    bad = qs[lhs > qs - 2]
    return RangeCheckSummary(
        q_min=q_min, q_max=q_max, checked=len(qs), failures=tuple(int(b) for b in bad)
    )


@dataclass(frozen=True)
class SmoothWitness:
    """The data realizing q = (1/n) g(l) s1 s2; fully self-validating."""

    q: int
    a: int
    r: int
    s1: int
    s2: int
    k: int
    n: int

    def __post_init__(self) -> None:
        q, a, r, s1, s2, k, n = (
            self.q,
            self.a,
            self.r,
            self.s1,
            self.s2,
            self.k,
            self.n,
        )
        if not (1 <= a <= 8) or (a * q) % 9 != 8:
            raise ValueError(f"a = {a} is not the canonical residue for q = {q}")
        if 3 * r != 2 * a * q - 1 or r % 6 != 5:
            raise ValueError(f"r = {r} is not (2aq-1)/3 or not -1 mod 6")
        for s in (s1, s2):
            if not (0 < s < 6 * q) or math.gcd(s, 6 * q) != 1 or not is_q_smooth(s, q):
                raise ValueError(f"{s} is not a q-smooth unit below 6q for q = {q}")
        if s1 * s2 != 6 * q * k + r or not (0 <= k < 6 * q):
            raise ValueError(f"s1*s2 = {s1 * s2} is not 6qk + r with 0 <= k < 6q")
        if n != 9 * k + a or n >= 54 * q:
            raise ValueError(f"n = {n} is not 9k + a < 54q")
        if (n * q - 2) % 3 != 0 or 2 * ((n * q - 2) // 3) + 1 != s1 * s2:
            raise ValueError("n*q = 3l + 2 with 2l + 1 = s1*s2 fails")

    @property
    def l(self) -> int:
        return (self.n * self.q - 2) // 3


def _smooth_candidates(q: int):
    """Ascending q-smooth integers in (0, 6q) coprime to 6q, lazily."""
    s = 1
    step = 4  # walk 1, 5, 7, 11, ... (units mod 6)
    while s < 6 * q:
        if s % q != 0 and is_q_smooth(s, q):
            yield s
        s += step
        step = 6 - step


def find_smooth_pair(q: int) -> SmoothWitness:
    """Deterministic witness: smallest s1 whose forced partner is smooth.

    s2 is pinned by s1 (s2 = r * s1^-1 mod 6q), so scanning s1 in
    ascending order makes the witness reproducible.  Exhausting every
    smooth s1 below 6q raises; that happens only for small q where the
    smooth set is thin (q = 5, 7, 11), and those targets are built in.
    """
    if q < 5:
        raise ValueError(f"find_smooth_pair wants a prime >= 5, got {q}")
    a, r = compute_a_r(q)
    mod = 6 * q
    for s1 in _smooth_candidates(q):
        s2 = (r * pow(s1, -1, mod)) % mod
        if is_q_smooth(s2, q):
            k = (s1 * s2 - r) // mod
            return SmoothWitness(q=q, a=a, r=r, s1=s1, s2=s2, k=k, n=9 * k + a)
    raise SmoothPairExhaustionError(
        f"no q-smooth pair below {mod} lands in the progression {mod}k + {r} for q = {q}"
    )


# --------------------------------------------------------------------------
# Certificate stores and the shared construction context.
# --------------------------------------------------------------------------


class CertStore:
    """Directory of certificate files plus a rewritten store.idx index.

    File names: w-<m>.cert and s-<n>.cert for integer targets,
    s-<num>_<den>.cert for rational S targets.  The index lists
    `<filename> <target> <status>` per line, sorted.
    """

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _filename(self, cert: Certificate) -> Optional[str]:
        t = cert.target
        if cert.side is Side.W:
            return f"w-{t.numerator}.cert" if t.denominator == 1 else None
        if t.denominator == 1:
            return f"s-{t.numerator}.cert"
        return f"s-{t.numerator}_{t.denominator}.cert"

    def put(self, cert: Certificate) -> Optional[Path]:
        name = self._filename(cert)
        if name is None:
            return None
        path = self.root / name
        path.write_text(serialize_certificate(cert))
        self._rewrite_index()
        return path

    def get(self, side: Side, target: Fraction) -> Optional[Certificate]:
        probe = Certificate(side, target, ())
        name = self._filename(probe) if target != 1 else None
        if name is None:
            return None
        path = self.root / name
        if not path.exists():
            return None
        cert = parse_certificate(path.read_text())
        # stored files are untrusted; re-verify and re-match before use
        if cert.side is not side or cert.target != target or not verify_certificate(cert).ok:
            return None
        return cert

    def _rewrite_index(self) -> None:
        lines = []
        for path in sorted(self.root.glob("*.cert")):
            try:
                cert = parse_certificate(path.read_text())
                status = verify_certificate(cert).status.value
                target = format_rational(cert.target)
            except ValueError:
                status, target = "unparseable", "?"
            lines.append(f"{path.name} {target} {status}")
        (self.root / "store.idx").write_text("\n".join(lines) + "\n" if lines else "")


class WildContext:
    """Caches shared by the constructive operations.

    Holds verified W-certificates keyed by integer target (seeded with
    2, 5, 7, 11 only; the other built-ins are reconstructed, not
    assumed), smooth witnesses, the coverage table, the trajectory
    budget, and an optional persistent store.
    """

    def __init__(
        self,
        trajectory_budget: int = DEFAULT_TRAJECTORY_BUDGET,
        store: Optional[CertStore] = None,
        coverage: Optional[CoverageTable] = None,
    ):
        self.trajectory_budget = trajectory_budget
        self.store = store
        self._coverage = coverage
        self.certificates: dict[int, Certificate] = {
            2: Certificate(Side.W, Fraction(2), ((GeneratorRef(Side.W, 0), 1),)),
        }
        for seed in (5, 7, 11):
            self.certificates[seed] = base_certificate(seed)
        self.witnesses: dict[int, SmoothWitness] = {}

    @property
    def coverage(self) -> CoverageTable:
        if self._coverage is None:
            self._coverage = load_builtin_coverage()
        return self._coverage

    def witness_for(self, q: int) -> SmoothWitness:
        w = self.witnesses.get(q)
        if w is None:
            w = find_smooth_pair(q)
            self.witnesses[q] = w
        return w

    def remember(self, m: int, cert: Certificate) -> None:
        self.certificates[m] = cert
        if self.store is not None:
            self.store.put(cert)

    def recall(self, m: int) -> Optional[Certificate]:
        cert = self.certificates.get(m)
        if cert is None and self.store is not None:
            cert = self.store.get(Side.W, Fraction(m))
            if cert is not None:
                self.certificates[m] = cert
        return cert


# --------------------------------------------------------------------------
# Constructive certificates.
# --------------------------------------------------------------------------


def s_certificate_for_integer(
    n: int, budget: int = DEFAULT_TRAJECTORY_BUDGET
) -> Certificate:
    """Membership of an integer in S read off its trajectory to 1.

    Every even value contributes the doubling generator, every odd
    value 2k+1 contributes the index-k generator (2k+1)/(3k+2), and the
    terminal 1 = 2 * (1/2) contributes the pair {half, g 0}.
    """
    traj = trajectory_to_one(n, budget)
    if not traj.reached_one:
        raise BudgetExhaustedError(
            f"trajectory of {n} did not reach 1 within {budget} steps"
        )
    factors: list[tuple[GeneratorRef, int]] = []
    for v in traj.values[:-1]:
        if v & 1:
            factors.append((GeneratorRef(Side.S, (v - 1) // 2), 1))
        else:
            factors.append((GeneratorRef(Side.S, None), 1))
    factors.append((GeneratorRef(Side.S, None), 1))
    factors.append((GeneratorRef(Side.S, 0), 1))
    cert = Certificate(Side.S, Fraction(n), tuple(factors))
    check = verify_certificate(cert)
    assert check.ok, f"trajectory certificate for {n} failed: {check.reason}"
    return cert


def _witness_certificate(witness: SmoothWitness, context: WildContext) -> Certificate:
    """q = (1/n) * g(l) * s1 * s2 assembled from verified parts."""
    inv_n = invert_certificate(
        s_certificate_for_integer(witness.n, context.trajectory_budget)
    )
    middle = Certificate(
        Side.W,
        Fraction(3 * witness.l + 2, 2 * witness.l + 1),
        ((GeneratorRef(Side.W, witness.l), 1),),
    )
    cert = multiply_certificates(inv_n, middle)
    for p, e in sorted(factorize(witness.s1 * witness.s2).items()):
        dep = context.recall(p)
        assert dep is not None, f"dependency {p} missing while assembling {witness.q}"
        cert = multiply_certificates(cert, certificate_power(dep, e))
    assert cert.target == witness.q, f"assembled target {cert.target} != {witness.q}"
    check = verify_certificate(cert)
    assert check.ok, f"assembled certificate for {witness.q} failed: {check.reason}"
    return cert


def w_certificate_for_prime(q: int, context: Optional[WildContext] = None) -> Certificate:
    """A verified W-certificate for a prime q != 3.

    Recursion on the largest prime, run iteratively: resolve smooth
    witnesses until every dependency is a cached prime, then assemble
    in ascending order.  Only 2, 5, 7 and 11 are consumed as built-ins.
    """
    if context is None:
        context = WildContext()
    if q == 3 or q % 3 == 0:
        raise NotInSemigroupError("3 divides no member of the wild semigroup")
    if not is_prime_int(q):
        raise ValueError(f"w_certificate_for_prime wants a prime, got {q}")
    cached = context.recall(q)
    if cached is not None:
        return cached
    pending = [q]
    needed: set[int] = set()
    while pending:
        p = pending.pop()
        if p in needed or context.recall(p) is not None:
            continue
        needed.add(p)
        witness = context.witness_for(p)
        for dep in factorize(witness.s1 * witness.s2):
            if context.recall(dep) is None:
                pending.append(dep)  # dep < p, so this terminates
    for p in sorted(needed):
        cert = _witness_certificate(context.witnesses[p], context)
        context.remember(p, cert)
    return context.certificates[q]


def w_certificate_for_integer(m: int, context: Optional[WildContext] = None) -> Certificate:
    """W-certificate for any positive integer coprime to 3."""
    if context is None:
        context = WildContext()
    if m < 1:
        raise ValueError(f"w_certificate_for_integer wants a positive integer, got {m}")
    if m % 3 == 0:
        raise NotInSemigroupError(f"{m} is divisible by 3 and lies outside the wild semigroup")
    cached = context.recall(m)
    if cached is not None:
        return cached
    cert = identity_certificate(Side.W)
    for p, e in sorted(factorize(m).items()):
        cert = multiply_certificates(cert, certificate_power(w_certificate_for_prime(p, context), e))
    if m > 1:
        context.remember(m, cert)
    return cert


def s_certificate_for_rational(
    x: Fraction, context: Optional[WildContext] = None
) -> Certificate:
    """S-certificate for a/b in lowest terms, refusing 3 | b constructively."""
    if context is None:
        context = WildContext()
    x = Fraction(x)
    if x <= 0:
        raise ValueError(f"s_certificate_for_rational wants a positive rational, got {x}")
    if x.denominator % 3 == 0:
        raise NotInSemigroupError(
            f"denominator {x.denominator} is divisible by 3; {x} is not in the semigroup"
        )
    cert = s_certificate_for_integer(x.numerator, context.trajectory_budget)
    if x.denominator > 1:
        cert = multiply_certificates(
            cert, invert_certificate(w_certificate_for_integer(x.denominator, context))
        )
    check = verify_certificate(cert)
    assert check.ok, f"rational certificate for {x} failed: {check.reason}"
    return cert


# --------------------------------------------------------------------------
# The -1 lift and the one-step reduction.
# --------------------------------------------------------------------------


def lift_minus_one(x: int, k: int, j: int) -> tuple[int, int]:
    """Multiply x = -1 mod 2^k by m = (2^j + 1)/3 and run j steps of T.

    The result is exactly x + (x+1)/2^j, still -1 mod 2^(k-j), and if x
    was not -1 mod 2^(k+1) the result is not -1 mod 2^(k+1-j): the lift
    walks the -1 congruence down without ever re-entering it deeper.
    Returns (m, result); the identities are asserted, not trusted.
    """
    if x < 1 or k < 1 or (x + 1) % (1 << k) != 0:
        raise ValueError(f"x = {x} is not a positive member of -1 mod 2^{k}")
    if not (1 <= j <= k) or j % 6 not in (1, 5):
        raise ValueError(f"j = {j} must satisfy 1 <= j <= k and j = 1 or 5 mod 6")
    m, rem = divmod((1 << j) + 1, 3)
    assert rem == 0 and m % 6 in (1, 5)
    result = t_iterate(m * x, j)
    assert result == x + (x + 1) // (1 << j), "lift identity failed"
    assert (result + 1) % (1 << (k - j)) == 0, "result escaped -1 mod 2^(k-j)"
    if (x + 1) % (1 << (k + 1)) != 0:
        assert (result + 1) % (1 << (k + 1 - j)) != 0, "conditional congruence failed"
    return m, result


def reduction_exponent(k: int) -> int:
    """j = k - 5 - (k mod 6); lands in [k-10, k-5], is 1 mod 6, >= 7 for k >= 12."""
    j = k - 5 - (k % 6)
    assert j % 6 == 1 and k - 10 <= j <= k - 5 and (k < 12 or j >= 7)
    return j


@dataclass(frozen=True)
class ReduceTrace:
    """Everything needed to audit one wild reduction step."""

    x: int
    k: int
    j: int
    m: int
    multiplier_certificate: Certificate
    intermediate: int
    steps: tuple[str, ...]
    values: tuple[int, ...]
    result: int
    ratio: Fraction
    wild_certificate: Certificate


def onestep_reduce(x: int, k: int, context: Optional[WildContext] = None) -> ReduceTrace:
    """One wild reduction step taking x = -1 mod 2^k down to <= (1235/1264) x.

    Lift x out of the deep -1 class with m = (2^j + 1)/3, then apply the
    coverage-table record of the intermediate: the intermediate is
    guaranteed off the all-ones class mod 2^11, so a record exists, and
    the combined ratio is at most (130/128)(76/79) = 1235/1264.  The
    whole step is replayed concretely and returned as a verified
    W-certificate for result/x.
    """
    if context is None:
        context = WildContext()
    if k < 12:
        raise ValueError(f"one-step reduction needs k >= 12, got {k}")
    if (x + 1) % (1 << k) != 0 or (x + 1) % (1 << (k + 1)) == 0:
        raise ValueError(f"x must be -1 mod 2^{k} but not mod 2^{k + 1}")
    j = reduction_exponent(k)
    m_cert = w_certificate_for_integer(((1 << j) + 1) // 3, context)
    m, y = lift_minus_one(x, k, j)
    assert (y + 1) % (1 << 11) != 0, "intermediate re-entered -1 mod 2^11"
    record = context.coverage.record_for(y)
    steps = (f"x{m}",) + ("T",) * j + record.steps
    values = replay_steps(x, steps)
    assert values[j + 1] == y, "replay disagrees with the lift"
    z_exact = record.map.apply(y)
    z = values[-1]
    assert z == z_exact, f"replay result {z} != affine map value {z_exact}"
    ratio = Fraction(z, x)
    assert ratio <= ONESTEP_BOUND, f"ratio {ratio} exceeds {ONESTEP_BOUND}"
    # the applied wild element, factor by factor: m itself, one wild
    # generator per T step (1/2 on even values, g((v-1)/2) on odd), and
    # the record's multipliers decomposed over the base
    factors = list(m_cert.factors)
    for idx, (step, v) in enumerate(zip(steps, values)):
        if step == "T":
            if v & 1:
                factors.append((GeneratorRef(Side.W, (v - 1) // 2), 1))
            else:
                factors.append((GeneratorRef(Side.W, None), 1))
        elif idx > 0:  # the leading multiplication is m_cert already
            factors.extend(w_certificate_for_integer(int(step[1:]), context).factors)
    wild = Certificate(Side.W, ratio, tuple(factors))
    check = verify_certificate(wild)
    assert check.ok, f"wild step certificate failed: {check.reason}"
    return ReduceTrace(
        x=x,
        k=k,
        j=j,
        m=m,
        multiplier_certificate=m_cert,
        intermediate=y,
        steps=steps,
        values=values,
        result=z,
        ratio=ratio,
        wild_certificate=wild,
    )


# --------------------------------------------------------------------------
# Reaching 1, and the induction driver.
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ReachOneStats:
    bound: int
    max_steps: int
    max_steps_at: int
    step_counts: np.ndarray = field(repr=False, compare=False, default=None)

    def max_steps_up_to(self, n: int) -> int:
        if not 1 <= n <= self.bound:
            raise ValueError(f"n must be in 1..{self.bound}, got {n}")
        return int(self.step_counts[: n + 1].max())


def reach_one_range(bound: int) -> ReachOneStats:
    """Confirm every 1 <= n <= bound reaches 1 under T, with step counts.

    Classic descent memoization: iterate until the value drops below
    the start, whose step count is already known.
    """
    if bound < 1:
        raise ValueError(f"bound must be >= 1, got {bound}")
    steps = np.zeros(bound + 1, dtype=np.int64)
    max_steps, max_at = 0, 1
    for n in range(2, bound + 1):
        v = n
        count = 0
        while v >= n:
            v = (3 * v + 1) >> 1 if v & 1 else v >> 1
            count += 1
            if count > 10 * DEFAULT_TRAJECTORY_BUDGET:
                raise BudgetExhaustedError(f"descent from {n} exceeded every sane budget")
        total = count + int(steps[v])
        steps[n] = total
        if total > max_steps:
            max_steps, max_at = total, n
    return ReachOneStats(bound=bound, max_steps=max_steps, max_steps_at=max_at, step_counts=steps)


@dataclass(frozen=True)
class InductionBudgets:
    trajectory_bound: int = 1 << 20  # desk-scale stand-in, configurable
    witness_samples: int = 3
    spot_certificates: int = 3


@dataclass(frozen=True)
class InductionLine:
    k: int
    hypothesis: int
    kind: str
    status: str
    details: tuple[tuple[str, str], ...]

    def render(self) -> str:
        pairs = [f"k={self.k}", f"hyp={self.hypothesis}", f"kind={self.kind}", f"status={self.status}"]
        pairs.extend(f"{key}={value}" for key, value in self.details)
        return " ".join(pairs)


@dataclass(frozen=True)
class InductionReport:
    k_min: int
    k_max: int
    lines: tuple[InductionLine, ...]

    def render(self) -> str:
        return "\n".join(line.render() for line in self.lines)


def induction_driver(
    k_max: int,
    budgets: InductionBudgets = InductionBudgets(),
    context: Optional[WildContext] = None,
) -> InductionReport:
    """Verify the three mutually supporting hypotheses for 12 <= k <= k_max.

    (1) decrease by <= 1235/1264 for x not -1 mod 2^k: a class proof
        via the coverage table at k = 12, per-witness one-step checks
        for the strata -1 mod 2^t (t = k-1) above it;
    (2) every 1 <= n <= 2^k - 2 reaches 1 (capped by the trajectory
        bound), with spot-built certificates;
    (3) a verified wild certificate for every m <= (2^k - 1)/189 with
        3 not dividing m.
    Any failure aborts with the offending k, hypothesis and witness.
    """
    if k_max < 12:
        raise ValueError(f"induction starts at k = 12, got k_max = {k_max}")
    if context is None:
        context = WildContext(trajectory_budget=max(budgets.trajectory_bound, 1 << 14))
    lines: list[InductionLine] = []

    cover = context.coverage
    verdict = verify_coverage_table(cover)
    if not verdict.ok:
        raise InductionError(12, 1, "coverage table", "; ".join(verdict.issues))
    worst = cover.worst
    if not worst < ONESTEP_BOUND:
        raise InductionError(12, 1, worst, f"cover worst {worst} not below {ONESTEP_BOUND}")
    # put the base comparison on the common denominator 1264 when it fits
    if 1264 % worst.denominator == 0:
        scale = 1264 // worst.denominator
        comparison = f"{worst.numerator * scale}/1264<{format_rational(ONESTEP_BOUND)}"
    else:
        comparison = f"{format_rational(worst)}<{format_rational(ONESTEP_BOUND)}"

    reach_bound = min((1 << k_max) - 2, budgets.trajectory_bound)
    reach = reach_one_range(reach_bound)

    m_done = 1
    for k in range(12, k_max + 1):
        # hypothesis 1
        if k == 12:
            lines.append(
                InductionLine(
                    k=k,
                    hypothesis=1,
                    kind="class_proof",
                    status="pass",
                    details=(
                        ("modulus_exponent", str(cover.modulus_exponent)),
                        ("excluded", "all_ones_class"),
                        ("worst", format_rational(worst)),
                        ("bound", format_rational(ONESTEP_BOUND)),
                        ("comparison", comparison),
                    ),
                )
            )
        else:
            t = k - 1
            worst_sample = Fraction(0)
            worst_x = 0
            for i in range(budgets.witness_samples):
                c = 2 * i + 1
                x = c * (1 << t) - 1
                try:
                    trace = onestep_reduce(x, t, context)
                except (ValueError, AssertionError, SmoothPairExhaustionError) as exc:
                    raise InductionError(k, 1, x, str(exc)) from exc
                if trace.ratio > worst_sample:
                    worst_sample, worst_x = trace.ratio, x
            if worst_sample > ONESTEP_BOUND:
                raise InductionError(k, 1, worst_x, f"ratio {worst_sample} exceeds {ONESTEP_BOUND}")
            lines.append(
                InductionLine(
                    k=k,
                    hypothesis=1,
                    kind="witness_check",
                    status="pass",
                    details=(
                        ("stratum_exponent", str(t)),
                        ("samples", str(budgets.witness_samples)),
                        ("worst_ratio", format_rational(worst_sample)),
                        ("worst_x", str(worst_x)),
                        ("bound", format_rational(ONESTEP_BOUND)),
                    ),
                )
            )
        # hypothesis 2
        need = (1 << k) - 2
        capped = need > reach_bound
        checked_to = min(need, reach_bound)
        spot_targets = sorted({checked_to, checked_to // 2 + 1, 27, 1}, reverse=True)
        spot_targets = spot_targets[: budgets.spot_certificates]
        for n in spot_targets:
            cert = s_certificate_for_integer(n, context.trajectory_budget)
            if not verify_certificate(cert).ok:
                raise InductionError(k, 2, n, "spot certificate failed")
        lines.append(
            InductionLine(
                k=k,
                hypothesis=2,
                kind="sweep_capped" if capped else "sweep",
                status="pass",
                details=(
                    ("range", f"1..{checked_to}"),
                    ("max_steps", str(reach.max_steps_up_to(checked_to))),
                    ("spots", ",".join(str(n) for n in spot_targets)),
                ),
            )
        )
        # hypothesis 3
        m_bound = ((1 << k) - 1) // 189
        built = 0
        for m in range(m_done + 1, m_bound + 1):
            if m % 3 == 0:
                continue
            try:
                cert = w_certificate_for_integer(m, context)
            except (SmoothPairExhaustionError, BudgetExhaustedError) as exc:
                raise InductionError(k, 3, m, str(exc)) from exc
            if not verify_certificate(cert).ok:
                raise InductionError(k, 3, m, "assembled certificate failed verification")
            built += 1
        m_done = max(m_done, m_bound)
        lines.append(
            InductionLine(
                k=k,
                hypothesis=3,
                kind="sweep",
                status="pass",
                details=(
                    ("m_bound", str(m_bound)),
                    ("new_certificates", str(built)),
                ),
            )
        )
    return InductionReport(k_min=12, k_max=k_max, lines=tuple(lines))
