import dataclasses
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wildsemi.certify import Side, verify_certificate
from wildsemi.residue import replay_steps
from wildsemi.wildprove import (
    ONESTEP_BOUND,
    BudgetExhaustedError,
    CertStore,
    InductionBudgets,
    InductionError,
    NotInSemigroupError,
    PrimeSieve,
    SieveTooSmallError,
    SmoothPairExhaustionError,
    SmoothWitness,
    WildContext,
    compute_a_r,
    factorize,
    find_smooth_pair,
    induction_driver,
    is_prime_int,
    is_q_smooth,
    largest_prime_factor,
    lift_minus_one,
    onestep_reduce,
    pi_inequality_check,
    pi_inequality_range,
    reach_one_range,
    reduction_exponent,
    s_certificate_for_integer,
    s_certificate_for_rational,
    smooth_counts_up_to,
    smooth_majority_check,
    smooth_majority_range,
    smooth_residues,
    w_certificate_for_integer,
    w_certificate_for_prime,
)


def brute_primes(limit):
    return [n for n in range(2, limit + 1) if all(n % d for d in range(2, n))]


class TestPrimeSieve:
    def test_matches_trial_division(self):
        sieve = PrimeSieve.build(500)
        expected = brute_primes(500)
        assert list(sieve.primes()) == expected
        for n in range(501):
            assert sieve.is_prime(n) == (n in set(expected))

    def test_pi(self):
        sieve = PrimeSieve.build(1000)
        assert sieve.pi(100) == 25
        assert sieve.pi(1000) == 168
        assert sieve.pi(1) == 0

    def test_window(self):
        sieve = PrimeSieve.build(100)
        assert list(sieve.primes(10, 30)) == [11, 13, 17, 19, 23, 29]

    def test_too_small(self):
        sieve = PrimeSieve.build(50)
        with pytest.raises(SieveTooSmallError):
            sieve.is_prime(51)
        with pytest.raises(SieveTooSmallError):
            sieve.pi(51)
        with pytest.raises(SieveTooSmallError):
            sieve.primes(2, 51)


class TestIntegerHelpers:
    def test_factorize_examples(self):
        assert factorize(875) == {5: 3, 7: 1}
        assert factorize(1) == {}
        assert factorize(2**10) == {2: 10}
        with pytest.raises(ValueError):
            factorize(0)

    @given(st.integers(1, 10**9))
    def test_factorize_reconstructs(self, n):
        factors = factorize(n)
        product = 1
        for p, e in factors.items():
            assert is_prime_int(p)
            product *= p**e
        assert product == n

    def test_is_prime_int(self):
        sieve = PrimeSieve.build(300)
        for n in range(301):
            assert is_prime_int(n) == sieve.is_prime(n)

    def test_smoothness(self):
        assert largest_prime_factor(1) == 1
        assert largest_prime_factor(875) == 7
        assert is_q_smooth(1, 5)
        assert is_q_smooth(875, 13)
        assert not is_q_smooth(13, 13)
        assert not is_q_smooth(26, 13)


class TestCanonicalResidues:
    @pytest.mark.parametrize("q,a,r", [(2, 4, 5), (5, 7, 23), (13, 2, 17), (999983, 4, 2666621)])
    def test_examples(self, q, a, r):
        assert compute_a_r(q) == (a, r)

    @given(st.integers(0, 10**4))
    def test_invariants(self, seed):
        q = seed
        while not is_prime_int(q) or q % 3 == 0:
            q += 1
        a, r = compute_a_r(q)
        assert 1 <= a <= 8
        assert (a * q) % 9 == 8
        assert 3 * r == 2 * a * q - 1
        assert r % 6 == 5
        assert math.gcd(r, 6 * q) == 1

    def test_rejects(self):
        with pytest.raises(ValueError):
            compute_a_r(3)
        with pytest.raises(ValueError):
            compute_a_r(15)


class TestSmoothResidues:
    def test_thirteen(self):
        assert smooth_residues(13) == (1, 5, 7, 11, 25, 35, 49, 55, 77)

    def test_five_is_thin(self):
        assert smooth_residues(5) == (1,)

    @given(st.integers(5, 400))
    def test_membership_definition(self, lo):
        q = lo
        while not is_prime_int(q) or q % 3 == 0:
            q += 1
        got = smooth_residues(q)
        expected = tuple(
            s
            for s in range(1, 6 * q)
            if math.gcd(s, 6 * q) == 1 and is_q_smooth(s, q)
        )
        assert got == expected

    def test_counts_batch_matches_single(self):
        counts = smooth_counts_up_to(60)
        for q in (5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59):
            assert counts[q] == len(smooth_residues(q))


class TestMajorityRoute:
    def test_small_prime_fails(self):
        verdict = smooth_majority_check(13)
        assert verdict.size == 9
        assert verdict.threshold == 12
        assert verdict.invertible_classes == 24
        assert not verdict.passed
        assert not verdict.majority

    def test_large_prime_passes(self):
        verdict = smooth_majority_check(257)
        assert verdict.size == 317
        assert verdict.passed and verdict.majority

    def test_range_above_cutoff(self):
        summary = smooth_majority_range(257, 1000)
        assert summary.passed
        assert summary.failures == ()
        assert summary.checked == 114  # pi(1000) - pi(256), no prime here is 3

    def test_range_below_cutoff_reports_failures(self):
        summary = smooth_majority_range(5, 50)
        assert not summary.passed
        assert 5 in summary.failures and 13 in summary.failures


class TestPiRoute:
    def test_spot_values(self):
        verdict = pi_inequality_check(257)
        assert (verdict.above_q, verdict.above_q_fifth) == (187, 8)
        assert verdict.bound == 255
        assert verdict.passed

    def test_prime_count_definitions(self):
        sieve = PrimeSieve.build(7 * 1009)
        verdict = pi_inequality_check(1009, sieve)
        assert verdict.above_q == sieve.pi(6 * 1009) - sieve.pi(1009)
        assert verdict.above_q_fifth == sieve.pi(6 * 1009 // 5) - sieve.pi(1009)
        assert verdict.passed

    def test_range(self):
        summary = pi_inequality_range(257, 2000)
        assert summary.passed and summary.failures == ()

    def test_range_guards_its_hypothesis(self):
        with pytest.raises(ValueError):
            pi_inequality_range(256, 300)

    def test_routes_agree_where_both_apply(self):
        # two independent reasons for the same conclusion; keep both
        assert smooth_majority_range(257, 500).passed
        assert pi_inequality_range(257, 500).passed


class TestSmoothPair:
    def test_thirteen_witness(self):
        w = find_smooth_pair(13)
        assert w == SmoothWitness(q=13, a=2, r=17, s1=25, s2=35, k=11, n=101)
        assert w.l == 437
        assert w.s1 * w.s2 == 875

    @pytest.mark.parametrize("q", [5, 7, 11])
    def test_thin_smooth_sets_exhaust(self, q):
        with pytest.raises(SmoothPairExhaustionError):
            find_smooth_pair(q)

    def test_witness_rejects_tampering(self):
        w = find_smooth_pair(13)
        with pytest.raises(ValueError):
            dataclasses.replace(w, a=3)
        with pytest.raises(ValueError):
            dataclasses.replace(w, s1=55)
        with pytest.raises(ValueError):
            dataclasses.replace(w, s2=65)  # 65 = 5*13 shares a factor with 6q
        with pytest.raises(ValueError):
            dataclasses.replace(w, n=100)

    @given(st.integers(13, 3000))
    def test_found_pairs_validate(self, lo):
        q = lo
        while not is_prime_int(q) or q % 3 == 0:
            q += 1
        w = find_smooth_pair(q)
        assert w.q == q and w.n < 54 * q
        assert (w.n * q) % 3 == 2 % 3
        assert 2 * w.l + 1 == w.s1 * w.s2


class TestSCertificates:
    def test_five(self):
        cert = s_certificate_for_integer(5)
        assert cert.side is Side.S
        assert cert.target == 5
        assert [(str(ref), e) for ref, e in cert.factors] == [
            ("half", 4),
            ("g(0)", 1),
            ("g(2)", 1),
        ]
        assert verify_certificate(cert).ok

    def test_one(self):
        cert = s_certificate_for_integer(1)
        assert [(str(ref), e) for ref, e in cert.factors] == [("half", 1), ("g(0)", 1)]

    def test_budget_exhaustion_raises(self):
        with pytest.raises(BudgetExhaustedError):
            s_certificate_for_integer(27, budget=10)

    @given(st.integers(1, 10**5))
    def test_always_verifies(self, n):
        assert verify_certificate(s_certificate_for_integer(n)).ok

    def test_rational(self):
        cert = s_certificate_for_rational(Fraction(10, 7))
        assert cert.target == Fraction(10, 7)
        assert verify_certificate(cert).ok

    def test_rational_refusals(self):
        with pytest.raises(NotInSemigroupError):
            s_certificate_for_rational(Fraction(1, 3))
        with pytest.raises(NotInSemigroupError):
            s_certificate_for_rational(Fraction(5, 6))
        with pytest.raises(ValueError):
            s_certificate_for_rational(Fraction(-2, 7))


class TestWCertificates:
    def test_thirteen(self):
        ctx = WildContext()
        cert = w_certificate_for_prime(13, ctx)
        assert cert.target == 13
        assert cert.generator_count == 20
        assert sum(e for _, e in cert.factors) == 58
        assert verify_certificate(cert).ok

    def test_composite(self):
        cert = w_certificate_for_integer(875)
        assert cert.target == 875
        assert verify_certificate(cert).ok

    def test_builtins_only_below_four_hundred(self):
        # every prime < 400 except 3 assembles from the seeds 2, 5, 7, 11
        ctx = WildContext()
        for q in PrimeSieve.build(400).primes():
            if q == 3:
                continue
            assert verify_certificate(w_certificate_for_prime(int(q), ctx)).ok
        assert all(q not in ctx.witnesses for q in (2, 5, 7, 11))

    def test_refusals(self):
        with pytest.raises(NotInSemigroupError):
            w_certificate_for_prime(3)
        with pytest.raises(NotInSemigroupError):
            w_certificate_for_integer(21)
        with pytest.raises(ValueError):
            w_certificate_for_prime(15)
        with pytest.raises(ValueError):
            w_certificate_for_integer(0)


class TestCertStore:
    def test_round_trip(self, tmp_path):
        store = CertStore(tmp_path / "certs")
        cert = w_certificate_for_prime(13)
        path = store.put(cert)
        assert path.name == "w-13.cert"
        assert store.get(Side.W, Fraction(13)) == cert
        idx = (tmp_path / "certs" / "store.idx").read_text()
        assert "w-13.cert 13/1 pass" in idx

    def test_rational_s_filenames(self, tmp_path):
        store = CertStore(tmp_path)
        cert = s_certificate_for_rational(Fraction(10, 7))
        path = store.put(cert)
        assert path.name == "s-10_7.cert"
        assert store.get(Side.S, Fraction(10, 7)) == cert

    def test_rational_w_targets_are_not_stored(self, tmp_path):
        store = CertStore(tmp_path)
        trace = onestep_reduce(4095, 12)
        assert store.put(trace.wild_certificate) is None

    def test_mislabeled_file_is_rejected(self, tmp_path):
        store = CertStore(tmp_path)
        store.put(w_certificate_for_prime(13))
        content = (tmp_path / "w-13.cert").read_text()
        (tmp_path / "w-17.cert").write_text(content)
        assert store.get(Side.W, Fraction(17)) is None

    def test_missing_file(self, tmp_path):
        assert CertStore(tmp_path).get(Side.W, Fraction(23)) is None

    def test_context_write_through(self, tmp_path):
        store = CertStore(tmp_path)
        first = WildContext(store=store)
        cert = w_certificate_for_prime(13, first)
        second = WildContext(store=store)
        assert second.recall(13) == cert


class TestLift:
    def test_example(self):
        assert lift_minus_one(4095, 12, 7) == (43, 4127)

    def test_congruences(self):
        m, y = lift_minus_one(4095, 12, 7)
        assert (y + 1) % 2**5 == 0
        assert (y + 1) % 2**6 != 0

    def test_rejects(self):
        with pytest.raises(ValueError):
            lift_minus_one(4094, 12, 7)  # not -1 mod 2^12
        with pytest.raises(ValueError):
            lift_minus_one(4095, 12, 3)  # j != 1, 5 mod 6
        with pytest.raises(ValueError):
            lift_minus_one(4095, 12, 13)  # j > k

    @given(st.integers(1, 2**52), st.integers(12, 60), st.data())
    def test_random_lifts(self, c, k, data):
        x = c * 2**k - 1
        j = data.draw(st.sampled_from([jj for jj in range(1, k + 1) if jj % 6 in (1, 5)]))
        m, y = lift_minus_one(x, k, j)
        assert 3 * m == 2**j + 1
        assert y == x + (x + 1) // 2**j


class TestReduction:
    def test_exponent_schedule(self):
        assert [reduction_exponent(k) for k in range(12, 25)] == [
            7, 7, 7, 7, 7, 7, 13, 13, 13, 13, 13, 13, 19,
        ]

    def test_example(self):
        trace = onestep_reduce(4095, 12)
        assert (trace.j, trace.m, trace.intermediate) == (7, 43, 4127)
        assert trace.result == 2128
        assert trace.ratio == Fraction(2128, 4095) == Fraction(304, 585)
        assert trace.wild_certificate.target == trace.ratio
        assert verify_certificate(trace.wild_certificate).ok
        assert replay_steps(4095, trace.steps) == trace.values

    def test_thirteen_bit_example(self):
        trace = onestep_reduce(2**13 - 1, 13)
        assert (trace.j, trace.m) == (7, 43)
        assert trace.intermediate == 8255
        assert trace.result == 6385

    def test_rejects_wrong_class(self):
        with pytest.raises(ValueError):
            onestep_reduce(4094, 12)
        with pytest.raises(ValueError):
            onestep_reduce(2**13 - 1, 12)  # -1 even mod 2^13
        with pytest.raises(ValueError):
            onestep_reduce(2**11 - 1, 11)

    @given(st.integers(0, 2**40), st.integers(12, 40))
    def test_bound_holds(self, i, k):
        ctx = WildContext()
        x = (2 * i + 1) * 2**k - 1
        trace = onestep_reduce(x, k, ctx)
        assert trace.ratio <= ONESTEP_BOUND
        assert trace.result < x
        assert verify_certificate(trace.wild_certificate).ok


class TestReachOne:
    def test_stats(self):
        stats = reach_one_range(1000)
        assert stats.bound == 1000
        assert stats.max_steps == 113
        assert stats.max_steps_at == 871
        assert stats.max_steps_up_to(27) == 70
        assert stats.max_steps_up_to(1) == 0

    def test_prefix_query_bounds(self):
        stats = reach_one_range(100)
        with pytest.raises(ValueError):
            stats.max_steps_up_to(0)
        with pytest.raises(ValueError):
            stats.max_steps_up_to(101)

    def test_rejects_empty_range(self):
        with pytest.raises(ValueError):
            reach_one_range(0)


class TestInduction:
    def test_starts_at_twelve(self):
        with pytest.raises(ValueError):
            induction_driver(11)

    def test_base_case(self):
        report = induction_driver(12)
        assert (report.k_min, report.k_max) == (12, 12)
        assert [line.hypothesis for line in report.lines] == [1, 2, 3]
        assert all(line.status == "pass" for line in report.lines)
        base = report.lines[0]
        assert base.kind == "class_proof"
        assert ("comparison", "1216/1264<1235/1264") in base.details

    def test_step_cases(self):
        report = induction_driver(14)
        assert len(report.lines) == 9
        witness_lines = [
            line for line in report.lines if line.kind == "witness_check"
        ]
        assert [line.k for line in witness_lines] == [13, 14]
        for line in witness_lines:
            detail = dict(line.details)
            assert Fraction(detail["worst_ratio"]) <= ONESTEP_BOUND
        rendered = report.render()
        assert "k=13 hyp=1 kind=witness_check status=pass" in rendered
        for token in rendered.split():
            assert "=" in token  # line format stays machine-splittable

    def test_hypothesis_three_covers_every_admissible_m(self):
        ctx = WildContext()
        induction_driver(14, context=ctx)
        m_bound = (2**14 - 1) // 189
        for m in range(2, m_bound + 1):
            if m % 3 != 0:
                assert ctx.recall(m) is not None

    def test_capped_sweep_is_reported_as_capped(self):
        report = induction_driver(12, InductionBudgets(trajectory_bound=100))
        sweep = [line for line in report.lines if line.hypothesis == 2][0]
        assert sweep.kind == "sweep_capped"
        assert dict(sweep.details)["range"] == "1..100"

    def test_broken_cover_aborts_hypothesis_one(self):
        from wildsemi.residue import CoverageTable, load_builtin_coverage

        holed = CoverageTable(
            records=load_builtin_coverage().records[1:], modulus_exponent=12
        )
        with pytest.raises(InductionError) as exc_info:
            induction_driver(12, context=WildContext(coverage=holed))
        assert exc_info.value.k == 12
        assert exc_info.value.hypothesis == 1
