"""Acceptance gate: ten end-to-end criteria, one test each.

Each test enforces an exact combinatorial identity over an exhaustive grid
plus a wall-clock ceiling.  Grids are sized so a desk machine finishes the
whole module in minutes.
"""

import itertools
import math
import time

import pytest

import _oracles as oracle
from ebs.config import Budget
from ebs.constants import (
    build_axis_witness,
    build_lift_witness,
    build_uniform_witness,
    davenport,
    eb_bruteforce,
    reduce_spec,
)
from ebs.semigroup import CyclicSpec, GroupSpec, ProductSpec, element_count, format_spec
from ebs.sequences import Seq, is_idempotent_sum_free
from ebs.structure import (
    BEHAVING_I,
    N1_SPLIT_IV,
    N1_TWOS_V,
    N2_SPECIAL_III,
    TWO_POWER_II,
    IntSeq,
    behaving_bound_classify,
    classify_free_sequence,
    classify_threshold,
    is_behaving,
    l_const,
    lhat,
    savchev_chen,
)


def rank2_grid(max_elements=20):
    """All ordered rank-two specs with at most max_elements elements."""
    out = []
    for s1 in range(1, max_elements + 1):
        for s2 in range(1, max_elements // s1 + 1):
            for n1 in range(1, s1 + 1):
                for n2 in range(1, s2 + 1):
                    out.append(ProductSpec.of((s1 + 1 - n1, n1), (s2 + 1 - n2, n2)))
    return out


def test_criterion_01_single_cyclic_exact_value():
    t0 = time.monotonic()
    for k in range(1, 9):
        for n in range(1, 10 - k):
            c = CyclicSpec(k, n)
            r = eb_bruteforce(c.as_product())
            assert r.value == c.cap, format_spec(c.as_product())
    assert time.monotonic() - t0 < 60


def test_criterion_02_rank_two_divisible_closed_form():
    t0 = time.monotonic()
    checked = 0
    for s in rank2_grid(20):
        c1, c2 = s.coords
        if c2.n % c1.n != 0:
            continue
        expected = max(c1.cap - c1.n, c2.cap - c2.n) + c1.n + c2.n - 1
        r = eb_bruteforce(s)
        assert r.value == expected, format_spec(s)
        checked += 1
    assert checked > 100
    assert time.monotonic() - t0 < 600


def test_criterion_03_coprime_refutation():
    t0 = time.monotonic()
    s = ProductSpec.of((1, 2), (4, 3))
    r = eb_bruteforce(s)
    d6 = davenport(GroupSpec((6,)), "brute").value
    assert d6 == 6
    assert r.value < 3 + d6
    assert r.value == 7
    assert time.monotonic() - t0 < 60


def test_criterion_04_reduction_consistency():
    t0 = time.monotonic()
    checked = 0
    for s in rank2_grid(20):
        if all(c.n > 1 for c in s.coords):
            continue
        reduced = reduce_spec(s)
        value = eb_bruteforce(s).value
        if isinstance(reduced, int):
            assert value == reduced, format_spec(s)
        else:
            assert value == eb_bruteforce(reduced).value, format_spec(s)
        checked += 1
    assert checked > 100
    assert time.monotonic() - t0 < 600


def test_criterion_05_davenport_brute_reference_values():
    t0 = time.monotonic()
    for n in range(1, 11):
        assert davenport(GroupSpec((n,)), "brute").value == n
    for periods, expected in (((2, 2), 3), ((3, 3), 5), ((2, 4), 5)):
        assert davenport(GroupSpec(periods), "brute").value == expected
    assert time.monotonic() - t0 < 60


def test_criterion_06_behaving_bound_exhaustive():
    t0 = time.monotonic()
    for length in range(1, 7):
        for entries in itertools.combinations_with_replacement(range(1, 13), length):
            h = IntSeq(entries)
            if is_behaving(h):
                continue
            total = sum(entries)
            assert total >= 2 * length, entries
            split = (1,) * (length - 1) + (length + 1,)
            twos = (2,) * length
            if total == 2 * length:
                assert entries in (split, twos), entries
                assert behaving_bound_classify(h) in ("eq_split", "eq_twos")
            else:
                assert entries not in (split, twos)
                assert behaving_bound_classify(h) == "strict"
    assert time.monotonic() - t0 < 60


def _shape_matches(k: int, n: int, entries: tuple[int, ...]) -> list[str]:
    """Test-local restatement of the five long-free-sequence shapes."""
    cap = -(-k // n) * n
    q = cap // n
    x2 = (q + 1) * n
    total = sum(entries)
    out = []
    if total <= cap - 1 and oracle.naive_is_behaving(entries):
        out.append(BEHAVING_I)
    if n >= 3 and cap % 2 == 1 and entries == (2,) * (x2 // 2 - 1):
        out.append(TWO_POWER_II)
    if (n == 2 and len(entries) == q and entries[:-1] == (2,) * (q - 1)
            and entries[-1] >= 3 and entries[-1] % 2 == 1):
        out.append(N2_SPECIAL_III)
    if n == 1 and k % 2 == 1 and k >= 3 and entries == (1,) * ((k - 3) // 2) + ((k + 1) // 2,):
        out.append(N1_SPLIT_IV)
    if n == 1 and k % 2 == 1 and entries == (2,) * ((k - 1) // 2):
        out.append(N1_TWOS_V)
    return out


def test_criterion_07_long_free_trichotomy():
    t0 = time.monotonic()
    specs = [(k, n) for n in range(1, 5) for k in range(n + 1, 10 - n)]
    assert specs
    for k, n in specs:
        c = CyclicSpec(k, n)
        s = c.as_product()
        threshold = classify_threshold(c)
        for length in range(threshold, c.cap + 1):
            for entries in itertools.combinations_with_replacement(
                    range(1, c.size + 1), length):
                t = Seq(tuple((v,) for v in entries))
                matches = _shape_matches(k, n, entries)
                if is_idempotent_sum_free(s, t):
                    res = classify_free_sequence(c, t)
                    if len(matches) != 1:
                        assert matches == [N1_SPLIT_IV, N1_TWOS_V] and k == 3
                    assert res.tag == matches[0], (k, n, entries)
                else:
                    assert matches == [], (k, n, entries)
    assert time.monotonic() - t0 < 600


def test_criterion_08_savchev_chen_totality():
    t0 = time.monotonic()
    for n in range(2, 13):
        for length in range(n // 2 + 1, n):
            for t in oracle.enumerate_zsf(n, length):
                got = savchev_chen(n, t)
                assert got is not None, (n, t)
                c, h = got
                assert math.gcd(c, n) == 1
                assert h.total <= n - 1
                assert is_behaving(h)
                assert sorted((c * v) % n for v in h) == sorted(t)
    assert time.monotonic() - t0 < 300


def test_criterion_09_structure_threshold_tables():
    t0 = time.monotonic()
    problems = []
    for n in range(1, 11):
        table_lhat = lhat(CyclicSpec(1, n), "formula").value
        brute_lhat = lhat(CyclicSpec(1, n), "brute").value
        if brute_lhat != table_lhat:
            problems.append(f"lhat k<=n={n}: table {table_lhat} brute {brute_lhat}")
        table_l = l_const(CyclicSpec(1, n), "formula").value
        brute_l = l_const(CyclicSpec(1, n), "brute").value
        if brute_l != table_l:
            problems.append(f"l k<=n={n}: table {table_l} brute {brute_l}")
    # the brute search depends on k only through the residues, so one k per n
    # covers the k <= n table; spot-check the k = n corner anyway
    assert lhat(CyclicSpec(10, 10), "brute").value == lhat(CyclicSpec(1, 10), "brute").value
    for n in range(1, 5):
        for k in range(n + 1, 11 - n):
            c = CyclicSpec(k, n)
            for fn in (lhat, l_const):
                f = fn(c, "formula")
                b = fn(c, "brute").value
                if f.value is not None:
                    if b != f.value:
                        problems.append(f"{fn.__name__} C({k};{n}): formula {f.value} brute {b}")
                elif not f.lower <= b <= f.upper:
                    problems.append(f"{fn.__name__} C({k};{n}): [{f.lower},{f.upper}] brute {b}")
            if l_const(c, "brute").value > lhat(c, "brute").value + 1:
                problems.append(f"C({k};{n}): l exceeds lhat + 1")
    assert time.monotonic() - t0 < 900
    assert problems == []


def test_criterion_10_constructed_witnesses_are_free():
    t0 = time.monotonic()
    singles = [ProductSpec.of((k, n))
               for k in range(1, 9) for n in range(1, 10 - k)]
    for s in singles + rank2_grid(20):
        assert element_count(s) <= 20 or s.arity == 1
        t1 = build_axis_witness(s)
        assert is_idempotent_sum_free(s, t1), format_spec(s)
        t2 = build_lift_witness(s)
        assert is_idempotent_sum_free(s, t2), format_spec(s)
        v = build_uniform_witness(s)
        if v is not None:
            assert is_idempotent_sum_free(s, v), format_spec(s)
    assert time.monotonic() - t0 < 60
