"""Multiset sequences over a product semigroup and the idempotent-sum
predicates.

A sequence is a finite multiset of elements; no predicate here depends on
order.  The central fact: a nonempty sequence sums to the idempotent exactly
when, in every coordinate, its raw index total reaches cap_i = ceil(k_i/n_i)*n_i
and is divisible by n_i.  Because the criterion only sees totals through
"capped" canonical indices, the set of subset-sum states of a sequence stays
bounded by prod(cap_i + n_i - 1) regardless of sequence length; ReachSet and
ReachEngine exploit that.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .config import DEFAULT_STATE_CAP
from .errors import BudgetExceeded, SeqFileError, SpecError
from .semigroup import (
    CyclicSpec,
    Element,
    GroupSpec,
    ProductSpec,
    add,
    check_element,
)

# ---------------------------------------------------------------------------
# sequence containers


def _as_term(t) -> tuple[int, ...]:
    if isinstance(t, int):
        return (t,)
    return tuple(t)


@dataclass(frozen=True)
class Seq:
    """A multiset of product-semigroup elements, stored sorted."""

    terms: tuple[Element, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(sorted(_as_term(t) for t in self.terms)))

    @classmethod
    def of(cls, *terms) -> "Seq":
        """Build from terms; bare ints are treated as 1-tuples."""
        return cls(tuple(_as_term(t) for t in terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def is_empty(self) -> bool:
        return not self.terms

    def distinct(self) -> tuple[Element, ...]:
        return tuple(dict.fromkeys(self.terms))

    def with_term(self, t) -> "Seq":
        return Seq(self.terms + (_as_term(t),))

    def remove_one(self, t) -> "Seq":
        """Drop one copy of t; error if absent."""
        t = _as_term(t)
        terms = list(self.terms)
        if t not in terms:
            raise SpecError(f"term {t} not in sequence")
        terms.remove(t)
        return Seq(tuple(terms))


@dataclass(frozen=True)
class GroupSeq:
    """A multiset of residue vectors over a GroupSpec."""

    terms: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(sorted(_as_term(t) for t in self.terms)))

    @classmethod
    def of(cls, *terms) -> "GroupSeq":
        return cls(tuple(_as_term(t) for t in terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def is_empty(self) -> bool:
        return not self.terms

    def distinct(self) -> tuple[tuple[int, ...], ...]:
        return tuple(dict.fromkeys(self.terms))

    def remove_one(self, t) -> "GroupSeq":
        t = _as_term(t)
        terms = list(self.terms)
        if t not in terms:
            raise SpecError(f"term {t} not in sequence")
        terms.remove(t)
        return GroupSeq(tuple(terms))


def check_group_seq(g: GroupSpec, t: GroupSeq) -> None:
    for term in t:
        if len(term) != len(g.periods):
            raise SpecError(
                f"residue vector arity {len(term)} does not match group rank {len(g.periods)}"
            )
        for r, n in zip(term, g.periods):
            if not 0 <= r < n:
                raise SpecError(f"residue {r} outside [0, {n - 1}]")


# ---------------------------------------------------------------------------
# sums and projections

SumProfile = tuple[int, ...]


def sum_profile(s: ProductSpec, t: Seq) -> SumProfile:
    """Per-coordinate raw index totals over all terms (exact, uncapped)."""
    totals = [0] * s.arity
    for term in t:
        check_element(s, term)
        for i, v in enumerate(term):
            totals[i] += v
    return tuple(totals)


def sigma(s: ProductSpec, t: Seq) -> Element:
    """Sum of all terms.  Undefined for the empty sequence: the product is
    generally not a monoid."""
    if t.is_empty:
        raise SpecError("sigma of the empty sequence is undefined")
    profile = sum_profile(s, t)
    return tuple(c.canonical(v) for c, v in zip(s.coords, profile))


def psi(s: ProductSpec, t: Seq) -> GroupSeq:
    """Term-wise reduction of canonical indices mod the coordinate periods."""
    for term in t:
        check_element(s, term)
    return GroupSeq(tuple(tuple(v % c.n for v, c in zip(term, s.coords)) for term in t))


def is_idempotent_sum(s: ProductSpec, t: Seq) -> bool:
    """True iff the whole sequence sums to the idempotent: every coordinate
    total reaches cap_i and is divisible by n_i."""
    if t.is_empty:
        raise SpecError("the empty sequence has no sum")
    profile = sum_profile(s, t)
    return all(v >= c.cap and v % c.n == 0 for c, v in zip(s.coords, profile))


# ---------------------------------------------------------------------------
# subset-sum reachability

class CoordState(NamedTuple):
    """One coordinate of a reach state: exact value below cap, residue-only
    at or above it."""

    saturated: bool
    value: int | None
    residue: int


def _capped(cap: int, n: int, v: int) -> int:
    """Canonical index of a running sum v inside C(cap; n)."""
    if v <= cap + n - 1:
        return v
    return cap + (v - cap) % n


class ReachSet:
    """The capped subset-sum states of all nonempty subsequences of a Seq.

    States are stored as tuples of capped canonical sums, one per coordinate;
    the idempotent condition holds for some subsequence iff the all-caps
    profile is present.
    """

    __slots__ = ("spec", "_profiles")

    def __init__(self, spec: ProductSpec, profiles: frozenset[tuple[int, ...]] = frozenset()):
        self.spec = spec
        self._profiles = frozenset(profiles)

    @property
    def profiles(self) -> frozenset[tuple[int, ...]]:
        return self._profiles

    @property
    def states(self) -> frozenset[tuple[CoordState, ...]]:
        out = []
        for p in self._profiles:
            coords = []
            for v, c in zip(p, self.spec.coords):
                if v >= c.cap:
                    coords.append(CoordState(True, None, v % c.n))
                else:
                    coords.append(CoordState(False, v, v % c.n))
            out.append(tuple(coords))
        return frozenset(out)

    def __len__(self) -> int:
        return len(self._profiles)

    def contains_idempotent(self) -> bool:
        return self.spec.caps in self._profiles

    def extend(self, a: Element, state_cap: int = DEFAULT_STATE_CAP) -> "ReachSet":
        """States of t.with_term(a) from the states of t."""
        check_element(self.spec, a)
        coords = self.spec.coords
        single = tuple(_capped(c.cap, c.n, v) for c, v in zip(coords, a))
        new = set(self._profiles)
        new.add(single)
        for p in self._profiles:
            new.add(tuple(_capped(c.cap, c.n, x + v) for c, x, v in zip(coords, p, a)))
        if len(new) > state_cap:
            raise BudgetExceeded(f"reach state cap {state_cap} exceeded")
        return ReachSet(self.spec, frozenset(new))


def reach(s: ProductSpec, t: Seq, state_cap: int = DEFAULT_STATE_CAP) -> ReachSet:
    """Subset-sum states of every nonempty subsequence of t."""
    out = ReachSet(s)
    for term in t:
        out = out.extend(term, state_cap)
    return out


def is_idempotent_sum_free(s: ProductSpec, t: Seq, state_cap: int = DEFAULT_STATE_CAP) -> bool:
    """True iff no nonempty subsequence sums to the idempotent.  The empty
    sequence is free by convention."""
    target = s.caps
    coords = s.coords
    profiles: set[tuple[int, ...]] = set()
    for term in t:
        check_element(s, term)
        single = tuple(_capped(c.cap, c.n, v) for c, v in zip(coords, term))
        if single == target:
            return False
        fresh = {single}
        for p in profiles:
            q = tuple(_capped(c.cap, c.n, x + v) for c, x, v in zip(coords, p, term))
            if q == target:
                return False
            fresh.add(q)
        profiles |= fresh
        if len(profiles) > state_cap:
            raise BudgetExceeded(f"reach state cap {state_cap} exceeded")
    return True


def is_minimal_idempotent_sum(s: ProductSpec, t: Seq, state_cap: int = DEFAULT_STATE_CAP) -> bool:
    """True iff t is an idempotent sum and no proper nonempty subsequence is.

    Dropping one copy of each distinct term suffices: any proper idempotent
    subsequence survives in at least one of those reductions.
    """
    if t.is_empty:
        raise SpecError("the empty sequence has no sum")
    if not is_idempotent_sum(s, t):
        return False
    for d in t.distinct():
        if not is_idempotent_sum_free(s, t.remove_one(d), state_cap):
            return False
    return True


def idempotent_witness(s: ProductSpec, t: Seq, state_cap: int = DEFAULT_STATE_CAP) -> Seq | None:
    """Some nonempty subsequence summing to the idempotent, or None.

    Walks a predecessor chain through the first appearance of each state;
    first appearances have strictly increasing term positions, so the chain
    is a valid subsequence.
    """
    target = s.caps
    coords = s.coords
    # state -> (term position, predecessor state or None)
    seen: dict[tuple[int, ...], tuple[int, tuple[int, ...] | None]] = {}
    terms = t.terms
    for pos, term in enumerate(terms):
        check_element(s, term)
        fresh: dict[tuple[int, ...], tuple[int, tuple[int, ...] | None]] = {}
        single = tuple(_capped(c.cap, c.n, v) for c, v in zip(coords, term))
        if single not in seen:
            fresh[single] = (pos, None)
        for p, _ in seen.items():
            q = tuple(_capped(c.cap, c.n, x + v) for c, x, v in zip(coords, p, term))
            if q not in seen and q not in fresh:
                fresh[q] = (pos, p)
        seen.update(fresh)
        if len(seen) > state_cap:
            raise BudgetExceeded(f"reach state cap {state_cap} exceeded")
        if target in seen:
            picked = []
            state: tuple[int, ...] | None = target
            while state is not None:
                at, prev = seen[state]
                picked.append(terms[at])
                state = prev
            return Seq(tuple(picked))
    return None


# ---------------------------------------------------------------------------
# group-side predicates

def group_sum(g: GroupSpec, t: GroupSeq) -> tuple[int, ...]:
    check_group_seq(g, t)
    totals = [0] * len(g.periods)
    for term in t:
        for i, r in enumerate(term):
            totals[i] += r
    return tuple(v % n for v, n in zip(totals, g.periods))


def is_zero_sum(g: GroupSpec, t: GroupSeq) -> bool:
    if t.is_empty:
        raise SpecError("the empty sequence has no sum")
    return group_sum(g, t) == (0,) * len(g.periods)


def is_zero_sum_free(g: GroupSpec, t: GroupSeq) -> bool:
    """True iff no nonempty subsequence sums to zero in every coordinate."""
    check_group_seq(g, t)
    periods = g.periods
    zero = (0,) * len(periods)
    states: set[tuple[int, ...]] = set()
    for term in t:
        if term == zero:
            return False
        fresh = {term}
        for p in states:
            q = tuple((x + r) % n for x, r, n in zip(p, term, periods))
            if q == zero:
                return False
            fresh.add(q)
        states |= fresh
    return True


def is_minimal_zero_sum(g: GroupSpec, t: GroupSeq) -> bool:
    if t.is_empty:
        raise SpecError("the empty sequence has no sum")
    if not is_zero_sum(g, t):
        return False
    return all(is_zero_sum_free(g, t.remove_one(d)) for d in t.distinct())


# ---------------------------------------------------------------------------
# sequence file format

def parse_seq_lines(s: ProductSpec, lines: Iterable[str]) -> Seq:
    """One term per line as comma-separated 1-based indices; blank lines and
    '#' comments ignored; repeated lines give multiplicity."""
    terms: list[Element] = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        try:
            term = tuple(int(p) for p in parts)
        except ValueError:
            raise SeqFileError(line_no, f"not a comma-separated integer list: {line!r}")
        if len(term) != s.arity:
            raise SeqFileError(
                line_no, f"term has {len(term)} coordinates, spec has {s.arity}"
            )
        try:
            check_element(s, term)
        except SpecError as exc:
            raise SeqFileError(line_no, str(exc))
        terms.append(term)
    return Seq(tuple(terms))


def read_seq_file(s: ProductSpec, path) -> Seq:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_seq_lines(s, fh)


def format_seq(t: Seq) -> str:
    return "\n".join(",".join(str(v) for v in term) for term in t) + ("\n" if len(t) else "")


# ---------------------------------------------------------------------------
# packed search engine

def _profiles_iter(sizes):
    return itertools.product(*(range(1, sz + 1) for sz in sizes))


class ReachEngine:
    """Precomputed packed-state transition tables for exhaustive searches.

    States pack the per-coordinate capped canonical sums (semigroup flavor)
    or residues (group flavor) into one integer via mixed-radix encoding.
    apply() advances a whole reach set by one alphabet element and returns
    None as soon as the target (idempotent / zero) state appears, which is
    the pruning signal for free-sequence enumeration.
    """

    __slots__ = ("labels", "num_states", "target", "init", "trans")

    def __init__(self, labels, num_states, target, init, trans):
        self.labels = labels  # alphabet, in search order
        self.num_states = num_states
        self.target = target
        self.init = init      # packed singleton state per alphabet element
        self.trans = trans    # trans[a][p] = packed successor

    @classmethod
    def for_spec(cls, s: ProductSpec, alphabet: Sequence[Element] | None = None) -> "ReachEngine":
        coords = s.coords
        if alphabet is None:
            e = s.caps
            alphabet = [a for a in s.elements() if a != e]
        alphabet = sorted(alphabet)
        sizes = [c.cap + c.n - 1 for c in coords]
        num_states = math.prod(sizes)
        strides = [0] * len(sizes)
        acc = 1
        for i in range(len(sizes) - 1, -1, -1):
            strides[i] = acc
            acc *= sizes[i]

        def pack(profile):
            return sum((v - 1) * st for v, st in zip(profile, strides))

        target = pack(s.caps)
        # per-coordinate successor tables: coord_step[i][a_v] maps a capped
        # state value to its successor under adding index a_v
        init = []
        trans = []
        coord_vals = [range(1, sz + 1) for sz in sizes]
        for a in alphabet:
            init.append(pack(tuple(_capped(c.cap, c.n, v) for c, v in zip(coords, a))))
            steps = [
                {v: _capped(c.cap, c.n, v + av) for v in coord_vals[i]}
                for i, (c, av) in enumerate(zip(coords, a))
            ]
            table = [0] * num_states
            for profile in _profiles_iter(sizes):
                p = pack(profile)
                table[p] = pack(tuple(st[v] for st, v in zip(steps, profile)))
            trans.append(table)
        return cls(tuple(alphabet), num_states, target, init, trans)

    @classmethod
    def for_group(cls, g: GroupSpec, alphabet: Sequence[tuple[int, ...]] | None = None) -> "ReachEngine":
        periods = g.periods
        zero = (0,) * len(periods)
        if alphabet is None:
            alphabet = [a for a in g.elements() if a != zero]
        alphabet = sorted(alphabet)
        num_states = math.prod(periods)
        strides = [0] * len(periods)
        acc = 1
        for i in range(len(periods) - 1, -1, -1):
            strides[i] = acc
            acc *= periods[i]

        def pack(res):
            return sum(v * st for v, st in zip(res, strides))

        target = pack(zero)
        init = []
        trans = []
        for a in alphabet:
            init.append(pack(a))
            table = [0] * num_states
            for res in g.elements():
                p = pack(res)
                table[p] = pack(tuple((x + r) % n for x, r, n in zip(res, a, periods)))
            trans.append(table)
        return cls(tuple(alphabet), num_states, target, init, trans)

    def apply(self, states: set[int], ai: int) -> set[int] | None:
        """Reach states after appending alphabet element ai, or None if the
        target state becomes reachable."""
        tgt = self.target
        x = self.init[ai]
        if x == tgt:
            return None
        table = self.trans[ai]
        out = set(states)
        out.add(x)
        for p in states:
            q = table[p]
            if q == tgt:
                return None
            out.add(q)
        return out
