"""Deliberately naive reference implementations for cross-checking.

Everything here enumerates index subsets directly (exponential in sequence
length) and recomputes canonical forms from the k/n definitions, sharing no
code with the package's reachability or search machinery.
"""

import itertools


def canon(k: int, n: int, raw: int) -> int:
    return raw if raw <= k + n - 1 else k + (raw - k) % n


def naive_sigma(coords, terms):
    """coords: [(k, n), ...]; terms: iterable of index tuples."""
    sums = [0] * len(coords)
    for t in terms:
        for i, v in enumerate(t):
            sums[i] += v
    return tuple(canon(k, n, v) for (k, n), v in zip(coords, sums))


def idempotent_of(coords):
    return tuple(-(-k // n) * n for k, n in coords)


def nonempty_subsets(terms):
    terms = list(terms)
    for r in range(1, len(terms) + 1):
        for combo in itertools.combinations(range(len(terms)), r):
            yield [terms[i] for i in combo]


def naive_hits_idempotent(coords, terms) -> bool:
    e = idempotent_of(coords)
    return any(naive_sigma(coords, sub) == e for sub in nonempty_subsets(terms))


def naive_is_free(coords, terms) -> bool:
    return not naive_hits_idempotent(coords, terms)


def naive_is_idempotent_sum(coords, terms) -> bool:
    terms = list(terms)
    return bool(terms) and naive_sigma(coords, terms) == idempotent_of(coords)


def naive_is_minimal(coords, terms) -> bool:
    terms = list(terms)
    if not naive_is_idempotent_sum(coords, terms):
        return False
    e = idempotent_of(coords)
    return not any(
        naive_sigma(coords, sub) == e
        for sub in nonempty_subsets(terms)
        if len(sub) < len(terms)
    )


# --- groups ---------------------------------------------------------------

def naive_zero_sum_free(moduli, terms) -> bool:
    for sub in nonempty_subsets(terms):
        sums = [0] * len(moduli)
        for t in sub:
            for i, v in enumerate(t):
                sums[i] += v
        if all(v % m == 0 for v, m in zip(sums, moduli)):
            return False
    return True


def naive_davenport(moduli) -> int:
    """1 + the longest zero-sum free length, by plain DFS over non-decreasing
    sequences of nonzero elements."""
    elements = [
        t for t in itertools.product(*(range(m) for m in moduli))
        if any(t)
    ]
    best = 0

    def extend(seq, start):
        nonlocal best
        best = max(best, len(seq))
        for i in range(start, len(elements)):
            cand = seq + [elements[i]]
            if naive_zero_sum_free(moduli, cand):
                extend(cand, i)

    extend([], 0)
    return best + 1


def enumerate_zsf(n: int, length: int):
    """All non-decreasing zero-sum free sequences over Z_n of the given
    length, as tuples of residues in [1, n-1]."""
    out = []

    def extend(seq, start, sums):
        if len(seq) == length:
            out.append(tuple(seq))
            return
        for v in range(start, n):
            fresh = {v % n} | {(p + v) % n for p in sums}
            if 0 in fresh:
                continue
            extend(seq + [v], v, sums | fresh)

    extend([], 1, set())
    return out


# --- subset sums ----------------------------------------------------------

def naive_subset_sums(ints):
    return frozenset(
        sum(v for (v,) in sub) for sub in nonempty_subsets([(v,) for v in ints])
    )


def naive_is_behaving(ints) -> bool:
    ints = list(ints)
    return bool(ints) and naive_subset_sums(ints) == frozenset(range(1, sum(ints) + 1))
