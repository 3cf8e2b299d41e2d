"""Brute-force multiplicities for the modular group.

Every hyperbolic class of PSL(2, Z) with positive trace is represented by a
cyclic word R^a1 L^b1 ... R^ar L^br (all exponents >= 1), unique up to
cyclic rotation of the (a_i, b_i) pairs.  Counting primitive cyclic words
by trace gives m(t) with no class numbers involved.
"""
from collections import Counter
from dataclasses import dataclass

__all__ = ["RLWord", "word_matrix", "enumerate_classes", "oracle_multiplicity"]

R = ((1, 1), (0, 1))
L = ((1, 0), (1, 1))


def _mul(X, Y):
    return ((X[0][0] * Y[0][0] + X[0][1] * Y[1][0], X[0][0] * Y[0][1] + X[0][1] * Y[1][1]),
            (X[1][0] * Y[0][0] + X[1][1] * Y[1][0], X[1][0] * Y[0][1] + X[1][1] * Y[1][1]))


def _rl(a, b):
    # R^a L^b = [[1 + ab, a], [b, 1]]
    return ((1 + a * b, a), (b, 1))


@dataclass(frozen=True)
class RLWord:
    exponents: tuple

    def __post_init__(self):
        ex = tuple(self.exponents)
        if not ex or len(ex) % 2 or any(x < 1 for x in ex):
            raise ValueError(f"need a nonempty even-length tuple of positive exponents, got {ex}")
        object.__setattr__(self, "exponents", ex)

    @property
    def pairs(self):
        ex = self.exponents
        return tuple(zip(ex[::2], ex[1::2]))

    def canonical(self):
        p = self.pairs
        best = min(p[i:] + p[:i] for i in range(len(p)))
        return RLWord(tuple(x for pair in best for x in pair))

    def is_primitive(self):
        p = self.pairs
        r = len(p)
        return not any(r % k == 0 and p == p[:k] * (r // k) for k in range(1, r))

    @property
    def trace(self):
        M = word_matrix(self)
        return M[0][0] + M[1][1]


def word_matrix(w):
    M = ((1, 0), (0, 1))
    for a, b in w.pairs:
        M = _mul(M, _rl(a, b))
    return M


def _words_up_to(trace_max):
    """Yield (pairs, trace) for every pair sequence whose product has trace
    <= trace_max.  Entries are nonnegative, so appending letters never
    lowers the trace; that makes pruning exact."""
    stack = [((), ((1, 0), (0, 1)))]
    while stack:
        pairs, M = stack.pop()
        a = 1
        while True:
            Ma = _mul(M, ((1, a), (0, 1)))
            if Ma[0][0] + Ma[1][1] + Ma[0][1] > trace_max:
                # adding L^1 adds the (0,1) entry to the trace
                break
            b = 1
            while True:
                P = _mul(Ma, ((1, 0), (b, 1)))
                tr = P[0][0] + P[1][1]
                if tr > trace_max:
                    break
                nxt = pairs + ((a, b),)
                yield nxt, tr
                stack.append((nxt, P))
                b += 1
            a += 1


def enumerate_classes(trace_max):
    """trace -> number of primitive hyperbolic classes, for 3 <= trace <= trace_max."""
    if trace_max < 3:
        raise ValueError("trace_max must be >= 3")
    counts = Counter()
    for pairs, tr in _words_up_to(trace_max):
        # keep only the canonical rotation of each cyclic word
        if any(pairs[i:] + pairs[:i] < pairs for i in range(1, len(pairs))):
            continue
        r = len(pairs)
        if any(r % k == 0 and pairs == pairs[:k] * (r // k) for k in range(1, r)):
            continue
        counts[tr] += 1
    return {t: counts.get(t, 0) for t in range(3, trace_max + 1)}


def oracle_multiplicity(t):
    return enumerate_classes(t)[t]
