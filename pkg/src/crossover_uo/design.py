"""Crossover designs, the design file format, and frequency statistics.

A design is a p x n grid (periods x subjects) of treatment labels 1..v.
Letter files map a -> 1, b -> 2, and so on.
"""

import itertools
import random
import string
from dataclasses import dataclass
from functools import cached_property
from math import comb

from . import kernels
from .errors import EmptyDesign, LabelGap, MalformedFile, NotMultiple, TooLarge
from .ratmat import RationalMatrix

DEFAULT_ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class CrossoverDesign:
    assignment: tuple  # p rows of n labels
    v: int

    def __post_init__(self):
        grid = tuple(tuple(int(x) for x in row) for row in self.assignment)
        object.__setattr__(self, "assignment", grid)
        if len(grid) < 2:
            raise ValueError("a crossover design needs p >= 2 periods")
        n = len(grid[0])
        if n < 1:
            raise ValueError("a crossover design needs n >= 1 subjects")
        if any(len(r) != n for r in grid):
            raise ValueError("ragged design rows")
        if self.v < 2:
            raise ValueError("a crossover design needs v >= 2 treatments")
        for r in grid:
            for x in r:
                if not 1 <= x <= self.v:
                    raise ValueError(f"label {x} outside 1..{self.v}")

    @classmethod
    def from_columns(cls, columns, v=None):
        columns = [tuple(c) for c in columns]
        if v is None:
            v = max(max(c) for c in columns)
        return cls(tuple(zip(*columns)), v)

    @property
    def p(self):
        return len(self.assignment)

    @property
    def n(self):
        return len(self.assignment[0])

    def columns(self):
        return list(zip(*self.assignment))

    def column(self, j):
        """Subject j (0-based) as a tuple of labels by period."""
        return tuple(r[j] for r in self.assignment)

    def labels_used(self):
        return sorted({x for r in self.assignment for x in r})

    @cached_property
    def profile(self):
        return profile(self)


@dataclass(frozen=True)
class FrequencyProfile:
    N: RationalMatrix
    Ntilde: RationalMatrix
    S: RationalMatrix
    L: RationalMatrix
    Ltilde: RationalMatrix
    r: tuple
    rtilde: tuple
    Theta: RationalMatrix
    last_counts: tuple
    # integer views used by the information-matrix code
    counts: tuple  # n_iu as v tuples
    tcounts: tuple  # first p-1 periods only
    last: tuple  # 0-based last-period label per subject


@dataclass(frozen=True)
class DesignStats:
    beta: int
    ell: int
    x: int
    y: int
    t: int
    subjects: tuple  # (beta_u, l_u) per subject

    def as_dict(self):
        return {"beta": self.beta, "l": self.ell, "x": self.x, "y": self.y, "t": self.t}


def parse_design(text, v=None):
    """Read a design from the text file format.

    '#' starts a comment line. An optional first line ``p v n`` is taken as a
    header when the remaining lines match its p and n. Tokens are all
    positive integers or all single letters. Without a header (or explicit
    ``v``) the treatment count is the largest label and labels must be dense.
    """
    lines = []
    for raw in text.splitlines():
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        lines.append(s.split())
    if not lines:
        raise EmptyDesign("no design rows found")

    header = None
    first = lines[0]
    if len(first) == 3 and all(tok.isdigit() for tok in first):
        hp, hv, hn = (int(t) for t in first)
        rest = lines[1:]
        if hp >= 1 and len(rest) == hp and all(len(r) == hn for r in rest):
            header = (hp, hv, hn)
            lines = rest
    if not lines:
        raise EmptyDesign("header present but no design rows")

    width = len(lines[0])
    if any(len(r) != width for r in lines):
        raise MalformedFile("ragged rows: every period needs the same number of subjects")
    tokens = [tok for r in lines for tok in r]
    if all(tok.isdigit() for tok in tokens):
        grid = [[int(tok) for tok in r] for r in lines]
        if any(x < 1 for r in grid for x in r):
            raise MalformedFile("treatment labels must be positive integers")
    elif all(len(tok) == 1 and tok in string.ascii_letters for tok in tokens):
        if len({tok.islower() for tok in tokens}) > 1:
            raise MalformedFile("mixed-case letter labels")
        grid = [[string.ascii_lowercase.index(tok.lower()) + 1 for tok in r] for r in lines]
    else:
        raise MalformedFile("tokens must be all positive integers or all single letters")
    if len(grid) < 2:
        raise MalformedFile("a crossover design needs at least two periods")

    used = {x for r in grid for x in r}
    top = max(used)
    if v is None and header is not None:
        v = header[1]
    if v is None:
        if used != set(range(1, top + 1)):
            missing = sorted(set(range(1, top + 1)) - used)
            raise LabelGap(f"treatment labels are not dense; missing {missing}")
        v = top
    elif top > v:
        raise MalformedFile(f"label {top} exceeds declared v = {v}")
    try:
        return CrossoverDesign(tuple(tuple(r) for r in grid), v)
    except ValueError as exc:
        raise MalformedFile(str(exc)) from exc


def format_design(d, header=True, letters=False, comment=None):
    out = []
    if comment:
        out.extend(f"# {line}" for line in comment.splitlines())
    if header:
        out.append(f"{d.p} {d.v} {d.n}")
    for row in d.assignment:
        if letters:
            out.append(" ".join(string.ascii_lowercase[x - 1] for x in row))
        else:
            out.append(" ".join(str(x) for x in row))
    return "\n".join(out) + "\n"


def profile(d):
    N, Nt, S, L, last = kernels.frequency_counts(d.assignment, d.v)
    v, p = d.v, d.p
    r = tuple(sum(row) for row in N)
    rt = tuple(sum(row) for row in Nt)
    last_counts = [0] * v
    theta = [[0] * v for _ in range(v)]
    for u, i in enumerate(last):
        last_counts[i] += 1
        for j in range(v):
            theta[j][i] += N[j][u]
    Lt = [[0] + row[: p - 1] for row in L]
    return FrequencyProfile(
        N=RationalMatrix(N),
        Ntilde=RationalMatrix(Nt),
        S=RationalMatrix(S),
        L=RationalMatrix(L),
        Ltilde=RationalMatrix(Lt),
        r=r,
        rtilde=rt,
        Theta=RationalMatrix(theta),
        last_counts=tuple(last_counts),
        counts=tuple(tuple(row) for row in N),
        tcounts=tuple(tuple(row) for row in Nt),
        last=tuple(last),
    )


def stats(d):
    """beta, l = trace(Theta), and the slacks x, y over the binary baseline."""
    if d.n % d.v:
        raise NotMultiple(f"n = {d.n} is not a multiple of v = {d.v}")
    t = d.n // d.v
    pr = d.profile
    counts = pr.counts
    subjects = []
    for u in range(d.n):
        bu = sum(counts[i][u] ** 2 for i in range(d.v))
        lu = counts[pr.last[u]][u]
        subjects.append((bu, lu))
    beta = sum(b for b, _ in subjects)
    ell = sum(lu for _, lu in subjects)
    x = beta - 2 * ell - d.v * t * (d.p - 2)
    y = ell - d.v * t
    return DesignStats(beta=beta, ell=ell, x=x, y=y, t=t, subjects=tuple(subjects))


def classify(d):
    rows = d.assignment
    no_self = all(
        rows[k][u] != rows[k - 1][u] for k in range(1, d.p) for u in range(d.n)
    )
    binary = all(len(set(c)) == d.p for c in d.columns())
    return {"no_self_succession": no_self, "binary": binary}


def admissible_columns(p, v, no_self_succession=True, binary=False):
    """All treatment sequences of length p, in lexicographic order."""
    labels = range(1, v + 1)
    if binary:
        return [c for c in itertools.permutations(labels, p)]
    cols = itertools.product(labels, repeat=p)
    if no_self_succession:
        return [c for c in cols if all(c[k] != c[k - 1] for k in range(1, p))]
    return list(cols)


def count_column_multisets(p, v, n, no_self_succession=True):
    c = v * (v - 1) ** (p - 1) if no_self_succession else v**p
    return comb(c + n - 1, n)


def enumerate_column_multisets(p, v, n, no_self_succession=True, cap=DEFAULT_ENUMERATION_CAP):
    """One design per multiset of n admissible columns.

    Raises TooLarge before yielding anything if the multiset count exceeds
    ``cap``. Designs are built with the given v even if some treatment is
    unused.
    """
    total = count_column_multisets(p, v, n, no_self_succession)
    if total > cap:
        raise TooLarge(
            f"{total} column multisets for p={p}, v={v}, n={n} exceeds cap {cap}; "
            "use sampling instead"
        )
    cols = admissible_columns(p, v, no_self_succession)

    def gen():
        for combo in itertools.combinations_with_replacement(cols, n):
            yield CrossoverDesign(tuple(zip(*combo)), v)

    return gen()


def random_column(rng, p, v, no_self_succession=True, binary=False):
    if binary:
        return tuple(rng.sample(range(1, v + 1), p))
    col = [rng.randint(1, v)]
    for _ in range(p - 1):
        if no_self_succession:
            x = rng.randint(1, v - 1)
            col.append(x + 1 if x >= col[-1] else x)
        else:
            col.append(rng.randint(1, v))
    return tuple(col)


def random_design(p, v, n, seed, no_self_succession=True, binary=False):
    """Design whose columns are drawn independently and uniformly from the
    admissible columns; deterministic in ``seed``."""
    rng = random.Random(seed)
    cols = [random_column(rng, p, v, no_self_succession, binary) for _ in range(n)]
    return CrossoverDesign(tuple(zip(*cols)), v)
