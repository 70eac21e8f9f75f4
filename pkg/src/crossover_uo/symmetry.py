"""Treatment relabeling and averaging over the symmetric group."""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, lcm

from .design import CrossoverDesign, classify, stats
from .errors import (
    BadParams,
    NotInClassD,
    PreconditionViolated,
    SizeMismatch,
    TooLarge,
    TooSmall,
)
from .infomat import (
    ADJUSTED,
    IGNORED,
    EffectsInfo,
    JointInfo,
    effects_info,
    info_elim_subjects,
    is_connected,
    patterson_closed,
)
from .ratmat import RationalMatrix, complete_symmetric

BRUTE_FORCE_MAX_V = 7
TARGETS = ("M", "C_ignored", "C_adjusted")


@dataclass(frozen=True)
class Permutation:
    """Bijection on 1..v; ``mapping[i - 1]`` is the image of i."""

    mapping: tuple

    def __post_init__(self):
        m = tuple(int(x) for x in self.mapping)
        object.__setattr__(self, "mapping", m)
        if sorted(m) != list(range(1, len(m) + 1)):
            raise ValueError(f"not a permutation of 1..{len(m)}: {m}")

    @classmethod
    def identity(cls, v):
        return cls(tuple(range(1, v + 1)))

    @classmethod
    def transposition(cls, v, a, b):
        m = list(range(1, v + 1))
        m[a - 1], m[b - 1] = b, a
        return cls(tuple(m))

    @property
    def degree(self):
        return len(self.mapping)

    def __call__(self, i):
        return self.mapping[i - 1]

    def inverse(self):
        inv = [0] * self.degree
        for i, gi in enumerate(self.mapping, start=1):
            inv[gi - 1] = i
        return Permutation(tuple(inv))


def all_permutations(v):
    for m in itertools.permutations(range(1, v + 1)):
        yield Permutation(m)


def relabel(d, g):
    if g.degree != d.v:
        raise SizeMismatch(f"permutation on {g.degree} labels applied to v = {d.v}")
    return CrossoverDesign(tuple(tuple(g(x) for x in row) for row in d.assignment), d.v)


def _source_index(layout, ginv):
    """For each output index, the index it is read from under relabeling."""
    src = []
    at = 0
    for name, size in layout:
        if name in ("tau", "delta"):
            src.extend(at + ginv[k] for k in range(size))
        else:
            src.extend(range(at, at + size))
        at += size
    return src


def _permute(M, src):
    e = M._e
    return RationalMatrix._raw(
        tuple(tuple(e[i][j] for j in src) for i in src), M.rows, M.cols
    )


def _layout_for(M, v):
    if M.rows == v:
        return (("tau", v),)
    if M.rows == 2 * v:
        return (("tau", v), ("delta", v))
    raise SizeMismatch(f"{M.rows}x{M.cols} matrix is not v or 2v square for v = {v}")


def conjugate(info, g):
    """Information matrix of the relabeled design, obtained from ``info``.

    Accepts a JointInfo, an EffectsInfo, or a bare v x v / 2v x 2v matrix.
    """
    v = g.degree
    ginv = [g.inverse()(k + 1) - 1 for k in range(v)]
    if isinstance(info, JointInfo):
        return JointInfo(_permute(info.matrix, _source_index(info.layout, ginv)), info.layout)
    if isinstance(info, EffectsInfo):
        C = conjugate(info.assembled, g)
        return EffectsInfo.from_assembled(C, info.periods)
    return _permute(info, _source_index(_layout_for(info, v), ginv))


def symmetric_average(A):
    """Average of P'AP over all permutation matrices P, via trace and grand sum."""
    k = A.rows
    if k < 2 or not A.is_square():
        raise TooSmall("need a square matrix with k >= 2")
    tr = A.trace()
    s = A.total()
    a = tr / k
    b = (s - tr) / (k * (k - 1))
    return a, b, complete_symmetric(k, a, b)


def symmetric_average_brute(A):
    """Same average computed by summing over all k! permutations."""
    k = A.rows
    acc = RationalMatrix.zeros(k)
    for perm in itertools.permutations(range(k)):
        acc = acc + _permute(A, list(perm))
    return acc / factorial(k)


def target_matrix(d, target):
    if target == "M":
        return info_elim_subjects(d)
    if target == "C_ignored":
        return effects_info(d, IGNORED).assembled
    if target == "C_adjusted":
        return effects_info(d, ADJUSTED).assembled
    raise ValueError(f"target must be one of {TARGETS}")


def average_matrix_brute(M, layout, v, max_v=BRUTE_FORCE_MAX_V):
    """Exact average of the relabeling conjugates of M over all of S_v."""
    if v > max_v:
        raise TooLarge(f"brute-force averaging over {v}! permutations exceeds cap v <= {max_v}")
    den = 1
    for row in M._e:
        for x in row:
            den = lcm(den, x.denominator)
    ints = [[x.numerator * (den // x.denominator) for x in row] for row in M._e]
    m = M.rows
    acc = [[0] * m for _ in range(m)]
    for perm in itertools.permutations(range(v)):
        src = _source_index(layout, perm)
        for i in range(m):
            si = ints[src[i]]
            ai = acc[i]
            for j in range(m):
                ai[j] += si[src[j]]
    total = den * factorial(v)
    return RationalMatrix([[Fraction(x, total) for x in row] for row in acc])


def average_brute(d, target="M", max_v=BRUTE_FORCE_MAX_V):
    X = target_matrix(d, target)
    if isinstance(X, JointInfo):
        return average_matrix_brute(X.matrix, X.layout, d.v, max_v)
    return average_matrix_brute(X, _layout_for(X, d.v), d.v, max_v)


@dataclass(frozen=True)
class AveragedEffects:
    abar: Fraction
    bbar: Fraction
    cbar: Fraction
    e: Fraction

    @property
    def delta(self):
        return self.abar * self.cbar - self.bbar**2

    def assembled(self, v):
        H = RationalMatrix.centering(v)
        J = RationalMatrix.ones(v)
        return RationalMatrix.block([
            [self.abar * H, self.bbar * H],
            [self.bbar * H, self.cbar * H + self.e * J],
        ])


def averaged_coefficients(p, v, t, beta, ell):
    """abar, bbar, cbar, e for a design with statistics beta and l."""
    p, v, t = Fraction(p), Fraction(v), Fraction(t)
    den = p * (v - 1)
    abar = (p * p * v * t - beta) / den
    bbar = -(beta - ell) / den
    cbar = (p * v * t * (p - 1) - (beta - 2 * ell) - t * (v + p - 1)) / den
    e = t * (p - 1) / (p * v)
    return AveragedEffects(abar, bbar, cbar, e)


def average_closed(d):
    """Averaged C (periods ignored) from beta and l; designs without
    self-succession only."""
    if not classify(d)["no_self_succession"]:
        raise NotInClassD("closed-form average needs a design without self-succession")
    st = stats(d)
    return averaged_coefficients(d.p, d.v, st.t, st.beta, st.ell)


def average_identity_holds(d, max_v=BRUTE_FORCE_MAX_V):
    """Brute-force average of M equals the balanced closed form."""
    cls = classify(d)
    if not cls["binary"]:
        raise PreconditionViolated("design is not binary")
    if d.n % d.v:
        raise PreconditionViolated("n is not a multiple of v")
    if d.v > max_v:
        raise PreconditionViolated(f"v = {d.v} exceeds brute-force cap {max_v}")
    if not is_connected(d):
        raise PreconditionViolated("design is not connected")
    t = d.n // d.v
    try:
        closed = patterson_closed(d.p, d.v, t)["M"].matrix
    except BadParams as exc:
        raise PreconditionViolated(f"no balanced closed form for these parameters: {exc}")
    return average_brute(d, "M", max_v) == closed



# names used by the published interface
lemma31_average = symmetric_average
check_32 = average_identity_holds
