"""Information matrices for direct (tau), residual (delta), period (alpha)
and subject (gamma) effects.

Each matrix is available two ways: from the frequency profile, and from an
explicit model matrix reduced by Schur complements. The second route is an
independent oracle for the first.
"""

from dataclasses import dataclass
from fractions import Fraction

from .catalog import validate_params
from .ratmat import RationalMatrix, mp_inverse, rank, schur

IGNORED = "ignored"
ADJUSTED = "adjusted"
PERIOD_MODES = (IGNORED, ADJUSTED)

BLOCK_NAMES = ("tau", "delta", "alpha", "gamma")


@dataclass(frozen=True)
class JointInfo:
    matrix: RationalMatrix
    layout: tuple  # ((name, size), ...) in matrix order

    def offsets(self):
        out = {}
        at = 0
        for name, size in self.layout:
            out[name] = range(at, at + size)
            at += size
        return out

    def block(self, a, b):
        off = self.offsets()
        return self.matrix.submatrix(off[a], off[b])

    def as_dict(self):
        return {
            "layout": [{"block": n, "size": s} for n, s in self.layout],
            "matrix": self.matrix.to_json_obj(),
        }


@dataclass(frozen=True)
class EffectsInfo:
    C11: RationalMatrix
    C12: RationalMatrix
    C22: RationalMatrix
    periods: str

    @property
    def v(self):
        return self.C11.rows

    @property
    def assembled(self):
        return RationalMatrix.block([[self.C11, self.C12], [self.C12.T, self.C22]])

    @classmethod
    def from_assembled(cls, C, periods):
        v = C.rows // 2
        a, b = range(v), range(v, 2 * v)
        return cls(C.submatrix(a, a), C.submatrix(a, b), C.submatrix(b, b), periods)

    def as_dict(self):
        return {
            "periods": self.periods,
            "C11": self.C11.to_json_obj(),
            "C12": self.C12.to_json_obj(),
            "C22": self.C22.to_json_obj(),
        }


def _H(v):
    return RationalMatrix.centering(v)


def _J(r, c=None):
    return RationalMatrix.ones(r, c)


def _outer(a, b, scale=1):
    s = Fraction(scale)
    return RationalMatrix([[Fraction(x) * y * s for y in b] for x in a])


def info_full(d):
    pr = d.profile
    p, n = d.p, d.n
    M = RationalMatrix.block([
        [RationalMatrix.diag(pr.r), pr.S, pr.L, pr.N],
        [pr.S.T, RationalMatrix.diag(pr.rtilde), pr.Ltilde, pr.Ntilde],
        [pr.L.T, pr.Ltilde.T, n * RationalMatrix.identity(p), _J(p, n)],
        [pr.N.T, pr.Ntilde.T, _J(n, p), p * RationalMatrix.identity(n)],
    ])
    return JointInfo(M, (("tau", d.v), ("delta", d.v), ("alpha", p), ("gamma", n)))


def _gram_blocks(d):
    """NN'/p, NÑ'/p and ÑÑ'/p from integer counts."""
    pr = d.profile
    v, p = d.v, d.p
    N, Nt = pr.counts, pr.tcounts
    inv_p = Fraction(1, p)

    def gram(A, B):
        return RationalMatrix(
            [[sum(x * y for x, y in zip(A[i], B[j])) * inv_p for j in range(v)] for i in range(v)]
        )

    return gram(N, N), gram(N, Nt), gram(Nt, Nt)


def info_elim_subjects(d):
    """Information for (tau, delta, alpha) with subject effects eliminated."""
    pr = d.profile
    p, n = d.p, d.n
    NN, NNt, NtNt = _gram_blocks(d)
    C11 = RationalMatrix.diag(pr.r) - NN
    C12 = pr.S - NNt
    C22 = RationalMatrix.diag(pr.rtilde) - NtNt
    ta = pr.L - _outer(pr.r, [1] * p, Fraction(1, p))
    da = pr.Ltilde - _outer(pr.rtilde, [1] * p, Fraction(1, p))
    aa = n * RationalMatrix.identity(p) - Fraction(n, p) * _J(p)
    M = RationalMatrix.block([
        [C11, C12, ta],
        [C12.T, C22, da],
        [ta.T, da.T, aa],
    ])
    return JointInfo(M, (("tau", d.v), ("delta", d.v), ("alpha", p)))


def effects_info(d, periods=IGNORED):
    """2v x 2v information for (tau, delta); periods ignored or eliminated."""
    if periods not in PERIOD_MODES:
        raise ValueError(f"periods must be one of {PERIOD_MODES}")
    pr = d.profile
    NN, NNt, NtNt = _gram_blocks(d)
    C11 = RationalMatrix.diag(pr.r) - NN
    C12 = pr.S - NNt
    C22 = RationalMatrix.diag(pr.rtilde) - NtNt
    if periods == ADJUSTED:
        n, p = d.n, d.p
        inv_n = Fraction(1, n)
        inv_np = Fraction(1, n * p)
        L, Lt = pr.L, pr.Ltilde
        C11 = C11 - (L @ L.T * inv_n - _outer(pr.r, pr.r, inv_np))
        C12 = C12 - (L @ Lt.T * inv_n - _outer(pr.r, pr.rtilde, inv_np))
        C22 = C22 - (Lt @ Lt.T * inv_n - _outer(pr.rtilde, pr.rtilde, inv_np))
    return EffectsInfo(C11, C12, C22, periods)


def model_matrix(d):
    """Rows in (period, subject) order; columns mu | alpha | gamma | tau | delta."""
    p, n, v = d.p, d.n, d.v
    width = 1 + p + n + 2 * v
    rows = []
    for i in range(p):
        for j in range(n):
            row = [0] * width
            row[0] = 1
            row[1 + i] = 1
            row[1 + p + j] = 1
            row[1 + p + n + d.assignment[i][j] - 1] = 1
            if i > 0:
                row[1 + p + n + v + d.assignment[i - 1][j] - 1] = 1
            rows.append(row)
    return rows


def info_via_model_matrix(d, eliminate=()):
    """X'X reduced by Schur complement over mu and the ``eliminate`` blocks.

    With nothing to eliminate the raw (tau, delta, alpha, gamma) block of X'X
    is returned, since that matrix carries no mean term.
    """
    eliminate = set(eliminate)
    if not eliminate <= {"alpha", "gamma"}:
        raise ValueError("eliminate must be a subset of {'alpha', 'gamma'}")
    p, n, v = d.p, d.n, d.v
    X = model_matrix(d)
    width = len(X[0])
    cols = list(zip(*X))
    G = RationalMatrix([[sum(a * b for a, b in zip(cols[i], cols[j])) for j in range(width)]
                        for i in range(width)])
    idx = {
        "mu": [0],
        "alpha": list(range(1, 1 + p)),
        "gamma": list(range(1 + p, 1 + p + n)),
        "tau": list(range(1 + p + n, 1 + p + n + v)),
        "delta": list(range(1 + p + n + v, 1 + p + n + 2 * v)),
    }
    out_blocks = [b for b in BLOCK_NAMES if b not in eliminate]
    keep = [i for b in out_blocks for i in idx[b]]
    if eliminate:
        R = schur(G, keep)
    else:
        R = G.submatrix(keep, keep)
    sizes = {"tau": v, "delta": v, "alpha": p, "gamma": n}
    return JointInfo(R, tuple((b, sizes[b]) for b in out_blocks))


def patterson_coefficients(p, v, t):
    """(a*, b*, c*, e) for a balanced design with parameters p, v, t."""
    p, v, t = Fraction(p), Fraction(v), Fraction(t)
    a = v * t * (p - 1) / (v - 1)
    b = -v * t * (p - 1) / (p * (v - 1))
    c = t * (p - 1) * (p * v - v - 1) / (p * (v - 1))
    e = t * (p - 1) / (p * v)
    return a, b, c, e


def patterson_closed(p, v, t):
    """Closed forms for a balanced design: M, C (adjusted) and C (ignored)."""
    prm = validate_params(p, v, t)
    a, b, c, e = patterson_coefficients(p, v, t)
    H, J = _H(v), _J(v)
    n = prm.n
    row = [-(p - 1)] + [1] * (p - 1)
    da = _outer([1] * v, row, Fraction(t, p))
    M = RationalMatrix.block([
        [a * H, b * H, RationalMatrix.zeros(v, p)],
        [b * H, c * H + e * J, da],
        [RationalMatrix.zeros(p, v), da.T, n * RationalMatrix.identity(p) - Fraction(n, p) * _J(p)],
    ])
    joint = JointInfo(M, (("tau", v), ("delta", v), ("alpha", p)))
    return {
        "M": joint,
        "C_adjusted": EffectsInfo(a * H, b * H, c * H, ADJUSTED),
        "C_ignored": EffectsInfo(a * H, b * H, c * H + e * J, IGNORED),
    }


def schur_effects(E, which="direct"):
    """Direct effects eliminating residual (C11.22) or the reverse (C22.11)."""
    if which == "direct":
        return E.C11 - E.C12 @ mp_inverse(E.C22) @ E.C12.T
    if which == "residual":
        return E.C22 - E.C12.T @ mp_inverse(E.C11) @ E.C12
    raise ValueError("which must be 'direct' or 'residual'")


def is_connected(d, E=None):
    """All direct and residual contrasts estimable with periods and subjects eliminated.

    Both all-ones vectors are null vectors of the adjusted C, so this is
    rank(C) = 2v - 2, which is the same as both Schur complements having
    rank v - 1.
    """
    if E is None:
        E = effects_info(d, ADJUSTED)
    return rank(E.assembled) == 2 * d.v - 2


def kushner_coefficient(p, v, t):
    validate_params(p, v, t)
    p, v, t = Fraction(p), Fraction(v), Fraction(t)
    return v * t / (v - 1) * (p - 1 - 1 / p - 1 / (p * (p - 1) * v))


def kushner_info(p, v, t):
    """Approximate-theory bound on the direct-effects information."""
    return kushner_coefficient(p, v, t) * _H(v)


def direct_schur_closed(p, v, t):
    """Scalar k with C*11.22 = k H for a balanced design."""
    a, _, _, _ = patterson_coefficients(p, v, t)
    p, v = Fraction(p), Fraction(v)
    return a * (1 - v / (p * (p * v - v - 1)))
