"""Known balanced constructions and the balance-condition verifier."""

from dataclasses import dataclass, field
from math import gcd

from .design import CrossoverDesign, classify, parse_design
from .errors import BadParams, BadShape, ExcludedCase, TooSmall

# (p, v, n) with the minimum n for which a balanced design is listed.
TABLE1 = (
    (3, 3, 6), (3, 7, 21), (3, 8, 56), (3, 11, 55),
    (4, 4, 4), (4, 5, 20), (4, 7, 14), (4, 8, 56), (4, 13, 52),
    (5, 5, 10), (5, 7, 21), (5, 8, 56), (5, 11, 55), (5, 13, 39),
    (6, 6, 6), (6, 7, 42), (6, 8, 56), (6, 11, 22),
)

FIXTURE_TEXT = """\
# v = 4 treatments, p = 3 periods, n = 12 subjects (t = 3, lambda = 2)
a b c b d a d a c c d b
b c a a b d a c d b c d
c a b d a b c d a d b c
"""


@dataclass(frozen=True)
class PattersonParams:
    p: int
    v: int
    t: int
    lam: int
    n: int

    def as_dict(self):
        return {"p": self.p, "v": self.v, "t": self.t, "lambda": self.lam, "n": self.n}


@dataclass
class PattersonReport:
    cond_a: bool
    cond_b: bool
    cond_c: bool
    cond_d: bool
    cond_e: bool
    params: PattersonParams = None
    failures: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.cond_a and self.cond_b and self.cond_c and self.cond_d and self.cond_e \
            and self.params is not None

    def as_dict(self):
        return {
            "cond_a": self.cond_a,
            "cond_b": self.cond_b,
            "cond_c": self.cond_c,
            "cond_d": self.cond_d,
            "cond_e": self.cond_e,
            "passed": self.passed,
            "params": self.params.as_dict() if self.params else None,
            "failures": self.failures,
        }


def validate_params(p, v, t):
    """PattersonParams for (p, v, t), or BadParams if the relations fail."""
    if not (2 <= p <= v):
        raise BadParams(f"need 2 <= p <= v, got p={p}, v={v}")
    if (p, v) == (2, 2):
        raise BadParams("p = v = 2 is excluded")
    if t < 1 or (t * (p - 1)) % (v - 1):
        raise BadParams(f"lambda = t(p-1)/(v-1) is not a positive integer for t={t}")
    return PattersonParams(p, v, t, t * (p - 1) // (v - 1), v * t)


def patterson_params(p, v):
    """Divisibility-minimal t with the implied lambda and n.

    Necessary conditions only: Table 1 sometimes needs a larger n.
    """
    if (p, v) == (2, 2):
        raise ExcludedCase("p = v = 2: neither direct nor residual effects are estimable")
    if p < 2 or p > v:
        raise BadShape(f"need 2 <= p <= v, got p={p}, v={v}")
    t = (v - 1) // gcd(p - 1, v - 1)
    return validate_params(p, v, t)


def table1():
    return list(TABLE1)


def table1_params():
    return [validate_params(p, v, n // v) for p, v, n in TABLE1]


def fixture_4_3_12():
    return parse_design(FIXTURE_TEXT)


def williams(v):
    """Williams design: v x v for even v, v x 2v for odd v."""
    if v < 3:
        raise TooSmall("williams needs v >= 3 (v = 2 is the excluded case)")
    seq = [0]
    lo, hi = 1, v - 1
    while len(seq) < v:
        seq.append(lo)
        lo += 1
        if len(seq) < v:
            seq.append(hi)
            hi -= 1
    cols = [tuple((s + j) % v + 1 for s in seq) for j in range(v)]
    if v % 2:
        cols += [tuple(reversed(c)) for c in cols]
    return CrossoverDesign.from_columns(cols, v)


def _offdiag_constant(M):
    vals = {M[i, j] for i in range(M.rows) for j in range(M.cols) if i != j}
    return next(iter(vals)) if len(vals) == 1 else None


def verify_patterson(d):
    """Check balance conditions (a)-(e) on the frequency profile."""
    pr = d.profile
    v, p, n = d.v, d.p, d.n
    fails = {}

    Lvals = {pr.L[i, k] for i in range(v) for k in range(p)}
    t = None
    cond_a = len(Lvals) == 1 and next(iter(Lvals)) >= 1
    if cond_a:
        t = int(next(iter(Lvals)))
    else:
        fails["a"] = f"period counts not uniform: values {sorted(int(x) for x in Lvals)}"

    binary = classify(d)["binary"]

    def bibd(counts, r, label):
        if not binary:
            fails[label] = "not binary: some treatment repeats on a subject"
            return False
        if len(set(r)) != 1:
            fails[label] = f"replications not constant: {list(r)}"
            return False
        NN = counts @ counts.T
        c = _offdiag_constant(NN)
        if c is None or c < 1:
            fails[label] = "pairwise concurrences not constant"
            return False
        return True

    cond_b = bibd(pr.N, pr.r, "b")
    cond_c = bibd(pr.Ntilde, pr.rtilde, "c")

    lam_s = pr.S[0, 1]
    cond_d = lam_s >= 1 and all(
        pr.S[i, j] == (0 if i == j else lam_s) for i in range(v) for j in range(v)
    )
    if not cond_d:
        fails["d"] = "S is not lambda (J - I)"

    lam_t = _offdiag_constant(pr.Theta)
    cond_e = lam_t is not None and (not cond_d or lam_t == lam_s)
    if not cond_e:
        fails["e"] = "off-diagonal of Theta not constant (or differs from lambda of S)"

    params = None
    if cond_a and cond_b and cond_c and cond_d and cond_e:
        lam = int(lam_s)
        if lam * (v - 1) != t * (p - 1) or n != v * t:
            fails["relations"] = "lambda (v-1) != t (p-1) or n != v t"
        else:
            params = PattersonParams(p, v, t, lam, n)
    return PattersonReport(cond_a, cond_b, cond_c, cond_d, cond_e, params, fails)
