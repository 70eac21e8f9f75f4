"""Optimality certificates: inequality ledger, dominance checks, efficiency
bounds, the combined direct+residual variance functional, and spectral
checks on block-structured information matrices."""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .catalog import PattersonParams, validate_params
from .design import classify, stats
from .errors import (
    BadParams,
    DegenerateParams,
    NonpositiveDenominator,
    NotConnected,
    NotInClassD,
    NotMultiple,
    PreconditionViolated,
    RowSumViolation,
)
from .infomat import (
    ADJUSTED,
    IGNORED,
    EffectsInfo,
    direct_schur_closed,
    kushner_coefficient,
    effects_info,
    is_connected,
    patterson_closed,
    patterson_coefficients,
    schur_effects,
)
from .ratmat import RationalMatrix, _integer_scaled, is_nnd, ldl_pivots, mp_inverse, rref, schur
from .symmetry import average_brute, averaged_coefficients, symmetric_average

DIRECT = "direct"
RESIDUAL = "residual"
JOINT_BINARY = "joint_binary"
UO_MODES = (DIRECT, RESIDUAL, JOINT_BINARY)


@dataclass(frozen=True)
class BlockParams:
    """Scalars of [[aH, bH], [bH, cH + eJ]]."""

    a: Fraction
    b: Fraction
    c: Fraction
    e: Fraction
    x: int = None
    y: int = None

    @property
    def delta(self):
        return self.a * self.c - self.b**2

    def assembled(self, v):
        H = RationalMatrix.centering(v)
        J = RationalMatrix.ones(v)
        return RationalMatrix.block([
            [self.a * H, self.b * H],
            [self.b * H, self.c * H + self.e * J],
        ])

    def as_dict(self):
        from .ratmat import fmt_rational

        out = {k: fmt_rational(getattr(self, k)) for k in ("a", "b", "c", "e")}
        out["delta"] = fmt_rational(self.delta)
        if self.x is not None:
            out["x"], out["y"] = self.x, self.y
        return out


def patterson_block_params(p, v, t):
    validate_params(p, v, t)
    a, b, c, e = patterson_coefficients(p, v, t)
    return BlockParams(a, b, c, e, 0, 0)


def averaged_block_params(d):
    """Block parameters of the averaged C (periods ignored), with x and y.

    The shifts from the balanced values are checked against the direct
    computation from beta and l.
    """
    if not classify(d)["no_self_succession"]:
        raise NotInClassD("design has a treatment following itself")
    st = stats(d)
    av = averaged_coefficients(d.p, d.v, st.t, st.beta, st.ell)
    a, b, c, e = patterson_coefficients(d.p, d.v, st.t)
    k = Fraction(1, d.p * (d.v - 1))
    assert av.abar == a - (st.x + 2 * st.y) * k
    assert av.bbar == b - (st.x + st.y) * k
    assert av.cbar == c - st.x * k
    return BlockParams(av.abar, av.bbar, av.cbar, av.e, st.x, st.y)


# inequality ledger


@dataclass
class LedgerReport:
    subject_slacks: list  # per subject: (beta_u - l_u(l_u-1) - p, beta_u - 2l_u - (p-2), beta_u - l_u - (p-1))
    aggregate_slacks: dict
    holds: bool

    def as_dict(self):
        return {
            "aggregate_slacks": self.aggregate_slacks,
            "min_subject_slacks": [min(s[k] for s in self.subject_slacks) for k in range(3)],
            "holds": self.holds,
        }


def inequality_ledger(d):
    if not classify(d)["no_self_succession"]:
        raise NotInClassD("design has a treatment following itself")
    if d.n % d.v:
        raise NotMultiple(f"n = {d.n} is not a multiple of v = {d.v}")
    st = stats(d)
    p, vt = d.p, d.v * st.t
    subj = [
        (bu - lu * (lu - 1) - p, bu - 2 * lu - (p - 2), bu - lu - (p - 1))
        for bu, lu in st.subjects
    ]
    agg = {
        "beta - pvt": st.beta - p * vt,
        "beta - l - vt(p-1)": st.beta - st.ell - vt * (p - 1),
        "beta - 2l - vt(p-2)": st.beta - 2 * st.ell - vt * (p - 2),
    }
    holds = all(s >= 0 for row in subj for s in row) and all(s >= 0 for s in agg.values())
    return LedgerReport(subj, agg, holds)


# dominance


@dataclass
class UOReport:
    mode: str
    competitor_id: object
    dominance: bool
    difference_matrix: RationalMatrix
    min_slack: Fraction = None
    chain_ok: bool = None
    details: dict = field(default_factory=dict)

    def as_dict(self):
        from .ratmat import fmt_rational

        return {
            "mode": self.mode,
            "competitor_id": self.competitor_id,
            "dominance": self.dominance,
            "difference_matrix": self.difference_matrix.to_json_obj(),
            "min_slack": None if self.min_slack is None else fmt_rational(self.min_slack),
            "chain_ok": self.chain_ok,
            "details": self.details,
        }


def averaged_direct_schur(p, v, t, beta, ell):
    """Scalar k with (averaged C)11.22 = k H."""
    p, v, t = Fraction(p), Fraction(v), Fraction(t)
    den = p * v * t * (p - 1) - (beta - 2 * ell) - t * (v + p - 1)
    if den == 0:
        raise NotConnected("averaged residual block is singular")
    return (p * p * t * v - beta - Fraction((beta - ell) ** 2) / den) / (p * (v - 1))


def averaged_residual_schur(p, v, t, beta, ell):
    """(averaged C)22.11 as a matrix (periods ignored)."""
    p_, v_, t_ = Fraction(p), Fraction(v), Fraction(t)
    av = averaged_coefficients(p, v, t, beta, ell)
    den = p_ * (v_ - 1) * (p_ * p_ * v_ * t_ - beta)
    if den == 0:
        raise NotConnected("averaged direct block is singular")
    k = av.cbar - Fraction((beta - ell) ** 2) / den
    return k * RationalMatrix.centering(v) + av.e * RationalMatrix.ones(v)


def patterson_residual_schur(p, v, t):
    a, b, c, e = patterson_coefficients(p, v, t)
    p_, v_ = Fraction(p), Fraction(v)
    k = c - v_ * t * (p_ - 1) / (p_ * p_ * (v_ - 1))
    return k * RationalMatrix.centering(v) + e * RationalMatrix.ones(v)


def _min_slack(M):
    _, piv = ldl_pivots(M)
    return min(piv) if piv else None


def _check_competitor(params, d, need_binary):
    if (d.p, d.v, d.n) != (params.p, params.v, params.n):
        raise PreconditionViolated(
            f"competitor shape (p={d.p}, v={d.v}, n={d.n}) does not match "
            f"(p={params.p}, v={params.v}, n={params.n})"
        )
    cls = classify(d)
    if not cls["no_self_succession"]:
        raise PreconditionViolated("competitor has a treatment following itself")
    if need_binary and not cls["binary"]:
        raise PreconditionViolated("competitor is not binary")
    if not is_connected(d):
        raise PreconditionViolated("competitor is not connected")


def check_uo(mode, params, competitor, competitor_id=None):
    """Dominance of the balanced design over one competitor.

    ``direct``/``residual`` compare the Schur complement of the balanced C
    against that of the competitor's permutation average (periods ignored,
    both closed forms). ``joint_binary`` compares the balanced C (periods
    adjusted) against the period-eliminated brute-force average of M.
    Each report also checks the concavity chain on the instance.
    """
    if mode not in UO_MODES:
        raise ValueError(f"mode must be one of {UO_MODES}")
    if not isinstance(params, PattersonParams):
        params = validate_params(*params)
    d = competitor
    _check_competitor(params, d, need_binary=(mode == JOINT_BINARY))
    p, v, t = params.p, params.v, params.t
    H = RationalMatrix.centering(v)
    details = {}

    if mode == DIRECT:
        st = stats(d)
        star = direct_schur_closed(p, v, t) * H
        bar = averaged_direct_schur(p, v, t, st.beta, st.ell) * H
        diff = star - bar
        # (sum C_g)11.22 / v! >= sum (C_g)11.22 / v!, with (C_g)11.22 = (C11.22)_g
        chain = []
        for periods in (IGNORED, ADJUSTED):
            _, _, avg = symmetric_average(schur_effects(effects_info(d, periods), "direct"))
            chain.append(is_nnd(bar - avg))
        chain_ok = all(chain)
        details.update(x=st.x, y=st.y)
    elif mode == RESIDUAL:
        st = stats(d)
        star = patterson_residual_schur(p, v, t)
        bar = averaged_residual_schur(p, v, t, st.beta, st.ell)
        diff = star - bar
        chain = []
        for periods in (IGNORED, ADJUSTED):
            S22 = schur_effects(effects_info(d, periods), "residual")
            _, _, avg = symmetric_average(S22)
            # ignored-mode average keeps the J part; compare on the full matrix
            chain.append(is_nnd(bar - avg))
        chain_ok = all(chain)
        details.update(x=st.x, y=st.y)
    else:
        Mbar = average_brute(d, "M")
        v2 = 2 * v
        Cbar = schur(Mbar, range(v2))
        star = patterson_closed(p, v, t)["C_adjusted"].assembled
        diff = star - Cbar
        avg_c = average_brute(d, "C_adjusted")
        chain_ok = is_nnd(Cbar - avg_c)
        details["average_equals_closed_form"] = Mbar == patterson_closed(p, v, t)["M"].matrix

    ok, piv = ldl_pivots(diff)
    return UOReport(
        mode=mode,
        competitor_id=competitor_id,
        dominance=ok,
        difference_matrix=diff,
        min_slack=min(piv) if piv else None,
        chain_ok=chain_ok,
        details=details,
    )


# efficiency


@dataclass(frozen=True)
class EfficiencyRow:
    p: int
    v: int
    e_star: Fraction
    e_star_decimal: str

    def csv_row(self):
        return f"{self.p},{self.v},{self.e_star_decimal}"


def round_half_even(q, places=6):
    """Decimal string of the exact rational ``q`` rounded half-to-even."""
    q = Fraction(q)
    scale = 10**places
    num = q.numerator * scale
    den = q.denominator
    quo, rem = divmod(num, den)
    twice = 2 * rem
    if twice > den or (twice == den and quo % 2 == 1):
        quo += 1
    sign = "-" if quo < 0 else ""
    quo = abs(quo)
    whole, frac = divmod(quo, scale)
    return f"{sign}{whole}.{frac:0{places}d}" if places else f"{sign}{whole}"


def efficiency_closed(p, v):
    A = v * v * (p - 1) ** 2 * (p * v * (p - 1) - p - v)
    return Fraction(A, A + v)


def efficiency_ratio(p, v):
    p, v = Fraction(p), Fraction(v)
    return (1 - v / (p * (p * v - v - 1))) / (1 - (p * v - v + 1) / (p * v * (p - 1) ** 2))


def efficiency(p, v):
    """Lower bound on direct-effect efficiency relative to the approximate
    optimum; both closed forms must agree exactly."""
    if p < 3 or p > v:
        raise BadParams(f"efficiency bound needs 3 <= p <= v, got p={p}, v={v}")
    ratio = efficiency_ratio(p, v)
    closed = efficiency_closed(p, v)
    if ratio != closed:
        raise AssertionError(f"efficiency forms disagree at p={p}, v={v}: {ratio} vs {closed}")
    return EfficiencyRow(p, v, closed, round_half_even(closed, 6))


def efficiency_via_kushner(p, v, t):
    """Same bound as the ratio of the balanced and approximate-theory
    H-coefficients."""
    return direct_schur_closed(p, v, t) / kushner_coefficient(p, v, t)


# the functional A


def contrast_quadruples(v, allow_same_direct=False, allow_same_residual=False):
    """Ordered (i, i', j, j') with i != j, i != i', i' != j', j != j'.

    The optional flags drop the i != i' or j != j' constraint.
    """
    out = []
    rng = range(v)
    for i in rng:
        for ip in rng:
            if ip == i and not allow_same_direct:
                continue
            for j in rng:
                if j == i:
                    continue
                for jp in rng:
                    if jp == ip:
                        continue
                    if jp == j and not allow_same_residual:
                        continue
                    out.append((i, ip, j, jp))
    return out


def _quad_form(P, v, q):
    """l'Pl for the contrast q, with P given as integer rows."""
    i, ip, j, jp = q
    idx = (i, ip, v + j, v + jp)
    sgn = (1, -1, 1, -1)
    s = 0
    for a in range(4):
        ra = P[idx[a]]
        for b in range(4):
            s += sgn[a] * sgn[b] * ra[idx[b]]
    return s


def _contrast_vector(v, q):
    i, ip, j, jp = q
    vec = [0] * (2 * v)
    vec[i] += 1
    vec[ip] -= 1
    vec[v + j] += 1
    vec[v + jp] -= 1
    return vec


@lru_cache(maxsize=None)
def _contrast_basis(v, allow_same_direct, allow_same_residual):
    """Columns spanning the contrast vectors of the set."""
    vecs = [_contrast_vector(v, q) for q in contrast_quadruples(v, allow_same_direct, allow_same_residual)]
    R, _ = rref(RationalMatrix(vecs))
    return R.T


def _as_matrix(C):
    return C.assembled if isinstance(C, EffectsInfo) else C


def functional_A(C, method="enumerate", allow_same_direct=False, allow_same_residual=False):
    """Sum of variances of tau_i + delta_j - tau_i' - delta_j' (units of sigma^2).

    ``enumerate`` sums l'C+l over the contrast set; ``trace`` uses the
    diagonal traces of C+ once the residual block's grand-mean part is removed
    (valid only when every block then has zero row and column sums).
    """
    M = _as_matrix(C)
    v = M.rows // 2
    P = mp_inverse(M)
    quads = contrast_quadruples(v, allow_same_direct, allow_same_residual)

    # every contrast must lie in the column space of C
    K = M @ P - RationalMatrix.identity(2 * v)
    if not (K @ _contrast_basis(v, allow_same_direct, allow_same_residual)).is_zero():
        raise NotConnected("some contrast in the set is not estimable")

    if method == "enumerate":
        ints, den = _integer_scaled(P)
        return Fraction(sum(_quad_form(ints, v, q) for q in quads), den)
    if method != "trace":
        raise ValueError("method must be 'enumerate' or 'trace'")
    if allow_same_direct or allow_same_residual:
        raise ValueError("the trace form only covers the base contrast set")

    a, b = range(v), range(v, 2 * v)
    Om = P.submatrix(a, a)
    Th = P.submatrix(a, b)
    De = P.submatrix(b, b)
    De = De - (De.total() / (v * v)) * RationalMatrix.ones(v)
    for name, B in (("Omega", Om), ("Theta", Th), ("Delta", De)):
        if any(B.row_sums()) or any(B.col_sums()):
            raise RowSumViolation(f"{name} block of C+ has nonzero row or column sums")
    K = (v - 1) + (v - 2) ** 2
    return 2 * v * (K * (Om.trace() + De.trace()) - 2 * (v - 1) * Th.trace())


def functional_coefficients(p, v, t):
    """c11, c12 (= c13), c13, c21, c22, c23 of the rational form A(x, y).

    c11 and c12 carry the factor (v - 1)^2; with it A(0, 0) equals the
    functional evaluated on the balanced design's information matrix.
    """
    p, v, t = Fraction(p), Fraction(v), Fraction(t)
    c11 = 2 * p * v * (v - 1) ** 2 * (2 * p * v**3 - 6 * p * v**2 + 6 * p * v - v**3 + 2 * v - 3)
    c12 = -4 * p * v * (v - 1) ** 2 * (v * v - 2 * v + 2) / (t * (p - 1))
    c21 = t * v * (p - 1) * (p * p * v - p * v - p - v)
    c22 = -(2 * p * v + v - 1)
    c23 = -2 * (p * v - 1)
    return {"c11": c11, "c12": c12, "c13": c12, "c21": c21, "c22": c22, "c23": c23}


def functional_A_closed(p, v, t, x, y):
    if p < 2 or v < 2 or t < 1 or x < 0 or y < 0:
        raise BadParams("need p >= 2, v >= 2, t >= 1, x >= 0, y >= 0")
    if p == 2 and y != 0:
        raise BadParams("p = 2 only admits y = 0")
    c = functional_coefficients(p, v, t)
    tp = Fraction(t * (p - 1))
    den = c["c21"] + c["c22"] * x + c["c23"] * y - Fraction(y * y) / tp
    if den <= 0:
        raise NonpositiveDenominator("denominator <= 0 (averaged determinant not positive)")
    return (c["c11"] + c["c12"] * x + c["c13"] * y) / den


def delta_identity(p, v, t, x, y):
    """Determinant of the averaged 2x2 block system in terms of x and y."""
    c = functional_coefficients(p, v, t)
    tp = Fraction(t * (p - 1))
    inner = c["c21"] + c["c22"] * x + c["c23"] * y - Fraction(y * y) / tp
    return tp / (p * p * (v - 1) ** 2) * inner


def positivity_coefficients(p, v, t):
    """Coefficients of x, y and y^2 in the numerator of A(x,y) - A(0,0)."""
    c = functional_coefficients(p, v, t)
    return (
        c["c21"] * c["c12"] - c["c11"] * c["c22"],
        c["c21"] * c["c13"] - c["c11"] * c["c23"],
        c["c11"] / Fraction(t * (p - 1)),
    )


def mp_closed_form(bp, v):
    """Moore-Penrose inverse of [[aH, bH], [bH, cH + eJ]] in closed form."""
    if bp.delta == 0 or bp.e == 0:
        raise DegenerateParams("need a c - b^2 != 0 and e != 0")
    H = RationalMatrix.centering(v)
    J = RationalMatrix.ones(v)
    dl = bp.delta
    return RationalMatrix.block([
        [(bp.c / dl) * H, (-bp.b / dl) * H],
        [(-bp.b / dl) * H, (bp.a / dl) * H + J / (bp.e * v * v)],
    ])


@dataclass
class SpectrumReport:
    null_vector: bool
    ones_eigenvector: bool
    annihilation: bool
    roots_nonnegative: bool
    zero_root: bool
    trace: Fraction
    delta: Fraction

    @property
    def passed(self):
        return self.null_vector and self.ones_eigenvector and self.annihilation \
            and self.roots_nonnegative and not self.zero_root

    def as_dict(self):
        from .ratmat import fmt_rational

        return {
            "null_vector": self.null_vector,
            "ones_eigenvector": self.ones_eigenvector,
            "annihilation": self.annihilation,
            "roots_nonnegative": self.roots_nonnegative,
            "zero_root": self.zero_root,
            "quadratic": ["1", fmt_rational(-self.trace), fmt_rational(self.delta)],
        }


def spectrum_certificate(bp, v, C=None):
    """Exact checks of the eigenstructure of [[aH, bH], [bH, cH + eJ]].

    (i) (1; 0) is a null vector, (ii) (0; 1) has eigenvalue e v, (iii) the
    H-part satisfies X^2 - (a + c) X + (ac - b^2) diag(H, H) = 0, and (iv)
    both roots are nonnegative. ``C`` defaults to the assembled matrix.
    """
    if C is None:
        C = bp.assembled(v)
    H = RationalMatrix.centering(v)
    Z = RationalMatrix.zeros(v)
    J = RationalMatrix.ones(v)
    ones = [Fraction(1)] * v
    zeros = [Fraction(0)] * v
    u1 = RationalMatrix.column(ones + zeros)
    u2 = RationalMatrix.column(zeros + ones)
    null_vector = (C @ u1).is_zero()
    ones_eig = C @ u2 == (bp.e * v) * u2
    CH = C - RationalMatrix.block([[Z, Z], [Z, bp.e * J]])
    Pi = RationalMatrix.block([[H, Z], [Z, H]])
    tr = bp.a + bp.c
    dl = bp.delta
    annihilation = (CH @ CH - tr * CH + dl * Pi).is_zero()
    return SpectrumReport(
        null_vector=null_vector,
        ones_eigenvector=ones_eig,
        annihilation=annihilation,
        roots_nonnegative=tr >= 0 and dl >= 0,
        zero_root=dl == 0,
        trace=tr,
        delta=dl,
    )


def block_params_of(C, v):
    """Read (a, b, c, e) off a matrix of the block form, or None if it is not."""
    M = _as_matrix(C)
    a = (M.submatrix(range(v), range(v)).trace()) / (v - 1)
    b = (M.submatrix(range(v), range(v, 2 * v)).trace()) / (v - 1)
    D = M.submatrix(range(v, 2 * v), range(v, 2 * v))
    e = D.total() / (v * v)
    c = (D.trace() - e * v) / (v - 1)
    bp = BlockParams(a, b, c, e)
    return bp if bp.assembled(v) == M else None


# period monotonicity


@dataclass
class MonotonicityReport:
    info_dominated: bool
    functional_ordered: bool
    A_adjusted: Fraction
    A_ignored: Fraction
    period_uniform: bool
    direct_schur_equal: bool
    balanced: bool
    A_equal: bool

    @property
    def passed(self):
        ok = self.info_dominated and self.functional_ordered
        if self.period_uniform:
            ok = ok and self.direct_schur_equal
        if self.balanced:
            ok = ok and self.A_equal
        return ok

    def as_dict(self):
        from .ratmat import fmt_rational

        return {
            "info_dominated": self.info_dominated,
            "functional_ordered": self.functional_ordered,
            "A_adjusted": fmt_rational(self.A_adjusted),
            "A_ignored": fmt_rational(self.A_ignored),
            "period_uniform": self.period_uniform,
            "direct_schur_equal": self.direct_schur_equal,
            "balanced": self.balanced,
            "A_equal": self.A_equal,
            "passed": self.passed,
        }


def period_monotonicity(d):
    from .catalog import verify_patterson

    adj = effects_info(d, ADJUSTED)
    if not is_connected(d, adj):
        raise NotConnected("design is not connected")
    ign = effects_info(d, IGNORED)
    A_adj = functional_A(adj)
    A_ign = functional_A(ign)
    pr = d.profile
    uniform = len({pr.L[i, k] for i in range(d.v) for k in range(d.p)}) == 1
    s_equal = schur_effects(adj, "direct") == schur_effects(ign, "direct")
    balanced = verify_patterson(d).passed
    return MonotonicityReport(
        info_dominated=is_nnd(ign.assembled - adj.assembled),
        functional_ordered=A_adj >= A_ign,
        A_adjusted=A_adj,
        A_ignored=A_ign,
        period_uniform=uniform,
        direct_schur_equal=s_equal,
        balanced=balanced,
        A_equal=A_adj == A_ign,
    )
