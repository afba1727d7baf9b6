"""Growth hypotheses, the escape budget, and the cascade generator.

A growth bound is a function Phi(s) = c * |s|^p * prod_j (log^(j)|s|)^q_j
together with an exclusion interval (a, b) around the origin on which
nothing is required of it.  Away from the exclusion interval every
member of this family is positive, continuous, and unimodal in |s| (the
logarithmic derivative is (p + positive decreasing)/s), which is what
makes the slope check below exact with endpoint sampling only.

Whether the improper integrals of 1/Phi diverge is decided symbolically
from (p, q_1, q_2, ...), never numerically: no finite sampling can
certify divergence.
"""

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .bifurcation import EventRecord, FlowCounter, HandleSlide
from .cerf import (Arc, BoundaryAt0, BoundaryAt1, CerfTuple, Component,
                   Finding)
from .errors import (InvalidParameters, NonMonotoneTail, UnsupportedFamily)
from .matrix import SparseMatrix
from .piecewise import Piecewise, frac
from .rings import Z2

NEG_INF = float("-inf")
INF = float("inf")

# smallest integer safely above the point where the innermost log factor
# turns positive: 1, e, e^e, e^(e^e)
_LOG_THRESHOLD = {0: 0, 1: 2, 2: 3, 3: 16, 4: 3814280}


@dataclass(frozen=True)
class GrowthBound:
    coefficient: Fraction
    power: Fraction
    log_powers: tuple        # exponents q_j of the iterated log factors
    gap: tuple               # exclusion interval (a, b), a <= 0 <= b
    label: str = "polylog"

    def __post_init__(self):
        object.__setattr__(self, "coefficient", frac(self.coefficient))
        object.__setattr__(self, "power", frac(self.power))
        object.__setattr__(self, "log_powers",
                           tuple(frac(q) for q in self.log_powers))
        if self.coefficient <= 0:
            raise InvalidParameters("coefficient must be positive")
        if any(q < 0 for q in self.log_powers):
            raise InvalidParameters("log exponents must be nonnegative")
        depth = len(self.log_powers)
        if depth > 4:
            raise InvalidParameters("at most four iterated log factors")
        a, b = self.gap
        a, b = frac(a), frac(b)
        object.__setattr__(self, "gap", (a, b))
        if not a <= 0 <= b:
            raise InvalidParameters("exclusion interval must contain 0")
        thr = _LOG_THRESHOLD[depth]
        if depth and (b < thr or -a < thr):
            raise InvalidParameters(
                "with %d log factors the exclusion interval must reach +-%d"
                % (depth, thr))

    def value(self, s):
        """Phi(s); exact Fraction when no transcendental factor enters."""
        u = abs(frac(s))
        if not self.log_powers:
            if u == 0:
                if self.power > 0:
                    return Fraction(0)
                return self.coefficient if self.power == 0 else INF
            if self.power.denominator == 1:
                return self.coefficient * u ** int(self.power)
            return float(self.coefficient) * float(u) ** float(self.power)
        x = float(u)
        out = float(self.coefficient) * x ** float(self.power)
        y = x
        for q in self.log_powers:
            y = math.log(y)
            out *= y ** float(q)
        return out

    def diverges_at_infinity(self):
        """Exact divergence test for the improper integral of 1/Phi.

        The integral from any point past the exclusion interval to
        infinity diverges iff p < 1, or p = 1 and the first log exponent
        different from 1 is < 1 (all exponents equal to 1 diverges).
        """
        if self.power < 1:
            return True
        if self.power > 1:
            return False
        for q in self.log_powers:
            if q != 1:
                return q < 1
        return True

    @property
    def has_closed_form(self):
        if not self.log_powers:
            return True
        return self.power == 1 and all(q == 1 for q in self.log_powers)

    def _antiderivative(self, s):
        """G(s) with G' = 1/Phi, for s above the positivity threshold."""
        c = self.coefficient
        if not self.log_powers:
            if self.power == 1:
                return math.log(float(s)) / float(c)
            e = 1 - self.power
            if e.denominator == 1:
                return frac(s) ** int(e) / (c * e)
            return float(s) ** float(e) / (float(c) * float(e))
        if self.has_closed_form:
            x = math.log(float(s))
            for _ in range(len(self.log_powers)):
                x = math.log(x)
            return x / float(c)
        raise UnsupportedFamily(
            "no closed-form antiderivative registered for %r" % (self,))

    def cost(self, lo, hi):
        """Parameter cost of climbing from lo to hi: INT ds/Phi.

        Exact (rational) whenever the antiderivative stays rational.  A
        left endpoint where 1/Phi is non-integrable (height 0 under a
        superlinear bound) costs INF.
        """
        if lo > hi:
            raise InvalidParameters("cost requires lo <= hi")
        if lo == hi:
            return Fraction(0)
        try:
            g_lo = self._antiderivative(lo)
        except (ZeroDivisionError, ValueError):
            return INF
        return self._antiderivative(hi) - g_lo

    def tail_integral(self, m):
        """INT_m^infinity ds/Phi in closed form; INF when divergent.

        By evenness of Phi this is also the integral from -infinity to
        -m.  m at or below the positivity threshold gives INF (the
        integrand is eventually bounded below on a set of infinite
        measure, or blows up at the threshold).
        """
        m = frac(m)
        if self.diverges_at_infinity():
            return INF
        if not self.log_powers:
            # p > 1 here; the integral also diverges at 0
            if m <= 0:
                return INF
            e = self.power - 1
            if e.denominator == 1:
                return 1 / (self.coefficient * e * m ** int(e))
            return 1.0 / (float(self.coefficient) * float(e)
                          * float(m) ** float(e))
        raise UnsupportedFamily(
            "no closed-form tail registered for %r" % (self,))


def linear(c, gap=(-1, 1)):
    return GrowthBound(c, 1, (), gap, "linear")


def square(c, gap=(0, 0)):
    return GrowthBound(c, 2, (), gap, "square")


def iterlog(c, depth, gap=None):
    if depth < 1:
        raise InvalidParameters("iterlog needs depth >= 1")
    if gap is None:
        thr = _LOG_THRESHOLD.get(depth)
        if thr is None:
            raise InvalidParameters("at most four iterated log factors")
        gap = (-thr, thr)
    return GrowthBound(c, 1, (1,) * depth, gap, "iterlog")


def polylog(c, p, logs=(), gap=None):
    if gap is None:
        thr = max(_LOG_THRESHOLD[len(tuple(logs))], 1 if p != 0 else 0)
        gap = (-thr, thr)
    return GrowthBound(c, p, tuple(logs), gap, "polylog")


_PHI_RE = re.compile(r"^\s*(linear|square|iterlog|polylog)\s*\((.*)\)\s*$")


def parse_phi(text):
    """Textual growth-bound syntax used by scenario files.

    Examples: linear(c=2), square(c=1/2), iterlog(c=1, depth=2),
    polylog(c=1, p=-1, gap=(-1, 1)).  Numbers are exact rationals.
    """
    m = _PHI_RE.match(text)
    if not m:
        raise InvalidParameters("unrecognized growth bound %r" % text)
    name, body = m.group(1), m.group(2)
    kwargs = {}
    for part in re.findall(r"(\w+)\s*=\s*(\([^)]*\)|[^,()]+)", body):
        key, val = part
        val = val.strip()
        if val.startswith("("):
            items = [v.strip() for v in val[1:-1].split(",") if v.strip()]
            kwargs[key] = tuple(Fraction(v) for v in items)
        else:
            try:
                kwargs[key] = Fraction(val)
            except ValueError:
                raise InvalidParameters("bad number %r in growth bound" % val)
    try:
        if name == "linear":
            return linear(kwargs.pop("c"), **kwargs)
        if name == "square":
            return square(kwargs.pop("c"), **kwargs)
        if name == "iterlog":
            return iterlog(kwargs.pop("c"), int(kwargs.pop("depth")), **kwargs)
        return polylog(kwargs.pop("c"), kwargs.pop("p"),
                       kwargs.pop("logs", ()), **kwargs)
    except KeyError as e:
        raise InvalidParameters("growth bound %s missing argument %s"
                                % (name, e))
    except TypeError as e:
        raise InvalidParameters("growth bound %s: %s" % (name, e))


# ---------------------------------------------------------------------------
# hypothesis (H1): slope bound plus two-sided divergence

@dataclass(frozen=True)
class H1Report:
    ok: bool
    slope_ok: bool
    divergence_ok: bool
    findings: tuple


def _piece_check_points(phi, smin, smax):
    """F3 values where the slope bound must be tested on one piece.

    Phi is unimodal in |s| outside the exclusion interval, so its
    minimum over each non-exempt closed subrange sits at a subrange
    endpoint.
    """
    a, b = phi.gap
    out = []
    if smin <= a:
        out += [smin, min(smax, a)]
    if smax >= b:
        out += [max(smin, b), smax]
    return out


def check_H1(phi, t):
    """Slope of every arc piece bounded by Phi of the action, exactly.

    Also certifies, symbolically, that the escape integrals on both
    sides of the exclusion interval diverge; the report is total and
    lists every violation.
    """
    findings = []
    slope_ok = True
    for arc in t.arcs:
        pts = arc.f3.points
        for k, ((r0, v0), (r1, v1)) in enumerate(zip(pts, pts[1:])):
            slope = abs((v1 - v0) / (r1 - r0))
            if slope == 0:
                continue
            smin, smax = min(v0, v1), max(v0, v1)
            for s in _piece_check_points(phi, smin, smax):
                bound = phi.value(s)
                if isinstance(bound, Fraction):
                    bad = slope > bound
                else:
                    bad = float(slope) > bound
                if bad:
                    slope_ok = False
                    findings.append(Finding(
                        "slope-bound", "error",
                        "arc %r piece %d: |slope| = %s exceeds the growth "
                        "bound %s at action %s" % (arc.id, k, slope, bound, s)))
                    break
    divergence_ok = phi.diverges_at_infinity()
    if not divergence_ok:
        # Phi is even, so both sides fail together
        findings.append(Finding(
            "divergence-upper", "error",
            "the escape integral above the exclusion interval converges"))
        findings.append(Finding(
            "divergence-lower", "error",
            "the escape integral below the exclusion interval converges"))
    if slope_ok and divergence_ok:
        findings.append(Finding("summary", "info",
                                "slope bound and both divergences hold"))
    return H1Report(slope_ok and divergence_ok, slope_ok, divergence_ok,
                    tuple(findings))


# ---------------------------------------------------------------------------
# hypothesis (H2): tail integrals past the class's starting value

@dataclass(frozen=True)
class H2Report:
    ok: bool
    upper_threshold: Fraction      # M = max(b, rho0)
    lower_threshold: Fraction      # m = min(a, rho0)
    upper_integral: object
    lower_integral: object
    required: Fraction             # 1 + kappa
    margin: object


def check_H2(phi, kappa, rho0):
    """Both tail integrals of 1/Phi must reach 1 + kappa.

    The upper tail starts at M = max(b, rho0), the lower tail ends at
    m = min(a, rho0); closed-form evaluation, so the boundary case is
    exact.
    """
    kappa = frac(kappa)
    if kappa <= 0:
        raise InvalidParameters("kappa must be positive")
    rho0 = frac(rho0)
    a, b = phi.gap
    big = max(b, rho0)
    small = min(a, rho0)
    upper = phi.tail_integral(big)
    lower = phi.tail_integral(abs(small))
    required = 1 + kappa
    ok = upper >= required and lower >= required
    worst = min(upper, lower)
    margin = INF if worst == INF else worst - required
    return H2Report(ok, big, small, upper, lower, required, margin)


# ---------------------------------------------------------------------------
# escape budget: the telescoping integral lower bound

@dataclass(frozen=True)
class EscapeBudget:
    heights: tuple
    step_costs: tuple
    total: object
    verdict: str                  # InfeasibleWithinUnitTime | WithinBudget
    escape_cost_infinite: bool

    def __str__(self):
        return "cost %s over %d steps: %s" % (
            self.total, len(self.step_costs), self.verdict)


def budget_for_heights(heights, phi):
    """Cumulative cost of a monotone height climb, clipped below at b.

    Telescoping makes the total exactly the single integral from the
    first clipped height to the last, so the result is invariant under
    refinement of the partition.
    """
    b = phi.gap[1]
    clipped = []
    for s in heights:
        if s == NEG_INF:
            clipped.append(b)
        else:
            clipped.append(max(frac(s), b))
    for x, y in zip(clipped, clipped[1:]):
        if y < x:
            raise NonMonotoneTail(
                "heights decrease from %s to %s beyond the exclusion "
                "interval" % (x, y))
    costs = tuple(phi.cost(x, y) for x, y in zip(clipped, clipped[1:]))
    total = Fraction(0)
    for c in costs:
        total = total + c
    verdict = "InfeasibleWithinUnitTime" if total > 1 else "WithinBudget"
    return EscapeBudget(tuple(clipped), costs, total, verdict,
                        phi.diverges_at_infinity())


def escape_budget(trace, phi, direction=1):
    """Parameter cost lower bound for the height climb a trace realizes.

    direction -1 reflects the heights to bound a dive toward -infinity
    (the mirrored computation of the negative direction).
    """
    heights = []
    for seg in trace.segments:
        for v in (seg.rho_lo, seg.rho_hi):
            if v == NEG_INF:
                heights.append(NEG_INF)
            else:
                heights.append(frac(v) if direction > 0 else -frac(v))
    return budget_for_heights(heights, phi)


# ---------------------------------------------------------------------------
# the cascade scenario

def build_cascade(n, base=1, ratio=2, delta_value=1, ring=Z2):
    """Scenario whose tracked class climbs past every bound by transfers.

    n + 1 constant-then-rising lanes: lane k+1 handle-slides into the
    tracked class while still low, then rises past the class's current
    top, transferring the spectral value onto itself at height
    base*ratio^k.  The count matrix is identically zero, so every slide
    is an isomorphism of complexes and the homology never changes; only
    the spectral value moves.  Events sit on a uniform sixths grid so
    all parameters are exact and pairwise distinct.
    """
    if n < 0:
        raise InvalidParameters("n must be nonnegative")
    base = frac(base)
    ratio = frac(ratio)
    if base <= 0:
        raise InvalidParameters("base height must be positive")
    if ratio <= 1:
        raise InvalidParameters("height ratio must exceed 1")
    if ring.coerce(delta_value) == ring.zero:
        raise InvalidParameters("slide coefficient must be a nonzero scalar")

    heights = [base * ratio ** k for k in range(n + 1)]
    ids = ["c%d" % (k + 1) for k in range(n + 1)]
    arcs = [Arc(ids[0], Piecewise.constant(heights[0]),
                BoundaryAt0(), BoundaryAt1())]
    events = []
    for k in range(1, n + 1):
        level = base * Fraction(k, 2 * n + 2)
        slide_r = Fraction(6 * (k - 1) + 2, 6 * n)
        rise_lo = Fraction(6 * (k - 1) + 3, 6 * n)
        rise_hi = Fraction(6 * (k - 1) + 5, 6 * n)
        pts = [(Fraction(0), level), (rise_lo, level),
               (rise_hi, heights[k])]
        if rise_hi < 1:
            pts.append((Fraction(1), heights[k]))
        arcs.append(Arc(ids[k], Piecewise(tuple(pts)),
                        BoundaryAt0(), BoundaryAt1()))
        events.append(EventRecord(
            slide_r, HandleSlide(((ids[k - 1], ids[k], delta_value),))))

    t = CerfTuple(tuple(arcs),
                  tuple(Component("chord", (i,)) for i in ids))
    gamma0 = FlowCounter(0, Fraction(0), events[0].r if events else Fraction(1),
                         SparseMatrix(ring, ids, ids, {}))
    return t, gamma0, tuple(events)
