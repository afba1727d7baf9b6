"""Windows, filtered homology, continuation maps, and spectral tracking.

A window is a pair of piecewise-linear cutoffs a(r) < b(r) whose graphs
stay clear of every arc of the family.  That clearance is what makes the
windowed theory exact: each arc is entirely below a, inside, or above b
for its whole lifetime, so restricting the count matrix to in-window
arcs is a chain-map-compatible truncation (flows only ever decrease the
action, so nothing leaks back in across the floor).

Class tracking pushes a representative through the comparison maps of
the event log and recomputes its spectral value on every slab between
action crossings; the spectral value of a class is the smallest top
action over all representatives in its coset.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .algebra import (_field_rank, homology, is_chain_homotopy, is_chain_map,
                      left_kernel_basis, ordered_echelon, reduce_against)
from .bifurcation import Birth, HandleSlide, _unipotent_inverse
from .errors import (DegenerateParameter, InvalidWindow, NonNestedLadder,
                     NotACycle, VerificationFailed)
from .matrix import SparseMatrix, vec_apply
from .piecewise import Piecewise, common_knots, crossings, frac
from .rings import Q, Z2

NEG_INF = float("-inf")


# ---------------------------------------------------------------------------
# windows

@dataclass(frozen=True)
class Window:
    a: Piecewise
    b: Piecewise

    @staticmethod
    def constant(a, b):
        return Window(Piecewise.constant(a), Piecewise.constant(b))

    def contains_value(self, r, v):
        return self.a.value(r) < v < self.b.value(r)


def wide_window(t, pad=1):
    """Constant window clearing every action value of the family by pad."""
    lo, hi = t.f3_range()
    pad = frac(pad)
    return Window.constant(lo - pad, hi + pad)


def window_violation(w, t):
    """Reason the window is unusable for t, or None if it is fine.

    The margin is one billionth of the family's action range; the
    cutoffs must clear every arc by at least that much, on the same side
    for the arc's whole lifetime.
    """
    if w.a.r_lo != 0 or w.a.r_hi != 1 or w.b.r_lo != 0 or w.b.r_hi != 1:
        return "cutoffs must be defined on all of [0, 1]"
    for k in common_knots(w.a, w.b, 0, 1):
        if not w.a.value(k) < w.b.value(k):
            return "floor meets ceiling at r=%s" % k
    lo, hi = t.f3_range()
    if lo is None:
        return None
    margin = (hi - lo) / 10**9
    for arc in t.arcs:
        for cutoff, name in ((w.a, "floor"), (w.b, "ceiling")):
            ks = common_knots(arc.f3, cutoff, arc.r_lo, arc.r_hi)
            diffs = [arc.f3.value(k) - cutoff.value(k) for k in ks]
            if margin > 0:
                clear = (all(d >= margin for d in diffs)
                         or all(d <= -margin for d in diffs))
            else:
                clear = all(d > 0 for d in diffs) or all(d < 0 for d in diffs)
            if not clear:
                return ("arc %r comes within the margin of the %s"
                        % (arc.id, name))
    return None


def validate_window(w, t):
    why = window_violation(w, t)
    if why is not None:
        raise InvalidWindow(why)


def _check_parameter(t, r, forbidden=()):
    r = frac(r)
    if r in set(t.vertex_params()) | {frac(x) for x in forbidden}:
        raise DegenerateParameter("r=%s is an event parameter" % r)
    return r


def _log_params(log):
    return tuple(s.record.r for s in log.steps)


def chain_group(t, r, w, forbidden=()):
    """Ids of arcs alive at r whose action lies strictly inside the window."""
    r = _check_parameter(t, r, forbidden)
    return [a.id for a in t.arcs_alive(r) if w.contains_value(r, a.value(r))]


def filtered_homology(t, fc, r, w):
    """Homology of the count matrix restricted to the window at r."""
    validate_window(w, t)
    gens = chain_group(t, r, w)
    d = fc.gamma.restrict(gens)
    if not d.mul(d).is_zero():
        raise InvalidWindow(
            "restriction to the window does not square to zero; the window "
            "boundaries must be crossing the diagram")
    return homology(d)


# ---------------------------------------------------------------------------
# comparison maps across events

@dataclass(frozen=True)
class ChainMapBundle:
    """Verified maps relating the complexes on either side of an event.

    forward transports representatives left-to-right in the parameter
    (rows: before-generators, cols: after-generators); backward is the
    section going the other way.  For a slide both are inverse
    isomorphisms and homotopy is None; for a birth or death the homotopy
    certifies that backward-then-forward is homotopic to the identity on
    the larger side.
    """

    kind: str
    forward: SparseMatrix
    backward: SparseMatrix
    homotopy: object = None


def continuation_map(ev, log):
    """Build and verify the comparison maps for one event of the log."""
    step = log.step_at(ev.r)
    gm, gp = step.before.gamma, step.after.gamma
    ring = gm.ring
    payload = ev.payload

    if isinstance(payload, HandleSlide):
        ids = gm.rows
        entries = {}
        for c1, c2, val in payload.delta:
            v = ring.coerce(val)
            if v != ring.zero:
                entries[(c1, c2)] = v
        delta = SparseMatrix(ring, ids, ids, entries)
        unip = SparseMatrix.identity(ring, ids).add(delta)
        forward = _unipotent_inverse(delta)
        if not is_chain_map(forward, gm, gp):
            raise VerificationFailed("slide transport is not a chain map")
        if not is_chain_map(unip, gp, gm):
            raise VerificationFailed("slide section is not a chain map")
        return ChainMapBundle("slide", forward, unip)

    v = log.family.vertex(payload.vertex)
    plus, minus = v.plus_arc, v.minus_arc
    if isinstance(payload, Birth):
        d_small, d_big = gm, gp      # before is the small side
    else:
        d_small, d_big = gp, gm
    small_ids = sorted(d_small.rows, key=str)
    big_ids = sorted(d_big.rows, key=str)
    e_inv = ring.invert(d_big.entry(plus, minus))

    # small -> big: send each generator past the pair, correcting along
    # its count against the lower branch
    incl = {(c, c): ring.one for c in small_ids}
    for c in small_ids:
        x = d_big.entry(c, minus)
        if x != ring.zero:
            incl[(c, plus)] = ring.neg(ring.mul(x, e_inv))
    incl = SparseMatrix(ring, small_ids, big_ids, incl)

    # big -> small: kill the pair; the lower branch maps to the upper
    # branch's residual flows (zero under the standing constraints)
    proj = {(c, c): ring.one for c in small_ids}
    for c in small_ids:
        x = d_big.entry(plus, c)
        if x != ring.zero:
            proj[(minus, c)] = ring.neg(ring.mul(e_inv, x))
    proj = SparseMatrix(ring, big_ids, small_ids, proj)

    homot = SparseMatrix(ring, big_ids, big_ids, {(minus, plus): e_inv})

    if not is_chain_map(incl, d_small, d_big):
        raise VerificationFailed("pair-crossing inclusion is not a chain map")
    if not is_chain_map(proj, d_big, d_small):
        raise VerificationFailed("pair-crossing projection is not a chain map")
    if incl.mul(proj) != SparseMatrix.identity(ring, small_ids):
        raise VerificationFailed("projection does not retract the inclusion")
    lhs = SparseMatrix.identity(ring, big_ids).sub(proj.mul(incl))
    if not is_chain_homotopy(d_big, homot, lhs):
        raise VerificationFailed("pair-crossing homotopy identity fails")

    if isinstance(payload, Birth):
        return ChainMapBundle("birth", incl, proj, homot)
    return ChainMapBundle("death", proj, incl, homot)


# ---------------------------------------------------------------------------
# spectral values

@dataclass(frozen=True)
class SpectralValue:
    value: object            # Fraction, or -inf for the zero class
    certified: bool          # exhaustive search vs greedy reduction
    support: tuple = ()
    top: object = None


def _descending_order(t, gens, r):
    return sorted(gens, key=lambda g: (-t.arc(g).value(r), str(g)))


def _coset_minimize(ring, d, rep, order):
    """Representative of rep + im(d) minimizing the leading position.

    order lists the generators from highest action down; minimizing the
    top action means pushing the first nonzero coordinate as far down
    the list as possible.  Exhaustive over the whole image subspace for
    mod-2 coefficients on small windows, greedy echelon reduction
    otherwise (greedy is provably tight here: echelon pivots sit in
    distinct positions, so clearing top-down is forced).
    """
    pos = {g: i for i, g in enumerate(order)}
    n = len(order)
    vec = [ring.zero] * n
    for g, v in rep.items():
        vec[pos[g]] = v
    img = []
    for g in order:
        row = [ring.zero] * n
        nonzero = False
        for c in order:
            x = d.entry(g, c)
            if x != ring.zero:
                row[pos[c]] = x
                nonzero = True
        if nonzero:
            img.append(row)

    def leading(u):
        for i, x in enumerate(u):
            if x != ring.zero:
                return i
        return n

    if ring is Z2 and n <= 20:
        basis = list(ordered_echelon(ring, img).values())
        best = vec
        best_lead = leading(vec)
        for picks in itertools.product((0, 1), repeat=len(basis)):
            cand = list(vec)
            for take, bv in zip(picks, basis):
                if take:
                    cand = [(x + y) % 2 for x, y in zip(cand, bv)]
            ld = leading(cand)
            if ld > best_lead:
                best, best_lead = cand, ld
        return best, order, True

    pivots = ordered_echelon(ring, img)
    reduced, _ = reduce_against(ring, vec, pivots)
    return reduced, order, False


def spectral_value(h, r, log, w, forbidden=()):
    """Least achievable top action of the class of h at parameter r.

    h is a representative chain over the arcs alive at r (entries below
    the window floor are quotiented away).  The zero class reports -inf.
    """
    t = log.family
    r = frac(r)
    gens = chain_group(t, r, w, tuple(forbidden) + _log_params(log))
    fc = log.counter_at(r)
    d = fc.gamma.restrict(gens)
    ring = d.ring
    rep = {}
    for g, v in h.items():
        v = ring.coerce(v)
        if v == ring.zero:
            continue
        if g in gens:
            rep[g] = v
        elif g in fc.gamma.rows:
            if t.arc(g).value(r) >= w.b.value(r):
                raise NotACycle(
                    "representative touches %r above the window ceiling" % g)
            # below the floor: quotiented away
        else:
            raise NotACycle("representative touches %r, not alive at r=%s" % (g, r))
    if vec_apply(ring, rep, d):
        raise NotACycle("representative is not a cycle in the window at r=%s" % r)
    if not rep:
        return SpectralValue(NEG_INF, True)
    order = _descending_order(t, gens, r)
    best, order, certified = _coset_minimize(ring, d, rep, order)
    support = tuple(g for g, x in zip(order, best) if x != ring.zero)
    if not support:
        return SpectralValue(NEG_INF, certified)
    top = support[0]
    return SpectralValue(t.arc(top).value(r), certified, support, top)


# ---------------------------------------------------------------------------
# ladders of nested windows

@dataclass(frozen=True)
class LadderLeg:
    proj_rank: int
    incl_rank: int
    proj_iso: bool
    incl_iso: bool


@dataclass(frozen=True)
class StabilizationReport:
    results: tuple           # HomologyResult per window
    legs: tuple              # LadderLeg between consecutive windows
    stabilized: object       # HomologyResult or None
    message: str

    def __str__(self):
        lines = ["step %d: %s" % (i, res) for i, res in enumerate(self.results)]
        lines.append(self.message)
        return "\n".join(lines)


def _pointwise_leq(f, g):
    """f(r) <= g(r) for all r, exactly (both piecewise-linear on [0,1])."""
    return all(f.value(k) <= g.value(k) for k in common_knots(f, g, 0, 1))


def _rationalize(m):
    if m.ring.is_field():
        return m
    return SparseMatrix(Q, m.rows, m.cols,
                        {k: Fraction(v) for k, v in m.entries.items()})


def _row_space_rank(ring, rows):
    if not rows:
        return 0
    return _field_rank(ring, [list(r) for r in rows])


def _induced_rank(d_from, d_to, fmat, order_from, order_to):
    """Rank of the map induced on homology by the chain map fmat.

    Everything is computed over the fraction field, so over the integers
    this is the rank on the free part.
    """
    d_from = _rationalize(d_from)
    d_to = _rationalize(d_to)
    fmat = _rationalize(fmat)
    ring = d_from.ring
    pushed = []
    for z in left_kernel_basis(d_from, order_from):
        out = [ring.zero] * len(order_to)
        for g, v in zip(order_from, z):
            if v == ring.zero:
                continue
            for j, c in enumerate(order_to):
                x = fmat.entry(g, c)
                if x != ring.zero:
                    out[j] = ring.add(out[j], ring.mul(v, x))
        pushed.append(out)
    bd = d_to.to_dense(order_to, order_to)
    b_rank = _row_space_rank(ring, [list(r) for r in bd])
    total = _row_space_rank(ring, [list(r) for r in bd] + pushed)
    return total - b_rank


def full_homology(t, log, r, ladder, forbidden=()):
    """Homology along a nested ladder of windows, with stabilization.

    The ladder must be nested: floors nonincreasing, ceilings
    nondecreasing.  Consecutive windows are compared through the
    intermediate window (new floor, old ceiling); its projection and
    inclusion legs induce the comparison on homology.  Stabilized means
    three consecutive results agree and the legs between them are
    isomorphisms on the free part (torsion compared for equality).
    """
    ladder = list(ladder)
    if not ladder:
        raise NonNestedLadder("empty ladder")
    for w in ladder:
        validate_window(w, t)
    for w1, w2 in zip(ladder, ladder[1:]):
        if not (_pointwise_leq(w2.a, w1.a) and _pointwise_leq(w1.b, w2.b)):
            raise NonNestedLadder(
                "ladder windows must nest: floors nonincreasing, ceilings "
                "nondecreasing")
    forbidden = tuple(forbidden) + _log_params(log)
    r = _check_parameter(t, r, forbidden)
    fc = log.counter_at(r)

    results = []
    gen_sets = []
    for w in ladder:
        gens = chain_group(t, r, w, forbidden)
        gen_sets.append(gens)
        results.append(homology(fc.gamma.restrict(gens)))

    legs = []
    for i in range(len(ladder) - 1):
        narrow, wide = ladder[i], ladder[i + 1]
        mid = Window(wide.a, narrow.b)
        gens_mid = chain_group(t, r, mid, forbidden)
        gens_narrow, gens_wide = gen_sets[i], gen_sets[i + 1]
        d_mid = fc.gamma.restrict(gens_mid)
        d_narrow = fc.gamma.restrict(gens_narrow)
        d_wide = fc.gamma.restrict(gens_wide)
        ring = d_mid.ring
        proj = SparseMatrix(ring, gens_mid, gens_narrow,
                            {(g, g): ring.one for g in gens_narrow})
        incl = SparseMatrix(ring, gens_mid, gens_wide,
                            {(g, g): ring.one for g in gens_mid})
        if not is_chain_map(proj, d_mid, d_narrow):
            raise VerificationFailed("ladder projection is not a chain map")
        if not is_chain_map(incl, d_mid, d_wide):
            raise VerificationFailed("ladder inclusion is not a chain map")
        h_mid = homology(d_mid)
        pr = _induced_rank(d_mid, d_narrow, proj, gens_mid, gens_narrow)
        ir = _induced_rank(d_mid, d_wide, incl, gens_mid, gens_wide)
        legs.append(LadderLeg(
            pr, ir,
            pr == h_mid.free_rank == results[i].free_rank
            and h_mid.torsion == results[i].torsion,
            ir == h_mid.free_rank == results[i + 1].free_rank
            and h_mid.torsion == results[i + 1].torsion))

    stabilized = None
    for i in range(len(results) - 2):
        trio = results[i:i + 3]
        if trio[0] == trio[1] == trio[2]:
            span = legs[i:i + 2]
            if all(l.proj_iso and l.incl_iso for l in span):
                stabilized = trio[0]
                break
    if stabilized is not None:
        message = "stabilized: %s" % stabilized
    else:
        message = "not stabilized at this ladder depth"
    return StabilizationReport(tuple(results), tuple(legs), stabilized, message)


# ---------------------------------------------------------------------------
# tracking a class along the family

@dataclass(frozen=True)
class TraceSegment:
    interval_index: int
    r_lo: Fraction
    r_hi: Fraction
    support: tuple
    top: object
    rho_lo: object
    rho_hi: object
    certified: bool


@dataclass(frozen=True)
class TrackedClass:
    """One interval's worth of the tracked class."""

    interval_index: int
    token: str
    representative: tuple    # ((generator, value), ...) sorted by generator
    rho_start: object
    rho_end: object


@dataclass(frozen=True)
class SpectralTrace:
    segments: tuple
    transfers: tuple         # (r, generator before, generator after)
    outcome: str
    classes: tuple           # TrackedClass per interval reached

    @property
    def survived(self):
        return self.outcome == "Survived"

    def final_value(self):
        return self.segments[-1].rho_hi if self.segments else NEG_INF

    def table(self):
        """Tabular text form: one line per slab plus transfer markers."""
        lines = ["r_lo\tr_hi\trho_lo\trho_hi\ttop\tsupport"]
        marks = {r: (a, b) for r, a, b in self.transfers}
        for s in self.segments:
            if s.r_lo in marks:
                a, b = marks[s.r_lo]
                lines.append("# transfer at r=%s: %s -> %s" % (s.r_lo, a, b))
            lines.append("%s\t%s\t%s\t%s\t%s\t%s" % (
                s.r_lo, s.r_hi, s.rho_lo, s.rho_hi,
                s.top if s.top is not None else "-",
                "+".join(str(g) for g in s.support) or "-"))
        lines.append("# outcome: %s" % self.outcome)
        return "\n".join(lines)


def _window_gens_on_interval(t, w, fc):
    mid = fc.midpoint()
    return [a.id for a in t.arcs_alive(mid) if w.contains_value(mid, a.value(mid))]


def track_class(h0, log, w, label="h"):
    """Follow the class of h0 from r=0 through every event of the log.

    The trace records, slab by slab between action crossings, the
    minimizing representative's support and its top generator; a
    transfer is a parameter where that top generator changes.  The
    spectral value is verified continuous across handle-slides.
    """
    t = log.family
    why = window_violation(w, t)
    if why is not None:
        return SpectralTrace((), (), "WindowInvalid: %s" % why, ())

    ring = log.ring
    rep = {}
    first = log.intervals[0]
    gens0 = _window_gens_on_interval(t, w, first)
    mid0 = first.midpoint()
    for g, v in h0.items():
        v = ring.coerce(v)
        if v == ring.zero:
            continue
        if g in gens0:
            rep[g] = v
            continue
        if g not in first.gamma.rows:
            raise NotACycle("starting chain touches %r, not alive at the start" % g)
        if t.arc(g).value(mid0) >= w.b.value(mid0):
            raise NotACycle("starting chain touches %r above the window" % g)
    d0 = first.gamma.restrict(gens0)
    if vec_apply(ring, rep, d0):
        raise NotACycle("starting chain is not a cycle inside the window")

    segments = []
    transfers = []
    classes = []
    prev_top = None
    outcome = "Survived"

    for fc in log.intervals:
        gens = _window_gens_on_interval(t, w, fc)
        d = fc.gamma.restrict(gens)
        rep_record = tuple(sorted(rep.items(), key=lambda kv: str(kv[0])))
        if not rep:
            classes.append(TrackedClass(fc.interval_index, label, rep_record,
                                        NEG_INF, NEG_INF))
            outcome = "LeftWindow(below)"
            break

        cuts = set()
        for g1, g2 in itertools.combinations(gens, 2):
            for x in crossings(t.arc(g1).f3, t.arc(g2).f3, fc.r_lo, fc.r_hi):
                if fc.r_lo < x < fc.r_hi:
                    cuts.add(x)
        bounds = [fc.r_lo] + sorted(cuts) + [fc.r_hi]
        first_seg = len(segments)
        for lo, hi in zip(bounds, bounds[1:]):
            mid = (lo + hi) / 2
            order = _descending_order(t, gens, mid)
            best, order, certified = _coset_minimize(ring, d, rep, order)
            support = tuple(g for g, x in zip(order, best) if x != ring.zero)
            if not support:
                segments.append(TraceSegment(fc.interval_index, lo, hi, (),
                                             None, NEG_INF, NEG_INF, certified))
                prev_top = None
                continue
            top = support[0]
            f3 = t.arc(top).f3
            seg = TraceSegment(fc.interval_index, lo, hi, support, top,
                               f3.value(lo), f3.value(hi), certified)
            if prev_top is not None and prev_top != top:
                transfers.append((lo, prev_top, top))
            segments.append(seg)
            prev_top = top
        classes.append(TrackedClass(
            fc.interval_index, label, rep_record,
            segments[first_seg].rho_lo, segments[-1].rho_hi))

        step = next((s for s in log.steps if s.before is fc), None)
        if step is None:
            continue
        bundle = continuation_map(step.record, log)
        rep = vec_apply(ring, rep, bundle.forward)
        nxt = log.intervals[fc.interval_index + 1]
        gens_next = set(_window_gens_on_interval(t, w, nxt))
        midn = nxt.midpoint()
        clipped = {}
        for g, v in rep.items():
            if g in gens_next:
                clipped[g] = v
            elif t.arc(g).value(midn) >= w.b.value(midn):
                outcome = "LeftWindow(above)"
                break
        else:
            rep = clipped
            continue
        break

    if outcome == "Survived" and not rep:
        outcome = "LeftWindow(below)"

    # continuity across slides: the first slab after a slide starts at
    # the same value the last slab before it ended on
    for st in log.steps:
        if not isinstance(st.record.payload, HandleSlide):
            continue
        r_ev = st.record.r
        left = [s for s in segments if s.r_hi == r_ev and s.top is not None]
        right = [s for s in segments if s.r_lo == r_ev and s.top is not None]
        if left and right:
            if left[-1].rho_hi != right[0].rho_lo:
                raise VerificationFailed(
                    "spectral value jumped across the slide at r=%s" % r_ev)

    return SpectralTrace(tuple(segments), tuple(transfers), outcome,
                         tuple(classes))
