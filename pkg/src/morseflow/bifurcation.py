"""Event engine: how the flow-line count matrix changes along the family.

Between events the matrix is constant.  Three kinds of event transform it:

* handle-slide: conjugation by a unipotent matrix I + D built from the
  declared jump entries; D is strictly triangular in the action order, so
  the inverse is the finite alternating power series.
* birth: the generator set grows by the vertex's two branches; the new
  column against the lower branch is event data, constrained so that the
  square of the new matrix is still zero.
* death: the generator set shrinks by the vertex's two branches after a
  Gaussian cancellation against the unit pivot joining them.

Every update re-verifies its defining identity entrywise before the
result is accepted; the validator repeats those checks in report form.
"""

from dataclasses import dataclass
from fractions import Fraction

from .cerf import Finding
from .errors import (ActionConstraintViolated, ConstraintViolated,
                     CycleConditionViolated, EvolutionError,
                     NonTriangularDelta, NonUnitPivot)
from .matrix import SparseMatrix
from .piecewise import common_knots, frac


# ---------------------------------------------------------------------------
# event payloads

@dataclass(frozen=True)
class HandleSlide:
    delta: tuple                 # ((upper arc, lower arc, value), ...)

    def __post_init__(self):
        object.__setattr__(self, "delta", tuple(tuple(d) for d in self.delta))


@dataclass(frozen=True)
class Birth:
    vertex: str
    pivot: object                # unit of the coefficient ring
    new_column: tuple = ()       # ((old arc, value), ...): column of the lower branch

    def __post_init__(self):
        object.__setattr__(self, "new_column",
                           tuple(tuple(e) for e in self.new_column))


@dataclass(frozen=True)
class Death:
    vertex: str


@dataclass(frozen=True)
class EventRecord:
    r: Fraction
    payload: object

    def __post_init__(self):
        object.__setattr__(self, "r", frac(self.r))

    @property
    def kind(self):
        return type(self.payload).__name__.lower()


@dataclass(frozen=True)
class FlowCounter:
    """Constant count matrix on one open interval between events."""

    interval_index: int
    r_lo: Fraction
    r_hi: Fraction
    gamma: SparseMatrix

    def __post_init__(self):
        object.__setattr__(self, "r_lo", frac(self.r_lo))
        object.__setattr__(self, "r_hi", frac(self.r_hi))

    @property
    def generators(self):
        return sorted(self.gamma.rows, key=str)

    def midpoint(self):
        return (self.r_lo + self.r_hi) / 2


@dataclass(frozen=True)
class EventStep:
    record: EventRecord
    before: FlowCounter          # left approximation at the event parameter
    after: FlowCounter           # right approximation


@dataclass(frozen=True)
class EvolutionLog:
    family: object               # the CerfTuple the log was computed over
    intervals: tuple
    steps: tuple

    @property
    def ring(self):
        return self.intervals[0].gamma.ring

    def counter_at(self, r):
        """FlowCounter of the interval containing r; r must avoid events."""
        r = frac(r)
        for fc in self.intervals:
            if fc.r_lo < r < fc.r_hi or (fc.r_lo == 0 == r) or (fc.r_hi == 1 == r):
                return fc
        raise EvolutionError("r=%s lies on an event parameter" % r)

    def step_at(self, r):
        r = frac(r)
        for st in self.steps:
            if st.record.r == r:
                return st
        raise EvolutionError("no event at r=%s" % r)


# ---------------------------------------------------------------------------
# single-event updates

def _unipotent_inverse(delta):
    """(I + D)^-1 as the alternating series; D must be nilpotent."""
    ring = delta.ring
    ids = delta.rows
    ident = SparseMatrix.identity(ring, ids)
    inv = ident
    term = ident
    minus_delta = delta.neg()
    for _ in range(len(ids)):
        term = term.mul(minus_delta)
        if term.is_zero():
            return inv
        inv = inv.add(term)
    raise NonTriangularDelta(
        "jump matrix is not nilpotent; its entries cannot all point down "
        "the action order")


def apply_handle_slide(gamma_minus, ev, t=None):
    """Conjugate the count matrix by I + D at a handle-slide.

    The closed form (I+D) G (I+D)^-1 is the unique solution of the
    implicit two-sided update; it is re-verified entrywise below.  When
    the family t is supplied, each jump entry is checked against the
    action order at the event parameter.
    """
    payload = ev.payload
    gm = gamma_minus.gamma
    ring = gm.ring
    ids = gm.rows
    entries = {}
    for c1, c2, val in payload.delta:
        if c1 not in ids or c2 not in ids:
            raise EvolutionError(
                "jump entry (%s, %s) references an arc not alive at r=%s" %
                (c1, c2, ev.r))
        if c1 == c2:
            raise NonTriangularDelta("jump entry on the diagonal: (%s, %s)" % (c1, c2))
        v = ring.coerce(val)
        if v != ring.zero:
            entries[(c1, c2)] = v
    if t is not None:
        for (c1, c2) in entries:
            f1 = t.arc(c1).value(ev.r)
            f2 = t.arc(c2).value(ev.r)
            if not f1 > f2:
                raise NonTriangularDelta(
                    "jump entry (%s, %s) violates the action order at r=%s: "
                    "%s <= %s" % (c1, c2, ev.r, f1, f2))
    delta = SparseMatrix(ring, ids, ids, entries)
    one_plus = SparseMatrix.identity(ring, ids).add(delta)
    gp = one_plus.mul(gm).mul(_unipotent_inverse(delta))
    # entrywise identity: G+ = G- + D G- - G+ D
    if gp != gm.add(delta.mul(gm)).sub(gp.mul(delta)):
        raise EvolutionError("handle-slide update failed its defining identity")
    return gp


def _gt_just_after(f, g, r):
    """Exact sign of f - g on an immediate right-neighborhood of r.

    Both profiles are linear between knots, so the value at r decides,
    with a tie broken at the first knot after r: a tie there too means
    the difference vanishes on a right-neighborhood.
    """
    fv, gv = f.value(r), g.value(r)
    if fv != gv:
        return fv > gv
    nxt = [k for k in f.knots() + g.knots() if k > r]
    if not nxt:
        return False
    k = min(nxt)
    return f.value(k) > g.value(k)


def apply_birth(gamma_minus, ev, t):
    """Extend the count matrix across a birth vertex.

    The old block is unchanged; the new column against the lower branch
    is the event's data, subject to the cycle condition (the old matrix
    kills it) and the action order just after the vertex; the pivot
    joining the branches must be a unit.
    """
    payload = ev.payload
    gm = gamma_minus.gamma
    ring = gm.ring
    v = t.vertex(payload.vertex)
    if v.kind != "birth":
        raise EvolutionError("vertex %r is a %s, not a birth" % (v.id, v.kind))
    plus, minus = v.plus_arc, v.minus_arc
    old = sorted(gm.rows, key=str)
    if plus in gm.rows or minus in gm.rows:
        raise EvolutionError("branches of %r already alive before r=%s" % (v.id, ev.r))

    pivot = ring.coerce(payload.pivot)
    if not ring.is_unit(pivot):
        raise NonUnitPivot("birth pivot %r is not a unit" % (payload.pivot,))

    w = {}
    for aid, val in payload.new_column:
        if aid not in gm.rows:
            raise EvolutionError(
                "new column references %r, not alive before r=%s" % (aid, ev.r))
        x = ring.coerce(val)
        if x != ring.zero:
            w[aid] = x

    # cycle condition: the old matrix applied to the column vanishes
    for c in old:
        total = ring.zero
        for cp, x in w.items():
            total = ring.add(total, ring.mul(gm.entry(c, cp), x))
        if total != ring.zero:
            raise CycleConditionViolated(
                "old matrix does not kill the new column: row %r gives %r" %
                (c, total))

    # action order just after the vertex
    f_minus = t.arc(minus).f3
    for aid in sorted(w, key=str):
        if not _gt_just_after(t.arc(aid).f3, f_minus, ev.r):
            raise ActionConstraintViolated(
                "new column entry at %r sits at or below the lower branch "
                "just after r=%s" % (aid, ev.r))

    ids = old + [plus, minus]
    entries = dict(gm.entries)
    for aid, x in w.items():
        entries[(aid, minus)] = x
    entries[(plus, minus)] = pivot
    gp = SparseMatrix(ring, ids, ids, entries)
    if not gp.mul(gp).is_zero():
        raise EvolutionError("birth update broke the square-zero identity")
    return gp


def apply_death(gamma_minus, ev, t):
    """Cancel a dying pair of branches out of the count matrix.

    Requires the pivot joining the branches to be a unit and the other
    entries touching the pair to vanish; survivors keep their entries up
    to the Gaussian correction term (zero under those constraints, but
    computed anyway: it subsumes the constrained case).
    """
    payload = ev.payload
    gm = gamma_minus.gamma
    ring = gm.ring
    v = t.vertex(payload.vertex)
    if v.kind != "death":
        raise EvolutionError("vertex %r is a %s, not a death" % (v.id, v.kind))
    plus, minus = v.plus_arc, v.minus_arc
    if plus not in gm.rows or minus not in gm.rows:
        raise EvolutionError("branches of %r not alive before r=%s" % (v.id, ev.r))

    pivot = gm.entry(plus, minus)
    if not ring.is_unit(pivot):
        raise NonUnitPivot(
            "count between the dying branches of %r is %r, not a unit" %
            (v.id, pivot))
    for c in gm.rows:
        if gm.entry(c, plus) != ring.zero:
            raise ConstraintViolated(
                "upper branch of %r still receives from %r" % (v.id, c))
        if c != plus and gm.entry(minus, c) != ring.zero:
            raise ConstraintViolated(
                "lower branch of %r still flows to %r" % (v.id, c))
        if c not in (minus,) and gm.entry(plus, c) != ring.zero:
            raise ConstraintViolated(
                "upper branch of %r flows to %r besides its partner" % (v.id, c))

    inv = ring.invert(pivot)
    survivors = sorted((c for c in gm.rows if c not in (plus, minus)), key=str)
    entries = {}
    for c1 in survivors:
        for c2 in survivors:
            val = ring.sub(gm.entry(c1, c2),
                           ring.mul(gm.entry(c1, minus),
                                    ring.mul(inv, gm.entry(plus, c2))))
            if val != ring.zero:
                entries[(c1, c2)] = val
    gp = SparseMatrix(ring, survivors, survivors, entries)
    if not gp.mul(gp).is_zero():
        raise EvolutionError("death update broke the square-zero identity")
    return gp


# ---------------------------------------------------------------------------
# interval-level axiom checks

def _triangularity_violations(gamma, t, r_lo, r_hi):
    """Entries whose action gap fails to stay positive on the open interval.

    Piecewise-linear profiles make this exact: positivity on the open
    interval means nonnegative gaps at every knot, strict at interior
    knots, and not identically zero.
    """
    bad = []
    for (c1, c2), _ in gamma.items():
        f = t.arc(c1).f3
        g = t.arc(c2).f3
        knots = common_knots(f, g, r_lo, r_hi)
        diffs = [f.value(k) - g.value(k) for k in knots]
        ok = (all(d >= 0 for d in diffs)
              and all(d > 0 for d in diffs[1:-1])
              and any(d > 0 for d in diffs))
        if not ok:
            bad.append((c1, c2))
    return bad


def _check_interval(fc, t):
    """Raises EvolutionError if the counter violates the standing axioms."""
    bad = _triangularity_violations(fc.gamma, t, fc.r_lo, fc.r_hi)
    if bad:
        raise EvolutionError(
            "count entries %s violate the action order on interval (%s, %s)" %
            (bad, fc.r_lo, fc.r_hi))
    if not fc.gamma.mul(fc.gamma).is_zero():
        raise EvolutionError(
            "count matrix fails square-zero on interval (%s, %s)" %
            (fc.r_lo, fc.r_hi))


def _alive_ids(t, r):
    return {a.id for a in t.arcs_alive(r)}


def evolve(gamma0, events, t, enforce_axioms=True):
    """Push the initial counter through every event in parameter order.

    gamma0 is the counter on the first interval.  Every vertex of the
    family must be matched by exactly one birth or death record; event
    parameters must be pairwise distinct and interior to (0, 1).
    """
    evs = sorted(events, key=lambda e: e.r)
    params = [e.r for e in evs]
    if len(set(params)) != len(params):
        raise EvolutionError("event parameters must be pairwise distinct")
    if params and (params[0] <= 0 or params[-1] >= 1):
        raise EvolutionError("event parameters must lie strictly inside (0, 1)")

    by_vertex = {}
    for e in evs:
        if isinstance(e.payload, (Birth, Death)):
            if e.payload.vertex in by_vertex:
                raise EvolutionError(
                    "vertex %r has two event records" % e.payload.vertex)
            by_vertex[e.payload.vertex] = e
    for v in t.vertices:
        e = by_vertex.pop(v.id, None)
        if e is None:
            raise EvolutionError("vertex %r has no event record" % v.id)
        want = Birth if v.kind == "birth" else Death
        if not isinstance(e.payload, want):
            raise EvolutionError(
                "vertex %r is a %s but its event record is a %s" %
                (v.id, v.kind, e.kind))
        if e.r != v.r:
            raise EvolutionError(
                "vertex %r sits at r=%s but its event record says r=%s" %
                (v.id, v.r, e.r))
    if by_vertex:
        raise EvolutionError(
            "event records reference unknown vertices: %s" % sorted(by_vertex))

    boundaries = [Fraction(0)] + params + [Fraction(1)]
    current = FlowCounter(0, boundaries[0], boundaries[1], gamma0.gamma)
    intervals = [current]
    steps = []
    for k, ev in enumerate(evs):
        alive = _alive_ids(t, current.midpoint())
        if set(current.gamma.rows) != alive:
            raise EvolutionError(
                "counter on interval %d indexes %s but the alive arcs are %s" %
                (k, sorted(current.gamma.rows, key=str), sorted(alive)))
        if isinstance(ev.payload, HandleSlide):
            gp = apply_handle_slide(current, ev, t)
        elif isinstance(ev.payload, Birth):
            gp = apply_birth(current, ev, t)
        else:
            gp = apply_death(current, ev, t)
        nxt = FlowCounter(k + 1, ev.r, boundaries[k + 2], gp)
        steps.append(EventStep(ev, current, nxt))
        intervals.append(nxt)
        current = nxt
    alive = _alive_ids(t, current.midpoint())
    if set(current.gamma.rows) != alive:
        raise EvolutionError(
            "final counter indexes %s but the alive arcs are %s" %
            (sorted(current.gamma.rows, key=str), sorted(alive)))

    log = EvolutionLog(t, tuple(intervals), tuple(steps))
    if enforce_axioms:
        for fc in intervals:
            _check_interval(fc, t)
    return log


# ---------------------------------------------------------------------------
# total validation report

@dataclass(frozen=True)
class AxiomReport:
    findings: tuple

    @property
    def ok(self):
        return not [f for f in self.findings if f.severity == "error"]

    def errors(self):
        return [f for f in self.findings if f.severity == "error"]

    def __str__(self):
        return "\n".join(str(f) for f in self.findings) or "all axioms pass"


_ERROR_AXIOM = {
    NonTriangularDelta: "gamma1",
    ActionConstraintViolated: "gamma1",
    CycleConditionViolated: "gamma4",
    NonUnitPivot: "gamma4",
    ConstraintViolated: "gamma5",
}


def validate_axioms(gamma0, events, t):
    """Run the full evolution, reporting every axiom violation found.

    Total: engine exceptions become findings.  Checking downstream of a
    failed event is impossible (there is no matrix to check), which the
    report states explicitly.
    """
    out = []
    err = lambda code, msg: out.append(Finding(code, "error", msg))
    info = lambda code, msg: out.append(Finding(code, "info", msg))

    try:
        log = evolve(gamma0, events, t, enforce_axioms=False)
    except tuple(_ERROR_AXIOM) as e:
        code = _ERROR_AXIOM[type(e)]
        if isinstance(e, NonUnitPivot) and "dying" in str(e):
            code = "gamma5"
        err(code, str(e))
        info("structure", "checking stopped at the failing event")
        return AxiomReport(tuple(out))
    except EvolutionError as e:
        err("structure", str(e))
        return AxiomReport(tuple(out))

    for fc in log.intervals:
        for c1, c2 in _triangularity_violations(fc.gamma, t, fc.r_lo, fc.r_hi):
            err("gamma1",
                "entry (%s, %s) violates the action order on (%s, %s)" %
                (c1, c2, fc.r_lo, fc.r_hi))
        if not fc.gamma.mul(fc.gamma).is_zero():
            err("gamma2", "square-zero fails on (%s, %s)" % (fc.r_lo, fc.r_hi))

    ring = log.ring
    for st in log.steps:
        gm, gp = st.before.gamma, st.after.gamma
        ev = st.record
        if isinstance(ev.payload, HandleSlide):
            ids = gm.rows
            entries = {}
            for c1, c2, val in ev.payload.delta:
                x = ring.coerce(val)
                if x != ring.zero:
                    entries[(c1, c2)] = x
            delta = SparseMatrix(ring, ids, ids, entries)
            if gp != gm.add(delta.mul(gm)).sub(gp.mul(delta)):
                err("gamma3", "slide at r=%s fails its defining identity" % ev.r)
        elif isinstance(ev.payload, Birth):
            v = t.vertex(ev.payload.vertex)
            old = sorted(gm.rows, key=str)
            if gp.restrict(old) != gm:
                err("gamma4", "birth at r=%s modified the old block" % ev.r)
            for c in gp.rows:
                if gp.entry(c, v.plus_arc) != ring.zero:
                    err("gamma4", "birth at r=%s: upper branch receives" % ev.r)
                if gp.entry(v.minus_arc, c) != ring.zero:
                    err("gamma4", "birth at r=%s: lower branch flows out" % ev.r)
                if c != v.minus_arc and gp.entry(v.plus_arc, c) != ring.zero:
                    err("gamma4", "birth at r=%s: upper branch flows past its "
                        "partner" % ev.r)
            if not ring.is_unit(gp.entry(v.plus_arc, v.minus_arc)):
                err("gamma4", "birth at r=%s: pivot is not a unit" % ev.r)
        else:
            v = t.vertex(ev.payload.vertex)
            if not ring.is_unit(gm.entry(v.plus_arc, v.minus_arc)):
                err("gamma5", "death at r=%s: pivot is not a unit" % ev.r)
            inv = ring.invert(gm.entry(v.plus_arc, v.minus_arc))
            for c1 in gp.rows:
                for c2 in gp.rows:
                    want = ring.sub(
                        gm.entry(c1, c2),
                        ring.mul(gm.entry(c1, v.minus_arc),
                                 ring.mul(inv, gm.entry(v.plus_arc, c2))))
                    if gp.entry(c1, c2) != want:
                        err("gamma5",
                            "death at r=%s: survivor entry (%s, %s) mismatch" %
                            (ev.r, c1, c2))

    if not out:
        info("summary", "all axioms pass on %d intervals, %d events" %
             (len(log.intervals), len(log.steps)))
    return AxiomReport(tuple(out))
