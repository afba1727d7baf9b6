"""Data model for one-parameter families of critical-point data.

A family is described by its diagram in the (parameter, action) strip
[0, 1] x R: each critical point traces an arc carrying a piecewise-linear
action profile, arcs meet in pairs at birth and death vertices, and the
arcs assemble into loop or chord components.  Everything is exact: the
parameter and the action values are rationals.

The validator is total.  It returns a report listing every violation it
finds rather than raising on the first one, so scenario authors see all
problems at once.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (InvalidTuple, NonIsolatedCusp, VerticalTangency)
from .piecewise import Piecewise, frac


# ---------------------------------------------------------------------------
# end tags

@dataclass(frozen=True)
class BoundaryAt0:
    def __str__(self):
        return "boundary@0"


@dataclass(frozen=True)
class BoundaryAt1:
    def __str__(self):
        return "boundary@1"


@dataclass(frozen=True)
class BirthVertex:
    vertex: str

    def __str__(self):
        return "birth(%s)" % self.vertex


@dataclass(frozen=True)
class DeathVertex:
    vertex: str

    def __str__(self):
        return "death(%s)" % self.vertex


def _tag_vertex(tag):
    if isinstance(tag, (BirthVertex, DeathVertex)):
        return tag.vertex
    return None


# ---------------------------------------------------------------------------
# core types

@dataclass(frozen=True)
class Arc:
    """One critical point over a closed parameter subinterval.

    The action profile f3 determines the footprint: its first and last
    breakpoints are the interval ends.  lo_open / hi_open record a
    request for a half-open footprint; the validator rejects such arcs
    (compactness), but the data model must be able to express the
    request so the rejection can be tested.
    """

    id: str
    f3: Piecewise
    lo_tag: object
    hi_tag: object
    lo_open: bool = False
    hi_open: bool = False

    @property
    def r_lo(self):
        return self.f3.r_lo

    @property
    def r_hi(self):
        return self.f3.r_hi

    @property
    def r_interval(self):
        return (self.f3.r_lo, self.f3.r_hi)

    def alive_at(self, r):
        return self.f3.contains(r)

    def value(self, r):
        return self.f3.value(r)


@dataclass(frozen=True)
class Vertex:
    id: str
    kind: str            # "birth" | "death"
    r: Fraction
    f3: Fraction
    plus_arc: str
    minus_arc: str

    def __post_init__(self):
        object.__setattr__(self, "r", frac(self.r))
        object.__setattr__(self, "f3", frac(self.f3))
        if self.kind not in ("birth", "death"):
            raise InvalidTuple("vertex kind must be birth or death: %r" % (self.kind,))


@dataclass(frozen=True)
class Component:
    kind: str            # "loop" | "chord"
    arcs: tuple

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple(self.arcs))
        if self.kind not in ("loop", "chord"):
            raise InvalidTuple("component kind must be loop or chord: %r" % (self.kind,))


@dataclass(frozen=True)
class CerfTuple:
    arcs: tuple
    components: tuple
    vertices: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple(self.arcs))
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "vertices", tuple(self.vertices))

    def arc(self, arc_id):
        for a in self.arcs:
            if a.id == arc_id:
                return a
        raise KeyError(arc_id)

    def vertex(self, vertex_id):
        for v in self.vertices:
            if v.id == vertex_id:
                return v
        raise KeyError(vertex_id)

    def arcs_alive(self, r):
        """Arcs whose footprint contains r, in declaration order."""
        return [a for a in self.arcs if a.alive_at(r)]

    def f3_range(self):
        lo = hi = None
        for a in self.arcs:
            alo, ahi = a.f3.extremes()
            lo = alo if lo is None else min(lo, alo)
            hi = ahi if hi is None else max(hi, ahi)
        return lo, hi

    def vertex_params(self):
        return sorted(v.r for v in self.vertices)


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class Finding:
    code: str
    severity: str        # "error" | "info"
    message: str

    def __str__(self):
        return "[%s] %s: %s" % (self.severity, self.code, self.message)


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple

    @property
    def ok(self):
        return not self.errors()

    def errors(self):
        return [f for f in self.findings if f.severity == "error"]

    def __str__(self):
        if not self.findings:
            return "valid (no findings)"
        return "\n".join(str(f) for f in self.findings)


ZERO = Fraction(0)
ONE = Fraction(1)


def _just_after(arc_a, arc_b, r):
    """Exact comparison point inside both arcs strictly after r."""
    knots = [k for k in arc_a.f3.knots() if k > r]
    knots += [k for k in arc_b.f3.knots() if k > r]
    return (r + min(knots)) / 2


def _just_before(arc_a, arc_b, r):
    knots = [k for k in arc_a.f3.knots() if k < r]
    knots += [k for k in arc_b.f3.knots() if k < r]
    return (r + max(knots)) / 2


def validate_cerf(t, event_params=()):
    """Check the structural axioms of a family; returns a ValidationReport.

    event_params: parameter values of declared non-vertex events, folded
    into the disjointness check when they are known to the caller.
    """
    out = []
    err = lambda code, msg: out.append(Finding(code, "error", msg))
    info = lambda code, msg: out.append(Finding(code, "info", msg))

    arc_ids = [a.id for a in t.arcs]
    dup = {x for x in arc_ids if arc_ids.count(x) > 1}
    for x in sorted(dup):
        err("duplicate-id", "arc id %r declared more than once" % x)
    vertex_ids = [v.id for v in t.vertices]
    for x in sorted({x for x in vertex_ids if vertex_ids.count(x) > 1}):
        err("duplicate-id", "vertex id %r declared more than once" % x)
    arcs = {a.id: a for a in t.arcs}
    verts = {v.id: v for v in t.vertices}

    # C1-compactness: every arc footprint is a closed subinterval of [0,1]
    for a in t.arcs:
        if a.lo_open or a.hi_open:
            side = "lower" if a.lo_open else "upper"
            err("C1-compactness",
                "arc %r requests a half-open footprint at its %s end; "
                "components must be compact, so arc intervals are closed" % (a.id, side))
        if a.r_lo < 0 or a.r_hi > 1:
            err("interval-range", "arc %r footprint [%s, %s] leaves [0, 1]" %
                (a.id, a.r_lo, a.r_hi))

    # end tags vs footprint ends and vertices
    for a in t.arcs:
        for end, tag, r_end in (("lo", a.lo_tag, a.r_lo), ("hi", a.hi_tag, a.r_hi)):
            if isinstance(tag, BoundaryAt0):
                if r_end != 0:
                    err("interval-endpoint",
                        "arc %r tagged boundary@0 at %s end but that end is at r=%s"
                        % (a.id, end, r_end))
            elif isinstance(tag, BoundaryAt1):
                if r_end != 1:
                    err("interval-endpoint",
                        "arc %r tagged boundary@1 at %s end but that end is at r=%s"
                        % (a.id, end, r_end))
            elif isinstance(tag, (BirthVertex, DeathVertex)):
                vid = tag.vertex
                if vid not in verts:
                    err("dangling-vertex",
                        "arc %r references unknown vertex %r" % (a.id, vid))
                    continue
                v = verts[vid]
                want = "birth" if isinstance(tag, BirthVertex) else "death"
                if v.kind != want:
                    err("vertex-kind",
                        "arc %r tags vertex %r as %s but it is a %s" %
                        (a.id, vid, want, v.kind))
                # births are parameter minima, deaths maxima, along each arc
                if isinstance(tag, BirthVertex) and end != "lo":
                    err("vertex-end",
                        "birth vertex %r sits at the high end of arc %r; births "
                        "must open the parameter interval (alternation along the "
                        "component fails otherwise)" % (vid, a.id))
                if isinstance(tag, DeathVertex) and end != "hi":
                    err("vertex-end",
                        "death vertex %r sits at the low end of arc %r; deaths "
                        "must close the parameter interval" % (vid, a.id))
                if v.r != r_end:
                    err("vertex-parameter",
                        "arc %r ends at r=%s but vertex %r sits at r=%s" %
                        (a.id, r_end, vid, v.r))
                elif a.value(r_end) != v.f3:
                    err("vertex-action",
                        "arc %r has action %s at vertex %r, vertex declares %s" %
                        (a.id, a.value(r_end), vid, v.f3))
            else:
                err("unknown-tag", "arc %r has unrecognized %s tag %r" % (a.id, end, tag))

    # each vertex joins exactly its two declared arcs
    for v in t.vertices:
        incident = []
        for a in t.arcs:
            if _tag_vertex(a.lo_tag) == v.id:
                incident.append(a.id)
            if _tag_vertex(a.hi_tag) == v.id:
                incident.append(a.id)
        expected = {v.plus_arc, v.minus_arc}
        if v.plus_arc == v.minus_arc:
            err("vertex-arcs", "vertex %r declares the same arc twice" % v.id)
        elif set(incident) != expected or len(incident) != 2:
            err("vertex-arcs",
                "vertex %r declares arcs %r but is referenced by %r" %
                (v.id, sorted(expected), sorted(incident)))
        for aid in (v.plus_arc, v.minus_arc):
            if aid not in arcs:
                err("dangling-arc", "vertex %r references unknown arc %r" % (v.id, aid))

    # orientation: the plus branch has strictly larger action near the vertex
    for v in t.vertices:
        if v.plus_arc not in arcs or v.minus_arc not in arcs:
            continue
        plus, minus = arcs[v.plus_arc], arcs[v.minus_arc]
        try:
            probe = (_just_after if v.kind == "birth" else _just_before)(plus, minus, v.r)
        except ValueError:
            continue   # endpoint mismatch, reported above
        if not (plus.alive_at(probe) and minus.alive_at(probe)):
            continue
        vp, vm = plus.value(probe), minus.value(probe)
        if vp <= vm:
            err("vertex-orientation",
                "vertex %r: plus arc %r must have strictly larger action than "
                "minus arc %r adjacent to the vertex (got %s vs %s)" %
                (v.id, v.plus_arc, v.minus_arc, vp, vm))

    # parameters of distinct events are pairwise distinct
    params = [(v.r, "vertex %s" % v.id) for v in t.vertices]
    params += [(frac(p), "event") for p in event_params]
    seen = {}
    for r, who in sorted(params, key=lambda p: (p[0], p[1])):
        if r in seen:
            err("disjoint-parameters",
                "%s and %s share parameter r=%s; distinct events must occur at "
                "distinct parameters" % (seen[r], who, r))
        else:
            seen[r] = who

    # component structure
    claimed = {}
    for ci, comp in enumerate(t.components):
        name = "component #%d" % ci
        known = []
        for aid in comp.arcs:
            if aid not in arcs:
                err("dangling-arc", "%s references unknown arc %r" % (name, aid))
            else:
                known.append(aid)
                claimed.setdefault(aid, []).append(ci)
        if not known:
            err("empty-component", "%s lists no arcs" % name)
            continue
        chain = [arcs[aid] for aid in known if aid in arcs]
        if comp.kind == "chord":
            # free end of an end arc: the one not glued to its neighbor
            for a, nb, side in ((chain[0], chain[min(1, len(chain) - 1)], "first"),
                                (chain[-1], chain[max(-2, -len(chain))], "last")):
                tags = [a.lo_tag, a.hi_tag]
                if a is not nb:
                    shared = ({_tag_vertex(a.lo_tag), _tag_vertex(a.hi_tag)} &
                              {_tag_vertex(nb.lo_tag), _tag_vertex(nb.hi_tag)}) - {None}
                    tags = [tg for tg in tags if _tag_vertex(tg) not in shared]
                for tag in tags:
                    if not isinstance(tag, (BoundaryAt0, BoundaryAt1)):
                        err("chord-ends",
                            "%s: free end of %s arc %r must lie on the strip "
                            "boundary, got %s" % (name, side, a.id, tag))
            pairs = zip(chain, chain[1:])
        else:
            for a in chain:
                for tag in (a.lo_tag, a.hi_tag):
                    if not isinstance(tag, (BirthVertex, DeathVertex)):
                        err("loop-ends",
                            "%s: loop arc %r has non-vertex end %s" % (name, a.id, tag))
            pairs = zip(chain, chain[1:] + chain[:1])
        for a, b in pairs:
            shared = ({_tag_vertex(a.lo_tag), _tag_vertex(a.hi_tag)} &
                      {_tag_vertex(b.lo_tag), _tag_vertex(b.hi_tag)}) - {None}
            if not shared and a.id != b.id:
                err("gluing",
                    "%s: consecutive arcs %r and %r share no vertex" %
                    (name, a.id, b.id))
    for aid, owners in sorted(claimed.items()):
        if len(owners) > 1:
            err("component-overlap",
                "arc %r belongs to components %r" % (aid, owners))
    for a in t.arcs:
        if a.id not in claimed:
            err("orphan-arc", "arc %r belongs to no component" % a.id)

    # properness over compact windows is automatic for a finite family
    info("properness",
         "finite family: over any compact parameter window only finitely many "
         "arcs are alive and their action values are bounded")

    return ValidationReport(tuple(out))


def births_deaths(t):
    """Split the vertex set; verifies validity first.

    Returns (births, deaths) as Vertex lists ordered by parameter.  The
    plus arc of a birth is the branch with larger action just after the
    vertex; the orientation was already checked by validate_cerf.
    """
    report = validate_cerf(t)
    if not report.ok:
        raise InvalidTuple("invalid family:\n%s" % "\n".join(
            str(f) for f in report.errors()))
    births = sorted((v for v in t.vertices if v.kind == "birth"), key=lambda v: v.r)
    deaths = sorted((v for v in t.vertices if v.kind == "death"), key=lambda v: v.r)
    return births, deaths


# ---------------------------------------------------------------------------
# front projection

@dataclass(frozen=True)
class FrontDiagram:
    """Plot-ready view of a family in the (parameter, action) strip.

    Carries enough structure (cusp records and component membership) to
    reconstruct the family exactly; see tuple_from_front.
    """

    polylines: tuple     # (arc id, ((r, v), ...)) per arc
    cusps: tuple         # (vertex id, kind, r, f3, plus arc, minus arc)
    component_shapes: tuple = ()   # (kind, (arc ids...)) per component


def front_projection(t):
    report = validate_cerf(t)
    if not report.ok:
        raise InvalidTuple("invalid family:\n%s" % "\n".join(
            str(f) for f in report.errors()))
    polylines = tuple((a.id, a.f3.points) for a in t.arcs)
    cusps = tuple((v.id, v.kind, v.r, v.f3, v.plus_arc, v.minus_arc)
                  for v in t.vertices)
    shapes = tuple((c.kind, tuple(c.arcs)) for c in t.components)
    return FrontDiagram(polylines, cusps, shapes)


def tuple_from_front(front):
    """Inverse of front_projection: rebuild the family from its diagram."""
    vertices = tuple(Vertex(vid, kind, r, v, plus, minus)
                     for vid, kind, r, v, plus, minus in front.cusps)
    at_lo = {}
    at_hi = {}
    for vid, kind, r, v, plus, minus in front.cusps:
        side = at_lo if kind == "birth" else at_hi
        side[plus] = vid
        side[minus] = vid
    arcs = []
    for aid, points in front.polylines:
        f3 = Piecewise(points)
        if aid in at_lo:
            lo = BirthVertex(at_lo[aid])
        elif f3.r_lo == 0:
            lo = BoundaryAt0()
        else:
            lo = BoundaryAt1()   # rejected later; cannot occur for valid input
        if aid in at_hi:
            hi = DeathVertex(at_hi[aid])
        elif f3.r_hi == 1:
            hi = BoundaryAt1()
        else:
            hi = BoundaryAt0()
        arcs.append(Arc(aid, f3, lo, hi))
    components = tuple(Component(kind, arc_ids)
                       for kind, arc_ids in front.component_shapes)
    return CerfTuple(tuple(arcs), components, vertices)


# ---------------------------------------------------------------------------
# lifting a front to space

@dataclass(frozen=True)
class LiftResult:
    samples: tuple           # (s midpoint, x) per segment, exact rationals
    contact_residuals: tuple  # z' + x y' per segment; zero by construction
    nontransverse: tuple      # flagged self-intersection descriptions

    @property
    def embedded(self):
        return not self.nontransverse


def _segments_cross(p0, p1, q0, q1):
    """Exact intersection of two closed segments; returns a description or None."""
    (x1, y1), (x2, y2) = p0, p1
    (x3, y3), (x4, y4) = q0, q1
    d1 = (x2 - x1, y2 - y1)
    d2 = (x4 - x3, y4 - y3)
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    if denom == 0:
        # parallel: overlap iff collinear with interval overlap
        cross = (x3 - x1) * d1[1] - (y3 - y1) * d1[0]
        if cross != 0:
            return None
        proj = lambda p: (p[0] - x1) * d1[0] + (p[1] - y1) * d1[1]
        lo, hi = sorted((proj(q0), proj(q1)))
        length = d1[0] * d1[0] + d1[1] * d1[1]
        if hi < 0 or lo > length:
            return None
        return ("overlap", None)
    t = ((x3 - x1) * d2[1] - (y3 - y1) * d2[0]) / denom
    u = ((x3 - x1) * d1[1] - (y3 - y1) * d1[0]) / denom
    if 0 <= t <= 1 and 0 <= u <= 1:
        return ("point", (x1 + t * d1[0], y1 + t * d1[1]))
    return None


def legendrian_lift(points, s_values=None):
    """Recover the missing space coordinate from a front polyline.

    points: (y, z) samples of the front; consecutive samples span straight
    segments.  The returned x on each segment is -z'/y', reported at the
    segment's parameter midpoint; the contact relation z' + x y' = 0 then
    holds exactly on every segment.
    """
    pts = [(frac(y), frac(z)) for y, z in points]
    if len(pts) < 2:
        raise VerticalTangency("need at least two samples")
    if s_values is None:
        svals = [Fraction(i) for i in range(len(pts))]
    else:
        svals = [frac(s) for s in s_values]
        if len(svals) != len(pts) or any(b <= a for a, b in zip(svals, svals[1:])):
            raise NonIsolatedCusp("parameter samples must strictly increase")

    samples = []
    residuals = []
    directions = []
    for i in range(len(pts) - 1):
        (y0, z0), (y1, z1) = pts[i], pts[i + 1]
        dy, dz = y1 - y0, z1 - z0
        if dy == 0 and dz == 0:
            raise NonIsolatedCusp(
                "samples %d and %d coincide: the fold locus is not isolated" % (i, i + 1))
        if dy == 0:
            raise VerticalTangency(
                "segment %d is vertical with z' = %s != 0; not the front of a "
                "space curve" % (i, dz))
        x = -dz / dy
        samples.append(((svals[i] + svals[i + 1]) / 2, x))
        residuals.append(dz + x * dy)
        directions.append((dy, dz))

    flags = []
    n = len(pts) - 1
    for i in range(n):
        for j in range(i + 1, n):
            hit = _segments_cross(pts[i], pts[i + 1], pts[j], pts[j + 1])
            if hit is None:
                continue
            kind, where = hit
            adjacent = (j == i + 1)
            di, dj = directions[i], directions[j]
            parallel = di[0] * dj[1] - di[1] * dj[0] == 0
            if kind == "overlap":
                flags.append("segments %d and %d overlap along a subsegment" % (i, j))
            elif adjacent:
                continue   # shared breakpoint of consecutive segments
            elif parallel:
                flags.append(
                    "non-transverse self-intersection of segments %d and %d at "
                    "(%s, %s)" % (i, j, where[0], where[1]))
    return LiftResult(tuple(samples), tuple(residuals), tuple(flags))
