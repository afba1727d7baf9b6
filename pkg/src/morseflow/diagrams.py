"""Line-drawing SVG output for families and spectral traces.

Every picture is a pure function of its input: fixed canvas, fixed
palette, coordinates formatted to two decimals, elements emitted in
declaration order.  Re-running a command therefore reproduces the
output byte for byte.
"""

from .bifurcation import Birth, Death

VERSION_COMMENT = "<!-- morseflow 0.1.0 -->"

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2")

_NEG_INF = float("-inf")


def _fmt(x):
    s = "%.2f" % float(x)
    return "0.00" if s == "-0.00" else s


def _svg(width, height, body):
    head = ('<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
            'viewBox="0 0 %d %d" font-family="monospace" font-size="11">'
            % (width, height, width, height))
    return "\n".join([head, VERSION_COMMENT,
                      '<rect width="%d" height="%d" fill="#ffffff"/>'
                      % (width, height)] + body + ["</svg>", ""])


class _Frame:
    """Affine map from (parameter, value) to canvas pixels, value axis up."""

    def __init__(self, width, height, vlo, vhi):
        self.ml, self.mr, self.mt, self.mb = 56, 16, 28, 30
        self.w, self.h = width, height
        if vhi <= vlo:
            vhi = vlo + 1
        pad = (vhi - vlo) / 12
        self.vlo, self.vhi = vlo - pad, vhi + pad

    def x(self, r):
        return self.ml + float(r) * (self.w - self.ml - self.mr)

    def y(self, v):
        t = (float(self.vhi) - float(v)) / float(self.vhi - self.vlo)
        return self.mt + t * (self.h - self.mt - self.mb)

    def axes(self, vlo_label, vhi_label):
        out = ['<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="#444444"/>'
               % (_fmt(self.ml), _fmt(self.mt), _fmt(self.ml), _fmt(self.h - self.mb)),
               '<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="#444444"/>'
               % (_fmt(self.ml), _fmt(self.h - self.mb),
                  _fmt(self.w - self.mr), _fmt(self.h - self.mb))]
        for r, lab in ((0, "0"), (1, "1")):
            out.append('<text x="%s" y="%s" text-anchor="middle">r=%s</text>'
                       % (_fmt(self.x(r)), _fmt(self.h - self.mb + 16), lab))
        for v, lab in ((vlo_label, str(vlo_label)), (vhi_label, str(vhi_label))):
            out.append('<text x="%s" y="%s" text-anchor="end">%s</text>'
                       % (_fmt(self.ml - 4), _fmt(self.y(v) + 4), lab))
        return out


def family_svg(t, events=(), width=720, height=440):
    """Action profiles of every arc, vertex dots, event parameter marks."""
    lo, hi = t.f3_range()
    if lo is None:
        lo, hi = 0, 1
    fr = _Frame(width, height, lo, hi)
    body = fr.axes(lo, hi)
    for i, a in enumerate(t.arcs):
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join("%s,%s" % (_fmt(fr.x(r)), _fmt(fr.y(v)))
                       for r, v in a.f3.points)
        body.append('<polyline points="%s" fill="none" stroke="%s" '
                    'stroke-width="2"/>' % (pts, color))
        r0, v0 = a.f3.points[0]
        body.append('<text x="%s" y="%s" fill="%s">%s</text>'
                    % (_fmt(fr.x(r0) + 3), _fmt(fr.y(v0) - 5), color, a.id))
    for v in t.vertices:
        body.append('<circle cx="%s" cy="%s" r="3.5" fill="#000000"/>'
                    % (_fmt(fr.x(v.r)), _fmt(fr.y(v.f3))))
        body.append('<text x="%s" y="%s">%s</text>'
                    % (_fmt(fr.x(v.r) + 5), _fmt(fr.y(v.f3) + 12), v.id))
    for ev in sorted(events, key=lambda e: e.r):
        mark = {Birth: "b", Death: "d"}.get(type(ev.payload), "s")
        body.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="#999999" '
                    'stroke-dasharray="4 3"/>'
                    % (_fmt(fr.x(ev.r)), _fmt(fr.mt),
                       _fmt(fr.x(ev.r)), _fmt(height - fr.mb)))
        body.append('<text x="%s" y="%s" text-anchor="middle" '
                    'fill="#666666">%s</text>'
                    % (_fmt(fr.x(ev.r)), _fmt(fr.mt - 8), mark))
    return _svg(width, height, body)


def trace_svg(trace, width=720, height=320):
    """Staircase of the tracked value with transfer marks.

    Intervals where the class is zero (value -inf) are drawn dashed
    along the canvas floor.
    """
    finite = [v for seg in trace.segments for v in (seg.rho_lo, seg.rho_hi)
              if v != _NEG_INF]
    lo = min(finite) if finite else 0
    hi = max(finite) if finite else 1
    fr = _Frame(width, height, lo, hi)
    body = fr.axes(lo, hi)
    floor = height - fr.mb - 4
    for seg in trace.segments:
        x1, x2 = fr.x(seg.r_lo), fr.x(seg.r_hi)
        if seg.rho_lo == _NEG_INF or seg.rho_hi == _NEG_INF:
            body.append('<line x1="%s" y1="%s" x2="%s" y2="%s" '
                        'stroke="#aaaaaa" stroke-dasharray="2 3" '
                        'stroke-width="2"/>'
                        % (_fmt(x1), _fmt(floor), _fmt(x2), _fmt(floor)))
            continue
        body.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="#1f77b4" '
                    'stroke-width="2"/>'
                    % (_fmt(x1), _fmt(fr.y(seg.rho_lo)),
                       _fmt(x2), _fmt(fr.y(seg.rho_hi))))
    for r, old_top, new_top in trace.transfers:
        seg = next((s for s in trace.segments if s.r_lo == r), None)
        if seg is None:
            continue
        y = floor if seg.rho_lo == _NEG_INF else fr.y(seg.rho_lo)
        body.append('<circle cx="%s" cy="%s" r="4" fill="none" '
                    'stroke="#d62728" stroke-width="2"/>'
                    % (_fmt(fr.x(r)), _fmt(y)))
        body.append('<text x="%s" y="%s" fill="#d62728">%s&#8594;%s</text>'
                    % (_fmt(fr.x(r) + 6), _fmt(y - 6), old_top, new_top))
    body.append('<text x="%s" y="%s">%s</text>'
                % (_fmt(fr.ml), _fmt(fr.mt - 8), trace.outcome))
    return _svg(width, height, body)
