"""Command-line surface: scenario ingestion, reports, diagrams.

Exit codes tell CI where a problem was detected:

    1  scenario parsing or file I/O
    2  structural validation of the family or a window
    3  axiom violation while evolving the count matrix
    4  downstream computation (budgets, classification, tracking)

All text and SVG output is deterministic: exact rationals printed as
fractions, sorted iteration, fixed geometry, no timestamps.
"""

import argparse
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from .algebra import homology
from .bifurcation import HandleSlide, evolve, validate_axioms
from .cerf import validate_cerf
from .diagrams import family_svg, trace_svg
from .errors import (ActionConstraintViolated, ConstraintViolated,
                     CycleConditionViolated, EvolutionError, InvalidTuple,
                     InvalidWindow, MorseflowError, NonIsolatedCusp,
                     NonNestedLadder, NonTriangularDelta, NonUnitPivot,
                     NotADifferential, ScenarioError, ScenarioSemanticError,
                     VerticalTangency)
from .escape import build_cascade, check_H1, check_H2, escape_budget, linear, parse_phi
from .rabinowitz import ClassSurvives, Inconclusive, classify_invariance, phi_for_class
from .rings import Q, Z, Z2
from .scenario import (Scenario, _phi_text, load_scenario, parse_chain,
                       parse_window_spec, serialize_scenario)
from .tracker import filtered_homology, full_homology, track_class, wide_window

HEADER = "# morseflow 0.1.0"

_COEFFS = {"z2": Z2, "z": Z, "q": Q}


@dataclass(frozen=True)
class RunArtifacts:
    reports: tuple               # (filename, text) pairs in emission order
    files: tuple = ()            # paths written when an output dir was given
    exit_code: int = 0


def data_path(name):
    """Path of a bundled scenario, by basename with or without .scn."""
    base = os.path.join(os.path.dirname(__file__), "data")
    for cand in (name, name + ".scn"):
        p = os.path.join(base, cand)
        if os.path.isfile(p):
            return p
    raise OSError("no scenario file or bundled scenario named %r" % name)


def _load(arg, flags):
    if arg is None:
        raise ScenarioError("this command needs a scenario argument")
    path = arg if os.path.isfile(arg) else data_path(arg)
    ring = _COEFFS[flags.coeff] if getattr(flags, "coeff", None) else None
    return load_scenario(path, ring=ring)


def _findings_block(title, findings, ok):
    lines = ["[%s]" % title]
    for f in findings:
        lines.append("%-5s %s: %s" % (f.severity, f.code, f.message))
    lines.append("result: %s" % ("ok" if ok else "invalid"))
    return lines


def _window_for(sc, flags):
    if getattr(flags, "window", None):
        return parse_window_spec(flags.window)
    if sc.window is not None:
        return sc.window
    return wide_window(sc.family)


def _rep_for(sc, flags):
    if getattr(flags, "cls", None):
        rep = parse_chain(flags.cls, sc.ring)
        for aid in rep:
            try:
                sc.family.arc(aid)
            except KeyError:
                raise ScenarioSemanticError(
                    "tracked class references unknown arc %r" % aid)
        return rep
    return sc.rep


def _phi_for(sc, flags):
    if getattr(flags, "phi", None):
        return parse_phi(flags.phi)
    return sc.phi


def _torsion_text(h):
    return ",".join(str(d) for d in h.torsion) or "-"


# ---------------------------------------------------------------------------
# commands; each returns (reports, exit_code)

def _cmd_validate(arg, flags):
    sc = _load(arg, flags)
    slides = tuple(e.r for e in sc.events if isinstance(e.payload, HandleSlide))
    rep = validate_cerf(sc.family, event_params=slides)
    lines = [HEADER, "scenario: %s" % os.path.basename(sc.path)]
    lines += _findings_block("cerf", rep.findings, rep.ok)
    code = 0 if rep.ok else 2
    if rep.ok:
        ax = validate_axioms(sc.gamma0, sc.events, sc.family)
        lines += _findings_block("axioms", ax.findings, ax.ok)
        if not ax.ok:
            code = 3
    else:
        lines += ["[axioms]", "skipped: family is structurally invalid"]
    return [("validation.txt", "\n".join(lines) + "\n")], code


def _cmd_evolve(arg, flags):
    sc = _load(arg, flags)
    log = evolve(sc.gamma0, sc.events, sc.family)
    lines = [HEADER, "ring: %s" % log.ring.name]
    for fc in log.intervals:
        lines.append("")
        lines.append("interval %d: (%s, %s)" % (fc.interval_index, fc.r_lo, fc.r_hi))
        lines.append("  generators: %s" % (" ".join(fc.generators) or "-"))
        for (c1, c2), v in sorted(fc.gamma.items(),
                                  key=lambda kv: (str(kv[0][0]), str(kv[0][1]))):
            lines.append("  (%s, %s) = %s" % (c1, c2, v))
    lines.append("")
    for st in log.steps:
        lines.append("event r=%s: %s" % (st.record.r, st.record.kind))
    return [("evolution.txt", "\n".join(lines) + "\n")], 0


def _cmd_homology(arg, flags):
    sc = _load(arg, flags)
    log = evolve(sc.gamma0, sc.events, sc.family)
    w = _window_for(sc, flags)
    lines = [HEADER, "ring: %s" % log.ring.name, "",
             "interval\tspan\trank\ttorsion\twindowed"]
    for fc in log.intervals:
        h = homology(fc.gamma)
        hw = filtered_homology(sc.family, fc, fc.midpoint(), w)
        lines.append("%d\t(%s, %s)\t%d\t%s\t%d %s" %
                     (fc.interval_index, fc.r_lo, fc.r_hi, h.free_rank,
                      _torsion_text(h), hw.free_rank, _torsion_text(hw)))
    if sc.ladder:
        rep = full_homology(sc.family, log, log.intervals[0].midpoint(), sc.ladder)
        lines += ["", "[ladder]", rep.message]
        for i, (h, leg) in enumerate(zip(rep.results, rep.legs + (None,))):
            lines.append("window %d: rank %d torsion %s" %
                         (i, h.free_rank, _torsion_text(h)))
            if leg is not None:
                lines.append("  leg: proj rank %d (%s), incl rank %d (%s)" %
                             (leg.proj_rank, "iso" if leg.proj_iso else "not iso",
                              leg.incl_rank, "iso" if leg.incl_iso else "not iso"))
    return [("homology.txt", "\n".join(lines) + "\n")], 0


def _trace(sc, flags):
    rep = _rep_for(sc, flags)
    if rep is None:
        raise ScenarioSemanticError(
            "tracking needs a class: give --class or a [track] section")
    log = evolve(sc.gamma0, sc.events, sc.family)
    return track_class(rep, log, _window_for(sc, flags), label=sc.label)


def _cmd_track(arg, flags):
    sc = _load(arg, flags)
    trace = _trace(sc, flags)
    text = "\n".join([HEADER, trace.table(),
                      "final: %s" % trace.final_value()]) + "\n"
    return [("trace.txt", text)], 0


def _cmd_escape(arg, flags):
    sc = _load(arg, flags)
    phi = _phi_for(sc, flags)
    if phi is None:
        raise ScenarioSemanticError(
            "escape analysis needs a growth bound: give --phi or a [phi] section")
    lines = [HEADER, "bound: %s" % _phi_text(phi)]
    h1 = check_H1(phi, sc.family)
    lines += _findings_block("H1", h1.findings, h1.ok)
    if sc.kappa is not None and sc.rho0 is not None:
        h2 = check_H2(phi, sc.kappa, sc.rho0)
        lines += ["[H2]",
                  "upper: threshold %s integral %s" % (h2.upper_threshold,
                                                       h2.upper_integral),
                  "lower: threshold %s integral %s" % (h2.lower_threshold,
                                                       h2.lower_integral),
                  "required: %s" % h2.required,
                  "margin: %s" % h2.margin,
                  "result: %s" % ("ok" if h2.ok else "insufficient")]
    if sc.rep is not None or getattr(flags, "cls", None):
        trace = _trace(sc, flags)
        budget = escape_budget(trace, phi)
        lines.append("[budget]")
        heights = budget.heights
        flat = 0
        for i, (cost, (x, y)) in enumerate(zip(budget.step_costs,
                                               zip(heights, heights[1:]))):
            if cost == 0:
                flat += 1
                continue
            lines.append("step %d: %s -> %s costs %s" % (i, x, y, cost))
        lines += ["flat steps: %d" % flat,
                  "total: %s" % budget.total,
                  "verdict: %s" % budget.verdict,
                  "escape to infinity costs +inf: %s" % budget.escape_cost_infinite]
    return [("escape.txt", "\n".join(lines) + "\n")], 0


def _cmd_cascade(arg, flags):
    if flags.n is None:
        raise ScenarioError("cascade needs --n")
    ring = _COEFFS[flags.coeff] if flags.coeff else Z2
    base = Fraction(flags.base)
    ratio = Fraction(flags.ratio)
    t, gamma0, events = build_cascade(flags.n, base=base, ratio=ratio,
                                      delta_value=Fraction(flags.delta),
                                      ring=ring)
    sc = Scenario(ring, t, gamma0, tuple(events), window=wide_window(t),
                  rep={"c1": ring.one}, label="h",
                  phi=linear(Fraction(1), gap=(-ratio, ratio)))
    name = "cascade%d.scn" % flags.n
    return [(name, serialize_scenario(sc))], 0


def _cmd_rabinowitz(arg, flags):
    sc = _load(arg, flags)
    if sc.model is None:
        raise ScenarioSemanticError(
            "this command needs a [rabinowitz] section")
    m = sc.model
    lines = [HEADER,
             "variant: %s" % type(m.variant).__name__,
             "tame class: %s" % type(m.tame_class).__name__,
             "motion rate: %s" % m.motion_rate,
             "eta growth rate: %s" % m.eta_growth_rate]
    verdict = classify_invariance(m, rho0=sc.model_rho0, kappa=sc.model_kappa)
    phi = getattr(verdict, "phi", None)
    if phi is None and m.eta_growth_rate != 0:
        phi = phi_for_class(m)
    if phi is not None:
        lines.append("growth bound: %s" % _phi_text(phi))
    if isinstance(verdict, ClassSurvives):
        lines.append("verdict: class survives (margin %s)" % verdict.report.margin)
    elif isinstance(verdict, Inconclusive):
        lines.append("verdict: inconclusive: %s (failing integral %s)" %
                     (verdict.reason, verdict.failing_integral))
    else:
        lines.append("verdict: invariant")
    lines.append("assumption: %s" % verdict.assumption)
    return [("rabinowitz.txt", "\n".join(lines) + "\n")], 0


def _cmd_plot(arg, flags):
    sc = _load(arg, flags)
    out = [("cerf.svg", family_svg(sc.family, sc.events))]
    if sc.rep is not None or getattr(flags, "cls", None):
        out.append(("trace.svg", trace_svg(_trace(sc, flags))))
    return out, 0


_COMMANDS = {
    "validate": _cmd_validate,
    "evolve": _cmd_evolve,
    "homology": _cmd_homology,
    "track": _cmd_track,
    "escape": _cmd_escape,
    "cascade": _cmd_cascade,
    "rabinowitz": _cmd_rabinowitz,
    "plot": _cmd_plot,
}


def run(command, scenario, flags):
    """Execute one command; returns RunArtifacts (writes files under
    flags.out when that is set)."""
    if command not in _COMMANDS:
        raise ScenarioError("unknown command %r" % command)
    reports, code = _COMMANDS[command](scenario, flags)
    files = []
    if getattr(flags, "out", None):
        os.makedirs(flags.out, exist_ok=True)
        for name, text in reports:
            p = os.path.join(flags.out, name)
            with open(p, "w", encoding="utf-8") as fh:
                fh.write(text)
            files.append(p)
    return RunArtifacts(tuple(reports), tuple(files), code)


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="morseflow",
        description="Evolve, track and bound flow-line counts over "
                    "one-parameter families.")
    ap.add_argument("command", choices=sorted(_COMMANDS))
    ap.add_argument("scenario", nargs="?",
                    help="scenario file path or bundled scenario name")
    ap.add_argument("--coeff", choices=sorted(_COEFFS),
                    help="override the coefficient ring")
    ap.add_argument("--window", metavar="a=LO,b=HI",
                    help="override the action window")
    ap.add_argument("--class", dest="cls", metavar="CHAIN",
                    help="cycle to track, e.g. 'c1 + 2*c2'")
    ap.add_argument("--phi", metavar="BOUND",
                    help="growth bound, e.g. 'linear(c=2)'")
    ap.add_argument("--out", metavar="DIR", help="write reports into DIR")
    ap.add_argument("--seed", type=int, default=0,
                    help="reserved for randomized property-test drivers")
    ap.add_argument("--n", type=int, help="cascade: number of stages")
    ap.add_argument("--base", default="1", help="cascade: starting action")
    ap.add_argument("--ratio", default="2", help="cascade: growth per stage")
    ap.add_argument("--delta", default="1", help="cascade: slide entry value")
    return ap


_AXIOM_ERRORS = (NotADifferential, NonTriangularDelta, NonUnitPivot,
                 CycleConditionViolated, ActionConstraintViolated,
                 ConstraintViolated, EvolutionError, VerticalTangency,
                 NonIsolatedCusp)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        arts = run(args.command, args.scenario, args)
    except (ScenarioError, OSError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 1
    except (InvalidTuple, InvalidWindow, NonNestedLadder) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    except _AXIOM_ERRORS as e:
        print("error: %s" % e, file=sys.stderr)
        return 3
    except MorseflowError as e:
        print("error: %s" % e, file=sys.stderr)
        return 4
    if arts.files:
        for p in arts.files:
            print(p)
    else:
        for _, text in arts.reports:
            sys.stdout.write(text)
    return arts.exit_code


if __name__ == "__main__":
    sys.exit(main())
