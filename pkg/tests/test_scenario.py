"""Scenario text format: parsing, serialization, error locations."""

from fractions import Fraction as F

import pytest

from morseflow.bifurcation import Birth, Death, HandleSlide
from morseflow.cerf import BirthVertex, BoundaryAt0, BoundaryAt1, DeathVertex
from morseflow.cli import data_path
from morseflow.errors import (ScenarioError, ScenarioSemanticError,
                              ScenarioSyntaxError)
from morseflow.rings import Q, Z, Z2
from morseflow.scenario import (load_scenario, parse_chain, parse_scenario,
                                parse_window_spec, serialize_scenario)

MINIMAL = """
[arcs]
c1 : (0, 4) (1, 4)
"""

BUNDLED = ["slide", "twoslides", "birth", "eyeball", "escaping"]


def fields_for_comparison(sc):
    return (sc.ring, sc.family, sc.gamma0, sc.events, sc.window, sc.ladder,
            sc.rep, sc.label, sc.phi, sc.kappa, sc.rho0, sc.model,
            sc.model_rho0, sc.model_kappa)


class TestParseBasics:
    def test_minimal_one_arc_file(self):
        sc = parse_scenario(MINIMAL)
        assert sc.ring is Z2
        assert [a.id for a in sc.family.arcs] == ["c1"]
        assert sc.events == ()
        assert sc.gamma0.r_lo == 0 and sc.gamma0.r_hi == 1
        assert sc.gamma0.gamma.is_zero()

    def test_default_end_tags_from_footprint(self):
        sc = parse_scenario(MINIMAL)
        a = sc.family.arc("c1")
        assert isinstance(a.lo_tag, BoundaryAt0)
        assert isinstance(a.hi_tag, BoundaryAt1)

    def test_ring_section_and_override(self):
        text = "[coefficients]\nring = q\n" + MINIMAL
        assert parse_scenario(text).ring is Q
        assert parse_scenario(text, ring=Z).ring is Z
        assert parse_scenario(MINIMAL, ring=Q).ring is Q

    def test_comments_and_blank_lines_ignored(self):
        text = "# leading comment\n\n[arcs]  # trailing\nc1 : (0, 1) (1, 1) # pts\n"
        sc = parse_scenario(text)
        assert sc.family.arc("c1").f3.points == ((0, 1), (1, 1))

    def test_gamma_entries_and_first_interval(self):
        sc = load_scenario(data_path("slide"))
        assert sc.gamma0.r_hi == F(3, 8)
        assert sc.gamma0.gamma.entry("c2", "c3") == 1
        assert sc.ring is Z2

    def test_event_payloads(self):
        sc = load_scenario(data_path("birth"))
        kinds = [type(e.payload) for e in sc.events]
        assert kinds == [Birth]
        b = sc.events[0].payload
        assert b.vertex == "vb" and b.pivot == 1
        assert b.new_column == (("c1", 1),)

    def test_death_and_slide_payloads(self):
        sc = load_scenario(data_path("eyeball"))
        assert [type(e.payload) for e in sc.events] == [Birth, Death]
        sc2 = load_scenario(data_path("twoslides"))
        assert all(isinstance(e.payload, HandleSlide) for e in sc2.events)
        assert sc2.events[0].payload.delta == (("c1", "c2", 1),)
        assert sc2.events[1].payload.delta == (("c2", "c3", -1),)

    def test_vertex_end_tags(self):
        sc = load_scenario(data_path("eyeball"))
        up = sc.family.arc("up")
        assert isinstance(up.lo_tag, BirthVertex) and up.lo_tag.vertex == "vb"
        assert isinstance(up.hi_tag, DeathVertex) and up.hi_tag.vertex == "vd"

    def test_open_footprint_requested(self):
        sc = load_scenario(data_path("escaping"))
        assert sc.family.arc("runaway").hi_open

    def test_rabinowitz_section(self):
        sc = load_scenario(data_path("eyeball"))
        assert sc.model is not None
        assert sc.model.h_sup == 1
        assert type(sc.model.tame_class).__name__ == "SquareTame"
        assert sc.model_rho0 == F(1, 3) and sc.model_kappa == 1


class TestComponentInference:
    def test_loop_when_all_ends_are_vertices(self):
        sc = load_scenario(data_path("eyeball"))
        kinds = {c.kind: c.arcs for c in sc.family.components}
        assert kinds["loop"] == ("up", "down") or kinds["loop"] == ("down", "up")

    def test_chord_when_any_end_is_boundary(self):
        sc = load_scenario(data_path("birth"))
        by_first = {c.arcs[0]: c.kind for c in sc.family.components}
        assert by_first["c1"] == "chord"
        assert by_first.get("up", by_first.get("down")) == "chord"

    def test_singleton_chords(self):
        sc = load_scenario(data_path("slide"))
        assert all(c.kind == "chord" and len(c.arcs) == 1
                   for c in sc.family.components)


class TestParseChain:
    def test_accumulation_and_signs(self):
        assert parse_chain("2*c1 - c2 + c1", Z) == {"c1": 3, "c2": -1}

    def test_unit_coefficients(self):
        assert parse_chain("c1 + c2", Z2) == {"c1": 1, "c2": 1}

    def test_rational_coefficient_over_q(self):
        assert parse_chain("1/2*c1", Q) == {"c1": F(1, 2)}

    def test_cancellation_drops_generator(self):
        assert parse_chain("c1 - c1 + c2", Z) == {"c2": 1}

    def test_mod2_reduction(self):
        assert parse_chain("c1 + c1", Z2) == {}

    def test_bad_syntax(self):
        with pytest.raises(ScenarioSyntaxError):
            parse_chain("c1 ++ c2", Z)
        with pytest.raises(ScenarioSyntaxError):
            parse_chain("c1 c2", Z)
        with pytest.raises(ScenarioSyntaxError):
            parse_chain("", Z)

    def test_window_spec(self):
        w = parse_window_spec("a=0,b=10")
        assert w.a.value(F(1, 2)) == 0 and w.b.value(F(1, 2)) == 10
        with pytest.raises(ScenarioSyntaxError):
            parse_window_spec("a=0")


class TestErrors:
    def line_of(self, excinfo):
        return excinfo.value.line

    def test_missing_arcs_section(self):
        with pytest.raises(ScenarioSyntaxError, match="arcs"):
            parse_scenario("[coefficients]\nring = z\n")

    def test_unknown_section_with_line(self):
        with pytest.raises(ScenarioSyntaxError) as e:
            parse_scenario("[arcs]\nc1 : (0,1) (1,1)\n[nonsense]\n")
        assert e.value.line == 3

    def test_repeated_section(self):
        with pytest.raises(ScenarioSyntaxError, match="repeated"):
            parse_scenario("[arcs]\nc1 : (0,1) (1,1)\n[arcs]\n")

    def test_content_before_header(self):
        with pytest.raises(ScenarioSyntaxError) as e:
            parse_scenario("ring = z2\n[arcs]\nc1 : (0,1) (1,1)\n")
        assert e.value.line == 1

    def test_unknown_ring(self):
        with pytest.raises(ScenarioSyntaxError, match="ring"):
            parse_scenario("[coefficients]\nring = z3\n" + MINIMAL)

    def test_bad_arc_line(self):
        with pytest.raises(ScenarioSyntaxError) as e:
            parse_scenario("[arcs]\nno colon here\n")
        assert e.value.line == 2

    def test_bad_end_tag(self):
        with pytest.raises(ScenarioSyntaxError, match="end tag"):
            parse_scenario("[arcs]\nc1 : (0,1) (1,1) ends=left,right\n")

    def test_bad_rational(self):
        with pytest.raises(ScenarioSyntaxError):
            parse_scenario("[arcs]\nc1 : (0, one) (1, 1)\n")

    def test_gamma_unknown_arc(self):
        text = MINIMAL + "[gamma]\n(c1, zz) = 1\n"
        with pytest.raises(ScenarioSemanticError, match="zz"):
            parse_scenario(text)

    def test_event_unknown_arc(self):
        text = MINIMAL + "[events]\nslide r=1/2 : (c1, zz) = 1\n"
        with pytest.raises(ScenarioSemanticError, match="zz"):
            parse_scenario(text)

    def test_event_unknown_vertex(self):
        text = MINIMAL + "[events]\nbirth r=1/2 vertex=vq pivot=1\n"
        with pytest.raises(ScenarioSemanticError, match="vq"):
            parse_scenario(text)

    def test_event_parameter_range(self):
        for r in ("0", "1", "3/2", "-1/4"):
            text = MINIMAL + "[events]\nslide r=%s : (c1, c1) = 1\n" % r
            with pytest.raises(ScenarioSemanticError, match="strictly inside"):
                parse_scenario(text)

    def test_duplicate_event_parameter_cites_disjointness(self):
        with pytest.raises(ScenarioSemanticError) as e:
            load_scenario(data_path("duplicate_event"))
        assert "disjoint" in str(e.value)
        assert e.value.line is not None

    def test_slide_needs_entries(self):
        text = MINIMAL + "[events]\nslide r=1/2\n"
        with pytest.raises(ScenarioSyntaxError, match="at least one entry"):
            parse_scenario(text)

    def test_birth_entry_arity(self):
        text = ("[arcs]\nc1 : (0, 4) (1, 4)\n"
                "up : (1/2, 2) (1, 3) ends=birth(vb),boundary\n"
                "down : (1/2, 2) (1, 1) ends=birth(vb),boundary\n"
                "[vertices]\nvb : birth r=1/2 f3=2 plus=up minus=down\n"
                "[events]\nbirth r=1/2 vertex=vb : (c1, c1) = 1\n")
        with pytest.raises(ScenarioSyntaxError, match="birth entries"):
            parse_scenario(text)

    def test_vertex_missing_field(self):
        text = ("[arcs]\nc1 : (0, 4) (1, 4)\n"
                "[vertices]\nvb : birth r=1/2 f3=2 plus=c1\n")
        with pytest.raises(ScenarioSyntaxError, match="minus"):
            parse_scenario(text)

    def test_vertex_unknown_arc(self):
        text = ("[arcs]\nc1 : (0, 4) (1, 4)\n"
                "[vertices]\nvb : birth r=1/2 f3=2 plus=c1 minus=zz\n")
        with pytest.raises(ScenarioSemanticError, match="zz"):
            parse_scenario(text)

    def test_window_needs_both_keys(self):
        with pytest.raises(ScenarioSyntaxError, match="a and b"):
            parse_scenario(MINIMAL + "[window]\na = 0\n")

    def test_ladder_line_shape(self):
        with pytest.raises(ScenarioSyntaxError, match="ladder"):
            parse_scenario(MINIMAL + "[ladder]\nrung : a=0 b=1\n")

    def test_track_unknown_arc(self):
        with pytest.raises(ScenarioSemanticError, match="zz"):
            parse_scenario(MINIMAL + "[track]\nclass = zz\n")

    def test_unknown_phi_family(self):
        from morseflow.errors import InvalidParameters
        with pytest.raises(InvalidParameters):
            parse_scenario(MINIMAL + "[phi]\nbound = cubic(c=1)\n")

    def test_gamma_dead_arc_on_first_interval(self):
        text = ("[arcs]\nc1 : (0, 4) (1, 4)\n"
                "up : (1/2, 2) (1, 3) ends=birth(vb),boundary\n"
                "down : (1/2, 2) (1, 1) ends=birth(vb),boundary\n"
                "[vertices]\nvb : birth r=1/2 f3=2 plus=up minus=down\n"
                "[gamma]\n(c1, up) = 1\n"
                "[events]\nbirth r=1/2 vertex=vb pivot=1\n")
        with pytest.raises(ScenarioSemanticError, match="first interval"):
            parse_scenario(text)

    def test_error_message_carries_line_prefix(self):
        with pytest.raises(ScenarioError, match=r"^line 2:"):
            parse_scenario("[arcs]\nbroken\n")


class TestRoundTrip:
    @pytest.mark.parametrize("name", BUNDLED)
    def test_serialize_parse_fixed_point(self, name):
        sc = load_scenario(data_path(name))
        text = serialize_scenario(sc)
        sc2 = parse_scenario(text)
        assert fields_for_comparison(sc2) == fields_for_comparison(sc)
        assert serialize_scenario(sc2) == text

    def test_window_with_breakpoints_round_trips(self):
        text = (MINIMAL +
                "[window]\na = (0, -1) (1/2, -2) (1, -1)\nb = 10\n")
        sc = parse_scenario(text)
        assert sc.window.a.value(F(1, 2)) == -2
        sc2 = parse_scenario(serialize_scenario(sc))
        assert sc2.window == sc.window

    def test_ladder_round_trips(self):
        text = (MINIMAL +
                "[ladder]\nwindow : a=0 b=10\nwindow : a=-1 b=11\n")
        sc = parse_scenario(text)
        assert len(sc.ladder) == 2
        sc2 = parse_scenario(serialize_scenario(sc))
        assert sc2.ladder == sc.ladder

    def test_signed_class_round_trips(self):
        text = ("[coefficients]\nring = z\n"
                "[arcs]\nc1 : (0, 4) (1, 4)\nc2 : (0, 2) (1, 2)\n"
                "[track]\nclass = -2*c1 + c2 - c2\n")
        sc = parse_scenario(text)
        assert sc.rep == {"c1": -2}
        sc2 = parse_scenario(serialize_scenario(sc))
        assert sc2.rep == sc.rep
        assert serialize_scenario(sc2) == serialize_scenario(sc)
