import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from fixtures import chord
from morseflow.cerf import CerfTuple, Component
from morseflow.errors import (InvalidParameters, MissingClassData,
                              OutOfRange)
from morseflow.escape import check_H1
from morseflow.rabinowitz import (ClassSurvives, HomotopyModel,
                                  HypersurfaceHomotopy, Inconclusive,
                                  Invariant, LogTame, SquareTame,
                                  SymplecticFormHomotopy, Tame,
                                  classify_invariance, eta_bound,
                                  eta_trajectory, phi_for_class,
                                  restricted_contact_constant)


def model(h=1, c=1, cls=Tame(), variant=HypersurfaceHomotopy()):
    return HomotopyModel(h, c, cls, variant)


def flat_tuple():
    arcs = (chord("a1", [(0, 5), (1, 5)]), chord("a2", [(0, -3), (1, -3)]))
    return CerfTuple(arcs, tuple(Component("chord", (a.id,)) for a in arcs))


class TestModel:
    @pytest.mark.parametrize("build", [
        lambda: model(h=-1),
        lambda: model(c=0),
        lambda: model(c=-2),
        lambda: model(cls=LogTame(0)),
        lambda: model(cls="tame"),
        lambda: model(variant="form"),
        lambda: model(variant=SymplecticFormHomotopy(-1)),
        lambda: model(variant=SymplecticFormHomotopy(1, eta_rate=-2)),
    ])
    def test_rejected_models(self, build):
        with pytest.raises(InvalidParameters):
            build()

    def test_rates_follow_the_variant(self):
        m = model(h=3)
        assert m.motion_rate == 3 and m.eta_growth_rate == 3
        s = model(h=3, variant=SymplecticFormHomotopy(F(7, 2)))
        assert s.motion_rate == F(7, 2)
        assert s.eta_growth_rate == 3          # eta still driven by h_sup
        s2 = model(h=3, variant=SymplecticFormHomotopy(5, eta_rate=F(1, 2)))
        assert s2.eta_growth_rate == F(1, 2)


class TestEtaBound:
    def test_autonomous_bound_is_constant(self):
        m = model(h=0)
        for r in (0, F(1, 3), 1):
            assert eta_bound(m, F(3, 2), r) == 1.5

    def test_unit_rate_reaches_e(self):
        assert eta_bound(model(h=1), 1, 1) == pytest.approx(math.e, rel=1e-12)

    def test_zero_start_stays_zero(self):
        assert eta_bound(model(h=5), 0, 1) == 0

    def test_sign_of_the_start_is_immaterial(self):
        m = model(h=2)
        assert eta_bound(m, -3, F(1, 2)) == eta_bound(m, 3, F(1, 2))

    def test_parameter_range_enforced(self):
        for r in (F(-1, 10), F(3, 2)):
            with pytest.raises(OutOfRange):
                eta_bound(model(), 1, r)

    @pytest.mark.parametrize("h", [0, 1, 5])
    def test_closed_form_matches_independent_integration(self, h):
        m = model(h=h)
        for r in (F(1, 4), F(1, 2), F(3, 4), 1):
            got = eta_bound(m, F(7, 3), r)
            want = oracles.rk4_exponential(h, 7 / 3, r)
            assert abs(got - want) <= 1e-6 * max(want, 1e-12)

    @settings(max_examples=60, deadline=None)
    @given(h=st.fractions(min_value=0, max_value=5, max_denominator=20),
           r=st.fractions(min_value=0, max_value=1, max_denominator=20),
           eta0=st.fractions(min_value=-10, max_value=10, max_denominator=9))
    def test_bound_agrees_with_oracle_everywhere(self, h, r, eta0):
        got = eta_bound(model(h=h), eta0, r)
        want = oracles.rk4_exponential(h, abs(float(eta0)), r)
        assert abs(got - want) <= 1e-6 * max(want, 1e-12)

    def test_trajectory_is_nondecreasing(self):
        traj = eta_trajectory(model(h=2), 1, n=9)
        assert len(traj.samples) == 9
        assert traj.samples[0] == (0, 1.0)
        rs = [r for r, _ in traj.samples]
        vals = [v for _, v in traj.samples]
        assert rs == sorted(rs) and vals == sorted(vals)
        with pytest.raises(InvalidParameters):
            eta_trajectory(model(), 1, n=1)


class TestPhiForClass:
    def test_tame_gives_linear(self):
        phi = phi_for_class(model(h=3, c=2))
        assert phi.label == "linear" and phi.coefficient == 6
        assert phi.diverges_at_infinity()

    def test_log_tame_gives_iterated_log(self):
        phi = phi_for_class(model(h=1, c=1, cls=LogTame(1)))
        assert phi.label == "iterlog"
        assert phi.coefficient == 1 and phi.log_powers == (1,)
        assert phi.diverges_at_infinity()

    def test_square_tame_ignores_the_rate(self):
        phi = phi_for_class(model(h=100, c=1, cls=SquareTame()))
        assert phi.label == "square" and phi.coefficient == 1
        assert not phi.diverges_at_infinity()

    def test_form_homotopy_substitutes_theta(self):
        phi = phi_for_class(model(h=3, c=2,
                                  variant=SymplecticFormHomotopy(5)))
        assert phi.coefficient == 10
        deep = phi_for_class(model(h=3, c=2, cls=LogTame(2),
                                   variant=SymplecticFormHomotopy(5)))
        assert deep.coefficient == 10 and deep.log_powers == (1, 1)

    def test_autonomous_model_has_no_bound(self):
        with pytest.raises(InvalidParameters):
            phi_for_class(model(h=0))

    @pytest.mark.parametrize("cls, diverges", [
        (Tame(), True),
        (LogTame(1), True),
        (LogTame(3), True),
        (SquareTame(), False),
    ])
    def test_divergence_verdicts_via_H1(self, cls, diverges):
        rep = check_H1(phi_for_class(model(h=1, c=1, cls=cls)), flat_tuple())
        assert rep.slope_ok
        assert rep.divergence_ok is diverges


class TestClassify:
    def test_tame_is_invariant(self):
        v = classify_invariance(model(h=2, c=3))
        assert isinstance(v, Invariant)
        assert v.phi.coefficient == 6
        assert v.assumption == "conditional on H3"

    @pytest.mark.parametrize("depth", [1, 2, 3, 4])
    def test_log_tame_is_invariant_at_every_depth(self, depth):
        v = classify_invariance(model(h=1, c=1, cls=LogTame(depth)))
        assert isinstance(v, Invariant)

    def test_autonomous_is_invariant_without_a_bound(self):
        v = classify_invariance(model(h=0))
        assert isinstance(v, Invariant) and v.phi is None

    def test_square_tame_boundary_survives(self):
        v = classify_invariance(model(c=1, cls=SquareTame()),
                                rho0=F(1, 2), kappa=1)
        assert isinstance(v, ClassSurvives)
        assert v.report.margin == 0
        assert v.assumption == "conditional on H3"

    def test_square_tame_far_start_is_inconclusive(self):
        v = classify_invariance(model(c=1, cls=SquareTame()),
                                rho0=2, kappa=1)
        assert isinstance(v, Inconclusive)
        assert v.failing_integral == F(1, 2)
        assert "2" in v.reason

    def test_square_tame_needs_class_data(self):
        m = model(c=1, cls=SquareTame())
        with pytest.raises(MissingClassData):
            classify_invariance(m)
        with pytest.raises(MissingClassData):
            classify_invariance(m, rho0=F(1, 2))
        with pytest.raises(MissingClassData):
            classify_invariance(m, kappa=1)

    def test_survival_threshold_is_exact(self):
        c, kappa = F(2), F(1, 3)
        threshold = 1 / (c + c * kappa)
        m = model(c=c, cls=SquareTame())
        eps = F(1, 10 ** 9)
        for rho0 in (threshold, -threshold, threshold - eps, F(0), eps):
            assert isinstance(classify_invariance(m, rho0, kappa),
                              ClassSurvives)
        for rho0 in (threshold + eps, -(threshold + eps), F(1), F(-1)):
            assert isinstance(classify_invariance(m, rho0, kappa),
                              Inconclusive)

    @settings(max_examples=60, deadline=None)
    @given(c=st.fractions(min_value=F(1, 4), max_value=8, max_denominator=12),
           kappa=st.fractions(min_value=F(1, 8), max_value=4,
                              max_denominator=12),
           rho0=st.fractions(min_value=-3, max_value=3, max_denominator=40))
    def test_survival_matches_the_closed_form(self, c, kappa, rho0):
        v = classify_invariance(model(c=c, cls=SquareTame()), rho0, kappa)
        if abs(rho0) <= 1 / (c + c * kappa):
            assert isinstance(v, ClassSurvives)
        else:
            assert isinstance(v, Inconclusive)


class TestContactConstant:
    def test_value_and_justification(self):
        rc = restricted_contact_constant()
        assert rc.value == 1
        assert "contact" in rc.justification

    def test_composition_with_tame_class(self):
        rc = restricted_contact_constant()
        h = F(7, 2)
        phi = phi_for_class(model(h=h, c=rc.value))
        assert phi.label == "linear" and phi.coefficient == h
        assert isinstance(classify_invariance(model(h=h, c=rc.value)),
                          Invariant)
