"""Growth-bound models for deforming Floer-type homologies.

A homotopy of the defining data moves action values of tracked classes
at a rate controlled by a tameness estimate: |d rho / d r| <= Phi(|rho|)
with Phi determined by the tameness class and the homotopy's supremum
rate.  This module builds the matching growth bound, bounds the
auxiliary quantity eta along the deformation, and classifies what the
budget arguments yield: full invariance, survival of a single class, or
nothing.  Every verdict is conditional on the standing compactness
hypothesis (H3); the flag is carried explicitly and never absorbed.

No geometry lives here: suprema, tame constants, and the form-variation
constant theta are inputs measured elsewhere.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (InvalidParameters, MissingClassData, OutOfRange,
                     VerificationFailed)
from .escape import check_H2, iterlog, linear, square
from .piecewise import frac

H3_NOTE = "conditional on H3"


# ---------------------------------------------------------------------------
# tameness classes and homotopy variants

@dataclass(frozen=True)
class Tame:
    pass


@dataclass(frozen=True)
class LogTame:
    depth: int = 1


@dataclass(frozen=True)
class SquareTame:
    pass


@dataclass(frozen=True)
class HypersurfaceHomotopy:
    pass


@dataclass(frozen=True)
class SymplecticFormHomotopy:
    """Deformation of the ambient form rather than the hypersurface.

    theta replaces the homotopy supremum in the growth bound.  eta_rate,
    when given, is an alternative exponential rate for the eta estimate;
    the stated growth relation is used as an upper bound.
    """

    theta: Fraction
    eta_rate: object = None

    def __post_init__(self):
        object.__setattr__(self, "theta", frac(self.theta))
        if self.theta < 0:
            raise InvalidParameters("theta must be nonnegative")
        if self.eta_rate is not None:
            object.__setattr__(self, "eta_rate", frac(self.eta_rate))
            if self.eta_rate < 0:
                raise InvalidParameters("eta rate must be nonnegative")


@dataclass(frozen=True)
class HomotopyModel:
    h_sup: Fraction                       # sup over r of the motion rate
    tame_constant: Fraction
    tame_class: object = Tame()
    variant: object = HypersurfaceHomotopy()

    def __post_init__(self):
        object.__setattr__(self, "h_sup", frac(self.h_sup))
        object.__setattr__(self, "tame_constant", frac(self.tame_constant))
        if self.h_sup < 0:
            raise InvalidParameters("homotopy supremum must be nonnegative")
        if self.tame_constant <= 0:
            raise InvalidParameters("tame constant must be positive")
        if not isinstance(self.tame_class, (Tame, LogTame, SquareTame)):
            raise InvalidParameters("unknown tameness class: %r"
                                    % (self.tame_class,))
        if isinstance(self.tame_class, LogTame) and self.tame_class.depth < 1:
            raise InvalidParameters("log-tame depth must be at least 1")
        if not isinstance(self.variant,
                          (HypersurfaceHomotopy, SymplecticFormHomotopy)):
            raise InvalidParameters("unknown homotopy variant: %r"
                                    % (self.variant,))

    @property
    def motion_rate(self):
        """Rate constant entering the growth bound (theta when the form
        moves, the homotopy supremum otherwise)."""
        if isinstance(self.variant, SymplecticFormHomotopy):
            return self.variant.theta
        return self.h_sup

    @property
    def eta_growth_rate(self):
        if (isinstance(self.variant, SymplecticFormHomotopy)
                and self.variant.eta_rate is not None):
            return self.variant.eta_rate
        return self.h_sup


# ---------------------------------------------------------------------------
# the eta estimate

@dataclass(frozen=True)
class EtaTrajectory:
    samples: tuple               # ((r, bound), ...) nondecreasing in r


def _rk4_growth(rate, eta0, r):
    """Numerically integrate eta' = rate * eta from |eta0| over [0, r]."""
    k = float(rate)
    y = abs(float(eta0))
    steps = max(64, int(64 * k * float(r)) + 1)
    h = float(r) / steps
    f = lambda v: k * v
    for _ in range(steps):
        k1 = f(y)
        k2 = f(y + h * k1 / 2)
        k3 = f(y + h * k2 / 2)
        k4 = f(y + h * k3)
        y += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
    return y


def eta_bound(model, eta0, r):
    """Certified upper bound exp(rate * r) * |eta0| on |eta_r|.

    The comparison equation eta' = rate * eta is also integrated with a
    fourth-order scheme and must agree with the closed form to 1e-6
    relative; a mismatch means a broken numeric environment and raises.
    """
    r = frac(r)
    if not 0 <= r <= 1:
        raise OutOfRange("the deformation parameter lives in [0, 1]")
    rate = model.eta_growth_rate
    closed = math.exp(float(rate) * float(r)) * abs(float(eta0))
    if eta0 != 0:
        numeric = _rk4_growth(rate, eta0, r)
        if abs(numeric - closed) > 1e-6 * max(abs(closed), 1e-12):
            raise VerificationFailed(
                "comparison integration disagrees with the closed form: "
                "%r vs %r" % (numeric, closed))
    return closed


def eta_trajectory(model, eta0, n=11):
    if n < 2:
        raise InvalidParameters("a trajectory needs at least two samples")
    samples = []
    for i in range(n):
        r = Fraction(i, n - 1)
        samples.append((r, eta_bound(model, eta0, r)))
    return EtaTrajectory(tuple(samples))


# ---------------------------------------------------------------------------
# growth bound per tameness class

def phi_for_class(model):
    """The growth bound the tameness estimate provides.

    Tame gives a linear bound with coefficient c * rate, log-tame an
    iterated-log bound with the same coefficient, square-tame c * s^2
    with no rate dependence.  The slope half of the escape hypothesis
    holds by definition of the class; what remains checkable is the
    divergence or tail behavior of the integrals.
    """
    c = model.tame_constant
    cls = model.tame_class
    if isinstance(cls, SquareTame):
        return square(c)
    rate = model.motion_rate
    if rate == 0:
        raise InvalidParameters(
            "autonomous deformation: nothing moves, no growth bound needed")
    if isinstance(cls, Tame):
        return linear(c * rate)
    return iterlog(c * rate, cls.depth)


# ---------------------------------------------------------------------------
# the verdicts

@dataclass(frozen=True)
class Invariant:
    phi: object
    assumption: str = H3_NOTE


@dataclass(frozen=True)
class ClassSurvives:
    phi: object
    report: object              # the H2 evaluation backing the verdict
    assumption: str = H3_NOTE


@dataclass(frozen=True)
class Inconclusive:
    phi: object
    failing_integral: object
    reason: str
    assumption: str = H3_NOTE


def classify_invariance(model, rho0=None, kappa=None):
    """What the budget arguments give for this deformation model.

    Tame and log-tame bounds have divergent escape integrals on both
    sides, so every class is pinned: Invariant.  A square-tame bound has
    finite tails; a single class starting at rho0 survives when both
    tail integrals reach 1 + kappa, which happens exactly for
    |rho0| <= 1/(c + c*kappa).  Otherwise the method says nothing.
    """
    cls = model.tame_class
    if isinstance(cls, SquareTame):
        if rho0 is None or kappa is None:
            raise MissingClassData(
                "square-tame classification needs the class's starting "
                "action rho0 and a margin kappa")
        phi = phi_for_class(model)
        report = check_H2(phi, kappa, rho0)
        if report.ok:
            return ClassSurvives(phi, report)
        worst = min(report.upper_integral, report.lower_integral)
        return Inconclusive(
            phi, worst,
            "a tail integral reaches only %s where %s is required"
            % (worst, report.required))
    if model.motion_rate == 0:
        return Invariant(None)
    phi = phi_for_class(model)
    if not phi.diverges_at_infinity():
        return Inconclusive(phi, phi.tail_integral(phi.gap[1]),
                            "escape integral converges")
    return Invariant(phi)


@dataclass(frozen=True)
class ContactConstant:
    value: Fraction
    justification: str


def restricted_contact_constant():
    """Default tame constant for restricted contact type hypersurfaces."""
    return ContactConstant(
        Fraction(1),
        "for a hypersurface of restricted contact type the primitive "
        "realizing the contact structure gives the tameness estimate "
        "with constant 1")
