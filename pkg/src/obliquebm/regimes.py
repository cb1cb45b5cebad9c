"""Qualitative classification of the parameter space.

Three questions about the quadrant-confined diffusion are decidable from
(alpha, beta, gamma, delta) alone, and this module mechanizes them:

* corner polarity -- is the origin almost surely never reached?  Decided by
  four sufficient conditions C1, C2a, C2b, C3; the last is an existential
  statement over positive weights (lambda, mu) and is semi-decided by a grid
  search with local refinement.
* side hitting -- does each coordinate reach its own wall?  Sufficient
  conditions in both directions, plus a joint no-side-hitting criterion.
* existence/uniqueness of the process itself, by a sign case split on
  (beta, gamma); one quadrant of the split contains a genuine nonexistence
  region.

Absence of a C3 witness is reported as "not established", never as "false":
the grid search is a semi-decision of an existential claim.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .model import Params, validate_params

# Golden-section refinement constants for the C3 search.
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0

#: absolute slack accepted on closed boundary comparisons whose operands are
#: products of user-supplied decimals (binary rounding otherwise flips
#: genuine on-boundary cases, e.g. beta*gamma = (alpha-1/2)*(delta-1/2) with
#: all four given as decimal literals).
_BOUNDARY_SLACK = 1e-12


class NonPositiveWeights(ValueError):
    """C3 weights must satisfy lambda > 0 and mu > 0."""


class CornerVerdict(enum.Enum):
    POLAR_PROVEN = "polar_proven"
    UNKNOWN = "unknown"


class SideVerdict(enum.Enum):
    NEVER_HITS = "never_hits"
    HITS_ALMOST_SURELY = "hits_almost_surely"
    NEVER_HITS_GIVEN_CORNER_POLAR = "never_hits_given_corner_polar"
    UNKNOWN = "unknown"


class ExistenceRegime(enum.Enum):
    UNIQUE_IN_PUNCTURED_S = "unique_in_punctured_quadrant"
    UNIQUE_IN_S = "unique_in_quadrant"
    EXISTS_IN_S_UNIQUENESS_UNPROVEN = "exists_uniqueness_unproven"
    NO_SOLUTION = "no_solution"
    UNPROVEN = "unproven"


class ExistenceCase(enum.Enum):
    """Which quadrant of the (beta, gamma) sign split the verdict came from."""

    NONNEG_CROSS = "nonneg_cross"          # beta >= 0, gamma >= 0
    POS_NEG_CROSS = "pos_neg_cross"        # beta > 0 > gamma
    NEG_POS_CROSS = "neg_pos_cross"        # beta < 0 < gamma, via coordinate swap
    NONPOS_CROSS = "nonpos_cross"          # beta <= 0, gamma < 0 (or mirror)


@dataclass(frozen=True)
class CornerReport:
    """Corner-polarity verdict with the conditions that carried it."""

    verdict: CornerVerdict
    satisfied_conditions: frozenset[str]
    c3_witness: tuple[float, float] | None

    def __post_init__(self):
        assert (self.verdict is CornerVerdict.POLAR_PROVEN) == bool(
            self.satisfied_conditions)


@dataclass(frozen=True)
class SideReport:
    x_side: SideVerdict
    y_side: SideVerdict
    both_sides_never: bool


@dataclass(frozen=True)
class ExistenceReport:
    regime: ExistenceRegime
    case: ExistenceCase
    notes: str = ""


@dataclass(frozen=True)
class RegimeReport:
    """Machine-readable bundle of all three classifications."""

    params: Params
    corner: CornerReport
    sides: SideReport
    existence: ExistenceReport


def check_c1(p: Params) -> bool:
    """C1: both oblique components repel (beta >= 0 and gamma >= 0)."""
    return p.beta >= 0.0 and p.gamma >= 0.0


def check_c2(p: Params) -> tuple[bool, bool]:
    """C2a: alpha >= 1/2 and beta >= 0; C2b: delta >= 1/2 and gamma >= 0.

    Either condition keeps one wall unattained, which already protects the
    corner.
    """
    c2a = p.alpha >= 0.5 and p.beta >= 0.0
    c2b = p.delta >= 0.5 and p.gamma >= 0.0
    return c2a, c2b


def _c3_margin(p: Params, lam: float, mu: float) -> float:
    """min of the three C3 constraint margins at weights (lam, mu); C3 holds
    at the point iff the value is >= 0."""
    u = lam * p.alpha + mu * p.gamma
    v = lam * p.beta + mu * p.delta
    quad = lam * u + mu * v - 0.5 * (lam * lam + mu * mu)
    cross = 2.0 * math.sqrt(lam * mu * max(u, 0.0) * max(v, 0.0))
    return min(u, v, quad + cross)


def c3_holds_at(p: Params, lam: float, mu: float) -> bool:
    """Whether the weighted log-distance condition C3 holds at (lam, mu).

    C3 at (lam, mu) requires lam*alpha + mu*gamma >= 0,
    lam*beta + mu*delta >= 0, and

        lam*(lam*alpha + mu*gamma) + mu*(lam*beta + mu*delta)
            - (lam^2 + mu^2)/2
        >= -2*sqrt(lam*mu*(lam*beta + mu*delta)*(lam*alpha + mu*gamma)).

    Equivalently: the quadratic form
    lam*(lam*beta + mu*delta)*x^2 + mu*(lam*alpha + mu*gamma)*y^2 + (...)xy
    is nonnegative on the quadrant.  All three expressions are homogeneous
    of degree 2 in (lam, mu).
    """
    if not (lam > 0.0 and mu > 0.0):
        raise NonPositiveWeights(f"need lam > 0 and mu > 0, got ({lam}, {mu})")
    return _c3_margin(p, lam, mu) >= 0.0


def _grid_margins(p: Params, lams: np.ndarray) -> np.ndarray:
    mus = 1.0 - lams
    u = lams * p.alpha + mus * p.gamma
    v = lams * p.beta + mus * p.delta
    quad = lams * u + mus * v - 0.5 * (lams * lams + mus * mus)
    cross = 2.0 * np.sqrt(lams * mus * np.maximum(u, 0.0) * np.maximum(v, 0.0))
    return np.minimum(np.minimum(u, v), quad + cross)


def search_c3(p: Params, grid_points: int = 10001,
              refine_tol: float = 1e-9) -> tuple[float, float] | None:
    """Search for a C3 witness, normalized to lam + mu = 1.

    By homogeneity it suffices to scan lam in (0, 1) with mu = 1 - lam.  The
    margin is evaluated on ``grid_points`` uniformly spaced interior points;
    the first nonnegative point is returned immediately.  Otherwise the
    margin is maximized by golden-section around the best grid point down to
    bracket width ``refine_tol`` and the maximizer is returned if it
    qualifies.  A returned witness always satisfies :func:`c3_holds_at`
    exactly; None means "not established by this search", which is weaker
    than "false".
    """
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    lams = np.arange(1, grid_points + 1) / float(grid_points + 1)
    margins = _grid_margins(p, lams)
    ok = np.nonzero(margins >= 0.0)[0]
    if ok.size:
        lam = float(lams[ok[0]])
        witness = (lam, 1.0 - lam)
        assert c3_holds_at(p, *witness)
        return witness
    # refine around the best grid point
    best = int(np.argmax(margins))
    h = 1.0 / (grid_points + 1)
    a = max(lams[best] - h, h * 1e-6)
    b = min(lams[best] + h, 1.0 - h * 1e-6)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = _c3_margin(p, c, 1.0 - c)
    fd = _c3_margin(p, d, 1.0 - d)
    while b - a > refine_tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = _c3_margin(p, c, 1.0 - c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = _c3_margin(p, d, 1.0 - d)
    lam = c if fc > fd else d
    if _c3_margin(p, lam, 1.0 - lam) >= 0.0:
        witness = (float(lam), float(1.0 - lam))
        assert c3_holds_at(p, *witness)
        return witness
    return None


def classify_corner(p: Params, grid_points: int = 10001,
                    refine_tol: float = 1e-9) -> CornerReport:
    """Aggregate C1, C2a, C2b and the C3 search into a corner verdict.

    POLAR_PROVEN means the corner is almost surely never reached; UNKNOWN
    means none of the four sufficient conditions was established (the
    question may still be open).
    """
    validate_params(p)
    conditions = set()
    if check_c1(p):
        conditions.add("C1")
    c2a, c2b = check_c2(p)
    if c2a:
        conditions.add("C2a")
    if c2b:
        conditions.add("C2b")
    witness = search_c3(p, grid_points, refine_tol)
    if witness is not None:
        conditions.add("C3")
    verdict = CornerVerdict.POLAR_PROVEN if conditions else CornerVerdict.UNKNOWN
    return CornerReport(verdict, frozenset(conditions), witness)


def _side_verdict(own: float, cross: float, corner_polar: bool) -> SideVerdict:
    if own >= 0.5 and cross >= 0.0:
        return SideVerdict.NEVER_HITS
    if corner_polar and own >= 0.5:
        return SideVerdict.NEVER_HITS_GIVEN_CORNER_POLAR
    if own < 0.5 and cross <= 0.0:
        return SideVerdict.HITS_ALMOST_SURELY
    return SideVerdict.UNKNOWN


def classify_sides(p: Params, corner: CornerReport) -> SideReport:
    """Wall-hitting verdicts for each coordinate plus the joint criterion.

    The x wall is never hit when alpha >= 1/2 and beta >= 0; it is hit
    almost surely when alpha < 1/2 and beta <= 0; with a polar corner,
    alpha >= 1/2 alone suffices to rule hitting out.  Symmetrically in
    (delta, gamma) for y.  ``both_sides_never`` is the joint criterion:
    alpha, delta >= 1/2 together with beta > 0, gamma > 0, or
    beta*gamma <= (alpha - 1/2)*(delta - 1/2); that last comparison accepts
    boundary equality within 1e-12 absolute, so decimal parameter sets
    sitting exactly on the boundary classify as satisfying it.
    """
    validate_params(p)
    polar = corner.verdict is CornerVerdict.POLAR_PROVEN
    x_side = _side_verdict(p.alpha, p.beta, polar)
    y_side = _side_verdict(p.delta, p.gamma, polar)
    prod_ok = (p.beta * p.gamma
               <= (p.alpha - 0.5) * (p.delta - 0.5) + _BOUNDARY_SLACK)
    both = (p.alpha >= 0.5 and p.delta >= 0.5
            and (p.beta > 0.0 or p.gamma > 0.0 or prod_ok))
    return SideReport(x_side, y_side, both)


def classify_existence(p: Params) -> ExistenceReport:
    """Existence/uniqueness verdict by sign case split on (beta, gamma).

    * beta >= 0, gamma >= 0: unique in the punctured quadrant; unique in the
      whole quadrant when alpha*delta >= beta*gamma; a corner start always
      admits a solution.
    * beta > 0 > gamma: unique in the punctured quadrant if C2a holds or a
      C3 witness is found, otherwise unproven.
    * beta < 0 < gamma: the coordinate-swapped mirror of the previous case.
    * beta <= 0, gamma < 0 (or the mirror beta < 0, gamma <= 0): unique in
      the quadrant when alpha*delta > beta*gamma, otherwise no solution
      exists at all.
    """
    validate_params(p)
    b, g = p.beta, p.gamma
    ad = p.alpha * p.delta
    bg = b * g
    if b >= 0.0 and g >= 0.0:
        if ad >= bg:
            regime = ExistenceRegime.UNIQUE_IN_S
            notes = "corner start admits a solution"
        else:
            regime = ExistenceRegime.UNIQUE_IN_PUNCTURED_S
            notes = ("corner start admits a solution; uniqueness among "
                     "corner-started solutions not established")
        return ExistenceReport(regime, ExistenceCase.NONNEG_CROSS, notes)
    if b > 0.0 and g < 0.0:
        c2a, _ = check_c2(p)
        if c2a or search_c3(p) is not None:
            regime = ExistenceRegime.UNIQUE_IN_PUNCTURED_S
            notes = "carried by C2a" if c2a else "carried by a C3 witness"
        else:
            regime = ExistenceRegime.UNPROVEN
            notes = "neither C2a nor a C3 witness; region open"
        return ExistenceReport(regime, ExistenceCase.POS_NEG_CROSS, notes)
    if b < 0.0 and g > 0.0:
        mirror = classify_existence(p.swapped())
        return ExistenceReport(
            mirror.regime, ExistenceCase.NEG_POS_CROSS,
            "by coordinate swap: " + mirror.notes)
    # beta <= 0 and gamma < 0, or the mirror beta < 0 and gamma <= 0
    if ad > bg:
        return ExistenceReport(
            ExistenceRegime.UNIQUE_IN_S, ExistenceCase.NONPOS_CROSS,
            "alpha*delta > beta*gamma")
    return ExistenceReport(
        ExistenceRegime.NO_SOLUTION, ExistenceCase.NONPOS_CROSS,
        "alpha*delta <= beta*gamma with nonpositive cross terms: "
        "any candidate is pinned to the corner")


def classify(p: Params) -> RegimeReport:
    """Full classification: corner polarity, side hitting, existence."""
    corner = classify_corner(p)
    return RegimeReport(
        params=p,
        corner=corner,
        sides=classify_sides(p, corner),
        existence=classify_existence(p),
    )
