"""A-priori exponent feasibility algebra.

The damping estimate behind global boundedness closes only if auxiliary
exponents ``(p, q, r)`` satisfy a coupled system of windows in the
diffusion exponent ``m`` and sensitivity exponent ``l``.  This module
evaluates those windows exactly as stated, constructs witness exponents
the same way the existence argument does, and recovers the critical
diffusion threshold ``m_star(l)`` by bisection on witness feasibility.

All arithmetic is exact when the inputs are ``int``/``Fraction`` and
plain float otherwise; signed slacks are always reported so boundary
cases are visible either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

_EXACT_TYPES = (int, Fraction)


def _exact(*vals) -> bool:
    return all(isinstance(v, _EXACT_TYPES) for v in vals)


def _third(exact: bool):
    return Fraction(1, 3) if exact else 1.0 / 3.0


class GnPreconditionError(ValueError):
    """A named precondition of the interpolation exponent failed."""

    def __init__(self, name: str, value):
        super().__init__(f"precondition violated: {name} (value {value})")
        self.name = name
        self.value = value


class NonMonotoneFeasibilityError(RuntimeError):
    def __init__(self, l, probes):
        super().__init__(
            f"feasibility not monotone in m at l={l}; probes: {probes}"
        )
        self.probes = probes


@dataclass(frozen=True)
class FeasibilityQuery:
    m: float
    l: float

    def __post_init__(self):
        if not (math.isfinite(float(self.m)) and math.isfinite(float(self.l))):
            raise ValueError("m and l must be finite")
        if not (self.m > 1):
            raise ValueError(f"m must exceed 1, got {self.m}")
        if not (self.l > 2):
            raise ValueError(f"l must exceed 2, got {self.l}")


@dataclass(frozen=True)
class ConstraintCheck:
    id: str
    satisfied: bool
    slack: float
    applicable: bool = True


@dataclass(frozen=True)
class WitnessResult:
    feasible: bool
    witness: tuple | None
    binding: tuple


def m_star(l):
    """Critical diffusion exponent, piecewise affine with break at 31/12.

    ``l - 5/6`` for ``2 < l <= 31/12`` and ``7l/5 - 28/15`` beyond; the
    two branches agree (value 7/4) at the break.
    """
    if not (l > 2):
        raise ValueError(f"l must exceed 2, got {l}")
    if _exact(l):
        l = Fraction(l)
        return l - Fraction(5, 6) if l <= Fraction(31, 12) else \
            Fraction(7, 5) * l - Fraction(28, 15)
    l = float(l)
    return l - 5.0 / 6.0 if l <= 31.0 / 12.0 else 1.4 * l - 28.0 / 15.0


def gn_alpha(m, l, p, q):
    """Interpolation exponent used by the density-coupling estimate.

    ``alpha = 3(m+p-1)/(3m+3p-4) * (1 - q/((p+2l-m-3)(q+1)))``

    Requires ``p + 2l - m - 3 > 0`` and ``3m + 3p - 4 > 0`` (named
    rejections otherwise).  Under the full admissibility hypotheses (see
    :func:`gn_hypotheses_hold`) the value lies strictly inside (0, 1).
    """
    coupling_gap = p + 2 * l - m - 3
    if coupling_gap <= 0:
        raise GnPreconditionError("p + 2l - m - 3 must be positive", coupling_gap)
    denom = 3 * m + 3 * p - 4
    if denom <= 0:
        raise GnPreconditionError("3m + 3p - 4 must be positive", denom)
    if q <= 0:
        raise GnPreconditionError("q must be positive", q)
    lead = 3 * (m + p - 1) / denom
    return lead * (1 - q / (coupling_gap * (q + 1)))


def gn_hypotheses_hold(m, l, p, q) -> bool:
    """Admissibility set under which ``gn_alpha`` is guaranteed in (0, 1).

    Besides the standing conditions ``m > l-1``, ``q > 1`` and
    ``p > max(1, l-1, m-2l+3)``, the interpolation target exponent must
    lie strictly between the mass-level norm and the Sobolev embedding
    limit, i.e. ``(p+2l-m-3)(q+1) > q`` (positivity of alpha) and
    ``2(p+2l-m-3)(q+1) < 6(m+p-1)q`` (alpha below one).
    """
    if not (m > l - 1 and q > 1):
        return False
    if not (p > max(1, l - 1, m - 2 * l + 3)):
        return False
    gap = p + 2 * l - m - 3
    if not (gap * (q + 1) > q):
        return False
    return 2 * gap * (q + 1) < 6 * (m + p - 1) * q


def constraints(m, l, p, q, r):
    """Evaluate every exponent inequality with signed slack.

    Strict inequalities are satisfied only with positive slack.  The two
    transport branches are gated on ``r`` relative to 3/2; the entry for
    the inactive branch is reported as satisfied and not applicable.
    """
    exact = _exact(m, l, p, q, r)
    if exact:
        m, l, p, q, r = (Fraction(v) for v in (m, l, p, q, r))
    else:
        m, l, p, q, r = (float(v) for v in (m, l, p, q, r))
    third = _third(exact)
    half3 = Fraction(3, 2) if exact else 1.5
    checks = []

    def strict(cid, slack, applicable=True):
        ok = (slack > 0) if applicable else True
        checks.append(ConstraintCheck(cid, ok, slack, applicable))

    def loose(cid, slack, applicable=True):
        ok = (slack >= 0) if applicable else True
        checks.append(ConstraintCheck(cid, ok, slack, applicable))

    loose("side_m_ge_l_minus_1", m - (l - 1))
    strict("side_p_gt_l_minus_1", p - (l - 1))
    strict("side_p_gt_m_minus_2l_plus_3", p - (m - 2 * l + 3))
    strict("side_q_gt_1", q - 1)
    loose("side_r_ge_1", r - 1)

    small_r = r <= half3
    strict("transport_q_upper_small_r", (3 + 2 * r) * third - q, applicable=small_r)
    loose("transport_q_upper_large_r", (r - 1) - (4 - 2 * r) * q,
          applicable=not small_r)
    strict("velocity_q_window_upper", (2 * r + 3) * third - q, applicable=small_r)

    strict("p_lower_solute", p - (3 * q - 3 * m + 4) * third)
    strict("p_upper_diffusion", (2 * m - 2 * l + 8 * third) * q
           + m - 2 * l + 3 - p)
    return checks


def _p_interval(m, l, exact):
    third = _third(exact)
    lower_terms = {
        "side_p_gt_l_minus_1": l - 1,
        "side_p_gt_m_minus_2l_plus_3": m - 2 * l + 3,
        "momentum_coupling_p_lower": 7 * third - m,
        "side_p_gt_1": 1 if exact else 1.0,
    }
    lower_id = max(lower_terms, key=lambda k: lower_terms[k])
    lower = lower_terms[lower_id]
    upper = 5 * m - 6 * l + 25 * third
    return lower, upper, lower_id


def find_witness(query, l=None) -> WitnessResult:
    """Constructive witness search mirroring the existence argument.

    Order: (i) the admissible ``p`` interval; (ii) at its midpoint, the
    ``q`` window whose lower bound ``3(p+2l-m-3)/(6m-6l+8)`` is algebraically
    equivalent to the diffusion-window upper bound on ``p``, intersected
    with (1, 2); (iii) ``r`` strictly between ``max(1, (3q-3)/2)`` and
    3/2.  Midpoint choices are re-validated against :func:`constraints`;
    a 64^3 lattice scan backs up the midpoints near window boundaries.
    Infeasibility is a value carrying the binding window, not an error.
    """
    if isinstance(query, FeasibilityQuery):
        m, l = query.m, query.l
    else:
        m = query
        if l is None:
            raise TypeError("find_witness needs (m, l) or a FeasibilityQuery")
    if not (l > 2):
        raise ValueError(f"l must exceed 2, got {l}")
    exact = _exact(m, l)
    if exact:
        m, l = Fraction(m), Fraction(l)
    else:
        m, l = float(m), float(l)
    half = Fraction(1, 2) if exact else 0.5
    two = 2

    lower, upper, lower_id = _p_interval(m, l, exact)
    if not (upper > lower):
        return WitnessResult(False, None,
                             ("p_interval_empty", lower_id))
    denom = 6 * m - 6 * l + 8
    if denom <= 0:
        return WitnessResult(False, None, ("diffusion_gap_nonpositive",))

    def q_window(p):
        lo = 3 * (p + 2 * l - m - 3) / denom
        hi = (3 * p + 3 * m - 4) / 3
        return max(lo, 1), min(hi, two)

    def r_window(q):
        return max(1, (3 * q - 3) / 2), Fraction(3, 2) if exact else 1.5

    def validated(p, q, r):
        return all(c.satisfied for c in constraints(m, l, p, q, r))

    p_mid = (lower + upper) * half
    q_lo, q_hi = q_window(p_mid)
    if q_hi > q_lo:
        q_mid = (q_lo + q_hi) * half
        r_lo, r_hi = r_window(q_mid)
        if r_hi > r_lo:
            r_mid = (r_lo + r_hi) * half
            if validated(p_mid, q_mid, r_mid):
                return WitnessResult(True, (p_mid, q_mid, r_mid), ())

    # lattice fallback, interior sampling of each nested window
    grid_n = 64
    for ip in range(1, grid_n + 1):
        p = lower + (upper - lower) * ip / (grid_n + 1)
        q_lo, q_hi = q_window(p)
        if not (q_hi > q_lo):
            continue
        for iq in range(1, grid_n + 1):
            q = q_lo + (q_hi - q_lo) * iq / (grid_n + 1)
            r_lo, r_hi = r_window(q)
            if not (r_hi > r_lo):
                continue
            for ir in range(1, grid_n + 1):
                r = r_lo + (r_hi - r_lo) * ir / (grid_n + 1)
                if validated(p, q, r):
                    return WitnessResult(True, (p, q, r), ())
    return WitnessResult(False, None, ("q_window_empty",))


def m_threshold(l: float, tol: float = 1e-3,
                bracket=(1.0, 5.0), probes: int = 17) -> float:
    """Bisection recovery of the feasibility threshold in ``m``.

    Feasibility is probed on a grid across the bracket first; a
    non-monotone pattern aborts with the probe data instead of silently
    bisecting.  The returned value is within ``tol`` of the transition.
    """
    if not (l > 2):
        raise ValueError(f"l must exceed 2, got {l}")
    if not (tol > 0):
        raise ValueError("tol must be positive")
    lo, hi = bracket
    grid = [lo + (hi - lo) * i / (probes - 1) for i in range(probes)]
    flags = [find_witness(mm, l).feasible for mm in grid]
    for a, b in zip(flags, flags[1:]):
        if a and not b:
            raise NonMonotoneFeasibilityError(l, list(zip(grid, flags)))
    if all(flags):
        return lo
    if not any(flags):
        raise ValueError(f"no feasible m in bracket {bracket} for l={l}")
    idx = flags.index(True)
    lo, hi = grid[idx - 1], grid[idx]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if find_witness(mid, l).feasible:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
