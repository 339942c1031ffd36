"""Eigenvalues of the nonlocal ordinary-differential pencil on an arc.

Separating variables for -Laplace + 1 on the angle b_1 < phi < b_3 with the
nonlocal ray conditions u(b_1) + alpha*u(b_2) = 0, u(b_3) + beta*u(b_2) = 0
(b_2 the middle ray) gives a lambda-dependent two-point problem

    -U'' + lambda^2 U = 0  on (b_1, b_3),

whose eigenvalues are the zeros of a 2x2 determinant over the fundamental
system {exp(lambda*phi), exp(-lambda*phi)}.  The determinant factorizes as
-2*sinh(lambda*d)*(2*cosh(lambda*d) + alpha + beta) with d = (b_3-b_1)/2,
which yields explicit purely imaginary eigenvalue families for
|alpha+beta| < 2.  A horizontal line Im lambda = h free of eigenvalues
certifies unique solvability in the weighted scale with a = h + l + 1.

The module also provides the characteristic determinant of the formally
adjoint nonlocal transmission pencil (piecewise solutions on the two
sub-arcs coupled through the middle ray) and an independent numeric zero
finder based on argument-principle counting.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .core import OutOfRange, PlaneAngleError


class UnsupportedRegime(PlaneAngleError):
    pass


class ContourThroughZero(PlaneAngleError):
    pass


class NoConvergence(PlaneAngleError):
    pass


DEDUPE_TOL = 1e-10


@dataclass(frozen=True)
class PoissonPencilProblem:
    """Nonlocal pencil data: coefficients alpha, beta and opening rays b1 < b3."""

    alpha: float
    beta: float
    b1: float
    b3: float

    def __post_init__(self):
        if not (0.0 < self.b1 < self.b3 < 2.0 * np.pi):
            raise OutOfRange("need 0 < b1 < b3 < 2*pi")

    @property
    def d(self):
        return 0.5 * (self.b3 - self.b1)

    @property
    def b2(self):
        return self.b1 + self.d

    @property
    def opening(self):
        return self.b3 - self.b1

    @property
    def coupling_sum(self):
        return self.alpha + self.beta


@dataclass(frozen=True)
class EigenvalueSet:
    values: np.ndarray = field(repr=False)
    search_window: tuple
    method: str

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex).ravel()
        order = np.lexsort((vals.real, vals.imag))
        object.__setattr__(self, "values", vals[order])


def _column_scales(lam, phi_max):
    """Per-column damping factors keeping |exp(+-lam*phi)| <= 1 on [0, phi_max]."""
    re = lam.real if isinstance(lam, complex) else np.real(lam)
    return (-max(re, 0.0) * phi_max, -max(-re, 0.0) * phi_max)


def lambda_zero_determinant(p):
    """Determinant of the nonlocal conditions in the degenerate basis {1, phi}."""
    a, b = p.alpha, p.beta
    return (1.0 + a) * (p.b3 + b * p.b2) - (1.0 + b) * (p.b1 + a * p.b2)


def characteristic_value(p, lam, scaled=True):
    """Characteristic determinant of the pencil at lambda.

    For lambda != 0 this is the 2x2 determinant of the two nonlocal
    conditions applied to {exp(lambda*phi), exp(-lambda*phi)}; its zeros are
    exactly the pencil eigenvalues (lambda = 0 is a spurious zero of this
    basis and is handled by the degenerate basis {1, phi}).

    With scaled=True each basis column is damped by exp(-|Re lambda|*b3) so
    the value never overflows; zeros are unchanged.
    """
    lam = complex(lam)
    if lam == 0:
        return complex(lambda_zero_determinant(p))
    a, b = p.alpha, p.beta
    b1, b2, b3 = p.b1, p.b2, p.b3
    s1, s2 = _column_scales(lam, b3) if scaled else (0.0, 0.0)
    # rows: condition at b1 (alpha-coupled), condition at b3 (beta-coupled)
    m11 = np.exp(lam * b1 + s1) + a * np.exp(lam * b2 + s1)
    m12 = np.exp(-lam * b1 + s2) + a * np.exp(-lam * b2 + s2)
    m21 = np.exp(lam * b3 + s1) + b * np.exp(lam * b2 + s1)
    m22 = np.exp(-lam * b3 + s2) + b * np.exp(-lam * b2 + s2)
    return m11 * m22 - m12 * m21


def adjoint_transmission_characteristic(p, lam, scaled=True):
    """Characteristic determinant of the adjoint nonlocal transmission pencil.

    Piecewise solutions V1 on (b1, b2) and V2 on (b2, b3), each spanned by
    {exp(lambda*phi), exp(-lambda*phi)}, subject to

        V1(b1) = 0,
        V2(b3) = 0,
        V1(b2) - V2(b2) = 0,
        V1'(b2) - V2'(b2) + alpha*V1'(b1) - beta*V2'(b3) = 0.

    The last row encodes the transmission condition written with normal
    derivatives (1/r) d/dphi on the first two rays and -(1/r) d/dphi on the
    third, which flips the sign of the beta term.  Zeros of this determinant
    are the conjugates of the primal pencil eigenvalues.
    """
    lam = complex(lam)
    a, b = p.alpha, p.beta
    b1, b2, b3 = p.b1, p.b2, p.b3
    if lam == 0:
        # degenerate piecewise basis {1, phi} on each sub-arc
        m = np.array(
            [
                [1.0, b1, 0.0, 0.0],
                [0.0, 0.0, 1.0, b3],
                [1.0, b2, -1.0, -b2],
                [0.0, 1.0 + a, 0.0, -1.0 - b],
            ]
        )
        return complex(np.linalg.det(m))
    s1, s2 = _column_scales(lam, b3) if scaled else (0.0, 0.0)

    def ep(phi):
        return np.exp(lam * phi + s1)

    def em(phi):
        return np.exp(-lam * phi + s2)

    m = np.array(
        [
            [ep(b1), em(b1), 0.0, 0.0],
            [0.0, 0.0, ep(b3), em(b3)],
            [ep(b2), em(b2), -ep(b2), -em(b2)],
            [
                lam * (ep(b2) + a * ep(b1)),
                -lam * (em(b2) + a * em(b1)),
                -lam * (ep(b2) + b * ep(b3)),
                lam * (em(b2) + b * em(b3)),
            ],
        ],
        dtype=complex,
    )
    return complex(np.linalg.det(m))


def _progression_in(lo, hi, offset, step, exclude_zero=False):
    """Values offset + step*k inside [lo, hi]; optionally drop the value 0."""
    k_lo = int(np.ceil((lo - offset) / step - 1e-12))
    k_hi = int(np.floor((hi - offset) / step + 1e-12))
    vals = [offset + step * k for k in range(k_lo, k_hi + 1)]
    if exclude_zero:
        vals = [v for v in vals if abs(v) > 1e-14]
    return vals


def _closed_form_imag_parts(p, lo, hi):
    """Imaginary parts of all closed-form eigenvalues with Im lambda in [lo, hi]."""
    s = p.coupling_sum
    if abs(s) >= 2.0:
        raise UnsupportedRegime(
            "closed-form eigenvalues need |alpha+beta| < 2, got %g" % s
        )
    L = p.opening
    if s == 0.0:
        return _progression_in(lo, hi, 0.0, np.pi / L, exclude_zero=True)
    parts = _progression_in(lo, hi, 0.0, 2.0 * np.pi / L, exclude_zero=True)
    t = 2.0 * np.arctan(np.sqrt(4.0 - s * s) / s)  # sign follows sign of s
    if s > 0.0:
        bases = (2.0 * np.pi + t, 2.0 * np.pi - t)
    else:
        bases = (t, -t)
    for base in bases:
        parts.extend(_progression_in(lo, hi, base / L, 4.0 * np.pi / L))
    return parts


def _dedupe(values, tol=DEDUPE_TOL):
    out = []
    for v in sorted(values, key=lambda z: (z.imag, z.real)):
        if not any(abs(v - w) <= tol for w in out):
            out.append(v)
    return out


def eigenvalues_closed_form(p, strip):
    """All eigenvalues with Im lambda in strip = (h_lo, h_hi), |alpha+beta| < 2.

    For alpha+beta = 0 the eigenvalues are i*pi*k/(b3-b1), k != 0.  For
    0 < |alpha+beta| < 2 they are i*2*pi*k/(b3-b1) (k != 0) together with
    the arctan family shifted by i*4*pi*p/(b3-b1), the branch offset
    depending on the sign of alpha+beta.
    """
    lo, hi = float(strip[0]), float(strip[1])
    parts = _closed_form_imag_parts(p, lo, hi)
    vals = _dedupe([1j * h for h in parts])
    return EigenvalueSet(np.array(vals, dtype=complex), (0.0, 0.0, lo, hi), "closed_form")


# ---------------------------------------------------------------------------
# argument-principle zero finding


def _rect_contour(rect, n_per_edge):
    re_lo, re_hi, im_lo, im_hi = rect
    corners = [
        re_lo + 1j * im_lo,
        re_hi + 1j * im_lo,
        re_hi + 1j * im_hi,
        re_lo + 1j * im_hi,
    ]
    pts = []
    for k in range(4):
        a, b = corners[k], corners[(k + 1) % 4]
        t = np.arange(n_per_edge) / n_per_edge
        pts.append(a + (b - a) * t)
    return np.concatenate(pts)


def _winding_number(f, rect, n_start=64, n_max=8192):
    """Winding number of f around the rectangle, with adaptive refinement.

    The point count per edge is doubled until every phase step between
    consecutive samples is small and the accumulated winding lies within
    0.25 of an integer.  ContourThroughZero if a contour value is
    negligibly small or the winding never settles.
    """
    n = n_start
    prev = None
    while True:
        z = _rect_contour(rect, n)
        vals = np.array([f(zz) for zz in z])
        scale = float(np.max(np.abs(vals)))
        if scale == 0.0 or np.min(np.abs(vals)) < 1e-12 * scale:
            raise ContourThroughZero("characteristic value vanishes on contour")
        steps = np.angle(np.roll(vals, -1) / vals)
        w = float(np.sum(steps)) / (2.0 * np.pi)
        near = round(w)
        # a phase step of nearly pi that survives refinement is the signature
        # of a zero sitting on the contour; such a zero contributes a half
        # winding to each neighboring cell and would corrupt the count
        if abs(w - near) < 0.25 and np.max(np.abs(steps)) < 3.0:
            if np.max(np.abs(steps)) < 1.2 or prev == near:
                return near, scale
            prev = near
        else:
            prev = None
        if n >= n_max:
            raise ContourThroughZero("winding number did not stabilize")
        n *= 2


def _newton_polish(f, z0, scale, max_iter=50):
    z = z0
    for _ in range(max_iter):
        fz = f(z)
        if abs(fz) < 1e-12 * scale:
            return z
        h = 1e-7 * (1.0 + abs(z))
        dfz = (f(z + h) - f(z - h)) / (2.0 * h)
        if dfz == 0:
            break
        step = fz / dfz
        z = z - step
        if abs(step) < 1e-14 * (1.0 + abs(z)):
            fz = f(z)
            if abs(fz) < 1e-12 * scale:
                return z
    fz = f(z)
    if abs(fz) < 1e-12 * scale:
        return z
    raise NoConvergence("Newton polish failed near %s" % z0)


def _winding_nudged(f, rect, max_tries=8):
    """Winding number with the rectangle nudged outward away from zeros.

    The nudge grows geometrically: a zero sitting exactly on the contour
    must end up farther from the expanded contour than the sample spacing
    before the phase steps become unambiguous.  The total expansion stays
    below 3e-3 per side; any zero pulled in from just outside is discarded
    by the caller's final window filter.
    """
    for k in range(max_tries):
        try:
            w, scale = _winding_number(f, rect)
            return w, scale, rect
        except ContourThroughZero:
            eps = 1.25e-7 * 4.0**k
            re_lo, re_hi, im_lo, im_hi = rect
            rect = (re_lo - eps, re_hi + eps, im_lo - eps, im_hi + eps)
    raise ContourThroughZero(
        "contour still passes through a zero after %d nudges" % max_tries
    )


def _line_minimum(f, c, other_lo, other_hi, vertical):
    """Approximate minimum of |f| along one candidate split line.

    Coarse sampling alone can miss a zero sitting between samples, so the
    smallest sample is refined by a bounded scalar minimization.
    """
    t = np.linspace(other_lo, other_hi, 129)
    pts = c + 1j * t if vertical else t + 1j * c
    vals = np.abs(np.array([f(z) for z in pts]))
    k = int(np.argmin(vals))
    a, b = t[max(k - 1, 0)], t[min(k + 1, len(t) - 1)]
    if vertical:
        g = lambda s: abs(f(complex(c, s)))
    else:
        g = lambda s: abs(f(complex(s, c)))
    res = minimize_scalar(g, bounds=(a, b), method="bounded")
    return min(float(vals[k]), float(res.fun))


def _choose_split(f, lo, hi, other_lo, other_hi, vertical, scale):
    """Split coordinate in (lo, hi) whose grid line stays away from zeros.

    A split line passing through a zero makes that zero contribute half a
    winding to each child cell, so candidates are rejected unless |f| stays
    well away from zero along the whole line.
    """
    best, best_min = None, -1.0
    for frac in (0.5, 0.55, 0.45, 0.6, 0.4, 0.52, 0.48, 0.65, 0.35):
        c = lo + frac * (hi - lo)
        m = _line_minimum(f, c, other_lo, other_hi, vertical)
        if m > 1e-3 * scale:
            return c
        if m > best_min:
            best, best_min = c, m
    return best


def find_zeros(f, window, min_cell=1e-4):
    """All zeros of the analytic function f inside the complex rectangle.

    window = (re_lo, re_hi, im_lo, im_hi).  Rectangles are subdivided by
    argument-principle counting until each holds at most one zero (or is
    smaller than min_cell), then zeros are polished by Newton iteration.
    Split lines are placed where |f| stays away from zero so that zeros on
    symmetric positions are not lost on cell boundaries.
    """
    window = tuple(float(x) for x in window)
    roots = []
    stack = [window]
    while stack:
        rect = stack.pop()
        w, scale, rect = _winding_nudged(f, rect)
        if w == 0:
            continue
        re_lo, re_hi, im_lo, im_hi = rect
        width, height = re_hi - re_lo, im_hi - im_lo
        if w == 1 or max(width, height) < min_cell:
            z0 = complex(0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi))
            try:
                z = _newton_polish(f, z0, scale)
            except NoConvergence:
                # e.g. an oscillating Newton cycle around a symmetry point;
                # a smaller cell starts the iteration closer to the root
                if max(width, height) < min_cell:
                    raise
                z = None
            if z is not None:
                # tight tolerance: a root accepted here must lie in this
                # cell, otherwise a duplicate of a neighboring root would
                # mask the real one under deduplication
                pad = 1e-7
                escaped = not (
                    re_lo - pad <= z.real <= re_hi + pad
                    and im_lo - pad <= z.imag <= im_hi + pad
                )
                if escaped and max(width, height) >= min_cell:
                    pass  # Newton left the cell: fall through and subdivide
                else:
                    roots.append(z)
                    continue
        if width >= height:
            mid = _choose_split(f, re_lo, re_hi, im_lo, im_hi, True, scale)
            stack.append((re_lo, mid, im_lo, im_hi))
            stack.append((mid, re_hi, im_lo, im_hi))
        else:
            mid = _choose_split(f, im_lo, im_hi, re_lo, re_hi, False, scale)
            stack.append((re_lo, re_hi, im_lo, mid))
            stack.append((re_lo, re_hi, mid, im_hi))
    inside = [
        z
        for z in roots
        if window[0] - 1e-9 <= z.real <= window[1] + 1e-9
        and window[2] - 1e-9 <= z.imag <= window[3] + 1e-9
    ]
    return _dedupe(inside)


def eigenvalues_numeric(p, window):
    """Pencil eigenvalues inside the window, found without the closed forms.

    Zeros of the characteristic determinant are located by recursive
    argument-principle counting and polished by Newton iteration.  A zero at
    lambda = 0 is spurious (the exponential basis degenerates there) and is
    kept only if the degenerate-basis determinant also vanishes.
    """

    def f(lam):
        return characteristic_value(p, lam)

    roots = find_zeros(f, window)
    kept = []
    scale0 = 1.0 + abs(p.alpha) + abs(p.beta) + p.b3
    for z in roots:
        if abs(z) < 1e-6 and abs(lambda_zero_determinant(p)) > 1e-12 * scale0:
            continue
        kept.append(z)
    return EigenvalueSet(np.array(kept, dtype=complex), tuple(window), "numeric")


def adjoint_eigenvalues_numeric(p, window):
    """Zeros of the adjoint transmission determinant inside the window."""

    def f(lam):
        return adjoint_transmission_characteristic(p, lam)

    roots = find_zeros(f, window)
    kept = []
    for z in roots:
        if abs(z) < 1e-6 and abs(adjoint_transmission_characteristic(p, 0.0)) > 1e-12:
            continue
        kept.append(z)
    return EigenvalueSet(np.array(kept, dtype=complex), tuple(window), "numeric")


# ---------------------------------------------------------------------------
# solvability certificates


@dataclass(frozen=True)
class LineCertificate:
    """Whether the line Im lambda = h misses the eigenvalue set."""

    line: float
    free: bool
    nearest_eigenvalue: complex
    distance: float

    def __bool__(self):
        return self.free


def line_is_eigenvalue_free(p, h, tol=1e-9):
    """Certify that Im lambda = h contains no closed-form eigenvalue."""
    h = float(h)
    margin = 4.0 * np.pi / p.opening + 1.0
    parts = _closed_form_imag_parts(p, h - margin, h + margin)
    parts = sorted(parts, key=lambda v: abs(v - h))
    nearest = parts[0]
    dist = abs(nearest - h)
    return LineCertificate(h, dist > tol, 1j * nearest, dist)


@dataclass(frozen=True)
class SolvabilityReport:
    weight: float
    smoothness: float
    line: float
    solvable: bool
    certificate: LineCertificate
    message: str


def solvability_report(p, a, l):
    """Unique-solvability certificate in the weighted scale (a, l).

    The pencil line for the second-order problem is Im lambda = a - l - 1;
    the problem is uniquely solvable in the scale iff that line is free of
    eigenvalues.  In particular a = 1 + l always certifies solvability for
    |alpha+beta| < 2.
    """
    h = float(a) - float(l) - 1.0
    cert = line_is_eigenvalue_free(p, h)
    if cert.free:
        msg = (
            "uniquely solvable in the weighted scale (a=%g, l=%g): line "
            "Im lambda = %g is eigenvalue-free (nearest eigenvalue %s at "
            "distance %.3e)" % (a, l, h, cert.nearest_eigenvalue, cert.distance)
        )
    else:
        msg = "blocked: eigenvalue %s lies on the line Im lambda = %g" % (
            cert.nearest_eigenvalue,
            h,
        )
    return SolvabilityReport(float(a), float(l), h, cert.free, cert, msg)
