"""Discrete weighted Sobolev norms on annular sector grids.

Two weighted scales are evaluated on grid functions.  The E-scale integrand
is sum_{|alpha| <= l} r^(2a) (r^(2(|alpha|-l)) + 1) |D^alpha u|^2 and the
H-scale weight is r^(2(a-l+|alpha|)), with D^alpha the Cartesian derivatives
assembled from central differences of the polar representation.  A trace
ratio probes boundedness of the weighted trace inequality along a boundary
ray; the trace-space norm proper is an infimum over extensions and is not
computed, the extension's own volume norm stands in for it.

Quadrature is midpoint over grid cells with polar area weight r dr dphi, so
the integral of a nodal-constant integrand is exact.
"""

from dataclasses import dataclass

import numpy as np

from .core import GridFunction, PlaneAngleError


class UnsupportedOrder(PlaneAngleError):
    pass


@dataclass(frozen=True)
class WeightParams:
    """Weight exponent a and smoothness order l (l in {0, 1, 2})."""

    a: float
    l: int

    def __post_init__(self):
        if self.l not in (0, 1, 2):
            raise UnsupportedOrder("smoothness order l=%r not in {0, 1, 2}" % (self.l,))


def _polar_gradient(grid, vals):
    """(d/dr, d/dphi) by second-order differences (central inside, one-sided at edges)."""
    du_dr = np.gradient(vals, grid.dr, axis=0, edge_order=2)
    du_dphi = np.gradient(vals, grid.dphi, axis=1, edge_order=2)
    return du_dr, du_dphi


def _cartesian_gradient(grid, vals):
    """(u_x, u_y) at the nodes via the polar chain rule."""
    r, phi = grid.meshgrid()
    u_r, u_phi = _polar_gradient(grid, vals)
    u_x = np.cos(phi) * u_r - np.sin(phi) / r * u_phi
    u_y = np.sin(phi) * u_r + np.cos(phi) / r * u_phi
    return u_x, u_y

def cartesian_derivatives(u, l):
    """Nodal arrays of D^alpha u keyed by multi-index, all |alpha| <= l."""
    grid = u.grid
    out = {(0, 0): u.values}
    if l >= 1:
        u_x, u_y = _cartesian_gradient(grid, u.values)
        out[(1, 0)] = u_x
        out[(0, 1)] = u_y
    if l >= 2:
        u_xx, u_xy = _cartesian_gradient(grid, out[(1, 0)])
        _, u_yy = _cartesian_gradient(grid, out[(0, 1)])
        out[(2, 0)] = u_xx
        out[(1, 1)] = u_xy
        out[(0, 2)] = u_yy
    return out


def _cell_integral(grid, nodal):
    """Midpoint-cell quadrature sum of a nodal integrand with weight r dr dphi."""
    cell = 0.25 * (nodal[:-1, :-1] + nodal[1:, :-1] + nodal[:-1, 1:] + nodal[1:, 1:])
    r_mid = 0.5 * (grid.r_nodes[:-1] + grid.r_nodes[1:])
    return float(np.real(np.sum(cell * r_mid[:, None]) * grid.dr * grid.dphi))


def e_norm(u, p):
    """Weighted norm with integrand sum r^(2a) (r^(2(|alpha|-l)) + 1) |D^alpha u|^2."""
    grid = u.grid
    r, _ = grid.meshgrid()
    derivs = cartesian_derivatives(u, p.l)
    integrand = np.zeros(r.shape)
    for (i, j), d in derivs.items():
        k = i + j
        integrand += r ** (2 * p.a) * (r ** (2 * (k - p.l)) + 1.0) * np.abs(d) ** 2
    return np.sqrt(_cell_integral(grid, integrand))


def h_norm(u, p):
    """Weighted norm with weight r^(2(a - l + |alpha|)) on each derivative term."""
    grid = u.grid
    r, _ = grid.meshgrid()
    derivs = cartesian_derivatives(u, p.l)
    integrand = np.zeros(r.shape)
    for (i, j), d in derivs.items():
        k = i + j
        integrand += r ** (2 * (p.a - p.l + k)) * np.abs(d) ** 2
    return np.sqrt(_cell_integral(grid, integrand))


def trace_integral(u, ray, p):
    """Discrete weighted trace integral (int r^(2(a-(l-1/2))) |u|^2 dr)^(1/2).

    ray is "gamma1" (first boundary ray) or "gamma3" (last).
    """
    if p.l not in (1, 2):
        raise UnsupportedOrder("trace integral needs l in {1, 2}")
    grid = u.grid
    if ray == "gamma1":
        psi = u.values[:, 0]
    elif ray == "gamma3":
        psi = u.values[:, -1]
    else:
        raise PlaneAngleError("ray must be 'gamma1' or 'gamma3', got %r" % (ray,))
    r = grid.r_nodes
    nodal = r ** (2 * (p.a - (p.l - 0.5))) * np.abs(psi) ** 2
    cell = 0.5 * (nodal[:-1] + nodal[1:])
    return float(np.sqrt(np.real(np.sum(cell)) * grid.dr))


def trace_ratio(u, ray, p):
    """Trace integral along the ray divided by e_norm(u); 0 for u identically 0.

    A boundedness probe for the weighted trace inequality: the ratio should
    stay below a single constant across families of test functions.
    """
    denom = e_norm(u, p)
    if denom == 0.0:
        return 0.0
    return trace_integral(u, ray, p) / denom
