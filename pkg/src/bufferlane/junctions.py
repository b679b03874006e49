"""Junction coupling: boundary fluxes from demand/supply and buffer state.

All functions are pure maps (densities, buffer load, node spec) -> fluxes,
evaluated by the solver once per node per time step.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import BufferOutOfRange, BufferOverflow, BufferUnderflow, NegativeInflow
from .fluxes import demand, flux, supply
from .network import DEMAND_PROPORTIONAL

# emptiness / fullness decided up to round-off
_TOL = 1e-12


class DemandMode(Enum):
    STANDARD = "standard"
    POOLED = "pooled"


@dataclass(frozen=True)
class NegativityEvent:
    """A buffer driven below zero (possible only in Pooled demand mode)."""

    node: str
    time: float
    load: float


def _check_buffer(r, r_max):
    if r < -_TOL or r > r_max + _TOL:
        raise BufferOutOfRange(f"buffer load {r} outside [0, {r_max}]")


def dynamic_priorities(d1, d2):
    """Demand-proportional right-of-way pair; (0.5, 0.5) when both vanish."""
    total = d1 + d2
    if total <= 0.0:
        return 0.5, 0.5
    return d1 / total, d2 / total


def _resolve_priorities(spec, d1, d2):
    if spec.priority == DEMAND_PROPORTIONAL:
        return dynamic_priorities(d1, d2)
    return spec.priority


def one_to_two_fluxes(rho1_end, rho2_start, rho3_start, r, spec):
    """Dispersing junction: returns (q1_out, q2_in, q3_in)."""
    _check_buffer(r, spec.r_max)
    a2, a3 = spec.alpha
    mu = spec.mu
    d_b = mu if r > _TOL else min(demand(rho1_end), mu)
    q2_in = min(a2 * d_b, supply(rho2_start))
    q3_in = min(a3 * d_b, supply(rho3_start))
    if r < spec.r_max - _TOL:
        s_b = mu
    else:
        s_b = min(supply(rho2_start), a2 * mu) + min(supply(rho3_start), a3 * mu)
    q1_out = min(s_b, demand(rho1_end))
    return q1_out, q2_in, q3_in


def two_to_one_fluxes(rho1_end, rho2_end, rho3_start, r, spec,
                      mode=DemandMode.STANDARD):
    """Merging junction: returns (q1_out, q2_out, q3_in)."""
    if mode is DemandMode.STANDARD:
        _check_buffer(r, spec.r_max)
    d1 = demand(rho1_end)
    d2 = demand(rho2_end)
    c1, c2 = _resolve_priorities(spec, d1, d2)
    mu = spec.mu
    s_b = mu if r < spec.r_max - _TOL else min(supply(rho3_start), mu)
    q1_out = min(c1 * s_b, d1)
    q2_out = min(c2 * s_b, d2)
    if r > _TOL:
        d_b = mu
    elif mode is DemandMode.STANDARD:
        d_b = min(d1, c1 * mu) + min(d2, c2 * mu)
    else:
        d_b = min(d1 + d2, mu)
    q3_in = min(d_b, supply(rho3_start))
    return q1_out, q2_out, q3_in


def one_to_one_fluxes(rho1_end, rho2_start, r, spec):
    """Pass-through junction (alpha = 1 case): returns (q1_out, q2_in)."""
    _check_buffer(r, spec.r_max)
    mu = spec.mu
    d_b = mu if r > _TOL else min(demand(rho1_end), mu)
    q2_in = min(d_b, supply(rho2_start))
    s_b = mu if r < spec.r_max - _TOL else min(supply(rho2_start), mu)
    q1_out = min(s_b, demand(rho1_end))
    return q1_out, q2_in


def source_fluxes(f_in, rho_first, r, mu):
    """Network entry: returns (q_in to the first road, buffer rate)."""
    if f_in < 0.0:
        raise NegativeInflow(f"inflow {f_in} < 0")
    d_b = mu if r > _TOL else min(f_in, mu)
    q_in = min(d_b, supply(rho_first))
    return q_in, f_in - q_in


def sink_flux(rho_last):
    """Absorbing exit condition: waves never reflect at a sink."""
    return flux(rho_last)


def buffer_step(r, inflow_sum, outflow_sum, tau, r_max=np.inf,
                mode=DemandMode.STANDARD, node="", time=0.0):
    """Explicit Euler buffer update; returns (new load, event or None).

    The fluxes are assumed admissible for the load (crossings of 0 / r_max
    already limited), so violations beyond round-off signal a coupling bug
    and raise.  In Pooled mode negative loads are reported as events instead
    of raising, so the known defect of that demand choice is observable.
    """
    new_r = r + tau * (inflow_sum - outflow_sum)
    event = None
    if new_r > r_max + _TOL:
        raise BufferOverflow(f"node {node}: buffer {new_r} > r_max {r_max}")
    if new_r < -_TOL:
        if mode is DemandMode.STANDARD:
            raise BufferUnderflow(f"node {node}: buffer {new_r} < 0")
        event = NegativityEvent(node=node, time=time, load=new_r)
        return new_r, event
    return min(max(new_r, 0.0), r_max), event
