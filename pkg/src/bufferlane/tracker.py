"""Single-car trajectory integration through the discrete density field.

Two trackers are provided: a plain Euler step at the speed of the
containing cell (naive) and a piecewise-exact step that resolves the one
wave that can reach the car within a time step (complex).  Both consume an
immutable SimLog; the car never feeds back into the field.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    HorizonExceeded,
    NotARarefaction,
    NotAShock,
    UnreachableDestination,
    ZeroSpeedAtBoundary,
)
from .fluxes import flux, flux_derivative, velocity

_ARRIVAL_TOL = 1e-14
_WAIT_TOL = 1e-15


class TrackerKind(Enum):
    NAIVE = "naive"
    COMPLEX = "complex"


class CarStatus(Enum):
    DRIVING = "driving"
    WAITING = "waiting"
    ARRIVED = "arrived"
    HORIZON_EXCEEDED = "horizon_exceeded"


@dataclass
class CarLog:
    """Trajectory samples plus per-edge travel and per-node waiting times."""

    samples: list = field(default_factory=list)  # (t, edge, x, distance, status)
    grid_t: list = field(default_factory=list)
    grid_pos: list = field(default_factory=list)  # cumulative distance at t^n
    travel_times: list = field(default_factory=list)  # (edge, t_start, tt)
    waiting_times: list = field(default_factory=list)  # (node, t_arrival, wt)
    path: list = field(default_factory=list)
    arrival_time: float = math.nan
    status: CarStatus = CarStatus.DRIVING

    @property
    def total_waiting(self):
        return sum(w for _, _, w in self.waiting_times)


def naive_step(x, cells, h, tau):
    """Euler step at the speed of the Godunov cell containing x."""
    i = min(int(x / h), len(cells) - 1)
    return x + tau * velocity(cells[i])


def shock_intersection(x, x_i, rho_minus, rho_plus):
    """Hit point (tau_bar, x_bar) of the car with a shock starting at x_i."""
    if rho_minus >= rho_plus:
        raise NotAShock(f"{rho_minus} >= {rho_plus}")
    lam = (flux(rho_plus) - flux(rho_minus)) / (rho_plus - rho_minus)
    tau_bar = (x_i - x) / (velocity(rho_minus) - lam)
    return tau_bar, x + velocity(rho_minus) * tau_bar


def rarefaction_exit(tau_bar, x_bar, x_i, rho_plus):
    """Exit point (tau2, x2) of the fan entered at (tau_bar, x_bar).

    Returns None when rho_plus = 0: the downstream front then moves at the
    free-flow speed and the car can never overtake it.
    """
    if tau_bar <= 0.0:
        raise NotARarefaction(f"tau_bar {tau_bar} must be positive")
    if rho_plus == 0.0:
        return None
    coeff = (tau_bar + x_i - x_bar) / math.sqrt(tau_bar)
    tau2 = (coeff / (1.0 - flux_derivative(rho_plus))) ** 2
    return tau2, x_i + flux_derivative(rho_plus) * tau2


def _fan_position(x_i, t, tau_bar, x_bar):
    """In-fan trajectory t -> x relative to a wave origin (0, x_i)."""
    coeff = (tau_bar + x_i - x_bar) / math.sqrt(tau_bar)
    return x_i + t - math.sqrt(t) * coeff


def complex_step(x, cells, h, tau):
    """Piecewise-exact step through at most one wave.

    The car at x lies in a shifted cell; only the wave starting at the
    grid point ahead of it (behind the half-cell split) can reach the car
    within tau, so the step resolves that single Riemann fan or shock.
    """
    n_cells = len(cells)
    i = int(math.floor(x / h + 0.5))
    if x < i * h:  # first half: wave origin x_i between cells i-1 and i
        origin = i * h
        rm = cells[i - 1]
        rp = cells[i] if i < n_cells else rm
    else:  # second half: wave origin x_{i+1}
        origin = (i + 1) * h
        rm = cells[i] if i < n_cells else cells[-1]
        rp = cells[i + 1] if i + 1 < n_cells else rm
    if rm == rp:
        return x + tau * velocity(rm)
    if rm < rp:  # shock
        tau_bar, x_bar = shock_intersection(x, origin, rm, rp)
        if tau_bar >= tau:
            return x + tau * velocity(rm)
        return x_bar + velocity(rp) * (tau - tau_bar)
    # rarefaction: left front moves at f'(rm)
    lam = flux_derivative(rm)
    tau_bar = (origin - x) / (velocity(rm) - lam)
    if tau_bar >= tau:
        return x + tau * velocity(rm)
    x_bar = x + velocity(rm) * tau_bar
    exit_point = rarefaction_exit(tau_bar, x_bar, origin, rp)
    if exit_point is None or exit_point[0] >= tau:
        return _fan_position(origin, tau, tau_bar, x_bar)
    tau2, x2 = exit_point
    return x2 + velocity(rp) * (tau - tau2)


def end_of_road_time(x, rho_last, b):
    """Fraction of a step to reach the road end at the last-cell speed."""
    v = velocity(rho_last)
    if v <= 0.0:
        raise ZeroSpeedAtBoundary(f"v({rho_last}) = 0 at x={x}")
    return max((b - x) / v, 0.0)


def node_waiting(log, node, n_hat, tau_hat):
    """FIFO waiting at a node for an arrival at t^n_hat + tau_hat.

    Returns (wt, m, frac): the car enters the next road during step m, at
    time t^m + frac.  The buffer load at arrival is linearly interpolated;
    the load ahead of the car is then drained by the recorded per-step
    node outflows.
    """
    tau = log.tau
    f_in = log.node_inflow[node][n_hat]
    f_out = log.node_outflow[node][n_hat]
    r_hat = log.buffers[node][n_hat] + tau_hat * (f_in - f_out)
    if r_hat <= _WAIT_TOL:
        return 0.0, n_hat, tau_hat
    need = r_hat
    n = n_hat
    offset = tau_hat
    while True:
        fo = log.node_outflow[node][n]
        avail = (tau - offset) * fo
        if need < avail - _WAIT_TOL:
            frac = offset + need / fo
            wt = (n - n_hat) * tau + frac - tau_hat
            return wt, n, frac
        need -= avail
        n += 1
        if need <= _WAIT_TOL:
            return (n - n_hat) * tau - tau_hat, n, 0.0
        if n >= log.steps:
            raise HorizonExceeded(
                f"buffer at node {node} does not drain before T")
        offset = 0.0


class Tracker:
    """Tracks one car through a recorded simulation."""

    def __init__(self, log, kind=TrackerKind.COMPLEX):
        self.log = log
        self.kind = TrackerKind(kind)
        h_min = min(e.h for e in log.network.edges.values())
        if log.tau > 0.5 * h_min + 1e-12:
            raise ValueError(f"tau {log.tau} violates tau <= h/2 bound")

    def _step(self, x, cells, h, tau):
        if self.kind is TrackerKind.NAIVE:
            return naive_step(x, cells, h, tau)
        return complex_step(x, cells, h, tau)

    def _traverse_edge(self, edge, n, x, car, cum):
        """Advance full steps until the edge end is crossed.

        Returns (n_hat, tau_hat); records grid samples along the way.
        """
        log = self.log
        tau = log.tau
        rho_hist = log.rho[edge.id]
        b = edge.length
        while True:
            if x >= b - _ARRIVAL_TOL:
                n_hat, tau_hat = n, 0.0
                break
            if n >= log.steps:
                raise HorizonExceeded(
                    f"car still on edge {edge.id} at the time horizon")
            cells = rho_hist[n]
            x_new = self._step(x, cells, edge.h, tau)
            if x_new >= b - _ARRIVAL_TOL:
                n_hat = n
                tau_hat = min(end_of_road_time(x, cells[-1], b), tau)
                break
            n += 1
            x = x_new
            self._sample(car, n * tau, edge.id, x, cum + x, CarStatus.DRIVING,
                         grid=True)
        return n_hat, tau_hat

    def _sample(self, car, t, edge_id, x, dist, status, grid=False):
        car.samples.append((t, edge_id, x, dist, status.value))
        if grid:
            car.grid_t.append(t)
            car.grid_pos.append(dist)

    def track(self, start_edge, start_x, start_time, destination,
              choose_next=None):
        """Run the car from (edge, x, t) until `destination` or the horizon.

        `choose_next(node_id, n_hat, tau_hat) -> edge_id` resolves the exit
        at dispersing junctions; junctions with a single outgoing road never
        consult it.
        """
        log = self.log
        net = log.network
        tau = log.tau
        car = CarLog()
        n = int(round(start_time / tau))
        if abs(n * tau - start_time) > 1e-9:
            raise ValueError(f"start time {start_time} is not on the time grid")
        edge = net.edges[start_edge]
        x = float(start_x)
        cum = 0.0
        car.path.append(edge.id)
        t_dep = n * tau
        self._sample(car, n * tau, edge.id, x, x, CarStatus.DRIVING, grid=True)
        while True:
            try:
                n_hat, tau_hat = self._traverse_edge(edge, n, x, car, cum)
            except HorizonExceeded:
                car.status = CarStatus.HORIZON_EXCEEDED
                return car
            t_arr = n_hat * tau + tau_hat
            car.travel_times.append((edge.id, t_dep, t_arr - t_dep))
            dist_done = cum + edge.length
            self._sample(car, t_arr, edge.id, edge.length, dist_done,
                         CarStatus.DRIVING)
            node = edge.target
            if node == destination:
                car.arrival_time = t_arr
                car.status = CarStatus.ARRIVED
                return car
            outs = net.out_edges[node]
            if not outs:
                raise UnreachableDestination(
                    f"car reached sink {node}, destination {destination}")
            if len(outs) == 1:
                next_id = outs[0]
            else:
                next_id = choose_next(node, n_hat, tau_hat)
            try:
                wt, m, frac = node_waiting(log, node, n_hat, tau_hat)
            except HorizonExceeded:
                car.status = CarStatus.HORIZON_EXCEEDED
                car.waiting_times.append((node, t_arr, math.nan))
                return car
            car.waiting_times.append((node, t_arr, wt))
            # car sits at the node on every grid time spent waiting
            for k in range(n_hat + 1, m + 1):
                self._sample(car, k * tau, edge.id, edge.length, dist_done,
                             CarStatus.WAITING, grid=True)
            cum = dist_done
            edge = net.edges[next_id]
            car.path.append(next_id)
            if m >= log.steps:
                car.status = CarStatus.HORIZON_EXCEEDED
                return car
            x = (tau - frac) * velocity(log.rho[next_id][m][0])
            t_dep = m * tau + frac
            n = m + 1
            self._sample(car, n * tau, edge.id, x, cum + x, CarStatus.DRIVING,
                         grid=True)


def track_car(log, start_edge, start_x, start_time, destination,
              kind=TrackerKind.COMPLEX, choose_next=None):
    """Convenience wrapper around Tracker.track."""
    return Tracker(log, kind).track(start_edge, start_x, start_time,
                                    destination, choose_next)
