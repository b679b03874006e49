"""Route selection policies and their weight constructions."""

import numpy as np
import pytest

from bufferlane import bundled_scenario, scenario as scn
from bufferlane.errors import UnreachableDestination
from bufferlane.junctions import DemandMode
from bufferlane.routing import (
    RoutePolicy,
    aggregated_weights,
    dijkstra,
    fastest_path,
    fixed_path_chooser,
    online_chooser,
    online_weights,
    shortest_path,
)
from bufferlane.run import plan_route
from bufferlane.solver import simulate
from bufferlane.tracker import TrackerKind, track_car


@pytest.fixture(scope="module")
def small_log():
    """The two-route network simulated once at a coarse grid."""
    doc = scn.parse_scenario(bundled_scenario("small_network"))
    net = scn.build_network(doc, target_h=0.05)
    return simulate(net, scn.build_initial(doc), 15.0,
                    mode=DemandMode.STANDARD)


class TestDijkstra:
    def test_shortest_route(self, small_log):
        net = small_log.network
        path, dist = shortest_path(net, "n2", "n6")
        assert path == ["e2", "e4", "e7"]
        assert dist == pytest.approx(3.0)

    def test_tie_breaks_lexicographically(self, small_log):
        # both routes have equal weight; the e2 branch wins by edge ids
        net = small_log.network
        weights = {eid: 1.0 for eid in net.edges}
        path, dist = dijkstra(net, weights, "n2", "n6")
        assert path == ["e2", "e4", "e7"]
        assert dist == pytest.approx(3.0)

    def test_source_equals_destination(self, small_log):
        assert dijkstra(small_log.network, {}, "n2", "n2") == ([], 0.0)

    def test_unreachable(self, small_log):
        with pytest.raises(UnreachableDestination):
            shortest_path(small_log.network, "n6", "n1")


class TestWeights:
    def test_aggregated_scale_linear_in_w(self, small_log):
        w1 = aggregated_weights(small_log, 1.0, 0.0)
        w2 = aggregated_weights(small_log, 2.0, 0.0)
        for eid in w1:
            assert w2[eid] == pytest.approx(2.0 * w1[eid])

    def test_aggregated_nonnegative_and_bounded(self, small_log):
        w = aggregated_weights(small_log, 0.5, 0.5)
        for eid, val in w.items():
            assert 0.0 <= val

    def test_density_term_tracks_mean_density(self, small_log):
        # with w_r = 0, the weight is mean density x relative length
        w = aggregated_weights(small_log, 1.0, 0.0)
        log = small_log
        e = log.network.edges["e7"]
        mean_rho = log.rho["e7"].mean()
        expect = mean_rho * e.length / 1.0 * (log.steps + 1) * log.tau / log.T
        assert w["e7"] == pytest.approx(expect, rel=1e-12)

    def test_online_snapshot_uses_single_step(self, small_log):
        w0 = online_weights(small_log, 0, 0.5, 0.5)
        wl = online_weights(small_log, small_log.steps, 0.5, 0.5)
        assert w0 != wl
        # the full buffer at n4 dominates the weight of its outgoing edges
        assert w0["e5"] > w0["e4"]

    def test_buffer_term_charged_on_leaving_edge(self, small_log):
        w = online_weights(small_log, 0, 0.0, 1.0)
        # r(n4) = 0.5 normalized by the interior r_max = 0.5
        assert w["e5"] == pytest.approx(1.0)
        assert w["e6"] == pytest.approx(1.0)
        assert w["e4"] == pytest.approx(0.0)


class TestFastestPath:
    def test_prefers_undelayed_route_at_departure_zero(self, small_log):
        tracker_event = (0, 0.0)
        path, arrival = fastest_path(small_log, "n2", tracker_event, "n6",
                                     TrackerKind.COMPLEX)
        assert path == ["e2", "e4", "e7"]
        # predicted arrival matches the tracked car on the same route
        car = track_car(small_log, "e1", 1.0, 0.0, "n6",
                        choose_next=fixed_path_chooser(
                            small_log.network, ["e1"] + path))
        assert arrival <= car.arrival_time + 1e-9

    def test_plan_route_policies(self, small_log):
        route, _ = plan_route(small_log, RoutePolicy.SHORTEST, "e1", 0.0,
                              0.0, "n6", TrackerKind.COMPLEX)
        assert route == ["e1", "e2", "e4", "e7"]
        route, arrival = plan_route(small_log, RoutePolicy.FASTEST, "e1",
                                    0.0, 0.0, "n6", TrackerKind.COMPLEX)
        assert route[0] == "e1" and route[-1] == "e7"
        assert arrival is not None
        route, _ = plan_route(small_log, RoutePolicy.ONLINE, "e1", 0.0,
                              0.0, "n6", TrackerKind.COMPLEX)
        assert route is None  # decided junction by junction


class TestChoosers:
    def test_fixed_path_chooser(self, small_log):
        choose = fixed_path_chooser(small_log.network, ["e1", "e3", "e5", "e7"])
        assert choose("n2", 0, 0.0) == "e3"
        with pytest.raises(UnreachableDestination):
            choose("n3", 0, 0.0)

    def test_online_chooser_returns_outgoing_edge(self, small_log):
        choose = online_chooser(small_log, "n6", 0.5, 0.5)
        eid = choose("n2", 10, 0.0)
        assert small_log.network.edges[eid].source == "n2"

    def test_online_car_reaches_destination(self, small_log):
        car = track_car(small_log, "e1", 0.5, 0.0, "n6",
                        choose_next=online_chooser(small_log, "n6", 0.5, 0.5))
        assert car.status.value == "arrived"
        assert car.path[-1] == "e7"
