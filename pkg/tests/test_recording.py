"""Recording layer: global view fusion, node spawning, affordances,
frontier extraction, corridor revalidation, and pruning."""

import math

import numpy as np
import pytest

from sgraph import (
    BehaviorKind,
    CellState,
    DoorState,
    GridMap,
    NodeKind,
    Pose2,
    SituationalGraph,
)
from sgraph.recording import (
    GlobalView,
    GraphDelta,
    Recorder,
    RecorderConfig,
    apply_affordances,
    extract_frontiers,
    observe,
    prune_frontiers,
)
from sgraph.world import (
    LocalGrid,
    ObjectDetected,
    PoseUpdate,
    SensorConfig,
    WaypointCommand,
    load_scenario,
)

from helpers import corridor_clear_bruteforce, frontier_clusters_bruteforce

RES = 0.5

DOOR_HALL = """\
resolution: 0.5
name: door-hall

#######
#.....#
#..S..#
#.....#
###D###
#.....#
#.....#
#######
"""

FAR_DOOR = """\
resolution: 0.5

#######
#S....#
#.....#
#.....#
###D###
#.....#
#.....#
#######
"""

DOOR_CLUTTER = """\
resolution: 0.5
container: 5 2
person: 1 3

#######
#.....#
#..S..#
#.....#
###D###
#.....#
#.....#
#######
"""

CORRIDOR = "resolution: 0.5\n\n" + "\n".join([
    "#" * 42,
    "#" + "." * 40 + "#",
    "#" + "." * 20 + "S" + "." * 19 + "#",
    "#" + "." * 40 + "#",
    "#" * 42,
]) + "\n"

SENSOR = SensorConfig(lidar_rays=360, lidar_range=5.0, detector_range=3.0)


def free_patch(x, y, half=5, occupied=(), unknown=()):
    """All-FREE lattice-aligned local grid centered on the cell of (x, y),
    with optional per-cell overrides given in world cell indices."""
    cx = math.floor(x / RES)
    cy = math.floor(y / RES)
    side = 2 * half + 1
    cells = np.full((side, side), CellState.FREE, dtype=np.uint8)
    grid = GridMap(side, side, RES, Pose2((cx - half) * RES, (cy - half) * RES), cells)
    for ix, iy in occupied:
        grid.cells[iy - (cy - half), ix - (cx - half)] = CellState.OCCUPIED
    for ix, iy in unknown:
        grid.cells[iy - (cy - half), ix - (cx - half)] = CellState.UNKNOWN
    return grid


def cycle_events(pose, grid=None, step=0):
    events = [PoseUpdate(step, pose)]
    if grid is not None:
        events.append(LocalGrid(step, grid))
    return events


def fresh(world=None):
    graph = SituationalGraph()
    recorder = Recorder(graph)
    return graph, recorder


def run_cycle(world, graph, recorder, sensor=SENSOR):
    events = world.sense(sensor)
    deltas = observe(graph, recorder, events)
    deltas += apply_affordances(graph, recorder, recorder.current_node)
    deltas += prune_frontiers(graph, recorder.view, recorder)
    return deltas


def unknown_near_oracle(view, x, y, radius=0.5):
    lo_x = math.floor((x - radius) / view.resolution) - 1
    hi_x = math.floor((x + radius) / view.resolution) + 1
    lo_y = math.floor((y - radius) / view.resolution) - 1
    hi_y = math.floor((y + radius) / view.resolution) + 1
    for iy in range(lo_y, hi_y + 1):
        for ix in range(lo_x, hi_x + 1):
            cx = (ix + 0.5) * view.resolution
            cy = (iy + 0.5) * view.resolution
            if (cx - x) ** 2 + (cy - y) ** 2 <= radius * radius + 1e-9:
                if view.state_at(ix, iy) is CellState.UNKNOWN:
                    return True
    return False


def expected_candidates(view, robot, nodes_xy, cfg):
    """Recompute frontier candidates with the brute-force cluster oracle."""
    def state(ix, iy):
        return int(view.cells[iy, ix])

    clusters = frontier_clusters_bruteforce(state, view.width, view.height)
    picked = []
    for group in clusters:
        if len(group) < cfg.frontier_min_cluster:
            continue
        pts = [((ix + view.ox + 0.5) * view.resolution,
                (iy + view.oy + 0.5) * view.resolution) for ix, iy in group]
        mx = sum(p[0] for p in pts) / len(pts)
        my = sum(p[1] for p in pts) / len(pts)
        x, y = min(pts, key=lambda p: ((p[0] - mx) ** 2 + (p[1] - my) ** 2, p[0], p[1]))
        if math.hypot(x - robot.x, y - robot.y) <= cfg.node_spacing:
            continue
        if any(math.hypot(x - nx, y - ny) < cfg.frontier_separation for nx, ny in nodes_xy):
            continue
        picked.append((len(group), x, y))
    picked.sort(key=lambda c: (-c[0], c[1], c[2]))
    return [(x, y) for _, x, y in picked]


def fold_deltas(deltas):
    """Replay deltas into a shadow graph; asserts one revision bump each."""
    nodes: dict = {}
    edges: dict = {}
    revision = None
    for delta in deltas:
        if revision is not None:
            assert delta.revision == revision + 1
        revision = delta.revision
        p = delta.payload
        if delta.kind == "node_added":
            nodes[p["id"]] = {"kind": p["kind"], "pose": p["pose"], "origin": p["origin"]}
        elif delta.kind == "node_removed":
            del nodes[p["id"]]
            for eid in p["edge_ids"]:
                edges.pop(eid, None)
        elif delta.kind == "edge_added":
            for e in p["edges"]:
                edges[e["id"]] = (e["source"], e["target"], e["behavior"],
                                  tuple(e["object_params"]), e["cost"])
        elif delta.kind == "edge_removed":
            for eid in p["ids"]:
                del edges[eid]
        elif delta.kind == "situation_updated":
            nodes[p["id"]]["kind"] = p["kind"]
        else:
            raise AssertionError(f"unexpected delta kind {delta.kind}")
    return nodes, edges, revision


# -- global view ---------------------------------------------------------


def test_view_fuses_and_reports_new_occupied():
    view = GlobalView(RES)
    assert view.update(free_patch(0.25, 0.25)) == []
    assert view.state_at(0, 0) is CellState.FREE
    assert view.state_at(99, 99) is CellState.UNKNOWN

    newly = view.update(free_patch(0.25, 0.25, occupied=[(2, 1), (-3, 0)]))
    assert sorted(newly) == [(-3, 0), (2, 1)]
    assert view.state_at(2, 1) is CellState.OCCUPIED
    # same cells again: already known occupied, nothing new
    assert view.update(free_patch(0.25, 0.25, occupied=[(2, 1), (-3, 0)])) == []
    # latest observation wins
    view.update(free_patch(0.25, 0.25))
    assert view.state_at(2, 1) is CellState.FREE


def test_view_grows_across_negative_indices():
    view = GlobalView(RES)
    view.update(free_patch(-10.25, -7.75, half=2))
    view.update(free_patch(12.25, 9.75, half=2))
    assert view.state_at(math.floor(-10.25 / RES), math.floor(-7.75 / RES)) is CellState.FREE
    assert view.state_at(math.floor(12.25 / RES), math.floor(9.75 / RES)) is CellState.FREE
    assert view.known_cells() == 2 * 25


def test_view_rejects_misaligned_grid():
    view = GlobalView(RES)
    grid = GridMap.empty(3, 3, RES, Pose2(0.1, 0.0))
    with pytest.raises(ValueError):
        view.update(grid)
    with pytest.raises(ValueError):
        view.update(GridMap.empty(3, 3, 0.25, Pose2(0.0, 0.0)))


def test_view_unknown_within_is_inclusive():
    view = GlobalView(RES)
    view.update(free_patch(0.25, 0.25, half=4))
    # center of the patch: everything within 0.5 m is known
    assert not view.unknown_within(0.25, 0.25, 0.5)
    # center of an edge cell: the unknown neighbor center is exactly 0.5 away
    assert view.unknown_within((4 + 0.5) * RES, 0.25, 0.5)


# -- observe: spawning and situations --------------------------------------


def test_first_observe_spawns_initial_node():
    graph, recorder = fresh()
    pose = Pose2(0.25, 0.25)
    deltas = observe(graph, recorder, cycle_events(pose, free_patch(0.25, 0.25)))

    assert [d.kind for d in deltas] == ["node_added", "situation_updated"]
    added = deltas[0].payload
    assert added["origin"] == "initial"
    assert added["kind"] == "waypoint"
    assert added["pose"]["x"] == pose.x and added["pose"]["y"] == pose.y
    assert deltas[0].revision + 1 == deltas[1].revision == graph.revision
    assert recorder.current_node == added["id"]
    assert not graph.nodes[added["id"]].situation.gridmap.all_unknown()


def test_walk_beyond_spacing_spawns_node_with_goto_pair():
    graph, recorder = fresh()
    observe(graph, recorder, cycle_events(Pose2(0.25, 0.25), free_patch(0.25, 0.25)))
    deltas = observe(graph, recorder, cycle_events(Pose2(2.75, 0.25), free_patch(2.75, 0.25)))

    assert [d.kind for d in deltas] == ["node_added", "edge_added", "situation_updated"]
    assert deltas[0].payload["origin"] == "spacing"
    pair = deltas[1].payload["edges"]
    assert len(pair) == 2
    assert {e["behavior"] for e in pair} == {"goTo"}
    assert {(e["source"], e["target"]) for e in pair} == {(1, 2), (2, 1)}
    assert all(e["cost"] == 2.5 for e in pair)


def test_short_walk_spawns_nothing():
    graph, recorder = fresh()
    observe(graph, recorder, cycle_events(Pose2(0.25, 0.25), free_patch(0.25, 0.25)))
    deltas = observe(graph, recorder, cycle_events(Pose2(1.25, 0.25), free_patch(1.25, 0.25)))
    assert [d.kind for d in deltas] == ["situation_updated"]

    # exactly node_spacing away is still not "more than"
    deltas = observe(graph, recorder, cycle_events(Pose2(2.25, 0.25), free_patch(2.25, 0.25)))
    assert [d.kind for d in deltas] == ["situation_updated"]
    assert len(graph.nodes) == 1


def test_stationary_observe_is_silent():
    graph, recorder = fresh()
    observe(graph, recorder, cycle_events(Pose2(0.25, 0.25), free_patch(0.25, 0.25)))
    deltas = observe(graph, recorder, cycle_events(Pose2(0.25, 0.25), free_patch(0.25, 0.25)))
    assert deltas == []


def test_arrival_flips_frontier_to_waypoint():
    graph, recorder = fresh()
    observe(graph, recorder, cycle_events(Pose2(0.25, 0.25), free_patch(0.25, 0.25)))
    frontier = graph.add_node(Pose2(1.75, 0.25), NodeKind.FRONTIER)
    graph.add_edge(1, frontier, BehaviorKind.GOTO, cost=1.5)

    deltas = observe(graph, recorder, cycle_events(Pose2(1.75, 0.25), free_patch(1.75, 0.25)))
    flips = [d for d in deltas if d.kind == "situation_updated" and d.payload["id"] == frontier]
    assert flips and flips[0].payload["kind"] == "waypoint"
    assert graph.nodes[frontier].kind is NodeKind.WAYPOINT
    assert recorder.current_node == frontier


def test_new_wall_invalidates_crossing_goto_edges():
    graph, recorder = fresh()
    observe(graph, recorder, cycle_events(Pose2(0.25, 0.25), free_patch(0.25, 0.25)))
    observe(graph, recorder, cycle_events(Pose2(2.75, 0.25), free_patch(2.75, 0.25)))
    edge_ids = sorted(graph.edges)
    assert len(edge_ids) == 2

    # a wall revealed off to the side leaves the corridor alone
    safe = observe(graph, recorder,
                   cycle_events(Pose2(2.75, 0.25), free_patch(2.75, 0.25, occupied=[(2, 2)])))
    assert corridor_clear_bruteforce([(2, 2)], RES, 0.25, 0.25, 2.75, 0.25, 0.3)
    assert all(d.kind != "edge_removed" for d in safe)

    # a wall on the segment removes the pair in one delta
    hit = observe(graph, recorder,
                  cycle_events(Pose2(2.75, 0.25), free_patch(2.75, 0.25, occupied=[(2, 0)])))
    assert not corridor_clear_bruteforce([(2, 0)], RES, 0.25, 0.25, 2.75, 0.25, 0.3)
    removed = [d for d in hit if d.kind == "edge_removed"]
    assert len(removed) == 1
    assert sorted(removed[0].payload["ids"]) == edge_ids
    assert not graph.edges


# -- affordances: doors -----------------------------------------------------


def test_closed_door_gets_open_door_edge_and_postcondition_node():
    world = load_scenario(DOOR_HALL)
    graph, recorder = fresh()
    observe(graph, recorder, world.sense(SENSOR))
    assert recorder.door_states["o1"] is DoorState.CLOSED

    deltas = apply_affordances(graph, recorder, recorder.current_node)
    assert [d.kind for d in deltas] == ["node_added", "edge_added"]
    post = deltas[0].payload
    assert post["origin"] == "door_postcondition"
    assert post["kind"] == "frontier"
    assert post["pose"]["x"] == pytest.approx(1.75)
    assert post["pose"]["y"] == pytest.approx(0.75)
    (edge,) = deltas[1].payload["edges"]
    assert edge["behavior"] == "openDoor"
    assert edge["source"] == recorder.current_node
    assert edge["target"] == post["id"]
    assert edge["object_params"] == ["o1"]
    assert edge["cost"] == 5.0

    assert apply_affordances(graph, recorder, recorder.current_node) == []


def test_far_door_gets_approach_waypoint():
    world = load_scenario(FAR_DOOR)
    graph, recorder = fresh()
    observe(graph, recorder, world.sense(SENSOR))

    deltas = apply_affordances(graph, recorder, recorder.current_node)
    assert [d.kind for d in deltas] == ["node_added", "edge_added", "node_added", "edge_added"]
    approach = deltas[0].payload
    assert approach["origin"] == "door_approach"
    assert approach["kind"] == "waypoint"
    assert approach["pose"]["x"] == pytest.approx(1.75)
    assert approach["pose"]["y"] == pytest.approx(2.75)
    goto_pair = deltas[1].payload["edges"]
    assert {e["behavior"] for e in goto_pair} == {"goTo"}
    assert {approach["id"], recorder.current_node} == {goto_pair[0]["source"], goto_pair[0]["target"]}
    post = deltas[2].payload
    assert post["origin"] == "door_postcondition"
    (door_edge,) = deltas[3].payload["edges"]
    assert door_edge["source"] == approach["id"]
    assert door_edge["target"] == post["id"]

    assert apply_affordances(graph, recorder, recorder.current_node) == []


def test_door_affordance_skipped_when_far_side_known():
    world = load_scenario(DOOR_HALL)
    graph, recorder = fresh()
    first = world.sense(SENSOR)
    observe(graph, recorder, first)
    detections = [e for e in first if isinstance(e, ObjectDetected)]

    # fabricate knowledge of every cell around the postcondition spot
    far = free_patch(1.75, 0.75, half=2, occupied=[(3, 0)])
    observe(graph, recorder,
            [PoseUpdate(1, world.robot.pose), LocalGrid(1, far)] + detections)

    deltas = apply_affordances(graph, recorder, recorder.current_node)
    assert all(e["behavior"] != "openDoor"
               for d in deltas if d.kind == "edge_added"
               for e in d.payload["edges"])
    assert all(d.payload.get("origin") != "door_postcondition"
               for d in deltas if d.kind == "node_added")


def test_already_open_door_gets_no_affordance():
    world = load_scenario(DOOR_HALL)
    world.set_door("o1", DoorState.OPEN)
    graph, recorder = fresh()
    observe(graph, recorder, world.sense(SENSOR))
    assert recorder.door_states["o1"] is DoorState.OPEN

    deltas = apply_affordances(graph, recorder, recorder.current_node)
    assert all(e["behavior"] != "openDoor"
               for d in deltas if d.kind == "edge_added"
               for e in d.payload["edges"])


def test_door_opening_removes_edge_and_keeps_postcondition_reachable():
    world = load_scenario(DOOR_HALL)
    graph, recorder = fresh()
    observe(graph, recorder, world.sense(SENSOR))
    apply_affordances(graph, recorder, recorder.current_node)
    (door_eid,) = [eid for eid, e in graph.edges.items()
                   if e.behavior is BehaviorKind.OPEN_DOOR]
    post = graph.edges[door_eid].target

    world.set_door("o1", DoorState.OPEN)
    deltas = observe(graph, recorder, world.sense(SENSOR))

    removed = [d for d in deltas if d.kind == "edge_removed"]
    assert any(door_eid in d.payload["ids"] for d in removed)
    assert not any(e.behavior is BehaviorKind.OPEN_DOOR for e in graph.edges.values())
    # the postcondition node survives as a waypoint linked through the doorway
    assert graph.nodes[post].kind is NodeKind.WAYPOINT
    incident = graph.out_edges(post) + graph.in_edges(post)
    assert incident and all(e.behavior is BehaviorKind.GOTO for e in incident)
    assert prune_frontiers(graph, recorder.view, recorder) == []


def test_door_state_change_event_alone_drops_edge():
    world = load_scenario(DOOR_HALL)
    graph, recorder = fresh()
    observe(graph, recorder, world.sense(SENSOR))
    apply_affordances(graph, recorder, recorder.current_node)

    change = world.set_door("o1", DoorState.OPEN)
    deltas = observe(graph, recorder, [PoseUpdate(1, world.robot.pose), change])
    assert any(d.kind == "edge_removed" for d in deltas)
    assert not any(e.behavior is BehaviorKind.OPEN_DOOR for e in graph.edges.values())


# -- affordances: teleop ----------------------------------------------------


def test_person_and_container_get_teleop_self_loops():
    world = load_scenario(DOOR_CLUTTER)
    graph, recorder = fresh()
    observe(graph, recorder, world.sense(SENSOR))

    deltas = apply_affordances(graph, recorder, recorder.current_node)
    loops = [e for d in deltas if d.kind == "edge_added"
             for e in d.payload["edges"] if e["behavior"] == "requestTeleop"]
    assert len(loops) == 2
    assert all(e["source"] == e["target"] == recorder.current_node for e in loops)
    assert all(e["cost"] == 100.0 for e in loops)
    assert [e["object_params"] for e in loops] == [["o2"], ["o3"]]

    notes = recorder.drain_notifications()
    assert {n["object"] for n in notes} == {"o2", "o3"}
    assert {n["label"] for n in notes} == {"container", "person"}
    assert recorder.notifications == []

    assert apply_affordances(graph, recorder, recorder.current_node) == []


# -- frontier extraction ----------------------------------------------------


def test_extraction_matches_bruteforce_clusters():
    graph, recorder = fresh()
    view = GlobalView(RES)
    cells = np.full((9, 13), CellState.FREE, dtype=np.uint8)
    for ix, iy in [(4, 3), (5, 3), (4, 4), (5, 4), (9, 4)]:
        cells[iy, ix] = CellState.UNKNOWN
    view.update(GridMap(13, 9, RES, Pose2(0.0, 0.0), cells))
    recorder.view = view
    robot = Pose2(-50.0, -50.0)

    got = [(p.x, p.y) for p in extract_frontiers(view, robot, recorder)]
    want = expected_candidates(view, robot, [], recorder.config)
    assert got == want
    assert len(got) == 3  # written-region perimeter, 2x2 pocket ring, single-cell cross

    # a node on a candidate suppresses that cluster only
    graph.add_node(Pose2(*want[2]), NodeKind.WAYPOINT)
    got = [(p.x, p.y) for p in extract_frontiers(view, robot, recorder)]
    want = expected_candidates(view, robot, [want[2]], recorder.config)
    assert got == want
    assert len(got) == 2


def test_corridor_yields_one_candidate_per_end():
    world = load_scenario(CORRIDOR)
    graph, recorder = fresh()
    observe(graph, recorder, world.sense(SENSOR))
    robot = world.robot.pose

    candidates = extract_frontiers(recorder.view, robot, recorder)
    assert len(candidates) == 2
    assert [(p.x, p.y) for p in candidates] == expected_candidates(
        recorder.view, robot, [(robot.x, robot.y)], recorder.config)
    left = min(candidates, key=lambda p: p.x)
    right = max(candidates, key=lambda p: p.x)
    assert left.x < robot.x < right.x
    assert 4.0 <= robot.x - left.x <= 6.0
    assert 4.0 <= right.x - robot.x <= 6.0

    # proximity filter: standing near one end suppresses that candidate
    near_right = Pose2(right.x - 1.0, right.y)
    remaining = extract_frontiers(recorder.view, near_right, recorder)
    assert [(p.x, p.y) for p in remaining] == [(left.x, left.y)]


def test_affordances_connect_frontiers_and_stay_idempotent():
    world = load_scenario(CORRIDOR)
    graph, recorder = fresh()
    observe(graph, recorder, world.sense(SENSOR))

    deltas = apply_affordances(graph, recorder, recorder.current_node)
    added = [d.payload for d in deltas if d.kind == "node_added"]
    assert len(added) == 2
    assert all(p["origin"] == "frontier" and p["kind"] == "frontier" for p in added)
    for p in added:
        node = graph.nodes[p["id"]]
        incident = graph.in_edges(p["id"]) + graph.out_edges(p["id"])
        assert {e.behavior for e in incident} == {BehaviorKind.GOTO}
        sources = {e.source for e in incident} | {e.target for e in incident}
        assert recorder.current_node in sources
        assert node.situation.gridmap.all_unknown()

    assert apply_affordances(graph, recorder, recorder.current_node) == []
    assert prune_frontiers(graph, recorder.view, recorder) == []


# -- pruning -----------------------------------------------------------------


def test_prune_removes_explored_frontier():
    world = load_scenario(CORRIDOR)
    graph, recorder = fresh()
    observe(graph, recorder, world.sense(SENSOR))
    apply_affordances(graph, recorder, recorder.current_node)
    left = min((n for n in graph.nodes.values() if n.kind is NodeKind.FRONTIER),
               key=lambda n: n.pose.x)

    # fabricate full knowledge around the left candidate
    observe(graph, recorder,
            cycle_events(world.robot.pose, free_patch(left.pose.x, left.pose.y, half=4),
                         step=1))
    assert not unknown_near_oracle(recorder.view, left.pose.x, left.pose.y)

    deltas = prune_frontiers(graph, recorder.view, recorder)
    removed = [d for d in deltas if d.kind == "node_removed"]
    assert [d.payload["id"] for d in removed] == [left.id]
    assert removed[0].payload["edge_ids"]
    assert left.id not in graph.nodes
    assert all(e.source != left.id and e.target != left.id for e in graph.edges.values())


def test_prune_removes_frontier_near_robot():
    world = load_scenario(CORRIDOR)
    graph, recorder = fresh()
    observe(graph, recorder, world.sense(SENSOR))
    apply_affordances(graph, recorder, recorder.current_node)
    frontiers = sorted((n for n in graph.nodes.values() if n.kind is NodeKind.FRONTIER),
                       key=lambda n: n.pose.x)
    left, right = frontiers

    observe(graph, recorder, [PoseUpdate(1, Pose2(right.pose.x - 1.5, right.pose.y))])
    deltas = prune_frontiers(graph, recorder.view, recorder)
    assert [d.payload["id"] for d in deltas] == [right.id]
    assert left.id in graph.nodes


def test_prune_spares_door_postcondition_near_robot():
    world = load_scenario(DOOR_HALL)
    graph, recorder = fresh()
    observe(graph, recorder, world.sense(SENSOR))
    apply_affordances(graph, recorder, recorder.current_node)
    (door_edge,) = [e for e in graph.edges.values() if e.behavior is BehaviorKind.OPEN_DOOR]
    post = door_edge.target

    # robot steps toward the door: postcondition node is 1.5 m away
    observe(graph, recorder, [PoseUpdate(1, Pose2(1.75, 2.25))])
    assert prune_frontiers(graph, recorder.view, recorder) == []
    assert post in graph.nodes

    # once its only edge is gone it is orphaned and pruned
    graph.remove_edge(door_edge.id)
    deltas = prune_frontiers(graph, recorder.view, recorder)
    assert [d.payload["id"] for d in deltas] == [post]
    assert post not in graph.nodes


# -- full recording cycles ---------------------------------------------------


def test_walk_keeps_frontiers_sound_and_folds_to_snapshot():
    world = load_scenario(CORRIDOR)
    graph, recorder = fresh()
    all_deltas = []
    known_before = 0

    for step in range(16):
        all_deltas += run_cycle(world, graph, recorder)

        assert recorder.view.known_cells() >= known_before
        known_before = recorder.view.known_cells()
        for node in graph.nodes.values():
            if node.kind is NodeKind.FRONTIER:
                assert unknown_near_oracle(recorder.view, node.pose.x, node.pose.y), \
                    f"unsound frontier {node.id} at cycle {step}"
        goal = Pose2(world.robot.pose.x + 0.5, 1.25)
        for _ in range(5):
            world.step(WaypointCommand(goal))

    nodes, edges, revision = fold_deltas(all_deltas)
    assert set(nodes) == set(graph.nodes)
    assert revision == graph.revision
    for nid, shadow in nodes.items():
        assert shadow["kind"] == graph.nodes[nid].kind.value
        assert shadow["pose"]["x"] == graph.nodes[nid].pose.x
    assert set(edges) == set(graph.edges)
    for eid, (source, target, behavior, params, cost) in edges.items():
        e = graph.edges[eid]
        assert (e.source, e.target, e.behavior.value) == (source, target, behavior)
        assert tuple(sorted(e.object_params)) == params
        assert e.cost == cost

    # waypoints spawned by the spacing rule sit at least node_spacing apart
    spaced = [graph.nodes[nid].pose for nid, origin in recorder.node_origins.items()
              if origin in ("initial", "spacing") and nid in graph.nodes]
    for i, a in enumerate(spaced):
        for b in spaced[i + 1:]:
            assert a.distance_to(b) >= recorder.config.node_spacing


def test_stationary_cycles_reach_fixpoint():
    for text in (CORRIDOR, DOOR_CLUTTER):
        world = load_scenario(text)
        graph, recorder = fresh()
        run_cycle(world, graph, recorder)
        assert run_cycle(world, graph, recorder) == []
        assert run_cycle(world, graph, recorder) == []


def test_delta_json_round_trip():
    graph, recorder = fresh()
    deltas = observe(graph, recorder, cycle_events(Pose2(0.25, 0.25), free_patch(0.25, 0.25)))
    for delta in deltas:
        data = delta.to_json()
        assert data["type"] == delta.kind
        assert GraphDelta.from_json(data) == delta
