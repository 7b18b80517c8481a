import re
from datetime import datetime
from xml.etree import ElementTree

from fraudlens import SectorRegion, Window, render_frame, spiral_layout
from fraudlens.events import Event
from fraudlens.svg import node_id

from conftest import random_event

WINDOW = Window(datetime(2014, 1, 1), datetime(2014, 6, 30, 23, 59))


def build_layout(events, **kwargs):
    return spiral_layout(events, WINDOW, client_id="c1", **kwargs)


def sample_events(rng, n=25):
    return [random_event(rng, clients=1, span_days=150) for _ in range(n)]


def test_render_is_byte_deterministic(rng):
    events = sample_events(rng)
    region = SectorRegion("billing_window", 8, 15, 30)
    first = render_frame(
        "c1",
        build_layout(list(events), regions=(region,)),
        {"score": "4/3", "period": "30d"},
        billing_day=15,
        due_day=25,
    )
    second = render_frame(
        "c1",
        build_layout(list(reversed(events)), regions=(region,)),
        {"period": "30d", "score": "4/3"},
        billing_day=15,
        due_day=25,
    )
    assert first == second
    assert first.encode("utf-8") == second.encode("utf-8")


def test_render_is_wellformed_xml(rng):
    svg = render_frame("c1", build_layout(sample_events(rng)), {"note": 'a "quoted" <value>'})
    root = ElementTree.fromstring(svg)
    assert root.tag.endswith("svg")
    assert root.get("data-client") == "c1"


def test_every_node_carries_stable_id_and_key(rng):
    events = sample_events(rng, 12)
    layout = build_layout(events)
    svg = render_frame("c1", layout)
    for node in layout.nodes:
        key = node.event.key
        assert f'id="{node_id(key)}"' in svg
        assert f'data-key="{key}"' in svg
    assert node_id("a|b|c|d|e") != node_id("a|b|c|d|f")
    assert re.fullmatch(r"ev-[0-9a-f]{16}", node_id("x"))


def test_no_unfixed_floats_leak_into_output(rng):
    svg = render_frame("c1", build_layout(sample_events(rng)), billing_day=3)
    # computed geometry is fixed-precision; a raw float repr would exceed 2 decimals
    for value in re.findall(r'="([^"]*)"', svg):
        for num in re.findall(r"-?\d+\.\d+", value):
            assert len(num.split(".")[1]) <= 2, num
    assert "-0.00" not in svg


def test_shapes_follow_source_system():
    base = datetime(2014, 2, 10, 9, 0)
    events = [
        Event(base, "e1", "c1", "login", "default"),
        Event(base, "e1", "c1", "login", "crm"),
    ]
    svg = render_frame("c1", build_layout(events))
    assert "<circle" in svg and 'data-key="2014-02-10T09:00|e1|c1|login|default"' in svg
    crm_id = node_id(events[1].key)
    circle_ids = re.findall(r'<circle id="(ev-[0-9a-f]{16})"', svg)
    assert crm_id not in circle_ids


def test_regions_render_with_kind_class(rng):
    cluster = SectorRegion("radial_cluster", 14, 15, 30)
    billing = SectorRegion("billing_window", 8, 15, 30)
    svg = render_frame("c1", build_layout(sample_events(rng), regions=(billing, cluster)))
    assert 'class="region region-billing_window"' in svg
    assert 'class="region region-radial_cluster"' in svg


def test_wrapped_region_renders(rng):
    wrapped = SectorRegion("radial_cluster", 29, 1, 30)
    svg = render_frame("c1", build_layout([], regions=(wrapped,)))
    ElementTree.fromstring(svg)
    assert 'region-radial_cluster' in svg


def test_day_rays_styles():
    svg = render_frame("c1", build_layout([]), billing_day=15, due_day=25)
    rays = re.findall(r'<line class="day-ray"[^>]*>', svg)
    assert len(rays) == 2
    assert "stroke-dasharray" not in rays[0]  # billing ray is solid
    assert "stroke-dasharray" in rays[1]  # due ray is dashed
    assert ">bill 15<" in svg and ">due 25<" in svg


def test_annotations_sorted_and_escaped():
    svg = render_frame("c1", build_layout([]), {"b": "2", "a": "x<y"})
    a_pos = svg.index(">a: x&lt;y<")
    b_pos = svg.index(">b: 2<")
    assert a_pos < b_pos


def test_branch_labels_present(rng):
    svg = render_frame("c1", build_layout(sample_events(rng)))
    for month in range(1, 7):
        assert f">2014-{month:02d}<" in svg
