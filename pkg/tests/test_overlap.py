import pytest
from hypothesis import given, settings, strategies as st

from obdqa.errors import UndefinedPercentageError
from obdqa.geometry import Polygon, intersection_area
from obdqa.ingest import Source
from obdqa.overlap import REPORT_COLUMNS, OverlapPair, find_pairs, overlap_counts, overlap_report
from obdqa.synth import SceneConfig, generate_scene
from conftest import layer_of, square
from oracles import brute_force_overlap_counts


def four_three_scene():
    # refs 0, 1 sit side by side with a 1 m gap; OBD 0 bridges them
    ref = layer_of([Polygon.box(0, 0, 10, 10), Polygon.box(11, 0, 21, 10), Polygon.box(100, 100, 110, 110)],
                   Source.REF)
    obd = layer_of([Polygon.box(8, 2, 13, 8), Polygon.box(15, 2, 19, 8),
                    Polygon.box(200, 0, 210, 10), Polygon.box(0, 200, 10, 210)])
    return obd, ref


def test_identical_single_building():
    pairs = find_pairs(layer_of([square(0, 0)]), layer_of([square(0, 0)], Source.REF))
    assert len(pairs) == 1
    assert pairs[0].iou == 1.0 and pairs[0].obd_coverage == 1.0


def test_disjoint_layers():
    assert find_pairs(layer_of([square(0, 0)]), layer_of([square(5, 5)], Source.REF)) == []


def test_touching_is_not_overlap():
    obd = layer_of([square(0, 0), square(3, 3)])
    ref = layer_of([square(1, 0), square(4, 4)], Source.REF)
    assert find_pairs(obd, ref) == []


def test_four_three_scene_pairs_and_report():
    obd, ref = four_three_scene()
    pairs = find_pairs(obd, ref)
    assert [(p.obd_id, p.ref_id) for p in pairs] == [(0, 0), (0, 1), (1, 1)]
    brute, counts = brute_force_overlap_counts(obd.geometries, ref.geometries, intersection_area)
    assert brute == {(0, 0), (0, 1), (1, 1)}
    rep = overlap_report(pairs, len(obd), len(ref))
    assert rep.oop_pct == 50.0
    assert round(rep.orp_pct, 2) == 66.67
    assert rep.omo_pct == 25.0
    assert round(rep.rmo_pct, 2) == 33.33
    assert rep.noop_pct == 50.0
    for key, attr in (("OOP", "oop_pct"), ("ORP", "orp_pct"), ("OMO", "omo_pct"), ("RMO", "rmo_pct")):
        assert getattr(rep, attr) == counts[key]
    assert overlap_counts(pairs, 4, 3) == {"obd_overlapping": 2, "obd_non_overlapping": 2,
                                           "ref_overlapping": 2, "ref_non_overlapping": 1}


def test_identical_layers_report():
    scene = generate_scene(SceneConfig(n_buildings=60, seed=5))
    pairs = find_pairs(scene.obd, scene.ref)
    rep = overlap_report(pairs, len(scene.obd), len(scene.ref))
    assert (rep.oop_pct, rep.orp_pct, rep.omo_pct, rep.rmo_pct, rep.avg_iou) == (100.0, 100.0, 0.0, 0.0, 1.0)


def test_report_row_schema():
    rep = overlap_report([], 3, 4)
    row = rep.row()
    assert tuple(row) == REPORT_COLUMNS
    assert row["Avg_IoU"] is None and not rep.avg_iou_defined
    assert rep.avg_iou == 0.0


def test_zero_totals():
    with pytest.raises(UndefinedPercentageError):
        overlap_report([], 0, 3)


def test_pair_invariants_and_symmetry():
    scene = generate_scene(SceneConfig(n_buildings=150, seed=9, translation=(1.5, 0.7), min_gap=0.5,
                                       rotation=2.0))
    fwd = find_pairs(scene.obd, scene.ref)
    back = find_pairs(scene.ref, scene.obd)
    assert {(p.obd_id, p.ref_id) for p in fwd} == {(p.ref_id, p.obd_id) for p in back}
    keys = [(p.obd_id, p.ref_id) for p in fwd]
    assert len(keys) == len(set(keys)) and keys == sorted(keys)
    for p in fwd:
        assert 0 < p.intersection <= p.union
        assert 0 < p.iou <= 1 and 0 < p.obd_coverage <= 1


def test_deterministic():
    cfg = SceneConfig(n_buildings=100, seed=2, translation=(0.9, -0.4))
    s1, s2 = generate_scene(cfg), generate_scene(cfg)
    assert find_pairs(s1.obd, s1.ref) == find_pairs(s2.obd, s2.ref)


def _pair(o, r, iou=0.5):
    return OverlapPair(o, r, iou, 1.0, iou, 0.9)


pair_lists = st.lists(st.tuples(st.integers(0, 9), st.integers(0, 7)), max_size=40, unique=True)


@settings(max_examples=200, deadline=None)
@given(pair_lists)
def test_report_invariants(edges):
    rep = overlap_report([_pair(o, r) for o, r in edges], 10, 8)
    assert rep.oop_pct + rep.noop_pct == pytest.approx(100.0, abs=1e-9)
    assert rep.orp_pct + rep.norp_pct == pytest.approx(100.0, abs=1e-9)
    assert rep.omo_pct <= rep.oop_pct and rep.rmo_pct <= rep.orp_pct
