import pytest

from tmlandcover.indices import IndexKind, evaluate_index_pixel
from tmlandcover.rules import LandcoverObject, all_recommendations, band_prevalence, recommend

O = LandcoverObject


def combos(obj):
    return {frozenset(c) for c in recommend(obj).combos}


def test_examples():
    snow = recommend(O.SNOW_ICE)
    assert combos(O.SNOW_ICE) == {frozenset({3, 4, 5})}
    assert {IndexKind.ICE_RATIO_45, IndexKind.ICE_RATIO_35} <= set(snow.indices)
    veg = recommend(O.VEGETATION)
    assert combos(O.VEGETATION) == {frozenset({3, 4})}
    assert veg.indices[0] is IndexKind.NDVI
    assert combos(O.CHANGE_DETECTION) == {frozenset({7, 4, 3}), frozenset({7, 4, 2})}


def test_table_total_and_valid():
    recs = all_recommendations()
    assert [r.object for r in recs] == list(O)
    for r in recs:
        assert r.combos or r.indices
        assert all(1 <= b <= 7 for c in r.combos for b in c)
        assert r.source_note


def test_referenced_indices_are_implemented():
    pixel = [0.3, 0.5, 0.2, 0.6, 0.4, 0.3, 0.1]
    from tmlandcover.indices import BandRangeStats

    aux = BandRangeStats(5, 0.1, 0.9)
    for r in all_recommendations():
        for kind in r.indices:
            assert evaluate_index_pixel(kind, pixel, aux if kind.needs_aux else None) is not None


def test_band_prevalence():
    p = band_prevalence()
    assert p.most_common == [4]
    assert all(c <= p.total_combos for c in p.counts.values())
    assert band_prevalence() == p
    assert p.fraction(4) == p.counts[4] / p.total_combos


def test_text_and_csv():
    rec = recommend(O.VEGETATION)
    text = rec.describe()
    assert "{3,4}" in text and "ndvi" in text and "source:" in text
    assert rec.csv_row().startswith("vegetation,34,ndvi;")


def test_accepts_string_value():
    assert recommend("soil").object is O.SOIL
    with pytest.raises(ValueError):
        recommend("lava")
