"""Landcover object -> recommended TM band combinations and indices.

A static lookup assembled from published Landsat TM studies. Each row names
the study it comes from.
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass

from .indices import IndexKind


class LandcoverObject(enum.Enum):
    WATER = "water"
    COASTAL_BOUNDARY = "coastal_boundary"
    VEGETATION = "vegetation"
    CROP_ANALYSIS = "crop_analysis"
    SOIL = "soil"
    SOIL_SALINITY = "soil_salinity"
    SOIL_MOISTURE = "soil_moisture"
    SNOW_ICE = "snow_ice"
    UNDERWATER_FEATURES = "underwater_features"
    CHANGE_DETECTION = "change_detection"


@dataclass(frozen=True)
class Recommendation:
    object: LandcoverObject
    combos: tuple[frozenset, ...]
    indices: tuple[IndexKind, ...]
    source_note: str

    def combo_labels(self) -> list[str]:
        return ["".join(str(b) for b in sorted(c)) for c in self.combos]

    def describe(self) -> str:
        combos = "; ".join("{" + ",".join(str(b) for b in sorted(c)) + "}" for c in self.combos)
        idx = ", ".join(k.value for k in self.indices) or "-"
        return (
            f"{self.object.value}\n"
            f"  band combinations: {combos or '-'}\n"
            f"  indices: {idx}\n"
            f"  source: {self.source_note}"
        )

    def csv_row(self) -> str:
        combos = ";".join(self.combo_labels())
        idx = ";".join(k.value for k in self.indices)
        note = self.source_note.replace('"', '""')
        return f'{self.object.value},{combos},{idx},"{note}"'


def _row(obj, combos, indices, note):
    return obj, Recommendation(obj, tuple(frozenset(c) for c in combos), tuple(indices), note)


_O = LandcoverObject
_K = IndexKind
_TABLE = dict(
    [
        _row(_O.WATER, [(2, 5)],
             [_K.WATER_RATIO_25, _K.WATER_RATIO_42, _K.WATER_INDEX],
             "band2/band5 > 1 marks water: Alesheikh et al. (2007); "
             "visible/infrared water index: Hashemi et al. (2005), Hosseini et al. (2008)"),
        _row(_O.COASTAL_BOUNDARY, [(3, 4, 7)], [],
             "water boundary, coastline, soil moisture, iron compounds: "
             "Current Science 94(8) (2008); Davis & Allen, NASA GSFC; Lim et al. (2002)"),
        _row(_O.VEGETATION, [(3, 4)],
             [_K.NDVI, _K.CORRECTED_NDVI, _K.PERCENT_VEG_COVER, _K.SIMPLE_RATIO,
              _K.REDUCED_SIMPLE_RATIO, _K.SAVI],
             "NDVI from bands 4 and 3: Shan-long et al. (2006); "
             "corrected NDVI, percent cover, simple ratios, SAVI: Muzein (2006)"),
        _row(_O.CROP_ANALYSIS, [(2, 3, 4)], [],
             "bands 4,3,2 for vegetation and crop analysis: "
             "Current Science 94(8) (2008); Davis & Allen, NASA GSFC; Lim et al. (2002)"),
        _row(_O.SOIL, [(2, 3, 4)], [_K.SOIL_EC_RATIO],
             "(TM3 - TM4)/(TM2 - TM4) correlates best with soil EC: Hashemi et al. (2005)"),
        _row(_O.SOIL_SALINITY, [(2, 4, 6, 7)], [],
             "bands 2,4,6 and 7 separate saline and sodic soils: Hashemi et al. (2005)"),
        _row(_O.SOIL_MOISTURE, [(3, 4, 5), (3, 4, 7)], [],
             "bands 4,5,3 for soil moisture and vegetation; bands 3,4,7 for soil moisture: "
             "Current Science 94(8) (2008); Davis & Allen, NASA GSFC; Lim et al. (2002)"),
        _row(_O.SNOW_ICE, [(3, 4, 5)], [_K.ICE_RATIO_45, _K.ICE_RATIO_35],
             "TM4/TM5 and TM3/TM5 ratio thresholds, best with bands 3,4,5: "
             "Todd (2002); Bayr et al. (1994); Rott (1994); Paul (2000)"),
        _row(_O.UNDERWATER_FEATURES, [(1, 2, 3)], [],
             "bands 3,2,1 for landcover and underwater features: "
             "Current Science 94(8) (2008); Davis & Allen, NASA GSFC; Lim et al. (2002)"),
        _row(_O.CHANGE_DETECTION, [(3, 4, 7), (2, 4, 7)], [],
             "bands 7,4,3 and 7,4,2 for change detection, soil type, vegetation stress: "
             "Current Science 94(8) (2008); Davis & Allen, NASA GSFC; Lim et al. (2002)"),
    ]
)


def recommend(obj: LandcoverObject) -> Recommendation:
    return _TABLE[LandcoverObject(obj)]


def all_recommendations() -> list[Recommendation]:
    return [_TABLE[o] for o in LandcoverObject]


@dataclass(frozen=True)
class BandPrevalence:
    counts: dict
    total_combos: int

    def fraction(self, band: int) -> float:
        return self.counts[band] / self.total_combos

    @property
    def most_common(self) -> list[int]:
        top = max(self.counts.values())
        return [b for b, c in self.counts.items() if c == top]


def band_prevalence() -> BandPrevalence:
    """How many recommended combinations include each TM band 1-7."""
    counts = Counter({b: 0 for b in range(1, 8)})
    total = 0
    for rec in all_recommendations():
        for combo in rec.combos:
            counts.update(combo)
            total += 1
    return BandPrevalence(dict(sorted(counts.items())), total)
