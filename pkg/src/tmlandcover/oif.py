"""Optimum Index Factor (OIF) band-combination ranking.

OIF for a combination of bands is the sum of their standard deviations
divided by the sum of absolute pairwise correlation coefficients. High
variance and low redundancy give a high score.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import LandcoverError
from .raster import MultibandImage

DEGENERATE_TOL = 1e-12

ASC = "asc"
DESC = "desc"


@dataclass(frozen=True)
class BandStats:
    band: int
    mean: float
    stddev: float
    count: int


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Pearson correlations between bands (0-based array indices, 1-based bands).

    ``degenerate[i, j]`` is set when band i or j is constant over the pixels
    they share; the entry is then recorded as 0.
    """

    entries: np.ndarray
    degenerate: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def r(self, a: int, b: int) -> float:
        return float(self.entries[a - 1, b - 1])


@dataclass(frozen=True)
class OifRecord:
    combo: tuple[int, ...]
    oif: Optional[float]
    degenerate: bool = False

    @property
    def label(self) -> str:
        return "".join(str(b) for b in self.combo)


@dataclass(frozen=True)
class OifRanking:
    records: tuple[OifRecord, ...]
    order: str

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def top(self, k: int) -> tuple[OifRecord, ...]:
        return self.records[:k]

    def band_membership(self, top_k: int, n_bands: Optional[int] = None) -> dict[int, int]:
        """How many of the first ``top_k`` combos contain each band."""
        if n_bands is None:
            n_bands = max(max(r.combo) for r in self.records)
        counts = {b: 0 for b in range(1, n_bands + 1)}
        for rec in self.records[:top_k]:
            for b in rec.combo:
                counts[b] += 1
        return counts


def band_statistics(image: MultibandImage) -> list[BandStats]:
    """Mean and population standard deviation of every band over its valid pixels."""
    out = []
    for k in range(1, image.n_bands + 1):
        vals = image.band(k)[image.valid_mask(k)]
        if vals.size == 0:
            raise LandcoverError(f"band {k} has no valid pixels")
        mean = float(vals.mean())
        out.append(BandStats(k, mean, float(np.sqrt(np.mean((vals - mean) ** 2))), int(vals.size)))
    return out


def correlation_matrix(image: MultibandImage) -> CorrelationMatrix:
    """Pairwise Pearson correlation over pixels valid in both bands."""
    n = image.n_bands
    entries = np.eye(n)
    degenerate = np.zeros((n, n), dtype=bool)
    masks = [image.valid_mask(k) for k in range(1, n + 1)]
    for i, j in itertools.combinations(range(n), 2):
        both = masks[i] & masks[j]
        if both.sum() < 2:
            raise LandcoverError(
                f"bands {i + 1} and {j + 1} share fewer than 2 valid pixels"
            )
        x = image.data[i][both]
        y = image.data[j][both]
        dx = x - x.mean()
        dy = y - y.mean()
        sxx = float(np.dot(dx, dx))
        syy = float(np.dot(dy, dy))
        if sxx == 0.0 or syy == 0.0:
            r = 0.0
            degenerate[i, j] = degenerate[j, i] = True
        else:
            r = min(1.0, max(-1.0, float(np.dot(dx, dy)) / math.sqrt(sxx * syy)))
        entries[i, j] = entries[j, i] = r
    return CorrelationMatrix(entries, degenerate)


def enumerate_combinations(n: int, r: int) -> list[tuple[int, ...]]:
    """All C(n, r) increasing tuples of 1-based band numbers, lexicographic."""
    if not 1 <= r <= n:
        raise LandcoverError(f"combination size must satisfy 1 <= r <= n (got r={r}, n={n})")
    return list(itertools.combinations(range(1, n + 1), r))


def oif_score(combo: Sequence[int], stats: Sequence[BandStats], corr: CorrelationMatrix) -> OifRecord:
    by_band = {s.band: s for s in stats}
    combo = tuple(combo)
    num = sum(by_band[b].stddev for b in combo)
    den = sum(abs(corr.r(a, b)) for a, b in itertools.combinations(combo, 2))
    if den < DEGENERATE_TOL:
        return OifRecord(combo, None, True)
    return OifRecord(combo, num / den, False)


def _sorted(records: Iterable[OifRecord], order: str) -> tuple[OifRecord, ...]:
    if order not in (ASC, DESC):
        raise ValueError(f"order must be 'asc' or 'desc', not {order!r}")
    scored = [r for r in records if not r.degenerate]
    rest = sorted((r for r in records if r.degenerate), key=lambda r: r.combo)
    sign = 1.0 if order == ASC else -1.0
    scored.sort(key=lambda r: (sign * r.oif, r.combo))
    return tuple(scored) + tuple(rest)


def rank_combinations(image: MultibandImage, r: int = 3, order: str = DESC) -> OifRanking:
    """Score every r-band combination of ``image``; degenerate combos go last."""
    combos = enumerate_combinations(image.n_bands, r)
    stats = band_statistics(image)
    corr = correlation_matrix(image)
    return OifRanking(_sorted([oif_score(c, stats, corr) for c in combos], order), order)


def parse_combo(text: str) -> tuple[int, ...]:
    """'345' -> (3, 4, 5). Digits must be distinct band numbers 1-9."""
    text = text.strip()
    if not text.isdigit() or "0" in text:
        raise LandcoverError(f"bad band combination {text!r}")
    combo = tuple(sorted(int(ch) for ch in text))
    if len(set(combo)) != len(combo):
        raise LandcoverError(f"band combination {text!r} repeats a band")
    return combo


def rank_from_table(
    records: Iterable[tuple[Sequence[int], float]], order: str = DESC, top_k: int = 10
) -> tuple[OifRanking, dict[int, int]]:
    """Rank externally supplied (combo, oif) pairs and count band membership in the top ``top_k``."""
    recs = []
    seen = set()
    for combo, value in records:
        combo = tuple(sorted(combo))
        if combo in seen:
            raise LandcoverError(f"duplicate band combination {''.join(map(str, combo))}")
        seen.add(combo)
        recs.append(OifRecord(combo, float(value)))
    if not recs:
        raise LandcoverError("no OIF records supplied")
    ranking = OifRanking(_sorted(recs, order), order)
    return ranking, ranking.band_membership(top_k)


# ---------------------------------------------------------------------- CSV I/O


def read_oif_table(source) -> list[tuple[tuple[int, ...], float]]:
    """Read ``combo,oif`` rows, combo written as concatenated digits (``345``)."""
    text = Path(source).read_text() if not isinstance(source, io.TextIOBase) else source.read()
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["combo", "oif"]:
        raise LandcoverError("OIF table must start with the header 'combo,oif'")
    out = []
    for lineno, row in enumerate(rows[1:], 2):
        if not row or not "".join(row).strip():
            continue
        if len(row) != 2:
            raise LandcoverError(f"line {lineno}: expected 2 fields, got {len(row)}")
        try:
            value = float(row[1])
        except ValueError:
            raise LandcoverError(f"line {lineno}: OIF value {row[1]!r} is not a number")
        out.append((parse_combo(row[0]), value))
    return out


def load_fixture(name: str) -> list[tuple[tuple[int, ...], float]]:
    """Published OIF tables shipped with the package: 'table4' or 'table5'."""
    files = {"table4": "table4_wenbo.csv", "table5": "table5_hobson.csv"}
    ref = resources.files("tmlandcover") / "data" / files[name]
    return read_oif_table(io.StringIO(ref.read_text()))


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else repr(value)


def ranking_rows(ranking: OifRanking) -> list[str]:
    return [
        f"{i},{rec.label},{_fmt(rec.oif)},{str(rec.degenerate).lower()}"
        for i, rec in enumerate(ranking.records, 1)
    ]


def write_ranking_csv(ranking: OifRanking, path) -> None:
    Path(path).write_text("\n".join(["rank,combo,oif,degenerate", *ranking_rows(ranking)]) + "\n")


def write_membership_csv(membership: dict[int, int], path) -> None:
    lines = ["band,count_in_topk", *(f"{b},{c}" for b, c in sorted(membership.items()))]
    Path(path).write_text("\n".join(lines) + "\n")
