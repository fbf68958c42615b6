"""Published CAISO event metrics (seven NERC-confirmed disturbances, 2013-2024).

RoCoF values are whole mHz/s magnitudes as published; inertia in MVA*s.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class PublishedEvent:
    label: str
    delta_p_mw: float
    intercon_rocof_mhz_s: float
    regional_rocof_mhz_s: float
    local_rocof_mhz_s: float
    h_intercon_mva_s: float
    h_region_mva_s: float
    h_local_mva_s: float
    arrival_time_s: float
    ratio_pct: float


CAISO_EVENTS: tuple[PublishedEvent, ...] = (
    PublishedEvent("7/10/2013 9:49", 1130, 42, 207, 307, 815_000, 164_000, 110_000, 0.2, 20.1),
    PublishedEvent("2/2/2014 12:29", 1450, 58, 261, 435, 502_000, 167_000, 100_000, 0.2, 33.3),
    PublishedEvent("10/9/2017 12:14", 973, 104, 422, 1139, 280_000, 69_200, 25_600, 0.2, 24.7),
    PublishedEvent("12/1/2018 11:06", 1114, 39, 227, 383, 860_000, 147_000, 85_000, 0.2, 17.1),
    PublishedEvent("10/15/2021 17:49", 988, 34, 114, 178, 864_000, 261_000, 167_000, 0.0, 30.2),
    PublishedEvent("4/6/2022 15:05", 794, 44, 157, 335, 536_000, 152_000, 71_100, 0.1, 28.3),
    PublishedEvent("8/31/2024 0:36", 771, 27, 65, 133, 855_083, 355_850, 173_910, 0.2, 41.6),
)


def load_events(path: str | os.PathLike) -> tuple[PublishedEvent, ...]:
    """Read a JSON list of event rows using :class:`PublishedEvent` field names."""
    with open(path, "r", encoding="utf-8") as fh:
        rows = json.load(fh)
    return tuple(PublishedEvent(**row) for row in rows)


def dump_events(events, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([asdict(e) for e in events], fh, indent=2)
        fh.write("\n")
