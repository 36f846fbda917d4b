"""Run configuration shared by the library entry points and the command line."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass

from .dyadic import Dyadic

__version__ = "0.1.0"


@dataclass(frozen=True)
class Config:
    seed_word: str = "ab"  # W_1 of the labelling
    window_level: int = 6  # level window for labelling verification
    max_factor_len: int = 17
    max_period: int = 128
    structure_window: int = 64  # units scanned on each side of 0
    fixed_point_target: Dyadic = Dyadic(1, 1)  # J_1 is built around fixed points nearest this
    fixed_point_radius: int = 1000  # units scanned by fixed point searches
    j1_pad: Dyadic = Dyadic(1, 4)  # 1/16
    j_pad: Dyadic = Dyadic(1, 5)  # 1/32 for J_2, J_3, J_4
    unit_search_radius: int = 10_000  # for the companion unit m
    search_budget: int = 4000  # proximal search for h
    search_restarts: int = 4
    search_max_len: int = 10
    rng_seed: int = 0

    def to_json(self):
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, Dyadic):
                d[k] = str(v)
        return d

    def digest(self):
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


DEFAULT = Config()
