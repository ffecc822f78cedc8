from .tm import (
    Path, Action, ACTION_ORDER, ArcKind, ThimacKind, Locality, StageRef, ArcRef, Arc, Thimac, RegionItem, Event,
    BehaviorGraph, Injection, Scenario, StaticModel, fmt_path, is_within, locality,
)
