from .inject import apply_instances, generate_instances, inject_all
from .scheduling import TemporalProfile, apply_layering, schedule_burst, schedule_periodic
from .typologies import (
    INJECTORS,
    PatternInstance,
    inject_front_business,
    inject_overseas_transfers,
    inject_rapid_movement,
    inject_synchronised,
    inject_u_turn,
)
from ..config import LayeringParams

__all__ = [
    "INJECTORS", "LayeringParams", "PatternInstance", "TemporalProfile", "apply_instances", "apply_layering",
    "generate_instances", "inject_all", "inject_front_business", "inject_overseas_transfers",
    "inject_rapid_movement", "inject_synchronised", "inject_u_turn", "schedule_burst", "schedule_periodic",
]
