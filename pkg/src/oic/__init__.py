"""Secondary-user rate adaptation with opportunistic interference cancellation."""

from oic.core import (
    ChannelParams,
    DomainError,
    capacity,
    db_to_linear,
    linear_to_db,
)
from oic.mac import (
    RatePair,
    RegimeError,
    SuperpositionSplit,
    corner_points,
    region_contains,
    sum_rate_identity_check,
    superposition_split,
)
from oic.adaptation import (
    Regime,
    classify,
    rate_noic,
    rate_oic,
    required_snr_noic,
    required_snr_oic,
)
from oic.allocator import (
    AllocationResult,
    BlockGeometry,
    allocate_conventional,
    allocate_intercepted,
    blocks_for_channel,
    channel_rate,
    oracle_allocate,
)

__version__ = "0.1.0"

__all__ = [
    "AllocationResult",
    "BlockGeometry",
    "ChannelParams",
    "DomainError",
    "RatePair",
    "Regime",
    "RegimeError",
    "SuperpositionSplit",
    "allocate_conventional",
    "allocate_intercepted",
    "blocks_for_channel",
    "capacity",
    "channel_rate",
    "classify",
    "corner_points",
    "db_to_linear",
    "linear_to_db",
    "oracle_allocate",
    "rate_noic",
    "rate_oic",
    "region_contains",
    "required_snr_noic",
    "required_snr_oic",
    "sum_rate_identity_check",
    "superposition_split",
]
