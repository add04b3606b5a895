"""Connection-less roadside-to-vehicle dissemination toolkit.

Data rides inside 802.11 beacon frames: the codec packs message fragments
into the vendor-extensible beacon field, access points cycle through the
fragments in a loop, and passing vehicles reassemble them without ever
associating. The simulator reproduces message-loss-versus-message-size
behaviour for such deployments; the analytic module gives the closed-form
throughput bounds.
"""

from .analytic import ThroughputEstimate, estimate, frames_for_message, loop_time
from .channel import BeaconSchedule, ChannelParams, delivery_draw, emission_times, in_range
from .codec import (
    CHUNK_SIZE,
    MAX_FRAGMENTS,
    MAX_MESSAGE_SIZE,
    FragmentRecord,
    FrameOutcome,
    Message,
    ReassemblyBuffer,
    ReassemblyPolicy,
    Tag,
    decode_vendor_field,
    encode_vendor_field,
    fragment,
)
from .engine import AccessPointSpec, RunResult, Scenario, ap_fragment_at, run
from .metrics import message_loss_pct, topic_filter
from .mobility import Road, TrafficModel, Vehicle, dwell_interval, generate_vehicles, position_at

__version__ = "0.1.0"

__all__ = [
    "AccessPointSpec",
    "BeaconSchedule",
    "CHUNK_SIZE",
    "ChannelParams",
    "FragmentRecord",
    "FrameOutcome",
    "MAX_FRAGMENTS",
    "MAX_MESSAGE_SIZE",
    "Message",
    "ReassemblyBuffer",
    "ReassemblyPolicy",
    "Road",
    "RunResult",
    "Scenario",
    "Tag",
    "ThroughputEstimate",
    "TrafficModel",
    "Vehicle",
    "ap_fragment_at",
    "decode_vendor_field",
    "delivery_draw",
    "dwell_interval",
    "emission_times",
    "encode_vendor_field",
    "estimate",
    "fragment",
    "frames_for_message",
    "generate_vehicles",
    "in_range",
    "loop_time",
    "message_loss_pct",
    "position_at",
    "run",
    "topic_filter",
]
