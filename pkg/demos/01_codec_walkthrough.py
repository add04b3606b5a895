#!/usr/bin/env python3
"""Walk through the beacon payload codec, end to end.

A message is split into 250-byte fragments, each packed into the
253-byte vendor-extensible beacon field (2-byte sequence number, 1-byte
first/last tag, data). The emitter loops over the fragments forever; a
receiver that missed some picks them up on the next pass.
"""

import random

from beaconcast import (
    FrameOutcome,
    Message,
    ReassemblyBuffer,
    ReassemblyPolicy,
    decode_vendor_field,
    encode_vendor_field,
    fragment,
)

message = Message.with_topic("restaurant", b"Lunch special: ciorba + mici, 25 lei, 12:00-15:00. " * 20)
frags = fragment(message)
print(f"message: {len(message.payload)} bytes -> {len(frags)} fragments")

wire = encode_vendor_field(frags[0])
print(f"\nfirst fragment on the wire ({len(wire)} bytes):")
print(f"  seq_no={wire[0]:02x}{wire[1]:02x}  tag={wire[2]} (FIRST)  data[:16]={wire[3:19].hex()}")
assert decode_vendor_field(wire) == frags[0]

# A noisy channel: the car misses 30% of the beacons on the first loop
# and catches the holes on the second loop, out of order.
rng = random.Random(7)
first_loop = [f for f in frags if rng.random() > 0.3]
second_loop = list(frags)
rng.shuffle(second_loop)
print(f"\nfirst loop delivered {len(first_loop)} of {len(frags)} fragments; "
      "the emitter keeps looping")

buf = ReassemblyBuffer(network_id="bistro-net", policy=ReassemblyPolicy.ACCUMULATE)
for i, frag in enumerate(first_loop + second_loop):
    outcome = buf.on_frame(frag)
    if outcome is FrameOutcome.COMPLETED:
        print(f"completed after {i + 1} received frames, "
              f"{i + 1 - len(first_loop)} of them from the second loop "
              f"({buf.duplicates} duplicates along the way)")
        break

assert buf.payload() == message.payload
print("reassembled payload is byte-identical to the original")

# The strict-sequential policy gives up on the first gap instead.
strict = ReassemblyBuffer(network_id="bistro-net", policy=ReassemblyPolicy.STRICT_SEQUENTIAL)
outcomes = [strict.on_frame(f) for f in first_loop]
print(f"\nstrict policy on the same lossy loop: {outcomes.count(FrameOutcome.RESET)} resets, "
      f"completed={strict.completed}")
