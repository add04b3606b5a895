"""Beacon payload codec: fragmentation, vendor-field packing, reassembly.

Each beacon carries one fragment inside the 253-byte vendor-extensible
field at the end of the frame:

    2B seq_no (big-endian) | 1B tag | 1..250B data

Tags mark the fragment's place in the message: FIRST opens a message,
LAST closes it, MIDDLE fills the gap, SINGLE is a one-fragment message
(simultaneously first and last). Receivers rebuild messages per network
name; the emitter cycles through the fragments in an endless loop, so a
receiver that missed a fragment can pick it up on a later pass.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Dict, List, Optional

from .errors import (
    ConflictingTotalError,
    InconsistentTagError,
    InvalidMessageError,
    MessageTooLargeError,
    OversizeFieldError,
    TruncatedFieldError,
    UnknownTagError,
)

# Vendor field layout: 2B sequence number + 1B tag + up to 250B data.
CHUNK_SIZE = 250
HEADER_SIZE = 3
MAX_FIELD_SIZE = HEADER_SIZE + CHUNK_SIZE  # 253
MAX_FRAGMENTS = 65536  # 2-byte sequence number
MAX_MESSAGE_SIZE = MAX_FRAGMENTS * CHUNK_SIZE  # 16,384,000 bytes

_HEADER = struct.Struct(">HB")


class Tag(IntEnum):
    MIDDLE = 0
    FIRST = 1
    LAST = 2
    SINGLE = 3


def _check_fragment(seq_no: int, tag: Tag, data: bytes) -> None:
    if not 0 <= seq_no < MAX_FRAGMENTS:
        raise ValueError(f"seq_no {seq_no} outside 0..65535")
    if not 1 <= len(data) <= CHUNK_SIZE:
        raise InvalidMessageError(f"fragment data length {len(data)} outside 1..{CHUNK_SIZE}")
    starts_message = tag in (Tag.FIRST, Tag.SINGLE)
    if (seq_no == 0) != starts_message:
        raise InconsistentTagError(f"tag {tag.name} inconsistent with seq_no {seq_no}")


@dataclass(frozen=True, slots=True)
class FragmentRecord:
    """One beacon's worth of message data."""

    seq_no: int
    tag: Tag
    data: bytes

    def __post_init__(self):
        _check_fragment(self.seq_no, self.tag, self.data)


@dataclass(frozen=True)
class Message:
    """Application payload pushed by an access point.

    A topic label, when used, rides inside the payload as a 1-byte length
    prefix followed by the label bytes; the transport below never looks
    at it.
    """

    payload: bytes
    topic: Optional[str] = None

    def __post_init__(self):
        if len(self.payload) == 0:
            raise InvalidMessageError("empty payload")
        if len(self.payload) > MAX_MESSAGE_SIZE:
            raise MessageTooLargeError(
                f"{len(self.payload)} bytes needs more than {MAX_FRAGMENTS} fragments"
            )

    @classmethod
    def with_topic(cls, topic: str, body: bytes) -> "Message":
        """Build a message whose payload opens with the topic header."""
        raw = topic.encode("utf-8")
        if len(raw) > 64:
            raise InvalidMessageError(f"topic longer than 64 bytes: {len(raw)}")
        return cls(payload=bytes([len(raw)]) + raw + body, topic=topic)

    def fragment_count(self) -> int:
        return -(-len(self.payload) // CHUNK_SIZE)


def read_topic(payload: bytes) -> tuple[Optional[str], bytes]:
    """Split a topic-prefixed payload into (topic, body).

    Returns (None, payload) when the leading byte cannot be a topic header.
    """
    if not payload:
        return None, payload
    n = payload[0]
    if n == 0 or n > 64 or len(payload) < 1 + n:
        return None, payload
    try:
        return payload[1 : 1 + n].decode("utf-8"), payload[1 + n :]
    except UnicodeDecodeError:
        return None, payload


def _record(seq_no: int, tag: Tag, data: bytes) -> FragmentRecord:
    """Construct without re-validating; caller guarantees the invariants."""
    rec = object.__new__(FragmentRecord)
    object.__setattr__(rec, "seq_no", seq_no)
    object.__setattr__(rec, "tag", tag)
    object.__setattr__(rec, "data", data)
    return rec


def fragment(message: Message) -> List[FragmentRecord]:
    """Split a message into ordered 250-byte fragments.

    Fragment i carries payload bytes [250*i, min(250*(i+1), L)). The final
    fragment may be short; the vendor field is variable-length, so no
    padding is needed and the payload length is recovered exactly.
    """
    payload = message.payload
    total = message.fragment_count()
    if total == 1:
        return [_record(0, Tag.SINGLE, payload)]
    middle = Tag.MIDDLE
    records = [_record(0, Tag.FIRST, payload[:CHUNK_SIZE])]
    append = records.append
    for i in range(1, total - 1):
        append(_record(i, middle, payload[i * CHUNK_SIZE : (i + 1) * CHUNK_SIZE]))
    append(_record(total - 1, Tag.LAST, payload[(total - 1) * CHUNK_SIZE :]))
    return records


def encode_vendor_field(frag: FragmentRecord) -> bytes:
    """Pack a fragment into vendor-field bytes (big-endian seq, tag, data)."""
    return _HEADER.pack(frag.seq_no, frag.tag) + frag.data


def decode_vendor_field(buf: bytes) -> FragmentRecord:
    """Parse vendor-field bytes back into a fragment.

    Rejects short/oversize buffers, undefined tag values, and seq/tag
    combinations that violate the layout (the exact inverse of encode).
    """
    if len(buf) < HEADER_SIZE + 1:
        raise TruncatedFieldError(f"{len(buf)} bytes, need at least {HEADER_SIZE + 1}")
    if len(buf) > MAX_FIELD_SIZE:
        raise OversizeFieldError(f"{len(buf)} bytes, limit {MAX_FIELD_SIZE}")
    seq_no, tag_byte = _HEADER.unpack_from(buf)
    try:
        tag = Tag(tag_byte)
    except ValueError:
        raise UnknownTagError(f"tag byte {tag_byte} undefined") from None
    if (seq_no == 0) != (tag in (Tag.FIRST, Tag.SINGLE)):
        raise InconsistentTagError(f"tag {tag.name} inconsistent with seq_no {seq_no}")
    return _record(seq_no, tag, bytes(buf[HEADER_SIZE:]))


class ReassemblyPolicy(Enum):
    # Store fragments in any order across loops; complete once all present.
    ACCUMULATE = "accumulate"
    # Accept only in-sequence fragments; any gap throws the buffer away.
    STRICT_SEQUENTIAL = "strict"


class FrameOutcome(Enum):
    INCOMPLETE = "incomplete"
    DUPLICATE = "duplicate"
    COMPLETED = "completed"
    RESET = "reset"


@dataclass(slots=True)
class ReassemblyBuffer:
    """Per-network fragment collection state inside one vehicle.

    Keyed by the advertised network name so that several transmitters
    sharing a name look like one continuous source. A completed buffer is
    retained (all indices stay present) so later frames of the same loop
    are recognised as duplicates.
    """

    network_id: str
    policy: ReassemblyPolicy = ReassemblyPolicy.ACCUMULATE
    fragments: Dict[int, bytes] = field(default_factory=dict)
    expected_total: Optional[int] = None
    duplicates: int = 0
    last_seq_seen: Optional[int] = None
    completed: bool = False

    def clear(self) -> None:
        self.fragments.clear()
        self.expected_total = None
        self.last_seq_seen = None
        self.completed = False

    @property
    def complete(self) -> bool:
        return self.expected_total is not None and len(self.fragments) == self.expected_total

    def payload(self) -> bytes:
        """Concatenated message bytes; only meaningful once complete."""
        assert self.complete
        frags = self.fragments
        return b"".join(frags[i] for i in range(self.expected_total))

    def on_frame(self, frag: FragmentRecord) -> FrameOutcome:
        """Feed one decoded fragment; report what it did to the buffer."""
        if self.completed:
            # All indices already present; any further frame is a repeat.
            self.duplicates += 1
            return FrameOutcome.DUPLICATE
        if self.policy is ReassemblyPolicy.STRICT_SEQUENTIAL:
            return self._on_frame_strict(frag)
        seq = frag.seq_no
        tag = frag.tag
        fragments = self.fragments
        expected = self.expected_total
        if tag is Tag.LAST or tag is Tag.SINGLE:
            implied = seq + 1
            if expected != implied:
                if expected is not None:
                    self.clear()
                    raise ConflictingTotalError(
                        f"{self.network_id}: totals {expected} and {implied}"
                    )
                if fragments and max(fragments) >= implied:
                    self.clear()
                    raise ConflictingTotalError(
                        f"{self.network_id}: stored index beyond implied total {implied}"
                    )
                self.expected_total = expected = implied
        elif expected is not None and seq >= expected:
            self.clear()
            raise ConflictingTotalError(
                f"{self.network_id}: index {seq} beyond total {expected}"
            )
        if seq in fragments:
            self.duplicates += 1
            return FrameOutcome.DUPLICATE
        fragments[seq] = frag.data
        if len(fragments) == expected:
            self.completed = True
            return FrameOutcome.COMPLETED
        return FrameOutcome.INCOMPLETE

    def _on_frame_strict(self, frag: FragmentRecord) -> FrameOutcome:
        seq = frag.seq_no
        if frag.tag in (Tag.FIRST, Tag.SINGLE):
            # Restart from the top of the loop.
            self.fragments.clear()
            self.expected_total = None
            self.fragments[0] = frag.data
            self.last_seq_seen = 0
            if frag.tag is Tag.SINGLE:
                self.expected_total = 1
                self.completed = True
                return FrameOutcome.COMPLETED
            return FrameOutcome.INCOMPLETE
        if self.last_seq_seen is not None and seq == self.last_seq_seen + 1:
            self.fragments[seq] = frag.data
            self.last_seq_seen = seq
            if frag.tag is Tag.LAST:
                self.expected_total = seq + 1
                self.completed = True
                return FrameOutcome.COMPLETED
            return FrameOutcome.INCOMPLETE
        # Gap: the stream skipped ahead (or restarted mid-message).
        self.clear()
        return FrameOutcome.RESET
