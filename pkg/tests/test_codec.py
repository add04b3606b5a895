"""Codec tests: fragmentation, vendor-field packing, reassembly policies.

Expected values for the derived cases are produced by independent oracles
defined here (set-membership for ACCUMULATE completion, contiguous-run
scan for STRICT_SEQUENTIAL), never by the code under test.
"""

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beaconcast.codec import (
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
    read_topic,
)
from beaconcast.errors import (
    ConflictingTotalError,
    InconsistentTagError,
    InvalidMessageError,
    MessageTooLargeError,
    OversizeFieldError,
    TruncatedFieldError,
    UnknownTagError,
)


def make_fragments(n: int, chunk: bytes = b"x") -> list[FragmentRecord]:
    """Valid fragment list for an n-fragment message."""
    if n == 1:
        return [FragmentRecord(0, Tag.SINGLE, chunk)]
    records = [FragmentRecord(0, Tag.FIRST, chunk)]
    records += [FragmentRecord(i, Tag.MIDDLE, chunk) for i in range(1, n - 1)]
    records.append(FragmentRecord(n - 1, Tag.LAST, chunk))
    return records


def feed(policy: ReassemblyPolicy, frames) -> tuple[list[FrameOutcome], ReassemblyBuffer]:
    buf = ReassemblyBuffer(network_id="net", policy=policy)
    return [buf.on_frame(f) for f in frames], buf


# --- independent completion oracles -------------------------------------

def accumulate_completes(order: list[int], total: int) -> bool:
    """ACCUMULATE completes iff every index 0..total-1 appears."""
    return set(order) >= set(range(total))


def strict_completes(order: list[int], total: int) -> bool:
    """STRICT completes iff the stream contains a contiguous run 0..total-1."""
    run = [*range(total)]
    for start in range(len(order) - total + 1):
        if order[start : start + total] == run:
            return True
    return False


# --- fragmentation -------------------------------------------------------

class TestFragment:
    def test_paper_112kb_is_459_fragments(self):
        # 112 KB at 1024 B/KB split into 250 B chunks.
        msg = Message(payload=bytes(112 * 1024))
        frags = fragment(msg)
        assert len(frags) == 459

    def test_single_chunk(self):
        frags = fragment(Message(payload=bytes(100)))
        assert len(frags) == 1
        assert frags[0].seq_no == 0
        assert frags[0].tag is Tag.SINGLE
        assert len(frags[0].data) == 100

    def test_exact_multiple_of_chunk(self):
        payload = bytes(range(250)) + bytes(reversed(range(250)))
        frags = fragment(Message(payload=payload))
        assert [(f.seq_no, f.tag) for f in frags] == [(0, Tag.FIRST), (1, Tag.LAST)]
        assert frags[0].data == payload[:250]
        assert frags[1].data == payload[250:]

    def test_chunk_boundaries_and_tags(self):
        payload = bytes(i % 251 for i in range(1001))
        frags = fragment(Message(payload=payload))
        assert len(frags) == 5
        assert [f.tag for f in frags] == [Tag.FIRST, Tag.MIDDLE, Tag.MIDDLE, Tag.MIDDLE, Tag.LAST]
        for i, f in enumerate(frags):
            assert f.seq_no == i
            assert f.data == payload[250 * i : 250 * (i + 1)]
        assert b"".join(f.data for f in frags) == payload

    def test_empty_payload_rejected(self):
        with pytest.raises(InvalidMessageError):
            Message(payload=b"")

    def test_oversize_payload_rejected(self):
        with pytest.raises(MessageTooLargeError):
            Message(payload=bytes(MAX_MESSAGE_SIZE + 1))

    def test_capacity_constants(self):
        # 2-byte sequence number: 65536 x 250 B; the rejected 1-byte
        # alternative would cap out at 256 x 250 B = 62.5 KB.
        assert MAX_MESSAGE_SIZE == 65536 * 250 == 16_384_000
        assert 256 * 250 == 64_000 == int(62.5 * 1024)

    def test_max_size_message_fragments(self):
        msg = Message(payload=bytes(MAX_MESSAGE_SIZE))
        assert msg.fragment_count() == MAX_FRAGMENTS


# --- vendor field encode/decode ------------------------------------------

class TestVendorField:
    def test_encode_layout(self):
        frag = FragmentRecord(seq_no=258, tag=Tag.MIDDLE, data=b"\xab")
        assert encode_vendor_field(frag) == bytes([0x01, 0x02, 0x00, 0xAB])

    def test_encode_boundary_length(self):
        frag = FragmentRecord(seq_no=0, tag=Tag.SINGLE, data=bytes(250))
        buf = encode_vendor_field(frag)
        assert len(buf) == 253
        assert buf[:3] == bytes([0x00, 0x00, 0x03])

    def test_decode_first(self):
        frag = decode_vendor_field(bytes([0x00, 0x00, 0x01, 0x41]))
        assert frag == FragmentRecord(seq_no=0, tag=Tag.FIRST, data=b"A")

    def test_decode_unknown_tag(self):
        with pytest.raises(UnknownTagError):
            decode_vendor_field(bytes([0x00, 0x05, 0x07, 0x41]))

    def test_decode_truncated(self):
        with pytest.raises(TruncatedFieldError):
            decode_vendor_field(bytes(2))
        with pytest.raises(TruncatedFieldError):
            decode_vendor_field(bytes(3))  # header alone, no data byte

    def test_decode_oversize(self):
        with pytest.raises(OversizeFieldError):
            decode_vendor_field(bytes(254))

    def test_decode_inconsistent_tag(self):
        # FIRST/SINGLE demand seq 0; MIDDLE/LAST forbid it.
        with pytest.raises(InconsistentTagError):
            decode_vendor_field(bytes([0x00, 0x07, 0x01, 0x41]))
        with pytest.raises(InconsistentTagError):
            decode_vendor_field(bytes([0x00, 0x07, 0x03, 0x41]))
        with pytest.raises(InconsistentTagError):
            decode_vendor_field(bytes([0x00, 0x00, 0x00, 0x41]))
        with pytest.raises(InconsistentTagError):
            decode_vendor_field(bytes([0x00, 0x00, 0x02, 0x41]))

    def test_roundtrip_1000_random_fragments(self):
        rng = random.Random(0xBEAC)
        for _ in range(1000):
            seq = rng.randrange(MAX_FRAGMENTS)
            if seq == 0:
                tag = rng.choice([Tag.FIRST, Tag.SINGLE])
            else:
                tag = rng.choice([Tag.MIDDLE, Tag.LAST])
            data = rng.randbytes(rng.randint(1, CHUNK_SIZE))
            frag = FragmentRecord(seq, tag, data)
            assert decode_vendor_field(encode_vendor_field(frag)) == frag

    @given(st.binary(min_size=1, max_size=CHUNK_SIZE), st.integers(1, MAX_FRAGMENTS - 1))
    def test_encoded_length_is_header_plus_data(self, data, seq):
        buf = encode_vendor_field(FragmentRecord(seq, Tag.MIDDLE, data))
        assert len(buf) == 3 + len(data) <= 253


# --- reassembly ----------------------------------------------------------

class TestReassembly:
    def test_in_order_pass(self):
        frames = make_fragments(3)
        for policy in ReassemblyPolicy:
            outcomes, buf = feed(policy, frames)
            assert outcomes == [
                FrameOutcome.INCOMPLETE,
                FrameOutcome.INCOMPLETE,
                FrameOutcome.COMPLETED,
            ]
            assert buf.payload() == b"xxx"

    def test_out_of_order_accumulate_vs_strict(self):
        f = make_fragments(3)
        shuffled = [f[0], f[2], f[1]]
        outcomes, buf = feed(ReassemblyPolicy.ACCUMULATE, shuffled)
        assert outcomes == [
            FrameOutcome.INCOMPLETE,
            FrameOutcome.INCOMPLETE,
            FrameOutcome.COMPLETED,
        ]
        assert buf.payload() == b"xxx"
        outcomes, _ = feed(ReassemblyPolicy.STRICT_SEQUENTIAL, shuffled)
        assert outcomes[1] is FrameOutcome.RESET

    def test_duplicate_counted(self):
        f = make_fragments(3)
        buf = ReassemblyBuffer(network_id="net")
        buf.on_frame(f[0])
        buf.on_frame(f[1])
        assert buf.on_frame(f[1]) is FrameOutcome.DUPLICATE
        assert buf.duplicates == 1

    def test_frames_after_completion_are_duplicates(self):
        f = make_fragments(2)
        buf = ReassemblyBuffer(network_id="net")
        assert buf.on_frame(f[0]) is FrameOutcome.INCOMPLETE
        assert buf.on_frame(f[1]) is FrameOutcome.COMPLETED
        assert buf.on_frame(f[0]) is FrameOutcome.DUPLICATE
        assert buf.on_frame(f[1]) is FrameOutcome.DUPLICATE
        assert buf.duplicates == 2

    def test_single_fragment_message(self):
        frag = FragmentRecord(0, Tag.SINGLE, b"hello")
        for policy in ReassemblyPolicy:
            outcomes, buf = feed(policy, [frag])
            assert outcomes == [FrameOutcome.COMPLETED]
            assert buf.payload() == b"hello"

    def test_conflicting_totals_clear_buffer(self):
        buf = ReassemblyBuffer(network_id="net")
        buf.on_frame(FragmentRecord(0, Tag.FIRST, b"a"))
        buf.on_frame(FragmentRecord(2, Tag.LAST, b"c"))
        with pytest.raises(ConflictingTotalError):
            buf.on_frame(FragmentRecord(3, Tag.LAST, b"d"))
        assert buf.fragments == {}
        assert buf.expected_total is None

    def test_index_beyond_known_total_clears_buffer(self):
        buf = ReassemblyBuffer(network_id="net")
        buf.on_frame(FragmentRecord(1, Tag.LAST, b"b"))
        with pytest.raises(ConflictingTotalError):
            buf.on_frame(FragmentRecord(5, Tag.MIDDLE, b"f"))
        assert buf.fragments == {}

    def test_strict_reset_then_restart(self):
        f = make_fragments(3)
        buf = ReassemblyBuffer(network_id="net", policy=ReassemblyPolicy.STRICT_SEQUENTIAL)
        assert buf.on_frame(f[0]) is FrameOutcome.INCOMPLETE
        assert buf.on_frame(f[2]) is FrameOutcome.RESET
        assert buf.fragments == {}
        # A fresh FIRST restarts cleanly at index 0.
        assert buf.on_frame(f[0]) is FrameOutcome.INCOMPLETE
        assert buf.on_frame(f[1]) is FrameOutcome.INCOMPLETE
        assert buf.on_frame(f[2]) is FrameOutcome.COMPLETED

    def test_strict_orphan_middle_resets(self):
        buf = ReassemblyBuffer(network_id="net", policy=ReassemblyPolicy.STRICT_SEQUENTIAL)
        assert buf.on_frame(FragmentRecord(1, Tag.MIDDLE, b"b")) is FrameOutcome.RESET

    def test_exhaustive_orders_match_oracles(self):
        # Every arrival order of up to 4 fragments, checked against the
        # independent completion oracles for both policies.
        for total in range(1, 5):
            frags = make_fragments(total)
            for perm in itertools.permutations(range(total)):
                order = list(perm)
                stream = [frags[i] for i in order]
                _, acc = feed(ReassemblyPolicy.ACCUMULATE, stream)
                assert acc.completed == accumulate_completes(order, total)
                _, strict = feed(ReassemblyPolicy.STRICT_SEQUENTIAL, stream)
                assert strict.completed == strict_completes(order, total)
                # Policy dominance: STRICT never completes where ACCUMULATE fails.
                assert not (strict.completed and not acc.completed)

    def test_exhaustive_sequences_with_repeats_match_oracles(self):
        # All index sequences (repeats allowed) up to length 4 over <=3 fragments.
        for total in range(1, 4):
            frags = make_fragments(total)
            for length in range(1, 5):
                for order in itertools.product(range(total), repeat=length):
                    stream = [frags[i] for i in order]
                    _, acc = feed(ReassemblyPolicy.ACCUMULATE, stream)
                    assert acc.completed == accumulate_completes(list(order), total)
                    _, strict = feed(ReassemblyPolicy.STRICT_SEQUENTIAL, stream)
                    assert strict.completed == strict_completes(list(order), total)
                    assert not (strict.completed and not acc.completed)

    @given(st.binary(min_size=1, max_size=5000), st.randoms(use_true_random=False))
    @settings(max_examples=200, deadline=None)
    def test_loss_permutation_completeness(self, payload, rng):
        # Any stream containing every index at least once completes under
        # ACCUMULATE with the exact payload, whatever the order/duplication.
        frags = fragment(Message(payload=payload))
        stream = list(frags)
        for _ in range(rng.randint(0, 5)):
            stream.append(rng.choice(frags))
        rng.shuffle(stream)
        buf = ReassemblyBuffer(network_id="net")
        outcomes = [buf.on_frame(f) for f in stream]
        assert outcomes.count(FrameOutcome.COMPLETED) == 1
        assert buf.payload() == payload

    @given(st.integers(1, 10**6), st.randoms(use_true_random=False))
    @settings(max_examples=30, deadline=None)
    def test_in_order_roundtrip_across_sizes(self, size, rng):
        payload = rng.getrandbits(8 * min(size, 64)).to_bytes(min(size, 64), "big")
        payload = (payload * (size // len(payload) + 1))[:size]
        frags = fragment(Message(payload=payload))
        buf = ReassemblyBuffer(network_id="net")
        last = [buf.on_frame(f) for f in frags][-1]
        assert last is FrameOutcome.COMPLETED
        assert buf.payload() == payload


# --- topic header ---------------------------------------------------------

class TestTopicHeader:
    def test_roundtrip(self):
        msg = Message.with_topic("restaurant", b"menu of the day")
        topic, body = read_topic(msg.payload)
        assert topic == "restaurant"
        assert body == b"menu of the day"
        assert msg.topic == "restaurant"

    def test_topic_length_capped(self):
        with pytest.raises(InvalidMessageError):
            Message.with_topic("x" * 65, b"")

    def test_headerless_payload_passthrough(self):
        assert read_topic(b"\x00raw") == (None, b"\x00raw")
