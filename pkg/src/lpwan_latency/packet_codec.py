"""
Sensor payload codec.

Wire format (28 bytes total):

    offset  size  field
    0-1     2     label          printable ASCII tag
    2-11    10    timestamp      Unix epoch seconds, ASCII decimal, zero-padded
    12-26   15    sensor fields  fixed-width block (see below), zero-padded
    27      1     terminator     0x00

The 15-byte sensor field block is treated as an opaque blob by the codec.
The convention used by `pack_sensor_fields` is:

    offset  size  field
    12-15   4     device id
    16-23   8     auth token
    24-26   3     sensor states (occupancy bits etc.)
"""

from __future__ import annotations

from dataclasses import dataclass

LABEL_LEN = 2
TIMESTAMP_LEN = 10
FIELD_BLOCK_LEN = 15
PAYLOAD_LEN = 28

DEVICE_ID_LEN = 4
AUTH_TOKEN_LEN = 8
SENSOR_STATE_LEN = 3

MAX_TIMESTAMP = 10**TIMESTAMP_LEN - 1


class PayloadError(ValueError):
    """Base class for codec errors."""


class LabelLengthError(PayloadError):
    pass


class TimestampRangeError(PayloadError):
    pass


class FieldBlockLengthError(PayloadError):
    pass


class BadLengthError(PayloadError):
    pass


class BadTerminatorError(PayloadError):
    pass


class LabelMismatchError(PayloadError):
    pass


class BadTimestampError(PayloadError):
    pass


class NonPositiveIntervalError(PayloadError):
    pass


@dataclass(frozen=True)
class SensorPayload:
    """One 28-byte application payload as built by a sensor node."""

    label: bytes
    timestamp: int
    sensor_fields: bytes

    def serialize(self) -> bytes:
        raw = (
            self.label
            + str(self.timestamp).zfill(TIMESTAMP_LEN).encode("ascii")
            + self.sensor_fields
            + b"\x00"
        )
        assert len(raw) == PAYLOAD_LEN
        return raw


def build_payload(label: str | bytes, timestamp: int, sensor_fields: bytes) -> SensorPayload:
    """Validate the parts and assemble a payload.

    Raises LabelLengthError, TimestampRangeError or FieldBlockLengthError
    when a part does not fit its fixed-width slot.
    """
    if isinstance(label, str):
        label = label.encode("ascii")
    if len(label) != LABEL_LEN or not all(0x20 <= b <= 0x7E for b in label):
        raise LabelLengthError(f"label must be {LABEL_LEN} printable ASCII bytes, got {label!r}")
    if not (0 <= int(timestamp) <= MAX_TIMESTAMP):
        raise TimestampRangeError(
            f"timestamp {timestamp} not representable in {TIMESTAMP_LEN} decimal digits"
        )
    sensor_fields = bytes(sensor_fields)
    if len(sensor_fields) != FIELD_BLOCK_LEN:
        raise FieldBlockLengthError(
            f"sensor field block must be {FIELD_BLOCK_LEN} bytes, got {len(sensor_fields)}"
        )
    return SensorPayload(label=bytes(label), timestamp=int(timestamp), sensor_fields=sensor_fields)


def parse_payload(raw: bytes, expected_label: str | bytes) -> SensorPayload:
    """Parse and validate a received 28-byte buffer.

    Label comparison is exact byte equality against `expected_label`.
    """
    if isinstance(expected_label, str):
        expected_label = expected_label.encode("ascii")
    raw = bytes(raw)
    if len(raw) != PAYLOAD_LEN:
        raise BadLengthError(f"expected {PAYLOAD_LEN} bytes, got {len(raw)}")
    if raw[-1] != 0:
        raise BadTerminatorError(f"terminator byte is 0x{raw[-1]:02X}, expected 0x00")
    label = raw[:LABEL_LEN]
    if label != expected_label:
        raise LabelMismatchError(f"label {label!r} does not match expected {expected_label!r}")
    ts_bytes = raw[LABEL_LEN : LABEL_LEN + TIMESTAMP_LEN]
    if not ts_bytes.isdigit():
        raise BadTimestampError(f"timestamp field {ts_bytes!r} is not all ASCII digits")
    fields = raw[LABEL_LEN + TIMESTAMP_LEN : -1]
    return SensorPayload(label=label, timestamp=int(ts_bytes), sensor_fields=fields)


def pack_sensor_fields(device_id: bytes, auth_token: bytes, sensor_states: bytes) -> bytes:
    """Pack the documented sub-layout into the 15-byte field block."""
    parts = [
        (device_id, DEVICE_ID_LEN, "device id"),
        (auth_token, AUTH_TOKEN_LEN, "auth token"),
        (sensor_states, SENSOR_STATE_LEN, "sensor states"),
    ]
    out = b""
    for value, width, name in parts:
        value = bytes(value)
        if len(value) > width:
            raise FieldBlockLengthError(f"{name} longer than {width} bytes")
        out += value.ljust(width, b"\x00")
    return out


def effective_data_rate(payload_bytes: int, interval_s: float) -> float:
    """Application data rate in kbps for one payload emitted every `interval_s`."""
    if interval_s <= 0:
        raise NonPositiveIntervalError(f"interval must be > 0, got {interval_s}")
    return payload_bytes * 8 / interval_s / 1000.0
