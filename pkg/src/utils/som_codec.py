"""Bit-exact SoM datagram codec and the CRC-16 used to tag stego packets.

Wire layout: ID (2 bytes, big-endian) ++ Fun (1 byte) ++ payload.
"""

import binascii
import struct

from models.errors import MalformedMessageError, RejectedInputError
from models.som import MAX_PAYLOAD_LEN, SOM_HEADER_LEN, SomMessage

_HEADER = struct.Struct(">HB")

# CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no final XOR
CRC16_INIT = 0xFFFF

# Fun values of signaling messages seen on UDP calls
SIGNALING_FUNS = (0x02, 0x03, 0x07, 0x0F)
DATA_FUN_NIBBLE = 0x0D


def encode_som(message: SomMessage) -> bytes:
    """Serialize a SoM message.

    Args:
        message: Message to encode.

    Returns:
        ``3 + len(payload)`` bytes.

    Raises:
        RejectedInputError: If the payload is empty or does not fit one UDP datagram.
    """
    if not 1 <= len(message.payload) <= MAX_PAYLOAD_LEN:
        raise RejectedInputError(f"payload length must be in [1, {MAX_PAYLOAD_LEN}], got {len(message.payload)}")
    return _HEADER.pack(message.id, message.fun) + bytes(message.payload)


def decode_som(data: bytes) -> SomMessage:
    """Parse a SoM datagram; inverse of :func:`encode_som`.

    Raises:
        MalformedMessageError: If fewer than 4 bytes are given.
    """
    if len(data) < SOM_HEADER_LEN + 1:
        raise MalformedMessageError(f"datagram needs at least {SOM_HEADER_LEN + 1} bytes, got {len(data)}")
    if len(data) > SOM_HEADER_LEN + MAX_PAYLOAD_LEN:
        raise MalformedMessageError(f"datagram exceeds one UDP payload: {len(data)} bytes")
    msg_id, fun = _HEADER.unpack_from(data)
    return SomMessage(id=msg_id, fun=fun, payload=bytes(data[SOM_HEADER_LEN:]))


def crc16(data: bytes) -> int:
    """CRC-16/CCITT-FALSE of ``data`` (0x29B1 for b"123456789")."""
    return binascii.crc_hqx(data, CRC16_INIT)


def is_data_fun(fun: int) -> bool:
    """True iff the Fun byte marks a DATA message (low nibble 0xd)."""
    return fun & 0x0F == DATA_FUN_NIBBLE
