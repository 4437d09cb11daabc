"""Typed representation of a UDP Skype datagram.

The unencrypted Start of Message (SoM) header carries a 2-byte ID and a 1-byte
Fun field; everything after it is opaque ciphertext.
"""

from dataclasses import dataclass

from .errors import RejectedInputError

SOM_HEADER_LEN = 3
MAX_PAYLOAD_LEN = 65535 - SOM_HEADER_LEN


@dataclass(frozen=True, slots=True)
class SomMessage:
    """One SoM datagram.

    Attributes:
        id: 16-bit message identifier (carries the CRC-16 tag on stego packets).
        fun: 8-bit payload-type discriminator.
        payload: Opaque payload bytes, at least one byte long.
    """

    id: int
    fun: int
    payload: bytes

    def __post_init__(self) -> None:
        if not 0 <= self.id <= 0xFFFF:
            raise RejectedInputError(f"id out of 16-bit range: {self.id}")
        if not 0 <= self.fun <= 0xFF:
            raise RejectedInputError(f"fun out of 8-bit range: {self.fun}")
        if not 1 <= len(self.payload) <= MAX_PAYLOAD_LEN:
            raise RejectedInputError(f"payload length must be in [1, {MAX_PAYLOAD_LEN}], got {len(self.payload)}")

    @property
    def size(self) -> int:
        """Total datagram size in bytes, header included."""
        return SOM_HEADER_LEN + len(self.payload)
