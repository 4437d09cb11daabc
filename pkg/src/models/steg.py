"""Key material, secret chunks and transmitter counters."""

from dataclasses import dataclass
from typing import Any

from .errors import ConfigError, RejectedInputError

KEY_LEN = 32
NONCE_LEN = 12
SEQ_MODULUS = 1 << 16

DEFAULT_KEY_HEX = "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f"
DEFAULT_NONCE_HEX = "a0a1a2a3a4a5a6a7a8a9aaab"


@dataclass(frozen=True)
class KeyMaterial:
    """Shared secret of both covert endpoints.

    Attributes:
        key: 256-bit key.
        call_nonce: 96-bit value, unique per (key, call).
        cipher: Name of the keystream cipher (see ``utils.steg_engine.CIPHERS``).
    """

    key: bytes
    call_nonce: bytes
    cipher: str = "chacha20"

    def __post_init__(self) -> None:
        if len(self.key) != KEY_LEN:
            raise ConfigError(f"key must be {KEY_LEN} bytes, got {len(self.key)}")
        if len(self.call_nonce) != NONCE_LEN:
            raise ConfigError(f"call_nonce must be {NONCE_LEN} bytes, got {len(self.call_nonce)}")

    @classmethod
    def from_hex(cls, key: str, nonce: str, cipher: str = "chacha20") -> "KeyMaterial":
        try:
            return cls(key=bytes.fromhex(key), call_nonce=bytes.fromhex(nonce), cipher=cipher)
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"keys must be hex strings: {exc}") from exc

    @classmethod
    def default(cls) -> "KeyMaterial":
        return cls.from_hex(DEFAULT_KEY_HEX, DEFAULT_NONCE_HEX)

    def to_dict(self) -> dict[str, Any]:
        return {"key": self.key.hex(), "nonce": self.call_nonce.hex(), "cipher": self.cipher}


@dataclass(frozen=True, slots=True)
class Chunk:
    """One sequenced slice of the secret stream."""

    seq: int
    data: bytes

    def __post_init__(self) -> None:
        if not 0 <= self.seq < SEQ_MODULUS:
            raise RejectedInputError(f"seq out of 16-bit range: {self.seq}")


@dataclass
class EmbedStats:
    """Transmitter counters; ``utilization`` is embedded / silence_identified."""

    packets_seen: int = 0
    silence_identified: int = 0
    embedded: int = 0
    suspended_by_governor: int = 0
    secret_bits_sent: int = 0

    @property
    def utilization(self) -> float:
        if self.silence_identified == 0:
            return 0.0
        return self.embedded / self.silence_identified

    def to_dict(self) -> dict[str, int]:
        return {
            "packets_seen": self.packets_seen,
            "silence_identified": self.silence_identified,
            "embedded": self.embedded,
            "suspended_by_governor": self.suspended_by_governor,
            "secret_bits_sent": self.secret_bits_sent,
        }
