"""Chunking, encryption, embedding and extraction of the secret stream.

A chunk's plaintext is ``seq (2 bytes, big-endian) ++ data``; it is XORed
with a counter-mode keystream whose counter is ``(epoch << 16) | seq`` and
replaces the payload of one silence packet. The CRC-16 of the ciphertext goes
into the SoM ID field, so datagram sizes never change.
"""

import logging
from collections.abc import Iterable, Iterator
from typing import Protocol

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from models.classifier import SizeClass
from models.errors import IntegrityConflictError, RejectedInputError
from models.som import SomMessage
from models.steg import NONCE_LEN, SEQ_MODULUS, Chunk, EmbedStats, KeyMaterial
from models.traffic import PacketRecord

from .silence_classifier import LossGovernor, SilenceClassifier
from .som_codec import crc16, is_data_fun

logger = logging.getLogger(__name__)

SEQ_PREFIX_LEN = 2
MIN_PAYLOAD_LEN = SEQ_PREFIX_LEN + 1
DEFAULT_SEARCH_WINDOW = 512
_COUNTER_LIMIT = 1 << 64


class KeystreamCipher(Protocol):
    """Counter-mode keystream generator."""

    name: str

    def keystream(self, key: bytes, nonce: bytes, length: int) -> bytes: ...


class ChaCha20Keystream:
    name = "chacha20"

    def keystream(self, key: bytes, nonce: bytes, length: int) -> bytes:
        # 4-byte little-endian block counter followed by the 96-bit nonce
        encryptor = Cipher(algorithms.ChaCha20(key, b"\x00" * 4 + nonce), mode=None).encryptor()
        return encryptor.update(bytes(length))


class AesCtrKeystream:
    name = "aes-256-ctr"

    def keystream(self, key: bytes, nonce: bytes, length: int) -> bytes:
        encryptor = Cipher(algorithms.AES(key), modes.CTR(nonce + b"\x00" * 4)).encryptor()
        return encryptor.update(bytes(length))


CIPHERS: dict[str, KeystreamCipher] = {
    cipher.name: cipher for cipher in (ChaCha20Keystream(), AesCtrKeystream())
}


def chunk_counter(seq: int, epoch: int = 0) -> int:
    return (epoch << 16) | seq


def _record_nonce(call_nonce: bytes, counter: int) -> bytes:
    value = int.from_bytes(call_nonce, "big") ^ counter
    return value.to_bytes(NONCE_LEN, "big")


def _xor(left: bytes, right: bytes) -> bytes:
    return (int.from_bytes(left, "big") ^ int.from_bytes(right, "big")).to_bytes(len(left), "big")


def keystream(km: KeyMaterial, counter: int, length: int) -> bytes:
    """Deterministic keystream bytes for ``counter`` under ``km``.

    Args:
        km: Key material; ``km.cipher`` selects the primitive.
        counter: 64-bit counter, XORed into the call nonce.
        length: Number of bytes.

    Raises:
        RejectedInputError: On a negative length, out-of-range counter or unknown cipher.
    """
    if length < 0:
        raise RejectedInputError(f"keystream length must be >= 0, got {length}")
    if not 0 <= counter < _COUNTER_LIMIT:
        raise RejectedInputError(f"counter out of 64-bit range: {counter}")
    try:
        cipher = CIPHERS[km.cipher]
    except KeyError:
        raise RejectedInputError(f"unknown cipher {km.cipher!r}; choose from {sorted(CIPHERS)}") from None
    if length == 0:
        return b""
    return cipher.keystream(km.key, _record_nonce(km.call_nonce, counter), length)


def seal_chunk(km: KeyMaterial, seq: int, data: bytes, payload_len: int, epoch: int = 0) -> bytes:
    """Encrypt one chunk into exactly ``payload_len`` bytes.

    Raises:
        RejectedInputError: If ``len(data) != payload_len - 2`` or the payload is too small.
    """
    if payload_len < MIN_PAYLOAD_LEN:
        raise RejectedInputError(f"payload_len must be >= {MIN_PAYLOAD_LEN}, got {payload_len}")
    if len(data) != payload_len - SEQ_PREFIX_LEN:
        raise RejectedInputError(f"chunk data must be {payload_len - SEQ_PREFIX_LEN} bytes, got {len(data)}")
    if not 0 <= seq < SEQ_MODULUS:
        raise RejectedInputError(f"seq out of 16-bit range: {seq}")
    plaintext = seq.to_bytes(SEQ_PREFIX_LEN, "big") + data
    return _xor(plaintext, keystream(km, chunk_counter(seq, epoch), payload_len))


def candidate_seqs(expected: int, window: int) -> Iterator[int]:
    """Sequence numbers nearest to ``expected`` first, alternating forward and back."""
    yield expected % SEQ_MODULUS
    for step in range(1, window + 1):
        yield (expected + step) % SEQ_MODULUS
        yield (expected - step) % SEQ_MODULUS


def open_chunk(km: KeyMaterial, ciphertext: bytes, candidates: Iterable[int], epoch: int = 0) -> Chunk | None:
    """Decrypt a chunk whose sequence number is among ``candidates``.

    The sequence number is itself encrypted, so each candidate is tried until
    the decrypted prefix names that same candidate.
    """
    if len(ciphertext) < MIN_PAYLOAD_LEN:
        return None
    for seq in candidates:
        stream = keystream(km, chunk_counter(seq, epoch), len(ciphertext))
        prefix = _xor(ciphertext[:SEQ_PREFIX_LEN], stream[:SEQ_PREFIX_LEN])
        if int.from_bytes(prefix, "big") == seq:
            return Chunk(seq=seq, data=_xor(ciphertext[SEQ_PREFIX_LEN:], stream[SEQ_PREFIX_LEN:]))
    return None


def embed(packet: SomMessage, ciphertext: bytes) -> SomMessage:
    """Replace the payload with ``ciphertext`` and tag the ID with its CRC-16.

    Raises:
        RejectedInputError: If the ciphertext would change the datagram size.
    """
    if len(ciphertext) != len(packet.payload):
        raise RejectedInputError(
            f"ciphertext length {len(ciphertext)} must equal payload length {len(packet.payload)}"
        )
    return SomMessage(id=crc16(ciphertext), fun=packet.fun, payload=bytes(ciphertext))


def try_extract(
    packet: SomMessage,
    km: KeyMaterial,
    expected_seq: int = 0,
    search_window: int = DEFAULT_SEARCH_WINDOW,
    epoch: int = 0,
) -> Chunk | None:
    """Recover the chunk carried by ``packet``, or None if it carries none.

    The caller is expected to pass only packets its classifier marked Silence.
    """
    if crc16(packet.payload) != packet.id:
        return None
    chunk = open_chunk(km, packet.payload, candidate_seqs(expected_seq, search_window), epoch)
    if chunk is None:
        logger.debug("CRC matched but no sequence number near %d decrypts", expected_seq)
    return chunk


def reassemble(
    chunks: Iterable[Chunk],
    total_len: int,
    lengths: dict[int, int] | None = None,
    chunk_count: int | None = None,
) -> tuple[bytes, list[bool]]:
    """Place chunks by sequence number into a byte stream of ``total_len`` bytes.

    Chunks vary in length, so the length of a missing chunk is taken from
    ``lengths`` when known and otherwise assumed to be the mean received length.

    Args:
        chunks: Verified chunks in any order; duplicates are allowed.
        total_len: Secret bytes the transmitter sent.
        lengths: Known chunk lengths by seq.
        chunk_count: Chunks the transmitter sent. When omitted, missing tail
            chunks are inferred until the stream covers ``total_len``.

    Returns:
        The stream (gaps zero-filled) and a bitmap with one entry per chunk.

    Raises:
        IntegrityConflictError: If one seq arrives with two different payloads.
    """
    by_seq: dict[int, bytes] = {}
    for chunk in chunks:
        known = by_seq.get(chunk.seq)
        if known is not None and known != chunk.data:
            raise IntegrityConflictError(f"seq {chunk.seq} received with conflicting data")
        by_seq[chunk.seq] = chunk.data
    if chunk_count is not None:
        stray = [seq for seq in by_seq if seq >= chunk_count]
        if stray:
            logger.debug("ignoring %d chunks beyond the %d sent", len(stray), chunk_count)
        for seq in stray:
            del by_seq[seq]
    if not by_seq:
        return bytes(total_len), [False] * (chunk_count or 0)

    lengths = lengths or {}
    mean_len = max(1, round(float(np.mean([len(data) for data in by_seq.values()]))))
    buffer = bytearray()
    bitmap: list[bool] = []
    seq = 0
    while True:
        if chunk_count is not None:
            if seq >= chunk_count:
                break
        elif seq > max(by_seq) and len(buffer) >= total_len:
            break
        data = by_seq.get(seq)
        if data is None:
            buffer.extend(bytes(lengths.get(seq, mean_len)))
            bitmap.append(False)
        else:
            buffer.extend(data)
            bitmap.append(True)
        seq += 1
    if len(buffer) < total_len:
        buffer.extend(bytes(total_len - len(buffer)))
    return bytes(buffer[:total_len]), bitmap


class CovertTransmitter:
    """Embedding side: classifier, governor, utilization draws and chunk cursor.

    Single-writer: one transmitter per call direction.
    """

    def __init__(
        self,
        km: KeyMaterial,
        secret: bytes,
        classifier: SilenceClassifier,
        governor: LossGovernor,
        utilization: float,
        rng: np.random.Generator,
        epoch: int = 0,
    ):
        self.km = km
        self.secret = secret
        self.classifier = classifier
        self.governor = governor
        self.utilization = utilization
        self.epoch = epoch
        self.stats = EmbedStats()
        self.chunk_lengths: dict[int, int] = {}
        self._rng = rng
        self._cursor = 0
        self._next_chunk = 0

    @property
    def bytes_sent(self) -> int:
        return min(self._cursor, len(self.secret))

    @property
    def chunks_sent(self) -> int:
        return self._next_chunk

    @property
    def exhausted(self) -> bool:
        return self._cursor >= len(self.secret) or self._next_chunk >= SEQ_MODULUS

    def process(self, record: PacketRecord) -> tuple[PacketRecord, SizeClass | None]:
        """Pass one packet through the transmitter.

        Returns:
            The outgoing record (embedded or untouched) and the classifier verdict,
            None for non-data packets.
        """
        self.stats.packets_seen += 1
        message = record.message
        if not is_data_fun(message.fun):
            return record, None
        verdict = self.classifier.classify_and_observe(message.size, record.timestamp)
        if verdict is not SizeClass.SILENCE:
            return record, verdict
        self.stats.silence_identified += 1
        if not self.governor.allows_embedding:
            self.stats.suspended_by_governor += 1
            return record, verdict
        if self.exhausted or len(message.payload) < MIN_PAYLOAD_LEN:
            return record, verdict
        if self._rng.random() >= self.utilization:
            return record, verdict

        payload_len = len(message.payload)
        take = payload_len - SEQ_PREFIX_LEN
        data = self.secret[self._cursor : self._cursor + take]
        carried = len(data)
        data = data.ljust(take, b"\x00")
        seq = self._next_chunk
        ciphertext = seal_chunk(self.km, seq, data, payload_len, self.epoch)
        self.chunk_lengths[seq] = take
        self._cursor += take
        self._next_chunk += 1
        self.stats.embedded += 1
        self.stats.secret_bits_sent += 8 * carried
        if self._next_chunk >= SEQ_MODULUS and self._cursor < len(self.secret):
            logger.warning("epoch %d exhausted after %d chunks; remaining secret is not sent", self.epoch, seq + 1)
        embedded = PacketRecord(
            index=record.index,
            timestamp=record.timestamp,
            message=embed(message, ciphertext),
            truth=record.truth,
        )
        return embedded, verdict


class CovertReceiver:
    """Extraction side: classifies what arrives and buffers verified chunks.

    With ``strict`` a chunk that conflicts with one already held for the same
    seq raises; otherwise the conflict is logged and the first chunk is kept.
    """

    def __init__(
        self,
        km: KeyMaterial,
        classifier: SilenceClassifier,
        epoch: int = 0,
        search_window: int = DEFAULT_SEARCH_WINDOW,
        strict: bool = True,
    ):
        self.km = km
        self.classifier = classifier
        self.epoch = epoch
        self.search_window = search_window
        self.strict = strict
        self.conflicts = 0
        self.chunks: dict[int, Chunk] = {}
        self._expected = 0
        self._last_arrival: int | None = None

    def process(self, record: PacketRecord) -> Chunk | None:
        message = record.message
        if not is_data_fun(message.fun):
            return None
        # Reordered packets arrive no earlier than their predecessors
        arrival = record.timestamp if self._last_arrival is None else max(record.timestamp, self._last_arrival)
        self._last_arrival = arrival
        verdict = self.classifier.classify_and_observe(message.size, arrival)
        if verdict is not SizeClass.SILENCE:
            return None
        chunk = try_extract(message, self.km, self._expected, self.search_window, self.epoch)
        if chunk is None:
            return None
        held = self.chunks.get(chunk.seq)
        if held is not None and held.data != chunk.data:
            if self.strict:
                raise IntegrityConflictError(f"seq {chunk.seq} received with conflicting data")
            self.conflicts += 1
            logger.warning("packet %d: seq %d already held with other data; dropped", record.index, chunk.seq)
            return None
        self.chunks[chunk.seq] = chunk
        self._expected = (chunk.seq + 1) % SEQ_MODULUS
        return chunk

    def delivered_bytes(self, total_len: int) -> int:
        return min(total_len, sum(len(chunk.data) for chunk in self.chunks.values()))

    def finish(
        self,
        total_len: int,
        lengths: dict[int, int] | None = None,
        chunk_count: int | None = None,
    ) -> tuple[bytes, list[bool]]:
        return reassemble(self.chunks.values(), total_len, lengths, chunk_count)
