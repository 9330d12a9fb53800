"""
Serial frame codec for the sensor card readout.

Wire layout, 67 bytes::

    [0xAA][seq][code_0 hi][code_0 lo] ... [code_31 hi][code_31 lo][checksum]

Codes are 10 bit values right-justified in big-endian 16 bit words. The
checksum is ``(seq + sum of the 64 payload bytes) mod 256``; the sync
byte is not included. A capture file is the plain concatenation of
frames.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable, Iterator

__all__ = [
    "SYNC",
    "FRAME_CODES",
    "FRAME_SIZE",
    "Frame",
    "FrameError",
    "SyncError",
    "ChecksumError",
    "IncompleteFrameError",
    "encode_frame",
    "decode_frame",
    "FrameDecoder",
    "iter_frames",
]

SYNC = 0xAA
FRAME_CODES = 32
FRAME_SIZE = 2 + 2 * FRAME_CODES + 1
CODE_MAX = 1023

_BODY = struct.Struct(">BB%dH" % FRAME_CODES)


class FrameError(ValueError):
    pass


class SyncError(FrameError):
    pass


class ChecksumError(FrameError):
    pass


class IncompleteFrameError(FrameError):
    pass


def _checksum(body: bytes) -> int:
    # body starts with the sync byte, which is excluded
    return sum(body[1:]) & 0xFF


@dataclass(frozen=True)
class Frame:
    sequence: int
    codes: tuple[int, ...]

    def __post_init__(self):
        codes = tuple(int(c) for c in self.codes)
        if len(codes) != FRAME_CODES:
            raise FrameError(f"frame needs {FRAME_CODES} codes, got {len(codes)}")
        if not 0 <= self.sequence <= 255:
            raise FrameError(f"sequence {self.sequence} does not fit in a byte")
        bad = [c for c in codes if not 0 <= c <= CODE_MAX]
        if bad:
            raise FrameError(f"codes outside 0..{CODE_MAX}: {bad[:4]}")
        object.__setattr__(self, "codes", codes)

    @property
    def sync(self) -> int:
        return SYNC

    @property
    def checksum(self) -> int:
        return _checksum(_BODY.pack(SYNC, self.sequence, *self.codes))


def encode_frame(frame: Frame) -> bytes:
    body = _BODY.pack(SYNC, frame.sequence, *frame.codes)
    return body + bytes([_checksum(body)])


def decode_frame(data: bytes) -> Frame:
    """Decode the frame that starts at ``data[0]``.

    Raises :class:`IncompleteFrameError` on a short buffer,
    :class:`SyncError` when ``data[0]`` is not the sync byte and
    :class:`ChecksumError` on a checksum mismatch.
    """
    if len(data) < FRAME_SIZE:
        raise IncompleteFrameError(f"need {FRAME_SIZE} bytes, have {len(data)}")
    if data[0] != SYNC:
        raise SyncError(f"expected sync 0x{SYNC:02X}, got 0x{data[0]:02X}")
    body = bytes(data[: FRAME_SIZE - 1])
    expected = _checksum(body)
    got = data[FRAME_SIZE - 1]
    if got != expected:
        raise ChecksumError(
            f"checksum mismatch (seq byte {body[1]}): computed 0x{expected:02X}, received 0x{got:02X}"
        )
    _, seq, *codes = _BODY.unpack(body)
    bad = [c for c in codes if c > CODE_MAX]
    if bad:
        raise FrameError(f"code {bad[0]} exceeds 10 bits")
    return Frame(sequence=seq, codes=tuple(codes))


class FrameDecoder:
    """Incremental decoder for a byte stream that may contain garbage.

    Bytes are fed in arbitrary chunks. After a rejected frame the decoder
    skips the offending sync byte and hunts for the next one. Rejections
    and skipped bytes are kept in :attr:`diagnostics`.
    """

    def __init__(self):
        self._buf = bytearray()
        self._offset = 0  # stream position of _buf[0]
        self.diagnostics: list[str] = []
        self.skipped = 0

    def feed(self, chunk: bytes) -> list[Frame]:
        self._buf += chunk
        frames = []
        while True:
            start = self._buf.find(SYNC)
            if start < 0:
                self._drop(len(self._buf))
                break
            if start:
                self._drop(start)
            if len(self._buf) < FRAME_SIZE:
                break
            try:
                frames.append(decode_frame(self._buf))
            except FrameError as exc:
                self.diagnostics.append(f"offset {self._offset}: {exc}")
                self._drop(1)
            else:
                del self._buf[:FRAME_SIZE]
                self._offset += FRAME_SIZE
        return frames

    def _drop(self, n: int):
        self.skipped += n
        self._offset += n
        del self._buf[:n]

    @property
    def pending(self) -> int:
        """Bytes held back waiting for the rest of a frame."""
        return len(self._buf)

    def close(self):
        """Signal end of stream; a held partial frame is an error."""
        if self._buf:
            n = len(self._buf)
            self.diagnostics.append(f"offset {self._offset}: incomplete frame ({n} bytes)")
            raise IncompleteFrameError(f"stream ended inside a frame ({n} of {FRAME_SIZE} bytes)")


def iter_frames(data: bytes | Iterable[bytes], strict: bool = False) -> Iterator[Frame]:
    """Yield every valid frame in a capture, resynchronising past damage.

    A truncated trailing frame is dropped silently unless ``strict``.
    """
    chunks = [data] if isinstance(data, (bytes, bytearray, memoryview)) else data
    dec = FrameDecoder()
    for chunk in chunks:
        yield from dec.feed(bytes(chunk))
    if strict:
        dec.close()
