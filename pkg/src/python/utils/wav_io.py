# src/python/utils/wav_io.py

import io
import struct
import warnings

import numpy as np
import numpy.typing as npt
from scipy.io import wavfile

from .constants import ErrorCode
from .exceptions import AudioError
from .logger import get_logger
from .types import WavInfo

logger = get_logger(__name__)

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_EXTENSIBLE = 0xFFFE
SUPPORTED_BITS = (8, 16, 24, 32)

def _inspect_header(data: bytes) -> WavInfo:
    """
    Walks the RIFF chunk list and checks the container before any sample is
    decoded, so every rejection maps to a precise code.

    :rtype: WavInfo
    :raises AudioError: ``NotRiff``, ``UnsupportedCodec`` or ``TruncatedData``.
    """
    if len(data) < 12 or data[0:4] != b'RIFF' or data[8:12] != b'WAVE':
        raise AudioError(ErrorCode.NOT_RIFF, f"Not a little-endian RIFF/WAVE file (starts with {data[:4]!r})")

    fmt = None
    offset = 12
    while offset + 8 <= len(data):
        chunk_id = data[offset:offset + 4]
        (chunk_size,) = struct.unpack_from('<I', data, offset + 4)
        body = offset + 8

        if chunk_id == b'fmt ':
            if chunk_size < 16 or body + 16 > len(data):
                raise AudioError(ErrorCode.TRUNCATED_DATA, "fmt chunk is shorter than 16 bytes")
            audio_format, channels, sample_rate, _, block_align, bits = struct.unpack_from('<HHIIHH', data, body)
            if audio_format == WAVE_FORMAT_EXTENSIBLE and chunk_size >= 40 and body + 26 <= len(data):
                # First two bytes of the SubFormat GUID carry the real format tag
                (audio_format,) = struct.unpack_from('<H', data, body + 24)
            if audio_format != WAVE_FORMAT_PCM:
                raise AudioError(ErrorCode.UNSUPPORTED_CODEC, f"Format tag 0x{audio_format:04x} is not PCM")
            if bits not in SUPPORTED_BITS or channels < 1 or sample_rate < 1:
                raise AudioError(ErrorCode.UNSUPPORTED_CODEC,
                                 f"Unsupported PCM layout ({channels} ch, {bits} bit, {sample_rate} Hz)")
            fmt = (channels, sample_rate, bits, block_align or channels * bits // 8)

        elif chunk_id == b'data':
            if fmt is None:
                raise AudioError(ErrorCode.UNSUPPORTED_CODEC, "data chunk precedes the fmt chunk")
            available = len(data) - body
            if available < chunk_size:
                raise AudioError(ErrorCode.TRUNCATED_DATA,
                                 f"data chunk declares {chunk_size} bytes, only {available} present")
            channels, sample_rate, bits, block_align = fmt
            return WavInfo(sample_rate=sample_rate, channels=channels,
                           bits_per_sample=bits, n_samples=chunk_size // block_align)

        offset = body + chunk_size + (chunk_size & 1)

    if fmt is None:
        raise AudioError(ErrorCode.NOT_RIFF, "No fmt chunk found")
    raise AudioError(ErrorCode.TRUNCATED_DATA, "No data chunk found")

def read_wav(data: bytes, warnings_out: list[str] | None = None
             ) -> tuple[WavInfo, npt.NDArray[np.float64]]:
    """
    Decodes a PCM RIFF/WAVE file into mono samples normalized to [-1, 1].

    Multi-channel audio is averaged to mono and noted in ``warnings_out``.

    :param data: The raw file bytes.
    :type data: bytes
    :param warnings_out: Optional collector for nonfatal notes.
    :type warnings_out: list[str] or None

    :returns: The header and the samples.
    :rtype: tuple[:py:class:`~src.python.utils.types.WavInfo`, numpy.ndarray]
    :raises AudioError: ``NotRiff``, ``UnsupportedCodec`` or ``TruncatedData``.
    """
    info = _inspect_header(data)

    try:
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', wavfile.WavFileWarning)
            _, raw = wavfile.read(io.BytesIO(data))
    except ValueError as e:
        logger.error(f"scipy could not decode a WAV that passed the header walk: {e}")
        raise AudioError(ErrorCode.UNSUPPORTED_CODEC, str(e), original_exception=e) from e

    if raw.dtype == np.uint8:
        samples = (raw.astype(np.float64) - 128.0) / 128.0
    elif raw.dtype == np.int16:
        samples = raw.astype(np.float64) / 32768.0
    elif raw.dtype == np.int32:
        # 24-bit input is returned left-aligned in int32
        samples = raw.astype(np.float64) / 2147483648.0
    else:
        raise AudioError(ErrorCode.UNSUPPORTED_CODEC, f"Unexpected sample type {raw.dtype}")

    if samples.ndim == 2:
        if samples.shape[1] > 1:
            note = f"{samples.shape[1]}-channel audio averaged to mono"
            logger.warning(note)
            if warnings_out is not None:
                warnings_out.append(note)
        samples = samples.mean(axis=1)

    return info, samples

def synth_wav(segments: list[tuple[str, float]], sample_rate: int = 16000,
              amplitude: float = 1.0, frequency: float = 440.0, channels: int = 1) -> bytes:
    """
    Builds a 16-bit PCM WAV from ``("tone" | "silence", seconds)`` segments.
    Used to construct audit fixtures whose net speech is known.

    :param segments: Segment kinds and lengths, in order.
    :type segments: list[tuple[str, float]]
    :param sample_rate: Sampling rate in Hz.
    :type sample_rate: int
    :param amplitude: Peak amplitude of tones, 1.0 is full scale.
    :type amplitude: float
    :param frequency: Tone frequency in Hz.
    :type frequency: float
    :param channels: Number of identical channels to write.
    :type channels: int

    :returns: The file bytes.
    :rtype: bytes
    """
    parts = []
    for kind, seconds in segments:
        n = int(round(seconds * sample_rate))
        if kind == "tone":
            t = np.arange(n) / sample_rate
            parts.append(amplitude * np.sin(2.0 * np.pi * frequency * t))
        elif kind == "silence":
            parts.append(np.zeros(n))
        else:
            raise ValueError(f"Unknown segment kind {kind!r}")

    signal = np.concatenate(parts) if parts else np.zeros(0)
    pcm = np.clip(np.round(signal * 32767.0), -32768, 32767).astype(np.int16)
    if channels > 1:
        pcm = np.repeat(pcm[:, None], channels, axis=1)

    buffer = io.BytesIO()
    wavfile.write(buffer, sample_rate, pcm)
    return buffer.getvalue()
