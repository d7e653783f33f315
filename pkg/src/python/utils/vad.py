# src/python/utils/vad.py

import numpy as np
import numpy.typing as npt

from .types import VadParams

def frame_energies(samples: npt.ArrayLike, sample_rate: int,
                   params: VadParams = VadParams()) -> npt.NDArray[np.float64]:
    """
    Energy (sum of squares) of each analysis frame. A signal shorter than one
    frame is treated as a single frame.

    :param samples: Mono samples.
    :type samples: array-like of float
    :param sample_rate: Sampling rate in Hz.
    :type sample_rate: int
    :param params: Framing parameters.
    :type params: :py:class:`~src.python.utils.types.VadParams`

    :rtype: numpy.ndarray
    """
    x = np.asarray(samples, dtype=np.float64)
    frame_len = max(1, int(round(sample_rate * params.frame_ms / 1000.0)))
    shift = max(1, int(round(sample_rate * params.shift_ms / 1000.0)))
    if x.size < frame_len:
        return np.array([np.dot(x, x)])
    frames = np.lib.stride_tricks.sliding_window_view(x, frame_len)[::shift]
    return np.einsum('ij,ij->i', frames, frames)

def speech_frames(samples: npt.ArrayLike, sample_rate: int,
                  params: VadParams = VadParams()) -> npt.NDArray[np.bool_]:
    """
    Labels frames as speech when their energy lies within ``threshold_db`` of
    the loudest frame. Digital silence has no speech frames.

    The comparison is made on linear energies, so scaling all samples by a
    constant does not move any frame across the threshold.

    :rtype: numpy.ndarray of bool
    """
    energies = frame_energies(samples, sample_rate, params)
    peak = energies.max()
    if peak <= 0.0:
        return np.zeros(energies.shape, dtype=bool)
    return energies >= peak * 10.0 ** (-params.threshold_db / 10.0)

def net_speech_duration(samples: npt.ArrayLike, sample_rate: int,
                        params: VadParams = VadParams()) -> float:
    """
    Net speech in seconds: speech-frame count times the shift, plus the part of
    the last frame that extends past its shift. Clamped to the file duration.

    :param samples: Mono samples.
    :type samples: array-like of float
    :param sample_rate: Sampling rate in Hz.
    :type sample_rate: int
    :param params: VAD parameters.
    :type params: :py:class:`~src.python.utils.types.VadParams`

    :returns: Seconds of speech, within ``[0, len(samples) / sample_rate]``.
    :rtype: float
    """
    x = np.asarray(samples, dtype=np.float64)
    duration = x.size / sample_rate
    if x.size == 0:
        return 0.0
    count = int(np.count_nonzero(speech_frames(x, sample_rate, params)))
    if count == 0:
        return 0.0
    frame_len = max(1, int(round(sample_rate * params.frame_ms / 1000.0)))
    shift = max(1, int(round(sample_rate * params.shift_ms / 1000.0)))
    net = (count * shift + (frame_len - shift)) / sample_rate
    return min(max(net, 0.0), duration)
