"""Time the numpy and numba kernel backends against each other.

Run: python3 benchmarks/bench_backends.py
"""

import timeit

import numpy as np

from voicegate.audio_io import Signal
from voicegate.backends import available_backends, set_backend, active_backend
from voicegate.config import PipelineConfig
from voicegate.pipeline import featurize
from voicegate.wavelet_denoise import filter_pair

REPEAT = 5


def bench(label: str, func, number: int) -> float:
    best = min(timeit.repeat(func, number=number, repeat=REPEAT)) / number
    print(f"  {label:<28} {best * 1e3:8.3f} ms")
    return best


def main() -> None:
    rng = np.random.default_rng(7)
    frames = rng.standard_normal((98, 512))
    signal_np = rng.standard_normal(16384)
    lo, hi = filter_pair("db4")
    approx = rng.standard_normal(8192)
    detail = rng.standard_normal(8192)
    clip = Signal(0.5 * rng.standard_normal(16000), 16000)
    config = PipelineConfig()

    results: dict[str, dict[str, float]] = {}
    for name in available_backends():
        set_backend(name)
        backend = active_backend()
        # first calls include any compilation; warm up before timing
        backend.fft_magnitude_batch(frames)
        backend.dwt_analysis(signal_np, lo, hi)
        backend.dwt_synthesis(approx, detail, lo, hi)
        backend.soft_threshold(detail, 0.1)
        featurize(clip, config)

        print(f"backend: {name}")
        results[name] = {
            "fft_magnitude_batch 98x512": bench(
                "fft_magnitude_batch 98x512", lambda: backend.fft_magnitude_batch(frames), 20
            ),
            "dwt_analysis 16384": bench(
                "dwt_analysis 16384", lambda: backend.dwt_analysis(signal_np, lo, hi), 50
            ),
            "dwt_synthesis 8192": bench(
                "dwt_synthesis 8192", lambda: backend.dwt_synthesis(approx, detail, lo, hi), 50
            ),
            "soft_threshold 8192": bench(
                "soft_threshold 8192", lambda: backend.soft_threshold(detail, 0.1), 200
            ),
            "featurize 1s clip": bench("featurize 1s clip", lambda: featurize(clip, config), 5),
        }

    names = list(results)
    if len(names) == 2:
        a, b = names
        print(f"\nspeedup of {b} over {a}:")
        for key in results[a]:
            print(f"  {key:<28} {results[a][key] / results[b][key]:6.2f}x")


if __name__ == "__main__":
    main()
