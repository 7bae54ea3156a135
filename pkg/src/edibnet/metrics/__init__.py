from .quality import SSIM_K1, SSIM_K2, SSIM_SIGMA, SSIM_WINDOW, gaussian_window, psnr, ssim, ssim_map
from .profiler import (
    FLOPS_PER_ELEMENT,
    BenchmarkResult,
    ComplexityReport,
    LayerCost,
    benchmark_forward,
    count_complexity,
    thread_setting,
)

__all__ = [
    "SSIM_K1", "SSIM_K2", "SSIM_SIGMA", "SSIM_WINDOW", "gaussian_window", "psnr", "ssim", "ssim_map",
    "FLOPS_PER_ELEMENT", "BenchmarkResult", "ComplexityReport", "LayerCost", "benchmark_forward",
    "count_complexity", "thread_setting",
]
