from .kernels import BlurKernel, KernelBank, load_kernel, load_kernel_bank, parse_kernel, save_kernel
from .synth import BlurPair, apply_blur, choose_kernel, make_pair

__all__ = [
    "BlurKernel", "KernelBank", "load_kernel", "load_kernel_bank", "parse_kernel", "save_kernel",
    "BlurPair", "apply_blur", "choose_kernel", "make_pair",
]
