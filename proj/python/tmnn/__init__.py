"""Tensor + Casorati nuclear norm reconstruction of dynamic images.

Thin re-export of the compiled core. Tensors are numpy complex128
arrays of shape (n1, n2, n3); masks are bool arrays of the same shape.
"""

from ._tmnn import (
    add_noise,
    apply_A,
    apply_A_star,
    casorati_nn,
    conj_transpose,
    dft3,
    fft2_per_frame,
    idft3,
    ifft2_per_frame,
    load_mask,
    load_tensor,
    make_phantom,
    nmse,
    objective,
    pseudo_radial_mask,
    save_mask,
    save_tensor,
    snr_db,
    solve,
    svt,
    t_product,
    t_svd,
    tnn,
    tsvt,
    variable_density_mask,
)

__all__ = [
    "add_noise",
    "apply_A",
    "apply_A_star",
    "casorati_nn",
    "conj_transpose",
    "dft3",
    "fft2_per_frame",
    "idft3",
    "ifft2_per_frame",
    "load_mask",
    "load_tensor",
    "make_phantom",
    "nmse",
    "objective",
    "pseudo_radial_mask",
    "save_mask",
    "save_tensor",
    "snr_db",
    "solve",
    "svt",
    "t_product",
    "t_svd",
    "tnn",
    "tsvt",
    "variable_density_mask",
]
