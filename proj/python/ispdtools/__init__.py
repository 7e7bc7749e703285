"""Intra-departmental correlation modeling and ISPD adjustment.

Thin wrapper around the C++ core. The heavy lifting (likelihoods, the
multi-start optimizer, the simulation harness) lives in ``ispdtools._core``.
"""

from ._core import (
    __version__,
    achieved_rho,
    beta_shape_equiv,
    betoidal_cdf,
    betoidal_pdf,
    betoidal_quantile,
    betoidal_sample,
    betoidal_variance,
    chi2_sf,
    erf_inv,
    fit_cells,
    fit_scaled,
    gen_scores,
    ispd_fcm,
    ispd_original,
    ispd_round,
    ispd_theo,
    lt_betoidal_cdf,
    lt_betoidal_quantile,
    mad,
    mle_sigma_iid,
    norm_cdf,
    norm_quantile,
    owens_t_h0,
    pdc,
    rho,
    rho_np,
    rho_rim,
    scaled_average,
    sigma,
    triplet_select,
)

__all__ = [
    "__version__",
    "achieved_rho",
    "beta_shape_equiv",
    "betoidal_cdf",
    "betoidal_pdf",
    "betoidal_quantile",
    "betoidal_sample",
    "betoidal_variance",
    "chi2_sf",
    "erf_inv",
    "fit_cells",
    "fit_scaled",
    "gen_scores",
    "ispd_fcm",
    "ispd_original",
    "ispd_round",
    "ispd_theo",
    "lt_betoidal_cdf",
    "lt_betoidal_quantile",
    "mad",
    "mle_sigma_iid",
    "norm_cdf",
    "norm_quantile",
    "owens_t_h0",
    "pdc",
    "rho",
    "rho_np",
    "rho_rim",
    "scaled_average",
    "sigma",
    "triplet_select",
]
