"""MMSE channel estimation from orthogonal pilots, and noise whitening.

Estimation error is absorbed into an equivalent noise with covariance
Omega_l = I + rho * sum_k C_lk; whitening by Omega_l^{-1/2} restores a
unit-variance noise model so the dimension-reduction and compression stages
can run unchanged on the whitened estimated channels.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import NumericalError
from .scenario import PERFECT_CSI


@dataclass
class CsiModel:
    """Channel estimates plus whitening state for one realization.

    err_var[l, k] is the per-antenna MMSE error variance of link (l, k), so the
    error covariance is err_var[l, k] * I_M. Omega / H_check / omega_inv_sqrt
    are filled in by whiten() since they depend on the uplink SNR.
    """

    H_hat: list                      # L estimated matrices, (M, K)
    err_var: np.ndarray              # (L, K)
    H_true: list                     # the true channels, kept for quantiser-noise evaluation
    Omega: list | None = None        # L equivalent-noise covariances, (M, M) diagonal
    H_check: list | None = None      # whitened estimated channels Omega^{-1/2} H_hat
    omega_inv_sqrt: list | None = None  # L whitening transforms, (M, M) diagonal


def estimate_channels(channels, pilot_snr, rng):
    """Per-link MMSE estimate from one orthogonal pilot symbol at SNR pilot_snr.

    With prior per-antenna variance s2 = p_k beta_lk and pilot observation
    y = sqrt(pilot_snr) h + n (unit-variance noise), the estimate is
    h_hat = sqrt(pilot_snr) s2 / (1 + pilot_snr s2) * y with error variance
    s2 / (1 + pilot_snr s2) per antenna. pilot_snr may be "perfect".
    """
    L = len(channels.H)
    M, K = channels.H[0].shape
    if isinstance(pilot_snr, str):
        if pilot_snr != PERFECT_CSI:
            raise ValueError(f"pilot_snr must be a positive number or '{PERFECT_CSI}'")
        H_hat = [Hl.copy() for Hl in channels.H]
        err_var = np.zeros((L, K))
        return CsiModel(H_hat=H_hat, err_var=err_var, H_true=channels.H)
    if pilot_snr <= 0:
        raise ValueError("pilot_snr must be > 0")

    sigma2 = channels.p[None, :] * channels.beta          # (L, K) prior variance
    noise = (rng.standard_normal((L, M, K)) + 1j * rng.standard_normal((L, M, K))) / np.sqrt(2.0)
    coeff = np.sqrt(pilot_snr) * sigma2 / (1.0 + pilot_snr * sigma2)   # (L, K)
    H_hat = []
    for l in range(L):
        y_pilot = np.sqrt(pilot_snr) * channels.H[l] + noise[l]
        H_hat.append(coeff[l][None, :] * y_pilot)
    err_var = sigma2 / (1.0 + pilot_snr * sigma2)
    return CsiModel(H_hat=H_hat, err_var=err_var, H_true=channels.H)


def whiten(csi, rho):
    """Compute Omega_l = I + rho * sum_k err_var[l,k] * I and whiten the estimates.

    Omega is diagonal here (isotropic error covariances), so the whitening
    transform is the elementwise reciprocal square root of its diagonal.
    Fills csi.Omega, csi.H_check and csi.omega_inv_sqrt; returns (H_check, omega_inv_sqrt).
    """
    L = len(csi.H_hat)
    M = csi.H_hat[0].shape[0]
    Omega, H_check, omega_inv_sqrt = [], [], []
    for l in range(L):
        diag = np.full(M, 1.0 + rho * float(np.sum(csi.err_var[l])))
        if np.any(diag <= 0):
            raise NumericalError(f"equivalent-noise covariance for receiver {l} is not positive definite")
        w = 1.0 / np.sqrt(diag)
        Omega.append(np.diag(diag))
        omega_inv_sqrt.append(np.diag(w))
        H_check.append(w[:, None] * csi.H_hat[l])
    csi.Omega = Omega
    csi.H_check = H_check
    csi.omega_inv_sqrt = omega_inv_sqrt
    return H_check, omega_inv_sqrt
