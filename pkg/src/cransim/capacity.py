"""Capacity metrics: optimal and LMMSE detection, references and bounds."""

from dataclasses import dataclass

import numpy as np

from .dimred import full_joint_mi
from .linalg import hermitize, logdet2_hpd


@dataclass
class CapacityReport:
    """Capacity summary of one realization under one compression pipeline.

    Under imperfect CSI (csi_mode "lower-bound"), sum_capacity, user_capacity,
    reduced_mi and full_mi are the achievable lower-bound quantities computed
    on the whitened estimated channels; cutset always refers to the true ones.
    """

    sum_capacity: float
    user_capacity: np.ndarray
    sqinr: np.ndarray
    cutset: float
    full_mi: float
    reduced_mi: float
    csi_mode: str = "perfect"


def _detection_matrix(G_list, phi_list, rho, K):
    """I_K + rho * sum_l G_l' (Phi_l + I)^{-1} G_l, exploiting diagonal Phi."""
    B = np.eye(K, dtype=complex)
    for G, phi in zip(G_list, phi_list):
        if G.shape[0] == 0:
            continue
        W = G / (np.asarray(phi, dtype=float) + 1.0)[:, None]
        B += rho * (G.conj().T @ W)
    return B


def sum_capacity(G_list, phi_list, rho, K=None):
    """Sum capacity log2 det(I_K + rho * sum_l G_l' (Phi_l + I)^{-1} G_l), bits/use.

    G_list rows must already be restricted to active components with the
    matching diagonal Phi entries. An empty G_list (everything dropped) gives 0,
    provided K is supplied.
    """
    if not G_list:
        if K is None:
            raise ValueError("K is required when all components are dropped")
        return 0.0
    return logdet2_hpd(_detection_matrix(G_list, phi_list, rho, G_list[0].shape[1]))


def lmmse_sqinr(G_list, phi_list, rho, K=None):
    """Per-user SQINR and capacity under LMMSE symbol detection.

    SQINR_k = 1 / [(I_K + rho sum G'(Phi+I)^{-1}G)^{-1}]_kk - 1 and
    C_k = log2(1 + SQINR_k). Returns (sqinr, user_capacity), both length K.
    """
    if not G_list:
        if K is None:
            raise ValueError("K is required when all components are dropped")
        return np.zeros(K), np.zeros(K)
    B = _detection_matrix(G_list, phi_list, rho, G_list[0].shape[1])
    Binv = np.linalg.inv(hermitize(B))
    d = np.real(np.diag(Binv))
    sqinr = np.maximum(1.0 / d - 1.0, 0.0)
    return sqinr, np.log2(1.0 + sqinr)


def lmmse_weights(G_list, phi_list, rho):
    """Explicit LMMSE combining weights, one (K, n_active) matrix per receiver.

    W_l = rho * (I + rho sum G'(Phi+I)^{-1}G)^{-1} G_l' (Phi_l + I)^{-1}.
    Diagnostic companion to lmmse_sqinr; applying these weights attains the
    same per-user SQINR.
    """
    B = _detection_matrix(G_list, phi_list, rho, G_list[0].shape[1])
    Binv = np.linalg.inv(hermitize(B))
    return [rho * (Binv @ G.conj().T) / (np.asarray(phi, dtype=float) + 1.0)[None, :]
            for G, phi in zip(G_list, phi_list)]


def cutset_bound(H, rho, R):
    """min(R*L, full joint MI): upper bound on any compression scheme's sum capacity."""
    return min(R * len(H), full_joint_mi(H, rho))


def capacity_report(G_list, phi_list, H_cutset, H_reference, rho, R, reduced_mi,
                    csi_mode="perfect"):
    """Assemble the CapacityReport for one realized compression pipeline.

    H_reference carries the channels the pipeline was designed on (whitened
    estimates under imperfect CSI) and fixes full_mi; H_cutset carries the true
    channels for the cut-set bound.
    """
    K = H_reference[0].shape[1]
    sqinr, user_c = lmmse_sqinr(G_list, phi_list, rho, K=K)
    return CapacityReport(
        sum_capacity=sum_capacity(G_list, phi_list, rho, K=K),
        user_capacity=user_c,
        sqinr=sqinr,
        cutset=cutset_bound(H_cutset, rho, R),
        full_mi=full_joint_mi(H_reference, rho),
        reduced_mi=reduced_mi,
        csi_mode=csi_mode,
    )
