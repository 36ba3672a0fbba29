"""Lossy channel with an entangling-cloner attacker.

The transmitted mode is mixed with one arm of the attacker's EPR pair
(variance W) on a beam splitter of transmission T.  The attacker keeps both
the reflected output E' and the retained arm E''.  This module produces the
legitimate parties' covariance, the attacker's covariance, the correlation
matrices between the attacker and either party, and the conditioned attacker
covariances after homodyne or heterodyne detection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .symplectic import (
    I2,
    X_PROJECT,
    Z,
    TwoModeCovariance,
    _det2,
    symplectic_spectrum,
)

_ISOTROPY_TOL = 1e-10


@dataclass(frozen=True)
class ChannelParams:
    """Beam-splitter transmission T in [0, 1] and cloner variance W >= 1."""

    t: float
    w: float

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "w", float(self.w))
        if not math.isfinite(self.t) or not 0.0 <= self.t <= 1.0:
            raise InvalidParameter(f"transmission must lie in [0, 1], got {self.t!r}")
        if not math.isfinite(self.w) or self.w < 1.0:
            raise InvalidParameter(f"cloner variance must satisfy W >= 1, got {self.w!r}")


@dataclass(frozen=True)
class ChannelOutput:
    """Everything the key-rate computation needs after the cloner acted.

    ``d_dr`` collects the correlations of the attacker's modes with the
    sender's retained mode, ``d_rr`` with the receiver's mode; both are 4x2
    stacks of a multiple of I over a multiple of Z.
    """

    sigma_ab: TwoModeCovariance
    sigma_e: TwoModeCovariance
    d_dr: np.ndarray
    d_rr: np.ndarray
    v_a: float
    v_b: float
    gamma_prime: float
    e_v: float
    phi: float
    zeta: float
    eta: float
    zeta_prime: float
    eta_prime: float


def excess_noise_delta(params: ChannelParams) -> float:
    """Excess noise above vacuum at the channel output: W - 1."""
    return params.w - 1.0


def excess_noise_epsilon(params: ChannelParams) -> float:
    """Excess noise referred to the channel input: (W - 1)(1 - T)/T.

    Raises ZeroDivisionError for T = 0, where the referred noise diverges.
    """
    return (params.w - 1.0) * (1.0 - params.t) / params.t


def correlation_matrix(zeta: float, eta: float) -> np.ndarray:
    """Stack (zeta*I over eta*Z) describing two-mode/one-mode correlations."""
    return np.vstack((zeta * I2, eta * Z))


def apply_entangling_cloner(source: TwoModeCovariance, params: ChannelParams) -> ChannelOutput:
    """Send mode 2 of a block-form source through the entangling cloner.

    The correlations inherited by the attacker's reflected mode scale with
    the source cross-correlation gamma: the sender's retained mode never
    touches the channel, so it couples to the attacker only through gamma.
    """
    alpha, beta, gamma = source.block_form()
    t, w = params.t, params.w
    rt = math.sqrt(t)
    rr = math.sqrt(1.0 - t)

    v_b = t * beta + (1.0 - t) * w
    gamma_prime = rt * gamma
    e_v = (1.0 - t) * beta + t * w
    phi = math.sqrt(t * (w * w - 1.0))
    zeta = rr * gamma
    eta = 0.0
    zeta_prime = math.sqrt(t * (1.0 - t)) * (w - beta)
    eta_prime = rr * math.sqrt(w * w - 1.0)

    sigma_ab = TwoModeCovariance(alpha * I2, v_b * I2, gamma_prime * Z)
    sigma_e = TwoModeCovariance(e_v * I2, w * I2, phi * Z)
    return ChannelOutput(
        sigma_ab=sigma_ab,
        sigma_e=sigma_e,
        d_dr=correlation_matrix(zeta, eta),
        d_rr=correlation_matrix(zeta_prime, eta_prime),
        v_a=alpha,
        v_b=v_b,
        gamma_prime=gamma_prime,
        e_v=e_v,
        phi=phi,
        zeta=zeta,
        eta=eta,
        zeta_prime=zeta_prime,
        eta_prime=eta_prime,
    )


def _conditioned(sigma_e: TwoModeCovariance, update: np.ndarray) -> TwoModeCovariance:
    out = TwoModeCovariance.from_matrix(sigma_e.matrix - update)
    symplectic_spectrum(out)  # raises NonPhysicalState when conditioning is inconsistent
    return out


def condition_on_homodyne(
    sigma_e: TwoModeCovariance, d: np.ndarray, v_meas: float
) -> TwoModeCovariance:
    """Attacker covariance after one party homodynes its X quadrature.

    sigma_E - (1/v_meas) * D Pi D^T, where Pi projects onto the measured
    quadrature and v_meas is the measured party's variance.
    """
    if not math.isfinite(v_meas) or v_meas <= 0.0:
        raise InvalidParameter(f"measured variance must be positive, got {v_meas!r}")
    d = np.asarray(d, dtype=float)
    return _conditioned(sigma_e, (d @ X_PROJECT @ d.T) / v_meas)


def condition_on_heterodyne(
    sigma_e: TwoModeCovariance, d: np.ndarray, sigma_meas: np.ndarray
) -> TwoModeCovariance:
    """Attacker covariance after one party heterodynes both quadratures.

    sigma_E - (1/Lambda) * D (sigma_meas + I) D^T with
    Lambda = det(sigma_meas) + tr(sigma_meas) + 1.  The measured party's
    covariance must be isotropic (v * I).
    """
    sigma_meas = np.asarray(sigma_meas, dtype=float)
    if sigma_meas.shape != (2, 2):
        raise InvalidParameter("measured covariance must be 2x2")
    scale = max(1.0, float(np.abs(sigma_meas).max()))
    iso = abs(sigma_meas[0, 0] - sigma_meas[1, 1]) <= _ISOTROPY_TOL * scale
    off = max(abs(sigma_meas[0, 1]), abs(sigma_meas[1, 0])) <= _ISOTROPY_TOL * scale
    if not (iso and off):
        raise InvalidParameter("measured covariance must be isotropic (v * I)")
    lam = _det2(sigma_meas) + float(np.trace(sigma_meas)) + 1.0
    if lam <= 0.0:
        raise InvalidParameter(f"heterodyne normalization must be positive, got {lam!r}")
    d = np.asarray(d, dtype=float)
    return _conditioned(sigma_e, (d @ (sigma_meas + I2) @ d.T) / lam)


def heterodyne_measured_variance(v: float) -> float:
    """Variance recorded by a heterodyne detector on a mode of variance v."""
    return 0.5 * (v + 1.0)
