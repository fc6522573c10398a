"""Piecewise-exponential Green kernel for the reduced linear operator.

The reduced linear operator factors as ``prod_l (d/dt - gamma_l)`` over
the shifted spectrum.  Its unique kernel that decays away from the
diagonal takes one exponential term per root,

    g(t, s) = sum_l  sign_l * c_l * exp(gamma_l (t - s)),
    c_l = 1 / prod_{j != l} (gamma_l - gamma_j),

where a term with gamma_l < 0 lives on t >= s (causal, sign +1) and a
term with gamma_l > 0 lives on s >= t (anticausal, sign -1).  Partial
fractions of 1 / prod(s - gamma_l) give the c_l, which also makes the
jump of the (n-2)-th t-derivative across t = s exactly +1; the jump is
still measured at construction time and the recorded sign is trusted over
any printed bookkeeping.

Note the support orientation: a spectrum that is entirely negative
(case 1) yields a kernel supported on s <= t, an entirely positive one
(case n) on s >= t, and mixed spectra decay on both sides.  This is the
orientation forced by requiring g to actually satisfy the homogeneous
equation off the diagonal; it is the mirror of a common convention that
attaches the Heaviside factors the other way around.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import ShiftedSpectrum

JUMP_TOL = 1e-10


def upsilon(values, ell: int) -> float:
    """Gap products: ell = 0 is the full product over ordered pairs,
    ell >= 1 omits every pair touching index ell (1-based); an empty
    product is 1."""
    vals = tuple(float(v) for v in values)
    d = len(vals)
    if not 0 <= ell <= d:
        raise ValueError(f"ell={ell} outside 0..{d}")
    out = 1.0
    for i in range(d):
        for j in range(i + 1, d):
            if ell and (i == ell - 1 or j == ell - 1):
                continue
            out *= vals[j] - vals[i]
    return out


@dataclass(frozen=True)
class GreenKernel:
    gamma: ShiftedSpectrum
    upsilon0: float
    weights: tuple[float, ...]  # G_l = (-1)^l * Upsilon_l, kept for reporting
    case_index: int
    coeffs: tuple[float, ...]  # c_l = 1 / prod_{j != l}(gamma_l - gamma_j)
    causal: tuple[bool, ...]  # True: term lives on t >= s
    jump_sign: float  # sign of the (n-2)-th derivative jump at t = s

    @property
    def n(self) -> int:
        return self.gamma.n

    def term_sign(self, ell: int) -> float:
        return self.jump_sign * (1.0 if self.causal[ell] else -1.0)

    def derivative(self, t, s, j: int):
        """d^j g / dt^j at (t, s); t scalar, s scalar or array.

        Orders up to n-2 are the kernel contract (the n-2 one jumps at
        t = s, where the t > s branch is returned); higher orders are
        one-sided values used by diagnostics.
        """
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape)
        for ell, gam in enumerate(self.gamma.gamma):
            if self.causal[ell]:
                mask = t >= s
            else:
                mask = s > t
            if not np.any(mask):
                continue
            term = (
                self.term_sign(ell)
                * self.coeffs[ell]
                * gam ** j
                * np.exp(gam * (t - s[mask]))
            )
            out[mask] += term
        if out.ndim == 0:
            return float(out)
        return out

    def abs_derivative_sum(self, t, s):
        """sum_{j=0}^{n-2} |d^j g/dt^j| at (t, s)."""
        total = 0.0
        for j in range(self.n - 1):
            total = total + np.abs(self.derivative(t, s, j))
        return total

    def decay_rate(self) -> float:
        """Slowest decay rate away from the diagonal."""
        return min(abs(g) for g in self.gamma.gamma)


def build_kernel(gamma: ShiftedSpectrum) -> GreenKernel:
    """Assemble the kernel and pin its global sign with the jump check."""
    gams = gamma.gamma
    d = len(gams)
    if d != len(set(gams)) or any(g == 0.0 for g in gams):
        raise ValueError(f"degenerate shifted spectrum {gams}")

    coeffs = []
    for ell, gam in enumerate(gams):
        denom = 1.0
        for j, other in enumerate(gams):
            if j != ell:
                denom *= gam - other
        coeffs.append(1.0 / denom)
    causal = tuple(g < 0 for g in gams)

    # jump of the (n-2)-th t-derivative at t = s: causal terms enter the
    # t > s side, anticausal ones the t < s side with their minus sign
    jump = sum(c * g ** (d - 1) for c, g in zip(coeffs, gams))
    if abs(abs(jump) - 1.0) > JUMP_TOL:
        raise ValueError(f"kernel jump magnitude {jump} is not 1")
    jump_sign = 1.0 if jump > 0 else -1.0

    u0 = upsilon(gams, 0)
    weights = tuple((-1.0) ** ell * upsilon(gams, ell) for ell in range(1, d + 1))
    return GreenKernel(
        gamma=gamma,
        upsilon0=u0,
        weights=weights,
        case_index=gamma.case_index,
        coeffs=tuple(coeffs),
        causal=causal,
        jump_sign=jump_sign,
    )


def kernel_derivative(kernel: GreenKernel, t, s, j: int):
    """Module-level alias matching the operation name."""
    return kernel.derivative(t, s, j)
