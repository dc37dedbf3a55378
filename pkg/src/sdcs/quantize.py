"""PCM and noise-shaping quantizers.

The quantizers here map a real measurement vector ``y`` to a vector ``q``
whose entries live on a uniform alphabet, while keeping the internal state
``u`` of the recursion ``H u = y - q`` bounded.  ``H`` is the noise-shaping
matrix: the identity for PCM, the r-th power of the difference matrix for an
r-th order sigma-delta scheme, and variants (high-pass, leaky) built from the
same banded structure.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Alphabet",
    "NoiseShaper",
    "QuantizationResult",
    "RateDistortionPlan",
    "difference_matrix",
    "pcm_quantize",
    "sigma_delta_quantize",
    "shape_quantize",
    "rate_distortion_plan",
]


def difference_matrix(m):
    """The m x m lower-bidiagonal difference matrix (1 diagonal, -1 below)."""
    return np.eye(m) - np.eye(m, k=-1)


@dataclass(frozen=True)
class Alphabet:
    """Uniform quantization alphabet of step ``delta``.

    ``bits is None`` means the unbounded alphabet ``delta * Z``.  Otherwise
    the alphabet has ``L = 2**bits`` levels ``delta * (i - (L-1)/2)``,
    i = 0..L-1, uniform and symmetric about zero.
    """

    delta: float
    bits: int | None = None

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("alphabet step must be positive")
        if self.bits is not None and self.bits < 1:
            raise ValueError("finite alphabet needs at least 1 bit")

    @property
    def levels(self):
        return None if self.bits is None else 2**self.bits

    def nearest(self, w):
        """Nearest codeword to ``w`` (ties round half away from zero).

        Returns ``(value, clipped)`` where ``clipped`` flags saturation of a
        finite alphabet.  ``w`` may be a scalar or an array.
        """
        w = np.asarray(w, dtype=float)
        t = w / self.delta
        # sign with sign(0) := +1 so midpoint ties are deterministic
        s = np.where(t < 0, -1.0, 1.0)
        if self.bits is None:
            n = s * np.floor(np.abs(t) + 0.5)
            clipped = np.zeros(w.shape, dtype=bool)
        else:
            levels = 2**self.bits
            if levels % 2 == 1:  # integer grid
                n = s * np.floor(np.abs(t) + 0.5)
            else:  # half-integer grid
                n = s * (np.floor(np.abs(t)) + 0.5)
            top = (levels - 1) / 2.0
            clipped = np.abs(n) > top
            n = np.clip(n, -top, top)
        value = n * self.delta + 0.0  # normalize -0.0
        if w.ndim == 0:
            return float(value), bool(clipped)
        return value, clipped


@dataclass(frozen=True)
class NoiseShaper:
    """Noise-shaping matrix ``H = G**order`` for a unit lower-bidiagonal G.

    ``subdiag`` is the constant subdiagonal entry of the first-order factor
    G: -1 for the standard (difference) scheme, +1 for the high-pass scheme,
    ``-mu`` for the leaky scheme, irrelevant for the identity (order 0).
    The realized H is lower triangular with unit diagonal and bandwidth
    ``order``.
    """

    m: int
    order: int
    subdiag: float
    kind: str

    @classmethod
    def identity(cls, m):
        return cls(m=m, order=0, subdiag=0.0, kind="identity")

    @classmethod
    def difference_power(cls, m, r):
        if r < 0:
            raise ValueError("order must be nonnegative")
        if r == 0:
            return cls.identity(m)
        return cls(m=m, order=r, subdiag=-1.0, kind="difference")

    @classmethod
    def high_pass_power(cls, m, r):
        if r < 0:
            raise ValueError("order must be nonnegative")
        if r == 0:
            return cls.identity(m)
        return cls(m=m, order=r, subdiag=1.0, kind="highpass")

    @classmethod
    def leaky(cls, m, r, mu):
        if not 0 < mu < 1:
            raise ValueError("leaky parameter must lie in (0, 1)")
        if r < 1:
            raise ValueError("leaky scheme needs order >= 1")
        return cls(m=m, order=r, subdiag=-mu, kind="leaky")

    def factor_matrix(self):
        """First-order factor G (identity shaper: G = I)."""
        g = np.eye(self.m)
        if self.order > 0:
            g += self.subdiag * np.eye(self.m, k=-1)
        return g

    def matrix(self):
        """Realized noise-shaping matrix ``H = G**order``."""
        h = np.eye(self.m)
        for i, c in enumerate(self.band_coefficients(), start=1):
            h += c * np.eye(self.m, k=-i)
        return h

    def band_coefficients(self):
        """Subdiagonal band of H: entry on the i-th subdiagonal, i = 1..order.

        From the binomial expansion of (I + subdiag * S)**order with S the
        shift matrix: coefficient C(order, i) * subdiag**i.
        """
        r = self.order
        return np.array(
            [math.comb(r, i) * self.subdiag**i for i in range(1, r + 1)]
        )


@dataclass(frozen=True)
class QuantizationResult:
    """Output of a quantizer run: ``H u = y - q`` holds exactly."""

    q: np.ndarray
    u: np.ndarray
    overloaded: bool
    max_state: float
    overload_index: int | None = None


def pcm_quantize(y, alphabet):
    """Quantize each entry of ``y`` independently to the nearest codeword."""
    y = np.asarray(y, dtype=float)
    if not np.isfinite(y).all():
        raise ValueError("input contains non-finite entries")
    q, clipped = alphabet.nearest(y)
    u = y - q
    over = bool(clipped.any())
    idx = int(np.argmax(clipped)) if over else None
    return QuantizationResult(
        q=q, u=u, overloaded=over,
        max_state=float(np.abs(u).max()) if u.size else 0.0,
        overload_index=idx,
    )


def shape_quantize(y, shaper, alphabet):
    """Greedy noise-shaping quantization driven by ``shaper``.

    At step j the quantizer forms the pre-quantization value
    ``w_j = y_j - sum_i H[j, j-i] u_{j-i}`` (past-state feedback through the
    strictly-lower band of H), picks ``q_j`` as the nearest codeword to
    ``w_j``, and sets ``u_j = w_j - q_j``.  This minimizes |u_j| given the
    past states, and specializes to PCM for the identity shaper and to the
    standard greedy sigma-delta rule for the difference shaper.
    """
    y = np.asarray(y, dtype=float)
    if not np.isfinite(y).all():
        raise ValueError("input contains non-finite entries")
    m = y.shape[0]
    if shaper.m != m:
        raise ValueError(f"shaper dimension {shaper.m} != input length {m}")
    r = shaper.order
    if r == 0:
        return pcm_quantize(y, alphabet)

    coeffs = shaper.band_coefficients()
    nearest = alphabet.nearest
    # binomial feedback coefficients amplify rounding for longer horizons
    kahan = r >= 3

    q = np.empty(m)
    u = np.empty(m)
    overloaded = False
    overload_index = None
    for j in range(m):
        lag = min(j, r)
        if kahan and lag > 1:
            acc = y[j]
            comp = 0.0
            for i in range(1, lag + 1):
                term = -coeffs[i - 1] * u[j - i] - comp
                tmp = acc + term
                comp = (tmp - acc) - term
                acc = tmp
            w = acc
        else:
            w = y[j]
            for i in range(1, lag + 1):
                w -= coeffs[i - 1] * u[j - i]
        qj, clipped = nearest(w)
        q[j] = qj
        u[j] = w - qj
        if clipped and not overloaded:
            overloaded = True
            overload_index = j
    return QuantizationResult(
        q=q, u=u, overloaded=overloaded,
        max_state=float(np.abs(u).max()) if m else 0.0,
        overload_index=overload_index,
    )


def sigma_delta_quantize(y, r, alphabet):
    """Greedy r-th order sigma-delta quantization with zero initial state.

    With the unbounded alphabet the greedy rule guarantees
    ``|u_j| <= delta/2`` and ``|y_j - q_j| <= 2**(r-1) * delta``.
    """
    if r < 1:
        raise ValueError("sigma-delta order must be >= 1")
    y = np.asarray(y, dtype=float)
    return shape_quantize(y, NoiseShaper.difference_power(y.shape[0], r), alphabet)


@dataclass(frozen=True)
class RateDistortionPlan:
    """Step size, bit budget and predicted distortions for one (r, m, k)."""

    delta: float
    bits: int
    rho: float
    oversampling: float
    distortion_sd: float
    distortion_pcm: float


def rate_distortion_plan(a, b, r, m, k, alpha):
    """Quantizer budget for signals ranging over ``[A, 2**b * A]`` per entry.

    Largest allowable step size ``delta_r = (A/5) / 2**(r + 1/2)``; bit depth
    ``B_r`` is the smallest integer with
    ``2**(B_r - 1) * delta_r >= 2**(r-1) * delta_r + rho * lambda**((1-alpha)/2) * k``
    so the quantizer never overloads on admissible inputs.  Predicted
    distortions after fine recovery:
    ``lambda**(-alpha (r - 1/2)) * A / 2**(r + 1/2)`` for sigma-delta and
    ``A / 2**(r + 1/2)`` for PCM at the same step size.
    """
    if not (a > 0 and b >= 0 and r >= 1 and m >= k >= 1 and 0 < alpha < 1):
        raise ValueError("invalid rate-distortion parameters")
    lam = m / k
    delta = (a / 5.0) / 2 ** (r + 0.5)
    rho = 2.0**b * a
    # 2**(B-1) = 2**(r-1) + rho * lam**((1-alpha)/2) * k / delta
    rhs = 2.0 ** (r - 1) + rho * lam ** ((1 - alpha) / 2) * k / delta
    bits = math.ceil(1 + math.log2(rhs))
    d_sd = lam ** (-alpha * (r - 0.5)) * a / 2 ** (r + 0.5)
    d_pcm = a / 2 ** (r + 0.5)
    return RateDistortionPlan(
        delta=delta, bits=bits, rho=rho, oversampling=lam,
        distortion_sd=d_sd, distortion_pcm=d_pcm,
    )
