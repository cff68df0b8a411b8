"""Modified Bessel functions of the second kind, self-contained and vectorized.

Only what the Matern kernels need: K_nu(z) for real nu >= 0 and z > 0, plus
the first-kind series I_nu(z) at small fixed arguments (used for kernel bound
constants). Evaluation strategy:

* z <= 2: Temme's series for (K_mu, K_{mu+1}) with mu = nu - round(nu),
  stable for all mu in [-1/2, 1/2] including mu = 0 (integer orders).
* z > 2: Steed's continued fraction (CF2, Thompson-Barnett form).
* Upward recurrence K_{mu+j+1} = K_{mu+j-1} + 2(mu+j)/z K_{mu+j} lifts the
  order from mu to nu; stable because K grows with the order.

Values underflow to 0 past z ~ 705. A plain small-argument series paired with
the large-argument exponential asymptotic cannot cover the middle range in
float64 (the asymptotic's optimally-truncated error at z = 8 is only ~1e-7,
while the series loses ~e^{2z} eps to cancellation), hence the continued
fraction.

Large arrays route through numba-compiled scalar kernels when numba is
importable; the pure-numpy implementation is the reference and fallback.
"""

from __future__ import annotations

import math

import numpy as np

# Taylor coefficients of 1/Gamma(1+x) (odd part), used to evaluate
# [1/Gamma(1-mu) - 1/Gamma(1+mu)]/(2 mu) without cancellation near mu = 0.
_INV_GAMMA_C1 = 0.5772156649015329
_INV_GAMMA_C3 = -0.0420026350340952
_INV_GAMMA_C5 = -0.0421977345555443
_INV_GAMMA_C7 = 0.0072189432466630
_INV_GAMMA_C9 = -0.0002152416741149

_MAX_ITER = 400
_EPS = 1.0e-16
_UNDERFLOW_Z = 705.0


def _gamma_pair(mu: float) -> tuple[float, float]:
    """(gam1, gam2) = ([1/G(1-mu) - 1/G(1+mu)]/(2 mu), [1/G(1-mu) + 1/G(1+mu)]/2)."""
    gampl = 1.0 / math.gamma(1.0 + mu)
    gammi = 1.0 / math.gamma(1.0 - mu)
    gam2 = 0.5 * (gammi + gampl)
    if abs(mu) > 0.1:
        gam1 = (gammi - gampl) / (2.0 * mu)
    else:
        mu2 = mu * mu
        gam1 = -(
            _INV_GAMMA_C1
            + mu2 * (_INV_GAMMA_C3 + mu2 * (_INV_GAMMA_C5 + mu2 * (_INV_GAMMA_C7 + mu2 * _INV_GAMMA_C9)))
        )
    return gam1, gam2


# ----------------------------------------------------------------------------
# scalar cores (plain float math; numba-jittable)
# ----------------------------------------------------------------------------

def _temme_pair_s(mu: float, z: float) -> tuple[float, float]:
    half = 0.5 * z
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < 1e-15 else pimu / math.sin(pimu)
    d = -math.log(half)
    e = mu * d
    fact2 = 1.0 if abs(e) < 1e-15 else math.sinh(e) / e
    gampl = 1.0 / math.gamma(1.0 + mu)
    gammi = 1.0 / math.gamma(1.0 - mu)
    gam2 = 0.5 * (gammi + gampl)
    if abs(mu) > 0.1:
        gam1 = (gammi - gampl) / (2.0 * mu)
    else:
        mu2t = mu * mu
        gam1 = -(
            _INV_GAMMA_C1
            + mu2t * (_INV_GAMMA_C3 + mu2t * (_INV_GAMMA_C5 + mu2t * (_INV_GAMMA_C7 + mu2t * _INV_GAMMA_C9)))
        )
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    ksum = ff
    ee = math.exp(e)
    p = 0.5 * ee / gampl
    q = 0.5 / (ee * gammi)
    ksum1 = p
    c = 1.0
    zz = half * half
    mu2 = mu * mu
    for i in range(1, _MAX_ITER + 1):
        ff = (i * ff + p + q) / (i * i - mu2)
        c = c * zz / i
        p = p / (i - mu)
        q = q / (i + mu)
        delta = c * ff
        ksum += delta
        ksum1 += c * (p - i * ff)
        if abs(delta) < abs(ksum) * _EPS:
            break
    return ksum, ksum1 * 2.0 / z


def _steed_pair_s(mu: float, z: float) -> tuple[float, float]:
    a1 = 0.25 - mu * mu
    b = 2.0 * (1.0 + z)
    d = 1.0 / b
    delh = d
    h = d
    q1 = 0.0
    q2 = 1.0
    q = a1
    c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAX_ITER + 1):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels) < abs(s) * _EPS:
            break
    h = a1 * h
    k_mu = math.sqrt(math.pi / (2.0 * z)) * math.exp(-z) / s
    k_mu1 = k_mu * (mu + z + 0.5 - h) / z
    return k_mu, k_mu1


_UFUNCS = None
_UFUNC_THRESHOLD = 8192


def _get_ufuncs():
    """Compile (K_nu, K_{nu-1}) scalar kernels with numba on first use."""
    global _UFUNCS
    if _UFUNCS is None:
        try:
            import numba

            temme = numba.njit(cache=True)(_temme_pair_s)
            steed = numba.njit(cache=True)(_steed_pair_s)
            underflow_z = _UNDERFLOW_Z

            def value_impl(nu, z):
                if z > underflow_z:
                    return 0.0
                nl = int(nu + 0.5)
                mu = nu - nl
                if z <= 2.0:
                    k0, k1 = temme(mu, z)
                else:
                    k0, k1 = steed(mu, z)
                for j in range(nl):
                    k0, k1 = k1, k0 + (2.0 * (mu + j + 1) / z) * k1
                return k0

            def lower_impl(nu, z):
                if z > underflow_z:
                    return 0.0
                nl = int(nu + 0.5)
                mu = nu - nl
                if nl == 0:
                    if z <= 2.0:
                        return temme(-mu, z)[1]
                    return steed(-mu, z)[1]
                if z <= 2.0:
                    k0, k1 = temme(mu, z)
                else:
                    k0, k1 = steed(mu, z)
                for j in range(nl - 1):
                    k0, k1 = k1, k0 + (2.0 * (mu + j + 1) / z) * k1
                return k0

            sig = ["float64(float64, float64)"]
            value = numba.vectorize(sig, nopython=True)(value_impl)
            lower = numba.vectorize(sig, nopython=True)(lower_impl)
            _UFUNCS = (value, lower)
        except Exception:
            _UFUNCS = ()
    return _UFUNCS


# ----------------------------------------------------------------------------
# array cores (pure numpy; reference implementation and fallback)
# ----------------------------------------------------------------------------

def _k_temme(mu: float, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(K_mu(z), K_{mu+1}(z)) by Temme's series; valid for z <= 2, |mu| <= 1/2."""
    half = 0.5 * z
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < 1e-15 else pimu / math.sin(pimu)
    d = -np.log(half)
    e = mu * d
    safe_e = np.where(np.abs(e) < 1e-15, 1.0, e)
    fact2 = np.where(np.abs(e) < 1e-15, 1.0, np.sinh(safe_e) / safe_e)
    gam1, gam2 = _gamma_pair(mu)
    ff = fact * (gam1 * np.cosh(e) + gam2 * fact2 * d)
    ksum = ff.copy()
    ee = np.exp(e)  # (z/2)^{-mu}
    p = 0.5 * math.gamma(1.0 + mu) * ee
    q = 0.5 * math.gamma(1.0 - mu) / ee
    ksum1 = p.copy()
    c = np.ones_like(z)
    zz = half * half
    mu2 = mu * mu
    for i in range(1, _MAX_ITER + 1):
        ff = (i * ff + p + q) / (i * i - mu2)
        c = c * zz / i
        p = p / (i - mu)
        q = q / (i + mu)
        delta = c * ff
        ksum = ksum + delta
        ksum1 = ksum1 + c * (p - i * ff)
        if np.all(np.abs(delta) < np.abs(ksum) * _EPS):
            break
    return ksum, ksum1 * 2.0 / z


def _k_steed(mu: float, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(K_mu(z), K_{mu+1}(z)) by Steed's CF2; valid for z >= 2, |mu| <= 1/2."""
    a1 = 0.25 - mu * mu
    b = 2.0 * (1.0 + z)
    d = 1.0 / b
    delh = d.copy()
    h = d.copy()
    q1 = np.zeros_like(z)
    q2 = np.ones_like(z)
    q = np.full_like(z, a1)
    c = np.full_like(z, a1)
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAX_ITER + 1):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = s + dels
        if np.all(np.abs(dels) < np.abs(s) * _EPS):
            break
    h = a1 * h
    k_mu = np.sqrt(np.pi / (2.0 * z)) * np.exp(-z) / s
    k_mu1 = k_mu * (mu + z + 0.5 - h) / z
    return k_mu, k_mu1


def _validate(nu: float, z) -> np.ndarray:
    if nu < 0:
        raise ValueError("order must be non-negative (use K_{-nu} = K_nu)")
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0.0):
        raise ValueError("argument must be positive")
    return z


def bessel_k(nu: float, z) -> np.ndarray:
    """Modified Bessel function of the second kind K_nu(z), elementwise.

    nu >= 0 real; z > 0 (entries past the float64 underflow point return 0).
    """
    z = _validate(nu, z)
    if z.size >= _UFUNC_THRESHOLD:
        ufuncs = _get_ufuncs()
        if ufuncs:
            return ufuncs[0](nu, z)
    nl = int(nu + 0.5)
    mu = nu - nl
    out = np.zeros_like(z)
    alive = z <= _UNDERFLOW_Z
    for region, solver in (((z <= 2.0) & alive, _k_temme), ((z > 2.0) & alive, _k_steed)):
        if not np.any(region):
            continue
        zr = z[region]
        k0, k1 = solver(mu, zr)
        for j in range(nl):
            k0, k1 = k1, k0 + (2.0 * (mu + j + 1) / zr) * k1
        out[region] = k0
    return out


def bessel_k_pair(nu: float, z) -> tuple[np.ndarray, np.ndarray]:
    """Return (K_nu(z), K_{nu-1}(z)) elementwise.

    K_{nu-1} is read as K_{|nu-1|} when nu < 1 (K is even in its order).
    """
    z = _validate(nu, z)
    if z.size >= _UFUNC_THRESHOLD:
        ufuncs = _get_ufuncs()
        if ufuncs:
            return ufuncs[0](nu, z), ufuncs[1](nu, z)
    nl = int(nu + 0.5)
    mu = nu - nl
    k_hi = np.zeros_like(z)
    k_lo = np.zeros_like(z)
    alive = z <= _UNDERFLOW_Z
    for region, solver in (((z <= 2.0) & alive, _k_temme), ((z > 2.0) & alive, _k_steed)):
        if not np.any(region):
            continue
        zr = z[region]
        if nl == 0:
            k_hi[region] = solver(mu, zr)[0]
            k_lo[region] = solver(-mu, zr)[1]
        else:
            k0, k1 = solver(mu, zr)
            for j in range(nl - 1):
                k0, k1 = k1, k0 + (2.0 * (mu + j + 1) / zr) * k1
            k_lo[region] = k0
            k_hi[region] = k1
    return k_hi, k_lo


def bessel_i(nu: float, z: float) -> float:
    """Modified Bessel function of the first kind I_nu(z) by direct series.

    Scalar helper for small arguments (the kernel bound constants need I_nu(1)).
    """
    if z < 0:
        raise ValueError("argument must be non-negative")
    total = 0.0
    for k in range(80):
        term = (0.5 * z) ** (2 * k + nu) / (math.factorial(k) * math.gamma(k + nu + 1.0))
        total += term
        if term < 1e-18 * max(total, 1.0):
            break
    return total
