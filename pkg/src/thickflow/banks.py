"""Seeded test-function banks for weak-form and variational checks.

All randomness in the package derives from a single config seed through
SplitMix64, a 64-bit mixing generator defined by its update constants

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z = z ^ (z >> 31)

so the banks are bit-identical across implementations of the same spec.

A test function is a truncated spatial Fourier series times a
polynomial-in-time envelope env(t) = 16 (t/T)^2 (1 - t/T)^2 that
vanishes (with its first derivative) at t = 0 and t = T and peaks at 1.
Velocity-type test fields are the same objects rescaled so the shear
constraint holds with margin: max |dv/dx| = 0.99 in 1D, max |Dv| = 0.99
in 2D (maxima taken over a dense sample grid and the envelope peak).
"""

from dataclasses import dataclass

import numpy as np

_MASK = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit generator; uniform() yields floats in [0, 1)."""

    def __init__(self, seed):
        self.state = int(seed) & _MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self, lo=0.0, hi=1.0):
        return lo + (hi - lo) * (self.next_u64() / 2.0**64)


def _envelope(t, T):
    s = np.asarray(t) / T
    return 16.0 * s**2 * (1.0 - s) ** 2


def _envelope_dt(t, T):
    s = np.asarray(t) / T
    return 16.0 * (2.0 * s * (1.0 - s) ** 2 - 2.0 * s**2 * (1.0 - s)) / T


@dataclass
class TestFunction1D:
    """phi(t, x) = env(t) * sum_k [c_k cos(2 pi k x) + s_k sin(2 pi k x)]."""

    coeffs: list  # triples (k, c_k, s_k)
    T: float
    scale: float = 1.0

    def spatial(self, x):
        x = np.asarray(x)
        out = np.zeros_like(x, dtype=float)
        for k, c, s in self.coeffs:
            w = 2.0 * np.pi * k
            out += c * np.cos(w * x) + s * np.sin(w * x)
        return self.scale * out

    def spatial_dx(self, x):
        x = np.asarray(x)
        out = np.zeros_like(x, dtype=float)
        for k, c, s in self.coeffs:
            w = 2.0 * np.pi * k
            out += w * (-c * np.sin(w * x) + s * np.cos(w * x))
        return self.scale * out

    def eval(self, t, x):
        return _envelope(t, self.T) * self.spatial(x)

    def dt(self, t, x):
        return _envelope_dt(t, self.T) * self.spatial(x)

    def dx(self, t, x):
        return _envelope(t, self.T) * self.spatial_dx(x)

    def max_shear(self, oversample=2048):
        x = np.arange(oversample) / oversample
        return float(np.max(np.abs(self.spatial_dx(x))))


@dataclass
class TestFunction2D:
    """Vector field with plane-wave components and the same time envelope.

    Each component holds quadruples (kx, ky, c, s) meaning
    c cos(2 pi (kx x + ky y)) + s sin(2 pi (kx x + ky y)).
    """

    coeffs1: list
    coeffs2: list
    T: float
    scale: float = 1.0

    @staticmethod
    def _eval_modes(coeffs, X, Y, d=None):
        out = np.zeros_like(X, dtype=float)
        for kx, ky, c, s in coeffs:
            phase = 2.0 * np.pi * (kx * X + ky * Y)
            if d is None:
                out += c * np.cos(phase) + s * np.sin(phase)
            else:
                w = 2.0 * np.pi * (kx if d == 0 else ky)
                out += w * (-c * np.sin(phase) + s * np.cos(phase))
        return out

    def spatial(self, X, Y):
        return np.stack(
            [
                self.scale * self._eval_modes(self.coeffs1, X, Y),
                self.scale * self._eval_modes(self.coeffs2, X, Y),
            ]
        )

    def spatial_sym_grad(self, X, Y):
        d11 = self.scale * self._eval_modes(self.coeffs1, X, Y, d=0)
        d22 = self.scale * self._eval_modes(self.coeffs2, X, Y, d=1)
        d12 = 0.5 * self.scale * (
            self._eval_modes(self.coeffs1, X, Y, d=1)
            + self._eval_modes(self.coeffs2, X, Y, d=0)
        )
        return np.stack([d11, d22, d12])

    def eval(self, t, X, Y):
        return _envelope(t, self.T) * self.spatial(X, Y)

    def div(self, t, X, Y):
        d11 = self._eval_modes(self.coeffs1, X, Y, d=0)
        d22 = self._eval_modes(self.coeffs2, X, Y, d=1)
        return _envelope(t, self.T) * self.scale * (d11 + d22)

    def max_sym_grad(self, oversample=256):
        g = np.arange(oversample) / oversample
        X, Y = np.meshgrid(g, g, indexing="ij")
        D = self.spatial_sym_grad(X, Y)
        return float(np.max(np.sqrt(D[0] ** 2 + D[1] ** 2 + 2 * D[2] ** 2)))


@dataclass
class ScalarTestFunction2D:
    """phi(t, x) = env(t) * sum of plane waves; quadruples (kx, ky, c, s)."""

    coeffs: list
    T: float

    def _modes(self, X, Y, d=None):
        out = np.zeros_like(X, dtype=float)
        for kx, ky, c, s in self.coeffs:
            phase = 2.0 * np.pi * (kx * X + ky * Y)
            if d is None:
                out += c * np.cos(phase) + s * np.sin(phase)
            else:
                w = 2.0 * np.pi * (kx if d == 0 else ky)
                out += w * (-c * np.sin(phase) + s * np.cos(phase))
        return out

    def eval(self, t, X, Y):
        return _envelope(t, self.T) * self._modes(X, Y)

    def dt(self, t, X, Y):
        return _envelope_dt(t, self.T) * self._modes(X, Y)

    def grad(self, t, X, Y):
        e = _envelope(t, self.T)
        return e * self._modes(X, Y, d=0), e * self._modes(X, Y, d=1)


def scalar_bank_2d(seed, T, size=10, modes=2):
    """Seeded bank of scalar 2D space-time test functions."""
    rng = SplitMix64(seed)
    waves = [
        (kx, ky)
        for kx in range(0, modes + 1)
        for ky in range(-modes, modes + 1)
        if (kx, ky) > (0, 0)
    ]
    bank = []
    for _ in range(size):
        coeffs = [(kx, ky, rng.uniform(-1, 1), rng.uniform(-1, 1))
                  for kx, ky in waves]
        bank.append(ScalarTestFunction2D(coeffs, T))
    return bank


def scalar_bank_1d(seed, T, size=10, modes=3):
    """Seeded bank of scalar space-time test functions (weak-form checks)."""
    rng = SplitMix64(seed)
    bank = []
    for _ in range(size):
        coeffs = [(k, rng.uniform(-1, 1), rng.uniform(-1, 1)) for k in range(1, modes + 1)]
        bank.append(TestFunction1D(coeffs, T))
    return bank


def velocity_bank_1d(seed, T, size=20, modes=3, margin=0.99):
    """Seeded bank rescaled so max |dv/dx| equals the constraint margin."""
    rng = SplitMix64(seed)
    bank = []
    for _ in range(size):
        coeffs = [(k, rng.uniform(-1, 1), rng.uniform(-1, 1)) for k in range(1, modes + 1)]
        v = TestFunction1D(coeffs, T)
        m = v.max_shear()
        v.scale = margin / m if m > 0 else 0.0
        bank.append(v)
    return bank


def velocity_bank_2d(seed, T, size=20, modes=2, margin=0.99):
    """Seeded 2D bank rescaled so max |Dv| equals the constraint margin."""
    rng = SplitMix64(seed)
    waves = [
        (kx, ky)
        for kx in range(0, modes + 1)
        for ky in range(-modes, modes + 1)
        if (kx, ky) > (0, 0)
    ]
    bank = []
    for _ in range(size):
        c1 = [(kx, ky, rng.uniform(-1, 1), rng.uniform(-1, 1)) for kx, ky in waves]
        c2 = [(kx, ky, rng.uniform(-1, 1), rng.uniform(-1, 1)) for kx, ky in waves]
        v = TestFunction2D(c1, c2, T)
        m = v.max_sym_grad()
        v.scale = margin / m if m > 0 else 0.0
        bank.append(v)
    return bank
