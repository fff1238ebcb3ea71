"""Exact models of the target function: rational part plus optional entire part.

A model evaluates in closed form, produces Taylor coefficients at arbitrary
centers by closed-form recursions (power-series division for the rational
part, the exponential series for exp terms), and reports its poles exactly
from the denominator's roots. No numerical differentiation anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PoleProximityError
from .polynomial import Polynomial, RootSet, poly_roots

POLE_PROXIMITY_TOL = 1e-12
COPRIME_TOL = 1e-10


@dataclass(frozen=True)
class ExpTerm:
    """Entire term c * exp(a * z)."""

    c: complex
    a: complex

    def eval(self, z):
        return self.c * np.exp(self.a * np.asarray(z, dtype=complex))

    def taylor(self, z0: complex, k: int) -> np.ndarray:
        base = self.c * np.exp(self.a * z0)
        coeffs = np.zeros(k + 1, dtype=complex)
        term = 1.0 + 0j
        for j in range(k + 1):
            coeffs[j] = base * term
            term *= self.a / (j + 1)
        return coeffs

    def to_json(self):
        return {"exp": {"c": [self.c.real, self.c.imag], "a": [self.a.real, self.a.imag]}}


@dataclass(frozen=True)
class PoleList:
    """Pole locations with orders; total order equals the denominator degree."""

    poles: tuple

    def __init__(self, poles):
        object.__setattr__(
            self, "poles", tuple((complex(p), int(k)) for p, k in poles)
        )

    @property
    def total_order(self) -> int:
        return sum(k for _, k in self.poles)

    def locations(self) -> np.ndarray:
        return np.asarray([p for p, _ in self.poles], dtype=complex)

    def flatten(self) -> np.ndarray:
        out = []
        for p, k in self.poles:
            out.extend([p] * k)
        return np.asarray(out, dtype=complex)

    def __len__(self):
        return len(self.poles)

    def __iter__(self):
        return iter(self.poles)


def _series_inverse(den_taylor: np.ndarray, k: int) -> np.ndarray:
    """Power series of 1/d given d's Taylor coefficients, d[0] != 0."""
    inv = np.zeros(k + 1, dtype=complex)
    inv[0] = 1.0 / den_taylor[0]
    for j in range(1, k + 1):
        acc = 0.0 + 0j
        for i in range(1, j + 1):
            if i < len(den_taylor):
                acc += den_taylor[i] * inv[j - i]
        inv[j] = -acc / den_taylor[0]
    return inv


@dataclass(frozen=True)
class TargetFunction:
    """f = numerator/denominator + optional entire part.

    The rational pair must be coprime; poles are the denominator's roots. The
    entire catalog is exp terms and polynomials so Taylor oracles stay closed
    form.
    """

    numerator: Polynomial
    denominator: Polynomial
    entire: ExpTerm | Polynomial | None = None

    def __post_init__(self):
        if self.denominator.is_zero:
            raise ValueError("denominator must not be identically zero")
        if self.numerator.degree >= 1 and self.denominator.degree >= 1:
            num_roots = self.numerator
            den = self.denominator
            # coprime at tolerance: no numerator root may sit on a pole
            from .polynomial import eig_roots

            nr = eig_roots(num_roots)
            dr = eig_roots(den)
            for a in nr:
                for b in dr:
                    if abs(a - b) <= COPRIME_TOL * max(1.0, abs(a), abs(b)):
                        raise ValueError(
                            "rational part is not coprime at tolerance "
                            f"{COPRIME_TOL:g} (shared root near {a:.6g})"
                        )

    @property
    def pole_locations(self) -> np.ndarray:
        return self.poles().locations()

    def poles(self) -> PoleList:
        """All poles with orders, from the denominator's roots."""
        if self.denominator.degree < 1:
            return PoleList([])
        roots = poly_roots(self.denominator, tol=1e-6)
        return PoleList(list(roots))

    def _check_pole_distance(self, z):
        locs = self.pole_locations
        if locs.size == 0:
            return
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        dist = np.min(np.abs(z[..., None] - locs[None, ...]), axis=-1)
        if np.any(dist <= POLE_PROXIMITY_TOL):
            bad = z[dist <= POLE_PROXIMITY_TOL]
            raise PoleProximityError(
                f"pole proximity: evaluation within {POLE_PROXIMITY_TOL:g} of a pole "
                f"(first offender {np.ravel(bad)[0]:.6g})"
            )

    def eval(self, z):
        """Closed-form evaluation; raises PoleProximityError at/near poles."""
        z_arr = np.asarray(z, dtype=complex)
        self._check_pole_distance(z_arr)
        value = self.numerator(z_arr) / self.denominator(z_arr)
        if self.entire is not None:
            if isinstance(self.entire, ExpTerm):
                value = value + self.entire.eval(z_arr)
            else:
                value = value + self.entire(z_arr)
        if np.ndim(z) == 0:
            return complex(value)
        return value

    def __call__(self, z):
        return self.eval(z)

    def taylor(self, z0: complex, k: int) -> np.ndarray:
        """Taylor coefficients c_0..c_k of f at z0 by series division."""
        if k < 0:
            raise ValueError("k must be nonnegative")
        z0 = complex(z0)
        self._check_pole_distance(np.asarray([z0]))
        num_t = self.numerator.taylor_at(z0, k)
        den_t = self.denominator.taylor_at(z0, k)
        coeffs = np.convolve(num_t, _series_inverse(den_t, k))[: k + 1]
        if isinstance(self.entire, ExpTerm):
            coeffs = coeffs + self.entire.taylor(z0, k)
        elif isinstance(self.entire, Polynomial):
            coeffs = coeffs + self.entire.taylor_at(z0, k)
        return coeffs

    def scaled(self, factor: complex) -> "TargetFunction":
        """The model of factor * f (used by scale-invariance diagnostics)."""
        entire = self.entire
        if isinstance(entire, ExpTerm):
            entire = ExpTerm(entire.c * factor, entire.a)
        elif isinstance(entire, Polynomial):
            entire = entire.scale(factor)
        return TargetFunction(self.numerator.scale(factor), self.denominator, entire)

    def to_json(self) -> dict:
        spec: dict = {
            "rational": {
                "num": self.numerator.to_json(),
                "den": self.denominator.to_json(),
            }
        }
        if isinstance(self.entire, ExpTerm):
            spec["entire"] = self.entire.to_json()
        elif isinstance(self.entire, Polynomial):
            spec["entire"] = {"poly": self.entire.to_json()}
        return spec

    @classmethod
    def from_json(cls, data: dict) -> "TargetFunction":
        rational = data.get("rational", {"num": [[0.0, 0.0]], "den": [[1.0, 0.0]]})
        num = Polynomial.from_json(rational["num"])
        den = Polynomial.from_json(rational["den"])
        entire = None
        ent = data.get("entire")
        if ent:
            if "exp" in ent:
                c = complex(*ent["exp"]["c"])
                a = complex(*ent["exp"]["a"])
                entire = ExpTerm(c, a)
            elif "poly" in ent:
                entire = Polynomial.from_json(ent["poly"])
            else:
                raise ValueError(f"unknown entire part {sorted(ent)}")
        return cls(num, den, entire)


def model_eval(f: TargetFunction, z):
    return f.eval(z)


def model_taylor(f: TargetFunction, z0: complex, k: int) -> np.ndarray:
    return f.taylor(z0, k)


def model_poles(f: TargetFunction) -> PoleList:
    return f.poles()


def rational(num_coeffs, den_coeffs, entire=None) -> TargetFunction:
    """Convenience constructor from ascending coefficient lists."""
    return TargetFunction(Polynomial(num_coeffs), Polynomial(den_coeffs), entire)


def from_partial_fractions(poles_residues, entire=None) -> TargetFunction:
    """Build sum residue/(z - pole) over simple poles as one rational function."""
    from .polynomial import poly_from_roots

    poles = [complex(p) for p, _ in poles_residues]
    den = poly_from_roots(poles, leading=1.0)
    num = Polynomial([0.0])
    for p, res in poles_residues:
        others = [q for q in poles if q != p]
        num = Polynomial(
            np.polynomial.polynomial.polyadd(
                num.coefficients,
                poly_from_roots(others, leading=complex(res)).coefficients,
            )
        )
    return TargetFunction(num, den, entire)


def exp_model(c: complex = 1.0, a: complex = 1.0) -> TargetFunction:
    """The entire model c * exp(a z)."""
    return TargetFunction(Polynomial([0.0]), Polynomial([1.0]), ExpTerm(c, a))
