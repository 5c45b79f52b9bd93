"""Maximum field-free orientation within a truncated rotational subspace.

The largest achievable |<cos(theta)>| over normalized states confined to
J <= j_max is the top eigenvalue of the tridiagonal cos(theta) matrix.  It is
located here as the outermost root of the characteristic polynomial, evaluated
through the three-term determinant recurrence, with the optimal amplitudes
given by the same minor polynomials.  An independent LAPACK tridiagonal
eigensolver (Sturm bisection plus inverse iteration) serves as a cross-check.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .model import Molecule, cos_matrix_element, cos_operator_matrix, transition_frequency

__all__ = [
    "OrientationTarget",
    "char_poly_eval",
    "max_orientation",
    "optimal_amplitudes",
    "optimal_phases",
    "eigen_oracle",
    "orientation_target",
    "predicted_orientation",
]

_BISECTION_TOL = 1e-13
_BISECTION_MAX_ITER = 200


@dataclass(frozen=True)
class OrientationTarget:
    """Optimal rotational superposition for a given j_max.

    amplitudes are the real positive c_J (sum of squares 1); phases follow the
    quadratic ladder phi_J = delta_phi * J(J+1)/2, so consecutive differences
    grow linearly: phi_{J+1} - phi_J = (J+1) * delta_phi.
    """

    j_max: int
    lam: float
    amplitudes: tuple
    phases: tuple
    delta_phi: float

    def __post_init__(self):
        c = np.asarray(self.amplitudes, dtype=float)
        if len(c) != self.j_max + 1 or len(self.phases) != self.j_max + 1:
            raise ValueError("amplitudes and phases must have j_max + 1 entries")
        if not (0.0 < self.lam < 1.0):
            raise ValueError(f"lambda must lie in (0, 1), got {self.lam}")
        if np.any(c <= 0):
            raise ValueError("all amplitudes must be strictly positive")
        norm = float(np.sum(c * c))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"amplitudes must be normalized, sum c^2 = {norm}")
        phi = np.asarray(self.phases, dtype=float)
        steps = np.diff(phi) - (np.arange(1, self.j_max + 1)) * self.delta_phi
        wrapped = (steps + math.pi) % (2 * math.pi) - math.pi
        if np.max(np.abs(wrapped)) > 1e-9:
            raise ValueError("phases do not follow the (J+1)*delta_phi ladder")

    def state_vector(self) -> np.ndarray:
        """Complex coefficients c_J exp(i phi_J) over J = 0..j_max."""
        c = np.asarray(self.amplitudes, dtype=float)
        phi = np.asarray(self.phases, dtype=float)
        return c * np.exp(1j * phi)

    def to_dict(self) -> dict:
        return {
            "j_max": self.j_max,
            "lambda": self.lam,
            "c": list(self.amplitudes),
            "phi": list(self.phases),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OrientationTarget":
        phi = np.asarray(data["phi"], dtype=float)
        delta_phi = float(phi[1] - phi[0]) if len(phi) > 1 else 0.0
        return cls(
            j_max=int(data["j_max"]),
            lam=float(data["lambda"]),
            amplitudes=tuple(float(x) for x in data["c"]),
            phases=tuple(float(x) for x in phi),
            delta_phi=delta_phi,
        )

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "OrientationTarget":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _minor_sequence(j_max: int, lam: float) -> np.ndarray:
    """Leading principal minors D_0..D_{j_max+1} of (lam*I - C).

    D_0 = 1, D_1 = lam, D_k = lam*D_{k-1} - M(k-2)^2 * D_{k-2}; D_{j_max+1} is
    the characteristic polynomial of the (j_max+1)-dimensional cos matrix.
    """
    d = np.empty(j_max + 2)
    d[0] = 1.0
    d[1] = lam
    for k in range(2, j_max + 2):
        b = cos_matrix_element(k - 2)
        d[k] = lam * d[k - 1] - b * b * d[k - 2]
    return d


def char_poly_eval(j_max: int, lam: float) -> float:
    """Characteristic polynomial of the (j_max+1)-dim cos(theta) matrix at lam."""
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    return float(_minor_sequence(j_max, lam)[-1])


def _largest_root(eval_poly, lo: float, hi: float) -> float:
    """Bisection for the outermost root: poly < 0 at lo, > 0 at hi."""
    flo, fhi = eval_poly(lo), eval_poly(hi)
    if flo == 0.0:
        return lo
    if not (flo < 0.0 < fhi):
        raise ArithmeticError("root bracket lost; bisection cannot proceed")
    for _ in range(_BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if hi - lo <= _BISECTION_TOL:
            return mid
        if eval_poly(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    raise ArithmeticError("bisection failed to converge within the iteration cap")


def max_orientation(j_max: int) -> float:
    """Largest achievable |<cos(theta)>| over states confined to J <= j_max.

    Climbs the interlacing ladder: the outermost root of each minor D_k lies
    strictly between the largest root of D_{k-1} and 1, which brackets every
    bisection with guaranteed opposite signs.
    """
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    root = 0.0  # largest root of D_1
    for k in range(2, j_max + 2):
        kk = k  # bind loop variable

        def dk(lam, _k=kk):
            d0, d1 = 1.0, lam
            for i in range(2, _k + 1):
                b = cos_matrix_element(i - 2)
                d0, d1 = d1, lam * d1 - b * b * d0
            return d1

        root = _largest_root(dk, root, 1.0)
    return root


def optimal_amplitudes(j_max: int, lam: float) -> np.ndarray:
    """Amplitudes c_J of the maximal-orientation superposition.

    c_J is proportional to D_J(lam) divided by the product of the coupling
    elements M(0)..M(J-1); the result is normalized to sum of squares 1.
    For deep ladders the product is accumulated in log space to keep the
    unnormalized entries in range.
    """
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    minors = _minor_sequence(j_max, lam)[: j_max + 1]
    if np.any(minors <= 0) or not np.all(np.isfinite(minors)):
        raise ValueError(f"lambda={lam} is not the top eigenvalue for j_max={j_max}")
    log_m = np.log([cos_matrix_element(j) for j in range(j_max)])
    if j_max > 12:
        log_c = np.log(minors) - np.concatenate(([0.0], np.cumsum(log_m)))
        log_c -= log_c.max()
        c = np.exp(log_c)
    else:
        c = minors / np.concatenate(([1.0], np.cumprod(np.exp(log_m))))
    c /= math.sqrt(np.sum(c * c))
    if np.any(c <= 0) or not np.all(np.isfinite(c)):
        raise ValueError("amplitude recursion produced a non-positive component")
    return c


def optimal_phases(j_max: int, delta_phi: float = 0.0) -> np.ndarray:
    """Phase ladder phi_J = delta_phi * J(J+1)/2 (phi_0 = 0)."""
    j = np.arange(j_max + 1, dtype=float)
    return delta_phi * j * (j + 1.0) / 2.0


def eigen_oracle(j_max: int):
    """Independent check on the polynomial route via LAPACK stebz/stein.

    Returns (lambda, eigenvector) for the top eigenpair of the
    (j_max+1)-dimensional cos(theta) matrix, eigenvector signed positive.
    """
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    n = j_max + 1
    diag = np.zeros(n)
    off = np.array([cos_matrix_element(j) for j in range(n - 1)])
    w, v = eigh_tridiagonal(
        diag, off, select="i", select_range=(n - 1, n - 1), lapack_driver="stebz"
    )
    lam = float(w[0])
    vec = v[:, 0]
    if vec[0] < 0:
        vec = -vec
    residual = np.linalg.norm(cos_operator_matrix(n) @ vec - lam * vec)
    if residual > 1e-12:
        raise ArithmeticError(f"eigenpair residual {residual:.2e} above 1e-12")
    return lam, vec


def orientation_target(j_max: int, delta_phi: float = 0.0) -> OrientationTarget:
    """Build the optimal-orientation target for j_max."""
    lam = max_orientation(j_max)
    c = optimal_amplitudes(j_max, lam)
    phi = optimal_phases(j_max, delta_phi)
    return OrientationTarget(
        j_max=j_max,
        lam=lam,
        amplitudes=tuple(c),
        phases=tuple(phi),
        delta_phi=delta_phi,
    )


def predicted_orientation(target: OrientationTarget, t: float, molecule: Molecule) -> float:
    """<cos(theta)> of the target superposition under free evolution at time t.

    Twice the sum over adjacent pairs of c_{J+1} c_J M(J)
    cos(omega_{J+1,J} t - (phi_{J+1} - phi_J)); at integer multiples of the
    revival period with delta_phi = 0 this returns +lambda.
    """
    c = np.asarray(target.amplitudes)
    phi = np.asarray(target.phases)
    total = 0.0
    for j in range(target.j_max):
        w = transition_frequency(molecule, j)
        total += c[j + 1] * c[j] * cos_matrix_element(j) * math.cos(w * t - (phi[j + 1] - phi[j]))
    return 2.0 * total
