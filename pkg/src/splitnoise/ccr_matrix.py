"""Finite-dimensional models of the canonical pair and the zero-sum triple.

Two independent discretizations of the canonical pair (q, p) with
[p, q] = -i are provided, because the sign function of a truncation is
not the truncation of the sign function; agreement between the two is
the convergence certificate.

* oscillator: ladder-matrix position and momentum in the number basis.
  The commutator defect is rank one, sitting at the top basis vector.
* grid: position diagonal on a uniform grid of [-L, L], momentum by
  exact band-limited (sinc-kernel) spectral differentiation.  Here the
  sign of the position operator is exactly diagonal, and the commutator
  defect is rank one at the alternating (Nyquist) vector.

The zero-sum triple Q, P, R places three scaled coordinates at mutual
120 degrees, Q = alpha q, P = alpha (q cos + p sin), R = -(P + Q) with
alpha^2 = 2/sqrt(3), so that all pairwise commutators equal -i.

Normalization of the reported constant.  The extreme eigenvalues of
S = sgn P + sgn Q + sgn R converge to about +-1.2561 (the spectrum is
parity-symmetric).  The sum of the positive spectral projections
Pi = (1 + sgn)/2 obeys the operator identity

    Pi_P + Pi_Q + Pi_R = (3 I + S) / 2,

whose norm converges to (3 + 1.2561)/2 = 2.1280, the "approximately
2.1" constant; `sign_sum_norm` returns this projection normalization
(that is what feeds the obstruction arithmetic, epsilon = 3 - 2.128),
while `sign_sum_extremes` and `lemma23_value` expose the raw sign-sum
spectrum.  Both are strictly below 3 at every truncation.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass

import numpy as np

from .gaussian_algebra import span_inner, unit

__all__ = [
    "CcrTriple",
    "GridAliasingWarning",
    "require_hermitian",
    "ladder",
    "position_momentum",
    "build_pair",
    "symmetric_triple",
    "sgn_op",
    "sign_sum_extremes",
    "sign_sum_norm",
    "lemma23_value",
    "coherent_vector",
    "sgn_expectation",
    "convergence_study",
    "StudyRow",
    "write_norm_study_csv",
    "NORM_STUDY_HEADER",
]

TWO_THIRDS_PI = 2.0 * math.pi / 3.0

NORM_STUDY_HEADER = "scheme,N,alpha,t,value,seconds"


class GridAliasingWarning(UserWarning):
    """Grid too coarse or too narrow: vacuum moment off by more than 1e-6."""


def require_hermitian(a: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Validate the Hermitian-matrix contract, max-norm relative to entries."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    scale = np.abs(a).max()
    if scale > 0 and np.abs(a - a.conj().T).max() > tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    return a


def ladder(n: int) -> np.ndarray:
    """Annihilation matrix truncated to n levels."""
    a = np.zeros((n, n))
    a[np.arange(n - 1), np.arange(1, n)] = np.sqrt(np.arange(1, n))
    return a


def position_momentum(n: int):
    """Natural-unit (q, p) in the number basis, [p, q] = -i up to the
    rank-one truncation defect at the top basis vector."""
    a = ladder(n)
    q = (a + a.T) / math.sqrt(2.0)
    p = -1j * (a - a.T) / math.sqrt(2.0)
    return q, p


def _grid_points(n: int, L: float) -> np.ndarray:
    return np.linspace(-L, L, n)


def _grid_momentum(x: np.ndarray) -> np.ndarray:
    # sinc-kernel first derivative on the uniform infinite grid, times -i
    h = x[1] - x[0]
    d = np.subtract.outer(np.arange(len(x)), np.arange(len(x)))
    with np.errstate(divide="ignore", invalid="ignore"):
        deriv = np.where(d != 0, (-1.0) ** d / (h * d), 0.0)
    return -1j * deriv


@dataclass(frozen=True)
class CcrTriple:
    """Hermitian triple with R = -(P + Q) held exactly, plus its scale data."""

    scheme: str
    n: int
    t: float
    L: float | None
    Q: np.ndarray
    P: np.ndarray
    R: np.ndarray
    x: np.ndarray | None = None  # grid points, grid scheme only

    def vacuum(self) -> np.ndarray:
        """Ground-state vector of the underlying oscillator, unit norm."""
        if self.scheme == "oscillator":
            e0 = np.zeros(self.n)
            e0[0] = 1.0
            return e0
        v = np.exp(-self.x * self.x / 2.0)
        return v / np.linalg.norm(v)

    def vacuum_moment_error(self) -> float:
        """|<vac| Q^2 |vac> - t|, the tail-aliasing diagnostic."""
        v = self.vacuum()
        return abs(float(np.real(v.conj() @ (self.Q @ (self.Q @ v)))) - self.t)


def default_grid_halfwidth(t: float) -> float:
    """Default natural-unit half width, 40 / sqrt(2 t)."""
    return 40.0 / math.sqrt(2.0 * t)


def balanced_grid_halfwidth(n: int) -> float:
    """Half width sqrt(pi n / 2): position and momentum cutoffs coincide."""
    return math.sqrt(math.pi * n / 2.0)


def build_pair(scheme: str, n: int, t: float, L: float | None = None) -> CcrTriple:
    """Canonical pair at time scale t, [P, Q] = -2 t i up to the defect.

    Q = sqrt(2 t) q and P = sqrt(2 t) p in either discretization; the
    grid default half width is 40/sqrt(2 t) natural units and the
    vacuum-moment aliasing check warns above 1e-6.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if t <= 0.0:
        raise ValueError("t must be positive")
    s = math.sqrt(2.0 * t)
    if scheme == "oscillator":
        if L is not None:
            raise ValueError("L applies to the grid scheme only")
        q, p = position_momentum(n)
        triple = CcrTriple("oscillator", n, float(t), None, s * q, s * p,
                           -(s * p + s * q))
    elif scheme == "grid":
        if L is None:
            L = default_grid_halfwidth(t)
        if L <= 0.0:
            raise ValueError("L must be positive")
        x = _grid_points(n, float(L))
        Q = s * np.diag(x).astype(complex)
        P = s * _grid_momentum(x)
        triple = CcrTriple("grid", n, float(t), float(L), Q, P, -(P + Q), x=x)
        err = triple.vacuum_moment_error()
        if err > 1e-6 * max(t, 1.0):
            warnings.warn(
                f"grid vacuum moment off by {err:.2e} (N={n}, L={L:.3g}); "
                "increase N or adjust L", GridAliasingWarning, stacklevel=2)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return triple


def symmetric_triple(n: int, scheme: str = "oscillator",
                     L: float | None = None) -> CcrTriple:
    """Zero-sum triple at mutual 120 degrees, pairwise commutators -i.

    alpha^2 = 2/sqrt(3) makes alpha^2 sin(2 pi / 3) = 1.  R is built as
    -(P + Q), so P + Q + R = 0 holds exactly in floating point.  The
    grid transcription defaults to the balanced half width sqrt(pi n/2),
    which puts equal position and momentum cutoffs around the origin.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    alpha = math.sqrt(2.0 / math.sqrt(3.0))
    c, s = math.cos(TWO_THIRDS_PI), math.sin(TWO_THIRDS_PI)
    if scheme == "oscillator":
        q, p = position_momentum(n)
        x = None
    elif scheme == "grid":
        if L is None:
            L = balanced_grid_halfwidth(n)
        x = _grid_points(n, float(L))
        q = np.diag(x).astype(complex)
        p = _grid_momentum(x)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    Q = alpha * q
    P = alpha * (c * q + s * p)
    return CcrTriple(scheme, n, 0.5, None if x is None else float(L),
                     Q, P, -(P + Q), x=x)


def sgn_op(a: np.ndarray) -> np.ndarray:
    """Spectral sign of a Hermitian matrix, sgn(0) := 0."""
    a = require_hermitian(a)
    d = np.diagonal(a)
    if not np.any(a - np.diag(d)):
        # exactly diagonal (grid-scheme position): sign the diagonal
        return np.diag(np.sign(d.real)).astype(a.dtype)
    w, v = np.linalg.eigh(a)
    return (v * np.sign(w)) @ v.conj().T


def _sign_sum(triple: CcrTriple) -> np.ndarray:
    return sgn_op(triple.P) + sgn_op(triple.Q) + sgn_op(triple.R)


def sign_sum_extremes(scheme: str, n: int) -> tuple[float, float]:
    """(lowest, highest) eigenvalue of sgn P + sgn Q + sgn R for the
    symmetric triple; converges to about -+1.2561."""
    w = np.linalg.eigvalsh(_sign_sum(symmetric_triple(n, scheme)))
    return float(w[0]), float(w[-1])


def sign_sum_norm(scheme: str, n: int) -> float:
    """Norm of the sum of the three positive spectral projections.

    Equals (3 + lambda_max(sgn P + sgn Q + sgn R)) / 2 by the operator
    identity Pi = (1 + sgn)/2; converges to about 2.128, strictly below
    3 at every truncation.  This is the reported-constant normalization
    consumed by the obstruction arithmetic.
    """
    _, hi = sign_sum_extremes(scheme, n)
    return (3.0 + hi) / 2.0


def lemma23_value(alpha: float, t: float, n: int, scheme: str = "oscillator",
                  L: float | None = None) -> float:
    """Raw sign-sum norm of the angle-alpha triple built on (Q_t, P_t).

    || sgn Q_t + sgn(Q_t cos a + P_t sin a) + sgn(Q_t cos a - P_t sin a) ||
    for alpha in (pi/2, pi].  Positive scalings are absorbed by sgn, so
    the value does not depend on t; at alpha = pi the rotated terms both
    reduce to -sgn Q_t and the value drops to 1.

    The grid window defaults to the balanced, t-independent half width
    here (not 40/sqrt(2t)); a t-dependent window would rescale P against
    Q and break the exact t-invariance that sgn guarantees.
    """
    if not (math.pi / 2.0 < alpha <= math.pi):
        raise ValueError("alpha must lie in (pi/2, pi]")
    if scheme == "grid" and L is None:
        L = balanced_grid_halfwidth(n)
    pair = build_pair(scheme, n, t, L)
    c, s = math.cos(alpha), math.sin(alpha)
    total = (sgn_op(pair.Q)
             + sgn_op(c * pair.Q + s * pair.P)
             + sgn_op(c * pair.Q - s * pair.P))
    w = np.linalg.eigvalsh(total)
    return float(max(-w[0], w[-1]))


def coherent_vector(zeta: complex, t: float, n: int) -> np.ndarray:
    """Number-basis coefficients beta^k / sqrt(k!), beta = zeta sqrt(t).

    Unnormalized; the squared norm is exp(|zeta|^2 t), matching the
    exponential-vector inner product.  Requires the truncated tail mass
    exp(-|beta|^2) sum_{k>=n} |beta|^{2k}/k! to be at most 1e-10.
    """
    if t <= 0.0:
        raise ValueError("t must be positive")
    beta = complex(zeta) * math.sqrt(t)
    b2 = abs(beta) ** 2
    # Poisson(b2) tail mass beyond the truncation
    logw = [-b2 + k * math.log(b2) - math.lgamma(k + 1) for k in range(1, n)] \
        if b2 > 0 else []
    tail = 1.0 - math.exp(-b2) - sum(math.exp(v) for v in logw)
    if tail > 1e-10:
        raise ValueError(f"truncated tail mass {tail:.2e} exceeds 1e-10; "
                         "increase n")
    k = np.arange(n)
    if b2 == 0.0:
        out = np.zeros(n, dtype=complex)
        out[0] = 1.0
        return out
    mag = np.exp(k * math.log(abs(beta)) - 0.5 *
                 np.array([math.lgamma(i + 1) for i in range(n)]))
    return mag * np.exp(1j * np.angle(beta) * k)


def sgn_expectation(a: np.ndarray, v: np.ndarray) -> float:
    """<sgn(a) v, v>, not normalized by ||v||^2."""
    v = np.asarray(v)
    a = np.asarray(a)
    if a.shape[0] != v.shape[0]:
        raise ValueError("dimension mismatch")
    if not np.any(v):
        raise ValueError("zero vector")
    return float(np.real(v.conj() @ (sgn_op(a) @ v)))


@dataclass(frozen=True)
class StudyRow:
    scheme: str
    n: int
    alpha: float
    t: float
    value: float
    seconds: float
    delta: float | None  # successive difference within (scheme, alpha)


def convergence_study(schemes, n_list, alpha_list=(TWO_THIRDS_PI,),
                      t: float = 0.5) -> list[StudyRow]:
    """Projection-normalized sign-sum constant across truncations.

    value = (3 + lemma23_value(alpha)) / 2 per row; rows carry wall time
    and the successive difference along ascending N at fixed
    (scheme, alpha).
    """
    if isinstance(schemes, str):
        schemes = (schemes,)
    n_list = list(n_list)
    if n_list != sorted(n_list):
        raise ValueError("n_list must be ascending")
    rows: list[StudyRow] = []
    for scheme in schemes:
        for alpha in alpha_list:
            prev = None
            for n in n_list:
                t0 = time.perf_counter()
                value = (3.0 + lemma23_value(alpha, t, n, scheme)) / 2.0
                dt = time.perf_counter() - t0
                delta = None if prev is None else value - prev
                rows.append(StudyRow(scheme, int(n), float(alpha), float(t),
                                     value, dt, delta))
                prev = value
    return rows


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def write_norm_study_csv(rows, path, wall_time: bool = False) -> None:
    """Emit the study as CSV (UTF-8, LF, 12 significant digits).

    The seconds column is written as 0 unless wall_time is set, keeping
    the artifact byte-identical across reruns of the same configuration.
    """
    lines = [NORM_STUDY_HEADER]
    for r in rows:
        sec = r.seconds if wall_time else 0.0
        lines.append(",".join([r.scheme, str(r.n), _fmt(r.alpha), _fmt(r.t),
                               _fmt(r.value), _fmt(sec)]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def coherent_norm_crosscheck(zeta: complex, t: float, n: int) -> tuple[float, float]:
    """Squared norm of the coherent vector against the span-side value."""
    v = coherent_vector(zeta, t, n)
    matrix_side = float(np.real(v.conj() @ v))
    span = unit(0.0, zeta, t)
    span_side = float(span_inner(span, span).real)
    return matrix_side, span_side
