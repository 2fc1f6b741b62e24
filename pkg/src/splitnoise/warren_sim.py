"""Monte Carlo model of the noise of splitting on a finite grid.

A path is a random walk with Gaussian increments of variance 1/m on the
grid {0, 1/m, ..., 1}, together with interior strict three-point local
minima and one independent fair sign per minimum.  First-superchaos
vectors carry one sign factor per term,

    f(path, signs) = sum_j eta_j g(t_j, path),

with the coefficient profile g drawn from a two-member catalog:

* W  (deterministic):   g(t, path) = w(t), w real piecewise constant;
* WS (sign modulated):  g(t, path) = w(t) * sgn(B_b - B_a).

Quadratic forms of multiplication-type operators integrate the signs
out exactly: the per-path integrand of <C_psi> is sum_j |g(t_j)|^2
psi(t_j, path), so only the path replicas are sampled.  Replica r draws
from the counter-based Philox stream keyed (master_seed, r), which makes
every estimate reproducible independently of scheduling.
"""

from __future__ import annotations

import json
import math
import platform
from dataclasses import dataclass

import numpy as np

from . import __version__
from .gaussian_algebra import StepFunction, step_product

__all__ = [
    "WarrenPath",
    "SuperchaosVector",
    "PsiSpec",
    "McEstimate",
    "Lemma43Row",
    "ObstructionReport",
    "TruncatedChaosVector",
    "MAX_CHAOS_ORDER",
    "DEFAULT_GRID_M",
    "DEFAULT_SAMPLES",
    "LEMMA43_HEADER",
    "replica_rng",
    "local_minima",
    "sample_path",
    "half_interval_profile",
    "chaos_eval",
    "chaos_norm_contribution",
    "per_path_integrand",
    "constant_evaluator",
    "bucket_probe_evaluator",
    "endpoint_sign_evaluator",
    "quad_form_C",
    "psi_eval",
    "lemma43_table",
    "op_A",
    "op_E",
    "chaos_terms",
    "chaos_eval_under_probe",
    "apply_matched_sign_probe",
    "mc_coherent_sign_probe",
    "obstruction_report",
    "write_lemma43_csv",
    "write_obstruction_json",
]

DEFAULT_GRID_M = 2 ** 14
DEFAULT_SAMPLES = 10 ** 4
MAX_CHAOS_ORDER = 2

LEMMA43_HEADER = "n,delta,m,samples,estimate,stderr,mass,mass_stderr,seed"


def replica_rng(master_seed: int, replica: int) -> np.random.Generator:
    """Philox stream keyed (master_seed, replica)."""
    if not 0 <= int(master_seed) < 2 ** 63:
        raise ValueError("master seed must fit in a signed 64-bit integer")
    return np.random.Generator(
        np.random.Philox(key=np.array([master_seed, replica], dtype=np.uint64)))


def local_minima(values) -> np.ndarray:
    """Interior indices j with values[j-1] > values[j] < values[j+1].

    Strict on both sides; ties never qualify; endpoints never returned.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or len(v) < 3:
        raise ValueError("need at least three values")
    d = np.diff(v)
    return np.where((d[:-1] < 0.0) & (d[1:] > 0.0))[0] + 1


@dataclass(frozen=True)
class WarrenPath:
    """Sampled path with its decorated strict local minima.

    values has m + 1 entries, values[0] == 0; minima are ascending
    interior indices; signs holds one +-1 per minimum.
    """

    m: int
    values: np.ndarray
    minima: np.ndarray
    signs: np.ndarray

    def __post_init__(self):
        if len(self.values) != self.m + 1:
            raise ValueError("values must have m + 1 entries")
        if self.values[0] != 0.0:
            raise ValueError("path must start at 0")
        if len(self.signs) != len(self.minima):
            raise ValueError("one sign per minimum required")

    def times(self) -> np.ndarray:
        return self.minima / self.m

    def validate(self) -> None:
        """Full invariant rescan (strictness and completeness)."""
        found = local_minima(self.values)
        if not np.array_equal(found, self.minima):
            raise ValueError("minima list is not the complete strict set")
        if not np.all(np.abs(self.signs) == 1):
            raise ValueError("signs must be +-1")


def sample_path(m: int, rng: np.random.Generator) -> WarrenPath:
    """Walk with N(0, 1/m) increments; signs drawn after the increments."""
    if m < 4:
        raise ValueError("m must be at least 4")
    steps = rng.normal(0.0, math.sqrt(1.0 / m), size=m)
    values = np.concatenate(([0.0], np.cumsum(steps)))
    minima = local_minima(values)
    signs = (2 * rng.integers(0, 2, size=len(minima)) - 1).astype(np.int8)
    return WarrenPath(m=m, values=values, minima=minima, signs=signs)


@dataclass(frozen=True)
class SuperchaosVector:
    """First-superchaos coefficient profile from the two-member catalog."""

    kind: str
    w: StepFunction
    a: float | None = None
    b: float | None = None

    def __post_init__(self):
        if self.kind not in ("W", "WS"):
            raise ValueError("kind must be 'W' or 'WS'")
        if self.w.horizon != 1.0:
            raise ValueError("profile lives on [0, 1]")
        if any(complex(v).imag != 0.0 for v in self.w.values):
            raise ValueError("profile weight must be real")
        if self.kind == "WS":
            if self.a is None or self.b is None or not 0.0 <= self.a < self.b <= 1.0:
                raise ValueError("WS profile needs grid times 0 <= a < b <= 1")

    @classmethod
    def deterministic(cls, w: StepFunction) -> "SuperchaosVector":
        return cls("W", w)

    @classmethod
    def sign_modulated(cls, w: StepFunction, a: float, b: float) -> "SuperchaosVector":
        return cls("WS", w, float(a), float(b))

    def weight_profile(self, m: int) -> np.ndarray:
        """w at every grid time j/m (sign factor excluded)."""
        breaks = np.asarray(self.w.breaks)
        vals = np.asarray([complex(v).real for v in self.w.values])
        t = np.arange(m + 1) / m
        idx = np.clip(np.searchsorted(breaks, t, side="right") - 1,
                      0, len(vals) - 1)
        return vals[idx]

    def sign_factor(self, path: WarrenPath) -> float:
        """+-1 (or 0 on a tie) for WS profiles, 1 for deterministic ones."""
        if self.kind == "W":
            return 1.0
        ia = _grid_index(self.a, path.m, "a")
        ib = _grid_index(self.b, path.m, "b")
        return float(np.sign(path.values[ib] - path.values[ia]))


def _grid_index(t: float, m: int, name: str) -> int:
    j = round(t * m)
    if abs(t * m - j) > 1e-9:
        raise ValueError(f"{name} = {t} is not aligned to the 1/{m} grid")
    return int(j)


def half_interval_profile() -> SuperchaosVector:
    """Deterministic profile with unit weight on (0, 1/2)."""
    return SuperchaosVector.deterministic(StepFunction.indicator(0.0, 0.5, 1.0))


def chaos_eval(f: SuperchaosVector, path: WarrenPath) -> float:
    """sum over minima of eta_j g(t_j, path); odd in the signs."""
    amp = f.weight_profile(path.m)[path.minima] * f.sign_factor(path)
    return float(np.sum(path.signs * amp))


def chaos_norm_contribution(f: SuperchaosVector, path: WarrenPath) -> float:
    """Per-path contribution sum_j |g(t_j, path)|^2 to ||f||^2."""
    amp = f.weight_profile(path.m)[path.minima] * f.sign_factor(path)
    return float(np.sum(amp * amp))


# --- evaluators: callables path -> psi value per minimum, in order ------

def constant_evaluator(c: float):
    def psi(path: WarrenPath) -> np.ndarray:
        return np.full(len(path.minima), float(c))
    return psi


def endpoint_sign_evaluator(a: float, b: float, cutoff: float = 0.5):
    """psi(t, path) = sgn(B_b - B_a) for t < cutoff, else 0."""
    def psi(path: WarrenPath) -> np.ndarray:
        ia = _grid_index(a, path.m, "a")
        ib = _grid_index(b, path.m, "b")
        s = np.sign(path.values[ib] - path.values[ia])
        return np.where(path.minima < cutoff * path.m, s, 0.0)
    return psi


@dataclass(frozen=True)
class PsiSpec:
    """Bucket decomposition on (0, 1/2): n buckets of width 1/(2n), each
    probed by the path increment over [k/(2n), k/(2n) + delta]."""

    n: int
    delta: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0.0 < self.delta < 0.5:
            raise ValueError("delta must lie in (0, 0.5)")

    def alignment(self, m: int) -> tuple[int, int]:
        """(bucket width, probe offset) in grid steps; raises if misaligned."""
        if m % (2 * self.n) != 0:
            raise ValueError(f"2n = {2 * self.n} must divide m = {m}")
        d = _grid_index(self.delta, m, "delta")
        if d < 1:
            raise ValueError("delta must be at least one grid step")
        return m // (2 * self.n), d


def psi_eval(spec: PsiSpec, t: float, path: WarrenPath) -> float:
    """Value in {-1, 0, +1}: zero at or beyond 1/2, otherwise the sign
    probe of the bucket containing t; exact ties return 0."""
    step, d = spec.alignment(path.m)
    j = _grid_index(t, path.m, "t")
    if not 0 <= j <= path.m:
        raise ValueError("t outside [0, 1]")
    if j >= path.m // 2:
        return 0.0
    edge = (j // step + 1) * step
    return float(np.sign(path.values[edge + d] - path.values[edge]))


def bucket_probe_evaluator(spec: PsiSpec):
    def psi(path: WarrenPath) -> np.ndarray:
        step, d = spec.alignment(path.m)
        half = path.m // 2
        jj = path.minima
        out = np.zeros(len(jj))
        mask = jj < half
        edge = (jj[mask] // step + 1) * step
        out[mask] = np.sign(path.values[edge + d] - path.values[edge])
        return out
    return psi


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if self.stderr < 0.0:
            raise ValueError("stderr must be nonnegative")


def per_path_integrand(psi, f: SuperchaosVector, path: WarrenPath) -> float:
    """sum_j |g(t_j, path)|^2 psi(t_j, path): the signs are already
    integrated out, exactly, so this is the whole per-path quantity."""
    w = f.weight_profile(path.m)[path.minima]
    s = f.sign_factor(path)
    return float(np.sum((w * w) * (s * s) * psi(path)))


def quad_form_C(psi, f: SuperchaosVector, samples: int, seed: int,
                m: int = DEFAULT_GRID_M) -> McEstimate:
    """Monte Carlo of the quadratic form <C_psi> on the profile vector f.

    psi is an evaluator (path -> array over the path's minima).  With
    psi == 1 this estimates ||f||^2, the total mass identity.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    vals = np.empty(samples)
    for r in range(samples):
        path = sample_path(m, replica_rng(seed, r))
        vals[r] = per_path_integrand(psi, f, path)
    stderr = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return McEstimate(float(vals.mean()), stderr, samples, int(seed))


@dataclass(frozen=True)
class Lemma43Row:
    n: int
    delta: float
    m: int
    samples: int
    estimate: float
    stderr: float
    mass: float
    mass_stderr: float
    u_mass: float
    u_mass_stderr: float
    seed: int


def _mean_se(acc: np.ndarray) -> tuple[float, float]:
    return float(acc.mean()), float(acc.std(ddof=1) / math.sqrt(len(acc)))


def lemma43_table(f: SuperchaosVector, n_list, delta_list, m: int,
                  samples: int, seed: int) -> list[Lemma43Row]:
    """Refinement table of <C_psi_{n,delta}> over shared path replicas.

    Rows carry the bucket-probe estimate, the mass estimate (psi == 1)
    and the minimum-anchored set mass u_mass of {B_{t+delta} > B_t},
    all from the same paths (common random numbers).  The profile must
    vanish on [1/2, 1].
    """
    wp = f.weight_profile(m)
    if np.any(wp[m // 2:] != 0.0):
        raise ValueError("profile must be supported in (0, 1/2)")
    n_list = [int(n) for n in n_list]
    delta_list = [float(d) for d in delta_list]
    steps = {n: PsiSpec(n, delta_list[0]).alignment(m)[0] for n in n_list}
    offsets = {d: _grid_index(d, m, "delta") for d in delta_list}
    if min(offsets.values()) < 1:
        raise ValueError("delta must be at least one grid step")

    est = {(n, d): np.empty(samples) for n in n_list for d in delta_list}
    u_acc = {d: np.empty(samples) for d in delta_list}
    mass_acc = np.empty(samples)
    half = m // 2
    for r in range(samples):
        path = sample_path(m, replica_rng(seed, r))
        jj = path.minima[path.minima < half]
        B = path.values
        s = f.sign_factor(path)
        w2 = wp[jj] ** 2 * (s * s)
        mass_acc[r] = w2.sum()
        for d, off in offsets.items():
            u_acc[d][r] = w2 @ (B[jj + off] > B[jj])
        for n in n_list:
            edge = (jj // steps[n] + 1) * steps[n]
            for d, off in offsets.items():
                est[(n, d)][r] = w2 @ np.sign(B[edge + off] - B[edge])

    mass, mass_se = _mean_se(mass_acc)
    rows = []
    for n in n_list:
        for d in delta_list:
            e, se = _mean_se(est[(n, d)])
            u, use = _mean_se(u_acc[d])
            rows.append(Lemma43Row(n, d, m, samples, e, se, mass, mass_se,
                                   u, use, int(seed)))
    return rows


def op_A(chi: StepFunction, f: SuperchaosVector) -> SuperchaosVector:
    """Time-side multiplication: profile w goes to w * chi, exactly.

    For a 0/1-valued chi this is an exact projection (idempotent at the
    coefficient level)."""
    return SuperchaosVector(f.kind, step_product(f.w, chi), f.a, f.b)


@dataclass(frozen=True)
class TruncatedChaosVector:
    """Chaos vector truncated at order 2, catalog coefficient profiles.

    order2 holds an ordered pair of profiles whose symmetrized product
    g(t, t') = (g_a(t) g_b(t') + g_a(t') g_b(t)) / 2 is the coefficient.
    """

    order0: float = 0.0
    order1: SuperchaosVector | None = None
    order2: tuple[SuperchaosVector, SuperchaosVector] | None = None


def validate_chaos_order(order: int) -> None:
    if order > MAX_CHAOS_ORDER:
        raise ValueError(f"chaos order {order} above the truncation "
                         f"{MAX_CHAOS_ORDER}")


def chaos_terms(F: TruncatedChaosVector, path: WarrenPath):
    """Yield (times, value) per term: the minimizer time set and the
    term value eta-product times coefficient."""
    if F.order0 != 0.0:
        yield (), float(F.order0)
    tt = path.times()
    eta = path.signs.astype(float)
    if F.order1 is not None:
        amp = (F.order1.weight_profile(path.m)[path.minima]
               * F.order1.sign_factor(path))
        for k in range(len(tt)):
            yield (tt[k],), float(eta[k] * amp[k])
    if F.order2 is not None:
        ga, gb = F.order2
        va = ga.weight_profile(path.m)[path.minima] * ga.sign_factor(path)
        vb = gb.weight_profile(path.m)[path.minima] * gb.sign_factor(path)
        for k in range(len(tt)):
            for l in range(k + 1, len(tt)):
                coeff = 0.5 * (va[k] * vb[l] + va[l] * vb[k])
                yield (tt[k], tt[l]), float(eta[k] * eta[l] * coeff)


def op_E(phi, F: TruncatedChaosVector, path: WarrenPath) -> float:
    """(E_phi F)(path): each term is multiplied by phi of its minimizer
    set, handed over as a tuple of ascending times."""
    return sum(float(phi(times)) * value for times, value in chaos_terms(F, path))


def chaos_eval_under_probe(f: SuperchaosVector, path: WarrenPath, psi) -> float:
    """(C_psi f)(path): term k picks up the factor psi(t_k, path)."""
    amp = f.weight_profile(path.m)[path.minima] * f.sign_factor(path)
    return float(np.sum(path.signs * amp * psi(path)))


def apply_matched_sign_probe(f: SuperchaosVector,
                             cutoff: float = 0.5) -> SuperchaosVector:
    """Exact action of C_psi, psi = 1_{t < cutoff} sgn(B_b - B_a), on the
    WS vector carrying the same probe: the probe squares against the
    profile's own sign factor and the result is the deterministic vector
    with profile w * 1_{(0, cutoff)} (equality per path off sign ties)."""
    if f.kind != "WS":
        raise ValueError("matched probe applies to a WS profile")
    chi = StepFunction.indicator(0.0, cutoff, 1.0)
    return SuperchaosVector.deterministic(step_product(f.w, chi))


def mc_coherent_sign_probe(zeta: float, t: float, samples: int,
                           seed: int) -> McEstimate:
    """Path-sign probe E[sgn B_t] under the coherent tilt |Exp(zeta)|^2.

    Increments after t integrate out, so B_t ~ N(0, t) is sampled
    directly and reweighted by exp(2 Re(zeta) B_t); the ratio estimator
    targets 2 Phi(2 Re(zeta) sqrt(t)) - 1.
    """
    if t <= 0.0:
        raise ValueError("t must be positive")
    if samples < 2:
        raise ValueError("need at least two samples")
    g = replica_rng(seed, 0)
    endpoint = g.normal(0.0, math.sqrt(t), size=samples)
    w = np.exp(2.0 * float(np.real(zeta)) * endpoint)
    s = np.sign(endpoint)
    ratio = float(np.sum(w * s) / np.sum(w))
    stderr = float(np.sqrt(np.sum((w * (s - ratio)) ** 2)) / np.sum(w))
    return McEstimate(ratio, stderr, samples, int(seed))


@dataclass(frozen=True)
class ObstructionReport:
    """Margin arithmetic joining the norm constant and the refinement table."""

    norm_value: float
    scheme: str
    N: int
    m_hat: float
    n: int
    delta: float
    grid_m: int
    samples: int
    margin: float
    master_seed: int
    versions: dict

    def as_dict(self) -> dict:
        # key order is part of the artifact contract
        return {
            "norm_value": self.norm_value,
            "scheme": self.scheme,
            "N": self.N,
            "m_hat": self.m_hat,
            "n": self.n,
            "delta": self.delta,
            "grid_m": self.grid_m,
            "samples": self.samples,
            "margin": self.margin,
            "master_seed": self.master_seed,
            "versions": self.versions,
        }


def _environment_versions() -> dict:
    return {"python": platform.python_version(),
            "numpy": np.__version__,
            "splitnoise": __version__}


def obstruction_report(norm_value: float, lemma43_rows, f_mass: float | None = None,
                       *, scheme: str = "oscillator", n_dim: int = 0)\
        -> ObstructionReport:
    """Combine the two measurements into the non-extension margin.

    m_hat is the normalized estimate of the (smallest delta, largest n)
    row, divided by f_mass when given and by that row's own mass estimate
    otherwise; margin = 3 m_hat - norm_value.  A positive margin is the
    quantitative contradiction; see the refinement-table caveats in the
    package documentation for what the bucket probes can deliver at a
    finite grid.
    """
    rows = list(lemma43_rows)
    if not rows:
        raise ValueError("need at least one refinement row")
    best = min(rows, key=lambda r: (r.delta, -r.n))
    denom = float(f_mass) if f_mass is not None else best.mass
    if denom <= 0.0:
        raise ValueError("mass must be positive")
    m_hat = best.estimate / denom
    return ObstructionReport(
        norm_value=float(norm_value), scheme=scheme, N=int(n_dim),
        m_hat=m_hat, n=best.n, delta=best.delta, grid_m=best.m,
        samples=best.samples, margin=3.0 * m_hat - float(norm_value),
        master_seed=best.seed, versions=_environment_versions())


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def write_lemma43_csv(rows, path) -> None:
    """CSV artifact: fixed header, UTF-8, LF, 12 significant digits."""
    lines = [LEMMA43_HEADER]
    for r in rows:
        lines.append(",".join([str(r.n), _fmt(r.delta), str(r.m),
                               str(r.samples), _fmt(r.estimate), _fmt(r.stderr),
                               _fmt(r.mass), _fmt(r.mass_stderr), str(r.seed)]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_obstruction_json(report: ObstructionReport, path) -> None:
    """JSON artifact: stable key order, UTF-8, trailing newline."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report.as_dict(), fh, ensure_ascii=False, indent=2)
        fh.write("\n")
