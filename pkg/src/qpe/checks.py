"""Self-checks of the analytic results, runnable from the CLI.

Each suite returns a :class:`CheckResult`; ``run_checks`` bundles them into
a JSON-ready report.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .entropy import pseudo_entropy, simplex_inverse, simplex_map
from .feature_maps import (
    EncoderKind,
    EncoderSpec,
    encode_amplitude,
    encode_circle,
    pad_to_power_of_two,
)
from .spectral import GAMMA_RANGE, LAMBDA_RANGE, PHI_RANGE, UnitaryMatrix, eig_unitary, kron, kron_all, su2_from_angles

SUITES = ("analytic", "prop1", "eq11", "continuity", "roundtrip")


@dataclass
class CheckResult:
    suite: str
    passed: bool
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.passed = bool(self.passed)


def analytic_circle(n: int = 1000) -> CheckResult:
    """Closed forms 2 theta sin theta and 2 cos 2theta sin(cos 2theta) + 2 sin 1."""
    th = np.linspace(-np.pi / 2, np.pi / 2, n + 2)[1:-1]
    err_a = max(abs(pseudo_entropy(encode_circle(t, "amplitude")).real - 2 * t * math.sin(t)) for t in th)
    err_b = max(
        abs(pseudo_entropy(encode_circle(t, "angle")).real - (2 * math.cos(2 * t) * math.sin(math.cos(2 * t)) + 2 * math.sin(1)))
        for t in th
    )
    tol = 1e-9
    return CheckResult("analytic", err_a < tol and err_b < tol, {"n": n, "max_err_amplitude": err_a, "max_err_angle": err_b, "tol": tol})


def _su2_phase(u: np.ndarray) -> float:
    """Positive eigenphase of an SU(2) matrix from its trace alone."""
    return math.acos(max(-1.0, min(1.0, float(np.trace(u).real) / 2)))


def _su2_entropy(u: np.ndarray) -> float:
    """Pseudo-entropy of an SU(2) matrix from its trace: phases are +-a, so S = 2 a sin a."""
    a = _su2_phase(u)
    return 2 * a * math.sin(a)


def _random_su2(rng: np.random.Generator) -> np.ndarray:
    return su2_from_angles(rng.uniform(*GAMMA_RANGE), rng.uniform(*PHI_RANGE), rng.uniform(*LAMBDA_RANGE))


def tensor_realness(count: int = 500, max_factors: int = 5, seed: int = 42) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst, tried = 0.0, 0
    accepted = 0
    while accepted < count:
        tried += 1
        k = int(rng.integers(1, max_factors + 1))
        u = kron_all(UnitaryMatrix(_random_su2(rng)) for _ in range(k))
        dec = eig_unitary(u)
        if dec.branch_warnings:
            continue
        worst = max(worst, abs(pseudo_entropy(u, decomposition=dec).imag))
        accepted += 1
    tol = 1e-8
    return CheckResult("prop1", worst < tol, {"count": count, "drawn": tried, "max_abs_imag": worst, "tol": tol})


def tensor_identity(count: int = 500, seed: int = 42, margin: float = 1e-3) -> CheckResult:
    """S(U1 (x) U2) = Tr(U2) S(U1) + Tr(U1) S(U2) on pairs whose phase sums stay off the cut.

    Left side: full 4x4 eigendecomposition. Right side: traces and the
    trace-only SU(2) entropy formula, no eigensolver involved.
    """
    rng = np.random.default_rng(seed)
    worst, tried, accepted = 0.0, 0, 0
    while accepted < count:
        tried += 1
        u1, u2 = _random_su2(rng), _random_su2(rng)
        if _su2_phase(u1) + _su2_phase(u2) >= math.pi - margin:
            continue
        lhs = complex(pseudo_entropy(kron(UnitaryMatrix(u1), UnitaryMatrix(u2))))
        rhs = np.trace(u2) * _su2_entropy(u1) + np.trace(u1) * _su2_entropy(u2)
        worst = max(worst, abs(lhs - rhs))
        accepted += 1
    tol = 1e-7
    return CheckResult("eq11", worst < tol, {"count": count, "drawn": tried, "max_abs_err": worst, "tol": tol})


def _continuity_domain(kind: EncoderKind, rng: np.random.Generator) -> np.ndarray:
    if kind is EncoderKind.AMPLITUDE:
        return rng.normal(size=3)
    if kind in (EncoderKind.CIRCLE_AMPLITUDE, EncoderKind.CIRCLE_ANGLE):
        return rng.uniform(-np.pi / 2, np.pi / 2, size=1)
    if kind in (EncoderKind.EXPRESSIVITY_SHALLOW, EncoderKind.EXPRESSIVITY_DEEP):
        return rng.uniform(0, 2 * np.pi, size=1)
    if kind in (EncoderKind.SYMMETRIC_RY, EncoderKind.SYMMETRIC_RZ):
        return rng.uniform(-1, 1, size=2)
    if kind is EncoderKind.PHASE_PRODUCT:
        return rng.uniform(-np.pi, np.pi, size=2)
    return rng.uniform(0, 2 * np.pi, size=2)


def _continuity_encode(kind: EncoderKind, x: np.ndarray):
    if kind is EncoderKind.AMPLITUDE:
        # amplitude inputs live on the simplex; perturb in the E^-1 chart
        return encode_amplitude(pad_to_power_of_two(simplex_map(x)))
    return EncoderSpec(kind).encode(x)


def continuity(points: int = 100, delta: float = 1e-6, seed: int = 42, branch_margin: float = 1e-3) -> CheckResult:
    """Empirical Lipschitz ratios |S(x + d) - S(x)| / |d| per encoder.

    Base points with an eigenphase within ``branch_margin`` of pi are
    redrawn. The ratios are recorded; the check fails only if one is
    unbounded in practice (above 1e3).
    """
    rng = np.random.default_rng(seed)
    ratios = {}
    for kind in EncoderKind:
        worst, accepted, tries = 0.0, 0, 0
        while accepted < points and tries < 50 * points:
            tries += 1
            x = _continuity_domain(kind, rng)
            u = _continuity_encode(kind, x)
            dec = eig_unitary(u)
            if np.any(np.pi - np.abs(dec.phases) < branch_margin):
                continue
            d = rng.normal(size=x.size)
            d *= delta / np.linalg.norm(d)
            s0 = complex(pseudo_entropy(u, decomposition=dec))
            s1 = complex(pseudo_entropy(_continuity_encode(kind, x + d)))
            worst = max(worst, abs(s1 - s0) / delta)
            accepted += 1
        ratios[kind.value] = {"max_ratio": worst, "points": accepted}
    bound = 1e3
    ok = all(r["max_ratio"] < bound and r["points"] == points for r in ratios.values())
    return CheckResult("continuity", ok, {"delta": delta, "bound": bound, "encoders": ratios})


def roundtrip(count: int = 1000, seed: int = 42) -> CheckResult:
    rng = np.random.default_rng(seed)
    simplex_err = 0.0
    for _ in range(count):
        d = int(rng.integers(2, 11))
        x = rng.uniform(-5, 5, size=d)
        simplex_err = max(simplex_err, float(np.max(np.abs(simplex_inverse(simplex_map(x)) - x))))

    example = np.array([0.17, 0.4, 0.23, 0.2])
    state = np.asarray(encode_amplitude(example))[:, 0]
    example_err = float(np.max(np.abs(np.sort(np.abs(state) ** 2) - np.sort(example))))

    amp_err = 0.0
    for _ in range(200):
        m = int(rng.choice([4, 8]))
        p = rng.dirichlet(np.ones(m))
        probs = np.abs(np.asarray(encode_amplitude(p))[:, 0]) ** 2
        amp_err = max(amp_err, float(np.max(np.abs(probs - p))))
    ok = simplex_err < 1e-9 and example_err < 1e-9 and amp_err < 1e-9
    return CheckResult(
        "roundtrip",
        ok,
        {"simplex_max_err": simplex_err, "worked_example_max_err": example_err, "amplitude_max_err": amp_err, "tol": 1e-9},
    )


_RUNNERS = {
    "analytic": analytic_circle,
    "prop1": tensor_realness,
    "eq11": tensor_identity,
    "continuity": continuity,
    "roundtrip": roundtrip,
}


def run_checks(suites=SUITES) -> dict:
    if isinstance(suites, str):
        suites = SUITES if suites == "all" else (suites,)
    results = []
    for s in suites:
        if s not in _RUNNERS:
            raise ValueError(f"unknown check suite {s!r}; choose from {SUITES}")
        results.append(_RUNNERS[s]())
    return {"passed": all(r.passed for r in results), "suites": [asdict(r) for r in results]}
