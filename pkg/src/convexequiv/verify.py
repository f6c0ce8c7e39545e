"""Acceptance driver: every check runs from a seed and prints one row.

Rows are declared in a fixed order and rendered as CSV with a short comment
header.  No timings or paths are printed, so identical arguments give
identical bytes.
"""
from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import subprocess
import sys
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .blend import Scenario, blend, blend_body, blend_many, clear_caches, validate
from .body import ConvexBody, hausdorff
from .config import TOL, overridden, tolerance_names
from .errors import OrbitCollision, StabilizerViolation
from .io import fmt
from .lab import (
    constant_width_convexity_check,
    regular_polygon,
    reuleaux_triangle,
    segment_midpoint_demo,
    thin_bound_check,
    triangle_counterexample,
    width_report,
)
from .selectors import SelectorId, chebyshev, evaluate, john, lowner
from .symmetry import check_containment
from .transforms import AffineTransform, GroupTag, SampleBounds, apply, rotation2d, sample

__all__ = [
    "THRESHOLDS",
    "Row",
    "RunConfig",
    "subseed",
    "random_polygon",
    "make_probes",
    "BlendCheck",
    "blend_suite",
    "fixture_scenarios",
    "run",
    "render",
]

THRESHOLDS = {
    "triangle_centroid": 1e-12,
    "triangle_gap": 1e-9,
    "triangle_hausdorff": 1.1e-3,
    "midpoint": 1e-8,
    "interpolation_point": 1e-8,
    "interpolation_body": 1e-6,
    "equivariance": 1e-5,
    "selector_equivariance": 1e-6,
    "containment": 1e-6,
    "properness_interval": 1e-12,
    "center_agreement": 1e-5,
    "mvee_center": 1e-6,
    "mvee_radius": 1e-5,
    "chebyshev_oracle": 1e-5,
    "metric": 1e-9,
    "cw_reuleaux": 2e-3,
    "cw_mixed": 4e-3,
    "cw_ball": 5e-3,
}


@dataclass(frozen=True)
class Row:
    criterion: int
    name: str
    passed: bool
    measured: float
    threshold: float
    detail: str
    override: bool = False


@dataclass
class RunConfig:
    seed: int = 0
    trials: int | None = None
    overrides: dict = field(default_factory=dict)
    filters: tuple[str, ...] = ()

    def split(self):
        """(numerical tolerance overrides, acceptance threshold overrides)."""
        tol = {k: v for k, v in self.overrides.items() if k in tolerance_names()}
        thr = {k: v for k, v in self.overrides.items() if k in THRESHOLDS}
        unknown = set(self.overrides) - set(tol) - set(thr)
        if unknown:
            raise KeyError(f"unknown tolerance name(s): {sorted(unknown)}")
        return tol, thr

    def digest(self) -> str:
        tol, thr = self.split()
        blob = json.dumps(
            {"tolerances": {**asdict(TOL), **tol}, "thresholds": {**THRESHOLDS, **thr}},
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def subseed(*keys: int) -> int:
    """A 32-bit seed derived from a tuple of integers."""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


def random_polygon(rng: np.random.Generator, k_range=(3, 9), radius=1.0, center=(0.0, 0.0)) -> ConvexBody:
    k = int(rng.integers(*k_range))
    while True:
        pts = np.asarray(center) + radius * rng.uniform(-1.0, 1.0, size=(k, 2))
        body = ConvexBody(pts)
        if body.dim == 2:
            return body


# -- blend suite ---------------------------------------------------------------

def fixture_scenarios() -> dict[str, Scenario]:
    T = ConvexBody([[0, 0], [1, 0], [0, 1]])
    square = ConvexBody([[0, 0], [1, 0], [1, 1], [0, 1]])
    iso = ConvexBody([[0, 0], [2, 0], [1, 3]])
    kite = ConvexBody([[0, 0], [1, 1], [0, 3], [-1, 1]])
    lopsided = ConvexBody([[0, 0], [3, 0], [1, 2], [0.2, 1.5]])
    return {
        "single-anchor": Scenario(GroupTag.EUCLIDEAN, ((T, [0.2, 0.2]),)),
        "two-anchors": Scenario(GroupTag.EUCLIDEAN, ((square, [0.5, 0.5]), (iso, [1.0, 2.5]))),
        "similarity-anchor": Scenario(GroupTag.SIM, ((kite, [0.0, 2.2]),)),
        "asymmetric-anchor": Scenario(GroupTag.EUCLIDEAN, ((lopsided, [5.0, -1.0]),)),
        "body-targets": Scenario(GroupTag.EUCLIDEAN, (
            (T, ConvexBody([[0, 0], [1, 1]])),
            (square, ConvexBody([[0.25, 0.25], [0.75, 0.25], [0.75, 0.75], [0.25, 0.75]])),
        )),
    }


def make_probes(scenario: Scenario, count: int, seed: int) -> list[ConvexBody]:
    """Anchor images, noisy anchor images (inside the bump support) and far bodies."""
    scenario = validate(scenario) if not scenario.validated else scenario
    probes = []
    m = len(scenario.pairs)
    for k in range(count):
        rng = np.random.default_rng(subseed(seed, k))
        kind = ("image", "near", "near", "far")[k % 4]
        i = (k // 4) % m
        K = scenario.pairs[i][0]
        if kind == "far":
            probes.append(random_polygon(rng, (5, 9), rng.uniform(0.5, 3.0), rng.uniform(-3, 3, 2)))
            continue
        g = sample(scenario.group, 2, seed=subseed(seed, k, 1))
        body = apply(g, K)
        if kind == "near":
            from .selectors import circumball

            reach = scenario.deltas[i] * (circumball(body)[1] if scenario.group is GroupTag.SIM else 1.0)
            noise = rng.standard_normal(body.vertices.shape)
            noise *= (reach * rng.uniform(0.05, 0.6)) / np.linalg.norm(noise, axis=1, keepdims=True)
            body = ConvexBody(body.vertices + noise)
        probes.append(body)
    return probes


@dataclass(frozen=True)
class BlendCheck:
    kind: str           # "interpolation" or "equivariance"
    probe: int
    trial: int
    deviation: float


def _deviation(a, b) -> float:
    if isinstance(a, ConvexBody):
        return hausdorff(a, b) / (1.0 + float(np.linalg.norm(b.vertices, axis=1).max()))
    return float(np.linalg.norm(a - b) / (1.0 + np.linalg.norm(b)))


def blend_suite(scenario: Scenario, seed: int, trials: int = 100, probes: int = 20,
                bounds: SampleBounds | None = None) -> list[BlendCheck]:
    """Interpolation at every anchor, then psi(gL) against g psi(L) over probes x trials."""
    scenario = validate(scenario)
    one = blend_body if scenario.body_targets else blend
    out = []
    for i, (K, y) in enumerate(scenario.pairs):
        got = one(K, scenario)
        err = hausdorff(got, y) if isinstance(y, ConvexBody) else float(np.linalg.norm(got - y))
        out.append(BlendCheck("interpolation", i, 0, err))
    gs = [sample(scenario.group, 2, bounds, seed=subseed(seed, 99, t)) for t in range(trials)]
    for p, L in enumerate(make_probes(scenario, probes, seed)):
        base = one(L, scenario)
        moved = blend_many([apply(g, L) for g in gs], scenario)
        for t, (g, value) in enumerate(zip(gs, moved)):
            expect = apply(g, base) if isinstance(base, ConvexBody) else g(base)
            out.append(BlendCheck("equivariance", p, t, _deviation(value, expect)))
    return out


# -- rows ------------------------------------------------------------------------

def _row_triangle(cfg, thr):
    table = triangle_counterexample(1000)
    worst = 0.0
    for n in (1, 10, 100, 1000):
        r = table.row(n)
        worst = max(worst, abs(r.cx - 1.0 / (3 * n)), abs(r.cy - 1.0 / 3.0))
    gap = abs(table.terminal_gap - 1.0 / 6.0)
    hd = table.row(1000).hausdorff_to_segment
    ok = worst <= thr["triangle_centroid"] and gap <= thr["triangle_gap"] and hd <= thr["triangle_hausdorff"]
    return worst, thr["triangle_centroid"], ok, f"gap_error={fmt(gap)} hausdorff_1000={fmt(hd)}"


def _row_midpoint(cfg, thr):
    worst = 0.0
    dims_ok = True
    for s in range(100):
        rng = np.random.default_rng(subseed(cfg.seed, 2, s))
        a, b = rng.uniform(-5, 5, 2), rng.uniform(-5, 5, 2)
        rep = segment_midpoint_demo(a, b)
        dims_ok &= rep.fixed_set.dim == 0
        worst = max(worst, rep.distance)
    return worst, thr["midpoint"], dims_ok and worst <= thr["midpoint"], f"segments=100 point_fixed_sets={dims_ok}"


def _row_blend(cfg, thr):
    trials = cfg.trials or 100
    worst_eq = 0.0
    interp_ok = True
    parts = []
    for j, (name, sc) in enumerate(fixture_scenarios().items()):
        checks = blend_suite(sc, subseed(cfg.seed, 3, j), trials=trials, probes=20)
        eq = max(c.deviation for c in checks if c.kind == "equivariance")
        it = max(c.deviation for c in checks if c.kind == "interpolation")
        lim = thr["interpolation_body"] if sc.body_targets else thr["interpolation_point"]
        interp_ok &= it <= lim
        worst_eq = max(worst_eq, eq)
        parts.append(f"{name}:interp={fmt(it)}")
    rejected = 0
    T = ConvexBody([[0, 0], [1, 0], [0, 1]])
    try:
        validate(Scenario(GroupTag.EUCLIDEAN, ((T, [0.3, 0.1]),)))
    except StabilizerViolation:
        rejected += 1
    square = ConvexBody([[0, 0], [1, 0], [1, 1], [0, 1]])
    g = rotation2d(0.7, (3.0, 1.0))
    try:
        validate(Scenario(GroupTag.EUCLIDEAN, ((square, [0.5, 0.5]), (apply(g, square), g([0.5, 0.5])))))
    except OrbitCollision:
        rejected += 1
    ok = interp_ok and worst_eq <= thr["equivariance"] and rejected == 2
    return worst_eq, thr["equivariance"], ok, " ".join(parts) + f" rejections={rejected}/2"


def _row_selectors(cfg, thr):
    aff_bounds = SampleBounds(max_condition=50.0)
    worst = 0.0
    plan = [(sel, GroupTag.SIM) for sel in SelectorId]
    plan += [(sel, GroupTag.AFF) for sel in SelectorId if sel.declared_group is GroupTag.AFF]
    for k, (sel, group) in enumerate(plan):
        for t in range(200):
            rng = np.random.default_rng(subseed(cfg.seed, 4, k, t))
            K = random_polygon(rng)
            g = sample(group, 2, aff_bounds, seed=subseed(cfg.seed, 4, k, t, 1))
            gK = apply(g, K)
            expect = g(evaluate(sel, K))
            err = np.linalg.norm(evaluate(sel, gK) - expect) / (1.0 + np.ptp(gK.vertices, axis=0).max())
            worst = max(worst, float(err))
    return worst, thr["selector_equivariance"], worst <= thr["selector_equivariance"], f"pairs={len(plan)} trials=200"


def symmetric_polygon(rng: np.random.Generator, kind: str, k: int = 1) -> ConvexBody:
    """Random polygon with a prescribed symmetry, placed by a random isometry."""
    if kind == "trivial":
        body = random_polygon(rng, (4, 9))
    elif kind == "mirror":
        while True:
            half = np.c_[rng.uniform(-1, 1, 3), rng.uniform(0.1, 1, 3)]
            body = ConvexBody(np.vstack([half, half * [1, -1]]))
            if body.dim == 2:
                break
    else:
        seeds = np.c_[rng.uniform(0.4, 1.0, 2), rng.uniform(0.0, 2 * np.pi / k, 2)]
        pts = []
        for r, a in seeds:
            for j in range(k):
                ang = a + 2 * np.pi * j / k
                pts.append([r * np.cos(ang), r * np.sin(ang)])
        body = ConvexBody(pts)
    g = sample(GroupTag.EUCLIDEAN, 2, seed=int(rng.integers(2**31)))
    return apply(g, body)


def _row_containment(cfg, thr):
    kinds = ["trivial", "mirror"] + [f"cyclic{k}" for k in range(2, 9)]
    worst = 0.0
    for t in range(50):
        rng = np.random.default_rng(subseed(cfg.seed, 5, t))
        kind = kinds[t % len(kinds)]
        k = int(kind[6:]) if kind.startswith("cyclic") else 1
        body = symmetric_polygon(rng, kind if k == 1 else "cyclic", k)
        _, rows = check_containment(body, group=GroupTag.EUCLIDEAN, tol=thr["containment"])
        worst = max(worst, max(r.distance for r in rows))
    return worst, thr["containment"], worst <= thr["containment"], "polygons=50 selectors=6"


def _row_properness(cfg, thr):
    trials = cfg.trials or 1000
    square = ConvexBody([[0, 0], [1, 0], [1, 1], [0, 1]])
    segment = ConvexBody([[0, 0], [1, 0]])
    violations = 0
    interval_err = 0.0
    for A, delta, m in ((square, 0.1, np.sqrt(2.0)), (segment, 0.2, 1.0)):
        rep = thin_bound_check(A, delta, trials, subseed(cfg.seed, 6))
        violations += rep.violations
        exact = ((m - 2 * delta) / (m + 2 * delta), (m + 2 * delta) / (m - 2 * delta))
        interval_err = max(interval_err, abs(rep.lambda_interval[0] - exact[0]), abs(rep.lambda_interval[1] - exact[1]))
    ok = violations == 0 and interval_err <= thr["properness_interval"]
    return interval_err, thr["properness_interval"], ok, f"violations={violations} trials={trials}x2"


def _chebyshev_grid_oracle(body: ConvexBody, levels: int = 12, n: int = 41):
    """Zooming grid search for the point deepest inside a polygon."""
    loop = body.loop
    e = np.roll(loop, -1, axis=0) - loop
    normals = np.c_[e[:, 1], -e[:, 0]] / np.linalg.norm(e, axis=1)[:, None]
    offsets = np.einsum("ij,ij->i", normals, loop)
    lo, hi = loop.min(axis=0), loop.max(axis=0)
    best = None
    for _ in range(levels):
        xs = np.linspace(lo[0], hi[0], n)
        ys = np.linspace(lo[1], hi[1], n)
        P = np.stack(np.meshgrid(xs, ys), -1).reshape(-1, 2)
        depth = (offsets[None, :] - P @ normals.T).min(axis=1)
        j = int(np.argmax(depth))
        best = P[j]
        span = (hi - lo) / (n - 1) * 2
        lo, hi = best - span, best + span
    return best


def _row_kernels(cfg, thr):
    worst = 0.0
    for t in range(50):
        rng = np.random.default_rng(subseed(cfg.seed, 7, t))
        while True:
            T = ConvexBody(rng.uniform(-1, 1, (3, 2)))
            if T.dim == 2 and np.ptp(T.vertices, axis=0).min() > 0.05:
                break
        c = T.vertices.mean(axis=0)
        worst = max(worst, np.linalg.norm(lowner(T).center - c), np.linalg.norm(john(T).center - c))
    square = ConvexBody([[0, 0], [1, 0], [1, 1], [0, 1]])
    E = lowner(square)
    c_err = float(np.linalg.norm(E.center - 0.5))
    r_err = float(np.abs(E.semi_axes - np.sqrt(2) / 2).max())
    right = ConvexBody([[0, 0], [1, 0], [0, 1]])
    ch_err = float(np.linalg.norm(chebyshev(right)[0] - _chebyshev_grid_oracle(right)))
    ok = (worst <= thr["center_agreement"] and c_err <= thr["mvee_center"]
          and r_err <= thr["mvee_radius"] and ch_err <= thr["chebyshev_oracle"])
    detail = f"mvee_center={fmt(c_err)} mvee_radius={fmt(r_err)} chebyshev={fmt(ch_err)}"
    return float(worst), thr["center_agreement"], ok, detail


def _row_metric(cfg, thr):
    worst = 0.0
    for t in range(1000):
        rng = np.random.default_rng(subseed(cfg.seed, 8, t))
        A, B, C = (random_polygon(rng, (3, 9), rng.uniform(0.2, 2), rng.uniform(-1, 1, 2)) for _ in range(3))
        ab, ba, bc, ac = hausdorff(A, B), hausdorff(B, A), hausdorff(B, C), hausdorff(A, C)
        worst = max(worst, hausdorff(A, A), abs(ab - ba), ac - (ab + bc))
        if ab <= 0.0 and A != B:
            worst = np.inf
        g = sample(GroupTag.EUCLIDEAN, 2, seed=subseed(cfg.seed, 8, t, 1))
        worst = max(worst, abs(hausdorff(apply(g, A), apply(g, B)) - ab))
        s = sample(GroupTag.SIM, 2, seed=subseed(cfg.seed, 8, t, 2))
        lam = float(np.sqrt(abs(np.linalg.det(s.matrix))))
        worst = max(worst, abs(hausdorff(apply(s, A), apply(s, B)) - lam * ab))
    return float(worst), thr["metric"], worst <= thr["metric"], "triples=1000"


def _row_constant_width(cfg, thr):
    R = reuleaux_triangle(1.0, 64)
    rep = width_report(R, thr["cw_reuleaux"])
    d_err = abs(rep.d - 1.0)
    mixed = constant_width_convexity_check(regular_polygon(256, 0.5), R, 0.5, thr["cw_mixed"] / 2)
    ok = rep.spread <= thr["cw_reuleaux"] and d_err <= thr["cw_reuleaux"] and mixed and rep.ball_gap <= thr["cw_ball"]
    detail = f"d={fmt(rep.d)} ball_gap={fmt(rep.ball_gap)} mixed_ok={mixed}"
    return rep.spread, thr["cw_reuleaux"], ok, detail


ROWS: list[tuple[int, str, Callable, tuple[str, ...]]] = [
    (1, "triangle-counterexample", _row_triangle, ("triangle_centroid", "triangle_gap", "triangle_hausdorff")),
    (2, "segment-midpoint", _row_midpoint, ("midpoint",)),
    (3, "blend-extension", _row_blend, ("interpolation_point", "interpolation_body", "equivariance")),
    (4, "selector-equivariance", _row_selectors, ("selector_equivariance",)),
    (5, "fixed-set-containment", _row_containment, ("containment",)),
    (6, "properness", _row_properness, ("properness_interval",)),
    (7, "optimization-kernels", _row_kernels, ("center_agreement", "mvee_center", "mvee_radius", "chebyshev_oracle")),
    (8, "hausdorff-metric", _row_metric, ("metric",)),
    (9, "constant-width", _row_constant_width, ("cw_reuleaux", "cw_mixed", "cw_ball")),
]


def _selected(cfg: RunConfig, criterion: int, name: str) -> bool:
    if not cfg.filters:
        return True
    return any(f == str(criterion) or f in name for f in cfg.filters)


def header(cfg: RunConfig, command: str = "verify-all") -> list[str]:
    lines = [
        f"# convexequiv {command}",
        f"# version: {__version__}",
        f"# seed: {cfg.seed}",
        f"# trials: {cfg.trials if cfg.trials is not None else 'default'}",
        f"# config: {cfg.digest()}",
    ]
    tol, thr = cfg.split()
    for k, v in sorted({**tol, **thr}.items()):
        lines.append(f"# override: {k}={fmt(v)}")
    return lines


def render(cfg: RunConfig, rows: list[Row]) -> str:
    buf = _io.StringIO()
    buf.write("\n".join(header(cfg)) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["criterion", "name", "status", "measured", "threshold", "override", "detail"])
    for r in rows:
        w.writerow([r.criterion, r.name, "PASS" if r.passed else "FAIL", fmt(r.measured), fmt(r.threshold),
                    "OVERRIDE" if r.override else "-", r.detail])
    passed = sum(r.passed for r in rows)
    buf.write(f"# summary: {passed}/{len(rows)} passed\n")
    return buf.getvalue()


def _subprocess_report(cfg: RunConfig, criteria: list[int]) -> str:
    argv = [sys.executable, "-m", "convexequiv", "--seed", str(cfg.seed)]
    if cfg.trials is not None:
        argv += ["--trials", str(cfg.trials)]
    for k, v in cfg.overrides.items():
        argv += ["--tol", f"{k}={fmt(v)}"]
    argv += ["verify-all", "--filter", ",".join(str(c) for c in criteria)]
    res = subprocess.run(argv, capture_output=True, text=True, check=False)
    return res.stdout


def run(cfg: RunConfig, include_determinism: bool = True) -> list[Row]:
    tol, thr_over = cfg.split()
    thr = {**THRESHOLDS, **thr_over}
    rows = []
    with overridden(**tol):
        clear_caches()
        for criterion, name, fn, uses in ROWS:
            if not _selected(cfg, criterion, name):
                continue
            measured, threshold, ok, detail = fn(cfg, thr)
            flagged = bool(tol) or any(u in thr_over for u in uses)
            rows.append(Row(criterion, name, bool(ok), float(measured), float(threshold), detail, flagged))
        clear_caches()
    if include_determinism and _selected(cfg, 10, "determinism"):
        ids = [c for c, *_ in ROWS]
        ran = [r.criterion for r in rows]
        if ran == ids:
            first = render(cfg, rows)
            second = _subprocess_report(cfg, ids)
        else:
            first = _subprocess_report(cfg, ids)
            second = _subprocess_report(cfg, ids)
        same = first == second and bool(first)
        mismatch = next((k for k, (x, y) in enumerate(zip(first.splitlines(), second.splitlines())) if x != y), None)
        detail = "byte-identical" if same else f"first differing line={mismatch}"
        rows.append(Row(10, "determinism", same, 0.0 if same else 1.0, 0.0, detail, bool(tol)))
    return rows
