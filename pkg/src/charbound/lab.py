"""Desk-scale sweeps: certificate growth for (Z/2)^k -> Z/N, the graph energy
bound, and norm growth of algebra homomorphisms L_1(H^n) -> L_1(G).

Every grid point draws its randomness from ``SeedSequence([seed, index])`` so a
sweep is reproducible regardless of how many worker processes run it.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Sequence

import numpy as np

from . import maps
from .additive import MapGraph, conv_stats, dilate_set, iterated_sumset, propk_report, sumset
from .groups import GroupHom, GroupSpec, best_dilation, direct_product, make_group, power
from .operators import (
    CharOperator,
    energy_certificate,
    estimate_norm_lp,
    hom_energy_bound,
    hom_norm_exact,
    hom_pullback,
)

log = logging.getLogger(__name__)

EXPERIMENTS = ("corollary1", "propk", "homgrowth")
POLICIES = ("walsh_paley", "random_injection", "sidon_injection", "identity", "pullback", "random_surjection")


class ConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    experiment: str = "corollary1"
    k: list[int] = field(default_factory=lambda: list(range(2, 9)))
    N: int = 1009
    g: list[int] = field(default_factory=lambda: [2] * 12)
    h: list[int] = field(default_factory=lambda: [3])
    n: list[int] = field(default_factory=lambda: list(range(1, 6)))
    sizes: list[int] = field(default_factory=lambda: [4, 8, 16])
    p: list[float] = field(default_factory=lambda: [1.0])
    policy: str = "sidon_injection"
    m: list[int] = field(default_factory=lambda: [2])
    seed: int = 0
    replicates: int = 1
    restarts: int = 16
    iters: int = 200
    sidon_moves: int = 3000
    workers: int = 1
    out: str = ""
    svg: str = ""

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if self.policy not in POLICIES:
            raise ConfigError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        for name in ("k", "n", "sizes", "p", "m"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must be a nonempty list")
        if any(not 1 <= p < 2 for p in self.p):
            raise ConfigError(f"p values must lie in [1, 2), got {self.p}")
        if self.replicates < 1 or self.workers < 1 or self.restarts < 0 or self.iters < 0:
            raise ConfigError("replicates and workers must be positive, budgets nonnegative")
        if any(m < 1 for m in self.m):
            raise ConfigError("dilations m must be positive")
        if self.experiment == "corollary1":
            if any(not 1 <= k <= 12 for k in self.k):
                raise ConfigError("corollary1 needs k in [1, 12]")
            if self.N % 2 == 0:
                raise ConfigError(f"corollary1 needs odd N, got {self.N}")
            if self.N <= 2 ** max(self.k):
                raise ConfigError(f"corollary1 needs N > 2^k_max = {2 ** max(self.k)}")
            if self.policy not in ("walsh_paley", "random_injection", "sidon_injection"):
                raise ConfigError(f"policy {self.policy!r} does not apply to corollary1")
        if self.experiment == "propk":
            if self.policy not in ("random_injection", "sidon_injection", "identity", "walsh_paley"):
                raise ConfigError(f"policy {self.policy!r} does not apply to propk")
            if self.policy == "sidon_injection" and self.N % 2 == 0:
                raise ConfigError("sidon_injection needs odd N")
            G = _group(self.g)
            if self.policy == "walsh_paley" and any(n != 2 for n in self.g):
                raise ConfigError("walsh_paley needs g = 2,2,...,2")
            if self.policy in ("random_injection", "sidon_injection") and max(self.sizes) > G.order:
                raise ConfigError(f"sizes must not exceed |G^| = {G.order}")
            if self.policy == "random_injection" and max(self.sizes) > self.N:
                raise ConfigError(f"sizes must not exceed N = {self.N} for an injection")
            if self.policy == "sidon_injection":
                try:
                    maps.sidon_set(self.N, max(self.sizes))
                except ValueError as exc:
                    raise ConfigError(str(exc)) from exc
        if self.experiment == "homgrowth":
            if self.policy not in ("random_injection", "pullback", "random_surjection"):
                raise ConfigError(f"policy {self.policy!r} does not apply to homgrowth")
            if any(n < 1 for n in self.n):
                raise ConfigError("n values must be positive")
            G = _group(self.g)
            if G.order > 2**14 or math.prod(self.h) ** max(self.n) > 3**7:
                raise ConfigError("homgrowth is capped at |G| <= 2^14 and |H^n| <= 3^7")
        return self


def _group(orders: Sequence[int]) -> GroupSpec:
    try:
        return make_group(orders)
    except (ValueError, OverflowError) as exc:
        raise ConfigError(str(exc)) from exc


# --- config parsing ---------------------------------------------------------


def _parse_list(text: str, conv: Callable[[str], Any]) -> list:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(conv(part))
    return out


def parse_value(name: str, text: str) -> Any:
    fields = {f.name: f for f in dataclasses.fields(SweepConfig)}
    if name not in fields:
        raise ConfigError(f"unknown config key {name!r}")
    kind = fields[name].type
    try:
        if kind == "list[int]":
            return _parse_list(text, int)
        if kind == "list[float]":
            return _parse_list(text, float)
        if kind == "int":
            return int(text)
        return text.strip()
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {text!r}") from exc


def parse_config(text: str) -> dict[str, Any]:
    """Flat ``key = value`` lines; ``#`` starts a comment; lists are comma separated."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key] = parse_value(key, value)
    return values


def load_config(path: str | None = None, **overrides) -> SweepConfig:
    values = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            values.update(parse_config(fh.read()))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return SweepConfig(**values).validate()


def _stream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def _int_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


# --- records and fitting ----------------------------------------------------


@dataclass
class SweepRecord:
    values: dict[str, Any]
    violations: list[str] = field(default_factory=list)
    wall_time: float = 0.0


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r2: float


def fit_exponent(records: Sequence[dict | SweepRecord], x: str, y: str) -> FitResult:
    """Least-squares fit of ``log2(y)`` against x."""
    rows = [r.values if isinstance(r, SweepRecord) else r for r in records]
    if len(rows) < 3:
        raise ValueError("need at least 3 records to fit")
    xs = np.array([float(r[x]) for r in rows])
    ys = np.array([float(r[y]) for r in rows])
    if np.any(ys <= 0):
        raise ValueError(f"{y} must be positive")
    if np.ptp(xs) == 0:
        raise ValueError(f"{x} has no variance")
    ly = np.log2(ys)
    slope, intercept = np.polyfit(xs, ly, 1)
    resid = ly - (slope * xs + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return FitResult(float(slope), float(intercept), r2)


# --- corollary1 -------------------------------------------------------------

COROLLARY1_COLUMNS = [
    "experiment", "k", "N", "p", "policy", "seed", "lambda_size", "K", "energy", "sidon_verified",
    "closed_form", "raw_bound", "effective_bound", "estimate",
]


def corollary1_closed_form(k: int) -> float:
    """rawBound at p = 1 for a Sidon graph on the full dual of (Z/2)^k."""
    return math.sqrt(2 ** (3 * k) / (2 * 4**k - 2**k))


def corollary1_map(cfg: SweepConfig, k: int, index: int) -> tuple[MapGraph, bool]:
    G = power(GroupSpec((2,)), k)
    chars = list(G.elements())
    if cfg.policy == "walsh_paley":
        return maps.walsh_paley_map(k, cfg.N), False
    if cfg.policy == "random_injection":
        return maps.random_injection_map(G, chars, GroupSpec((cfg.N,)), _stream(cfg.seed, index)), False
    res = maps.sidon_graph(G, chars, cfg.N, seed=_int_seed(cfg.seed, index), max_moves=cfg.sidon_moves)
    return res.graph, res.verified


def _corollary1_point(cfg: SweepConfig, index: int) -> list[SweepRecord]:
    k = cfg.k[index]
    t0 = time.perf_counter()
    graph, verified = corollary1_map(cfg, k, index)
    T = CharOperator(graph.g_dual, graph.h_dual, graph)
    out = []
    for p in cfg.p:
        cert = energy_certificate(T, p)
        est = estimate_norm_lp(T, p, restarts=cfg.restarts, iters=cfg.iters, seed=_int_seed(cfg.seed, index))
        viol = []
        if abs(cert.K - 1) > 1e-9:
            viol.append(f"K = {cert.K} != 1 for the full dual")
        if cert.energy < maps.sidon_energy(len(graph)):
            viol.append("energy below the trivial-quadruple count")
        if est < 1 - 1e-9:
            viol.append("estimate below the character witness 1")
        if not T.injective:
            viol.append("map is not injective")
        values = dict(
            experiment="corollary1", k=k, N=cfg.N, p=p, policy=cfg.policy, seed=cfg.seed,
            lambda_size=len(graph), K=cert.K, energy=cert.energy,
            sidon_verified=verified,
            closed_form=corollary1_closed_form(k) ** ((2 - p) / p) if cfg.policy == "sidon_injection" else None,
            raw_bound=cert.raw_bound, effective_bound=cert.effective_bound, estimate=est,
        )
        out.append(SweepRecord(values, viol))
    wall = time.perf_counter() - t0
    for r in out:
        r.wall_time = wall
    return out


# --- propk ------------------------------------------------------------------

PROPK_COLUMNS = [
    "experiment", "policy", "size", "m", "replicate", "seed", "energy", "normalized_energy", "mg_size",
    "m_image_size", "ratio", "exponent", "l1", "l2sq", "support", "counting_bound", "cs_ok",
    "counting_ok", "plunnecke_size", "plunnecke_ok",
]


def propk_graph(cfg: SweepConfig, size: int, rng: np.random.Generator) -> MapGraph:
    G = _group(cfg.g)
    if cfg.policy == "identity":
        return MapGraph(G, G, tuple((a, a) for a in G.elements()))
    if cfg.policy == "walsh_paley":
        return maps.walsh_paley_map(len(cfg.g), cfg.N)
    pick = rng.choice(G.order, size=size, replace=False)
    chars = [G.element(int(i)) for i in np.sort(pick)]
    if cfg.policy == "sidon_injection":
        return maps.sidon_image_map(G, chars, cfg.N)
    return maps.random_injection_map(G, chars, GroupSpec((cfg.N,)), rng)


def _propk_grid(cfg: SweepConfig) -> list[tuple[int, int, int]]:
    return [(s, m, r) for s in cfg.sizes for m in cfg.m for r in range(cfg.replicates)]


def _propk_point(cfg: SweepConfig, index: int) -> list[SweepRecord]:
    size, m, rep = _propk_grid(cfg)[index]
    t0 = time.perf_counter()
    graph = propk_graph(cfg, size, _stream(cfg.seed, index))
    report = propk_report(graph, m)
    prod = graph.prod_dual
    X = graph.points
    cs = conv_stats(prod, X, m)
    plus = sumset(prod, X, dilate_set(prod, m, X))
    iterated = iterated_sumset(prod, m + 1, X)
    viol = []
    if not cs.cauchy_schwarz_ok:
        viol.append("Cauchy-Schwarz l1^2 <= l2sq * support failed")
    if not cs.counting_ok:
        viol.append("counting bound l2sq <= |X||m.G||m.X| failed")
    if not plus <= iterated:
        viol.append("X + m.X not contained in (m+1)X")
    values = dict(
        experiment="propk", policy=cfg.policy, size=report.size, m=m, replicate=rep, seed=cfg.seed,
        energy=report.energy, normalized_energy=report.normalized_energy, mg_size=report.mg_size,
        m_image_size=report.m_image_size, ratio=report.ratio, exponent=report.empirical_exponent,
        l1=cs.l1, l2sq=cs.l2sq, support=cs.support, counting_bound=cs.counting_bound,
        cs_ok=cs.cauchy_schwarz_ok, counting_ok=cs.counting_ok,
        plunnecke_size=len(iterated), plunnecke_ok=len(plus) <= len(iterated) and plus <= iterated,
    )
    return [SweepRecord(values, viol, time.perf_counter() - t0)]


# --- homgrowth --------------------------------------------------------------

HOMGROWTH_COLUMNS = [
    "experiment", "policy", "n", "replicate", "seed", "dom_order", "cod_order", "s_size", "injective",
    "norm_exact", "norm_cap", "energy", "anorm", "gamma_size", "norm_lower_bound", "best_m",
    "mg_size", "mh_size", "n_threshold",
]


def coordinate_surjection(G: GroupSpec, Hn: GroupSpec) -> GroupHom | None:
    """A surjection G -> Hn sending distinct factors of G onto the factors of Hn, if one exists."""
    used: set[int] = set()
    rows = []
    for mod in Hn.orders:
        j = next((j for j, n in enumerate(G.orders) if j not in used and n % mod == 0), None)
        if j is None:
            return None
        used.add(j)
        rows.append(tuple(int(c == j) for c in range(G.rank)))
    return GroupHom(G, Hn, tuple(rows))


def _homgrowth_grid(cfg: SweepConfig) -> list[tuple[int, int]]:
    return [(n, r) for n in cfg.n for r in range(cfg.replicates)]


def _homgrowth_point(cfg: SweepConfig, index: int) -> list[SweepRecord]:
    n, rep = _homgrowth_grid(cfg)[index]
    t0 = time.perf_counter()
    G, H = _group(cfg.g), _group(cfg.h)
    Hn = power(H, n)
    rng = _stream(cfg.seed, index)
    m, mg, mh = best_dilation(G, H)
    base = dict(
        experiment="homgrowth", policy=cfg.policy, n=n, replicate=rep, seed=cfg.seed,
        dom_order=Hn.order, cod_order=G.order, best_m=m, mg_size=mg, mh_size=mh,
        n_threshold=math.ceil(2 * math.log2(mg)),
    )
    if cfg.policy == "pullback":
        psi = coordinate_surjection(G, Hn)
        T = hom_pullback(psi) if psi is not None else None
    elif Hn.order > G.order:
        T = None
    elif cfg.policy == "random_injection":
        T = maps.random_spectral_hom(Hn, G, rng)
    else:
        T = maps.random_surjective_hom(Hn, G, min(2 * Hn.order, G.order), rng)
    if T is None:
        log.warning("no injective hom L_1(H^%d) -> L_1(G) for policy %s", n, cfg.policy)
        return [SweepRecord(dict(base, injective=False), [], time.perf_counter() - t0)]
    norm = hom_norm_exact(T)
    bound = hom_energy_bound(T)
    viol = []
    if norm < bound.norm_lower_bound - 1e-9:
        viol.append(f"norm {norm} below energy bound {bound.norm_lower_bound}")
    if norm < bound.anorm - 1e-9:
        viol.append(f"norm {norm} below A-norm {bound.anorm}")
    cap = float(H.order**n)
    if cfg.policy == "random_injection" and norm > cap + 1e-9:
        viol.append(f"spectral hom norm {norm} exceeds |H|^n = {cap}")
    if cfg.policy == "pullback" and abs(norm - 1) > 1e-9:
        viol.append(f"pullback norm {norm} != 1")
    values = dict(
        base, s_size=len(T.S), injective=T.injective, norm_exact=norm, norm_cap=cap,
        energy=bound.energy, anorm=bound.anorm, gamma_size=bound.gamma_size,
        norm_lower_bound=bound.norm_lower_bound,
    )
    return [SweepRecord(values, viol, time.perf_counter() - t0)]


# --- driver -----------------------------------------------------------------

_POINTS = {
    "corollary1": (_corollary1_point, lambda cfg: len(cfg.k), COROLLARY1_COLUMNS),
    "propk": (_propk_point, lambda cfg: len(_propk_grid(cfg)), PROPK_COLUMNS),
    "homgrowth": (_homgrowth_point, lambda cfg: len(_homgrowth_grid(cfg)), HOMGROWTH_COLUMNS),
}


def columns(experiment: str) -> list[str]:
    return _POINTS[experiment][2]


def run(cfg: SweepConfig) -> list[SweepRecord]:
    """Run every grid point (in worker processes when ``cfg.workers > 1``), in grid order."""
    cfg.validate()
    point, count, _ = _POINTS[cfg.experiment]
    job = partial(point, cfg)
    indices = range(count(cfg))
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(job, indices))
    else:
        chunks = [job(i) for i in indices]
    return [r for chunk in chunks for r in chunk]


def run_corollary1(cfg: SweepConfig) -> list[SweepRecord]:
    return run(dataclasses.replace(cfg, experiment="corollary1"))


def run_propk(cfg: SweepConfig) -> list[SweepRecord]:
    return run(dataclasses.replace(cfg, experiment="propk"))


def run_homgrowth(cfg: SweepConfig) -> list[SweepRecord]:
    return run(dataclasses.replace(cfg, experiment="homgrowth"))


def _fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


def to_csv(records: Sequence[SweepRecord], experiment: str) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = columns(experiment)
    w.writerow(cols)
    for r in records:
        w.writerow([_fmt(r.values.get(c)) for c in cols])
    return buf.getvalue()


def write_csv(records: Sequence[SweepRecord], experiment: str, path: str):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(to_csv(records, experiment))


# --- summaries and charts ---------------------------------------------------

CHART_AXES = {
    "corollary1": ("k", "raw_bound"),
    "propk": ("size", "normalized_energy"),
    "homgrowth": ("n", "norm_exact"),
}


def series(records: Sequence[SweepRecord], experiment: str) -> list[tuple[float, float]]:
    """Chart series: minimum y per x (first p only for corollary1)."""
    x, y = CHART_AXES[experiment]
    rows = [r.values for r in records if r.values.get(y) is not None]
    if experiment == "corollary1" and rows:
        rows = [r for r in rows if r["p"] == rows[0]["p"]]
    best: dict[float, float] = {}
    for r in rows:
        best[r[x]] = min(best.get(r[x], math.inf), float(r[y]))
    return sorted(best.items())


def svg_chart(points: Sequence[tuple[float, float]], xlabel: str, ylabel: str, title: str = "") -> str:
    """Single-series line chart with a log2 y axis."""
    W, H, pad = 480, 320, 50
    pts = [(float(a), math.log2(b)) for a, b in points if b > 0]
    if not pts:
        pts = [(0.0, 0.0)]
    xs, ys = [a for a, _ in pts], [b for _, b in pts]
    x0, x1 = min(xs), max(xs) if max(xs) > min(xs) else min(xs) + 1
    y0, y1 = min(ys), max(ys) if max(ys) > min(ys) else min(ys) + 1

    def sx(a):
        return pad + (a - x0) / (x1 - x0) * (W - 2 * pad)

    def sy(b):
        return H - pad - (b - y0) / (y1 - y0) * (H - 2 * pad)

    path = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in pts)
    dots = "".join(f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="3"/>' for a, b in pts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">\n'
        f'<text x="{W / 2}" y="20" text-anchor="middle">{title}</text>\n'
        f'<line x1="{pad}" y1="{H - pad}" x2="{W - pad}" y2="{H - pad}" stroke="black"/>\n'
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{H - pad}" stroke="black"/>\n'
        f'<text x="{W / 2}" y="{H - 12}" text-anchor="middle">{xlabel}</text>\n'
        f'<text x="14" y="{H / 2}" transform="rotate(-90 14 {H / 2})" text-anchor="middle">log2 {ylabel}</text>\n'
        f'<text x="{pad - 4}" y="{sy(y0):.2f}" text-anchor="end">{y0:.3g}</text>\n'
        f'<text x="{pad - 4}" y="{sy(y1):.2f}" text-anchor="end">{y1:.3g}</text>\n'
        f'<text x="{sx(x0):.2f}" y="{H - pad + 16}" text-anchor="middle">{x0:g}</text>\n'
        f'<text x="{sx(x1):.2f}" y="{H - pad + 16}" text-anchor="middle">{x1:g}</text>\n'
        f'<polyline fill="none" stroke="steelblue" stroke-width="2" points="{path}"/>\n'
        f'<g fill="steelblue">{dots}</g>\n</svg>\n'
    )


def write_svg(records: Sequence[SweepRecord], experiment: str, path: str):
    x, y = CHART_AXES[experiment]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(svg_chart(series(records, experiment), x, y, title=experiment))


def summarize(records: Sequence[SweepRecord], experiment: str) -> FitResult | None:
    pts = series(records, experiment)
    if len(pts) < 3 or len({a for a, _ in pts}) < 2:
        return None
    x, y = CHART_AXES[experiment]
    return fit_exponent([{x: a, y: b} for a, b in pts], x, y)
