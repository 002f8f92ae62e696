"""Experiment harness: config parsing, the five experiment kinds, series
emission, and run manifests.

Config files are flat ``key = value`` text with dotted section prefixes;
unknown keys are rejected.  Example::

    kind = run
    initial.generator = rigid_rotation
    initial.n = 64
    initial.omega = 1.0
    integrator.t_end = 1.0
    integrator.cfl = 0.5
    seeds = 0
    output.formats = csv,jsonl

Floating-point output is written at 17 significant digits so every value
round-trips bitwise through either format.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time as _time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib.metadata import version as _pkg_version
from pathlib import Path

import numpy as np

from .core import ChainState, rising_weight, weighted_seminorm_sq, weighted_supnorm_sq
from .dynamics import IntegratorConfig, Trajectory, detect_blowup, run
from .errors import ConfigError, FitRejected
from .initial_data import GENERATORS, make_initial, random_chain
from .spectral import eta_to_theta
from .tension import certify_bounds, green_matrix_for_chain

KINDS = ("run", "convergence", "inequality_suite", "green_certify", "blowup_hunt")
FORMATS = ("csv", "jsonl")

_FLOAT = "%.17g"


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    generator: str | None
    n_list: tuple
    generator_params: dict
    integrator: IntegratorConfig
    seeds: tuple
    output_dir: Path
    formats: tuple
    workers: int = 1
    suite_samples: int = 10000
    suite_n_values: tuple = (4, 16, 64)
    suite_r_values: tuple = (0.5, 1.0, 1.5, 2.0)
    config_bytes: bytes = b""

    @property
    def n(self) -> int:
        return self.n_list[0]


_INTEGRATOR_KEYS = {
    "scheme": str,
    "cfl": float,
    "dt_max": float,
    "dt_min": float,
    "project": bool,
    "halt_on_negative_tension": bool,
    "t_end": float,
    "report_stride": int,
    "blowup_threshold": float,
}

_TOP_KEYS = {"kind", "seeds", "workers"}
_OUTPUT_KEYS = {"output.dir", "output.formats"}
_SUITE_KEYS = {"suite.samples", "suite.n_values", "suite.r_values"}


def _parse_bool(raw: str, key: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "on", "yes", "1"):
        return True
    if low in ("false", "off", "no", "0"):
        return False
    raise ConfigError(f"key {key!r}: expected a boolean, got {raw!r}")


def _parse_scalar(raw: str, typ, key: str):
    try:
        if typ is bool:
            return _parse_bool(raw, key)
        return typ(raw)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: cannot parse {raw!r} as {typ.__name__}") from exc


def parse_config(path) -> ExperimentConfig:
    """Read and validate an experiment config file.

    Raises ConfigError with a message naming the offending key for any
    schema violation, unknown key, or unknown generator.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    data = path.read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid UTF-8") from exc

    pairs: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key in pairs:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        pairs[key] = value.strip()
    return build_config(pairs, config_bytes=data)


def build_config(pairs: dict, config_bytes: bytes = b"") -> ExperimentConfig:
    pairs = dict(pairs)

    kind = pairs.pop("kind", None)
    if kind is None:
        raise ConfigError("missing required key 'kind'")
    if kind not in KINDS:
        raise ConfigError(f"key 'kind': unknown experiment kind {kind!r}; known: {', '.join(KINDS)}")

    generator = pairs.pop("initial.generator", None)
    if generator is not None and generator not in GENERATORS:
        known = ", ".join(sorted(GENERATORS))
        raise ConfigError(f"key 'initial.generator': unknown generator {generator!r}; known: {known}")
    needs_generator = kind in ("run", "convergence", "blowup_hunt")
    if needs_generator and generator is None:
        raise ConfigError(f"experiment kind {kind!r} requires key 'initial.generator'")

    raw_n = pairs.pop("initial.n", None)
    if needs_generator and raw_n is None:
        raise ConfigError(f"experiment kind {kind!r} requires key 'initial.n'")
    n_list: tuple = ()
    if raw_n is not None:
        try:
            n_list = tuple(int(tok) for tok in raw_n.split(","))
        except ValueError as exc:
            raise ConfigError(f"key 'initial.n': expected integer(s), got {raw_n!r}") from exc
        if any(nv < 2 for nv in n_list):
            raise ConfigError(f"key 'initial.n': every resolution must be >= 2, got {raw_n!r}")
        if kind == "convergence" and len(n_list) < 2:
            raise ConfigError("key 'initial.n': convergence needs at least two resolutions")

    gen_params: dict = {}
    import inspect

    sig = inspect.signature(GENERATORS[generator]) if generator else None
    for key in [k for k in pairs if k.startswith("initial.")]:
        param = key[len("initial."):]
        if sig is None or param not in sig.parameters:
            raise ConfigError(f"unknown key {key!r}")
        raw = pairs.pop(key)
        ann = sig.parameters[param].annotation
        typ = int if ann is int else float
        gen_params[param] = _parse_scalar(raw, typ, key)

    integ_kwargs: dict = {}
    for key in [k for k in pairs if k.startswith("integrator.")]:
        param = key[len("integrator."):]
        if param not in _INTEGRATOR_KEYS:
            raise ConfigError(f"unknown key {key!r}")
        integ_kwargs[param] = _parse_scalar(pairs.pop(key), _INTEGRATOR_KEYS[param], key)
    integ_kwargs.setdefault("t_end", 1.0)
    try:
        integrator = IntegratorConfig(**integ_kwargs)
    except ValueError as exc:
        raise ConfigError(f"integrator settings invalid: {exc}") from exc

    seeds_raw = pairs.pop("seeds", "0")
    try:
        seeds = tuple(int(tok) for tok in seeds_raw.split(","))
    except ValueError as exc:
        raise ConfigError(f"key 'seeds': expected integer(s), got {seeds_raw!r}") from exc

    workers_raw = pairs.pop("workers", "1")
    workers = _parse_scalar(workers_raw, int, "workers")
    if workers < 1:
        raise ConfigError(f"key 'workers': must be >= 1, got {workers}")

    output_dir = Path(pairs.pop("output.dir", "out"))
    formats_raw = pairs.pop("output.formats", "csv,jsonl")
    formats = tuple(tok.strip() for tok in formats_raw.split(","))
    for fmt in formats:
        if fmt not in FORMATS:
            raise ConfigError(f"key 'output.formats': unknown format {fmt!r}; known: csv, jsonl")

    samples = _parse_scalar(pairs.pop("suite.samples", "10000"), int, "suite.samples")
    n_values = tuple(
        _parse_scalar(tok, int, "suite.n_values")
        for tok in pairs.pop("suite.n_values", "4,16,64").split(",")
    )
    r_values = tuple(
        _parse_scalar(tok, float, "suite.r_values")
        for tok in pairs.pop("suite.r_values", "0.5,1,1.5,2").split(",")
    )

    if pairs:
        raise ConfigError(f"unknown key {sorted(pairs)[0]!r}")

    return ExperimentConfig(
        kind=kind,
        generator=generator,
        n_list=n_list,
        generator_params=gen_params,
        integrator=integrator,
        seeds=seeds,
        output_dir=output_dir,
        formats=formats,
        workers=workers,
        suite_samples=samples,
        suite_n_values=n_values,
        suite_r_values=r_values,
        config_bytes=config_bytes,
    )


# ---------------------------------------------------------------------------
# manifest


@dataclass
class RunManifest:
    config_hash: str
    code_version: str
    started: str
    finished: str = ""
    status: str = "incomplete"
    termination: str | None = None
    violations: int = 0
    files: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def write(self, output_dir: Path) -> Path:
        path = output_dir / "manifest.json"
        payload = {
            "config_hash": self.config_hash,
            "code_version": self.code_version,
            "started": self.started,
            "finished": self.finished,
            "status": self.status,
            "termination": self.termination,
            "violations": self.violations,
            "files": sorted(self.files),
            "summary": self.summary,
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


def _now() -> str:
    return _time.strftime("%Y-%m-%dT%H:%M:%S", _time.gmtime())


def _code_version() -> str:
    try:
        return _pkg_version("whipchain")
    except Exception:
        return "unknown"


# ---------------------------------------------------------------------------
# series emission


def _series_table(traj: Trajectory) -> tuple[list, list]:
    cols = traj.series()
    header = list(cols)
    # monitored-only ratio columns (never asserted): a/e2, c/(e2^{3/2} e3^{1/2}),
    # d_m/e3 powers, and the discrete Gronwall quotient for e~_3
    e2, e3 = cols["e2"], cols["e3"]
    et3, t = cols["et3"], cols["t"]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = {
            "ratio_a_e2": cols["a"] / e2,
            "ratio_c_e2e3": cols["c"] / (e2**1.5 * np.sqrt(e3)),
            "ratio_d1_e3p4": cols["d1"] / e3**4,
            "ratio_d2_e3p4": cols["d2"] / e3**4,
            "ratio_d3_e3p6": cols["d3"] / e3**6,
        }
        gron = np.full(len(t), np.nan)
        if len(t) > 1:
            gron[1:] = np.diff(et3) / (np.diff(t) * e3[:-1] ** 7)
        ratios["gronwall_et3_e3p7"] = gron
    cols.update(ratios)
    header += list(ratios)
    rows = [[cols[h][i] for h in header] for i in range(len(t))]
    return header, rows


def emit_series(traj: Trajectory, fmt: str, path) -> Path:
    """Write the trajectory to ``path``: CSV scalar series, or JSON-lines
    snapshots including the full eta, eta_dot, sigma arrays.  Refuses empty
    trajectories without creating a file."""
    if not traj.snapshots:
        raise ValueError("cannot emit an empty trajectory")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        header, rows = _series_table(traj)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_FLOAT % v for v in row])
    elif fmt == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            for snap in traj.snapshots:
                fh.write(json.dumps(snapshot_to_json(snap)) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def snapshot_to_json(snap) -> dict:
    st, sol, rep = snap.state, snap.tension, snap.report
    return {
        "t": st.time,
        "n": st.n,
        "d": st.d,
        "eta": st.eta.tolist(),
        "eta_dot": st.eta_dot.tolist(),
        "sigma": sol.sigma.tolist(),
        "min_sigma": sol.min_sigma,
        "positivity": sol.positivity,
        "e": rep.e.tolist(),
        "e_tilde": rep.e_tilde.tolist(),
        "u0": rep.u0,
        "v0": rep.v0,
        "a": rep.a,
        "b": rep.b,
        "c": rep.c,
        "d_norms": rep.d.tolist(),
        "constraint_drift": rep.constraint_drift,
    }


def snapshot_state_from_json(obj: dict) -> ChainState:
    """Rebuild the chain state from one JSON-lines record (bitwise, since
    json round-trips Python floats exactly)."""
    return ChainState(obj["n"], obj["d"], np.array(obj["eta"]), np.array(obj["eta_dot"]), obj["t"])


# ---------------------------------------------------------------------------
# experiment kinds


def _run_single(cfg: ExperimentConfig, seed: int, tag: str) -> tuple[list, str, Trajectory]:
    params = dict(cfg.generator_params)
    if cfg.generator == "random":
        params["rng"] = seed
    initial = make_initial(cfg.generator, cfg.n, **params)
    traj = run(initial, cfg.integrator)
    files = []
    for fmt in cfg.formats:
        suffix = "csv" if fmt == "csv" else "jsonl"
        path = cfg.output_dir / f"{tag}.{suffix}"
        emit_series(traj, fmt, path)
        files.append(path.name)
    return files, traj.termination, traj


def _kind_run(cfg: ExperimentConfig, manifest: RunManifest) -> None:
    termination = None
    for seed in cfg.seeds:
        tag = f"series_seed{seed}" if len(cfg.seeds) > 1 else "series"
        files, termination, _ = _run_single(cfg, seed, tag)
        manifest.files += files
    manifest.termination = termination
    manifest.summary["seeds"] = list(cfg.seeds)


def _kind_convergence(cfg: ExperimentConfig, manifest: RunManifest) -> None:
    """One continuum initial datum, discretized at every resolution through
    the spectral maps, integrated to t_end.

    The datum is the generator state at a reference resolution 2 max(n),
    continuized; each chain is its n-mode discretization.  Per-n errors are
    measured against the continuum rigid-rotation closed form when available,
    else pairwise between consecutive resolutions through the isometric
    coefficient representation.
    """
    from .spectral import angle_coefficients, continuize_Gn, discretize_Fn, theta_to_eta

    n_list = sorted(cfg.n_list)
    n_ref = 2 * n_list[-1]
    ref = make_initial(cfg.generator, n_ref, **cfg.generator_params)
    coeff_pos, coeff_vel = continuize_Gn(eta_to_theta(ref))
    finals = {}
    for nv in n_list:
        chain = theta_to_eta(discretize_Fn(coeff_pos, nv, coeff_vel))
        traj = run(chain, cfg.integrator)
        finals[nv] = traj.snapshots[-1].state

    rows = []
    t_end = cfg.integrator.t_end
    if cfg.generator == "rigid_rotation":
        omega = cfg.generator_params.get("omega", 1.0)
        u = np.array([np.cos(omega * t_end), np.sin(omega * t_end)])
        for nv in n_list:
            s = np.arange(1, nv + 2) / nv  # grid points k/n, k = 1..n+1
            exact = np.outer(1.0 - np.minimum(s, 1.0), u)
            err = float(np.max(np.linalg.norm(finals[nv].eta - exact, axis=1)))
            rows.append((nv, err))
    else:
        coeffs = {
            nv: angle_coefficients(eta_to_theta(finals[nv]).theta, nv) for nv in n_list
        }
        for nv, nv_next in zip(n_list[:-1], n_list[1:]):
            a = np.zeros(nv_next)
            a[: nv] = coeffs[nv]
            err = float(np.linalg.norm(a - coeffs[nv_next]))
            rows.append((nv, err))

    path = cfg.output_dir / "convergence.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "error", "ratio_to_previous"])
        prev = None
        for nv, err in rows:
            ratio = "" if prev in (None, 0.0) else _FLOAT % (prev / err)
            writer.writerow([nv, _FLOAT % err, ratio])
            prev = err
    manifest.files.append(path.name)
    manifest.summary["errors"] = {str(nv): err for nv, err in rows}
    decreasing = all(a > b for (_, a), (_, b) in zip(rows[:-1], rows[1:]))
    manifest.summary["monotone_decreasing"] = decreasing


def _basic_inequality_violations(n: int, r: float, batch: np.ndarray, slack: float = 1e-12):
    """Count violations of the three explicit weighted inequalities on a
    (B, n) batch of sequences."""
    B = batch.shape[0]
    ks = np.arange(1, n + 1)
    w_r = rising_weight(ks, r, n)
    w_rm1 = rising_weight(ks, r - 1.0, n)
    w_rp1 = rising_weight(np.arange(1, n), r + 1.0, n)

    fsq = batch * batch
    diff = n * (batch[:, 1:] - batch[:, :-1])
    norm_rp1_1 = np.sum(w_rp1 * diff * diff, axis=1) / n
    norm_rm1_0 = np.sum(w_rm1 * fsq, axis=1) / n
    norm_r_0 = np.sum(w_r * fsq, axis=1) / n
    end_r = w_r[-1] * fsq[:, -1]

    scale = np.maximum(np.max(np.abs(fsq), axis=1), 1.0)
    # (i): s_i^{(r)} |f_i|^2 <= s_n^{(r)} |f_n|^2 + (1/r) ||f||^2_{r+1,1} for every i
    lhs_i = w_r * fsq
    rhs_i = (end_r + norm_rp1_1 / r)[:, None]
    v1 = int(np.sum(np.any(lhs_i > rhs_i + slack * scale[:, None], axis=1)))
    # (ii): ||f||^2_{r-1,0} <= (4/r^2) ||f||^2_{r+1,1} + (2/r) s_n^{(r)} |f_n|^2
    v2 = int(np.sum(norm_rm1_0 > 4.0 / r**2 * norm_rp1_1 + 2.0 / r * end_r + slack * scale))
    # (iii): s_n^{(r)} |f_n|^2 <= (2r^2+4r+1)/(r(r+1)) ||f||^2_{r+1,1} + 4(r+1) ||f||^2_{r,0}
    cr = (2 * r**2 + 4 * r + 1) / (r * (r + 1))
    v3 = int(np.sum(end_r > cr * norm_rp1_1 + 4 * (r + 1) * norm_r_0 + slack * scale))
    return v1, v2, v3


def _weight_bound_violations(rng: np.random.Generator, trials: int = 2000, slack: float = 1e-12) -> int:
    """Spot-check the weight-ratio and shift bounds on random (p, q, j, k, n)."""
    from math import exp, lgamma

    bad = 0
    for _ in range(trials):
        n = int(rng.integers(2, 200))
        k = int(rng.integers(1, n + 1))
        p = float(rng.uniform(0.05, 4.0))
        q = float(rng.uniform(0.05, 4.0))
        j = int(rng.integers(0, n - k + 1))
        skp = rising_weight(k, p, n)
        ratio = rising_weight(k, p + q, n) / rising_weight(k, q, n)
        cpq = exp(lgamma(p + q + 1) - lgamma(p + 1) - lgamma(q + 1))
        if not (skp * (1 - slack) <= ratio <= cpq * skp * (1 + slack)):
            bad += 1
        skj = rising_weight(k + j, p, n)
        cj = exp(lgamma(j + p + 1) - lgamma(j + 1) - lgamma(p + 1))
        if not (skp * (1 - slack) <= skj <= cj * skp * (1 + slack)):
            bad += 1
    return bad


def _product_bound_violations(rng: np.random.Generator, trials: int = 500, slack: float = 1e-12) -> int:
    """||fg||^2_{p+q,0} <= [Gamma(p+q+1)/(Gamma(p+1)Gamma(q+1))] [f]^2_{p,0} ||g||^2_{q,0}."""
    from math import gamma

    bad = 0
    for _ in range(trials):
        n = int(rng.integers(2, 128))
        p = float(rng.uniform(0.0, 3.0))
        q = float(rng.uniform(0.0, 3.0))
        f = rng.normal(size=n)
        g = rng.normal(size=n)
        lhs = weighted_seminorm_sq(f * g, p + q, 0, n)
        rhs = gamma(p + q + 1) / (gamma(p + 1) * gamma(q + 1)) * weighted_supnorm_sq(
            f, p, 0, n
        ) * weighted_seminorm_sq(g, q, 0, n)
        if lhs > rhs * (1 + slack) + slack:
            bad += 1
    return bad


def _kind_inequality_suite(cfg: ExperimentConfig, manifest: RunManifest) -> None:
    rng = np.random.default_rng(cfg.seeds[0])
    per_cell = {}
    total = 0
    for nv in cfg.suite_n_values:
        batch = rng.normal(size=(cfg.suite_samples, nv))
        for r in cfg.suite_r_values:
            v = _basic_inequality_violations(nv, r, batch)
            per_cell[f"n={nv},r={r}"] = list(v)
            total += sum(v)
    wviol = _weight_bound_violations(rng)
    pviol = _product_bound_violations(rng)
    total += wviol + pviol
    manifest.violations = total
    manifest.summary.update(
        {
            "samples": cfg.suite_samples,
            "basic_inequalities": per_cell,
            "weight_bound_violations": wviol,
            "product_bound_violations": pviol,
        }
    )
    path = cfg.output_dir / "inequality_suite.json"
    path.write_text(json.dumps(manifest.summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    manifest.files.append(path.name)


def _kind_green_certify(cfg: ExperimentConfig, manifest: RunManifest) -> None:
    """Random admissible configurations (exact constraint by construction in
    angle space) swept through the full bound certificate.

    Alternates generic bounded-turn states (all alpha > 0, exercising the
    upper bounds and the corner minimum) with small-turn states whose
    per-link angles scale like n^{-3/4} so the curvature hypothesis of the
    lower bound is actually met.
    """
    rng = np.random.default_rng(cfg.seeds[0])
    count = cfg.suite_samples
    n_values = cfg.suite_n_values
    stats = {
        "count": 0, "applicable_upper": 0, "upper_failures": 0,
        "admissible_lower": 0, "lower_failures": 0, "corner_failures": 0,
        "minmax_failures": 0,
    }
    for i in range(count):
        nv = max(int(n_values[i % len(n_values)]), 2)
        turn = 1.45 if i % 2 == 0 else 0.6 * nv**-0.75
        chain = random_chain(nv, rng, max_turn=turn, vel_scale=2.0)
        cert = certify_bounds(green_matrix_for_chain(chain), chain)
        stats["count"] += 1
        stats["minmax_failures"] += 0 if cert.minmax_bound_ok else 1
        if cert.all_alpha_nonneg:
            stats["applicable_upper"] += 1
            if not (cert.diff_bound_ok and cert.ratio_bound_ok):
                stats["upper_failures"] += 1
            if not cert.corner_ok:
                stats["corner_failures"] += 1
        if cert.upsilon_admissible:
            stats["admissible_lower"] += 1
            if not cert.lower_bound_ok:
                stats["lower_failures"] += 1
    manifest.violations = (
        stats["upper_failures"] + stats["lower_failures"]
        + stats["corner_failures"] + stats["minmax_failures"]
    )
    manifest.summary.update(stats)
    path = cfg.output_dir / "green_certify.json"
    path.write_text(json.dumps(stats, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    manifest.files.append(path.name)


def _kind_blowup_hunt(cfg: ExperimentConfig, manifest: RunManifest) -> None:
    files, termination, traj = _run_single(cfg, cfg.seeds[0], "blowup_series")
    manifest.files += files
    manifest.termination = termination
    cols = traj.series()
    series = np.column_stack([cols["t"], cols["max_ang_vel"], cols["max_curvature"]])
    try:
        fit = detect_blowup(series)
        result = {
            "fit_rejected": False,
            "T_est": fit.T_est,
            "p_angular": fit.p_angular,
            "p_curvature": fit.p_curvature,
            "residual_angular": fit.residuals[0],
            "residual_curvature": fit.residuals[1],
        }
    except FitRejected as exc:
        result = {"fit_rejected": True, "reason": str(exc)}
    result["termination"] = termination
    path = cfg.output_dir / "blowup.json"
    path.write_text(json.dumps(result, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    manifest.files.append(path.name)
    manifest.summary.update(result)


_KIND_RUNNERS = {
    "run": _kind_run,
    "convergence": _kind_convergence,
    "inequality_suite": _kind_inequality_suite,
    "green_certify": _kind_green_certify,
    "blowup_hunt": _kind_blowup_hunt,
}


def _worker_run(args) -> tuple[list, str]:
    cfg, seed, tag = args
    files, termination, _ = _run_single(cfg, seed, tag)
    return files, termination


def run_experiment(cfg: ExperimentConfig) -> RunManifest:
    """Execute one experiment; writes outputs plus manifest.json into
    cfg.output_dir and returns the manifest.  Partial outputs are flushed
    with the manifest marked incomplete when a kind raises."""
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(
        config_hash=hashlib.sha256(cfg.config_bytes).hexdigest(),
        code_version=_code_version(),
        started=_now(),
    )
    try:
        if cfg.kind == "run" and cfg.workers > 1 and len(cfg.seeds) > 1:
            jobs = [
                (cfg, seed, f"series_seed{seed}") for seed in cfg.seeds
            ]
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                for files, termination in pool.map(_worker_run, jobs):
                    manifest.files += files
                    manifest.termination = termination
            manifest.summary["seeds"] = list(cfg.seeds)
        else:
            _KIND_RUNNERS[cfg.kind](cfg, manifest)
        manifest.status = "complete"
    finally:
        manifest.finished = _now()
        manifest.files.append("manifest.json")
        manifest.write(cfg.output_dir)
    return manifest
