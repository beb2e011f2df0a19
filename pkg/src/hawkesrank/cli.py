"""
Command-line interface.

Exit codes: 0 success, 2 input or parse error, 3 invalid model, 4 insufficient
data, 5 fit did not converge (unless ``--allow-nonconverged``).
"""
import argparse
import dataclasses
import hashlib
import json
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from hawkesrank import __version__, centrality, io
from hawkesrank.core import (
    EventStream,
    ExplosiveProcessError,
    HawkesError,
    default_grid,
    evaluate_intensity,
    simulate,
)
from hawkesrank.estimation import FitConfig, InsufficientDataError, fit_mle
from hawkesrank.experiments import BenchmarkConfig, BenchmarkError, ShockSpec, run_benchmark
from hawkesrank.leadlag import bin_events, leadlag_adjacency, sensitivity_sweep

EXIT_OK, EXIT_INPUT, EXIT_MODEL, EXIT_DATA, EXIT_NOT_CONVERGED = 0, 2, 3, 4, 5
SCHEMA_VERSION = 1


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


# --- helpers ----------------------------------------------------------------

def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _file_digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _finish(command, config, seeds, outputs, manifest_path, started):
    """Write data outputs plus a manifest describing them, all-or-nothing."""
    manifest = {
        "command": command,
        "config": config,
        "config_hash": config_hash(config),
        "seeds": list(seeds),
        "tool_version": __version__,
        "outputs": [{"path": str(p), "sha256": io.sha256_text(t)} for p, t in outputs.items()],
        "wall_clock_seconds": round(time.perf_counter() - started, 6),
    }
    if manifest_path is None:
        first = Path(next(iter(outputs)))
        manifest_path = first.with_name(first.stem + ".manifest.json")
    io.write_atomic({**outputs, manifest_path: io.dumps_json(manifest)})
    return EXIT_OK


def _load_model(path):
    try:
        return io.load_model(path)
    except (io.FormatError, ExplosiveProcessError):
        raise
    except HawkesError as exc:
        raise CliError(f"invalid model: {exc}", EXIT_MODEL) from exc


def _load_events(path, T, dim):
    times, types = io.read_events_csv(path)
    if times.size == 0:
        raise InsufficientDataError("too few events: the event file is empty")
    if T is None:
        T = float(times.max())
    return EventStream.from_marked(times, types, T, dim=dim)


def _strict_fields(doc, allowed, what):
    if not isinstance(doc, dict):
        raise CliError(f"{what} must be a JSON object", EXIT_INPUT)
    unknown = sorted(set(doc) - set(allowed) - {"schema_version"})
    if unknown:
        raise CliError(f"invalid {what}: unknown fields {unknown}", EXIT_INPUT)
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise CliError(f"invalid {what}: unsupported schema_version {version!r}", EXIT_INPUT)


# --- commands ---------------------------------------------------------------

def cmd_simulate(args):
    started = time.perf_counter()
    model = _load_model(args.model)
    if args.horizon <= 0:
        raise CliError("horizon must be positive", EXIT_INPUT)
    events = simulate(model, args.horizon, args.seed)
    outputs = {args.events: io.events_to_csv(events)}
    if args.intensity:
        trace = evaluate_intensity(model, events, default_grid(args.horizon, args.grid_step))
        outputs[args.intensity] = io.trace_to_csv(trace)
    config = {"model": io.model_to_dict(model), "horizon": args.horizon,
              "grid_step": args.grid_step, "seed": args.seed}
    return _finish("simulate", config, [args.seed], outputs, args.manifest, started)


def cmd_intensity(args):
    started = time.perf_counter()
    model = _load_model(args.model)
    events = _load_events(args.events, args.horizon, model.dim)
    trace = evaluate_intensity(model, events, default_grid(events.T, args.grid_step))
    config = {"model": io.model_to_dict(model), "events_sha256": _file_digest(args.events),
              "horizon": events.T, "grid_step": args.grid_step}
    return _finish("intensity", config, [], {args.out: io.trace_to_csv(trace)},
                   args.manifest, started)


def _load_matrix(path):
    """Matrix file: a full model document or ``{"N": [[...]], "mu": [...]}``."""
    doc = io.load_json(path)
    if isinstance(doc, dict) and "mu_segments" in doc:
        model = io.model_from_dict(doc)
        return model.N, model.exo.rates[0]
    if not isinstance(doc, dict) or "N" not in doc:
        raise io.FormatError("matrix file needs an 'N' field")
    _strict_fields(doc, {"N", "mu", "M"}, "matrix file")
    N = np.array(doc["N"], dtype=float)
    mu = np.array(doc["mu"], dtype=float) if "mu" in doc else None
    return N, mu


def cmd_rank(args):
    started = time.perf_counter()
    N, mu = _load_matrix(args.matrix)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if args.method == "katz":
            beta = np.ones(N.shape[0]) if args.beta == "ones" or mu is None else mu
            vec = centrality.katz(N, args.alpha, beta)
        elif args.method == "eigenvector":
            vec = centrality.eigenvector_centrality(N)
        elif args.method == "pagerank":
            vec = centrality.pagerank(N, args.damping)
        else:
            if mu is None:
                raise CliError("first_moment ranking needs exogenous rates 'mu'", EXIT_INPUT)
            vec = centrality.first_moment_rank(N, mu)
    config = {"matrix_sha256": _file_digest(args.matrix), "method": args.method,
              "alpha": args.alpha, "damping": args.damping, "beta": args.beta,
              "warnings": [str(w.message) for w in caught]}
    return _finish("rank", config, [], {args.out: io.scores_to_csv(vec.scores, vec.ranks())},
                   args.manifest, started)


_FIT_FIELDS = {"max_iterations", "gradient_tolerance", "mu_mode", "segment_boundaries",
               "horizon", "dim"}


def cmd_fit(args):
    started = time.perf_counter()
    doc = io.load_json(args.config) if args.config else {}
    _strict_fields(doc, _FIT_FIELDS, "fit config")
    for name in ("max_iterations", "gradient_tolerance", "horizon", "dim"):
        if getattr(args, name) is not None:
            doc[name] = getattr(args, name)
    try:
        cfg = FitConfig(
            max_iterations=int(doc.get("max_iterations", 500)),
            gradient_tolerance=float(doc.get("gradient_tolerance", 1e-6)),
            mu_mode=doc.get("mu_mode", "constant"),
            segment_boundaries=tuple(doc.get("segment_boundaries", ())),
        )
    except (TypeError, ValueError) as exc:
        raise CliError(f"invalid fit config: {exc}", EXIT_INPUT) from exc
    events = _load_events(args.events, doc.get("horizon"), doc.get("dim"))
    result = fit_mle(events, cfg)
    out = {
        "model": io.model_to_dict(result.model),
        "log_likelihood": result.log_likelihood,
        "initial_log_likelihood": result.initial_log_likelihood,
        "converged": result.converged,
        "iterations": result.iterations,
        "stationarity_warning": result.stationarity_warning,
        "branching_ratio": result.model.branching_ratio,
        "message": result.message,
    }
    config = {**doc, "events_sha256": _file_digest(args.events),
              "horizon": events.T, "dim": events.dim}
    code = _finish("fit", config, [], {args.out: io.dumps_json(out)}, args.manifest, started)
    if not result.converged and not args.allow_nonconverged:
        print(f"fit did not converge after {result.iterations} iterations: {result.message}",
              file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return code


def cmd_leadlag(args):
    started = time.perf_counter()
    events = _load_events(args.events, args.horizon, args.dim)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        A = leadlag_adjacency(bin_events(events, args.bin_width), args.lag)
    config = {"events_sha256": _file_digest(args.events), "horizon": events.T,
              "bin_width": args.bin_width, "lag": args.lag,
              "constant_types": list(A.constant_types)}
    return _finish("leadlag", config, [], {args.out: io.matrix_to_csv(A.entries)},
                   args.manifest, started)


def cmd_sweep(args):
    started = time.perf_counter()
    events = _load_events(args.events, args.horizon, args.dim)
    res = sensitivity_sweep(events, args.bin_widths, args.lags)
    config = {"events_sha256": _file_digest(args.events), "horizon": events.T,
              "bin_widths": args.bin_widths, "lags": args.lags}
    return _finish("sweep", config, [], {args.out: io.dumps_json(res.to_dict())},
                   args.manifest, started)


_BENCH_FIELDS = {f.name for f in dataclasses.fields(BenchmarkConfig)}
_SHOCK_FIELDS = {f.name for f in dataclasses.fields(ShockSpec)}


def bench_config_from_dict(doc) -> BenchmarkConfig:
    _strict_fields(doc, _BENCH_FIELDS, "benchmark config")
    doc = dict(doc)
    doc.pop("schema_version", None)
    bad = []
    shock = doc.pop("shock", {})
    if not isinstance(shock, dict):
        bad.append("shock")
        shock = {}
    unknown_shock = sorted(set(shock) - _SHOCK_FIELDS)
    if unknown_shock:
        raise CliError(f"invalid benchmark config: unknown fields "
                       f"{['shock.' + k for k in unknown_shock]}", EXIT_INPUT)
    if "seeds" in doc:
        seeds = doc["seeds"]
        if isinstance(seeds, int) and not isinstance(seeds, bool):
            doc["seeds"] = tuple(range(seeds))
        elif isinstance(seeds, list) and all(isinstance(s, int) for s in seeds):
            doc["seeds"] = tuple(seeds)
        else:
            bad.append("seeds")
    types = {"M": int, "eta": int, "target_n": float, "tau": float, "T": float,
             "grid_step": float, "smoothing_window": float, "katz_alpha": float,
             "pagerank_damping": float, "time_unit": str}
    for key, typ in types.items():
        if key in doc:
            val = doc[key]
            ok = isinstance(val, str) if typ is str else (
                isinstance(val, (int, float)) and not isinstance(val, bool))
            if not ok or (typ is int and not float(val).is_integer()):
                bad.append(key)
            else:
                doc[key] = typ(val)
    if bad:
        raise CliError(f"invalid benchmark config: bad values for fields {bad}", EXIT_INPUT)
    try:
        return BenchmarkConfig(shock=ShockSpec(**shock), **doc)
    except (BenchmarkError, TypeError) as exc:
        raise CliError(f"invalid benchmark config: {exc}", EXIT_INPUT) from exc


def _bench_csv(result) -> str:
    mean = result.mean_raw()
    smoothed = result.smoothed()
    lines = ["time,method,raw,smoothed"]
    for m in mean:
        for t, r, s in zip(result.grid.tolist(), mean[m].tolist(), smoothed[m].tolist()):
            lines.append(f"{io.fmt(t)},{m},{io.fmt(r)},{io.fmt(s)}")
    return "\n".join(lines) + "\n"


def cmd_bench(args):
    started = time.perf_counter()
    doc = io.load_json(args.config) if args.config else {}
    doc = dict(doc) if isinstance(doc, dict) else doc
    if isinstance(doc, dict):
        if args.seeds is not None:
            doc["seeds"] = args.seeds
        if args.no_shock:
            doc["shock"] = {**doc.get("shock", {}), "enabled": False}
    cfg = bench_config_from_dict(doc)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = run_benchmark(cfg, n_jobs=args.jobs)
    summary = result.summary()
    summary["methods"] = list(result.raw)
    config = cfg.to_dict()
    if not cfg.shock.enabled:
        config.pop("shock")
    outputs = {args.out_csv: _bench_csv(result), args.out_json: io.dumps_json(summary)}
    return _finish("bench", config, list(cfg.seeds), outputs, args.manifest, started)


# --- parser -----------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="hawkesrank", description=__doc__.splitlines()[1])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def manifest_opt(sp):
        sp.add_argument("--manifest", type=Path, default=None,
                        help="manifest path (default: <first output>.manifest.json)")

    sp = sub.add_parser("simulate", help="simulate an event stream from a model JSON")
    sp.add_argument("model", type=Path)
    sp.add_argument("--horizon", "-T", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--events", type=Path, required=True)
    sp.add_argument("--intensity", type=Path, default=None)
    sp.add_argument("--grid-step", type=float, default=0.1)
    manifest_opt(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("intensity", help="evaluate intensities of a model on an event file")
    sp.add_argument("model", type=Path)
    sp.add_argument("events", type=Path)
    sp.add_argument("--horizon", "-T", type=float, default=None)
    sp.add_argument("--grid-step", type=float, default=0.1)
    sp.add_argument("--out", type=Path, required=True)
    manifest_opt(sp)
    sp.set_defaults(func=cmd_intensity)

    sp = sub.add_parser("rank", help="static centralities of a matrix file")
    sp.add_argument("matrix", type=Path)
    sp.add_argument("--method", choices=centrality.METHODS, default="first_moment")
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--damping", type=float, default=0.85)
    sp.add_argument("--beta", choices=("ones", "mu"), default="ones")
    sp.add_argument("--out", type=Path, required=True)
    manifest_opt(sp)
    sp.set_defaults(func=cmd_rank)

    sp = sub.add_parser("fit", help="maximum-likelihood fit of an event file")
    sp.add_argument("events", type=Path)
    sp.add_argument("--config", type=Path, default=None)
    sp.add_argument("--horizon", "-T", type=float, default=None)
    sp.add_argument("--dim", type=int, default=None)
    sp.add_argument("--max-iterations", dest="max_iterations", type=int, default=None)
    sp.add_argument("--gradient-tolerance", dest="gradient_tolerance", type=float, default=None)
    sp.add_argument("--allow-nonconverged", action="store_true")
    sp.add_argument("--out", type=Path, required=True)
    manifest_opt(sp)
    sp.set_defaults(func=cmd_fit)

    for name, helptext in (("leadlag", "lead-lag adjacency of an event file"),
                           ("sweep", "lead-lag sensitivity over (bin width, lag) pairs")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("events", type=Path)
        sp.add_argument("--horizon", "-T", type=float, default=None)
        sp.add_argument("--dim", type=int, default=None)
        if name == "leadlag":
            sp.add_argument("--bin-width", type=float, default=0.5)
            sp.add_argument("--lag", type=int, default=2)
            sp.set_defaults(func=cmd_leadlag)
        else:
            sp.add_argument("--bin-widths", type=float, nargs="+", default=[0.25, 0.5, 1.0])
            sp.add_argument("--lags", type=int, nargs="+", default=[1, 2, 4])
            sp.set_defaults(func=cmd_sweep)
        sp.add_argument("--out", type=Path, required=True)
        manifest_opt(sp)

    sp = sub.add_parser("bench", help="static vs dynamic ranking benchmark")
    sp.add_argument("config", type=Path, nargs="?", default=None)
    sp.add_argument("--no-shock", action="store_true")
    sp.add_argument("--seeds", type=int, default=None, help="use seeds 0..N-1")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out-csv", type=Path, required=True)
    sp.add_argument("--out-json", type=Path, required=True)
    manifest_opt(sp)
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except io.FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ExplosiveProcessError as exc:
        print(f"error: model invalid, spectral radius {exc.radius:.6g} >= 1", file=sys.stderr)
        return EXIT_MODEL
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (HawkesError, centrality.CentralityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
