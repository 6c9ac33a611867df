"""Command-line front end.

Exit codes: 0 on success, 2 for configuration problems (argparse usage
errors included), 3 for data problems (unreadable, malformed, or
mismatched files).
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import codec, harness
from .errors import DataError
from .graph import Kernel, SimilarityConfig, Symmetrization, build_graph
from .optimizer import fit
from .pca import pca_fit, pca_mse
from .spectral import build_cache, center


def _add_similarity_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--kernel", choices=["cosine", "gaussian"], default=None)
    parser.add_argument("--alpha", type=float, default=None)
    parser.add_argument("--knn", type=int, default=None)
    parser.add_argument("--symmetrization", choices=["union", "mutual"], default=None)
    parser.add_argument("--normalize-spectrum", action="store_true", default=None)


def _similarity_from_args(args, base: SimilarityConfig | None = None) -> SimilarityConfig:
    base = base or SimilarityConfig()
    return SimilarityConfig(
        kernel=Kernel(args.kernel) if args.kernel else base.kernel,
        alpha=args.alpha if args.alpha is not None else base.alpha,
        knn=args.knn if args.knn is not None else base.knn,
        symmetrization=(
            Symmetrization(args.symmetrization) if args.symmetrization else base.symmetrization
        ),
        normalize_spectrum=(
            args.normalize_spectrum
            if args.normalize_spectrum is not None
            else base.normalize_spectrum
        ),
    )


def _load_matrix(path: str, fmt: str):
    if fmt == "idx":
        images, _ = harness.load_idx(path)
        return images
    return harness.load_csv_matrix(path)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gfred", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_graph = sub.add_parser("graph", help="build a similarity graph and print its spectrum")
    p_graph.add_argument("--data", required=True)
    p_graph.add_argument("--format", choices=["idx", "csv"], default="csv")
    _add_similarity_flags(p_graph)

    p_fit = sub.add_parser("fit", help="train a filter pair on a whole dataset")
    p_fit.add_argument("--data", required=True)
    p_fit.add_argument("--format", choices=["idx", "csv"], required=True)
    p_fit.add_argument("--k", type=int, required=True)
    p_fit.add_argument("--l", type=int, required=True)
    p_fit.add_argument("--model-out", required=True)
    p_fit.add_argument("--epsilon", type=float, default=None)
    p_fit.add_argument("--max-iters", type=int, default=500)
    _add_similarity_flags(p_fit)

    p_enc = sub.add_parser("encode", help="reduce a dataset with a trained model")
    p_enc.add_argument("--model", required=True)
    p_enc.add_argument("--data", required=True)
    p_enc.add_argument("--format", choices=["idx", "csv"], required=True)
    p_enc.add_argument("--out", required=True)

    p_dec = sub.add_parser("decode", help="reconstruct from a model file's reduced data")
    p_dec.add_argument("--model", required=True)
    p_dec.add_argument("--out", required=True)

    p_eval = sub.add_parser("eval", help="report reconstruction MSE of a model on a dataset")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--data", required=True)
    p_eval.add_argument("--format", choices=["idx", "csv"], required=True)

    p_sweep = sub.add_parser("sweep", help="run a (trial, k, L) grid from a config file")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out-csv", required=True)
    p_sweep.add_argument("--out-svg", default=None)
    p_sweep.add_argument("--serial", action="store_true")
    p_sweep.add_argument("--dataset-path", default=None)
    p_sweep.add_argument("--dataset-format", choices=["idx", "csv"], default=None)
    p_sweep.add_argument("--classes-to-pick", type=int, default=None)
    p_sweep.add_argument("--images-per-class", type=int, default=None)
    p_sweep.add_argument("--trials", type=int, default=None)
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--k-list", default=None)
    p_sweep.add_argument("--l-list", default=None)
    p_sweep.add_argument("--epsilon", type=float, default=None)
    p_sweep.add_argument("--max-iters", type=int, default=None)
    _add_similarity_flags(p_sweep)

    p_bound = sub.add_parser("bound", help="largest k that still compresses")
    p_bound.add_argument("--n", type=int, required=True)
    p_bound.add_argument("--d", type=int, required=True)
    p_bound.add_argument("--l", type=int, required=True)
    return parser


def _cmd_graph(args) -> int:
    X = _load_matrix(args.data, args.format)
    spectrum = build_graph(X, _similarity_from_args(args))
    edges = int(np.count_nonzero(spectrum.adjacency)) // 2
    print(f"nodes: {spectrum.n}")
    print(f"edges: {edges}")
    print(f"eigenvalue range: [{float(spectrum.eigvals[-1])!r}, {float(spectrum.eigvals[0])!r}]")
    return 0


def _cmd_fit(args) -> int:
    X = _load_matrix(args.data, args.format)
    similarity = _similarity_from_args(args)
    spectrum = build_graph(X, similarity)
    ds = center(X)
    cache = build_cache(ds.centered, spectrum, args.l)
    result = fit(
        ds, spectrum, args.k, args.l,
        epsilon=args.epsilon, max_iters=args.max_iters, cache=cache,
    )
    reduced = codec.reduce(result.model, ds, spectrum, cache)
    codec.save_model(result.model, spectrum, reduced, args.model_out)
    baseline = pca_mse(ds, pca_fit(ds, args.k))
    print(f"iterations: {result.iterations}")
    print(f"final_mse: {float(result.objective_trace[-1])!r}")
    print(f"pca_mse: {float(baseline)!r}")
    print(f"model: {args.model_out}")
    return 0


def _cmd_encode(args) -> int:
    bundle = codec.load_model(args.model)
    ds = center(_load_matrix(args.data, args.format))
    reduced = codec.reduce(bundle.model, ds, bundle.spectrum)
    harness.save_csv_matrix(reduced.values, args.out)
    print(f"reduced: {reduced.values.shape[0]} x {reduced.values.shape[1]} -> {args.out}")
    return 0


def _cmd_decode(args) -> int:
    bundle = codec.load_model(args.model)
    recon = codec.reconstruct(bundle.model, bundle.reduced, bundle.spectrum)
    harness.save_csv_matrix(recon, args.out)
    print(f"reconstruction: {recon.shape[0]} x {recon.shape[1]} -> {args.out}")
    return 0


def _cmd_eval(args) -> int:
    bundle = codec.load_model(args.model)
    ds = center(_load_matrix(args.data, args.format))
    mse = codec.reconstruction_mse(bundle.model, ds, bundle.spectrum)
    baseline = pca_mse(ds, pca_fit(ds, bundle.model.k))
    print(f"reconstruction_mse: {float(mse)!r}")
    print(f"pca_mse: {float(baseline)!r}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = harness.load_config(args.config)
    overrides = {
        "dataset_path": args.dataset_path,
        "dataset_format": harness.DataFormat(args.dataset_format) if args.dataset_format else None,
        "classes_to_pick": args.classes_to_pick,
        "images_per_class": args.images_per_class,
        "trials": args.trials,
        "seed": args.seed,
        "epsilon": args.epsilon,
        "max_iters": args.max_iters,
    }
    if args.k_list is not None:
        overrides["k_list"] = tuple(int(p) for p in args.k_list.split(",") if p.strip())
    if args.l_list is not None:
        overrides["L_list"] = tuple(int(p) for p in args.l_list.split(",") if p.strip())
    if any(
        getattr(args, name) is not None
        for name in ("kernel", "alpha", "knn", "symmetrization", "normalize_spectrum")
    ):
        overrides["similarity"] = _similarity_from_args(args, cfg.similarity)
    cfg = harness.with_overrides(cfg, **overrides)
    report = harness.run_sweep(cfg, force_serial=args.serial)
    harness.emit_csv(report, args.out_csv)
    print(f"rows: {len(report.rows)} -> {args.out_csv}")
    if args.out_svg:
        harness.emit_svg(report, args.out_svg)
        print(f"chart: {args.out_svg}")
    if report.failures:
        for failure in report.failures:
            print(
                f"failed cell trial={failure.trial} k={failure.k} L={failure.L}: "
                f"{failure.message}",
                file=sys.stderr,
            )
    return 0


def _cmd_bound(args) -> int:
    bound = codec.compression_bound(args.n, args.d, args.l)
    budget = codec.StorageBudget.from_dims(args.n, args.d, max(bound, 1), args.l)
    print(f"bound: {bound}")
    print(f"stored_scalars(k={max(bound, 1)}): {budget.stored_scalars}")
    print(f"raw_scalars: {budget.raw_scalars}")
    print(f"compresses: {'yes' if bound >= 1 else 'no'}")
    return 0


_COMMANDS = {
    "graph": _cmd_graph,
    "fit": _cmd_fit,
    "encode": _cmd_encode,
    "decode": _cmd_decode,
    "eval": _cmd_eval,
    "sweep": _cmd_sweep,
    "bound": _cmd_bound,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValueError as exc:
        # covers ConfigError plus the shape/value guards raised on bad flags
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
