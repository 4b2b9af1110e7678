"""Command-line front end.

Exit codes: 0 success, 1 bad input data, 2 IO/config error, 3 mathematical
infeasibility.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigError, DataError, HtkError, InfeasibilityError
from .grammar import Mixture, render_label

EXIT_OK, EXIT_DATA, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 1, 2, 3


def _err(msg: str) -> None:
    print(f"htk: {msg}", file=sys.stderr)


def _read_text(path) -> str:
    if str(path) == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _write_text(path, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def _load_json(path):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _taxonomy(path):
    from .taxonomy import load_default_taxonomy, load_taxonomy

    return load_default_taxonomy() if path is None else load_taxonomy(path)


def _seed(value: int) -> int:
    env = os.environ.get("HTK_SEED")
    if env is None or not env.strip():
        return value
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"HTK_SEED must be an integer, got {env!r}") from None


def _label_json(h) -> dict:
    if isinstance(h, Mixture):
        return {"kind": "mixture", "first": render_label(h.first), "second": render_label(h.second)}
    return {"kind": "simple", "prefix": h.prefix, "main": h.main, "suffix": h.suffix}


# -- subcommands ---------------------------------------------------------------
def cmd_parse(args) -> int:
    g = _taxonomy(args.taxonomy)
    labels = list(args.labels)
    if args.file:
        labels += [ln.strip() for ln in _read_text(args.file).splitlines() if ln.strip()]
    status = EXIT_OK
    for s in labels:
        try:
            h = g.parse(s)
        except DataError as exc:
            _err(f"{type(exc).__name__} {s!r}: {exc}")
            status = EXIT_DATA
            continue
        print(json.dumps(_label_json(h), ensure_ascii=False))
    return status


def cmd_embed(args) -> int:
    from .embed import InfeasibleHierarchy, SingularStep, embed_taxonomy, verify_identities

    g = _taxonomy(args.taxonomy)
    try:
        m = embed_taxonomy(g)
    except (InfeasibleHierarchy, SingularStep) as exc:
        pair = f" (labels {exc.pair[0]!r}, {exc.pair[1]!r})" if exc.pair else ""
        raise type(exc)(f"{exc}{pair}", exc.pair) from None
    report = verify_identities(m, g, args.tol)
    if args.out:
        fmt = args.format or ("csv" if str(args.out).lower().endswith(".csv") else "json")
        _write_text(args.out, m.to_csv() if fmt == "csv" else m.to_json())
    print(f"shape: {m.shape_text}")
    print(f"max_gram_deviation: {report.max_deviation:.3e}")
    print(f"max_norm_deviation: {report.max_norm_deviation:.3e}")
    if args.verify:
        for case, entry in report.cases.items():
            print(f"case {case}: pairs={entry['pairs']} max_deviation={entry['max_deviation']:.3e}")
        if not report.passed:
            _err(f"identity check failed above tol {args.tol:g}; worst pair {report.worst_pair}")
            return EXIT_INFEASIBLE
        print(f"verify: ok (tol {args.tol:g})")
    return EXIT_OK


def cmd_cluster(args) -> int:
    from .cluster import build_cluster_map, read_counts_csv, read_overrides_csv

    counts = read_counts_csv(args.counts)
    overrides = read_overrides_csv(args.overrides) if args.overrides else []
    cmap = build_cluster_map(counts, args.threshold, overrides)
    _write_text(args.out, cmap.to_json() + "\n")
    print(
        f"retained {len(cmap.retained)} of {len(cmap.mapping)} labels (threshold > {args.threshold})",
        file=sys.stderr if args.out in (None, "-") else sys.stdout,
    )
    return EXIT_OK


def _parse_ks(values) -> list:
    ks = []
    for v in values or ["1", "5"]:
        for part in str(v).split(","):
            if part.strip():
                k = int(part)
                if k < 1:
                    raise ConfigError(f"k must be >= 1, got {k}")
                ks.append(k)
    return sorted(set(ks))


def cmd_evaluate(args) -> int:
    from .embed import EmbeddingMatrix
    from .report import evaluate_samples, report_to_json

    m = EmbeddingMatrix.load(args.embeddings)
    g = _taxonomy(args.taxonomy) if args.taxonomy else None
    samples = []
    for lineno, line in enumerate(_read_text(args.samples).splitlines(), 1):
        if line.strip():
            try:
                samples.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise DataError(f"{args.samples}:{lineno}: invalid JSON ({exc})") from None
    report = evaluate_samples(samples, m, g, ks=_parse_ks(args.k), epsilon=args.epsilon, jobs=args.jobs)
    _write_text(args.out, report_to_json(report))
    return EXIT_OK


def cmd_generate(args) -> int:
    from .simgen import GeneratorConfig, generate, records_to_jsonl

    cfg = GeneratorConfig.from_dict(_load_json(args.config)) if args.config else GeneratorConfig()
    if args.count is not None:
        cfg.n_profiles = args.count
    if args.seed is not None:
        cfg.seed = args.seed
    cfg.seed = _seed(cfg.seed)
    cfg.validate()
    records = generate(cfg, _taxonomy(args.taxonomy))
    _write_text(args.out, records_to_jsonl(records))
    return EXIT_OK


def _load_records(path):
    from .simgen import records_from_jsonl

    return records_from_jsonl(_read_text(path).splitlines())


def _parse_fractions(text: str):
    try:
        parts = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"bad fractions {text!r}") from None
    if len(parts) != 3:
        raise ConfigError("fractions need three comma-separated values")
    return parts


def cmd_split(args) -> int:
    from .simgen import max_label_deviation, split_manifest, stratified_split

    records = _load_records(args.records)
    splits = stratified_split(records, _parse_fractions(args.fractions), _seed(args.seed))
    manifest = split_manifest(splits)
    _write_text(args.out, json.dumps(manifest, indent=1) + "\n")
    sizes = "/".join(str(len(s)) for s in splits)
    print(
        f"split sizes {sizes}; max label share deviation {max_label_deviation(records, splits):.4f}",
        file=sys.stderr if args.out in (None, "-") else sys.stdout,
    )
    return EXIT_OK


def cmd_decode(args) -> int:
    from .decode import rank_batch, read_vectors_jsonl, write_predictions_jsonl
    from .embed import EmbeddingMatrix

    m = EmbeddingMatrix.load(args.embeddings)
    preds = rank_batch(m, read_vectors_jsonl(_read_text(args.vectors).splitlines()))
    if args.top is not None:
        for p in preds:
            del p.ranked[args.top:]
            del p.scores[args.top:]
    _write_text(args.out, write_predictions_jsonl(preds))
    return EXIT_OK


def cmd_baseline(args) -> int:
    from .embed import EmbeddingMatrix
    from .pipeline import baseline_samples

    records = _load_records(args.records)
    manifest = _load_json(args.split)
    by_id = {r.id: r for r in records}
    try:
        train = [by_id[i] for i in manifest["train"]]
        test = [by_id[i] for i in manifest[args.target]]
    except KeyError as exc:
        raise DataError(f"split manifest refers to unknown record or split {exc}") from None
    m = EmbeddingMatrix.load(args.embeddings)
    samples = baseline_samples(train, test, m, seed=_seed(args.seed), decode=not args.vectors)
    _write_text(args.out, "".join(json.dumps(s) + "\n" for s in samples))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="htk", description="Horizon-label taxonomy toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", help="parse horizon labels into JSON")
    sp.add_argument("labels", nargs="*")
    sp.add_argument("--taxonomy", help="taxonomy JSON (default: shipped taxonomy)")
    sp.add_argument("--file", help="read additional labels, one per line")
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("embed", help="compute label embeddings for a taxonomy")
    sp.add_argument("--taxonomy")
    sp.add_argument("--out", help="output file (.csv or .json)")
    sp.add_argument("--format", choices=("csv", "json"))
    sp.add_argument("--verify", action="store_true", help="check every inner-product identity")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.set_defaults(func=cmd_embed)

    sp = sub.add_parser("cluster", help="map rare labels to retained labels")
    sp.add_argument("--counts", required=True, help="CSV of label,count")
    sp.add_argument("--threshold", type=int, default=10)
    sp.add_argument("--overrides", help="CSV of rare,target corrections")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_cluster)

    sp = sub.add_parser("evaluate", help="score evaluation samples")
    sp.add_argument("--samples", required=True, help="JSON lines, one sample per profile")
    sp.add_argument("--embeddings", required=True)
    sp.add_argument("--taxonomy")
    sp.add_argument("--k", action="append", help="k for @k metrics (repeatable or comma list)")
    sp.add_argument("--epsilon", type=float, default=0.01)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("generate", help="generate synthetic profile records")
    sp.add_argument("--config", help="generator config JSON")
    sp.add_argument("--taxonomy")
    sp.add_argument("--count", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("split", help="stratified train/val/test split")
    sp.add_argument("--records", required=True)
    sp.add_argument("--fractions", default="0.6,0.2,0.2")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_split)

    sp = sub.add_parser("decode", help="rank labels for predicted vectors")
    sp.add_argument("--embeddings", required=True)
    sp.add_argument("--vectors", required=True, help="JSON lines of vectors")
    sp.add_argument("--top", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("baseline", help="baseline predictions as evaluation samples")
    sp.add_argument("--records", required=True)
    sp.add_argument("--split", required=True, help="split manifest JSON")
    sp.add_argument("--embeddings", required=True)
    sp.add_argument("--target", default="test", choices=("train", "val", "test"))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--vectors", action="store_true", help="store raw vectors instead of rankings")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_baseline)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibilityError as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_INFEASIBLE
    except ConfigError as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_CONFIG
    except DataError as exc:
        _err(f"{type(exc).__name__}: {exc}")
        return EXIT_DATA
    except HtkError as exc:
        _err(str(exc))
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
