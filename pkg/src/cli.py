"""Command-line front end: ``python -m src.cli <command>`` or ``hlrank <command>``."""

import argparse
import json
import logging
import random
import sys
import time
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from .complex_core import SimplicialComplex, f_vector, from_facets, minimal_nonfaces, to_json
from .config import DEFAULT_MAX_ENTRIES, AppConfig, load_config
from .exp_hilbert import e_vector, is_dehn_sommerville, series_check
from .model_matrix import (
    ModelSpec,
    RankMismatchError,
    SizeCapExceeded,
    build_design_matrix,
    format_matrix_dump,
)
from .rank_engine import FAMILIES, family, json_int, rank_polynomial, report
from .run_logger import log_step
from .schemas import parse_facet_list, parse_model_input
from .sweep import exhaustive_specs, random_specs, run_specs

logger = logging.getLogger(__name__)

SERIES_RADIUS = 0.3


@dataclass
class JobConfig:
    source: str
    complex: SimplicialComplex
    levels: Optional[tuple[int, ...]]
    names: Optional[tuple[str, ...]]
    verify: bool
    size_cap: int
    max_entries: int
    output: str
    series_degree: int
    seed: int


def info_payload(c: SimplicialComplex) -> dict[str, Any]:
    f = f_vector(c)
    return {
        **to_json(c),
        "f_vector": [json_int(value) for value in f.counts],
        "e_vector": [json_int(value) for value in e_vector(f).coeffs],
        "minimal_nonfaces": [list(face) for face in minimal_nonfaces(c)],
        "dehn_sommerville": is_dehn_sommerville(c),
    }


def rank_payload(
    spec: ModelSpec,
    verify: bool,
    size_cap: int,
    max_entries: int = DEFAULT_MAX_ENTRIES,
) -> dict[str, Any]:
    return {
        **to_json(spec.complex),
        "levels": list(spec.levels),
        **report(spec, verify=verify, size_cap=size_cap, max_entries=max_entries).to_dict(),
    }


def evector_payload(c: SimplicialComplex, r: Optional[int]) -> dict[str, Any]:
    f = f_vector(c)
    poly = rank_polynomial(c)
    payload = {
        **to_json(c),
        "f_vector": [json_int(value) for value in f.counts],
        "e_vector": [json_int(value) for value in e_vector(f).coeffs],
        "rank_polynomial": str(poly.as_expr()),
        "dehn_sommerville": is_dehn_sommerville(c),
    }
    if r is not None:
        if r < 1:
            raise ValueError(f"level count must be a positive integer, got {r}")
        payload["r"] = r
        payload["rank"] = json_int(int(poly.eval(r)))
    return payload


def job_from_args(args: argparse.Namespace, config: AppConfig) -> JobConfig:
    sources = [name for name in ("facets", "input", "family") if getattr(args, name, None) is not None]
    if len(sources) != 1:
        raise ValueError("exactly one of --facets, --input or --family is required")
    source = sources[0]

    levels: Optional[tuple[int, ...]] = None
    names: Optional[tuple[str, ...]] = None
    if source == "facets":
        if args.m is None:
            raise ValueError("--facets needs --m")
        complex_ = from_facets(args.m, parse_facet_list(args.facets))
    elif source == "input":
        path = Path(args.input)
        if not path.exists():
            raise ValueError(f"input file not found: {path}")
        model = parse_model_input(path.read_text(encoding="utf-8"))
        complex_, levels, names = model.complex, model.levels, model.names
    else:
        if args.m is None:
            raise ValueError("--family needs --m")
        complex_ = family(args.family, args.m)

    if args.r is not None:
        levels = (args.r,) * complex_.vertex_count
    elif args.levels is not None:
        levels = _parse_int_list(args.levels, "--levels")
    if levels is not None:
        ModelSpec(complex=complex_, levels=levels)
    if args.names is not None:
        names = tuple(part.strip() for part in args.names.split(","))
        if len(names) != complex_.vertex_count:
            raise ValueError(f"--names has {len(names)} entries but m = {complex_.vertex_count}")

    return JobConfig(
        source=source,
        complex=complex_,
        levels=levels,
        names=names,
        verify=getattr(args, "verify", False),
        size_cap=positive_limit(args.size_cap, config.size_cap, "--size-cap"),
        max_entries=positive_limit(args.max_entries, config.max_entries, "--max-entries"),
        output=args.output,
        series_degree=args.series_degree if args.series_degree is not None else config.series_degree,
        seed=args.seed if args.seed is not None else config.seed,
    )


def cmd_info(args: argparse.Namespace, config: AppConfig) -> int:
    job = job_from_args(args, config)
    payload = info_payload(job.complex)
    exit_code = 0
    if args.series_check:
        rng = random.Random(job.seed)
        point = [rng.uniform(-SERIES_RADIUS, SERIES_RADIUS) for _ in range(job.complex.vertex_count)]
        check = series_check(job.complex, point, job.series_degree)
        payload["series_check"] = {
            "x": point,
            "degree": job.series_degree,
            "truncated": check.truncated,
            "closed_form": check.closed_form,
            "error": check.error,
            "passed": check.passed,
        }
        exit_code = 0 if check.passed else 1

    if job.output == "json":
        _print_json(payload)
    else:
        lines = [
            f"m: {payload['m']}",
            f"facets: {_format_facets(job.complex.facets, job.names)}",
            f"f-vector: {_format_vector(payload['f_vector'])}",
            f"e-vector: {_format_vector(payload['e_vector'])}",
            "minimal non-faces: "
            + (" ".join(_format_set(face, job.names) for face in payload["minimal_nonfaces"]) or "none"),
            f"Dehn-Sommerville: {_yes_no(payload['dehn_sommerville'])}",
        ]
        if "series_check" in payload:
            series = payload["series_check"]
            lines.append(
                f"series check (degree {series['degree']}): error {series['error']:.3e} "
                f"{'ok' if series['passed'] else 'FAILED'}"
            )
        print("\n".join(lines))
    return exit_code


def cmd_rank(args: argparse.Namespace, config: AppConfig) -> int:
    job = job_from_args(args, config)
    spec = _require_spec(job)
    payload = rank_payload(spec, verify=job.verify, size_cap=job.size_cap, max_entries=job.max_entries)
    if job.verify and not payload["oracle_checked"]:
        print(
            f"warning: {spec.cell_count} cells exceed the size cap {job.size_cap} "
            f"or the entry budget {job.max_entries}; formula value only",
            file=sys.stderr,
        )

    if job.output == "json":
        _print_json(payload)
    else:
        lines = [
            f"facets: {_format_facets(job.complex.facets, job.names)}",
            f"levels: {_format_vector(payload['levels'])}",
            f"rank: {payload['rank']}",
            f"dimension: {payload['model_dimension']}",
            f"degrees of freedom: {payload['degrees_of_freedom']}",
            f"methods: {', '.join(payload['methods_checked'])}",
            f"Dehn-Sommerville: {_yes_no(payload['ds_model'])}",
        ]
        if payload["ds_alternating_match"] is not None:
            lines.append(f"alternating face sum matches: {_yes_no(payload['ds_alternating_match'])}")
        if job.verify:
            if payload["oracle_checked"]:
                verdict = "agree" if payload["oracle_agrees"] else "DISAGREE"
                lines.append(f"oracle: {payload['oracle_rank']} ({verdict})")
            else:
                lines.append("oracle: skipped (size cap)")
        print("\n".join(lines))
    return 1 if payload["oracle_agrees"] is False else 0


def cmd_evector(args: argparse.Namespace, config: AppConfig) -> int:
    job = job_from_args(args, config)
    r = None
    if job.levels is not None:
        r = job.levels[0]
        if any(value != r for value in job.levels):
            raise ValueError("evector evaluates the constant-level polynomial; pass --r")
    payload = evector_payload(job.complex, r)
    if job.output == "json":
        _print_json(payload)
    else:
        lines = [
            f"facets: {_format_facets(job.complex.facets, job.names)}",
            f"f-vector: {_format_vector(payload['f_vector'])}",
            f"e-vector: {_format_vector(payload['e_vector'])}",
            f"rank polynomial: {payload['rank_polynomial']}",
            f"Dehn-Sommerville: {_yes_no(payload['dehn_sommerville'])}",
        ]
        if r is not None:
            lines.append(f"rank at r={r}: {payload['rank']}")
        print("\n".join(lines))
    return 0


def cmd_dump_matrix(args: argparse.Namespace, config: AppConfig) -> int:
    job = job_from_args(args, config)
    spec = _require_spec(job)
    text = format_matrix_dump(build_design_matrix(spec, size_cap=job.size_cap, max_entries=job.max_entries))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify_sweep(args: argparse.Namespace, config: AppConfig) -> int:
    level_set = _parse_int_list(args.level_set, "--level-set")
    seed = args.seed if args.seed is not None else config.seed
    size_cap = positive_limit(args.size_cap, config.size_cap, "--size-cap")
    max_entries = positive_limit(args.max_entries, config.max_entries, "--max-entries")
    workers = args.workers if args.workers is not None else config.max_workers

    specs = exhaustive_specs(args.max_m, level_set, min_m=args.min_m) if args.max_m else []
    if args.random:
        random_ms = list(_parse_int_list(args.random_m, "--random-m"))
        specs.extend(random_specs(args.random, random_ms, level_set, seed))
    if not specs:
        raise ValueError("nothing to check: pass --max-m and/or --random")

    output_dir = Path(args.output_dir) if args.output_dir else None
    on_case = None
    if output_dir is not None:
        log_step(output_dir, "sweep_start", {"cases": len(specs), "level_set": list(level_set), "seed": seed})

        def on_case(case):
            log_step(output_dir, "case", case.to_dict())

    started = time.perf_counter()
    summary = run_specs(specs, size_cap=size_cap, max_workers=workers, on_case=on_case, max_entries=max_entries)
    elapsed = time.perf_counter() - started
    payload = {**summary.to_dict(), "seed": seed, "level_set": list(level_set), "seconds": round(elapsed, 3)}
    if output_dir is not None:
        log_step(output_dir, "sweep_summary", payload)
        _write_json(output_dir / "summary.json", payload)

    if args.output == "json":
        _print_json(payload)
    else:
        header = f"{'m':>3}  {'complexes':>9}  {'levels':>6}  {'checked':>7}  {'skipped':>7}  {'disagree':>8}"
        lines = [header]
        for row in payload["by_m"]:
            lines.append(
                f"{row['m']:>3}  {row['complexes']:>9}  {row['level_vectors']:>6}  "
                f"{row['checked']:>7}  {row['skipped']:>7}  {row['disagreements']:>8}"
            )
        lines.append(
            f"total: {summary.checked} checked, {summary.skipped} skipped, "
            f"{len(summary.disagreements)} disagreements ({elapsed:.2f}s)"
        )
        print("\n".join(lines))
    return 0 if summary.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hlrank",
        description="Rank, dimension and degrees of freedom of hierarchical log-linear models.",
    )
    parser.add_argument("--debug", action="store_true", help="verbose logging")
    commands = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--facets", help='facet list as JSON, e.g. "[[1,2],[2,3]]" (needs --m)')
    common.add_argument("--input", help="model JSON file {m, facets, levels}")
    common.add_argument("--family", choices=sorted(FAMILIES), help="named model family (needs --m)")
    common.add_argument("--m", type=int, help="number of variables")
    level_group = common.add_mutually_exclusive_group()
    level_group.add_argument("--r", type=int, help="constant number of levels per variable")
    level_group.add_argument("--levels", help="comma-separated levels r_1,...,r_m")
    common.add_argument("--names", help="comma-separated variable names for text output")
    common.add_argument("--size-cap", type=int, help="largest joint state space for the matrix oracle")
    common.add_argument("--max-entries", type=int, help="largest design matrix (rows x columns) for the matrix oracle")
    common.add_argument("--output", choices=["text", "json"], default="text")
    common.add_argument("--series-degree", type=int, help="truncation degree for series checks")
    common.add_argument("--seed", type=int, help="seed for sampled checks")

    info = commands.add_parser("info", parents=[common], help="faces, f-vector, e-vector, DS flag")
    info.add_argument("--series-check", action="store_true", help="compare the truncated series to the closed form")
    info.set_defaults(handler=cmd_info)

    rank = commands.add_parser("rank", parents=[common], help="rank, dimension and degrees of freedom")
    rank.add_argument("--verify", action="store_true", help="check against the explicit matrix rank")
    rank.set_defaults(handler=cmd_rank)

    evector = commands.add_parser("evector", parents=[common], help="e-vector and rank polynomial")
    evector.set_defaults(handler=cmd_evector)

    dump = commands.add_parser("dump-matrix", parents=[common], help="print the design matrix")
    dump.add_argument("--out", help="write the dump to this file")
    dump.set_defaults(handler=cmd_dump_matrix)

    sweep = commands.add_parser("verify-sweep", help="compare formula and matrix rank over many models")
    sweep.add_argument("--max-m", type=int, default=3, help="largest m for exhaustive enumeration (<= 4, 0 to skip)")
    sweep.add_argument("--min-m", type=int, help="smallest m for exhaustive enumeration (default: --max-m)")
    sweep.add_argument("--level-set", default="2,3", help="comma-separated level values")
    sweep.add_argument("--random", type=int, default=0, help="number of seeded random complexes")
    sweep.add_argument("--random-m", default="4,5", help="vertex counts for random complexes")
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--size-cap", type=int)
    sweep.add_argument("--max-entries", type=int)
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--output-dir", help="write run.log and summary.json here")
    sweep.add_argument("--output", choices=["text", "json"], default="text")
    sweep.set_defaults(handler=cmd_verify_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    config = load_config()
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.debug or config.debug else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    logger.debug("Running %s", args.command)
    try:
        return args.handler(args, config)
    except RankMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SizeCapExceeded as exc:
        print(f"error: {exc} (raise --size-cap or --max-entries)", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def positive_limit(value: Optional[int], default: int, name: str) -> int:
    if value is None:
        return default
    if isinstance(value, bool) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    return value


def _require_spec(job: JobConfig) -> ModelSpec:
    if job.levels is None:
        raise ValueError("levels required: pass --r, --levels or 'levels' in the input file")
    return ModelSpec(complex=job.complex, levels=job.levels)


def _parse_int_list(raw: str, flag: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise ValueError(f"{flag} must be comma-separated integers, got {raw!r}") from exc
    if not values:
        raise ValueError(f"{flag} must not be empty")
    return values


def _format_facets(facets: Sequence[Sequence[int]], names: Optional[Sequence[str]] = None) -> str:
    if names is None and all(v < 10 for facet in facets for v in facet):
        return "".join("[" + "".join(str(v) for v in facet) + "]" for facet in facets)
    return "".join("[" + " ".join(_label(v, names) for v in facet) + "]" for facet in facets)


def _format_set(face: Sequence[int], names: Optional[Sequence[str]] = None) -> str:
    return "{" + ",".join(_label(v, names) for v in face) + "}"


def _label(v: int, names: Optional[Sequence[str]]) -> str:
    return names[v - 1] if names else str(v)


def _format_vector(values: Sequence[Any]) -> str:
    return "(" + ", ".join(str(value) for value in values) + ")"


def _yes_no(flag: bool) -> str:
    return "yes" if flag else "no"


def _print_json(payload: dict[str, Any]) -> None:
    print(json.dumps(payload, ensure_ascii=False, indent=2))


def _write_json(path: Path, payload: dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, ensure_ascii=False, indent=2)


if __name__ == "__main__":
    sys.exit(main())
