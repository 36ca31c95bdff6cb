"""Command-line entry point.

Subcommands cover metric computation, parameter-table lookups, sweeps and
bitrate-matched search, subjective statistics, plan generation, the
session server and exports. Every randomized behavior funnels through
one ``--seed`` flag (default 0); identical inputs and seed give
byte-identical outputs.

Exit codes: 0 success, 1 validation, 2 environment, 3 internal.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .adapters import load_adapter, mock_adapter
from .cloud import PointCloud, stimulus_name
from .ctc import (RATES, STRATEGIES, classify_pg, gpcc_ctc_params, gpcc_strategy_qp,
                  jpeg_config_lookup, next_pqs, pqs_ladder, vpcc_ctc_params,
                  vpcc_strategy_params)
from .errors import (DomainError, EnvironmentFailure, PcqlabError, SchemaError,
                     ValidationError)
from .lab import grid_sweep, isorate_csv, isorate_search, sweep_csv
from .metrics import evaluate_triple, report_header, report_row
from .pairwise import build_tally, group_votes, load_votes_jsonl, not_sure_profile
from .plan import PlanStimulus, generate_plan
from .ply import load_ply
from .relations import config_relation
from .scores import load_dsis_csv, mos_ci, mos_table_csv, parse_stimulus_id
from .screening import screen_outliers
from .service import ExperimentService, pack_cloud
from .session import SessionStore
from .thurstone import scale_with_ci
from .verdicts import (SuperiorityVerdict, assemble_diagram, jod_superior,
                       relation_verdict, welch_superior)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"usage error: {message}")


def _read_cloud(path: str, bit_depth: int | None = None) -> PointCloud:
    if not os.path.exists(path):
        raise EnvironmentFailure(f"cannot read {path!r}: no such file")
    return load_ply(path, bit_depth=bit_depth)


def _parse_values(spec: str) -> tuple[str, list[float]]:
    if "=" not in spec:
        raise ValidationError(f"expected name=v1,v2,... got {spec!r}")
    name, _, raw = spec.partition("=")
    values = [v for v in raw.split(",") if v.strip()]
    if not values:
        raise ValidationError(f"no values given for {name!r}")
    out = []
    for v in values:
        number = float(v)
        out.append(int(number) if number.is_integer() else number)
    return name.strip(), out


ADAPTER_PATH_VAR = "PCQLAB_ADAPTER_PATH"


def _adapter(args) -> object:
    if args.adapter in (None, "mock"):
        return mock_adapter()
    candidates = [args.adapter]
    for root in os.environ.get(ADAPTER_PATH_VAR, "").split(os.pathsep):
        if root:
            candidates.append(os.path.join(root, args.adapter))
            candidates.append(os.path.join(root, args.adapter + ".toml"))
    for candidate in candidates:
        if os.path.exists(candidate):
            return load_adapter(candidate)
    raise EnvironmentFailure(
        f"adapter config {args.adapter!r} not found (searched {ADAPTER_PATH_VAR})")


# -- metric ----------------------------------------------------------------

def cmd_metric(args) -> int:
    reference = _read_cloud(args.reference, args.bit_depth)
    decoded = _read_cloud(args.decoded)
    if args.color and (not reference.has_colors or not decoded.has_colors):
        raise ValidationError("--color requested but a cloud lacks color attributes")
    if args.bitstream:
        if not os.path.exists(args.bitstream):
            raise EnvironmentFailure(f"cannot read {args.bitstream!r}: no such file")
        size = os.path.getsize(args.bitstream)
    else:
        size = args.bitstream_bytes
    report = evaluate_triple(reference, decoded, size, neighbor_k=args.k)
    print(report_header())
    print(report_row(report, content=args.content, codec=args.codec,
                     rate=args.rate, strategy=args.strategy))
    return 0


# -- table lookups -----------------------------------------------------------

def cmd_ctc(args) -> int:
    if args.table == "gpcc":
        pqs, qp = gpcc_ctc_params(args.rate, args.bit_depth)
        print(f"pqs={pqs},qp={qp}")
    elif args.table == "vpcc":
        aqp, gqp, occ = vpcc_ctc_params(args.rate)
        print(f"aqp={aqp},gqp={gqp},occupancyPrecision={occ}")
    elif args.table == "gpcc-strategy":
        qp = gpcc_strategy_qp(args.rate, args.strategy, args.bit_depth)
        print(f"qp={qp}")
    elif args.table == "vpcc-strategy":
        d = vpcc_strategy_params(args.rate, args.strategy)
        gqp = "unresolved" if d.gqp is None else d.gqp
        print(f"aqp={d.aqp},gqp={gqp},occupancyPrecision={d.occupancy_precision}")
    elif args.table == "jpeg":
        lam, sf, cri = jpeg_config_lookup(args.content, args.rate, args.strategy)
        print(f"lambda={lam},sf={sf},cri={cri}")
    elif args.table == "next-pqs":
        print(next_pqs(args.pqs))
    elif args.table == "ladder":
        print(",".join(repr(v) for v in pqs_ladder(args.bit_depth)))
    elif args.table == "classify-pg":
        print(classify_pg(args.geometry_bytes, args.total_bytes))
    return 0


# -- sweep / isorate ---------------------------------------------------------

def cmd_sweep(args) -> int:
    adapter = _adapter(args)
    content = _read_cloud(args.input, args.bit_depth)
    grid_a = _parse_values(args.grid_a)
    grid_b = _parse_values(args.grid_b)
    rows = grid_sweep(adapter, content, grid_a, grid_b, jobs=args.jobs)
    text = sweep_csv(rows, grid_a[0], grid_b[0])
    _emit(text, args.out)
    return 0


def cmd_isorate(args) -> int:
    adapter = _adapter(args)
    adapter.check_invocable()
    content = _read_cloud(args.input, args.bit_depth)
    if not args.sweep:
        raise ValidationError("usage error: --sweep is required (name=v1,v2,...)")
    sweep = _parse_values(args.sweep)
    if args.ladder:
        ladder = _parse_values(args.ladder)
    else:
        ladder = ("s" if adapter.codec_id == "Mock" else "pqs",
                  list(pqs_ladder(content.bit_depth)))
    rows = isorate_search(adapter, content, args.target_bpp, sweep, ladder,
                          jobs=args.jobs, exhaustive=args.exhaustive)
    _emit(isorate_csv(rows), args.out)
    return 0


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- statistics --------------------------------------------------------------

def _default_anchor(group, stimuli: list[str]) -> str:
    """P1 anchors the MPEG codecs; the learning-based codec anchors P2."""
    wanted = "P2" if "jpeg" in group.codec.lower() else "P1"
    for stimulus in stimuli:
        if parse_stimulus_id(stimulus).strategy == wanted:
            return stimulus
    return sorted(stimuli)[0]


def cmd_stats(args) -> int:
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    wrote_any = False
    dsis_verdicts: list[tuple[tuple, SuperiorityVerdict]] = []
    pwc_verdicts: list[tuple[tuple, SuperiorityVerdict]] = []

    if args.dsis:
        if not os.path.exists(args.dsis):
            raise EnvironmentFailure(f"cannot read {args.dsis!r}: no such file")
        matrix = load_dsis_csv(Path(args.dsis).read_text())
        cleaned, rejected = screen_outliers(matrix)
        entries = mos_ci(cleaned)
        mos_text = mos_table_csv(entries)
        _emit(mos_text, str(out_dir / "mos.csv") if out_dir else None)
        if out_dir:
            (out_dir / "screening.json").write_text(
                json.dumps({"rejected_subjects": rejected}, indent=1) + "\n")
        elif rejected:
            print(f"rejected subjects: {','.join(rejected)}")
        dsis_verdicts = _dsis_verdicts(cleaned, args.alpha)
        wrote_any = True

    if args.pwc:
        if not os.path.exists(args.pwc):
            raise EnvironmentFailure(f"cannot read {args.pwc!r}: no such file")
        votes = load_votes_jsonl(Path(args.pwc).read_text())
        lines = ["content,codec,rate,stimulus_id,jod,ci_low,ci_high"]
        for group, group_vote_list in sorted(group_votes(votes).items(),
                                             key=lambda kv: (kv[0].content, kv[0].codec,
                                                             kv[0].rate)):
            tally = build_tally(group_vote_list)
            anchor = _default_anchor(group, tally.stimuli)
            scale = scale_with_ci(tally, anchor, iterations=args.iterations,
                                  seed=args.seed)
            for stimulus in sorted(tally.stimuli):
                lo, hi = scale.ci[stimulus] if scale.ci else (math.nan, math.nan)
                lines.append(f"{group.content},{group.codec},{group.rate},{stimulus},"
                             f"{scale.jod[stimulus]:.4f},{lo:.4f},{hi:.4f}")
            pwc_verdicts += _pwc_verdicts(group, scale, args.threshold)
        _emit("\n".join(lines) + "\n", str(out_dir / "jod.csv") if out_dir else None)
        profile = not_sure_profile(votes)
        profile_text = "rate,not_sure_proportion\n" + "".join(
            f"{rate},{share:.4f}\n" for rate, share in profile.items())
        _emit(profile_text, str(out_dir / "not_sure.csv") if out_dir else None)
        wrote_any = True

    if not wrote_any:
        raise ValidationError("usage error: provide --dsis and/or --pwc input")

    cells: dict[tuple, list[SuperiorityVerdict]] = {}
    for key, verdict in dsis_verdicts + pwc_verdicts:
        cells.setdefault(key, []).append(verdict)
    for key in list(cells):
        content, codec, rate = key
        if "jpeg" in codec.lower():
            cells[key] += _relation_verdicts(content, codec, rate)
    if cells:
        diagram = [cell.as_dict() for cell in assemble_diagram(cells)]
        text = json.dumps(diagram, indent=1) + "\n"
        _emit(text, str(out_dir / "diagram.json") if out_dir else None)
    return 0


def _dsis_verdicts(matrix, alpha: float):
    by_cell: dict[tuple, dict[str, list[float]]] = {}
    for j, stim in enumerate(matrix.stimuli):
        if stim.is_hidden_reference or not stim.strategy:
            continue
        col = matrix.scores[:, j]
        scores = [float(v) for v in col[~np.isnan(col)]]
        key = (stim.content, stim.codec, stim.rate)
        by_cell.setdefault(key, {})[stim.stimulus_id] = scores
    out = []
    for key, stims in sorted(by_cell.items()):
        ids = sorted(stims)
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                if len(stims[ids[i]]) < 2 or len(stims[ids[j]]) < 2:
                    continue
                verdict = welch_superior(stims[ids[i]], stims[ids[j]], alpha=alpha,
                                         label_a=ids[i], label_b=ids[j])
                out.append((key, verdict))
    return out


def _pwc_verdicts(group, scale, threshold: float):
    out = []
    ids = sorted(scale.jod)
    key = (group.content, group.codec, group.rate)
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            verdict = jod_superior(scale.jod[ids[i]], scale.jod[ids[j]],
                                   threshold=threshold, label_a=ids[i],
                                   label_b=ids[j], group_a=group, group_b=group)
            out.append((key, verdict))
    return out


def _relation_verdicts(content: str, codec: str, rate: str):
    out = []
    try:
        configs = {s: jpeg_config_lookup(content, rate, s) for s in STRATEGIES}
    except DomainError:
        return out
    for i in range(len(STRATEGIES)):
        for j in range(i + 1, len(STRATEGIES)):
            a, b = STRATEGIES[i], STRATEGIES[j]
            rel = config_relation(configs[a], configs[b])
            name_a = stimulus_name(content, codec, a, rate)
            name_b = stimulus_name(content, codec, b, rate)
            out.append(relation_verdict(name_a, name_b, rel))
    return out


# -- sessions ----------------------------------------------------------------

def cmd_plan(args) -> int:
    if not os.path.exists(args.stimuli):
        raise EnvironmentFailure(f"stimulus manifest {args.stimuli!r} not found")
    manifest = json.loads(Path(args.stimuli).read_text())
    try:
        stimuli = [PlanStimulus(**entry) for entry in manifest]
    except TypeError as exc:
        raise SchemaError(f"bad stimulus manifest entry: {exc}")
    store = SessionStore(args.store)
    for k in range(args.subjects):
        session_id = f"{args.session_prefix}{k:03d}"
        plan = generate_plan(args.protocol, stimuli, seed=args.seed + k)
        store.create_session(session_id, plan)
        print(f"created {session_id}: {len(plan.trials)} trials")
    return 0


def cmd_serve(args) -> int:  # pragma: no cover - long-running server
    from .service import serve

    store = SessionStore(args.store)
    serve(store, asset_dir=args.assets, host=args.host, port=args.port)
    return 0


def cmd_export(args) -> int:
    store = SessionStore(args.store)
    if args.close:
        for session_id in store.session_ids():
            if store.is_open(session_id):
                store.close_session(session_id)
    dsis_csv, pwc_jsonl = store.export()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "dsis_scores.csv").write_text(dsis_csv)
    (out / "pwc_votes.jsonl").write_text(pwc_jsonl)
    print(f"exported {args.store} -> {out}")
    return 0


def cmd_pack(args) -> int:
    cloud = _read_cloud(args.input)
    Path(args.out).write_bytes(pack_cloud(cloud))
    return 0


# -- wiring -------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="pcqlab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"pcqlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metric", help="objective metrics for one decoded cloud")
    p.add_argument("reference")
    p.add_argument("decoded")
    p.add_argument("--bitstream", help="bitstream file; its size sets the bpp")
    p.add_argument("--bitstream-bytes", type=float, default=0.0)
    p.add_argument("--bit-depth", type=int, default=None)
    p.add_argument("--color", action="store_true",
                   help="fail when either cloud lacks colors")
    p.add_argument("--k", type=int, default=12, help="normal-estimation neighbors")
    p.add_argument("--content", default="")
    p.add_argument("--codec", default="")
    p.add_argument("--rate", default="")
    p.add_argument("--strategy", default="")
    p.set_defaults(fn=cmd_metric)

    p = sub.add_parser("ctc", help="parameter-table lookups")
    p.add_argument("table", choices=["gpcc", "vpcc", "gpcc-strategy", "vpcc-strategy",
                                     "jpeg", "next-pqs", "ladder", "classify-pg"])
    p.add_argument("--rate", default="R1")
    p.add_argument("--strategy", default="P1", choices=STRATEGIES)
    p.add_argument("--bit-depth", type=int, default=10)
    p.add_argument("--content", default="Soldier")
    p.add_argument("--pqs", type=float, default=0.25)
    p.add_argument("--geometry-bytes", type=float, default=1.0)
    p.add_argument("--total-bytes", type=float, default=2.0)
    p.set_defaults(fn=cmd_ctc)

    p = sub.add_parser("sweep", help="encode a full parameter grid")
    p.add_argument("--adapter", default="mock")
    p.add_argument("--input", required=True)
    p.add_argument("--bit-depth", type=int, default=None)
    p.add_argument("--grid-a", required=True, help="name=v1,v2,...")
    p.add_argument("--grid-b", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("isorate", help="bitrate-matched parameter search")
    p.add_argument("--adapter", default="mock")
    p.add_argument("--input", required=True)
    p.add_argument("--bit-depth", type=int, default=None)
    p.add_argument("--target-bpp", type=float, required=True)
    p.add_argument("--sweep", required=True, help="name=v1,v2,...")
    p.add_argument("--ladder", help="name=v1,v2,... ordered by rising rate")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_isorate)

    p = sub.add_parser("stats", help="subjective statistics pipeline")
    p.add_argument("--dsis", help="impairment scores CSV")
    p.add_argument("--pwc", help="pairwise vote log JSONL")
    p.add_argument("--out", help="output directory (default: stdout)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--threshold", type=float, default=1.0)
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("plan", help="generate randomized session playlists")
    p.add_argument("--protocol", choices=["DSIS", "PWC"], required=True)
    p.add_argument("--stimuli", required=True, help="stimulus manifest JSON")
    p.add_argument("--store", required=True)
    p.add_argument("--subjects", type=int, default=1)
    p.add_argument("--session-prefix", default="subject-")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("serve", help="run the session HTTP service")
    p.add_argument("--store", required=True)
    p.add_argument("--assets")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8750)
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("export-session", help="write DSIS CSV + PWC JSONL exports")
    p.add_argument("--store", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--close", action="store_true", help="close open sessions first")
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("pack", help="convert a PLY cloud to the packed viewer asset")
    p.add_argument("input")
    p.add_argument("out")
    p.set_defaults(fn=cmd_pack)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EnvironmentFailure as exc:
        print(f"environment error: {exc}", file=sys.stderr)
        return 2
    except PcqlabError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
