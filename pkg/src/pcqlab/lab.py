"""Parameter sweeps and bitrate-matched search over codec parameters.

Grid cells and sweep points are independent jobs; a bounded worker pool
may run them concurrently but output tables are always assembled in the
deterministic input order. External codec invocations get isolated
temporary working directories.
"""

from __future__ import annotations

import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .adapters import CodecAdapter, EncodeOutcome
from .cloud import PointCloud
from .errors import DomainError, PcqlabError
from .metrics import MetricReport, evaluate_triple, format_metric
from .normals import NormalField, estimate_normals


@dataclass
class SweepRow:
    params: dict
    bpp: float | None
    report: MetricReport | None
    error: str | None = None


@dataclass
class IsorateRow:
    sweep_value: float
    chosen_value: float | None
    bpp: float | None
    report: MetricReport | None
    feasible: bool


def _reference_normals(reference: PointCloud, k: int = 12) -> NormalField:
    return estimate_normals(reference, k=min(k, len(reference) - 1))


def _evaluate(reference: PointCloud, outcome: EncodeOutcome,
              normals: NormalField, plugins=None) -> MetricReport:
    return evaluate_triple(reference, outcome.decoded, outcome.bitstream_bytes,
                           normals=normals, plugins=plugins)


def grid_sweep(adapter: CodecAdapter, content: PointCloud,
               grid_a: tuple[str, list], grid_b: tuple[str, list],
               jobs: int = 1, plugins=None, workdir: str | None = None) -> list[SweepRow]:
    """Encode every cell of the cross product ``grid_a x grid_b``.

    Rows come back in row-major order (first axis outer). Individual cell
    failures become error rows instead of aborting the sweep.
    """
    name_a, values_a = grid_a
    name_b, values_b = grid_b
    if not values_a or not values_b:
        raise DomainError("sweep grid must be non-empty on both axes")
    adapter.check_invocable()
    normals = _reference_normals(content)
    cells = [{name_a: va, name_b: vb} for va in values_a for vb in values_b]

    def run(params: dict) -> SweepRow:
        try:
            with tempfile.TemporaryDirectory(prefix="pcqlab-cell-", dir=workdir) as tmp:
                outcome = adapter.encode(content, params, Path(tmp))
            report = _evaluate(content, outcome, normals, plugins)
            return SweepRow(params=params, bpp=outcome.bpp(content), report=report)
        except PcqlabError as exc:
            return SweepRow(params=params, bpp=None, report=None, error=str(exc))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run, cells))
    return [run(cell) for cell in cells]


def isorate_search(adapter: CodecAdapter, content: PointCloud, target_bpp: float,
                   sweep: tuple[str, list], ladder: tuple[str, list],
                   jobs: int = 1, plugins=None, exhaustive: bool = False) -> list[IsorateRow]:
    """For each sweep value, pick the largest ladder entry whose measured
    bitrate stays at or under the target.

    The ladder must be ordered by increasing bitrate effect. The default
    scan walks it downward and stops at the first fitting entry, which
    matches exhaustive evaluation as long as measured rates are monotone
    along the ladder; a monotonicity violation observed during the scan
    triggers the exhaustive fallback for that sweep value. Sweep values
    whose smallest ladder entry still exceeds the target come back as
    infeasible rows, so partial curves survive.
    """
    sweep_name, sweep_values = sweep
    ladder_name, ladder_values = ladder
    if not ladder_values:
        raise DomainError("ladder must be non-empty")
    if not sweep_values:
        raise DomainError("sweep must be non-empty")
    if target_bpp <= 0:
        raise DomainError(f"target bitrate must be positive, got {target_bpp}")
    adapter.check_invocable()
    normals = _reference_normals(content)

    def measure(params: dict) -> EncodeOutcome:
        with tempfile.TemporaryDirectory(prefix="pcqlab-iso-") as tmp:
            return adapter.encode(content, params, Path(tmp))

    def finish(sweep_value, chosen: tuple[float, EncodeOutcome] | None) -> IsorateRow:
        if chosen is None:
            return IsorateRow(sweep_value=sweep_value, chosen_value=None,
                              bpp=None, report=None, feasible=False)
        lv, outcome = chosen
        report = _evaluate(content, outcome, normals, plugins)
        return IsorateRow(sweep_value=sweep_value, chosen_value=lv,
                          bpp=outcome.bpp(content), report=report, feasible=True)

    def pick_exhaustive(sweep_value) -> IsorateRow:
        chosen = None
        for lv in ladder_values:
            outcome = measure({sweep_name: sweep_value, ladder_name: lv})
            if outcome.bpp(content) <= target_bpp:
                chosen = (lv, outcome)
        return finish(sweep_value, chosen)

    def pick(sweep_value) -> IsorateRow:
        if exhaustive:
            return pick_exhaustive(sweep_value)
        chosen = None
        previous_bpp = None
        for pos in range(len(ladder_values) - 1, -1, -1):
            lv = ladder_values[pos]
            outcome = measure({sweep_name: sweep_value, ladder_name: lv})
            bpp = outcome.bpp(content)
            if previous_bpp is not None and bpp > previous_bpp:
                # Rate increased while walking down the ladder: the
                # monotonicity assumption failed, redo exhaustively.
                return pick_exhaustive(sweep_value)
            previous_bpp = bpp
            if bpp <= target_bpp:
                chosen = (lv, outcome)
                break
        return finish(sweep_value, chosen)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(pick, sweep_values))
    return [pick(v) for v in sweep_values]


def sweep_csv(rows: list[SweepRow], name_a: str, name_b: str) -> str:
    lines = [f"{name_a},{name_b},bpp,d1_psnr,d2_psnr,y_psnr,yuv_psnr,error"]
    for row in rows:
        cells = [str(row.params[name_a]), str(row.params[name_b])]
        if row.error is not None:
            cells += ["", "", "", "", "", row.error.replace(",", ";")]
        else:
            r = row.report
            cells += [format_metric(row.bpp), format_metric(r.d1_psnr),
                      format_metric(r.d2_psnr), format_metric(r.y_psnr),
                      format_metric(r.yuv_psnr), ""]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def isorate_csv(rows: list[IsorateRow]) -> str:
    lines = ["sweep_value,chosen_value,bpp,d1,d2,y,yuv"]
    for row in rows:
        if not row.feasible:
            lines.append(f"{row.sweep_value},,,,,,")
            continue
        r = row.report
        lines.append(",".join([
            str(row.sweep_value), str(row.chosen_value), format_metric(row.bpp),
            format_metric(r.d1_psnr), format_metric(r.d2_psnr),
            format_metric(r.y_psnr), format_metric(r.yuv_psnr),
        ]))
    return "\n".join(lines) + "\n"
