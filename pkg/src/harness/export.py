"""
Experiment reports: CSV tables, the human-readable summary and the run ledger
"""
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from src.database.models import CriterionRecord, ExperimentRun, get_session, init_db
from src.errors import InvalidArgumentError

VERDICTS = ("PASS", "FAIL", "ERROR", "INFO")
FLOAT_FORMAT = "%.17g"

# Column order of per-draw mass tables
MASS_COLUMNS = ["seed", "stream", "N", "M", "beta", "grid_size", "mass", "g", "e1", "e2"]


@dataclass
class CriterionResult:
    """One summary line: criterion, value, tolerance, verdict"""

    criterion: str
    description: str
    value: float = math.nan
    tolerance: float = math.nan
    verdict: str = "ERROR"
    detail: str = ""

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise InvalidArgumentError(f"unknown verdict {self.verdict!r}")


@dataclass
class ExperimentReport:
    name: str
    seed: int
    workers: int
    block_size: int
    parameters: Dict[str, object] = field(default_factory=dict)
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    criteria: List[CriterionResult] = field(default_factory=list)
    paths: List[Path] = field(default_factory=list)

    def criterion(self, criterion: str) -> CriterionResult:
        for result in self.criteria:
            if result.criterion == criterion:
                return result
        raise KeyError(criterion)

    def count(self, verdict: str) -> int:
        return sum(1 for c in self.criteria if c.verdict == verdict)

    @property
    def passed(self) -> bool:
        return self.count("FAIL") == 0 and self.count("ERROR") == 0


def _format(value: float) -> str:
    return "nan" if value is None or math.isnan(value) else f"{value:.6g}"


def summary_text(report: ExperimentReport) -> str:
    """Plain-text summary; carries no timestamps and no worker count"""
    lines = [
        f"Experiment: {report.name}",
        f"Master seed: {report.seed}",
        f"Block size: {report.block_size}",
        "Parameters:",
    ]
    lines += [f"  {key} = {value}" for key, value in sorted(report.parameters.items())]
    lines.append("")
    lines.append(f"{'criterion':<14} {'value':>14} {'tolerance':>14}  verdict  description")
    lines.append("-" * 80)
    for c in report.criteria:
        lines.append(
            f"{c.criterion:<14} {_format(c.value):>14} {_format(c.tolerance):>14}  {c.verdict:<7}  {c.description}"
        )
        if c.detail:
            lines.append(f"{'':<14} {c.detail}")
    lines.append("-" * 80)
    lines.append(
        f"PASS {report.count('PASS')}  FAIL {report.count('FAIL')}  "
        f"ERROR {report.count('ERROR')}  INFO {report.count('INFO')}"
    )
    return "\n".join(lines) + "\n"


def write_report(report: ExperimentReport, out_dir: Path) -> List[Path]:
    """
    Write every table as CSV plus the summary, and record the run in the ledger

    Args:
        report: Finished experiment report
        out_dir: Output directory (created if missing)

    Returns:
        Paths written, tables first
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise InvalidArgumentError(f"cannot create output directory {out_dir}: {e}") from e

    paths = []
    try:
        for table_name, frame in report.tables.items():
            path = out_dir / f"{report.name}_{table_name}.csv"
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
            paths.append(path)
        summary_path = out_dir / f"{report.name}_summary.txt"
        summary_path.write_text(summary_text(report), encoding="utf-8")
        paths.append(summary_path)
    except OSError as e:
        raise InvalidArgumentError(f"cannot write to {out_dir}: {e}") from e

    print(f"💾 Wrote {len(paths)} files to {out_dir}")
    report.paths = paths
    record_run(report, out_dir)
    return paths


def record_run(report: ExperimentReport, out_dir: Optional[Path] = None) -> int:
    """Store the run and its verdicts; returns the run id"""
    init_db()
    session = get_session()
    try:
        run = ExperimentRun(
            experiment=report.name,
            master_seed=report.seed,
            workers=report.workers,
            block_size=report.block_size,
            parameters="\n".join(f"{k}={v}" for k, v in sorted(report.parameters.items())),
            output_dir=str(out_dir) if out_dir is not None else None,
            files="\n".join(str(p) for p in report.paths),
            passed=report.count("PASS"),
            failed=report.count("FAIL"),
            errored=report.count("ERROR"),
        )
        for c in report.criteria:
            run.criteria.append(CriterionRecord(
                criterion=c.criterion,
                description=c.description,
                value=None if math.isnan(c.value) else float(c.value),
                tolerance=None if math.isnan(c.tolerance) else float(c.tolerance),
                verdict=c.verdict,
                detail=c.detail,
            ))
        session.add(run)
        session.commit()
        return run.id
    except Exception:
        session.rollback()
        raise
    finally:
        session.close()
