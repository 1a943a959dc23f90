from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

from salatt.core.structlog_config import get_logger
from salatt.schemas.training import EvaluationRecord

log = get_logger(__name__)

METRICS_HEADER = "iteration,train_loss,val_vqa_acc,val_top1,seconds"


def format_row(record: EvaluationRecord) -> str:
    return f"{record.iteration},{record.train_loss!r},{record.val_vqa_acc!r},{record.val_top1!r},{record.seconds:.3f}"


class MetricsRepository:
    """Comma-separated per-evaluation metrics log."""

    def write(self, path: Path, records: Sequence[EvaluationRecord]) -> None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        lines = [METRICS_HEADER, *(format_row(r) for r in records)]
        target.write_text("\n".join(lines) + "\n", encoding="utf-8")
        log.info("Metrics log written", path=str(target), rows=len(records))

    def read(self, path: Path) -> list[EvaluationRecord]:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        records: list[EvaluationRecord] = []
        for line in lines[1:]:
            iteration, loss, vqa, top1, seconds = line.split(",")
            records.append(
                EvaluationRecord(
                    iteration=int(iteration),
                    train_loss=float(loss),
                    val_vqa_acc=float(vqa),
                    val_top1=float(top1),
                    seconds=float(seconds),
                )
            )
        return records
