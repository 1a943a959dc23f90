from pathlib import Path

from salatt.repositories.metrics_repository import METRICS_HEADER, MetricsRepository, format_row
from salatt.schemas.training import EvaluationRecord


class TestMetricsRepository:
    def test_row_keeps_full_float_precision(self):
        row = format_row(EvaluationRecord(iteration=100, train_loss=0.1, val_vqa_acc=2 / 3, val_top1=0.5, seconds=1.23456))

        assert row == "100,0.1,0.6666666666666666,0.5,1.235"

    def test_written_log_reads_back(self, tmp_path: Path):
        # Arrange
        path = tmp_path / "metrics.csv"
        records = [
            EvaluationRecord(iteration=0, train_loss=1.38, val_vqa_acc=0.25, val_top1=0.25, seconds=0.0),
            EvaluationRecord(iteration=100, train_loss=0.7, val_vqa_acc=0.9, val_top1=0.9, seconds=4.5),
        ]

        # Act
        MetricsRepository().write(path, records)

        # Assert
        assert path.read_text(encoding="utf-8").splitlines()[0] == METRICS_HEADER
        assert MetricsRepository().read(path) == records
