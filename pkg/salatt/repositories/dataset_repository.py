"""
salatt.repositories.dataset_repository
--------------------------------------
JSON-lines dataset files, one record per line:

    {"image": 3, "question": [1, 2, 3, 4], "answer": "pattern-2",
     "references": ["pattern-2", ... 10 entries], "question_type": "what"}

``image`` indexes the blocks of the companion feature file.
"""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

from pydantic import ValidationError

from salatt.core.exceptions import FormatError
from salatt.core.structlog_config import get_logger
from salatt.schemas.dataset import AnswerVocab, DatasetRecord, VqaSample
from salatt.schemas.region import RegionFeatureBlock

log = get_logger(__name__)


class DatasetRepository:
    def read_records(self, path: Path) -> list[DatasetRecord]:
        records: list[DatasetRecord] = []
        with Path(path).open(encoding="utf-8") as handle:
            for number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    records.append(DatasetRecord.model_validate_json(line))
                except ValidationError as exc:
                    first = exc.errors()[0]
                    raise FormatError(f"{path}: invalid record: {first.get('msg', 'validation error')}", offset=number) from exc
        return records

    def write_records(self, path: Path, records: Sequence[DatasetRecord]) -> None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", encoding="utf-8", newline="\n") as handle:
            for record in records:
                handle.write(record.model_dump_json() + "\n")
        log.info("Wrote dataset", path=str(target), samples=len(records))

    def load_samples(
        self,
        path: Path,
        blocks: Sequence[RegionFeatureBlock],
        vocab: AnswerVocab | None = None,
        vocab_size: int | None = None,
    ) -> list[VqaSample]:
        """Bind records to their feature blocks and (optionally) label them against ``vocab``."""
        samples: list[VqaSample] = []
        for number, record in enumerate(self.read_records(path), start=1):
            if record.image >= len(blocks):
                raise FormatError(f"{path}: image index {record.image} beyond {len(blocks)} feature blocks", offset=number)
            if vocab_size is not None and any(t >= vocab_size for t in record.question):
                raise FormatError(f"{path}: token id beyond vocab_size={vocab_size}", offset=number)
            samples.append(
                VqaSample(
                    features=blocks[record.image],
                    question=tuple(record.question),
                    answer=record.answer,
                    answer_label=vocab.index_of(record.answer) if vocab is not None else None,
                    reference_answers=tuple(record.references),
                    question_type=record.question_type,
                    image=record.image,
                )
            )
        log.info("Loaded dataset", path=str(path), samples=len(samples))
        return samples


def to_record(sample: VqaSample) -> DatasetRecord:
    return DatasetRecord(
        image=sample.image,
        question=list(sample.question),
        answer=sample.answer,
        references=list(sample.reference_answers),
        question_type=sample.question_type,
    )
