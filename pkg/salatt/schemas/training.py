from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict, Field


class EvaluationRecord(BaseModel):
    """One row of the metrics log."""

    iteration: int
    train_loss: float
    val_vqa_acc: float
    val_top1: float
    seconds: float


class EvaluationReport(BaseModel):
    vqa_accuracy: float = Field(description="mean min(matches/3, 1)")
    top1_accuracy: float = Field(description="fraction of exact answer matches")
    count: int
    empty: bool = Field(default=False, description="set when the dataset had no samples")
    by_question_type: dict[str, float] = Field(default_factory=dict)


class TrainState(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    iteration: int = 0
    best_val_accuracy: float = float("-inf")
    best_iteration: int = 0
    best_params: dict[str, Any] = Field(default_factory=dict, description="name -> ndarray snapshot")
    history: list[EvaluationRecord] = Field(default_factory=list)
    stopped_early: bool = False

    def record(self, entry: EvaluationRecord, snapshot: dict[str, Any]) -> bool:
        """Append an evaluation; keep the snapshot when accuracy strictly improves."""
        self.history.append(entry)
        if entry.val_vqa_acc > self.best_val_accuracy:
            self.best_val_accuracy = entry.val_vqa_acc
            self.best_iteration = entry.iteration
            self.best_params = snapshot
            return True
        return False
