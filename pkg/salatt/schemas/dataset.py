from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator

from salatt.schemas.region import RegionFeatureBlock

REFERENCE_COUNT = 10
UNK_ID = 0


class DatasetRecord(BaseModel):
    """One line of a dataset file."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    image: int = Field(ge=0)
    question: list[int] = Field(min_length=1)
    answer: str
    references: list[str] = Field(min_length=REFERENCE_COUNT, max_length=REFERENCE_COUNT)
    question_type: str | None = None

    @field_validator("question")
    @classmethod
    def _non_negative_ids(cls, value: list[int]) -> list[int]:
        if any(t < 0 for t in value):
            raise ValueError("token ids must be non-negative")
        return value


class VqaSample(BaseModel):
    """An image-question-answer triple bound to its region features."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    features: RegionFeatureBlock
    question: tuple[int, ...] = Field(min_length=1)
    answer: str
    answer_label: int | None = None
    reference_answers: tuple[str, ...] = Field(min_length=REFERENCE_COUNT, max_length=REFERENCE_COUNT)
    question_type: str | None = None
    image: int = 0

    def with_label(self, label: int | None) -> VqaSample:
        return self.model_copy(update={"answer_label": label})


class AnswerVocab(BaseModel):
    """Candidate answers, most frequent first (ties: first occurrence)."""

    model_config = ConfigDict(frozen=True)

    answers: tuple[str, ...]
    _index: dict[str, int] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context: object) -> None:
        if len(set(self.answers)) != len(self.answers):
            raise ValueError("answer vocabulary contains duplicates")
        self._index = {a: i for i, a in enumerate(self.answers)}

    def __len__(self) -> int:
        return len(self.answers)

    def index_of(self, answer: str) -> int | None:
        return self._index.get(canonical_answer(answer))

    def answer_at(self, index: int) -> str:
        return self.answers[index]


class QuestionVocab(BaseModel):
    """Question word list; index 0 is the reserved unknown-word id."""

    model_config = ConfigDict(frozen=True)

    words: tuple[str, ...]

    def encode(self, question: str) -> list[int]:
        lookup = {w: i for i, w in enumerate(self.words)}
        return [lookup.get(token, UNK_ID) for token in question.lower().split()]


def canonical_answer(answer: str) -> str:
    return answer.strip().lower()
