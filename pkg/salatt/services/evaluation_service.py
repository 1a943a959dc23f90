from __future__ import annotations

from collections import Counter, defaultdict
from collections.abc import Iterable, Sequence

from salatt.core.exceptions import ArgumentError
from salatt.core.structlog_config import get_logger
from salatt.core.tensor import Tensor
from salatt.models.enums import Mode
from salatt.models.vqa_model import forward, predict
from salatt.schemas.dataset import REFERENCE_COUNT, AnswerVocab, VqaSample, canonical_answer
from salatt.schemas.model_config import ModelConfig
from salatt.schemas.training import EvaluationReport

log = get_logger(__name__)

MATCHES_FOR_FULL_CREDIT = 3


def build_answer_vocab(answers: Iterable[str], k: int) -> AnswerVocab:
    """Top-k canonical answers by frequency; ties keep first-occurrence order."""
    if k < 1:
        raise ArgumentError(f"answer vocabulary size must be at least 1, got {k}")
    counts = Counter(canonical_answer(a) for a in answers)
    if not counts:
        raise ArgumentError("cannot build an answer vocabulary from an empty corpus")
    # Counter preserves insertion order and most_common sorts stably
    return AnswerVocab(answers=tuple(answer for answer, _ in counts.most_common(k)))


def vqa_accuracy(predicted: str, references: Sequence[str]) -> float:
    """min(#matching references / 3, 1) after lowercase+trim canonicalization."""
    if len(references) != REFERENCE_COUNT:
        raise ArgumentError(f"expected {REFERENCE_COUNT} reference answers, got {len(references)}")
    target = canonical_answer(predicted)
    matches = sum(1 for r in references if canonical_answer(r) == target)
    return min(matches / MATCHES_FOR_FULL_CREDIT, 1.0)


def label_samples(samples: Sequence[VqaSample], vocab: AnswerVocab) -> list[VqaSample]:
    return [s.with_label(vocab.index_of(s.answer)) for s in samples]


def majority_baseline(samples: Sequence[VqaSample]) -> float:
    """Mean vqa accuracy of always answering the most frequent answer."""
    if not samples:
        return 0.0
    top = Counter(canonical_answer(s.answer) for s in samples).most_common(1)[0][0]
    return sum(vqa_accuracy(top, s.reference_answers) for s in samples) / len(samples)


class EvaluationService:
    def __init__(self, vocab: AnswerVocab) -> None:
        """Service is constructed with the answer vocabulary that maps class indices to strings.

        Contract:
        - inputs: model config, parameter tensors, samples
        - outputs: EvaluationReport (deterministic given params and samples)
        - error modes: propagates dimension errors from the forward pass
        """
        self.vocab = vocab

    def predict_answer(self, config: ModelConfig, params: dict[str, Tensor], sample: VqaSample) -> str:
        trace = forward(config, params, sample, mode=Mode.EVAL)
        label = predict(trace)
        return self.vocab.answer_at(label) if label < len(self.vocab) else ""

    def evaluate(self, config: ModelConfig, params: dict[str, Tensor], samples: Sequence[VqaSample]) -> EvaluationReport:
        """Eval-mode forward per sample, arg-max answer, mean vqa accuracy and top-1 accuracy."""
        if not samples:
            log.warning("Evaluation on an empty dataset", variant=config.variant.value)
            return EvaluationReport(vqa_accuracy=0.0, top1_accuracy=0.0, count=0, empty=True)

        vqa_total = 0.0
        top1_total = 0
        per_type: dict[str, list[float]] = defaultdict(list)
        for sample in samples:
            answer = self.predict_answer(config, params, sample)
            score = vqa_accuracy(answer, sample.reference_answers)
            vqa_total += score
            top1_total += int(answer != "" and answer == canonical_answer(sample.answer))
            if sample.question_type is not None:
                per_type[sample.question_type].append(score)

        count = len(samples)
        return EvaluationReport(
            vqa_accuracy=vqa_total / count,
            top1_accuracy=top1_total / count,
            count=count,
            by_question_type={name: sum(v) / len(v) for name, v in sorted(per_type.items())},
        )
