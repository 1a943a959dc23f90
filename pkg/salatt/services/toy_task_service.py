"""
Desk-scale synthetic VQA task.

Every image plants one pattern prototype in one region. Questions come from
fixed templates and the answer is a deterministic function of (pattern,
template), or of the planted region for the ``where`` template, so a model has
to read the question and find the localized evidence to answer.
"""

from __future__ import annotations

from salatt.core.exceptions import ArgumentError
from salatt.core.rng import RngState
from salatt.core.structlog_config import get_logger
from salatt.models.enums import QuestionTemplate
from salatt.schemas.dataset import REFERENCE_COUNT, QuestionVocab, VqaSample
from salatt.schemas.region import RegionFeatureBlock
from salatt.schemas.toy_task import ToyTask, ToyTaskSpec
from salatt.services.region_service import pattern_prototypes, region_name, synth_features

log = get_logger(__name__)

TEMPLATE_ORDER = (QuestionTemplate.WHAT, QuestionTemplate.GROUP, QuestionTemplate.WHERE)

TEMPLATE_TEXT: dict[QuestionTemplate, str] = {
    QuestionTemplate.WHAT: "what pattern is shown",
    QuestionTemplate.GROUP: "which group is shown",
    QuestionTemplate.WHERE: "where is the pattern",
}

QUESTION_WORDS: tuple[str, ...] = ("<unk>", "what", "pattern", "is", "shown", "which", "group", "where", "the")


def question_vocab() -> QuestionVocab:
    return QuestionVocab(words=QUESTION_WORDS)


def pattern_name(pattern: int) -> str:
    return f"pattern-{pattern}"


def group_name(pattern: int) -> str:
    return "group-a" if pattern % 2 == 0 else "group-b"


def toy_answer(template: QuestionTemplate, pattern: int, region: int, block: RegionFeatureBlock) -> str:
    if template is QuestionTemplate.WHAT:
        return pattern_name(pattern)
    if template is QuestionTemplate.GROUP:
        return group_name(pattern)
    return region_name(block.grid, region)


def validate_spec(spec: ToyTaskSpec) -> None:
    if spec.patterns < 1:
        raise ArgumentError(f"toy task needs at least one pattern, got {spec.patterns}")
    if not 1 <= spec.questions <= len(TEMPLATE_ORDER):
        raise ArgumentError(f"toy task supports 1..{len(TEMPLATE_ORDER)} question templates, got {spec.questions}")
    if spec.noise < 0:
        raise ArgumentError(f"noise level must be non-negative, got {spec.noise}")
    if spec.d_i < 1 or spec.train_size < 0 or spec.val_size < 0:
        raise ArgumentError("toy task sizes must be non-negative and d_I positive")


def build_toy_task(spec: ToyTaskSpec, rng: RngState) -> ToyTask:
    """
    Train and validation samples over freshly synthesized images.

    Sample i uses template i mod Q and pattern (i div Q) mod P, so templates and
    patterns are balanced; the planted region is drawn uniformly. All ten
    reference answers equal the true answer. Samples come back unlabeled.
    """
    validate_spec(spec)
    vocab = question_vocab()
    templates = TEMPLATE_ORDER[: spec.questions]
    prototypes = pattern_prototypes(spec, rng)

    blocks: list[RegionFeatureBlock] = []
    samples: list[VqaSample] = []
    for i in range(spec.train_size + spec.val_size):
        template = templates[i % len(templates)]
        wanted = (i // len(templates)) % spec.patterns
        block, region, pattern = synth_features(spec, rng.derive("image", i), prototypes, pattern=wanted)
        answer = toy_answer(template, pattern, region, block)
        blocks.append(block)
        samples.append(
            VqaSample(
                features=block,
                question=tuple(vocab.encode(TEMPLATE_TEXT[template])),
                answer=answer,
                reference_answers=(answer,) * REFERENCE_COUNT,
                question_type=template.value,
                image=i,
            )
        )

    log.info(
        "Built toy task",
        patterns=spec.patterns,
        templates=[t.value for t in templates],
        noise=spec.noise,
        train=spec.train_size,
        val=spec.val_size,
    )
    return ToyTask(
        spec=spec,
        blocks=blocks,
        train=samples[: spec.train_size],
        val=samples[spec.train_size :],
        question_vocab=vocab,
    )
