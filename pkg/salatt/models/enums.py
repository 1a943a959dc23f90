import enum


class Variant(str, enum.Enum):
    SALATT = "SalAtt"  # BiLSTM pre-selection + EWM attention
    HOLISTIC = "Holistic"  # mean region feature, EWM fusion, no attention
    TRAATT = "TraAtt"  # inner-product attention, concatenation fusion
    REGATT = "RegAtt"  # EWM attention without pre-selection
    CONATT = "ConAtt"  # shared linear (1x1 conv) pre-selection + EWM attention

    @property
    def has_preselection(self) -> bool:
        return self in (Variant.SALATT, Variant.CONATT)


class Mode(str, enum.Enum):
    TRAIN = "train"
    EVAL = "eval"


class Profile(str, enum.Enum):
    TOY = "toy"
    FULL = "full"
    GRADCHECK = "gradcheck"


class QuestionTemplate(str, enum.Enum):
    WHAT = "what"  # answer: pattern name
    GROUP = "group"  # answer: pattern parity group
    WHERE = "where"  # answer: region name
