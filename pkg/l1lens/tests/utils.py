from pathlib import Path

from l1lens.schemas.corpus import (
    Condition,
    Dialogue,
    LanguageCode,
    SourceTag,
    Speaker,
    Turn,
)

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def human_dialogue(dialogue_id, l1=LanguageCode.JAPANESE, *texts):
    return Dialogue(
        id=dialogue_id,
        l1=l1,
        source=SourceTag.human(),
        condition=Condition.NOT_APPLICABLE,
        turns=[Turn(speaker=Speaker.L2_SPEAKER, text=t) for t in texts],
    )


def model_dialogue(dialogue_id, l1, model_name, condition, *texts):
    speakers = (Speaker.NATIVE_SPEAKER, Speaker.L2_SPEAKER)
    return Dialogue(
        id=dialogue_id,
        l1=l1,
        source=SourceTag.model(model_name),
        condition=condition,
        turns=[
            Turn(speaker=speakers[i % 2], text=text)
            for i, text in enumerate(texts)
        ],
    )
