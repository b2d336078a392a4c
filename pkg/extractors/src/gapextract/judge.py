"""Vision-judge scoring of sampled frames against the reference image."""

from __future__ import annotations

import logging
from pathlib import Path

from .client import ChatClient, ExtractionError, image_content

log = logging.getLogger(__name__)

JUDGE_PROMPT = """\
You are evaluating how faithfully a generated video depicts a real tourist \
attraction. The first image is the real reference photograph; the remaining \
images are frames sampled uniformly from the generated video. The video was \
generated from this instruction:

{instruction}

Compare the frames against the reference and return ONLY a JSON object with \
two integer scores between 0 and 5:
{{"global": <0-5 global structural alignment: overall layout, silhouette, \
and environmental context>, "fine": <0-5 fine-grained structural and \
textural alignment: architectural details, surface patterns, local \
geometry>}}\
"""

SCORE_RANGE = range(0, 6)


def judge_video(client: ChatClient, gt_image: Path, frames: list[Path],
                instruction: str) -> dict | None:
    """One judge entry, or None when the endpoint never produced a valid
    pair of scores (absent, never fabricated)."""
    content = [{"type": "text",
                "text": JUDGE_PROMPT.format(instruction=instruction)}]
    content.append(image_content(gt_image))
    content.extend(image_content(f) for f in frames)
    messages = [{"role": "user", "content": content}]
    try:
        reply = client.chat_json(messages)
    except ExtractionError as exc:
        log.error("judge failed: %s", exc)
        return None
    try:
        global_score = int(reply["global"])
        fine_score = int(reply["fine"])
    except (KeyError, TypeError, ValueError):
        log.error("judge reply missing integer scores: %r", reply)
        return None
    if global_score not in SCORE_RANGE or fine_score not in SCORE_RANGE:
        log.error("judge scores out of range: %r", reply)
        return None
    return {"global_alignment": global_score, "fine_alignment": fine_score,
            "source": "VLM"}
