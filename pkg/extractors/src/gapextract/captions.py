"""Structured caption generation for benchmark construction.

The prompt template is fixed; only the landmark name, city, and country
are substituted. Responses claiming the image is not the expected place
are flagged for manual review and never merged into the manifest.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .client import ChatClient, ExtractionError, image_content

log = logging.getLogger(__name__)

CAPTION_PROMPT = """\
You are a vision-language model tasked with analyzing an image and producing \
structured captions conditioned on a known landmark.

Task:
Analyze the provided image and produce a JSON object with three fields:
1. "is_correct_place": A Boolean indicating whether the image matches the \
expected landmark.
2. "detailed_caption": A cinematic caption of 3-6 sentences describing the \
scene.
3. "short_caption": A single-sentence summary of the scene.

Context:
The expected landmark is "{landmark_name}" in {city}, {country}.

Instructions:
1. First, determine whether the image depicts {landmark_name} in {city}, \
{country}.
   - If YES, set "is_correct_place" to true and generate both captions.
   - If NO, set "is_correct_place" to false and output:
     - "detailed_caption": "This image is not {landmark_name} in {city}, \
{country}. It appears to be <identify landmark if possible>."
     - "short_caption": "This is not {landmark_name} in {city}, {country}."
     Do not generate any additional descriptions.
2. If the image is {landmark_name} in {city}, {country}, generate:
   - Detailed caption (3-6 sentences) including:
     - Aspect ratio (e.g., 16:9, 9:16)
     - Composition (camera angle, framing, foreground/background, depth)
     - Location of the main landmark(s) within the frame
     - Weather, lighting, and overall tone
     - Environmental and architectural details
     - Cinematic or stylistic cues useful for video generation
   - Short caption (1 sentence) summarizing the same scene.
3. Writing constraints:
   - Do not mention verification, checking, or internal reasoning.
   - Do not refer to "this image" or "the viewer".
   - Captions must be visual, concrete, and suitable for scene recreation.
   - Output must be valid JSON.

Output Format:
Return only a JSON object with the following structure:
{{
  "is_correct_place": true/false,
  "detailed_caption": "<detailed caption>",
  "short_caption": "<1 sentence caption based on detailed caption>"
}}\
"""

DETAILED_SENTENCE_RANGE = (3, 6)


@dataclass(frozen=True)
class CaptionResult:
    is_correct_place: bool
    detailed_caption: str
    short_caption: str


def build_prompt(landmark_name: str, city: str, country: str) -> str:
    return CAPTION_PROMPT.format(landmark_name=landmark_name, city=city,
                                 country=country)


def _sentence_count(text: str) -> int:
    return len([s for s in re.split(r"[.!?]+", text) if s.strip()])


def generate_captions(client: ChatClient, gt_image: Path, landmark_name: str,
                      city: str, country: str) -> CaptionResult:
    """Raises ExtractionError when no schema-valid reply arrives."""
    messages = [{"role": "user", "content": [
        {"type": "text",
         "text": build_prompt(landmark_name, city, country)},
        image_content(gt_image),
    ]}]
    reply = client.chat_json(messages)
    try:
        result = CaptionResult(
            is_correct_place=bool(reply["is_correct_place"]),
            detailed_caption=str(reply["detailed_caption"]),
            short_caption=str(reply["short_caption"]),
        )
    except KeyError as exc:
        raise ExtractionError(f"caption reply missing field {exc}") from exc
    if result.is_correct_place:
        count = _sentence_count(result.detailed_caption)
        lo, hi = DETAILED_SENTENCE_RANGE
        if not lo <= count <= hi:
            log.warning("detailed caption for '%s' has %d sentences "
                        "(want %d-%d)", landmark_name, count, lo, hi)
    return result
