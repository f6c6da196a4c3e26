"""The two-stage instruction-to-spec pipeline.

Stage 1 turns the user instruction into a structured motion description;
stage 2 turns that description into reward-API code, which is parsed and
interpreted into a RewardSpec.  Each stage re-queries on a failed parse
with the error appended as a follow-up message, up to `max_retries` extra
attempts; exhaustion raises a TranslationError carrying the last completion
so failures can be audited.  All intermediate texts are returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from nl2mpc.errors import (
    ParseError,
    ScriptError,
    StructureError,
    TranslationError,
    ValidationError,
    WhitelistError,
)
from nl2mpc.rewards.core import RewardSpec
from nl2mpc.translate.client import CompletionClient
from nl2mpc.translate.descriptor import MotionDescription, parse_motion_description
from nl2mpc.translate.interpret import call_whitelist, interpret_script
from nl2mpc.translate.prompts import load_asset, render_prompt
from nl2mpc.translate.script import RewardScript, parse_reward_script

RETRY_TEMPLATE = (
    "Your previous response failed to parse: {error}. "
    "Please respond again following the rules."
)


@dataclass(frozen=True)
class TurnArtifacts:
    instruction: str
    descriptor_prompt: str
    descriptor_text: str
    description: MotionDescription
    coder_prompt: str
    script_text: str
    script: RewardScript
    spec: RewardSpec
    plan_duration: float
    descriptor_retries: int
    coder_retries: int


def _staged_query(client, asset, user_text, history, parse, max_retries, max_tokens):
    """send -> parse, re-querying with the error message on failure.

    Returns (first prompt, accepted completion, parsed value, retries used).
    """
    turns = list(history)
    first_prompt = render_prompt(asset, user_text, turns, max_tokens=max_tokens)
    prompt = first_prompt
    for attempt in range(max_retries + 1):
        completion = client.send(prompt)
        try:
            return first_prompt, completion, parse(completion), attempt
        except (ParseError, WhitelistError, StructureError, ScriptError, ValidationError) as e:
            if attempt == max_retries:
                raise TranslationError(
                    f"failed after {attempt + 1} attempt(s): {e}",
                    last_completion=completion,
                    attempts=attempt + 1,
                ) from e
            turns = turns + [(user_text, completion)]
            user_text = RETRY_TEMPLATE.format(error=e)
            prompt = render_prompt(asset, user_text, turns, max_tokens=max_tokens)


def translate(
    instruction: str,
    history: Sequence[TurnArtifacts],
    client: CompletionClient,
    embodiment: str,
    base_spec: RewardSpec | None = None,
    max_retries: int = 2,
    max_tokens: int | None = None,
) -> TurnArtifacts:
    """Run both stages for one instruction and return all artifacts.

    `history` holds the session's prior turns; each stage sees its own side
    of that conversation.  `base_spec` is the carried-over spec the script
    amends unless it starts with reset_reward.
    """
    descriptor_asset = load_asset(embodiment, "motion-descriptor")
    coder_asset = load_asset(embodiment, "reward-coder")

    descriptor_history = [(t.instruction, t.descriptor_text) for t in history]
    descriptor_prompt, descriptor_text, description, d_retries = _staged_query(
        client,
        descriptor_asset,
        instruction,
        descriptor_history,
        lambda text: parse_motion_description(text, embodiment),
        max_retries,
        max_tokens,
    )

    allowed = call_whitelist(embodiment)

    def parse_and_interpret(text: str):
        script = parse_reward_script(text, allowed)
        spec, duration = interpret_script(script, embodiment, base_spec)
        return script, spec, duration

    coder_history = [(t.descriptor_text, t.script_text) for t in history]
    coder_prompt, script_text, (script, spec, duration), c_retries = _staged_query(
        client,
        coder_asset,
        descriptor_text,
        coder_history,
        parse_and_interpret,
        max_retries,
        max_tokens,
    )

    return TurnArtifacts(
        instruction=instruction,
        descriptor_prompt=descriptor_prompt,
        descriptor_text=descriptor_text,
        description=description,
        coder_prompt=coder_prompt,
        script_text=script_text,
        script=script,
        spec=spec,
        plan_duration=duration,
        descriptor_retries=d_retries,
        coder_retries=c_retries,
    )
