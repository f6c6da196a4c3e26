"""Instruction-to-reward translation: prompts, parsing, interpretation."""

from nl2mpc.translate.client import (
    CompletionClient,
    HttpCompletionClient,
    MockCompletionClient,
)
from nl2mpc.translate.descriptor import (
    MotionDescription,
    descriptor_template,
    parse_motion_description,
)
from nl2mpc.translate.interpret import call_whitelist, interpret_script
from nl2mpc.translate.pipeline import TurnArtifacts, translate
from nl2mpc.translate.prompts import PromptAsset, load_asset, render_prompt
from nl2mpc.translate.script import (
    Call,
    Loop,
    RewardScript,
    extract_code,
    parse_reward_script,
    pretty,
)

__all__ = [
    "CompletionClient",
    "HttpCompletionClient",
    "MockCompletionClient",
    "MotionDescription",
    "descriptor_template",
    "parse_motion_description",
    "call_whitelist",
    "interpret_script",
    "TurnArtifacts",
    "translate",
    "PromptAsset",
    "load_asset",
    "render_prompt",
    "Call",
    "Loop",
    "RewardScript",
    "extract_code",
    "parse_reward_script",
    "pretty",
]
