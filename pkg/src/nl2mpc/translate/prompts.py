"""Prompt assets and prompt assembly.

Assets are checksummed text files shipped with the package, one per
(embodiment, stage).  Rendering concatenates the asset, the prior
conversation turns, and the new user message in a fixed layout, so the same
inputs always produce the same bytes.  When a token budget is given, oldest
turns are dropped first and a single marker line records the elision; tokens
are estimated as ceil(len(text) / 4).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

from nl2mpc.errors import ChecksumError, ValidationError

EMBODIMENTS = ("quadruped", "manipulator")
STAGES = ("motion-descriptor", "reward-coder", "cap-baseline")

_STAGE_FILES = {
    "motion-descriptor": "descriptor",
    "reward-coder": "coder",
    "cap-baseline": "cap",
}

ELIDED_MARKER = "[earlier turns elided]"


@dataclass(frozen=True)
class PromptAsset:
    embodiment: str
    stage: str
    text: str
    checksum: str


def _asset_dir():
    return resources.files("nl2mpc.translate") / "assets"


def load_asset(embodiment: str, stage: str) -> PromptAsset:
    """Load a prompt asset, verifying its sha256 against the manifest."""
    if embodiment not in EMBODIMENTS:
        raise ValidationError(f"unknown embodiment {embodiment!r}, expected one of {EMBODIMENTS}")
    if stage not in STAGES:
        raise ValidationError(f"unknown stage {stage!r}, expected one of {STAGES}")
    name = f"{embodiment}_{_STAGE_FILES[stage]}.txt"
    root = _asset_dir()
    raw = (root / name).read_bytes()
    manifest = json.loads((root / "checksums.json").read_text())
    digest = hashlib.sha256(raw).hexdigest()
    if manifest.get(name) != digest:
        raise ChecksumError(
            f"prompt asset {name} has checksum {digest}, manifest says {manifest.get(name)}"
        )
    return PromptAsset(embodiment=embodiment, stage=stage, text=raw.decode("utf-8"), checksum=digest)


def estimate_tokens(text: str) -> int:
    return (len(text) + 3) // 4


def _compose(asset_text: str, turns: Sequence[tuple[str, str]], instruction: str,
             elided: bool) -> str:
    parts = [asset_text.rstrip("\n"), ""]
    if elided:
        parts += [ELIDED_MARKER, ""]
    for user, assistant in turns:
        parts += [f"User: {user}", "", "Response:", assistant.rstrip("\n"), ""]
    parts += [f"User: {instruction}", "", "Response:"]
    return "\n".join(parts) + "\n"


def render_prompt(
    asset: PromptAsset,
    instruction: str,
    history: Sequence[tuple[str, str]] = (),
    max_tokens: int | None = None,
) -> str:
    """Assemble the full prompt text for one completion request.

    `history` is (user text, assistant text) pairs, oldest first.  With a
    token budget, whole turns are elided oldest-first until the estimate
    fits; the asset and the new instruction are never elided.
    """
    turns = list(history)
    text = _compose(asset.text, turns, instruction, elided=False)
    if max_tokens is None or estimate_tokens(text) <= max_tokens:
        return text
    elided = False
    while turns:
        turns.pop(0)
        elided = True
        text = _compose(asset.text, turns, instruction, elided=True)
        if estimate_tokens(text) <= max_tokens:
            return text
    return _compose(asset.text, [], instruction, elided=elided)
