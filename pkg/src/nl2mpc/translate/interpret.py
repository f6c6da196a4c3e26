"""Execution of a parsed reward script against an embodiment's reward API.

The interpreter owns two built-ins: reset_reward clears the working spec,
and execute_plan fixes the plan duration (default 2 s) and must come last
(the parser already guarantees that).  Every other call dispatches to the
embodiment's setter functions, which return updated immutable specs.  When
no reset_reward appears, the calls amend the spec carried over from the
previous turn, which is how follow-up corrections work.
"""

from __future__ import annotations

from nl2mpc.errors import ScriptError, ValidationError
from nl2mpc.manipulator.api import REWARD_API as MANIPULATOR_API
from nl2mpc.quadruped.api import REWARD_API as QUADRUPED_API
from nl2mpc.rewards.core import RewardSpec
from nl2mpc.translate.script import RewardScript

DEFAULT_PLAN_DURATION = 2.0

REWARD_APIS = {
    "quadruped": QUADRUPED_API,
    "manipulator": MANIPULATOR_API,
}

BUILTIN_CALLS = ("reset_reward", "execute_plan")


def call_whitelist(embodiment: str) -> frozenset:
    """All function names a script for this embodiment may call."""
    try:
        api = REWARD_APIS[embodiment]
    except KeyError:
        raise ValidationError(f"unknown embodiment {embodiment!r}") from None
    return frozenset(api) | frozenset(BUILTIN_CALLS)


def _plan_duration(call, index: int) -> float:
    args = list(call.args)
    kwargs = dict(call.kwargs)
    if len(args) > 1 or (args and kwargs):
        raise ScriptError(
            "execute_plan takes at most one duration argument",
            line=call.line, call_index=index,
        )
    if args:
        value = args[0]
    elif kwargs:
        extra = set(kwargs) - {"plan_duration", "duration"}
        if extra or len(kwargs) > 1:
            raise ScriptError(
                f"unexpected execute_plan keyword(s): {sorted(kwargs)}",
                line=call.line, call_index=index,
            )
        value = next(iter(kwargs.values()))
    else:
        return DEFAULT_PLAN_DURATION
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
        raise ScriptError(
            f"plan duration must be a positive number, got {value!r}",
            line=call.line, call_index=index,
        )
    return float(value)


def interpret_script(
    script: RewardScript,
    embodiment: str,
    base_spec: RewardSpec | None = None,
) -> tuple[RewardSpec, float]:
    """Run the script's calls in order; returns (spec, plan duration).

    `base_spec` is the previous turn's spec; without a leading reset_reward
    the new calls merge into it.
    """
    api = REWARD_APIS.get(embodiment)
    if api is None:
        raise ValidationError(f"unknown embodiment {embodiment!r}")
    spec = base_spec if base_spec is not None else RewardSpec()
    duration = DEFAULT_PLAN_DURATION

    for index, call in enumerate(script.calls()):
        if call.name == "reset_reward":
            if call.args or call.kwargs:
                raise ScriptError(
                    "reset_reward takes no arguments", line=call.line, call_index=index
                )
            spec = RewardSpec()
        elif call.name == "execute_plan":
            duration = _plan_duration(call, index)
        else:
            fn = api.get(call.name)
            if fn is None:
                raise ScriptError(
                    f"{call.name!r} is not part of the {embodiment} reward API",
                    line=call.line, call_index=index,
                )
            try:
                spec = fn(spec, *call.args, **dict(call.kwargs))
            except (ValidationError, TypeError) as e:
                raise ScriptError(
                    f"{call.name}: {e}", line=call.line, call_index=index
                ) from e

    return spec.with_duration(duration), duration
