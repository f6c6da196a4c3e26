from nl2mpc.service.events import EventBus, Subscription
from nl2mpc.service.replay import (
    ReplayFile,
    read_replay,
    recheck_rewards,
    replay_from_json,
    replay_to_json,
    replay_trajectory,
    write_replay,
)
from nl2mpc.service.session import (
    Session,
    SessionConfig,
    Turn,
    create_session,
    load_session,
    save_session,
)

__all__ = [
    "EventBus",
    "ReplayFile",
    "Session",
    "SessionConfig",
    "Subscription",
    "Turn",
    "create_session",
    "load_session",
    "read_replay",
    "recheck_rewards",
    "replay_from_json",
    "replay_to_json",
    "replay_trajectory",
    "save_session",
    "write_replay",
]
