"""Run the session service with canned completions, for manual poking.

Usage: python3 scripts/dev_serve.py [port]
Each new session replays the apple-in-drawer fixture conversation.
"""

import pathlib
import sys

import uvicorn

from nl2mpc.service.app import create_app
from nl2mpc.translate.client import MockCompletionClient

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "tests/fixtures/sessions/apple_drawer"


def factory(embodiment: str) -> MockCompletionClient:
    completions = []
    for i in (1, 2, 3, 4):
        completions.append((FIXTURES / f"turn{i}.descriptor.txt").read_text())
        completions.append((FIXTURES / f"turn{i}.txt").read_text())
    return MockCompletionClient(completions, cyclic=True)


if __name__ == "__main__":
    port = int(sys.argv[1]) if len(sys.argv) > 1 else 8930
    uvicorn.run(create_app(client_factory=factory), host="127.0.0.1", port=port, log_level="warning")
