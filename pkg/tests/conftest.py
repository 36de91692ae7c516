"""Shared fixtures: a live mock chat endpoint and the demo corpus path."""

from __future__ import annotations

import threading
from http.server import ThreadingHTTPServer
from pathlib import Path

import pytest

from wikigrok.mockllm import MockChatHandler

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def mock_endpoint():
    """Start the deterministic chat server on an ephemeral port.

    Yields the full /api/chat URL the framing client should POST to.
    """
    server = ThreadingHTTPServer(("127.0.0.1", 0), MockChatHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_address[1]}/api/chat"
    finally:
        server.shutdown()
        server.server_close()
        thread.join(timeout=5)


@pytest.fixture(scope="session")
def demo_corpus() -> Path:
    """Checked-in synthetic two-platform corpus used by the pipeline tests."""
    path = FIXTURES / "demo_corpus"
    assert path.is_dir(), "demo corpus fixture missing; regenerate with wikigrok.synth"
    return path
