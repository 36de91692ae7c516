"""Deterministic stand-in for a local chat-completion endpoint.

Serves the minimal wire contract the framing client speaks: POST a JSON body
with ``messages``, get back ``{"message": {"content": "<json labels>"}}``.
Labels are a pure function of the sentence text (bits of its SHA-256), so runs
are reproducible without any model installed. Used by the test suite and handy
for offline demos:

    python -m wikigrok.mockllm --port 8080
    wikigrok framing --endpoint http://127.0.0.1:8080/api/chat ...
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

_TEXT_LINE = re.compile(r"^Text: (.*)$", re.DOTALL | re.MULTILINE)


def labels_for(sentence: str) -> dict[str, int]:
    """Deterministic 0/1 labels derived from the sentence's hash."""
    digest = hashlib.sha256(sentence.encode("utf-8")).digest()
    return {
        "laudatory_framing": digest[0] & 1,
        "conflict_controversy": (digest[1] >> 1) & 1,
    }


def sentence_from_prompt(prompt: str) -> str:
    """Recover the sentence slot from the annotation prompt."""
    match = _TEXT_LINE.search(prompt)
    return match.group(1) if match else prompt


class MockChatHandler(BaseHTTPRequestHandler):
    def do_POST(self):  # noqa: N802 - http.server naming
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length) or b"{}")
        prompt = ""
        for message in body.get("messages", []):
            if message.get("role") == "user":
                prompt = message.get("content", "")
        sentence = sentence_from_prompt(prompt)
        reply = {"message": {"content": json.dumps(labels_for(sentence))}}
        payload = json.dumps(reply).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, fmt, *args):  # quiet by default
        pass


def serve(port: int) -> None:
    server = ThreadingHTTPServer(("127.0.0.1", port), MockChatHandler)
    print(f"mock chat endpoint on http://127.0.0.1:{port}/ (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--port", type=int, default=8080)
    args = parser.parse_args(argv)
    serve(args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
