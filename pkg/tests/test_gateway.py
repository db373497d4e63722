import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from reactbench.gateway import (
    Completion,
    GenerationParams,
    HttpBackend,
    PromptTooLong,
    ReplayBackend,
    ScriptExhausted,
    build_prompt,
    load_replay_scripts,
)
from reactbench.trace import ReActStep


@pytest.fixture
def stub_server():
    """Minimal completion endpoint: records bodies, answers {"text": "pong"}."""
    received = []

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
            received.append(body)
            payload = json.dumps({"text": "pong"}).encode()
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def log_message(self, *args):
            pass

    server = HTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}", received
    server.shutdown()


class TestGenerationParams:
    def test_defaults(self):
        params = GenerationParams()
        assert params.temperature == 0.1
        assert params.max_seq_len == 8192

    def test_bounds(self):
        with pytest.raises(ValueError):
            GenerationParams(temperature=-0.1)
        with pytest.raises(ValueError):
            GenerationParams(max_new_tokens=0)
        with pytest.raises(ValueError):
            GenerationParams(max_new_tokens=100, max_seq_len=50)


class TestReplayBackend:
    def test_script_order(self):
        backend = ReplayBackend(["A", "B"])
        params = GenerationParams()
        assert backend.generate("p", params) == Completion("A", "stop")
        assert backend.generate("p", params) == Completion("B", "stop")

    def test_script_exhausted(self):
        backend = ReplayBackend(["A"])
        backend.generate("p", GenerationParams())
        with pytest.raises(ScriptExhausted):
            backend.generate("p", GenerationParams())

    def test_prompt_too_long(self):
        backend = ReplayBackend(["A"])
        with pytest.raises(PromptTooLong):
            backend.generate("x" * 1000, GenerationParams(max_seq_len=100,
                                                          max_new_tokens=10))

    def test_script_file(self, tmp_path):
        path = tmp_path / "replay.json"
        path.write_text(json.dumps({"q1": ["A", "B"], "q2": ["C"]}))
        scripts = load_replay_scripts(str(path))
        assert scripts == {"q1": ["A", "B"], "q2": ["C"]}


class TestHttpBackend:
    def test_stub_round_trip(self, stub_server):
        url, received = stub_server
        backend = HttpBackend(url)
        params = GenerationParams(temperature=0.1, max_new_tokens=64,
                                  stop_sequences=("Observation:",))
        completion = backend.generate("hello tail", params)
        assert completion == Completion("pong", "stop")
        assert received[-1] == {
            "prompt": "hello tail",
            "temperature": 0.1,
            "max_new_tokens": 64,
            "stop": ["Observation:"],
        }

    def test_unreachable_becomes_backend_error(self):
        backend = HttpBackend("http://127.0.0.1:1", backoff_s=0.01)
        completion = backend.generate("p", GenerationParams())
        assert completion.finish_reason == "backend_error"
        assert completion.text == ""


class TestBuildPrompt:
    def test_empty_history_ends_with_cue(self, registry):
        prompt = build_prompt("sys", "what is up?", [], registry)
        assert prompt.endswith("Query: what is up?\nThought:")
        assert prompt.count("Observation:") == 0

    def test_one_prior_step_has_one_observation(self, registry):
        step = ReActStep(thought="t", action="lookup_info",
                         action_input='{"topic": "x"}', observation="found it")
        prompt = build_prompt("sys", "q", [step], registry)
        assert prompt.count("\nObservation:") == 1
        assert prompt.endswith("Thought:")

    def test_determinism(self, registry):
        args = ("sys", "q", [], registry)
        assert build_prompt(*args) == build_prompt(*args)

    def test_history_monotonicity(self, registry):
        s1 = ReActStep(thought="a", action="lookup_info",
                       action_input='{"topic": "x"}', observation="o1")
        s2 = ReActStep(thought="b", action="get_weather",
                       action_input='{"city": "y"}', observation="o2")
        p1 = build_prompt("sys", "q", [s1], registry)
        p2 = build_prompt("sys", "q", [s1, s2], registry)
        assert p2.startswith(p1.removesuffix("Thought:"))

    def test_tool_list_in_registry_order(self, registry):
        prompt = build_prompt("sys", "q", [], registry)
        assert prompt.index("lookup_info") < prompt.index("get_weather")
