import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import RUNNING_FEEDBACK, RUNNING_FIRST, RUNNING_SECOND
from ccsplan.errors import BackendError, FixtureExhausted, TemplateError
from ccsplan.orchestrator import (
    EpisodeConfig, Problem, ReplayBackend, WireBackend, build_feedback_prompt, build_initial_prompt,
    feedback_message, load_bundle, run_approach, run_cap, run_llm3, run_proc3s,
)
from ccsplan.scene import DRAWING_SKILLS, state_to_json, state_to_prompt_text
from ccsplan.solver import aggregate, frozen_clock
from ccsplan.constraints import Violation

GOAL = "put the green block in the green bowl"
CFG = EpisodeConfig(seed=0, clock=frozen_clock)

ALWAYS_BAD = ("```python\ndef gen_plan(init, x):\n    return [Action('pick', [0.0, -0.5, 0.02])]\n\n"
              "def gen_domain(init):\n    return {'x': Continuous(0, 1)}\n```")


@pytest.fixture
def problem(running_state):
    return Problem("arrange_blocks", GOAL, running_state, 1000)


# prompts ------------------------------------------------------------------------

def test_initial_prompt_contents(running_state):
    text = build_initial_prompt("drawing", "draw a star", running_state)
    assert DRAWING_SKILLS[0].description in " ".join(text.split())
    assert text.rstrip().endswith("Goal: draw a star")
    assert state_to_prompt_text(running_state) in text
    arrange = build_initial_prompt("arrange_blocks", GOAL, running_state)
    assert "pick" in arrange and "place" in arrange and "gen_domain" in arrange


def test_prompt_methods_differ(running_state):
    texts = {m: build_initial_prompt("arrange_blocks", GOAL, running_state, m) for m in ("proc3s", "cap", "llm3")}
    assert len(set(texts.values())) == 3


def test_missing_template(tmp_path):
    with pytest.raises(TemplateError) as e:
        load_bundle("drawing", "proc3s", root=tmp_path)
    assert e.value.code == "missing-template"
    with pytest.raises(TemplateError):
        load_bundle("kitchen")


def test_feedback_prompt():
    fs = aggregate([Violation("collision", "A", 0, "pick")] * 4 + [Violation("placement", "B", 1, "place")])
    prior = [{"role": "user", "content": "hello"}, {"role": "assistant", "content": "plan"}]
    text = build_feedback_prompt(prior, fs)
    assert text.startswith("hello\n\nplan\n\n#define user\n")
    assert "Step 0, Action pick, Violation:A.\nStep 1, Action place, Violation:B." in text
    assert feedback_message(fs) in text
    with pytest.raises(ValueError):
        build_feedback_prompt([], fs)


def test_prompt_building_is_pure(running_state):
    before = state_to_json(running_state)
    assert build_initial_prompt("arrange_blocks", GOAL, running_state) == \
        build_initial_prompt("arrange_blocks", GOAL, running_state)
    assert state_to_json(running_state) == before


# PRoC3S episodes ------------------------------------------------------------------

def test_running_example_succeeds_on_second_query(problem):
    backend = ReplayBackend([RUNNING_FIRST, RUNNING_SECOND])
    log = run_proc3s(problem, backend, CFG)
    assert log.status == "success"
    assert log.queries == 2 and log.feedback_queries == 1
    assert log.exchanges[0].feedback[0] == RUNNING_FEEDBACK
    assert log.exchanges[0].result.samples_used == 1000
    assert RUNNING_FEEDBACK in log.messages[2]["content"]
    fs = log.final_state
    assert abs(fs.objects["o7"].pose.x - fs.objects["o8"].pose.x) < 0.07


def test_first_program_solves_in_one_query(problem):
    log = run_proc3s(problem, ReplayBackend([RUNNING_SECOND]), CFG)
    assert log.status == "success" and log.queries == 1 and log.feedback_queries == 0


def test_iteration_cap_after_six_failures(problem):
    backend = ReplayBackend([ALWAYS_BAD] * 6)
    log = run_proc3s(problem, backend, EpisodeConfig(budget=20, clock=frozen_clock))
    assert log.status == "iteration-cap"
    assert log.queries == 6 and backend.calls == 6


def test_no_feedback_ablation_stops_after_one(problem):
    log = run_proc3s(problem, ReplayBackend([ALWAYS_BAD]), EpisodeConfig(budget=20, clock=frozen_clock),
                     feedback=False)
    assert log.status == "csp-timeout" and log.queries == 1


def test_parse_failures_count_toward_cap(problem):
    backend = ReplayBackend(["no code here"] * 5 + [RUNNING_SECOND])
    log = run_proc3s(problem, backend, CFG)
    assert log.status == "success" and log.queries == 6
    assert log.exchanges[0].parse_ok is False
    assert log.exchanges[0].feedback[0].endswith("Violation:Program error: no function named gen_plan in the response.")


def test_fixture_exhaustion_is_an_error(problem):
    with pytest.raises(FixtureExhausted):
        run_proc3s(problem, ReplayBackend([RUNNING_FIRST]), CFG)


@given(st.integers(0, 5), st.integers(0, 7))
@settings(max_examples=20, deadline=None)
def test_query_count_never_exceeds_cap(cap, n_bad, ):
    from conftest import load_scene
    problem = Problem("arrange_blocks", GOAL, load_scene("running"), 1000)
    responses = [ALWAYS_BAD] * n_bad + [RUNNING_SECOND] * 10
    log = run_proc3s(problem, ReplayBackend(responses), EpisodeConfig(max_feedback=cap, budget=5,
                                                                      clock=frozen_clock))
    assert log.queries <= cap + 1
    assert log.success == (n_bad <= cap)


def test_episode_log_json_is_stable(problem):
    a = run_proc3s(problem, ReplayBackend([RUNNING_FIRST, RUNNING_SECOND]), CFG).to_json()
    b = run_proc3s(problem, ReplayBackend([RUNNING_FIRST, RUNNING_SECOND]), CFG).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


# baselines -------------------------------------------------------------------------

CAP_BAD = "```python\ndef gen_plan(init):\n    return [Action('pick', [0.0, -0.5, 0.02])]\n```"
CAP_GOOD = ("```python\ndef gen_plan(init):\n    return [Action('pick', [0.0, -0.5, 0.06]), "
            "Action('place', [-0.2, -0.7, 0.02]), Action('pick', [0.0, -0.5, 0.02]), "
            "Action('place', [0.15, -0.4, 0.03])]\n```")
LLM3_GOOD = ("```python\ngen_plan = [Action('pick', [0.0, -0.5, 0.06]), Action('place', [-0.2, -0.7, 0.02]), "
             "Action('pick', [0.0, -0.5, 0.02]), Action('place', [0.15, -0.4, 0.03])]\n```")
LLM3_BAD = "```python\ngen_plan = [Action('pick', [0.0, -0.5, 0.02])]\n```"


def test_cap_one_shot(problem):
    assert run_cap(problem, ReplayBackend([CAP_GOOD]), cfg=CFG).status == "success"
    bad = run_cap(problem, ReplayBackend([CAP_BAD]), cfg=CFG)
    assert bad.status == "constraint-violation" and bad.queries == 1
    assert run_cap(problem, ReplayBackend(["prose"]), cfg=CFG).status == "parse-failure"


def test_cap_rejects_open_parameters(problem):
    log = run_cap(problem, ReplayBackend([RUNNING_SECOND]), cfg=CFG)
    assert log.status == "parse-failure"


def test_cap_gaussian_perturbs(problem):
    log = run_cap(problem, ReplayBackend([CAP_BAD]), gaussian=True, cfg=EpisodeConfig(budget=30, clock=frozen_clock))
    assert log.status in ("success", "csp-timeout")
    assert log.exchanges[0].result.samples_used <= 30


def test_llm3_uses_feedback(problem):
    log = run_llm3(problem, ReplayBackend([LLM3_BAD, LLM3_GOOD]), cfg=CFG)
    assert log.status == "success" and log.queries == 2
    assert log.exchanges[0].feedback[0] == RUNNING_FEEDBACK


def test_llm3_without_feedback(problem):
    log = run_llm3(problem, ReplayBackend([LLM3_BAD]), feedback=False, cfg=CFG)
    assert log.status == "constraint-violation" and log.queries == 1


def test_run_approach_dispatch(problem):
    assert run_approach("cap", problem, ReplayBackend([CAP_GOOD]), CFG).approach == "cap"
    with pytest.raises(ValueError):
        run_approach("magic", problem, ReplayBackend([]), CFG)


# backends -------------------------------------------------------------------------------

class _Resp:
    def __init__(self, status, payload=None, text=""):
        self.status_code = status
        self._payload = payload
        self.text = text

    def json(self):
        return self._payload


class _FakeClient:
    def __init__(self, responses):
        self.responses = list(responses)
        self.bodies = []

    def post(self, url, json=None, headers=None):
        self.bodies.append((url, json, headers))
        r = self.responses.pop(0)
        if isinstance(r, Exception):
            raise r
        return r


def _ok(text):
    return _Resp(200, {"choices": [{"message": {"content": text}}]})


def test_wire_backend_retries_then_succeeds(monkeypatch):
    monkeypatch.setenv("TEST_KEY", "k")
    client = _FakeClient([_Resp(503, text="busy"), ConnectionError("reset"), _ok("hi")])
    b = WireBackend("http://x/v1/chat", "m", key_env="TEST_KEY", retries=3, backoff=0.0, client=client)
    assert b.complete([{"role": "user", "content": "q"}]) == "hi"
    url, body, headers = client.bodies[-1]
    assert body == {"model": "m", "messages": [{"role": "user", "content": "q"}], "temperature": 0}
    assert headers["Authorization"] == "Bearer k"
    assert len(client.bodies) == 3


def test_wire_backend_client_error_is_not_retried(monkeypatch):
    monkeypatch.setenv("TEST_KEY", "k")
    client = _FakeClient([_Resp(400, text="bad request"), _ok("never")])
    b = WireBackend("http://x", "m", key_env="TEST_KEY", backoff=0.0, client=client)
    with pytest.raises(BackendError, match="HTTP 400"):
        b.complete([])
    assert len(client.bodies) == 1


def test_wire_backend_gives_up(monkeypatch):
    monkeypatch.setenv("TEST_KEY", "k")
    client = _FakeClient([_Resp(500)] * 3)
    with pytest.raises(BackendError):
        WireBackend("http://x", "m", key_env="TEST_KEY", retries=2, backoff=0.0, client=client).complete([])


def test_wire_backend_needs_key(monkeypatch):
    monkeypatch.delenv("TEST_KEY", raising=False)
    with pytest.raises(BackendError, match="TEST_KEY"):
        WireBackend("http://x", "m", key_env="TEST_KEY", client=_FakeClient([])).complete([])


def test_replay_backend_file(tmp_path):
    p = tmp_path / "r.json"
    p.write_text(json.dumps({"responses": ["a", "b"]}))
    b = ReplayBackend.from_file(p)
    assert [b.complete([]), b.complete([])] == ["a", "b"]
    with pytest.raises(FixtureExhausted):
        b.complete([])
    p.write_text("{")
    with pytest.raises(BackendError):
        ReplayBackend.from_file(p)


def test_episodes_do_not_share_backend_state(problem):
    a = ReplayBackend([RUNNING_SECOND])
    b = ReplayBackend([RUNNING_SECOND])
    run_proc3s(problem, a, CFG)
    assert b.calls == 0
    assert run_proc3s(problem, b, CFG).success
