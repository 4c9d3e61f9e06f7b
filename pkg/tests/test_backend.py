import json

import httpx
import pytest

import prompts.templates as templates
from backend import make_backend, rules
from backend.base import CompletionRequest, task_tag_of
from backend.parsing import pairs_dict, parse_block, parse_int, parse_tagged_field
from backend.remote import RemoteBackend, request_body
from backend.scripted import ScriptedBackend
from conftest import fixture_path
from domain.errors import BackendUnavailable, FieldMissing, RemoteError, UnknownTaskTag
from prompts.templates import PromptTemplate
from settings import BackendConfig

RATE_TEXT = "#TASK: RATE\nITEM: 1 | Heat | Action; Crime\nReply with RATING: <1-5>"


def _rate_request():
    return CompletionRequest(system_text="You play a movie fan.", user_text=RATE_TEXT,
                             task_tag="RATE", seed=3)


def _all_templates():
    return [value for value in vars(templates).values() if isinstance(value, PromptTemplate)]


def test_every_template_has_one_task_line():
    found = _all_templates()
    assert len(found) == 14
    for template in found:
        assert template.text.count("#TASK:") == 1
        assert template.text.startswith(f"#TASK: {template.task_tag}\n")


def test_request_needs_matching_task_line():
    with pytest.raises(ValueError):
        CompletionRequest(system_text="", user_text="#TASK: ACT\n...", task_tag="RATE")
    with pytest.raises(UnknownTaskTag):
        CompletionRequest(system_text="", user_text="#TASK: DANCE\n", task_tag="DANCE")
    with pytest.raises(ValueError):
        CompletionRequest(system_text="", user_text=RATE_TEXT, task_tag="RATE", temperature=3.0)


def test_task_tag_of():
    assert task_tag_of(RATE_TEXT) == "RATE"
    with pytest.raises(UnknownTaskTag):
        task_tag_of("no tag here")


def test_field_parsing():
    text = "- RATING: 4\nREASON: good\nHISTORY:\n- a | b | c\n- d | e | f\n\nNEXT: x"
    assert parse_int(text, "RATING") == 4
    assert parse_tagged_field(text, "REASON") == "good"
    assert parse_block(text, "HISTORY") == ["a | b | c", "d | e | f"]
    assert pairs_dict("O=1, c=3") == {"o": "1", "c": "3"}
    with pytest.raises(FieldMissing):
        parse_tagged_field(text, "ACTION")


def test_rules():
    assert [rules.rating_rule(x) for x in (0.0, 0.125, 0.5, 1.0)] == [1, 2, 3, 5]
    assert rules.appraise_rule(0.34) == "WATCH"
    assert rules.appraise_rule(0.33) == "SKIP"
    assert rules.interview_rule(0.5) == 6
    assert rules.overlap_fraction(["Comedy", "Sci-Fi"], "comedy, drama") == 0.5
    assert rules.internal_state_rule(0.0, 0.0, 4, 2, 3, 1.0) == pytest.approx((0.2, 0.7, 0.3))
    assert rules.recall_bar([]) == rules.WATCH_THRESHOLD
    assert rules.recall_bar([1.0, 0.0]) == pytest.approx(0.64)
    assert rules.recall_bar([1.0, 0.0, 0.0, 0.2, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0]) == pytest.approx(0.88)


def test_scripted_is_referentially_transparent():
    backend = ScriptedBackend()
    text = ("#TASK: RATE\nPERSONA:\nPREFERENCES: Comedy, Romance\n"
            "ITEM: 5 | Annie Hall | Comedy; Romance")
    request = CompletionRequest(system_text="", user_text=text, task_tag="RATE", seed=1)
    first = backend.complete(request)
    assert first == backend.complete(request)
    assert parse_int(first.text, "RATING") == 5


def test_scripted_classify_membership_and_overlap():
    text = ("#TASK: CLASSIFY\nPREFERENCES: Horror\nMEMORY_ITEMS: 1, 2\n"
            "CANDIDATES:\n- 1 | Heat | Action\n- 8 | Psycho | Horror\n")
    request = CompletionRequest(system_text="", user_text=text, task_tag="CLASSIFY")
    membership = ScriptedBackend().complete(request).text
    overlap = ScriptedBackend("overlap").complete(request).text
    assert membership == "CLASSIFICATION: 1=Interacted, 8=Not Interacted"
    assert overlap == "CLASSIFICATION: 1=Not Interacted, 8=Interacted"


def test_make_backend_defaults_to_scripted():
    assert isinstance(make_backend(BackendConfig()), ScriptedBackend)


def test_request_body_matches_golden():
    with open(fixture_path("rate_request.json"), encoding="utf-8") as f:
        golden = json.load(f)
    assert request_body("contextsim-policy", _rate_request()) == golden


def _reply(text="RATING: 4"):
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}],
                                     "usage": {"completion_tokens": 3}})


def _remote(handler, **kwargs):
    client = httpx.Client(transport=httpx.MockTransport(handler))
    return RemoteBackend("http://sim.test/v1", "contextsim-policy", api_key="test-key",
                         http_client=client, sleep=lambda seconds: None, **kwargs)


def test_remote_posts_the_prompt_untouched():
    seen = []

    def handler(request):
        seen.append((request.url.path, json.loads(request.content)))
        return _reply()

    response = _remote(handler).complete(_rate_request())
    assert (response.text, response.token_estimate, response.backend_name) == ("RATING: 4", 3, "http")
    path, body = seen[0]
    assert path == "/v1/chat/completions"
    assert body == request_body("contextsim-policy", _rate_request())


def test_remote_retries_transient_errors():
    calls = []

    def handler(request):
        calls.append(1)
        return httpx.Response(503, json={"error": "busy"}) if len(calls) < 3 else _reply()

    assert _remote(handler, max_attempts=3).complete(_rate_request()).text == "RATING: 4"
    assert len(calls) == 3


def test_remote_gives_up_after_max_attempts():
    def handler(request):
        return httpx.Response(429, json={"error": "slow down"})

    with pytest.raises(BackendUnavailable):
        _remote(handler, max_attempts=2).complete(_rate_request())


def test_remote_does_not_retry_client_errors():
    calls = []

    def handler(request):
        calls.append(1)
        return httpx.Response(400, json={"error": "bad request"})

    with pytest.raises(RemoteError) as info:
        _remote(handler).complete(_rate_request())
    assert info.value.status == 400
    assert len(calls) == 1


def test_remote_rejects_empty_completion():
    with pytest.raises(RemoteError):
        _remote(lambda request: _reply("   ")).complete(_rate_request())
