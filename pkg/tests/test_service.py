import json
import threading
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor

import pytest

from setproof.feedback import report_json
from setproof.goldens import golden_texts, mutations
from setproof.pipeline import check_text
from setproof.service import make_server


@pytest.fixture(scope="module")
def service_url():
    server = make_server(port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()
    server.server_close()


def post_check(url, payload):
    req = urllib.request.Request(
        f"{url}/check", data=json.dumps(payload).encode("utf-8"),
        headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read().decode("utf-8"))
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read().decode("utf-8"))


def test_health(service_url):
    with urllib.request.urlopen(f"{service_url}/health") as resp:
        assert resp.status == 200
        assert json.loads(resp.read()) == {"status": "ok"}


def test_grammar_summary(service_url):
    with urllib.request.urlopen(f"{service_url}/grammar") as resp:
        payload = json.loads(resp.read())
    cues = payload["cues"]
    assert {"assumption", "claim", "goal", "declaration", "annotation"} <= set(cues)
    assert any(c.startswith("Suppose that") for c in cues["assumption"])
    assert any(c.startswith("We will now show that") for c in cues["goal"])
    assert any(c.startswith("Let") for c in cues["declaration"])


def test_check_golden_text(service_url):
    status, payload = post_check(service_url, {"text": golden_texts()[0].text})
    assert status == 200
    assert payload["verdict"] == "Accepted"


def test_check_missing_text_is_400(service_url):
    status, payload = post_check(service_url, {})
    assert status == 400
    assert payload["code"] == "MISSING_TEXT"
    assert "message" in payload


def test_response_matches_cli_json_byte_for_byte(service_url):
    text = mutations()[0].text
    status, payload = post_check(service_url, {"text": text})
    assert status == 200
    local = check_text(text)
    assert json.dumps(payload, ensure_ascii=False, indent=2) == report_json(local)


def test_unknown_endpoint_404(service_url):
    try:
        urllib.request.urlopen(f"{service_url}/nope")
        assert False, "expected 404"
    except urllib.error.HTTPError as exc:
        assert exc.code == 404


def test_concurrent_checks_are_independent(service_url):
    texts = [g.text for g in golden_texts()] + [m.text for m in mutations()[:7]]
    expected = [check_text(t).verdict for t in texts]

    def call(text):
        return post_check(service_url, {"text": text})[1]["verdict"]

    with ThreadPoolExecutor(max_workers=10) as pool:
        got = list(pool.map(call, texts))
    assert got == expected


def test_request_order_permutation_no_shared_state(service_url):
    texts = [m.text for m in mutations()[:5]]
    expected = [check_text(t).verdict for t in texts]
    for shift in range(len(texts)):
        order = texts[shift:] + texts[:shift]
        want = expected[shift:] + expected[:shift]
        got = [post_check(service_url, {"text": t})[1]["verdict"] for t in order]
        assert got == want
