"""Lead extraction, sentence splitting, and the annotation client."""

import json
import threading

import pytest

from wikigrok.fileio import TransportError
from wikigrok.framing import (
    CONFLICT_KEY,
    LAUDATORY_KEY,
    ClientConfig,
    LeadSection,
    RESPONSE_SCHEMA,
    SentenceAnnotation,
    annotate_sentences,
    build_request,
    cache_key,
    extract_lead,
    framing_score,
    split_sentences,
    _parse_labels,
)
from wikigrok.mockllm import labels_for


def ok_reply(sentence_labels):
    return {"message": {"content": json.dumps(sentence_labels)}}


def sentence_of(payload):
    return payload["messages"][0]["content"].split("Text: ", 1)[1]


class CountingTransport:
    """Scripted fake endpoint; records how many requests each sentence made."""

    def __init__(self, script=None):
        self.script = script or {}
        self.calls = []
        self._lock = threading.Lock()

    def __call__(self, url, payload, timeout):
        sentence = sentence_of(payload)
        with self._lock:
            self.calls.append(sentence)
            n_prior = self.calls.count(sentence) - 1
        behavior = self.script.get(sentence, "ok")
        if callable(behavior):
            return behavior(n_prior)
        if behavior == "ok":
            return ok_reply({LAUDATORY_KEY: 1, CONFLICT_KEY: 0})
        if behavior == "garbage":
            return {"message": {"content": "not json at all"}}
        if behavior == "http_error":
            return {"_http_status": 500}
        if behavior == "raise":
            raise TransportError("endpoint unreachable: scripted failure")
        raise AssertionError(f"unknown behavior {behavior!r}")


# --- lead extraction ---------------------------------------------------------


def test_extract_lead_wikitext_stops_at_first_heading():
    article = "Intro paragraph one.\n\nMore intro.\n\n== History ==\nBody text.\n"
    lead = extract_lead(article, "wikitext", title="T", platform="human")
    assert lead.text == "Intro paragraph one.\n\nMore intro."
    assert lead.char_count == len(lead.text)
    assert lead.title == "T" and lead.platform == "human"


def test_extract_lead_wikitext_heading_requires_line_start():
    article = "An == inline pair == is prose.\n  == Indented heading ==\nrest"
    lead = extract_lead(article, "wikitext")
    assert lead.text == "An == inline pair == is prose."


def test_extract_lead_html_strips_tags():
    article = ("<nav>menu</nav><p>First <b>bold</b> paragraph.</p>"
               "<h2>Background</h2><p>body</p>")
    lead = extract_lead(article, "html")
    assert lead.text == "menu First bold paragraph."


def test_extract_lead_without_heading_takes_everything():
    assert extract_lead("Only prose here.", "wikitext").text == "Only prose here."
    assert extract_lead("<p>Only prose.</p>", "html").text == "Only prose."


def test_extract_lead_starting_with_heading_is_empty_and_ineligible():
    lead = extract_lead("== History ==\nAll body.", "wikitext")
    assert lead.text == ""
    assert not lead.eligible()


def test_extract_lead_errors():
    with pytest.raises(ValueError):
        extract_lead("", "wikitext")
    with pytest.raises(ValueError):
        extract_lead("text", "markdown")


def test_lead_eligibility_threshold_is_inclusive():
    assert LeadSection("t", "p", "x" * 500, 500).eligible()
    assert not LeadSection("t", "p", "x" * 499, 499).eligible()
    assert LeadSection("t", "p", "x" * 120, 120).eligible(min_chars=100)


# --- sentence splitting ------------------------------------------------------


def test_split_single_capitals_are_sentence_ends():
    assert split_sentences("A. B? C!") == ["A.", "B?", "C!"]


def test_split_guards_abbreviations_and_decimals():
    assert split_sentences("Dr. Smith spoke. He left.") == [
        "Dr. Smith spoke.", "He left."]
    assert split_sentences("Pi is 3.14159 rounded. Next topic.") == [
        "Pi is 3.14159 rounded.", "Next topic."]
    assert split_sentences("Costs rose approx. 4.2 percent. Then fell.") == [
        "Costs rose approx. 4.2 percent.", "Then fell."]


def test_split_requires_uppercase_digit_or_opener_after_boundary():
    assert split_sentences("It works. but only sometimes. Really.") == [
        "It works. but only sometimes.", "Really."]
    assert split_sentences("Out now. 7 copies left.") == ["Out now.", "7 copies left."]
    assert split_sentences('She refused. "Never," she added.') == [
        "She refused.", '"Never," she added.']
    # "no" is guarded (the "No. 5" numbering form), so this never splits
    assert split_sentences('She said no. "Never," she added.') == [
        'She said no. "Never," she added.']


def test_split_absorbs_closing_quotes_and_ellipses():
    assert split_sentences('He said "Stop." Then he ran.') == [
        'He said "Stop."', "Then he ran."]
    assert split_sentences("It faded... Nothing more.") == [
        "It faded...", "Nothing more."]


def test_split_ignores_mid_token_punctuation():
    assert split_sentences("See example.com for details. Next point.") == [
        "See example.com for details.", "Next point."]


def test_split_empty_and_reconstruction_property():
    assert split_sentences("") == []
    assert split_sentences("   \n ") == []
    text = ("The U.S. delegation met Dr. Chen at 9.30 sharp. Talks covered "
            'approx. 12 items... "We agreed," she said. Was it enough? '
            "Observers counted 3.5 hours. Yes.")
    pieces = split_sentences(text)
    assert len(pieces) == 6
    assert "".join("".join(p.split()) for p in pieces) == "".join(text.split())


# --- request/response plumbing ------------------------------------------------


def test_build_request_shape():
    config = ClientConfig(endpoint="http://x", model="gemma3:4b", transport=lambda *a: {})
    request = build_request(config, "A test sentence.")
    assert request["model"] == "gemma3:4b"
    assert request["options"]["temperature"] == 0.0
    assert request["stream"] is False
    assert request["format"] == RESPONSE_SCHEMA
    assert request["messages"][0]["content"].endswith("Text: A test sentence.")


def test_parse_labels_is_strict():
    good = json.dumps({LAUDATORY_KEY: 1, CONFLICT_KEY: 0})
    assert _parse_labels(good) == (1, 0)
    bad = [
        "not json",
        json.dumps([1, 0]),
        json.dumps({LAUDATORY_KEY: 1}),                                  # missing key
        json.dumps({LAUDATORY_KEY: 1, CONFLICT_KEY: 0, "extra": 1}),     # extra key
        json.dumps({LAUDATORY_KEY: 2, CONFLICT_KEY: 0}),                 # out of range
        json.dumps({LAUDATORY_KEY: "1", CONFLICT_KEY: 0}),               # string
        json.dumps({LAUDATORY_KEY: True, CONFLICT_KEY: 0}),              # boolean
        json.dumps({LAUDATORY_KEY: 1.0, CONFLICT_KEY: 0}),               # float
    ]
    for content in bad:
        assert _parse_labels(content) is None, content


def test_cache_key_depends_on_sentence_and_model():
    a = ClientConfig(endpoint="http://x", model="m1", transport=lambda *a: {})
    b = ClientConfig(endpoint="http://x", model="m2", transport=lambda *a: {})
    assert cache_key(a, "s1") == cache_key(a, "s1")
    assert cache_key(a, "s1") != cache_key(a, "s2")
    assert cache_key(a, "s1") != cache_key(b, "s1")


# --- annotation client ---------------------------------------------------------


def test_annotate_scores_and_deduplicates():
    transport = CountingTransport()
    config = ClientConfig(endpoint="http://fake", transport=transport, concurrency=1)
    sentences = ["One.", "Two.", "One."]
    out = annotate_sentences(config, sentences)
    assert [a.status for a in out] == ["Scored"] * 3
    assert out[0] == out[2]
    assert transport.calls.count("One.") == 1
    assert transport.calls.count("Two.") == 1


def test_annotate_retries_then_unscored():
    transport = CountingTransport(script={"Bad.": "garbage", "Flaky.": (
        lambda n: ok_reply({LAUDATORY_KEY: 0, CONFLICT_KEY: 1}) if n == 2
        else {"message": {"content": "{broken"}})})
    config = ClientConfig(endpoint="http://fake", transport=transport,
                          retries=3, concurrency=1)
    out = annotate_sentences(config, ["Good.", "Bad.", "Flaky."])
    by_sentence = {a.sentence: a for a in out}
    assert by_sentence["Good."].status == "Scored"
    assert by_sentence["Bad."].status == "Unscored"
    assert by_sentence["Bad."].laudatory is None
    # retries bound TOTAL attempts: exactly 3 requests, not 1 + 3
    assert transport.calls.count("Bad.") == 3
    # the flaky sentence succeeded on its third attempt
    assert by_sentence["Flaky."].status == "Scored"
    assert by_sentence["Flaky."].conflict == 1
    assert transport.calls.count("Flaky.") == 3


def test_annotate_http_error_counts_as_attempt():
    transport = CountingTransport(script={"S.": "http_error"})
    config = ClientConfig(endpoint="http://fake", transport=transport,
                          retries=2, concurrency=1)
    out = annotate_sentences(config, ["S."])
    assert out[0].status == "Unscored"
    assert len(transport.calls) == 2


def test_annotate_cache_prevents_any_request(tmp_path):
    first = CountingTransport()
    config = ClientConfig(endpoint="http://fake", transport=first,
                          cache_dir=tmp_path, concurrency=1)
    sentences = ["Alpha.", "Beta."]
    got_first = annotate_sentences(config, sentences)
    assert len(first.calls) == 2
    assert len(list(tmp_path.glob("*.json"))) == 2

    def dead_transport(url, payload, timeout):
        raise AssertionError("cache miss: a request went out")

    rerun = ClientConfig(endpoint="http://fake", transport=dead_transport,
                         cache_dir=tmp_path, concurrency=1)
    got_second = annotate_sentences(rerun, sentences)
    assert got_second == got_first


def test_annotate_transport_failure_aborts_both_paths():
    for concurrency in (1, 4):
        transport = CountingTransport(script={"Down.": "raise"})
        config = ClientConfig(endpoint="http://fake", transport=transport,
                              concurrency=concurrency)
        with pytest.raises(TransportError):
            annotate_sentences(config, ["Down.", "Other."])


def test_annotate_accepts_openai_reply_shape():
    def openai_transport(url, payload, timeout):
        content = json.dumps({LAUDATORY_KEY: 0, CONFLICT_KEY: 1})
        return {"choices": [{"message": {"content": content}}]}

    config = ClientConfig(endpoint="http://fake", transport=openai_transport,
                          concurrency=1)
    out = annotate_sentences(config, ["Any."])
    assert out[0] == SentenceAnnotation("Any.", 0, 1, "Scored")


def test_annotate_concurrent_run_is_complete_and_ordered():
    transport = CountingTransport()
    config = ClientConfig(endpoint="http://fake", transport=transport, concurrency=4)
    sentences = [f"Sentence {i}." for i in range(20)]
    out = annotate_sentences(config, sentences)
    assert [a.sentence for a in out] == sentences
    assert all(a.status == "Scored" for a in out)
    assert sorted(transport.calls) == sorted(sentences)
    assert annotate_sentences(config, []) == []


# --- aggregation ----------------------------------------------------------------


def eligible_lead(title="Page", platform="human"):
    return LeadSection(title=title, platform=platform, text="x" * 600, char_count=600)


def test_framing_score_fraction_arithmetic():
    annotations = [
        SentenceAnnotation("a", 1, 0, "Scored"),
        SentenceAnnotation("b", 0, 0, "Scored"),
        SentenceAnnotation("c", 1, 1, "Scored"),
        SentenceAnnotation("d", None, None, "Unscored"),
    ]
    score = framing_score(annotations, eligible_lead())
    assert score.laudatory_fraction == pytest.approx(2 / 3)
    assert score.conflict_fraction == pytest.approx(1 / 3)
    assert score.n_sentences == 4
    assert score.n_unscored == 1
    assert score.page == "Page" and score.platform == "human"


def test_framing_score_rejects_short_lead_and_unscorable_page():
    short = LeadSection("t", "p", "tiny", 4)
    with pytest.raises(ValueError, match="4 chars"):
        framing_score([SentenceAnnotation("a", 1, 0, "Scored")], short)
    with pytest.raises(ValueError, match="unscorable"):
        framing_score([SentenceAnnotation("a", None, None, "Unscored")],
                      eligible_lead())


# --- against the live mock endpoint ---------------------------------------------


def test_mock_endpoint_round_trip_is_deterministic(mock_endpoint, tmp_path):
    config = ClientConfig(endpoint=mock_endpoint, cache_dir=tmp_path / "c1")
    sentences = ["The dam was praised by engineers.",
                 "Critics disputed the budget figures.",
                 "It opened in 1931."]
    first = annotate_sentences(config, sentences)
    assert all(a.status == "Scored" for a in first)
    for annotation in first:
        expected = labels_for(annotation.sentence)
        assert annotation.laudatory == expected[LAUDATORY_KEY]
        assert annotation.conflict == expected[CONFLICT_KEY]
    fresh = ClientConfig(endpoint=mock_endpoint, cache_dir=tmp_path / "c2")
    assert annotate_sentences(fresh, sentences) == first
