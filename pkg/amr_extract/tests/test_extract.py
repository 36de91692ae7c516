import pytest

from amr_extract.backend import ArgumentFrame, Mention, StubParser
from amr_extract.extract import (
    assign_entity_types,
    extract_page,
    extract_triplets,
    is_content_entity,
)


def frame(pred, a0, t0, a1, t1):
    agent = Mention(a0, t0) if a0 is not None else None
    patient = Mention(a1, t1) if a1 is not None else None
    return ArgumentFrame(predicate=pred, agent=agent, patient=patient)


# --- content-entity filter -------------------------------------------------

def test_named_entities_are_content():
    assert is_content_entity(Mention("Mark Kelly", "PERSON"))
    assert is_content_entity(Mention("the Harbor Treaty", "LAW"))


def test_pronouns_are_not_content():
    for text in ("He", "them", "she", "It", "themselves", "this"):
        assert not is_content_entity(Mention(text, "PERSON")), text


def test_numerals_are_not_content():
    for text in ("1200", "3.5", "1,200", "2019", "52%", "4th"):
        assert not is_content_entity(Mention(text, "NUMBER")), text


def test_placeholders_are_not_content():
    for text in ("someone", "Everything", "people", "the others", "nobody"):
        assert not is_content_entity(Mention(text, "PERSON")), text


def test_untyped_or_empty_mentions_are_not_content():
    assert not is_content_entity(Mention("Mark Kelly", ""))
    assert not is_content_entity(Mention("  ", "PERSON"))


# --- single-sentence extraction ---------------------------------------------

KELLY = ("In October 2025, Kelly credited Trump for facilitating an "
         "Israel–Hamas deal.")


def test_kelly_sentence_yields_one_triplet():
    stub = StubParser({KELLY: (frame("ASCRIBE", "Mark Kelly", "PERSON",
                                     "Donald Trump", "PERSON"),)})
    records = extract_triplets(KELLY, stub, platform="human",
                               domain="us_politics", page="Mark Kelly",
                               sentence_index=1)
    assert len(records) == 1
    got = records[0]
    assert (got.predicate, got.arg0, got.arg1) == ("ASCRIBE", "Mark Kelly",
                                                   "Donald Trump")
    assert got.sentence_index == 1


def test_pronoun_arguments_yield_nothing():
    stub = StubParser({"He thanked them.": (frame("THANK", "He", "PERSON",
                                                  "them", "PERSON"),)})
    assert extract_triplets("He thanked them.", stub) == []


def test_unfilled_role_yields_nothing():
    stub = StubParser({"s": (frame("ACCUSE", None, None, "Mark Kelly", "PERSON"),)})
    assert extract_triplets("s", stub) == []


def test_empty_sentence_yields_empty_list():
    dead = StubParser({}, failures=[""])
    # the guard returns before the parser ever sees the sentence
    assert extract_triplets("", dead) == []
    assert extract_triplets("   ", dead) == []


def test_mixed_frames_keep_only_well_formed():
    stub = StubParser({"s": (
        frame("PRAISE", "Ada", "PERSON", "Grace", "PERSON"),
        frame("THANK", "She", "PERSON", "Grace", "PERSON"),
        frame("REVIEW", "Panel", "ORG", "1200", "NUMBER"),
    )})
    records = extract_triplets("s", stub)
    assert [r.predicate for r in records] == ["PRAISE"]


# --- modal entity typing ----------------------------------------------------

def test_modal_type_is_most_frequent():
    got = assign_entity_types(["PERSON", "PERSON", "ORG"])
    assert got.entity_type == "PERSON" and not got.tied


def test_single_occurrence():
    got = assign_entity_types(["GPE"])
    assert got.entity_type == "GPE" and not got.tied


def test_tie_breaks_lexicographically_and_flags():
    got = assign_entity_types(["PERSON", "ORG"])
    assert got.entity_type == "ORG"
    assert got.tied


def test_no_occurrences_is_an_error():
    with pytest.raises(ValueError):
        assign_entity_types([])


# --- page-level extraction ---------------------------------------------------

def test_parse_failure_skips_sentence_but_not_page():
    text = "Ada praised Grace. The parser chokes here. Grace thanked Ada."
    stub = StubParser(
        {
            "Ada praised Grace.": (frame("PRAISE", "Ada", "PERSON",
                                         "Grace", "PERSON"),),
            "Grace thanked Ada.": (frame("THANK", "Grace", "PERSON",
                                         "Ada", "PERSON"),),
        },
        failures=["The parser chokes here."],
    )
    result = extract_page(text, stub, platform="human",
                          domain="us_politics", page="Ada Lovelace")
    assert [r.predicate for r in result.records] == ["PRAISE", "THANK"]
    assert result.n_sentences == 3
    assert result.n_parse_failures == 1
    # sentence indices reflect segmentation, including the skipped sentence
    assert [r.sentence_index for r in result.records] == [0, 2]


def test_dropped_frames_are_tallied():
    text = "Ada praised Grace. He thanked them."
    stub = StubParser({
        "Ada praised Grace.": (frame("PRAISE", "Ada", "PERSON",
                                     "Grace", "PERSON"),),
        "He thanked them.": (frame("THANK", "He", "PERSON", "them", "PERSON"),),
    })
    result = extract_page(text, stub, platform="human",
                          domain="us_politics", page="Ada Lovelace")
    assert result.n_dropped_frames == 1
    assert len(result.records) == 1
