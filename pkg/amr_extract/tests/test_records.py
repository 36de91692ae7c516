import pytest

from amr_extract.records import (
    ExtractionRecord,
    TRIPLET_FIELDS,
    read_manifest,
    render_triplet_file,
    validate_record,
    write_triplet_file,
)


def rec(page="Some Page", idx=0, **kwargs):
    base = dict(platform="human", domain="us_politics", page=page,
                sentence_index=idx, predicate="SAY", arg0="Ada", arg1="Grace",
                arg0_type="PERSON", arg1_type="PERSON")
    base.update(kwargs)
    return ExtractionRecord(**base)


def test_header_matches_contract():
    text = render_triplet_file([rec()])
    assert text.splitlines()[0] == "\t".join(TRIPLET_FIELDS)


def test_sentence_index_not_written():
    lines = render_triplet_file([rec(idx=7)]).splitlines()
    assert "7" not in lines[1].split("\t")
    assert len(lines[1].split("\t")) == len(TRIPLET_FIELDS)


def test_records_sorted_by_page_then_sentence():
    records = [rec(page="Beta", idx=2), rec(page="Alpha", idx=5),
               rec(page="Beta", idx=0)]
    lines = render_triplet_file(records).splitlines()[1:]
    pages = [line.split("\t")[2] for line in lines]
    assert pages == ["Alpha", "Beta", "Beta"]


def test_sort_is_stable_for_equal_keys():
    # same page+index on two platforms: input order is preserved
    records = [rec(platform="human", arg0="First"),
               rec(platform="generative", arg0="Second")]
    lines = render_triplet_file(records).splitlines()[1:]
    assert [line.split("\t")[4] for line in lines] == ["First", "Second"]


def test_validation_rejects_bad_values():
    with pytest.raises(ValueError, match="platform"):
        validate_record(rec(platform="martian"))
    with pytest.raises(ValueError, match="domain"):
        validate_record(rec(domain="baking"))
    with pytest.raises(ValueError, match="non-empty"):
        validate_record(rec(arg1=""))
    with pytest.raises(ValueError, match="non-empty"):
        validate_record(rec(predicate=""))
    with pytest.raises(ValueError, match="tab/newline"):
        validate_record(rec(arg0="bad\tvalue"))
    with pytest.raises(ValueError, match="sentence index"):
        validate_record(rec(idx=-1))


def test_write_creates_parents_and_is_loadable(tmp_path):
    out = tmp_path / "deep" / "nested" / "triplets.tsv"
    write_triplet_file(out, [rec()])
    assert out.exists()
    assert not list(out.parent.glob(".*"))  # no temp files left behind
    assert out.read_text(encoding="utf-8").startswith("platform\t")


def test_read_manifest(manifest_path):
    entries = read_manifest(manifest_path)
    assert len(entries) == 5
    assert {e.platform for e in entries} == {"human", "generative"}
    assert all(e.path.exists() for e in entries)


def test_read_manifest_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_manifest(tmp_path / "absent.tsv")
    bad = tmp_path / "m.tsv"
    bad.write_text("wrong\theader\n", encoding="utf-8")
    with pytest.raises(ValueError, match="expected columns"):
        read_manifest(bad)
    bad.write_text("platform\tdomain\tpage\tpath\n", encoding="utf-8")
    with pytest.raises(ValueError, match="no pages"):
        read_manifest(bad)
    bad.write_text("platform\tdomain\tpage\tpath\n"
                   "martian\tus_politics\tX\tx.txt\n", encoding="utf-8")
    with pytest.raises(ValueError, match="platform"):
        read_manifest(bad)
