"""End-to-end pipeline runs over the bundled demo corpus, plus exit codes.

Everything here goes through ``wikigrok.cli.main`` in-process, exactly as the
console script would call it, against the checked-in synthetic corpus at
tests/fixtures/demo_corpus and the deterministic mock chat endpoint.
"""

import json
from pathlib import Path

import pytest

from wikigrok.cli import main
from wikigrok.synth import generate_corpus


def run(*argv) -> int:
    return main([str(a) for a in argv])


def run_pipeline(demo: Path, out: Path, endpoint: str) -> None:
    cfg = demo / "pipeline.cfg"
    steps = [
        ("--config", cfg, "ingest",
         "--grok-dir", demo / "grok",
         "--pageviews", demo / "pageviews.txt",
         "--revisions", demo / "revisions.tsv",
         "--edits-dir", demo / "edit_requests",
         "--wiki-titles", demo / "wiki_titles.txt",
         "--out", out),
        ("features", "--ingest-dir", out, "--references", demo / "references.tsv"),
        ("fit-inclusion", "--features", out / "features.tsv", "--ridge"),
        ("fit-rewrite", "--features", out / "features.tsv", "--ridge"),
        ("complexity", "--ingest-dir", out),
        ("narrative", "--triplets", demo / "triplets.tsv",
         "--aliases", demo / "aliases.tsv",
         "--page-context", demo / "page_context.tsv",
         "--out", out),
        ("framing", "--ingest-dir", out,
         "--wiki-articles", demo / "wiki_articles",
         "--grok-dir", demo / "grok",
         "--endpoint", endpoint,
         "--cache", out / "cache",
         "--out", out / "framing_scores.csv"),
        ("report", "--artifacts", out, "--leaning", demo / "leaning.tsv",
         "--out", out / "report"),
    ]
    for step in steps:
        rc = run(*step)
        assert rc == 0, f"stage {step[0] if step[0] != '--config' else step[2]} -> {rc}"


def tree_bytes(root: Path, skip_dirs=("cache",)) -> dict[str, bytes]:
    snapshot = {}
    for path in sorted(root.rglob("*")):
        if path.is_dir():
            continue
        relative = path.relative_to(root)
        if relative.parts[0] in skip_dirs:
            continue
        snapshot[str(relative)] = path.read_bytes()
    return snapshot


def read_csv(path: Path, delimiter=","):
    import csv

    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle, delimiter=delimiter))
    return rows[0], rows[1:]


@pytest.fixture(scope="session")
def pipeline(tmp_path_factory, demo_corpus, mock_endpoint) -> Path:
    out = tmp_path_factory.mktemp("pipeline_a")
    run_pipeline(demo_corpus, out, mock_endpoint)
    return out


# --- whole-pipeline behavior ---------------------------------------------------


def test_every_expected_artifact_exists(pipeline):
    expected = [
        "pages.tsv", "titles.tsv", "pageviews.tsv", "revisions.tsv",
        "edits.tsv", "unmatched.tsv", "diagnostics.json",
        "features.tsv",
        "coefficients_inclusion.csv", "coefficients_rewrite.csv",
        "complexity.csv", "fitness_human.csv", "fitness_generative.csv",
        "balances.csv", "displacements.csv", "graph_metrics.csv",
        "framing_scores.csv", "framing_excluded.tsv",
        "report/report_selection_shares.csv",
        "report/report_coefficients.csv",
        "report/report_editor_activity.csv",
        "report/report_complexity.csv",
        "report/report_displacements.csv",
        "report/report_graph_metrics.csv",
        "report/report_framing.csv",
        "report/report_correlations.csv",
    ]
    for name in expected:
        assert (pipeline / name).exists(), f"missing artifact {name}"
    # narrative edge lists come out per (domain, platform) slice
    for domain in ("us_politics", "geopolitics"):
        for platform in ("human", "generative"):
            assert (pipeline / f"edges_{domain}_{platform}.tsv").exists()


def test_two_runs_are_byte_identical(tmp_path_factory, demo_corpus,
                                     mock_endpoint, pipeline):
    out_b = tmp_path_factory.mktemp("pipeline_b")
    run_pipeline(demo_corpus, out_b, mock_endpoint)
    first = tree_bytes(pipeline)
    second = tree_bytes(out_b)
    assert first.keys() == second.keys()
    different = [name for name in first if first[name] != second[name]]
    assert different == []


def test_synth_regenerates_the_checked_in_corpus(tmp_path, demo_corpus):
    # guards fixture drift: changing the generator without refreshing the
    # fixture (or vice versa) must fail loudly
    regenerated = tmp_path / "corpus"
    generate_corpus(42, regenerated)
    first = tree_bytes(demo_corpus, skip_dirs=())
    second = tree_bytes(regenerated, skip_dirs=())
    assert first.keys() == second.keys()
    different = [name for name in first if first[name] != second[name]]
    assert different == []


# --- per-stage output shape ------------------------------------------------------


def test_ingest_diagnostics_account_for_every_line(pipeline):
    diagnostics = json.loads((pipeline / "diagnostics.json").read_text())
    for stream in ("pageviews", "revisions"):
        d = diagnostics[stream]
        assert d["parsed"] + d["filtered"] + d["skipped"] == d["total_lines"]
        assert d["skipped"] > 0  # the corpus plants malformed lines on purpose
    assert diagnostics["pairings"] == 18
    assert diagnostics["edit_requests"]["kept"] > 0
    assert diagnostics["edit_requests"]["outside_window"] > 0


def test_ingest_page_statuses(pipeline):
    header, rows = read_csv(pipeline / "pages.tsv", delimiter="\t")
    assert header == ["slug", "title", "status", "matched"]
    matched = [r for r in rows if r[3] == "1"]
    statuses = {}
    for row in matched:
        statuses[row[2]] = statuses.get(row[2], 0) + 1
    assert statuses == {"Missing": 2, "Verbatim": 6, "Rewritten": 10}
    unmatched_header, unmatched = read_csv(pipeline / "unmatched.tsv", delimiter="\t")
    kinds = {row[0] for row in unmatched}
    assert kinds == {"title", "slug"}  # extras planted on both sides


def test_features_outcomes_follow_page_status(pipeline):
    _, pages = read_csv(pipeline / "pages.tsv", delimiter="\t")
    status_by_title = {r[1]: r[2] for r in pages if r[3] == "1"}
    header, rows = read_csv(pipeline / "features.tsv", delimiter="\t")
    assert header == [
        "title", "views_raw", "references_raw", "edits_raw", "reverts_raw",
        "views_level", "references_level", "edits_level", "reverts_level",
        "included", "rewritten",
    ]
    for row in rows:
        title, included, rewritten = row[0], row[9], row[10]
        status = status_by_title.get(title)
        if status in ("Verbatim", "Rewritten"):
            assert included == "1"
            assert rewritten == ("1" if status == "Rewritten" else "0")
        else:
            assert included == "0"
            assert rewritten == ""
        assert row[5] in ("Low", "Mid", "High", "VeryHigh")


def test_fit_outputs_are_well_formed(pipeline, capsys):
    for name in ("coefficients_inclusion.csv", "coefficients_rewrite.csv"):
        header, rows = read_csv(pipeline / name)
        assert header == ["label", "estimate", "std_error", "z_value", "p_value"]
        assert rows[0][0] == "intercept"
        for row in rows:
            estimate, se, z, p = map(float, row[1:])
            assert se >= 0.0
            assert 0.0 <= p <= 1.0


def test_complexity_rank_deltas_are_consistent(pipeline):
    header, rows = read_csv(pipeline / "complexity.csv")
    assert header == ["page", "complexity_a", "complexity_b",
                      "rank_a", "rank_b", "rank_delta"]
    assert rows, "no eligible paired pages in the fixture"
    for row in rows:
        assert float(row[3]) - float(row[4]) == pytest.approx(float(row[5]))
    # both platform fits produced per-editor fitness tables
    for name in ("fitness_human.csv", "fitness_generative.csv"):
        fit_header, fit_rows = read_csv(pipeline / name)
        assert fit_header == ["editor", "fitness"]
        assert fit_rows


def test_narrative_balances_and_displacements(pipeline):
    header, rows = read_csv(pipeline / "balances.csv")
    assert header == ["domain", "platform", "node", "ds_out", "ds_in",
                      "sentiment_mass"]
    for row in rows:
        for cell in (row[3], row[4]):
            if cell != "":
                assert -1.0 <= float(cell) <= 1.0

    header, rows = read_csv(pipeline / "displacements.csv")
    assert header == ["domain", "node", "d_out", "d_in", "complete"]
    by_key = {(r[0], r[1]): r for r in rows}
    # the corpus plants one opposite-signed hub per domain
    vex = by_key[("us_politics", "Adrian Vex")]
    assert float(vex[2]) == pytest.approx(-1.0)
    assert vex[4] == "1"
    sable = by_key[("geopolitics", "Sable Republic")]
    assert float(sable[2]) == pytest.approx(-1.2)
    assert sable[4] == "1"


def test_narrative_graph_metrics_table(pipeline):
    header, rows = read_csv(pipeline / "graph_metrics.csv")
    assert header == ["domain", "platform", "polarity", "edge_density",
                      "degree_gini", "reciprocity", "cycle_count"]
    polarities = {row[2] for row in rows}
    assert polarities == {"Supportive", "Conflictive", "Neutral"}
    for row in rows:
        assert 0.0 <= float(row[3]) <= 1.0
        assert 0.0 <= float(row[5]) <= 1.0
        assert int(row[6]) >= 0


def test_framing_scores_and_exclusions(pipeline):
    header, rows = read_csv(pipeline / "framing_scores.csv")
    assert header == ["page", "platform", "laudatory", "conflict", "n", "unscored"]
    assert len(rows) == 29
    for row in rows:
        assert row[1] in ("human", "generative")
        assert 0.0 <= float(row[2]) <= 1.0
        assert 0.0 <= float(row[3]) <= 1.0
        assert int(row[5]) == 0  # the mock endpoint always conforms

    _, excluded = read_csv(pipeline / "framing_excluded.tsv", delimiter="\t")
    assert {(r[0], r[1]) for r in excluded} == {
        ("Elowen Park", "human"),
        ("Merrow Island", "human"),
        ("Northgate Tunnel", "generative"),
    }
    for row in excluded:
        assert "lead too short" in row[2] and "< 500" in row[2]


def test_report_correlations_frozen_values(pipeline):
    header, rows = read_csv(pipeline / "report" / "report_correlations.csv")
    assert header == ["quantity", "rho", "p_value", "n"]
    by_quantity = {r[0]: r for r in rows}
    # pinned from the checked-in corpus; any algorithm change must be deliberate
    assert by_quantity["complexity_rank"][1] == "0.6806091444"
    assert by_quantity["complexity_rank"][3] == "16"
    assert by_quantity["framing_laudatory"][3] == "13"
    assert by_quantity["framing_conflict"][3] == "13"


def test_report_selection_shares_are_fractions(pipeline):
    header, rows = read_csv(pipeline / "report" / "report_selection_shares.csv")
    assert header == ["factor", "level", "n_pages", "n_included",
                      "included_share", "n_rewritten", "rewritten_share"]
    factors = {row[0] for row in rows}
    assert factors == {"V", "E", "R", "Rv"}
    for row in rows:
        assert int(row[3]) <= int(row[2])
        if row[4] != "":
            assert 0.0 <= float(row[4]) <= 1.0


# --- exit codes and option resolution --------------------------------------------


def test_no_subcommand_prints_help_and_fails(capsys):
    assert main([]) == 1
    assert "SUBCOMMAND" in capsys.readouterr().err


def test_unknown_subcommand_and_flag_are_usage_errors(capsys):
    assert run("frobnicate") == 1
    assert run("features", "--no-such-flag") == 1
    err = capsys.readouterr().err
    assert "usage error" in err


def test_missing_required_option_is_a_usage_error(tmp_path, demo_corpus, capsys):
    rc = run("ingest", "--grok-dir", demo_corpus / "grok", "--out", tmp_path)
    assert rc == 1
    assert "required (flag or config)" in capsys.readouterr().err


def test_missing_artifact_names_the_producing_stage(tmp_path, capsys):
    assert run("features", "--ingest-dir", tmp_path) == 2
    assert "run ingest first" in capsys.readouterr().err
    assert run("report", "--artifacts", tmp_path, "--out", tmp_path / "r") == 2
    assert "run features first" in capsys.readouterr().err
    assert run("fit-inclusion", "--features", tmp_path / "features.tsv") == 2
    assert "run features first" in capsys.readouterr().err


def test_unreachable_endpoint_is_a_transport_error(pipeline, demo_corpus,
                                                   tmp_path, capsys):
    rc = run("framing", "--ingest-dir", pipeline,
             "--wiki-articles", demo_corpus / "wiki_articles",
             "--grok-dir", demo_corpus / "grok",
             "--endpoint", "http://127.0.0.1:9/api/chat",
             "--cache", tmp_path / "cache",
             "--out", tmp_path / "scores.csv", "--retries", 1)
    assert rc == 3
    assert "transport error" in capsys.readouterr().err


def test_fetch_error_paths(tmp_path, capsys):
    assert run("fetch", "--sitemap", tmp_path / "absent.xml",
               "--out", tmp_path / "snaps") == 2
    assert run("fetch", "--sitemap", "http://127.0.0.1:9/sitemap.xml",
               "--out", tmp_path / "snaps") == 3
    err = capsys.readouterr().err
    assert "transport error" in err


def test_missing_config_file_is_a_data_error(capsys):
    assert run("--config", "/nonexistent/pipeline.cfg", "features") == 2
    assert "missing config file" in capsys.readouterr().err


def test_flag_overrides_config_value(tmp_path, demo_corpus):
    cfg = tmp_path / "month-off.cfg"
    # the config month is syntactically valid but matches no fixture data;
    # the flag must win or ingest would produce zero pageview records
    base = (demo_corpus / "pipeline.cfg").read_text(encoding="utf-8")
    cfg.write_text(base.replace("month = 2025-11", "month = 1999-01"),
                   encoding="utf-8")
    out = tmp_path / "out"
    rc = run("--config", cfg, "ingest", "--month", "2025-11",
             "--grok-dir", demo_corpus / "grok",
             "--pageviews", demo_corpus / "pageviews.txt",
             "--revisions", demo_corpus / "revisions.tsv",
             "--out", out)
    assert rc == 0
    _, view_rows = read_csv(out / "pageviews.tsv", delimiter="\t")
    assert view_rows  # the flag month found the fixture's traffic


def test_boolean_option_can_come_from_config(tmp_path, demo_corpus, pipeline):
    cfg = tmp_path / "ridge.cfg"
    cfg.write_text("ridge = true\n", encoding="utf-8")
    out_cfg = tmp_path / "from_config.csv"
    out_flag = tmp_path / "from_flag.csv"
    features = pipeline / "features.tsv"
    assert run("--config", cfg, "fit-inclusion", "--features", features,
               "--out", out_cfg) == 0
    assert run("fit-inclusion", "--features", features, "--ridge",
               "--out", out_flag) == 0
    assert out_cfg.read_bytes() == out_flag.read_bytes()
