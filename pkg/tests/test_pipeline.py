"""End-to-end pipeline tests: the bundled fixture plus crafted merge inputs."""

from __future__ import annotations

import pytest

from dcakit import pipeline
from dcakit.config import RunConfig
from dcakit.errors import ConfigError, DataError
from dcakit.reporting import fmt_full, roc_row

from conftest import FIXTURE_LABELS

@pytest.fixture(scope="module")
def analysis(fixture_config):
    return pipeline.analyse(fixture_config)


@pytest.fixture(scope="module")
def run_result(fixture_config):
    return pipeline.run(fixture_config)


class TestAnalyseFixture:
    def test_ranking(self, analysis):
        assert analysis.ranking.attributes == ("a1", "a2", "a3", "a4", "a5")

    def test_scores_descend(self, analysis):
        scores = analysis.ranking.scores
        assert all(a > b for a, b in zip(scores, scores[1:]))

    def test_no_merges(self, analysis):
        assert analysis.merge_decisions == ()

    def test_assignment(self, analysis):
        assert analysis.assignment.antigen == "a1"
        assert analysis.assignment.categories == {
            "Safe": ("a2",),
            "PAMP": ("a3", "a4"),
            "Danger": ("a5",),
        }
        assert analysis.assignment.inverted == frozenset({"a2"})

    def test_marker_kept_out_of_pca(self, analysis):
        assert analysis.attributes == ("a1", "a2", "a3", "a4", "a5")
        assert "marker" in analysis.normalised.names

    def test_pca_unchanged_without_merges(self, analysis):
        assert analysis.pca_final is analysis.pca_initial


class TestRunFixture:
    def test_boundaries_detected(self, run_result):
        result = run_result
        assert result.segment_map.boundaries == (100, 200, 300, 400, 500, 600)
        assert result.segment_map.n_seconds == 700
        assert result.segment_map.labels == FIXTURE_LABELS

    def test_one_score_per_second(self, run_result):
        result = run_result
        assert len(result.series) == 700

    def test_default_grid_size(self, run_result):
        result = run_result
        assert len(result.thresholds) == 41
        assert len(result.curve.results) == 41

    def test_default_delta(self, run_result):
        result = run_result
        assert result.delta == pytest.approx(0.15)

    def test_separates_segments(self, run_result):
        result = run_result
        assert result.curve.auc >= 0.999

    def test_a_threshold_hits_all_anomalies_cleanly(self, run_result):
        result = run_result
        good = [
            r
            for r in result.curve.results
            if r.tp_rate == 1.0 and r.fp_rate <= 0.25
        ]
        assert good


class TestMerging:
    def test_duplicated_pair_merges_once(self, duplicated_pair_csv):
        result = pipeline.analyse(RunConfig(input=duplicated_pair_csv))
        assert len(result.merge_decisions) == 1
        decision = result.merge_decisions[0]
        assert decision.pair == ("foot_gsr", "hand_gsr")
        assert decision.similarity == pytest.approx(1.0)
        assert decision.p_value == pytest.approx(1.0)
        assert decision.applied

    def test_merged_name_is_common_trailing_token(self, duplicated_pair_csv):
        result = pipeline.analyse(RunConfig(input=duplicated_pair_csv))
        assert result.merge_decisions[0].merged_name == "gsr"
        assert result.attributes == ("gsr", "hr", "resp", "emg")

    def test_pca_rerun_after_merge(self, duplicated_pair_csv):
        result = pipeline.analyse(RunConfig(input=duplicated_pair_csv))
        assert result.pca_final is not result.pca_initial
        assert result.pca_final.attributes == ("gsr", "hr", "resp", "emg")
        assert result.pca_initial.attributes == (
            "foot_gsr",
            "hand_gsr",
            "hr",
            "resp",
            "emg",
        )

    def test_triple_merges_only_first_pair(self, triple_csv):
        result = pipeline.analyse(RunConfig(input=triple_csv))
        applied = [d for d in result.merge_decisions if d.applied]
        skipped = [d for d in result.merge_decisions if not d.applied]
        assert len(applied) == 1
        assert applied[0].pair == ("a", "b")
        assert applied[0].merged_name == "a+b"
        assert {d.pair for d in skipped} == {("a", "c"), ("b", "c")}
        assert all(d.note == "member already merged" for d in skipped)
        assert result.attributes == ("a+b", "c", "d", "e")

    def test_gate_above_keeps_similar_distributions(self, duplicated_pair_csv):
        # Identical columns tie on every rank, so the rank-sum p is 1.
        config = RunConfig(
            input=duplicated_pair_csv, merge_p_mode="above", merge_p_level=0.05
        )
        result = pipeline.analyse(config)
        assert result.merge_decisions[0].applied

    def test_gate_below_rejects_similar_distributions(self, duplicated_pair_csv):
        config = RunConfig(
            input=duplicated_pair_csv, merge_p_mode="below", merge_p_level=0.05
        )
        result = pipeline.analyse(config)
        decision = result.merge_decisions[0]
        assert not decision.applied
        assert decision.note == "rank-sum p not below gate 0.05"
        assert result.attributes == (
            "foot_gsr",
            "hand_gsr",
            "hr",
            "resp",
            "emg",
        )


class TestManualMapping:
    def test_mapping_applied_and_merges_suspended(self, duplicated_pair_csv):
        config = RunConfig(
            input=duplicated_pair_csv,
            manual_map={
                "antigen": ("hr",),
                "PAMP": ("foot_gsr",),
                "Danger": ("hand_gsr",),
                "Safe": ("resp",),
            },
        )
        result = pipeline.analyse(config)
        assert result.assignment.antigen == "hr"
        assert result.assignment.categories == {
            "Safe": ("resp",),
            "PAMP": ("foot_gsr",),
            "Danger": ("hand_gsr",),
        }
        assert result.assignment.inverted == frozenset({"resp"})
        decision = result.merge_decisions[0]
        assert not decision.applied
        assert decision.note == "manual mapping active"
        assert len(result.attributes) == 5

    def test_unknown_attribute_rejected(self, duplicated_pair_csv):
        config = RunConfig(
            input=duplicated_pair_csv,
            manual_map={
                "antigen": ("pulse",),
                "PAMP": ("foot_gsr",),
                "Danger": ("hand_gsr",),
                "Safe": ("resp",),
            },
        )
        with pytest.raises(ConfigError, match="pulse"):
            pipeline.analyse(config)


class TestExplicitBoundaries:
    def test_run_without_marker(self, duplicated_pair_csv):
        config = RunConfig(
            input=duplicated_pair_csv,
            boundaries=(20,),
            labels=("normal", "anomalous"),
        )
        result = pipeline.run(config)
        assert result.segment_map.boundaries == (20,)
        assert result.segment_map.n_seconds == 40
        assert len(result.series) == 40


class TestStageTaggedErrors:
    def test_missing_file(self, tmp_path):
        config = RunConfig(input=str(tmp_path / "absent.csv"))
        with pytest.raises(DataError, match="^ingest: "):
            pipeline.analyse(config)

    def test_marker_also_excluded(self, fixture_config):
        config = RunConfig(
            input=fixture_config.input,
            marker_col="marker",
            exclude=("marker",),
        )
        with pytest.raises(ConfigError, match="also excluded"):
            pipeline.analyse(config)

    def test_marker_not_in_input(self, duplicated_pair_csv):
        config = RunConfig(input=duplicated_pair_csv, marker_col="pulse")
        with pytest.raises(DataError, match="^ingest: .*pulse"):
            pipeline.analyse(config)

    def test_too_few_attributes(self, write_csv):
        path = write_csv("time,only\n0,1.0\n1000,2.0\n2000,1.5\n")
        with pytest.raises(DataError, match="^pca: "):
            pipeline.analyse(RunConfig(input=path))

    def test_segmentation_needs_boundaries_or_marker(self, duplicated_pair_csv):
        config = RunConfig(
            input=duplicated_pair_csv, labels=("normal", "anomalous")
        )
        with pytest.raises(ConfigError, match="^segment: "):
            pipeline.run(config)

    def test_labels_required(self, duplicated_pair_csv):
        config = RunConfig(input=duplicated_pair_csv, boundaries=(20,))
        with pytest.raises(ConfigError, match="labels are required"):
            pipeline.run(config)


class TestSummary:
    def test_header_lines(self, run_result, fixture_config):
        result, config = run_result, fixture_config
        lines = pipeline.summarise_run(result, config).splitlines()
        assert lines[0].endswith("700 seconds, 5 attributes")
        assert lines[1] == "ranking: a1 > a2 > a3 > a4 > a5"
        assert lines[2] == "merged: none"
        assert lines[3] == "antigen: a1"
        assert lines[4] == "PAMP: a3, a4"
        assert lines[5] == "Danger: a5"
        assert lines[6] == "Safe (inverted): a2"
        assert lines[7] == "population=100 delta=0.15 fmin=15 fmax=100"
        assert lines[8] == "segments: 7 (boundaries 100, 200, 300, 400, 500, 600)"

    def test_rate_rows_match_roc_artifact_exactly(self, run_result, fixture_config):
        result, config = run_result, fixture_config
        lines = pipeline.summarise_run(result, config).splitlines()
        start = lines.index("threshold,tp_rate,fp_rate") + 1
        rows = lines[start : start + len(result.curve.results)]
        assert rows == [roc_row(r) for r in result.curve.results]

    def test_auc_line(self, run_result, fixture_config):
        result, config = run_result, fixture_config
        last = pipeline.summarise_run(result, config).splitlines()[-1]
        assert last == f"auc={fmt_full(result.curve.auc)}"

    def test_merge_line_when_applied(self, duplicated_pair_csv, tmp_path):
        config = RunConfig(
            input=duplicated_pair_csv,
            boundaries=(20,),
            labels=("normal", "anomalous"),
            out_dir=str(tmp_path),
        )
        result = pipeline.run(config)
        text = pipeline.summarise_run(result, config)
        assert "merged: foot_gsr + hand_gsr -> gsr (similarity 1" in text


class TestArtifacts:
    def test_run_artifact_set(self, fixture_config, tmp_path):
        config = RunConfig(
            input=fixture_config.input,
            marker_col="marker",
            segments=7,
            labels=FIXTURE_LABELS,
            out_dir=str(tmp_path / "out"),
        )
        result = pipeline.run(config)
        written = pipeline.write_run_artifacts(result, config)
        names = [p.name for p in written]
        assert names[:5] == [
            "loadings.csv",
            "merges.csv",
            "assignment.csv",
            "k_alpha.csv",
            "roc.csv",
        ]
        segment_reports = names[5:]
        assert len(segment_reports) == 41
        assert all(n.startswith("segments_") for n in segment_reports)
        assert all(p.exists() for p in written)

    def test_roc_artifact_rows_match_summary(self, fixture_config, tmp_path):
        config = RunConfig(
            input=fixture_config.input,
            marker_col="marker",
            segments=7,
            labels=FIXTURE_LABELS,
            out_dir=str(tmp_path),
        )
        result = pipeline.run(config)
        pipeline.write_run_artifacts(result, config)
        roc_lines = (tmp_path / "roc.csv").read_text().splitlines()
        summary = pipeline.summarise_run(result, config).splitlines()
        start = summary.index("threshold,tp_rate,fp_rate") + 1
        assert roc_lines[1:-1] == summary[start : start + 41]

    def test_normalised_stats_dump_opt_in(self, duplicated_pair_csv, tmp_path):
        config = RunConfig(
            input=duplicated_pair_csv,
            out_dir=str(tmp_path),
            dump_normalised=True,
        )
        analysis = pipeline.analyse(config)
        written = pipeline.write_analysis_artifacts(analysis, config)
        assert written[-1].name == "stats_normalised.csv"
        header = written[-1].read_text().splitlines()[0]
        assert header == "name,min,max,median,mean,stdev"
