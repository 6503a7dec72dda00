"""Tests for CSV rendering and atomic file output."""

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from dcakit.dca import KAlphaSeries
from dcakit.ingest import AttributeStats
from dcakit.metrics import RocCurve, RocPoint, SegmentPrediction, ThresholdResult
from dcakit.pca import PcaResult, VariabilityRanking
from dcakit.pipeline import MergeDecision
from dcakit.reporting import (
    fmt6,
    fmt_full,
    render_assignment,
    render_k_alpha,
    render_loadings,
    render_merges,
    render_roc,
    render_segment_report,
    render_stats,
    roc_row,
    segment_report_name,
    write_atomic,
)
from dcakit.signals import SignalAssignment


class TestFmt6:
    def test_six_significant_digits(self):
        assert fmt6(1 / 3) == "0.333333"
        assert fmt6(123456789.0) == "1.23457e+08"

    def test_no_trailing_zeros(self):
        assert fmt6(0.15) == "0.15"
        assert fmt6(265.0) == "265"

    def test_negative_zero_collapses(self):
        assert fmt6(-0.0) == "0"

    def test_small_magnitudes_use_exponent(self):
        assert fmt6(1e-7) == "1e-07"

    @given(st.floats(allow_nan=False, allow_infinity=False, width=64))
    def test_deterministic(self, x):
        assert fmt6(x) == fmt6(x)


class TestFmtFull:
    @given(st.floats(allow_nan=False, allow_infinity=False, width=64))
    def test_round_trips_exactly(self, x):
        assert float(fmt_full(x)) == x

    def test_negative_zero_collapses(self):
        assert fmt_full(-0.0) == "0.0"

    def test_is_repr(self):
        assert fmt_full(0.1) == "0.1"
        assert fmt_full(-11.170312) == "-11.170312"


class TestWriteAtomic:
    def test_writes_content(self, tmp_path):
        target = tmp_path / "report.csv"
        write_atomic(target, "a,b\n1,2\n")
        assert target.read_text() == "a,b\n1,2\n"

    def test_creates_parent_directories(self, tmp_path):
        target = tmp_path / "out" / "deep" / "report.csv"
        write_atomic(target, "x\n")
        assert target.read_text() == "x\n"

    def test_no_temporary_residue(self, tmp_path):
        target = tmp_path / "report.csv"
        write_atomic(target, "x\n")
        assert [p.name for p in tmp_path.iterdir()] == ["report.csv"]

    def test_overwrites_existing(self, tmp_path):
        target = tmp_path / "report.csv"
        write_atomic(target, "old\n")
        write_atomic(target, "new\n")
        assert target.read_text() == "new\n"


class TestRenderStats:
    def test_header_and_rows(self):
        rows = [
            AttributeStats("hr", 0.0, 265.0, 71.33, 68.13, 19.98),
            AttributeStats("gsr", 2.1, 11.55, 5.14, 4.83, 1.9),
        ]
        text = render_stats(rows)
        lines = text.splitlines()
        assert lines[0] == "name,min,max,median,mean,stdev"
        assert lines[1] == "hr,0,265,71.33,68.13,19.98"
        assert lines[2] == "gsr,2.1,11.55,5.14,4.83,1.9"
        assert text.endswith("\n")

    def test_empty(self):
        assert render_stats([]) == "name,min,max,median,mean,stdev\n"


class TestRenderLoadings:
    def test_rows_follow_rank_order(self):
        pca = PcaResult(
            eigenvalues=np.array([4.0, 1.0]),
            loadings=np.array([[0.6, 0.8], [0.8, -0.6]]),
            attributes=("x", "y"),
        )
        ranking = VariabilityRanking(attributes=("y", "x"), scores=(0.7, 0.3))
        lines = render_loadings(pca, ranking).splitlines()
        assert lines[0] == "attribute,pc1,pc2,score,rank"
        assert lines[1] == "y,0.8,-0.6,0.7,1"
        assert lines[2] == "x,0.6,0.8,0.3,2"


class TestRenderMerges:
    def test_applied_and_skipped(self):
        decisions = [
            MergeDecision(
                pair=("foot_gsr", "hand_gsr"),
                similarity=0.999,
                p_value=0.8,
                applied=True,
                merged_name="gsr",
                note="",
            ),
            MergeDecision(
                pair=("hr", "ecg"),
                similarity=0.96,
                p_value=0.01,
                applied=False,
                merged_name="",
                note="distributions differ",
            ),
        ]
        lines = render_merges(decisions).splitlines()
        assert lines[0] == "first,second,similarity,p_value,applied,merged_as,note"
        assert lines[1] == "foot_gsr,hand_gsr,0.999,0.8,true,gsr,"
        assert lines[2] == "hr,ecg,0.96,0.01,false,,distributions differ"

    def test_empty(self):
        text = render_merges([])
        assert text == "first,second,similarity,p_value,applied,merged_as,note\n"


class TestRenderAssignment:
    def make(self):
        assignment = SignalAssignment(
            antigen="a",
            categories={"Safe": ("b",), "PAMP": ("c",), "Danger": ("d",)},
            inverted=frozenset({"b"}),
        )
        ranking = VariabilityRanking(
            attributes=("a", "b", "c", "d"), scores=(0.4, 0.3, 0.2, 0.1)
        )
        return assignment, ranking

    def test_every_ranked_attribute_present(self):
        assignment, ranking = self.make()
        lines = render_assignment(assignment, ranking).splitlines()
        assert lines[0] == "attribute,rank,score,role,inverted"
        assert lines[1] == "a,1,0.4,antigen,false"
        assert lines[2] == "b,2,0.3,Safe,true"
        assert lines[3] == "c,3,0.2,PAMP,false"
        assert lines[4] == "d,4,0.1,Danger,false"

    def test_unassigned_attribute_marked_unused(self):
        assignment = SignalAssignment(
            antigen="a",
            categories={"Safe": ("b",), "PAMP": ("c",), "Danger": ("d",)},
            inverted=frozenset(),
        )
        ranking = VariabilityRanking(
            attributes=("a", "b", "c", "d", "e"), scores=(5.0, 4.0, 3.0, 2.0, 1.0)
        )
        lines = render_assignment(assignment, ranking).splitlines()
        assert lines[5] == "e,5,1,unused,false"

    def test_attribute_outside_ranking_has_blank_rank(self):
        # A manually mapped attribute need not appear in the ranking at all.
        assignment = SignalAssignment(
            antigen="z",
            categories={"Safe": ("b",), "PAMP": ("c",), "Danger": ("d",)},
            inverted=frozenset(),
        )
        ranking = VariabilityRanking(
            attributes=("b", "c", "d"), scores=(3.0, 2.0, 1.0)
        )
        lines = render_assignment(assignment, ranking).splitlines()
        assert "z,,,antigen,false" in lines


class TestRenderKAlpha:
    def test_rows(self):
        series = KAlphaSeries(
            type_ids=np.array([0, 1, 2]),
            values=np.array([0.5, -1.25, 3.0]),
            counts=np.array([15, 100, 58]),
        )
        lines = render_k_alpha(series).splitlines()
        assert lines[0] == "type,seconds,k_alpha,presented_count"
        assert lines[1] == "0,0,0.5,15"
        assert lines[2] == "1,1,-1.25,100"
        assert lines[3] == "2,2,3,58"


def make_result(threshold, tp, fp, predictions=()):
    return ThresholdResult(
        threshold=threshold, tp_rate=tp, fp_rate=fp, predictions=predictions
    )


class TestRenderRoc:
    def test_rows_and_auc_comment(self):
        curve = RocCurve(
            points=(
                RocPoint(float("inf"), 0.0, 0.0),
                RocPoint(-1.5, 1.0, 0.25),
                RocPoint(float("-inf"), 1.0, 1.0),
            ),
            auc=0.875,
            results=(
                make_result(-1.5, 1.0, 0.25),
                make_result(0.0, 0.0, 0.0),
            ),
        )
        lines = render_roc(curve).splitlines()
        assert lines[0] == "threshold,tp_rate,fp_rate"
        assert lines[1] == "-1.5,1.0,0.25"
        assert lines[2] == "0.0,0.0,0.0"
        assert lines[3] == "# auc=0.875"

    def test_rows_match_roc_row(self):
        result = make_result(-0.5, 2 / 3, 0.0)
        curve = RocCurve(points=(), auc=0.5, results=(result,))
        assert render_roc(curve).splitlines()[1] == roc_row(result)

    def test_roc_row_full_precision(self):
        result = make_result(0.1, 2 / 3, 1 / 3)
        text = roc_row(result)
        cells = text.split(",")
        assert float(cells[0]) == 0.1
        assert float(cells[1]) == 2 / 3
        assert float(cells[2]) == 1 / 3


class TestRenderSegmentReport:
    def test_rows(self):
        result = make_result(
            -1.0,
            1.0,
            0.0,
            predictions=(
                SegmentPrediction(0, 0, 100, "normal", -12.5, "normal"),
                SegmentPrediction(1, 100, 200, "anomalous", 3.25, "anomalous"),
            ),
        )
        lines = render_segment_report(result).splitlines()
        assert lines[0] == "segment,start,end,true_label,L,predicted_label"
        assert lines[1] == "0,0,100,normal,-12.5,normal"
        assert lines[2] == "1,100,200,anomalous,3.25,anomalous"


class TestSegmentReportName:
    def test_integer_threshold(self):
        assert segment_report_name(3, -1.0) == "segments_003_th-1.csv"

    def test_fractional_threshold(self):
        assert segment_report_name(0, -11.170312) == "segments_000_th-11.1703.csv"

    def test_index_zero_padded(self):
        assert segment_report_name(12, 0.0) == "segments_012_th0.csv"

    def test_distinct_thresholds_distinct_names(self):
        grid = [i * 0.05 - 1.0 for i in range(41)]
        names = {segment_report_name(i, th) for i, th in enumerate(grid)}
        assert len(names) == len(grid)
