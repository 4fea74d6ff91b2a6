"""Design construction: logit transform, standardization, model ladder."""

import math

import numpy as np
import pytest

import _reference as R
from scaffold_align.alignment import AlignmentRecord
from scaffold_align.errors import DegenerateColumnError, ModelingError
from scaffold_align.lmm import (
    MODEL_IDS,
    ModelDesign,
    build_design,
    logit_progression,
    model_column_names,
    standardize_column,
)


def _records(n=12, seed=0):
    rng = np.random.default_rng(seed)
    recs = []
    per = 4
    for d in range(n // per):
        for i in range(1, per + 1):
            recs.append(
                AlignmentRecord(
                    dialogue_id=f"d{d}", tutor_id=f"t{d % 2}", index=i,
                    role="tutor" if i % 2 else "student",
                    rel_position=i / per,
                    msg_length=int(rng.integers(3, 40)),
                    sim_problem=float(rng.uniform(-0.2, 0.8)),
                    sim_solution=float(rng.uniform(-0.2, 0.8)),
                    qs_baseline=0.2,
                )
            )
    return recs


def test_logit_progression_midpoint_exact():
    for m in (2, 10, 1000):
        assert logit_progression(0.5, m) == 0.0


def test_logit_progression_squeeze_example():
    # p=1, M=100: p' = 0.995, logit = ln(199)
    assert logit_progression(1.0, 100) == pytest.approx(math.log(199), rel=1e-12)
    assert logit_progression(1.0, 100) == pytest.approx(5.2933, abs=1e-4)


def test_logit_progression_always_finite():
    for m in (2, 7, 100, 55000):
        for p in (1e-9, 0.25, 1.0):
            assert math.isfinite(logit_progression(p, m))


def test_logit_progression_matches_reference():
    for p, m in [(0.3, 17), (1.0, 31), (0.01, 2)]:
        assert logit_progression(p, m) == pytest.approx(R.ref_logit_progression(p, m), rel=1e-14)


def test_logit_progression_domain():
    with pytest.raises(ValueError):
        logit_progression(0.0, 10)
    with pytest.raises(ValueError):
        logit_progression(1.2, 10)
    with pytest.raises(ValueError):
        logit_progression(0.5, 1)


def test_standardize_hand_example():
    z, mean, sd = standardize_column(np.array([1.0, 2.0, 3.0]), "x")
    np.testing.assert_allclose(z, [-1.2247, 0.0, 1.2247], atol=1e-4)
    assert mean == 2.0
    assert sd == pytest.approx(R.ref_population_sd([1, 2, 3]))


def test_standardize_degenerate_column_named():
    with pytest.raises(DegenerateColumnError, match="flatline"):
        standardize_column(np.ones(5), "flatline")


def test_model_column_names():
    assert model_column_names(0) == ("intercept", "seq_rank")
    assert model_column_names(1) == ("intercept", "seq_rank", "msg_length")
    assert model_column_names(2) == (
        "intercept", "seq_rank", "msg_length", "sim_problem", "sim_solution",
    )
    assert len(model_column_names(3)) == 7
    assert set(model_column_names(3)) >= {
        "sim_problem:tutor", "sim_problem:student",
        "sim_solution:tutor", "sim_solution:student",
    }
    with pytest.raises(ModelingError):
        model_column_names(4)


@pytest.mark.parametrize("model_id, n_cols", [(0, 2), (1, 3), (2, 5), (3, 7)])
def test_build_design_column_counts(model_id, n_cols):
    design = build_design(_records(), model_id)
    assert design.X.shape == (12, n_cols)
    assert design.column_names == model_column_names(model_id)
    assert design.model_id == model_id
    assert len(design.y) == 12
    assert len(design.groups) == 12


def test_model3_vs_model2_df_difference_is_two():
    d2 = build_design(_records(), 2)
    d3 = build_design(_records(), 3)
    assert d3.X.shape[1] - d2.X.shape[1] == 2


def test_nonintercept_columns_standardized():
    design = build_design(_records(n=40, seed=2), 2)
    for j, name in enumerate(design.column_names):
        if name == "intercept":
            np.testing.assert_allclose(design.X[:, j], 1.0)
            continue
        col = design.X[:, j]
        assert abs(col.mean()) < 1e-9, name
        assert abs(R.ref_population_sd(col) - 1.0) < 1e-9, name


def test_partition_columns_reassemble_base(seed=4):
    recs = _records(n=40, seed=seed)
    d2 = build_design(recs, 2)
    d3 = build_design(recs, 3)
    c2 = dict(zip(d2.column_names, d2.X.T))
    c3 = dict(zip(d3.column_names, d3.X.T))
    # standardize-then-partition: the two role columns sum to the base column
    np.testing.assert_allclose(
        c3["sim_problem:tutor"] + c3["sim_problem:student"], c2["sim_problem"], atol=1e-12
    )
    np.testing.assert_allclose(
        c3["sim_solution:tutor"] + c3["sim_solution:student"], c2["sim_solution"], atol=1e-12
    )
    roles = np.array([r.role for r in recs])
    assert np.all(c3["sim_problem:tutor"][roles == "student"] == 0.0)
    assert np.all(c3["sim_problem:student"][roles == "tutor"] == 0.0)


def test_y_is_logit_of_progression():
    recs = _records(n=12)
    design = build_design(recs, 0)
    m = len(recs)
    expected = [R.ref_logit_progression(r.rel_position, m) for r in recs]
    np.testing.assert_allclose(design.y, expected, rtol=1e-14)


def test_groups_are_tutor_ids():
    recs = _records()
    design = build_design(recs, 0)
    assert list(design.groups) == [r.tutor_id for r in recs]


def test_standardization_params_recorded():
    design = build_design(_records(n=24, seed=3), 2)
    assert set(design.standardization_params) == {
        "seq_rank", "msg_length", "sim_problem", "sim_solution",
    }
    mean, sd = design.standardization_params["msg_length"]
    lengths = [r.msg_length for r in _records(n=24, seed=3)]
    assert mean == pytest.approx(np.mean(lengths))
    assert sd == pytest.approx(R.ref_population_sd(lengths))


def test_degenerate_similarity_column_reported():
    recs = [
        AlignmentRecord(
            dialogue_id="d", tutor_id=f"t{i % 2}", index=i, role="tutor" if i % 2 else "student",
            rel_position=i / 8, msg_length=i + 2,
            sim_problem=0.5, sim_solution=float(i) / 10, qs_baseline=0.0,
        )
        for i in range(1, 9)
    ]
    with pytest.raises(DegenerateColumnError, match="sim_problem"):
        build_design(recs, 2)
    # model 0 never touches similarities, so it still builds
    assert build_design(recs, 0).X.shape[1] == 2


def test_single_role_partition_column_degenerate():
    recs = [
        AlignmentRecord(
            dialogue_id="d", tutor_id="t", index=i, role="tutor",
            rel_position=i / 6, msg_length=i + 2,
            sim_problem=float(i) / 7, sim_solution=float(i * i) / 40, qs_baseline=0.0,
        )
        for i in range(1, 7)
    ]
    with pytest.raises(DegenerateColumnError, match="student"):
        build_design(recs, 3)


def test_build_design_needs_rows():
    with pytest.raises(ModelingError):
        build_design([], 0)
    with pytest.raises(ModelingError):
        build_design(_records(), 9)
