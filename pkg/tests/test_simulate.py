"""Synthetic corpus generator: determinism, PRNG stream, planted structure."""

import dataclasses

import pytest

import _reference as R
from scaffold_align.corpus import serialize_corpus
from scaffold_align.simulate import (
    GroundTruth,
    SimulationConfig,
    SplitMix64,
    generate_corpus,
)

# small but fully structured config so generator tests stay fast
_FAST = SimulationConfig(seed=4, n_dialogues=60, n_tutors=6)


def test_splitmix64_reference_stream():
    # stream verified against an independently compiled C implementation
    # of the published finalizer (constants 9E3779B97F4B7C15 / BF58476D…)
    rng = SplitMix64(0)
    assert [rng.next_u64() for _ in range(3)] == [
        0x09AAB36CFDA2D1B3,
        0x5B00C67197590451,
        0x0EB2AFB57F7F9972,
    ]
    gamma = 0x9E3779B97F4B7C15
    mask = (1 << 64) - 1
    for seed in (1, 2**64 - 1, 0xDEADBEEF):
        mine = SplitMix64(seed)
        state = seed
        for _ in range(4):
            assert mine.next_u64() == R.ref_splitmix64(state)
            state = (state + gamma) & mask


def test_splitmix64_uniform_range_and_determinism():
    rng = SplitMix64(99)
    draws = [rng.uniform() for _ in range(1000)]
    assert all(0.0 <= d < 1.0 for d in draws)
    again = SplitMix64(99)
    assert draws == [again.uniform() for _ in range(1000)]


def test_splitmix64_randint_bounds():
    rng = SplitMix64(5)
    draws = [rng.randint(-1, 2) for _ in range(500)]
    assert set(draws) <= {-1, 0, 1}
    assert len(set(draws)) == 3


def test_splitmix64_sample_without_replacement():
    rng = SplitMix64(7)
    pool = [f"w{i}" for i in range(50)]
    picked = rng.sample(pool, 12)
    assert len(picked) == 12
    assert len(set(picked)) == 12
    assert set(picked) <= set(pool)
    assert pool == [f"w{i}" for i in range(50)]  # input not mutated


def test_generate_corpus_deterministic_bytes():
    corpus_a, truth_a = generate_corpus(_FAST)
    corpus_b, truth_b = generate_corpus(_FAST)
    assert serialize_corpus(corpus_a) == serialize_corpus(corpus_b)
    assert truth_a.to_dict() == truth_b.to_dict()


def test_generate_corpus_seed_changes_output():
    corpus_a, _ = generate_corpus(_FAST)
    corpus_b, _ = generate_corpus(dataclasses.replace(_FAST, seed=5))
    assert serialize_corpus(corpus_a) != serialize_corpus(corpus_b)


def test_generated_corpus_shape():
    corpus, _ = generate_corpus(_FAST)
    assert len(corpus) == 60
    assert len(corpus.tutor_ids()) == 6
    for dialogue in corpus:
        assert len(dialogue.messages) >= 4
        roles = [m.role for m in dialogue.messages]
        assert roles[0] == "tutor"
        assert all(r in ("tutor", "student") for r in roles)
        assert {m.index for m in dialogue.messages} == set(
            range(1, len(dialogue.messages) + 1)
        )
        for message in dialogue.messages:
            assert message.text.strip()


def test_ground_truth_contents():
    _, truth = generate_corpus(_FAST)
    d = truth.to_dict()
    assert d["config"]["seed"] == 4
    assert d["planted_signs"] == {
        "sim_problem:tutor": -1,
        "sim_problem:student": -1,
        "sim_solution:tutor": -1,
        "sim_solution:student": 1,
    }
    # pooled sign is the sign of the role-average slope
    assert d["pooled_signs"] == {"sim_problem": -1, "sim_solution": 0}
    assert "length" in d["tau2_mechanism"]


def test_pooled_sign_follows_slope_sum():
    config = dataclasses.replace(
        _FAST, slope_solution_tutor=-0.02, slope_solution_student=0.08
    )
    _, truth = generate_corpus(config)
    assert truth.pooled_signs["sim_solution"] == 1


def test_config_validation():
    with pytest.raises(ValueError, match="n_dialogues"):
        SimulationConfig(n_dialogues=0)
    with pytest.raises(ValueError, match="shorter"):
        SimulationConfig(base_length=10, length_jitter=5, tutor_spread=4)
    with pytest.raises(ValueError, match="tokens_per_message"):
        SimulationConfig(tokens_per_message=1)
    with pytest.raises(ValueError, match="problem_tokens"):
        SimulationConfig(problem_tokens=0)


def test_generated_corpus_parses_back():
    from scaffold_align.corpus import parse_corpus

    corpus, _ = generate_corpus(_FAST)
    text = serialize_corpus(corpus)
    reparsed = parse_corpus(text.splitlines())
    assert serialize_corpus(reparsed) == text


def test_tutor_assignment_round_robin():
    corpus, _ = generate_corpus(_FAST)
    dialogues = sorted(corpus.dialogues, key=lambda d: d.dialogue_id)
    for i, dialogue in enumerate(dialogues):
        assert dialogue.tutor_id == f"tutor-{i % 6:03d}"


def test_zero_tutor_spread_balances_lengths():
    # with spread 0 every tutor sees the same deterministic length
    # palette, so per-tutor total message counts are identical
    config = dataclasses.replace(_FAST, tutor_spread=0)
    corpus, _ = generate_corpus(config)
    totals = {}
    for dialogue in corpus:
        totals.setdefault(dialogue.tutor_id, 0)
        totals[dialogue.tutor_id] += len(dialogue.messages)
    assert len(set(totals.values())) == 1
