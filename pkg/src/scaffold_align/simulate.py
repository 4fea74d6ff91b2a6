"""Synthetic corpus generator with planted effect structure.

The generator plants four role-dependent similarity-progression couplings
(the slopes below) plus tutor-level intercept noise, so downstream model
fits have known ground truth. Every draw comes from a splitmix64 stream
seeded by the config; generation uses only integer arithmetic and exact
IEEE multiply/add, so the same seed yields a byte-identical corpus on any
platform.

Mechanism. Each dialogue owns a problem statement and a solution built
from disjoint token pools. A message at relative position t contains
k_p(role, t) tokens copied from the dialogue's problem statement and
k_s(role, t) from its solution, padded with filler tokens. Under the
deterministic hashing embedder, distinct tokens are nearly orthogonal, so
cosine(message, problem) ~= k_p / sqrt(K * T): token counts control the
similarity directly. The counts follow a cubic schedule in t, shaped like
the logit outcome, so each planted slope surfaces with its sign as the
corresponding Model 3 coefficient. Tutor intercept noise comes from
per-tutor dialogue-length offsets: the logit outcome at a given index
depends on dialogue length, so tutors with systematically longer
dialogues acquire shifted residual means. tutor_spread = 0 removes the
mechanism and the downstream variance ratio collapses to ~0; dialogue
lengths cycle a fixed palette per tutor so the collapse is exact rather
than up to length-sampling noise.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .corpus import Corpus, Dialogue, Message

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Sequential splitmix64 stream; the documented simulation PRNG."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4B7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def randint(self, low: int, high: int) -> int:
        """Integer in [low, high). Modulo draw; bias is negligible for
        the small spans used here and keeps the stream platform-stable."""
        span = high - low
        if span <= 0:
            raise ValueError(f"empty range [{low}, {high})")
        return low + self.next_u64() % span

    def sample(self, items: list[str], k: int) -> list[str]:
        """k distinct items via partial Fisher-Yates; mutates a copy."""
        pool = list(items)
        for i in range(k):
            j = self.randint(i, len(pool))
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def dither(self, x: float) -> int:
        """Round x to an adjacent integer, unbiased in expectation."""
        base = int(x // 1.0)
        return base + (1 if self.uniform() < x - base else 0)


@dataclass(frozen=True)
class SimulationConfig:
    """Generator knobs. Default slopes mirror the planted sign pattern:
    both problem couplings negative, solution coupling negative for
    tutors and positive for students."""

    seed: int = 0
    n_dialogues: int = 780
    n_tutors: int = 20
    base_length: int = 30
    length_jitter: int = 10
    tutor_spread: int = 8
    tokens_per_message: int = 12
    problem_tokens: int = 12
    solution_tokens: int = 12
    base_problem: float = 3.0
    base_solution: float = 3.0
    slope_problem_tutor: float = -0.04
    slope_problem_student: float = -0.09
    slope_solution_tutor: float = -0.07
    slope_solution_student: float = 0.07
    problem_pool: int = 256
    solution_pool: int = 256
    filler_pool: int = 1024

    def __post_init__(self):
        if self.n_dialogues < 1 or self.n_tutors < 1:
            raise ValueError("n_dialogues and n_tutors must be >= 1")
        if self.base_length - self.length_jitter - self.tutor_spread < 4:
            raise ValueError("length knobs admit dialogues shorter than 4 messages")
        if self.tokens_per_message < 2:
            raise ValueError("tokens_per_message must be >= 2")
        for name in ("problem_tokens", "solution_tokens"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class GroundTruth:
    """What the generator planted, for downstream recovery checks."""

    config: SimulationConfig
    planted_signs: dict = field(default_factory=dict)
    pooled_signs: dict = field(default_factory=dict)
    tau2_mechanism: str = "per-tutor dialogue-length offsets"

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "planted_signs": dict(self.planted_signs),
            "pooled_signs": dict(self.pooled_signs),
            "tau2_mechanism": self.tau2_mechanism,
        }


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def _shape(t: float) -> float:
    # Cubic progression shape in [-1, 1]: odd around t = 0.5 like the
    # logit outcome, with a nonlinear part the z(index) column cannot
    # absorb. Polynomial only, so it is exact IEEE arithmetic.
    u = 2.0 * t - 1.0
    return u * u * u


def _token_count(rng: SplitMix64, base: float, swing: float, t: float, cap: int) -> int:
    k = rng.dither(base + swing * _shape(t)) + rng.randint(-1, 2)
    return min(max(k, 0), cap)


def generate_corpus(config: SimulationConfig) -> tuple[Corpus, GroundTruth]:
    """Build the synthetic corpus and its ground-truth description."""
    rng = SplitMix64(config.seed)
    problem_pool = [f"pr{i}" for i in range(config.problem_pool)]
    solution_pool = [f"sol{i}" for i in range(config.solution_pool)]
    filler_pool = [f"w{i}" for i in range(config.filler_pool)]

    # Token-count swing realizing a similarity slope s: cosine moves by
    # roughly k / sqrt(K * T), so s similarity units need s*sqrt(K*T) tokens.
    unit = (config.tokens_per_message * config.problem_tokens) ** 0.5
    swings = {
        ("problem", "tutor"): config.slope_problem_tutor * unit,
        ("problem", "student"): config.slope_problem_student * unit,
        ("solution", "tutor"): config.slope_solution_tutor * unit,
        ("solution", "student"): config.slope_solution_student * unit,
    }

    offsets = [
        rng.randint(-config.tutor_spread, config.tutor_spread + 1) if config.tutor_spread > 0 else 0
        for _ in range(config.n_tutors)
    ]

    dialogues = []
    modulus = 2 * config.length_jitter + 1
    for d in range(config.n_dialogues):
        tutor = d % config.n_tutors
        # Lengths cycle a fixed palette per tutor rather than being drawn:
        # with tutor_spread = 0 every tutor then sees the same length
        # multiset, so no tutor-level residual clustering sneaks in via
        # length composition and the fitted variance ratio stays at ~0.
        ordinal = d // config.n_tutors
        length = config.base_length + (2 * ordinal) % modulus - config.length_jitter
        length += offsets[tutor]
        p_tokens = rng.sample(problem_pool, config.problem_tokens)
        s_tokens = rng.sample(solution_pool, config.solution_tokens)
        messages = []
        for i in range(1, length + 1):
            role = "tutor" if i % 2 == 1 else "student"
            t = i / length
            k_p = _token_count(
                rng, config.base_problem, swings[("problem", role)], t, config.problem_tokens
            )
            cap_s = min(config.solution_tokens, config.tokens_per_message - k_p)
            k_s = _token_count(
                rng, config.base_solution, swings[("solution", role)], t, cap_s
            )
            tokens = rng.sample(p_tokens, k_p) + rng.sample(s_tokens, k_s)
            for _ in range(config.tokens_per_message - k_p - k_s):
                tokens.append(filler_pool[rng.randint(0, len(filler_pool))])
            messages.append(Message(index=i, role=role, text=" ".join(tokens)))
        dialogues.append(
            Dialogue(
                dialogue_id=f"sim-{d:05d}",
                tutor_id=f"tutor-{tutor:03d}",
                problem_statement=" ".join(p_tokens),
                solution=" ".join(s_tokens),
                messages=tuple(messages),
            )
        )

    # Pooled Model 2 signs: tutors and students contribute about equally,
    # so the pooled direction is the sign of the slope sum.
    truth = GroundTruth(
        config=config,
        planted_signs={
            "sim_problem:tutor": _sign(config.slope_problem_tutor),
            "sim_problem:student": _sign(config.slope_problem_student),
            "sim_solution:tutor": _sign(config.slope_solution_tutor),
            "sim_solution:student": _sign(config.slope_solution_student),
        },
        pooled_signs={
            "sim_problem": _sign(config.slope_problem_tutor + config.slope_problem_student),
            "sim_solution": _sign(config.slope_solution_tutor + config.slope_solution_student),
        },
    )
    return Corpus(dialogues=tuple(dialogues)), truth
