import random

import pytest
from hypothesis import HealthCheck, settings

# derandomized so every run replays the same cases; the suite is a
# verification artifact, not a fuzzing campaign
settings.register_profile(
    "replay",
    derandomize=True,
    max_examples=80,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("replay")

SEED = 20260814


@pytest.fixture
def rng():
    return random.Random(SEED)
