import os

from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", deadline=None, max_examples=1000)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def reduced_fractions(max_den=10**6):
    """(num, den) with 0 < num < den and gcd 1."""
    import math

    return (st.integers(2, max_den)
            .flatmap(lambda b: st.tuples(st.integers(1, b - 1), st.just(b)))
            .filter(lambda t: math.gcd(*t) == 1))


dyadic_bits = st.integers(1, 2**64 - 1)


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(acceptance_log.LINES):
            terminalreporter.write_line(acceptance_log.LINES[n])
