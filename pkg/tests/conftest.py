from hypothesis import HealthCheck, settings

settings.register_profile("orbitlab", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("orbitlab")


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
