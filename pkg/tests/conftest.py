import mpmath

mpmath.mp.dps = 30


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS, report
    except ImportError:
        return
    if RESULTS:
        terminalreporter.write_line(report())
