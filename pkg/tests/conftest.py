from hypothesis import settings

from helpers import ACCEPTANCE

# fixed example generation keeps repeated runs identical
settings.register_profile("repo", derandomize=True)
settings.load_profile("repo")

def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, title, seconds, budget = ACCEPTANCE[number]
        limit = f" / {budget:g} s" if budget is not None else ""
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  ({seconds:.2f} s{limit})")
