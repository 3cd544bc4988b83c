from __future__ import annotations

import pytest

from ccgbeam.cli import bundled_path
from ccgbeam.corpus import extract_grammar, gold_oracle, read_treebank
from ccgbeam.evaluation import load_deps
from ccgbeam.markedup import read_markedup
from ccgbeam.multitagger import load_tag_file
from ccgbeam.scoring import load_score_charts


@pytest.fixture(scope="session")
def mini_path():
    return bundled_path("mini.tb")


@pytest.fixture(scope="session")
def entries(mini_path):
    return read_treebank(mini_path)


@pytest.fixture(scope="session")
def by_id(entries):
    return {e.id: e for e in entries}


@pytest.fixture(scope="session")
def markedup():
    return read_markedup(bundled_path("markedup.txt"))


@pytest.fixture(scope="session")
def tables(entries):
    return extract_grammar(entries)


@pytest.fixture(scope="session")
def oracle(entries, markedup):
    files = gold_oracle(entries, markedup)
    return {
        "files": files,
        "tags": load_tag_file(files.tags),
        "charts": load_score_charts(files.spans),
        "gold": load_deps(files.deps),
    }


ACCEPTANCE_LINES = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion; printed in the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_LINES, [])

    def record(label: str, ok: bool, detail: str = "") -> None:
        lines.append(f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else ""))
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
