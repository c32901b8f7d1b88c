import pytest

from callcost import Document, build_index, generate_synthetic_corpus

ROCKET_TFS = {"doc_11": 7, "doc_15": 2, "doc_67": 4}
PAPER_D = 4573


def rocket_documents():
    docs = []
    for doc_id, tf in ROCKET_TFS.items():
        docs.append(Document(doc_id, ("rocket",) * tf + ("launch", "orbit")))
    return docs


@pytest.fixture
def rocket_docs():
    return rocket_documents()


@pytest.fixture(scope="session")
def small_index():
    docs = generate_synthetic_corpus(200, 800, 40, seed=3)
    return build_index(docs)


@pytest.fixture(scope="session")
def large_index():
    """About 21.8k entries and 153k postings."""
    docs = generate_synthetic_corpus(2000, 30000, 100, seed=1)
    return build_index(docs)


# -- acceptance summary -------------------------------------------------------

_acceptance = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else "SKIP" if rep.skipped else "FAIL"
        _acceptance.append((marker.args[0], marker.args[1], status, item.name))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status, name in sorted(_acceptance):
        terminalreporter.write_line(f"AC{number} {status:4} {title} [{name}]")
