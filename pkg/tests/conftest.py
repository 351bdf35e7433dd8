import numpy as np
import pytest

from kpod import subspace

ORTHO_TOL = 1e-8

# max |coeffs K coeffs^T - I| over every subspace fitted during the session
ORTHO_LOG = []


@pytest.fixture(autouse=True)
def check_mode_orthonormality(monkeypatch, request):
    """Record every fitted subspace and require orthonormal modes on teardown."""
    fitted = []
    original = subspace.fit

    def recording_fit(*args, **kwargs):
        m = original(*args, **kwargs)
        fitted.append(m)
        return m

    monkeypatch.setattr(subspace, "fit", recording_fit)
    yield fitted
    worst = 0.0
    for m in fitted:
        G = m.mode_gram()
        worst = max(worst, float(np.abs(G - np.eye(m.n_modes)).max()))
    if fitted:
        ORTHO_LOG.append((request.node.nodeid, len(fitted), worst))
    assert worst <= ORTHO_TOL, f"mode Gram deviates from identity by {worst:.3e}"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# criterion number -> (status, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(criterion, ok, detail):
    status = "PASS" if ok else "FAIL"
    ACCEPTANCE[criterion] = (status, detail)
    print(f"criterion {criterion}: {status} - {detail}")


def record_skip(criterion, detail):
    ACCEPTANCE[criterion] = ("SKIP", detail)
    print(f"criterion {criterion}: SKIP - {detail}")


def pytest_collection_modifyitems(items):
    # acceptance runs last so the orthonormality criterion sees every test above it
    items.sort(key=lambda item: item.fspath.basename == "test_acceptance.py")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {status} - {detail}")
