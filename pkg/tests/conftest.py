import http.server
import sys
import threading
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"

_criteria: dict[int, list[str]] = {}


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def pdb_server(tmp_path):
    """Local HTTP server standing in for the PDB archive.

    Serves ``<ID>.pdb`` from a dict; ``server.hits`` counts requests.
    """
    files: dict[str, bytes] = {}
    hits = []

    class Handler(http.server.BaseHTTPRequestHandler):
        def do_GET(self):
            hits.append(self.path)
            name = self.path.rsplit("/", 1)[-1]
            if name in files:
                body = files[name]
                self.send_response(200)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
            else:
                self.send_error(404)

        def log_message(self, *args):
            pass

    srv = http.server.ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    srv.files = files
    srv.hits = hits
    srv.base_url = f"http://127.0.0.1:{srv.server_address[1]}/download"
    yield srv
    srv.shutdown()
    srv.server_close()


def pytest_runtest_logreport(report):
    if report.when == "setup" and report.passed:
        return
    if report.when not in ("setup", "call"):
        return
    for name in report.keywords:
        if name.startswith("criterion_"):
            num = int(name.split("_", 1)[1])
            outcome = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
            _criteria.setdefault(num, []).append(outcome)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            item.keywords[f"criterion_{m.args[0]}"] = True


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        outcomes = _criteria[num]
        status = "FAIL" if "FAIL" in outcomes else ("SKIP" if "PASS" not in outcomes else "PASS")
        terminalreporter.write_line(f"criterion {num:2d}: {status} ({len(outcomes)} check(s))")
