import numpy as np
import pytest

from artcode_mr.artcode.dataset import generate_dataset
from artcode_mr.evaluation import FeatureBank
from artcode_mr.image import GrayImage
from artcode_mr.mr import build_masks


def raster(rows):
    """Build a GrayImage from strings: '#' is black, anything else white."""
    return GrayImage(np.array([[0 if ch == "#" else 255 for ch in r] for r in rows], dtype=np.uint8))


def ring_with_dots():
    """64x64 ring with two holes holding one and two dots."""
    a = np.full((64, 64), 255, dtype=np.uint8)
    a[4:60, 4:60] = 0
    a[10:54, 10:30] = 255  # hole 1
    a[10:54, 34:54] = 255  # hole 2
    a[28:34, 17:23] = 0
    a[16:22, 41:47] = 0
    a[40:46, 41:47] = 0
    return GrayImage(a)


@pytest.fixture(scope="session")
def study_data(tmp_path_factory):
    """The default 47/116 synthetic dataset (seed 42) with its feature bank."""
    out = tmp_path_factory.mktemp("study")
    manifest = generate_dataset(47, 116, seed=42, out_dir=out)
    bank = FeatureBank.from_manifest(manifest, build_masks((256, 256)))
    return manifest, bank


# --- acceptance reporting -------------------------------------------------

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (report.when != "call" and report.passed):
        return
    number, title = mark.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    _CRITERIA[number] = ("PASS" if report.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title, detail = _CRITERIA[number]
        line = f"criterion {number}: {status}  {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))


@pytest.fixture
def detail(request):
    """Attach a one-line measurement to the acceptance summary."""
    def add(text):
        request.node.user_properties.append(("detail", text))
    return add
