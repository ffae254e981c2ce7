import os
import subprocess
import sys

import numpy as np
import pytest

from artcode_mr import _kernels
from artcode_mr.artcode.render import GenSpec, render

needs_compiled = pytest.mark.skipif(_kernels.compiled is None, reason="compiled kernels not built")


def _backend_in_subprocess(pure):
    env = dict(os.environ, ARTCODE_MR_PURE="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", "import artcode_mr._kernels as k; print(k.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    return out.stdout.strip()


def test_fallback_can_be_forced():
    assert _backend_in_subprocess(pure=True) == "python"


@needs_compiled
def test_compiled_is_the_default_when_built():
    assert _backend_in_subprocess(pure=False) == "compiled"


@needs_compiled
def test_backends_label_a_marker_identically():
    img = render(GenSpec(code="1-2-2-3-5", seed=4, copies=3, background=True))
    mask = np.zeros((img.height + 2, img.width + 2), dtype=bool)
    mask[1:-1, 1:-1] = img.data < 128
    for conn, m in ((4, mask), (8, ~mask)):
        a, na = _kernels.compiled.label_mask(m, conn)
        b, nb = _kernels.python.label_mask(m, conn)
        assert na == nb and np.array_equal(np.asarray(a), np.asarray(b))


def test_label_mask_edge_cases():
    for backend in filter(None, (_kernels.python, _kernels.compiled)):
        lab, n = backend.label_mask(np.zeros((3, 4), dtype=bool), 4)
        assert n == 0 and not np.asarray(lab).any()
        lab, n = backend.label_mask(np.ones((3, 4), dtype=bool), 8)
        assert n == 1 and np.all(np.asarray(lab) == 1)
