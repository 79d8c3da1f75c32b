"""Backend selection and compiled/numpy parity."""

import subprocess
import sys

import numpy as np
import pytest

from conftest import make_blob_set
from kqkit import kernels
from kqkit import _pairwise_py as fallback


def test_a_backend_is_active() -> None:
    assert kernels.backend_name() in ("compiled", "numpy")
    assert kernels.within_class is not None


def test_env_var_forces_fallback() -> None:
    out = subprocess.run(
        [sys.executable, "-c", "import kqkit.kernels as k; print(k.backend_name())"],
        env={"KQKIT_NO_EXT": "1", "PATH": "/usr/bin:/bin"},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "numpy"


@pytest.mark.skipif(kernels.backend_name() != "compiled", reason="extension not built")
def test_backends_agree(rng) -> None:
    compiled = kernels._impl
    for _ in range(8):
        s = make_blob_set(rng, max_samples=60)
        data = np.ascontiguousarray(s.data, dtype=np.float64)
        labels = s.labels.astype(np.int64)
        norms = np.linalg.norm(data, axis=1)
        groups = [np.flatnonzero(labels == c) for c in range(s.num_classes)]
        for idx in groups:
            if idx.size < 2:
                continue
            x, n = np.ascontiguousarray(data[idx]), np.ascontiguousarray(norms[idx])
            a = compiled.within_class(x, n)
            b = fallback.within_class(x, n)
            assert a[0] == pytest.approx(b[0], rel=1e-12)
            assert a[1] == pytest.approx(b[1], rel=1e-12)
        for ai in range(len(groups)):
            for bi in range(ai + 1, len(groups)):
                ia, ib = groups[ai], groups[bi]
                if not (ia.size and ib.size):
                    continue
                xa, na = np.ascontiguousarray(data[ia]), np.ascontiguousarray(norms[ia])
                xb, nb = np.ascontiguousarray(data[ib]), np.ascontiguousarray(norms[ib])
                a = compiled.between_class(xa, na, xb, nb)
                b = fallback.between_class(xa, na, xb, nb)
                assert a[0] == pytest.approx(b[0], rel=1e-12)
                assert a[1] == pytest.approx(b[1], rel=1e-12)


def test_kernel_input_validation() -> None:
    one = np.ones((1, 3))
    n = np.ones(1)
    with pytest.raises(ValueError):
        kernels.within_class(one, n)
    with pytest.raises(ValueError):
        fallback.within_class(one, n)
