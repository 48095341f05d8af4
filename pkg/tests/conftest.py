import numpy as np
import pytest

from tmlandcover import kernels
from tmlandcover.raster import SceneClass, SceneSpec

try:
    from tmlandcover import _ckernels  # noqa: F401

    HAVE_CYTHON = True
except ImportError:
    HAVE_CYTHON = False

BACKENDS = ["python", pytest.param("cython", marks=pytest.mark.skipif(
    not HAVE_CYTHON, reason="compiled kernels not built"))]


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run the test once per kernel backend."""
    monkeypatch.setattr(kernels, "_impl", kernels.get_backend(request.param))
    return request.param


def random_spec(rng, n_classes, n_bands, width, height, seed, spread=255.0, sigma=(1.0, 20.0)):
    fr = rng.dirichlet(np.ones(n_classes) * 3)
    fr = fr / fr.sum()
    fr[-1] = 1.0 - fr[:-1].sum()
    classes = tuple(
        SceneClass(
            label=i + 1,
            mean=tuple(rng.uniform(0, spread, n_bands)),
            sigma=tuple(rng.uniform(*sigma, n_bands)),
            fraction=float(fr[i]),
        )
        for i in range(n_classes)
    )
    return SceneSpec(classes, width, height, seed)


# acceptance summary -------------------------------------------------------

ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split("-")[0][2:])):
        status, detail = ACCEPTANCE_RESULTS[key]
        if isinstance(status, bool):
            status = "PASS" if status else "FAIL"
        terminalreporter.write_line(f"{status}  {key}  {detail}")
