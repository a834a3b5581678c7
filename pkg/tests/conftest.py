import pytest

from latticechaos.integrate import warm_up


@pytest.fixture(scope="session", autouse=True)
def _compile_kernels():
    # JIT-compile all integration kernels once per session
    warm_up()
