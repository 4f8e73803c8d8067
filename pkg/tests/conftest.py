import numpy as np
import pytest

from subfield_ldpc import kernels
from subfield_ldpc.codes import random_regular_binary, random_relabel
from subfield_ldpc.gf import build_extension_rep, build_field
from subfield_ldpc.lattice import build_lattice, build_local_code

BACKENDS = kernels.available()


@pytest.fixture(scope="session")
def f16():
    return build_field(2, 4, (1, 1, 0, 0, 1))


@pytest.fixture(scope="session")
def rep16(f16):
    return build_extension_rep(f16, 2)


@pytest.fixture(scope="session")
def lat16(rep16):
    """GF(16) over GF(4) in the coordinate order whose first two positions are the raw coefficients."""
    return build_lattice(rep16, "systematic")


@pytest.fixture(scope="session")
def local16(lat16):
    return build_local_code(lat16)


@pytest.fixture(scope="session")
def small_gf16_code(f16):
    return random_relabel(random_regular_binary(24, 3, 6, seed=3), f16, seed=4)


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param



def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
