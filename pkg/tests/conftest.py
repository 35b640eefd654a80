import numpy as np
import pytest

from altseq import (
    CandidateSet,
    DistributionFamily,
    ModelParams,
    PriorSpec,
    Schedule,
    TestConfig,
    UseProfile,
)

# Glass-fiber bench constants used throughout the suite.
SIGMA_ULT = 1339.67
THETA = ModelParams(A=0.00157, B=0.3188, nu=0.7259)

# one line per acceptance criterion, printed after the run summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

# domain object, not a test case
TestConfig.__test__ = False


@pytest.fixture
def cfg():
    return TestConfig(h=2.0, R=0.1, alpha=0.0, sigma_ult=SIGMA_ULT,
                      censor_time=2.4e9)


@pytest.fixture
def sev_cfg(cfg):
    import dataclasses
    return dataclasses.replace(cfg, family=DistributionFamily.WEIBULL)


@pytest.fixture
def theta():
    return THETA


@pytest.fixture
def profile():
    qs = tuple(float(q) for q in np.round(np.arange(0.05, 0.2501, 0.05), 10))
    return UseProfile.uniform(tuple(q * SIGMA_ULT for q in qs))


@pytest.fixture
def candidates():
    return CandidateSet(fractions=(0.35, 0.45, 0.55, 0.65, 0.75))


@pytest.fixture
def prior():
    return PriorSpec(A_range=(1e-4, 1e-2), B_range=(0.05, 1.5),
                     nu2_shape=3.0, nu2_scale=1.0)


@pytest.fixture
def schedule():
    return Schedule(n_total=6, n_d=2)
