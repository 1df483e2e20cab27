from dataclasses import dataclass

import pytest

from bcsgap import ConstantKernel, GapSweep, MaterialSpec, SeparableKernel, build_grid, find_tc

ACCEPTANCE_LINES: list[str] = []


@dataclass
class Case:
    name: str
    spec: MaterialSpec
    grid: object
    sweep: GapSweep
    tc: float

    @property
    def kernel(self):
        return self.spec.kernel

    @property
    def zero(self):
        return self.sweep.zero_T()

    @property
    def delta(self):
        return float(self.zero.values.max())


def make_case(name, kernel, eps, b=1.0, n0=1.0, **grid_kw):
    grid = build_grid(eps, b, **grid_kw)
    spec = MaterialSpec(eps, b, n0, kernel)
    return Case(name, spec, grid, GapSweep(kernel, grid), find_tc(kernel, grid).tc)


@pytest.fixture(scope="session")
def const_case():
    return make_case("constant", ConstantKernel(0.3), 1e-3)


@pytest.fixture(scope="session")
def sep_case():
    return make_case("separable", SeparableKernel((0.5, 0.125)), 1e-3)


@pytest.fixture(scope="session")
def weak_case():
    return make_case("weak", ConstantKernel(0.25), 1e-4)


@pytest.fixture(scope="session")
def reference_cases(const_case, sep_case):
    return [const_case, sep_case]


@pytest.fixture
def acceptance():
    """Record one summary line per acceptance criterion."""

    def record(number, title, ok, detail):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
