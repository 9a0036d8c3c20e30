import dataclasses
import math

import pytest

from heraldpdc.config import reference_config
from heraldpdc.spectrum import build_joint_spectrum


@pytest.fixture(scope="session")
def cfg():
    return reference_config()


@pytest.fixture(scope="session")
def sset(cfg):
    return cfg.sellmeier()


@pytest.fixture(scope="session")
def cut(cfg):
    return cfg.cut()


def _build(cfg, pump=None, grid=None):
    return build_joint_spectrum(pump or cfg.pump, cfg.cut(), cfg.window, cfg.sellmeier(), grid or cfg.grid, cfg.geometry)


@pytest.fixture(scope="session")
def grid(cfg):
    return _build(cfg)


@pytest.fixture(scope="session")
def grid_doubled(cfg):
    return _build(cfg, grid=cfg.grid.scaled(2))


@pytest.fixture(scope="session")
def mono_grid(cfg):
    return _build(cfg, pump=dataclasses.replace(cfg.pump, duration_fwhm=math.inf))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
