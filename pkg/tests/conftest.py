from __future__ import annotations

import os
from pathlib import Path

import pytest
from hypothesis import settings

from radon_kernel.plane_quadrature import QuadratureConfig
from radon_kernel.radial_core import RadialProfile
from radon_kernel.radon_transform import zero_scale
from radon_kernel.verify import load_or_build_weight, weight_key
from radon_kernel.weight_local import LocalWeightSettings

settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")

REPO = Path(__file__).resolve().parents[1]
CACHE_DIR = Path(os.environ.get("RADON_KERNEL_CACHE", REPO / ".cache"))

# criterion number -> (passed, message), filled by the acceptance tests
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def weight_cache_path(profile: RadialProfile, cfg: QuadratureConfig) -> Path:
    key = weight_key(profile, cfg, LocalWeightSettings(), 8192)
    return CACHE_DIR / f"weight_k{profile.k_max}_{key}.json"


@pytest.fixture(scope="session")
def cfg() -> QuadratureConfig:
    return QuadratureConfig()


@pytest.fixture(scope="session")
def profile8() -> RadialProfile:
    return RadialProfile(k_max=8)


@pytest.fixture(scope="session")
def weight8(profile8, cfg):
    """The k_max = 8 assembled weight, built once and cached on disk."""
    path = weight_cache_path(profile8, cfg)
    return load_or_build_weight(profile8, cfg, path)


@pytest.fixture(scope="session")
def weight8_path(weight8, profile8, cfg) -> Path:
    return weight_cache_path(profile8, cfg)


@pytest.fixture(scope="session")
def scale8(profile8, cfg) -> float:
    return zero_scale(profile8, cfg)


@pytest.fixture
def record_criterion():
    def record(n: int, passed: bool, message: str):
        ACCEPTANCE[n] = (passed, message)
        print(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {message}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, msg = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {msg}")
