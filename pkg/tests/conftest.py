"""Shared fixtures and the hypothesis profile for the test suite."""

import os
import sys

import pytest
from hypothesis import settings as hypothesis_settings

ROOT_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT_DIR not in sys.path:
    sys.path.insert(0, ROOT_DIR)

from app.models.entropy import KernelPolicy  # noqa: E402
from app.phi.catalog import catalog_specs  # noqa: E402

# Seeded and without deadlines: eigensolver timings vary between machines
hypothesis_settings.register_profile("opentropy", derandomize=True, deadline=None, max_examples=25)
hypothesis_settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "opentropy"))


@pytest.fixture
def policy():
    return KernelPolicy()


@pytest.fixture(params=catalog_specs(), ids=lambda spec: spec.label)
def catalog_phi(request):
    return request.param
