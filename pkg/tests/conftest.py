import os
from pathlib import Path

import pytest
from hypothesis import settings

from llmfoc.corpus import bad_cut, multifocus_proof, identity_variation

settings.register_profile("default", max_examples=60, deadline=None)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

PROOFS = Path(__file__).resolve().parent.parent / "proofs"


@pytest.fixture
def mfp():
    return multifocus_proof()


@pytest.fixture
def idvar():
    return identity_variation()


@pytest.fixture
def badcut():
    return bad_cut()


@pytest.fixture
def proofs_dir():
    return PROOFS
