import sys
from pathlib import Path

# allow running the suite from a source checkout without installing
_SRC = Path(__file__).resolve().parent.parent / "src"
if str(_SRC) not in sys.path:
    sys.path.insert(0, str(_SRC))

import pytest

from realseal import (
    DeviceKeyPair,
    Registry,
    RegistryEntry,
    TRUSTED,
    keygen,
)

FIXTURE_SEED32 = bytes(range(32))


@pytest.fixture
def device_pair() -> DeviceKeyPair:
    return keygen("CAM-001", FIXTURE_SEED32)


@pytest.fixture
def trusted_registry(device_pair) -> Registry:
    return Registry((RegistryEntry(device_pair.device_id, TRUSTED,
                                   device_pair.public_key.hex()),))
