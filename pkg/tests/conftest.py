import shlex
import sys
from pathlib import Path

import pytest

FAKE_ORACLE = Path(__file__).with_name("fake_oracle.py")


@pytest.fixture
def fake_oracle_cmd():
    return f"{shlex.quote(sys.executable)} {shlex.quote(str(FAKE_ORACLE))}"


@pytest.fixture
def with_fake_oracle(monkeypatch, fake_oracle_cmd):
    monkeypatch.setenv("QU_ORACLE_CMD", fake_oracle_cmd)
    monkeypatch.delenv("FAKE_ORACLE_MODE", raising=False)
    return fake_oracle_cmd
