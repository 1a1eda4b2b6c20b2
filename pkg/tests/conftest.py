import json
import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture
def golden_doc():
    return json.loads((DATA / "golden_quasimodel.json").read_text())
