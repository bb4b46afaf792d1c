import os

import pytest

ASSETS = os.path.join(os.path.dirname(__file__), "..", "assets")


@pytest.fixture(scope="session")
def test_font_bytes():
    with open(os.path.join(ASSETS, "wctest.ttf"), "rb") as fh:
        return fh.read()
