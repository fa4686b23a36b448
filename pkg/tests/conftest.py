import os
from pathlib import Path

import pytest


def wbc_file_location() -> Path:
    data_dir = os.environ.get("XCSER_DATA_DIR",
                              str(Path(__file__).resolve().parent.parent / "data"))
    return Path(data_dir) / "breast-cancer-wisconsin.data"


@pytest.fixture
def wbc_data_path() -> Path:
    path = wbc_file_location()
    if not path.exists():
        pytest.skip(f"canonical breast-cancer data not present at {path} "
                    f"(fetch with scripts/fetch_wbc.py)")
    return path
