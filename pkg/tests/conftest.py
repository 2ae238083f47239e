import shutil

import pytest

from topvol import census


@pytest.fixture
def census_copy(tmp_path):
    """A writable copy of the bundled census tables."""
    dest = tmp_path / "census"
    shutil.copytree(str(census.data_dir()), dest)
    return dest
