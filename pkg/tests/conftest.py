import os

import pytest

# Keep the enumeration disk cache out of the picture for the whole suite;
# cache behaviour is tested explicitly with a temporary directory.
os.environ["UAILAB_CACHE_DIR"] = ""


@pytest.fixture
def cache_dir(tmp_path, monkeypatch):
    from uailab.utm import CACHE_ENV_VAR

    monkeypatch.setenv(CACHE_ENV_VAR, str(tmp_path))
    return tmp_path
