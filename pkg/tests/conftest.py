import pytest

import corepol


@pytest.fixture(scope="session")
def bundled():
    """Bundled molecule model with its file cavity/lineshape settings."""
    return corepol.load_model(corepol.bundled_model_path())
