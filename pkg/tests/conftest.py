import pytest

from tmkit.dsl import parse
from tmkit.models import StaticModel
from tmkit.params import CORPUS_DIR
from tmkit.settings import settings


def load_corpus_model(name: str) -> StaticModel:
    """Parse a bundled corpus file, failing the test on any diagnostic"""
    result = parse((CORPUS_DIR / name).read_text(encoding='utf-8'), name)
    assert result.ok, '\n'.join(str(x) for x in result.diagnostics)
    return result.model


def model_of(text: str) -> StaticModel:
    result = parse(text)
    assert result.ok, '\n'.join(str(x) for x in result.diagnostics)
    return result.model


@pytest.fixture(autouse=True)
def default_settings():
    settings.reset()
    yield
    settings.reset()


@pytest.fixture
def chair() -> StaticModel:
    return load_corpus_model('chair.tm')


@pytest.fixture
def chair_object_bad() -> StaticModel:
    return load_corpus_model('chair-object-bad.tm')


@pytest.fixture
def customer() -> StaticModel:
    return load_corpus_model('customer.tm')


@pytest.fixture
def withdrawal() -> StaticModel:
    return load_corpus_model('withdrawal.tm')


@pytest.fixture
def playing() -> StaticModel:
    return load_corpus_model('playing.tm')


@pytest.fixture
def order() -> StaticModel:
    return load_corpus_model('order.tm')
