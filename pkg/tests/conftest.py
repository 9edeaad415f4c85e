import os
from importlib import resources

import pytest
from hypothesis import HealthCheck, settings

from shallowc.codegen import translate_program
from shallowc.ir import parse_ir

settings.register_profile(
    'default', max_examples=200, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.register_profile('ci', max_examples=500, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get('HYPOTHESIS_PROFILE', 'default'))


def corpus_path() -> str:
    return str(resources.files('shallowc') / 'data' / 'corpus.ir')


def corpus_text() -> str:
    return (resources.files('shallowc') / 'data' / 'corpus.ir').read_text(encoding='utf-8')


@pytest.fixture(scope='session')
def corpus_file() -> str:
    return corpus_path()


@pytest.fixture(scope='session')
def corpus():
    return parse_ir(corpus_text())


@pytest.fixture(scope='session')
def corpus_tr(corpus):
    return translate_program(corpus)
