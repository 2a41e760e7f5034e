import pytest

from pebbletx.builtins import (
    all_prefixes_reversed,
    copier,
    iterated_reverse,
    modified_squaring,
    squaring,
    squaring_variant,
)


@pytest.fixture(scope="session")
def sq():
    return squaring("ab")


@pytest.fixture(scope="session")
def sq_variant():
    return squaring_variant("ab")


@pytest.fixture(scope="session")
def prefixes():
    return all_prefixes_reversed("ab")


@pytest.fixture(scope="session")
def itrev():
    return iterated_reverse("ab")


@pytest.fixture(scope="session")
def modsq():
    return modified_squaring("bcd")


@pytest.fixture(scope="session")
def ident():
    return copier("ab")
