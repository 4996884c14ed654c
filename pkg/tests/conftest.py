import pytest

from surfmatch import build_decoding_graph, build_path_table


@pytest.fixture(scope="session")
def g32():
    return build_decoding_graph(3, 2, 0.01)


@pytest.fixture(scope="session")
def pt32(g32):
    return build_path_table(g32)


@pytest.fixture(scope="session")
def g3():
    return build_decoding_graph(3, 3, 0.01)


@pytest.fixture(scope="session")
def pt3(g3):
    return build_path_table(g3)


@pytest.fixture(scope="session")
def g5():
    return build_decoding_graph(5, 5, 0.003)


@pytest.fixture(scope="session")
def pt5(g5):
    return build_path_table(g5)


@pytest.fixture(scope="session")
def g7():
    return build_decoding_graph(7, 3, 0.01)


@pytest.fixture(scope="session")
def pt7(g7):
    return build_path_table(g7)
