import pytest

from bethpal import validate_beth
from bethpal.dynamic import BethKripkeModel


@pytest.fixture
def world_p():
    """Single node already carrying p: the exam day is settled."""
    return validate_beth(("a",), (), "a", {"a": {"p"}}, ("p", "q"))


@pytest.fixture
def world_q():
    return validate_beth(("a",), (), "a", {"a": {"q"}}, ("p", "q"))


@pytest.fixture
def fork_pq():
    """Root below one p-leaf and one q-leaf: p|q and ~(p&q) hold at the root
    while neither atom is settled there."""
    return validate_beth(("a", "b", "c"), (("a", "b"), ("a", "c")), "a",
                         {"b": {"p"}, "c": {"q"}}, ("p", "q"))


@pytest.fixture
def fork_model(fork_pq):
    """The fork wrapped as a one-world model with a reflexive agent."""
    return BethKripkeModel({"s": fork_pq}, ("i",), {"i": {("s", "s")}})
