"""Shared fixtures and tiny word-level oracles used across the suite."""

import itertools

import pytest

from viewsynth.automata import NWA, accepts, compile_regex
from viewsynth.parser import parse_instance, parse_regex

SEC6_SOUND = """
kind rpq
source a1 a2 a3
target b1 b2
map (a1|a3).(a2|a3) ~> b1.b2
"""

SEC6_EXACT = """
kind rpq
source a1 a2
target 0 1
map a1.a2 ~> 0.0|0.1|1.0
"""

CHAIN_CQ = """
kind cq
source a/2
target r/2 s/2
map q(x,y) :- a(x,y) ~> q(x,y) :- r(x,z), s(z,y)
"""


@pytest.fixture
def sec6_sound():
    return parse_instance(SEC6_SOUND)


@pytest.fixture
def sec6_exact():
    return parse_instance(SEC6_EXACT)


@pytest.fixture
def chain_cq():
    return parse_instance(CHAIN_CQ)


def rx(text, alphabet=None, two_way=False):
    """Compile a regex string to an NWA."""
    return compile_regex(parse_regex(text, alphabet, two_way=two_way))


def all_words(alphabet, max_len):
    """Every word over the alphabet up to the length bound, shortest first."""
    out = [()]
    for n in range(1, max_len + 1):
        out.extend(itertools.product(sorted(alphabet), repeat=n))
    return out


def bounded_language(a: NWA, alphabet, max_len):
    """Accepted words up to a bound, by direct word-by-word simulation."""
    return {w for w in all_words(alphabet, max_len) if accepts(a, w)}


def assert_same_language_bounded(a: NWA, b: NWA, alphabet, max_len):
    for w in all_words(alphabet, max_len):
        assert accepts(a, w) == accepts(b, w), f"disagree on {w!r}"


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion"):
        return
    status = "PASS" if report.passed else "FAIL"
    print(f"\n[acceptance] {name}: {status}", flush=True)
