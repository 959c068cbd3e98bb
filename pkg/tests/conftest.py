"""Shared strategies and fixtures for the suite."""

from __future__ import annotations

import hypothesis.strategies as st
import pytest
from hypothesis import HealthCheck, settings

from kforge.frames import Frame, rt_closure
from kforge.models import Model, VarSet

settings.register_profile(
    "suite", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")


@st.composite
def frames_(draw, max_points: int = 4, min_points: int = 0):
    n = draw(st.integers(min_points, max_points))
    rows = tuple(draw(st.integers(0, (1 << n) - 1)) for _ in range(n))
    return Frame(rows)


@st.composite
def preorders(draw, max_points: int = 4, min_points: int = 0):
    base = draw(frames_(max_points, min_points))
    return Frame(rt_closure(base))


@st.composite
def s4_models(draw, max_points: int = 4, max_vars: int = 2):
    frame = draw(preorders(max_points, min_points=1))
    names = ("x", "y", "z")[:draw(st.integers(0, max_vars))]
    variables = VarSet(names)
    full = variables.valuation_count
    val = tuple(draw(st.integers(0, full - 1)) for _ in range(frame.n))
    return Model(frame, variables, val)


@pytest.fixture(scope="session")
def var_x():
    return VarSet(("x",))
