#!/usr/bin/env python
# -*- encoding: utf-8 -*-

# Copyright (c) 2020-2026 "Tracelink,"
# Tracelink Contributors
#
# This file is part of Tracelink.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.



from io import StringIO
from logging import (
    INFO,
    getLogger,
)

import pytest

from tracelink.debug import (
    Watcher,
    tag_of,
    watch,
)

# python -m pytest tests/unit/test_debug.py -s -v


def test_watch_sends_records_to_the_stream():
    out = StringIO()
    watcher = watch("tracelink.test", out=out, colour=False)
    try:
        getLogger("tracelink.test").debug("[TEST]  hello")
    finally:
        watcher.stop()
    assert "DEBUG" in out.getvalue()
    assert "[TEST]  hello" in out.getvalue()


def test_stopped_watcher_is_silent():
    out = StringIO()
    watch("tracelink.test", out=out, colour=False).stop()
    getLogger("tracelink.test").warning("[TEST]  unseen")
    assert out.getvalue() == ""


def test_level_filters_records():
    out = StringIO()
    with Watcher("tracelink.test", colour=False) as watcher:
        watcher.watch(INFO, out)
        getLogger("tracelink.test").debug("[TEST]  quiet")
        getLogger("tracelink.test").info("[TEST]  loud")
    assert "quiet" not in out.getvalue()
    assert "loud" in out.getvalue()


def test_colour_codes_wrap_records():
    out = StringIO()
    watcher = watch("tracelink.test", level=INFO, out=out)
    try:
        getLogger("tracelink.test").info("[TEST]  colour")
    finally:
        watcher.stop()
    assert out.getvalue().startswith("\x1b[37m")
    assert out.getvalue().rstrip("\n").endswith("\x1b[0m")


def test_tags_limit_the_records():
    out = StringIO()
    watcher = watch("tracelink.test", out=out, colour=False, tags=["fit", "[BENCH]"])
    try:
        log = getLogger("tracelink.test")
        log.debug("[FIT]  kept")
        log.debug("[BENCH]  also kept")
        log.debug("[ASSIGN]  dropped")
        log.debug("untagged")
    finally:
        watcher.stop()
    text = out.getvalue()
    assert "kept" in text and "also kept" in text and "untagged" in text
    assert "dropped" not in text


def test_records_carry_elapsed_milliseconds():
    out = StringIO()
    watcher = watch("tracelink.test", out=out, colour=False)
    try:
        getLogger("tracelink.test").info("[TEST]  timed")
    finally:
        watcher.stop()
    elapsed, rest = out.getvalue().split("ms", 1)
    assert float(elapsed) >= 0.0
    assert rest.split() == ["INFO", "[TEST]", "timed"]


@pytest.mark.parametrize("message,tag", [
    ("[FIT]  position=1", "FIT"),
    ("[frontend]  correlated", "frontend"),
    ("no tag here", None),
    ("  [LATE]", None),
])
def test_tag_of(message, tag):
    assert tag_of(message) == tag
