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


"""
Log output for following a run as it moves through its phases.

Records of the ``tracelink`` logger start with a bracketed tag naming
the phase that logged them, such as ``[SPANS]``, ``[FIT]``, ``[ASSIGN]``
or ``[BENCH]``, or the service being correlated. A :class:`Watcher`
prints them with the time elapsed since it started, and can be limited
to some of those tags.
"""


import re
from logging import CRITICAL, ERROR, WARNING, INFO, DEBUG, Filter, Formatter, StreamHandler, getLogger
from sys import stderr
from time import time


#: ANSI colour per log level
COLOURS = {
    CRITICAL: "\x1b[31;1m",     # bright red
    ERROR: "\x1b[33;1m",        # bright yellow
    WARNING: "\x1b[33m",        # yellow
    INFO: "\x1b[37m",           # white
    DEBUG: "\x1b[36m",          # cyan
}

TAG = re.compile(r"^\[([^\]]+)\]")


def tag_of(message):
    """ The leading bracketed tag of a log message, or :const:`None`.
    """
    match = TAG.match(message)
    return match.group(1) if match else None


class TagFilter(Filter):
    """ Passes records tagged with one of ``tags``, compared without
    regard to case. Untagged records always pass.
    """

    def __init__(self, tags):
        super(TagFilter, self).__init__()
        self.tags = frozenset(tag.strip("[] ").lower() for tag in tags)

    def filter(self, record):
        tag = tag_of(record.getMessage())
        return tag is None or tag.lower() in self.tags


class RunFormatter(Formatter):
    """ Prefixes records with the milliseconds elapsed since
    :meth:`restart`, colouring them by level when ``colour`` is set.
    """

    def __init__(self, colour=True):
        if colour:
            super(RunFormatter, self).__init__("%(elapsed)10.1fms  %(message)s")
        else:
            super(RunFormatter, self).__init__("%(elapsed)10.1fms  %(levelname)-7s  %(message)s")
        self.colour = colour
        self.started = time()

    def restart(self):
        self.started = time()

    def format(self, record):
        record.elapsed = max(record.created - self.started, 0.0) * 1000.0
        s = super(RunFormatter, self).format(record)
        colour = COLOURS.get(record.levelno) if self.colour else None
        if colour is None:
            return s
        return "%s%s\x1b[0m" % (colour, s)


class Watcher:
    """ Log watcher for following pipeline and experiment runs.

    :param logger_names: names of loggers to watch
    :param colour: use ANSI colours
    :param tags: only show records with one of these tags; all records
                 show when omitted
    """

    handlers = {}

    def __init__(self, *logger_names, colour=True, tags=None):
        super(Watcher, self).__init__()
        self.logger_names = logger_names
        self.loggers = [getLogger(name) for name in self.logger_names]
        self.formatter = RunFormatter(colour)
        self.filter = TagFilter(tags) if tags else None

    def __enter__(self):
        self.watch()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop()

    def watch(self, level=DEBUG, out=stderr):
        self.stop()
        self.formatter.restart()
        handler = StreamHandler(out)
        handler.setFormatter(self.formatter)
        if self.filter is not None:
            handler.addFilter(self.filter)
        for logger in self.loggers:
            self.handlers[logger.name] = handler
            logger.addHandler(handler)
            logger.setLevel(level)

    def stop(self):
        for logger in self.loggers:
            handler = self.handlers.pop(logger.name, None)
            if handler is not None:
                logger.removeHandler(handler)


def watch(*logger_names, level=DEBUG, out=stderr, colour=True, tags=None):
    """ Quick wrapper for using the Watcher.

    :return: Watcher instance
    """
    watcher = Watcher(*logger_names, colour=colour, tags=tags)
    watcher.watch(level, out)
    return watcher
