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
Conversions between integer microsecond timestamps and timezone-aware
datetimes.
"""


from datetime import datetime, timedelta

import pytz


__all__ = [
    "to_datetime",
    "from_datetime",
    "format_us",
    "parse_us",
]


EPOCH = datetime(1970, 1, 1, tzinfo=pytz.utc)

ONE_MICROSECOND = timedelta(microseconds=1)

FORMATS = (
    "%Y-%m-%d %H:%M:%S.%f",
    "%Y-%m-%dT%H:%M:%S.%f",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%dT%H:%M:%S",
)


def _zone(tz):
    if tz is None:
        return pytz.utc
    if isinstance(tz, str):
        return pytz.timezone(tz)
    return tz


def to_datetime(us, tz="UTC"):
    """ Convert microseconds since the epoch to an aware datetime in
    ``tz`` (a zone name or a pytz zone).
    """
    return (EPOCH + timedelta(microseconds=int(us))).astimezone(_zone(tz))


def from_datetime(dt, tz="UTC"):
    """ Convert a datetime to microseconds since the epoch. Naive
    datetimes are localized to ``tz`` first.
    """
    if dt.tzinfo is None:
        dt = _zone(tz).localize(dt)
    return (dt - EPOCH) // ONE_MICROSECOND


def format_us(us, tz="UTC"):
    """ Render a microsecond timestamp with microsecond precision and
    the zone abbreviation.
    """
    return to_datetime(us, tz).strftime("%Y-%m-%d %H:%M:%S.%f %Z")


def parse_us(text, tz="UTC", date=None):
    """ Parse a wall-clock timestamp into microseconds since the epoch.

    ``text`` may be a full date and time, or a bare time of day such as
    ``08:00:01.001``, in which case ``date`` (default 1970-01-01)
    supplies the day.
    """
    text = text.strip()
    if "-" not in text:
        day = date or datetime(1970, 1, 1).date()
        text = "%s %s" % (day.isoformat(), text)
    for fmt in FORMATS:
        try:
            dt = datetime.strptime(text, fmt)
        except ValueError:
            continue
        return from_datetime(dt, tz)
    raise ValueError("Unrecognised timestamp %r" % text)
