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
Rendering of experiment rows as CSV, JSON or a set of markdown tables.
"""


import csv
import json
from collections import defaultdict
from io import StringIO

import numpy as np

from tracelink.bench.metrics import MetricsRow
from tracelink.exceptions import ReportError


__all__ = [
    "CSV",
    "JSON",
    "MARKDOWN",
    "FORMATS",
    "FORMAT_ALIASES",
    "report",
]


CSV = "csv"
JSON = "json"
MARKDOWN = "markdown"

FORMATS = (CSV, JSON, MARKDOWN)

#: Other accepted spellings of format names
FORMAT_ALIASES = {
    "markdown_table": MARKDOWN,
}

COLUMNS = MetricsRow._fields

MULTI_CANDIDATE_ALGORITHMS = ("greedy", "greedy_multi")


def _csv(rows):
    out = StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow(["" if value is None else value for value in row])
    return out.getvalue()


def _json(rows):
    return json.dumps([row.to_dict() for row in rows], indent=2, allow_nan=False) + "\n"


def _mean(values):
    values = [value for value in values if value is not None]
    if not values:
        return None
    return float(np.mean(values))


def _number(value, pattern="%.4f"):
    return "-" if value is None else pattern % value


def _pivot(rows, cell, algorithms=None):
    """ Tabulate ``cell(rows of one group)`` with one table row per
    (algorithm, service) and one column per concurrency level.
    """
    levels = sorted({row.concurrency for row in rows})
    groups = defaultdict(list)
    for row in rows:
        if algorithms is None or row.algorithm in algorithms:
            groups[(row.algorithm, row.service, row.concurrency)].append(row)
    keys = []
    for row in rows:
        key = (row.algorithm, row.service)
        if (algorithms is None or row.algorithm in algorithms) and key not in keys:
            keys.append(key)
    lines = ["| algorithm | service | %s |" % " | ".join(str(level) for level in levels),
             "|---|---|" + "---|" * len(levels)]
    for algorithm, service in keys:
        cells = [cell(groups[(algorithm, service, level)]) if groups.get((algorithm, service, level)) else ""
                 for level in levels]
        lines.append("| %s | %s | %s |" % (algorithm, service, " | ".join(cells)))
    return lines


def _accuracy(group):
    return _number(_mean(row.span_accuracy for row in group))


def _ambiguity(group):
    return " / ".join(_number(_mean(getattr(row, name) for row in group)) for name in (
        "wrong_with_lower_true_pds_fraction", "ambiguity_ratio_10pct", "ambiguity_ratio_15pct"))


def _runtime(group):
    return " / ".join(_number(_mean(getattr(row, name) for row in group), "%.1f") for name in (
        "candidate_find_ms", "correlate_ms"))


def _multi_candidate(group):
    return " / ".join(_number(_mean(getattr(row, name) for row in group)) for name in (
        "span_accuracy", "span_overhead_rate"))


def _markdown(rows):
    lines = ["## accuracy", "", "Span-level accuracy, mean over seeds.", ""]
    lines.extend(_pivot(rows, _accuracy))
    lines.extend(["", "## ambiguity", "",
                  "Wrong with lower true score / ambiguous at 10% / ambiguous at 15%.", ""])
    lines.extend(_pivot(rows, _ambiguity))
    lines.extend(["", "## runtime", "", "Candidate finding ms / correlation ms, mean over seeds.", ""])
    lines.extend(_pivot(rows, _runtime))
    lines.extend(["", "## multi_candidate", "", "Span-level accuracy / span overhead rate.", ""])
    if any(row.algorithm in MULTI_CANDIDATE_ALGORITHMS for row in rows):
        lines.extend(_pivot(rows, _multi_candidate, MULTI_CANDIDATE_ALGORITHMS))
    else:
        lines.append("No runs.")
    return "\n".join(lines) + "\n"


def report(rows, format=CSV):
    """ Render experiment rows.

    :param rows: :class:`.MetricsRow` objects
    :param format: :const:`CSV`, :const:`JSON` or :const:`MARKDOWN`
    :raise ReportError: if there are no rows
    :return: UTF-8 encoded bytes
    """
    rows = list(rows)
    if not rows:
        raise ReportError("Nothing to report")
    format = FORMAT_ALIASES.get(format, format)
    if format == CSV:
        text = _csv(rows)
    elif format == JSON:
        text = _json(rows)
    elif format == MARKDOWN:
        text = _markdown(rows)
    else:
        raise ValueError("Unknown report format %r (expected one of %s)" % (format, ", ".join(FORMATS)))
    return text.encode("utf-8")
