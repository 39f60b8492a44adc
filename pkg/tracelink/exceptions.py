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
This module contains the core tracelink exceptions.

Library Errors
==============
+ TracelinkError
  + DataError
    + ParseError
    + IntegrityError
    + CoverageError
  + PipelineError
    + OrderingError
    + MappingError
  + ConfigurationError
    + SpecError
    + ParameterError
  + EstimationError
  + FitError
    + DegenerateModelError
  + OracleGuardError
  + ReportError

"""


class TracelinkError(Exception):
    """ Base class for all errors raised by this package.
    """


class DataError(TracelinkError):
    """ Raised when span, event or ground truth data is malformed or
    inconsistent.
    """


class ParseError(DataError):
    """ Raised when a line of a line-delimited record stream cannot be
    decoded. The offending (1-based) line number is kept in ``line``.
    """

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line

    def __str__(self):
        s = super().__str__()
        if self.line is not None:
            s = "line {}: {}".format(self.line, s)
        return s


class IntegrityError(DataError):
    """ Raised when records violate a type invariant: duplicate ids,
    end before start, overlapping ground truth, a span with two parents.
    """

    def __init__(self, message, span_id=None, edges=None):
        super().__init__(message)
        self.span_id = span_id
        self.edges = edges


class CoverageError(DataError):
    """ Raised when ground truth does not cover the spans being scored.
    """

    def __init__(self, message, missing=()):
        super().__init__(message)
        self.missing = tuple(missing)


class PipelineError(TracelinkError):
    """ Raised when an event stream cannot be folded into spans.
    """


class OrderingError(PipelineError):
    """ Raised when an event is older than the event before it.
    """


class MappingError(PipelineError):
    """ Raised when an event carries a process id that maps to no
    known service.
    """


class ConfigurationError(TracelinkError):
    """ Raised when there is an error concerning a configuration.
    """


class SpecError(ConfigurationError):
    """ Raised when a workload or distribution specification is invalid.
    """


class ParameterError(ConfigurationError):
    """ Raised when a runtime parameter is outside its valid range.
    """


class EstimationError(TracelinkError):
    """ Raised when mean delays cannot be estimated from the spans given.
    """


class FitError(TracelinkError):
    """ Raised when a delay distribution cannot be fitted.
    """

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class DegenerateModelError(FitError):
    """ Raised when a sample has no spread to fit.
    """


class OracleGuardError(TracelinkError):
    """ Raised when the exhaustive oracle is asked to enumerate a window
    larger than it is allowed to.
    """


class ReportError(TracelinkError):
    """ Raised when a report cannot be rendered.
    """
