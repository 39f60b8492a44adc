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
Line-delimited record formats for spans, events and correlation
results, and YAML documents for call graphs, ground truth and fitted
delay models.

Line formats write one JSON object per line with a fixed key order, so
the same records always serialise to the same bytes.
"""


import json
from io import TextIOBase
from logging import getLogger

import yaml

from tracelink.exceptions import (
    IntegrityError,
    ParseError,
    SpecError,
    TracelinkError,
)
from tracelink.model import (
    CallGraph,
    CandidateAssignment,
    CorrelationResult,
    EventRecord,
    GroundTruth,
    Span,
)


__all__ = [
    "read_spans",
    "write_spans",
    "read_events",
    "write_events",
    "read_results",
    "write_results",
    "load_call_graphs",
    "dump_call_graphs",
    "load_ground_truth",
    "dump_ground_truth",
    "load_models",
    "dump_models",
    "load_workload",
    "dump_workload",
    "load_services",
    "dump_services",
]


log = getLogger("tracelink")

JSONL = "jsonl"

SPAN_FIELDS = ("span_id", "kind", "service", "pid", "start_us", "end_us", "protocol",
               "parent_span_id", "trace_id", "peer_service", "duplicate_of")

EVENT_FIELDS = ("remote", "local", "syscall", "protocol", "stream_id", "pid", "ts_us",
                "prop_span_id", "span_id", "token")

RESULT_FIELDS = ("service", "ingress_id", "egress", "pds", "cds", "duplicated")

_SafeLoader = getattr(yaml, "CSafeLoader", yaml.SafeLoader)
_SafeDumper = getattr(yaml, "CSafeDumper", yaml.SafeDumper)


def _check_format(format):
    if format != JSONL:
        raise ValueError("Unsupported record format %r" % format)


def _dumps(record):
    return json.dumps(record, separators=(",", ":"), allow_nan=False)


def _write_lines(records, sink):
    text = isinstance(sink, TextIOBase)
    for record in records:
        line = _dumps(record) + "\n"
        sink.write(line if text else line.encode("utf-8"))


def _read_lines(source):
    """ Yield (line number, decoded object) for every non-blank line.
    """
    for number, line in enumerate(source, start=1):
        if isinstance(line, bytes):
            try:
                line = line.decode("utf-8")
            except UnicodeDecodeError as error:
                raise ParseError("Invalid UTF-8: %s" % error, line=number) from error
        if not line.strip():
            continue
        try:
            value = json.loads(line)
        except ValueError as error:
            raise ParseError("Malformed record: %s" % error, line=number) from error
        if not isinstance(value, dict):
            raise ParseError("Record is not an object", line=number)
        yield number, value


def _field(record, key, number, required=True):
    try:
        return record[key]
    except KeyError:
        if required:
            raise ParseError("Missing field %r" % key, line=number)
        return None


def span_to_record(span):
    return dict(zip(SPAN_FIELDS, span))


def record_to_span(record, number=None):
    values = [_field(record, key, number, required=index < 7) for index, key in enumerate(SPAN_FIELDS)]
    try:
        return Span(*values)
    except IntegrityError as error:
        if number is not None:
            error.args = ("line %d: %s" % (number, error.args[0]),)
        raise
    except TracelinkError as error:
        raise ParseError(str(error), line=number) from error
    except (TypeError, ValueError) as error:
        raise ParseError("Invalid span record: %s" % error, line=number) from error


def read_spans(source, format=JSONL):
    """ Read spans from a line-delimited byte (or text) stream, one span
    per line, in file order.

    :raise ParseError: for a malformed line
    :raise IntegrityError: for a span ending before it starts, or a
                           span id seen twice
    """
    _check_format(format)
    spans = []
    seen = set()
    for number, record in _read_lines(source):
        span = record_to_span(record, number)
        if span.span_id in seen:
            raise IntegrityError("line %d: duplicate span id %s" % (number, span.span_id), span_id=span.span_id)
        seen.add(span.span_id)
        spans.append(span)
    log.debug("[SERIALIZE]  READ spans=%d", len(spans))
    return spans


def write_spans(spans, sink, format=JSONL):
    """ Write spans to a byte (or text) stream, one per line.
    """
    _check_format(format)
    _write_lines(map(span_to_record, spans), sink)


def event_to_record(event):
    return dict(zip(EVENT_FIELDS, event))


def read_events(source, format=JSONL):
    """ Read event records from a line-delimited stream, in file order.
    """
    _check_format(format)
    events = []
    for number, record in _read_lines(source):
        values = [_field(record, key, number, required=index < 7) for index, key in enumerate(EVENT_FIELDS)]
        try:
            events.append(EventRecord(*values))
        except (TracelinkError, TypeError, ValueError) as error:
            raise ParseError("Invalid event record: %s" % error, line=number) from error
    return events


def write_events(events, sink, format=JSONL):
    _check_format(format)
    _write_lines(map(event_to_record, events), sink)


def write_results(results, sink, format=JSONL):
    """ Write correlation results, one line per emitted assignment.
    Ingress spans left without an assignment are written with a null
    egress tuple.

    :param results: a :class:`.CorrelationResult` or a mapping of
                    service name to results
    """
    _check_format(format)
    if isinstance(results, CorrelationResult):
        results = {results.service: results}

    def records():
        for service in sorted(results):
            result = results[service]
            for ingress_id in sorted(result.assignments):
                for assignment in result.assignments[ingress_id]:
                    yield {
                        "service": service,
                        "ingress_id": ingress_id,
                        "egress": list(assignment.egress_ids),
                        "pds": assignment.pds,
                        "cds": assignment.cds,
                        "duplicated": list(assignment.duplicated),
                    }
            for ingress_id in sorted(result.unassigned | result.uncorrelatable):
                yield {
                    "service": service,
                    "ingress_id": ingress_id,
                    "egress": None,
                    "pds": None,
                    "cds": None,
                    "duplicated": None,
                    "uncorrelatable": ingress_id in result.uncorrelatable,
                }

    _write_lines(records(), sink)


def read_results(source, format=JSONL):
    """ Read correlation results back into a mapping of service name to
    :class:`.CorrelationResult`.
    """
    _check_format(format)
    results = {}
    for number, record in _read_lines(source):
        service, ingress_id, egress, pds, cds, duplicated = (
            _field(record, key, number) for key in RESULT_FIELDS)
        result = results.get(service)
        if result is None:
            result = results[service] = CorrelationResult(service)
        if egress is None:
            if record.get("uncorrelatable"):
                result.uncorrelatable.add(ingress_id)
            else:
                result.unassigned.add(ingress_id)
            continue
        try:
            assignment = CandidateAssignment(egress, pds, cds, duplicated)
        except (TracelinkError, TypeError, ValueError) as error:
            raise ParseError("Invalid result record: %s" % error, line=number) from error
        emitted = result.assignments.setdefault(ingress_id, [])
        emitted.append(assignment)
        if len(emitted) > 1 or assignment.is_duplicated:
            result.multi_candidate = True
    return results


def load_call_graphs(stream):
    """ Load call graphs from a YAML stream holding one document per
    service, keyed by service name.
    """
    graphs = {}
    try:
        documents = list(yaml.load_all(stream, Loader=_SafeLoader))
    except yaml.YAMLError as error:
        raise SpecError("Malformed call graph file: %s" % error) from error
    for document in documents:
        if document is None:
            continue
        graph = CallGraph.from_dict(document)
        if graph.service in graphs:
            raise SpecError("Call graph of %s defined twice" % graph.service)
        graphs[graph.service] = graph
    return graphs


def dump_call_graphs(graphs, stream=None):
    if isinstance(graphs, dict):
        graphs = [graphs[service] for service in sorted(graphs)]
    return yaml.dump_all([graph.to_dict() for graph in graphs], stream,
                         Dumper=_SafeDumper, sort_keys=False, default_flow_style=False)


def load_ground_truth(stream):
    """ Load a :class:`.GroundTruth` from a YAML document. Overlapping
    tuples are rejected with :class:`.IntegrityError`.
    """
    document = yaml.load(stream, Loader=_SafeLoader) or {}
    return GroundTruth(document.get("tuples"), document.get("parents"), document.get("requests"))


def dump_ground_truth(truth, stream=None):
    document = {
        "tuples": {ingress_id: list(truth[ingress_id]) for ingress_id in sorted(truth)},
        "parents": {child: truth.parents[child] for child in sorted(truth.parents)},
        "requests": [list(members) for members in truth.requests],
    }
    return yaml.dump(document, stream, Dumper=_SafeDumper, sort_keys=False, default_flow_style=None)


def load_models(stream):
    """ Load cached delay models, returning a mapping of service name
    to the list of models ordered by delay position.
    """
    from tracelink.stats.models import DelayModel

    models = {}
    for document in yaml.load_all(stream, Loader=_SafeLoader):
        if document is None:
            continue
        service = document.get("service")
        models[service] = sorted((DelayModel.from_dict(item) for item in document.get("models", ())),
                                 key=lambda model: model.position)
    return models


def dump_models(models, stream=None):
    """ Dump delay models, given as a mapping of service name to model
    list, one YAML document per service.
    """
    documents = [{"service": service, "models": [model.to_dict() for model in models[service]]}
                 for service in sorted(models)]
    return yaml.dump_all(documents, stream, Dumper=_SafeDumper, sort_keys=False, default_flow_style=False)


def load_workload(stream):
    """ Load a :class:`.WorkloadSpec` from a YAML document.
    """
    from tracelink.workload.generator import WorkloadSpec

    try:
        document = yaml.load(stream, Loader=_SafeLoader)
    except yaml.YAMLError as error:
        raise SpecError("Malformed workload file: %s" % error) from error
    if not isinstance(document, dict):
        raise SpecError("Workload file does not hold a mapping")
    return WorkloadSpec.from_dict(document)


def dump_workload(spec, stream=None):
    return yaml.dump(spec.to_dict(), stream, Dumper=_SafeDumper, sort_keys=False, default_flow_style=False)


def load_services(stream):
    """ Load the process and listening address maps span building needs.

    :return: (service_of_pid, service_of_addr)
    """
    document = yaml.load(stream, Loader=_SafeLoader) or {}
    try:
        pids = {int(pid): service for pid, service in (document.get("pids") or {}).items()}
    except (AttributeError, TypeError, ValueError) as error:
        raise SpecError("Malformed services file: %s" % error) from error
    return pids, dict(document.get("addresses") or {})


def dump_services(service_of_pid, service_of_addr, stream=None):
    document = {
        "pids": {pid: service_of_pid[pid] for pid in sorted(service_of_pid)},
        "addresses": {addr: service_of_addr[addr] for addr in sorted(service_of_addr)},
    }
    return yaml.dump(document, stream, Dumper=_SafeDumper, sort_keys=False, default_flow_style=False)
