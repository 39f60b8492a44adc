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
Event streams of simulated datasets, the inverse of span building.
"""


from tracelink.model import (
    INGRESS,
    RECV,
    SEND,
    EventRecord,
)


__all__ = [
    "emit_events",
]


def emit_events(dataset):
    """ Emit the socket events a probe would observe for ``dataset``:
    an ingress span opens with ``recv`` and closes with ``send``, an
    egress span the other way round. Opening events carry the span id;
    both sides of a cross-service call carry its request token.

    Events are ordered by timestamp. At equal timestamps opening events
    come first, so zero-length spans still pair up.
    """
    keyed = []
    wiring = dataset.wiring
    for order, span in enumerate(dataset.spans):
        wire = wiring[span.span_id]
        if span.kind == INGRESS:
            opening, closing = RECV, SEND
        else:
            opening, closing = SEND, RECV
        keyed.append(((span.start_us, 0, order), EventRecord(
            wire.remote_addr, wire.local_addr, opening, span.protocol, wire.stream_id, span.pid, span.start_us,
            span_id=span.span_id, token=wire.token)))
        keyed.append(((span.end_us, 1, order), EventRecord(
            wire.remote_addr, wire.local_addr, closing, span.protocol, wire.stream_id, span.pid, span.end_us)))
    keyed.sort(key=lambda item: item[0])
    return [event for _, event in keyed]
