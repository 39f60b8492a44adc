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



from tracelink.model import (
    EGRESS,
    HTTP,
    INGRESS,
    CallGraph,
    Span,
)


GRAPH = CallGraph("s", [("t", HTTP)])


def ingress(span_id, start, end, service="s"):
    return Span(span_id, INGRESS, service, 1, start, end, HTTP)


def egress(span_id, start, end, service="s", peer="t"):
    return Span(span_id, EGRESS, service, 1, start, end, HTTP, peer_service=peer)


def two_requests():
    """ Two overlapping ingress spans of ``s``, each making one call to
    ``t``. The first truly made ``e1``, the second ``e2``.
    """
    return [ingress("i1", 0, 1000), ingress("i2", 100, 1200)], [egress("e1", 100, 600), egress("e2", 200, 700)]
