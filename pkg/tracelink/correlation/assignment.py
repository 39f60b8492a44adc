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
Greedy assignment with conflict resolution.

Ingress spans are visited once, in descending order of the gap between
their best and second best density scores. Each takes its best
candidate whose egress spans are all still free. When its best
candidate clashes with egress spans already taken, the ingress span and
every assigned ingress span linked to it, directly or through others,
by a shared candidate egress span form a conflict component. The
component is reassigned jointly to maximise first the number of
assigned ingress spans and then their total score.
"""


from collections import deque
from logging import getLogger
from math import inf

from tracelink.conf import CorrelatorConfig
from tracelink.model import (
    CandidateAssignment,
    CorrelationResult,
)


__all__ = [
    "SearchLimitExceeded",
    "joint_search",
    "greedy_assign",
]


log = getLogger("tracelink")


class SearchLimitExceeded(Exception):
    """ Raised inside :func:`joint_search` when the node limit is hit.
    """


def joint_search(options, node_limit=None):
    """ Choose at most one option per member so that no two chosen
    options share a key, maximising the number of members served and
    then the total score.

    :param options: per member, a list of ``(score, keys)`` pairs, best
                    first
    :param node_limit: search nodes allowed, or :const:`None`
    :raise SearchLimitExceeded: when more nodes than allowed are needed
    :return: (count, total score, chosen option index or :const:`None`
             per member)
    """
    members = sorted(range(len(options)), key=lambda i: (len(options[i]), i))
    ordered = [options[i] for i in members]
    size = len(ordered)
    available = [0] * (size + 1)
    best_rest = [0.0] * (size + 1)
    for i in range(size - 1, -1, -1):
        available[i] = available[i + 1] + (1 if ordered[i] else 0)
        best_rest[i] = best_rest[i + 1] + (max(score for score, _ in ordered[i]) if ordered[i] else 0.0)

    best = {"count": -1, "total": -inf, "picks": None}
    picks = [None] * size
    used = set()
    nodes = 0

    def search(i, count, total):
        nonlocal nodes
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            raise SearchLimitExceeded()
        if i == size:
            if count > best["count"] or (count == best["count"] and total > best["total"]):
                best.update(count=count, total=total, picks=list(picks))
            return
        reachable = count + available[i]
        if reachable < best["count"]:
            return
        if reachable == best["count"] and total + best_rest[i] <= best["total"]:
            return
        for index, (score, keys) in enumerate(ordered[i]):
            if used.isdisjoint(keys):
                used.update(keys)
                picks[i] = index
                search(i + 1, count + 1, total + score)
                used.difference_update(keys)
        picks[i] = None
        search(i + 1, count, total)

    search(0, 0, 0.0)
    chosen = [None] * size
    for position, member in enumerate(members):
        chosen[member] = best["picks"][position]
    return best["count"], best["total"], chosen


class _Assigner:

    def __init__(self, candidates, config):
        self.candidates = candidates
        self.config = config
        self.ranked = {}
        self.keys = {}
        self.owner = {}
        self.choice = {}
        self.approximate = []

    def free(self, keys, allowed=()):
        owner = self.owner
        return all(key not in owner or owner[key] in allowed for key in keys)

    def commit(self, ingress_id, row):
        self.choice[ingress_id] = row
        for key in self.keys[ingress_id][row]:
            self.owner[key] = ingress_id

    def release(self, ingress_id):
        row = self.choice.pop(ingress_id, None)
        if row is not None:
            for key in self.keys[ingress_id][row]:
                del self.owner[key]
        return row

    def first_free(self, ingress_id):
        for row in self.ranked[ingress_id]:
            if self.free(self.keys[ingress_id][row]):
                return row
        return None

    def order(self):
        entries = []
        for ingress_id, candidate_set in self.candidates.items():
            if not len(candidate_set):
                continue
            ranking = candidate_set.ranking().tolist()
            self.ranked[ingress_id] = ranking
            self.keys[ingress_id] = [tuple(row) for row in candidate_set.keys.tolist()]
            pds = candidate_set.pds
            gap = inf if len(ranking) < 2 else float(pds[ranking[0]] - pds[ranking[1]])
            entries.append((-gap, candidate_set.ingress.start_us, ingress_id))
        entries.sort()
        return [ingress_id for _, _, ingress_id in entries]

    def component(self, ingress_id):
        """ The ingress span and every assigned ingress span reachable
        from it through shared candidate egress spans. Collection stops
        once the component outgrows the exhaustive cap.
        """
        cap = int(self.config.exhaustive_cap)
        component = {ingress_id}
        queue = deque([ingress_id])
        while queue and len(component) <= cap:
            member = queue.popleft()
            for row in self.keys[member]:
                for key in row:
                    owner = self.owner.get(key)
                    if owner is not None and owner not in component:
                        component.add(owner)
                        queue.append(owner)
        return component

    def resolve(self, ingress_id):
        component = self.component(ingress_id)
        members = sorted(component, key=lambda i: (self.candidates[i].ingress.start_us, i))
        if len(members) > int(self.config.exhaustive_cap):
            self.settle_approximately(ingress_id, members)
            return
        previous = {member: self.release(member) for member in members}
        options = []
        for member in members:
            candidate_set = self.candidates[member]
            member_options = []
            rows = []
            for row in self.ranked[member]:
                row_keys = self.keys[member][row]
                if self.free(row_keys):
                    member_options.append((float(candidate_set.pds[row]), row_keys))
                    rows.append(row)
            options.append((member_options, rows))
        try:
            _, _, chosen = joint_search([member_options for member_options, _ in options],
                                        self.config.resolution_node_limit)
        except SearchLimitExceeded:
            for member, row in previous.items():
                if row is not None:
                    self.commit(member, row)
            self.settle_approximately(ingress_id, members)
            return
        for member, (_, rows), index in zip(members, options, chosen):
            if index is not None:
                self.commit(member, rows[index])

    def settle_approximately(self, ingress_id, members):
        self.approximate.append(tuple(members))
        log.warning("[ASSIGN]  conflict component of %d ingress spans resolved approximately", len(members))
        row = self.first_free(ingress_id)
        if row is not None:
            self.commit(ingress_id, row)

    def run(self):
        for ingress_id in self.order():
            top = self.ranked[ingress_id][0]
            if self.free(self.keys[ingress_id][top]):
                self.commit(ingress_id, top)
            else:
                self.resolve(ingress_id)
        return self.choice


def greedy_assign(candidates, config=None, service=None):
    """ Assign each ingress span at most one candidate so that no egress
    span is used twice.

    :param candidates: dict of ingress span id to scored
                       :class:`.CandidateSet`
    :return: :class:`.CorrelationResult`; ``approximate`` lists the
             conflict components that were too large for joint search
    """
    config = config or CorrelatorConfig()
    assigner = _Assigner(candidates, config)
    choice = assigner.run()
    result = CorrelationResult(service)
    for ingress_id, candidate_set in candidates.items():
        row = choice.get(ingress_id)
        if row is not None:
            result.assignments[ingress_id] = [CandidateAssignment(
                candidate_set.egress_ids(row), candidate_set.pds[row], candidate_set.cds[row])]
        elif len(candidate_set):
            result.unassigned.add(ingress_id)
        else:
            result.uncorrelatable.add(ingress_id)
    result.approximate = assigner.approximate
    result.chosen_rows = dict(choice)
    log.debug("[ASSIGN]  assigned=%d unassigned=%d uncorrelatable=%d approximate=%d", len(result.assignments),
              len(result.unassigned), len(result.uncorrelatable), len(result.approximate))
    return result
