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
Command line front-end. Subcommands compose through files:

    tracelink simulate --preset frontend --concurrency 500 --out-dir run/
    tracelink build-spans --events run/events.jsonl --services run/services.yaml --out run/built.jsonl
    tracelink fit --spans run/spans.jsonl --call-graphs run/call_graphs.yaml --out run/models.yaml
    tracelink correlate --spans run/spans.jsonl --call-graphs run/call_graphs.yaml --out run/results.jsonl
    tracelink reconstruct --spans run/spans.jsonl --results run/results.jsonl --truth run/truth.yaml
    tracelink bench --preset hotel --levels 250,500 --seeds 3 --algorithms greedy,nearest_neighbor
"""


from argparse import ArgumentParser
from logging import (
    DEBUG,
    INFO,
    getLogger,
)
from os import makedirs
from os.path import join
import sys

from tracelink.bench import (
    ADAPTIVE,
    ALGORITHM_ALIASES,
    ALGORITHMS,
    CSV,
    FIXED,
    FORMAT_ALIASES,
    FORMATS,
    GREEDY,
    ExperimentSpec,
    report,
    run_experiment,
)
from tracelink.bench.experiment import DEFAULT_FIXED_THRESHOLD_US
from tracelink.conf import CorrelatorConfig
from tracelink.correlation import correlate_dataset
from tracelink.debug import watch
from tracelink.exceptions import TracelinkError
from tracelink.graph import (
    reconstruct,
    render_tree,
    trace_accuracy,
)
from tracelink.meta import (
    get_user_agent,
    package,
)
from tracelink.serialization import (
    dump_call_graphs,
    dump_ground_truth,
    dump_models,
    dump_services,
    dump_workload,
    load_call_graphs,
    load_ground_truth,
    load_models,
    load_services,
    load_workload,
    read_events,
    read_results,
    read_spans,
    write_events,
    write_results,
    write_spans,
)
from tracelink.spans import (
    build_spans,
    propagate_span_ids,
)
from tracelink.workload import (
    generate,
    measure_concurrency,
    preset,
    preset_names,
    retime,
)


__all__ = [
    "main",
    "build_parser",
]


log = getLogger("tracelink")


def _csv_list(text, convert=str):
    return [convert(item.strip()) for item in text.split(",") if item.strip()]


def _config(args, fixed=True):
    settings = {}
    keys = ("delta", "diff_threshold", "min_fit_samples", "ks_alpha", "gmm_max_components")
    if fixed:
        keys += ("fixed_threshold_us",)
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if getattr(args, "multi_candidate", False):
        settings["multi_candidate"] = True
    if getattr(args, "multi_candidate_quantile", None) is not None:
        settings["multi_candidate_quantile"] = args.multi_candidate_quantile
    return CorrelatorConfig(settings)


def _read_spans(path):
    with open(path, "rb") as source:
        return read_spans(source)


def _read_call_graphs(path):
    with open(path, "r", encoding="utf-8") as stream:
        return load_call_graphs(stream)


def simulate(args):
    if args.spec:
        with open(args.spec, "r", encoding="utf-8") as stream:
            spec = load_workload(stream)
        if args.requests is not None or args.seed is not None:
            spec = spec.replace(request_count=args.requests or spec.request_count,
                                seed=spec.seed if args.seed is None else args.seed)
    else:
        spec = preset(args.preset, args.requests, args.seed or 0)
    dataset = generate(spec)
    if args.concurrency is not None:
        dataset = retime(dataset, args.concurrency, spec.seed)
    makedirs(args.out_dir, exist_ok=True)
    with open(join(args.out_dir, "workload.yaml"), "w", encoding="utf-8") as stream:
        dump_workload(spec, stream)
    with open(join(args.out_dir, "spans.jsonl"), "wb") as sink:
        write_spans(dataset.spans, sink)
    with open(join(args.out_dir, "events.jsonl"), "wb") as sink:
        write_events(dataset.events, sink)
    with open(join(args.out_dir, "call_graphs.yaml"), "w", encoding="utf-8") as stream:
        dump_call_graphs(dataset.call_graphs, stream)
    with open(join(args.out_dir, "truth.yaml"), "w", encoding="utf-8") as stream:
        dump_ground_truth(dataset.ground_truth, stream)
    with open(join(args.out_dir, "services.yaml"), "w", encoding="utf-8") as stream:
        dump_services(dataset.service_of_pid, dataset.service_of_addr, stream)
    log.info("[SIMULATE]  %d requests, %d spans, concurrency %.1f", len(dataset.requests), len(dataset.spans),
             measure_concurrency(dataset))
    return 0


def build(args):
    with open(args.services, "r", encoding="utf-8") as stream:
        service_of_pid, service_of_addr = load_services(stream)
    with open(args.events, "rb") as source:
        events = list(read_events(source))
    if args.propagate:
        events = propagate_span_ids(events)
    result = build_spans(events, service_of_pid, service_of_addr)
    with open(args.out, "wb") as sink:
        write_spans(result.spans, sink)
    log.info("[BUILD]  %d events, %d spans, %d unclosed", result.event_count, len(result.spans),
             result.unclosed_count)
    return 0


def fit(args):
    spans = _read_spans(args.spans)
    results = correlate_dataset(spans, _read_call_graphs(args.call_graphs), _config(args))
    models = {service: result.models for service, result in results.items() if not result.degraded}
    for service in sorted(set(results) - set(models)):
        log.warning("[FIT]  no models for %s", service)
    with open(args.out, "w", encoding="utf-8") as stream:
        dump_models(models, stream)
    return 0


def run_correlate(args):
    spans = _read_spans(args.spans)
    models = None
    if args.models:
        with open(args.models, "r", encoding="utf-8") as stream:
            models = load_models(stream)
    results = correlate_dataset(spans, _read_call_graphs(args.call_graphs), _config(args), models)
    with open(args.out, "wb") as sink:
        write_results(results, sink)
    for service, result in sorted(results.items()):
        log.info("[CORRELATE]  %s assigned=%d unassigned=%d uncorrelatable=%d degraded=%s", service,
                 len(result.assignments), len(result.unassigned), len(result.uncorrelatable), result.degraded)
    return 0


def run_reconstruct(args):
    spans = _read_spans(args.spans)
    with open(args.results, "rb") as source:
        results = read_results(source)
    graph = reconstruct(spans, results)
    if args.out:
        with open(args.out, "wb") as sink:
            write_spans(graph.spans(), sink)
    if args.tree:
        sys.stdout.write(render_tree(graph, args.tree, args.tz))
    if args.truth:
        with open(args.truth, "r", encoding="utf-8") as stream:
            accuracy = trace_accuracy(graph, load_ground_truth(stream))
        sys.stdout.write("span_level=%.4f trace_level=%.4f overhead_rate=%.4f\n" % accuracy)
    return 0


def bench(args):
    fixed = DEFAULT_FIXED_THRESHOLD_US if args.fixed_threshold_us is None else args.fixed_threshold_us
    spec = ExperimentSpec(args.preset, _csv_list(args.levels, int), range(args.seeds),
                          _csv_list(args.algorithms), args.threshold_mode, fixed, args.requests,
                          _config(args, fixed=False))
    skipped = []
    rows = run_experiment(spec, skipped, workers=args.workers)
    for key, reason in skipped:
        log.warning("[BENCH]  skipped %s: %s", key, reason)
    data = report(rows, args.format)
    if args.out:
        with open(args.out, "wb") as sink:
            sink.write(data)
    else:
        sys.stdout.write(data.decode("utf-8"))
    return 0


def _add_correlator_options(parser):
    parser.add_argument("--delta", type=float, help="threshold multiple of the mean delay")
    parser.add_argument("--diff-threshold", dest="diff_threshold", type=float,
                        help="relative deviation gap separating high from low certainty")
    parser.add_argument("--fixed-threshold", dest="fixed_threshold_us", type=float,
                        help="one delay threshold in microseconds for every position")
    parser.add_argument("--multi-candidate", dest="multi_candidate", action="store_true",
                        help="emit near-top candidates as well")
    parser.add_argument("--multi-candidate-quantile", dest="multi_candidate_quantile", type=float,
                        help="only emit extra candidates for ingress spans above this duration quantile")
    parser.add_argument("--min-fit-samples", dest="min_fit_samples", type=int,
                        help="fewest high-certainty delays a position is fitted from")
    parser.add_argument("--ks-alpha", dest="ks_alpha", type=float,
                        help="Kolmogorov-Smirnov significance below which a family is rejected")
    parser.add_argument("--gmm-max-components", dest="gmm_max_components", type=int,
                        help="largest Gaussian mixture tried")


def build_parser():
    parser = ArgumentParser(prog=package, description="Correlate spans across threads and services.")
    parser.add_argument("--version", action="version", version=get_user_agent())
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log progress (twice for debug)")
    parser.add_argument("--tags", help="only log records with these tags, e.g. FIT,ASSIGN")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    sub = commands.add_parser("simulate", help="simulate a workload")
    source = sub.add_mutually_exclusive_group()
    source.add_argument("--preset", choices=preset_names(), default="frontend")
    source.add_argument("--spec", help="workload YAML file")
    sub.add_argument("--requests", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--concurrency", type=int, help="retime to this concurrency level")
    sub.add_argument("--out-dir", dest="out_dir", required=True)
    sub.set_defaults(func=simulate)

    sub = commands.add_parser("build-spans", help="fold an event stream into spans")
    sub.add_argument("--events", required=True)
    sub.add_argument("--services", required=True, help="YAML file of pid and address maps")
    sub.add_argument("--propagate", action="store_true", help="propagate span ids across services first")
    sub.add_argument("--out", required=True)
    sub.set_defaults(func=build)

    sub = commands.add_parser("fit", help="fit and cache delay models")
    sub.add_argument("--spans", required=True)
    sub.add_argument("--call-graphs", "--call-graph", dest="call_graphs", required=True)
    sub.add_argument("--out", required=True)
    _add_correlator_options(sub)
    sub.set_defaults(func=fit)

    sub = commands.add_parser("correlate", help="correlate ingress and egress spans")
    sub.add_argument("--spans", required=True)
    sub.add_argument("--call-graphs", "--call-graph", dest="call_graphs", required=True)
    sub.add_argument("--models", help="cached delay models")
    sub.add_argument("--out", required=True)
    _add_correlator_options(sub)
    sub.set_defaults(func=run_correlate)

    sub = commands.add_parser("reconstruct", help="assemble traces")
    sub.add_argument("--spans", required=True)
    sub.add_argument("--results", required=True)
    sub.add_argument("--truth", help="ground truth to score against")
    sub.add_argument("--tree", help="print the tree of this trace id")
    sub.add_argument("--tz", default="UTC")
    sub.add_argument("--out", help="labelled spans")
    sub.set_defaults(func=run_reconstruct)

    sub = commands.add_parser("bench", help="run an experiment grid")
    sub.add_argument("--preset", choices=preset_names(), default="frontend")
    sub.add_argument("--levels", default="250,500,750,1000,1250,1500")
    sub.add_argument("--seeds", type=int, default=1, help="number of seeds, counting from 0")
    sub.add_argument("--algorithms", default=GREEDY,
                     help="some of %s" % ", ".join(ALGORITHMS + tuple(ALGORITHM_ALIASES)))
    sub.add_argument("--threshold-mode", dest="threshold_mode", choices=(ADAPTIVE, FIXED), default=ADAPTIVE)
    sub.add_argument("--requests", type=int)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--format", choices=FORMATS + tuple(FORMAT_ALIASES), default=CSV)
    sub.add_argument("--out")
    _add_correlator_options(sub)
    sub.set_defaults(func=bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        watch("tracelink", level=DEBUG if args.verbose > 1 else INFO, out=sys.stderr,
              tags=_csv_list(args.tags) if args.tags else None)
    try:
        return args.func(args)
    except (TracelinkError, OSError) as error:
        log.debug("[CLI]  %s failed", args.command, exc_info=True)
        sys.stderr.write("%s: error: %s\n" % (package, error))
        return 1
