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


from abc import ABCMeta
from collections.abc import Mapping
from math import log

from tracelink.exceptions import (
    ConfigurationError,
)


def iter_items(iterable):
    """ Iterate through all items (key-value pairs) within an iterable
    dictionary-like object. If the object has a `keys` method, this is
    used along with `__getitem__` to yield each pair in turn. If no
    `keys` method exists, each iterable element is assumed to be a
    2-tuple of key and value.
    """
    if hasattr(iterable, "keys"):
        for key in iterable.keys():
            yield key, iterable[key]
    else:
        for key, value in iterable:
            yield key, value


class ConfigAlias:
    """ Alternative name for a config field. Values supplied under the
    alias are stored on the target field.
    """

    def __init__(self, target):
        self.target = target


class ConfigType(ABCMeta):

    def __new__(mcs, name, bases, attributes):
        fields = []
        aliases = {}

        for base in bases:
            if type(base) is mcs:
                fields += base.keys()
                aliases.update(base._aliases())

        for k, v in attributes.items():
            if isinstance(v, ConfigAlias):
                aliases[k] = v.target
            elif not k.startswith("_") and not callable(v) and not isinstance(v, (classmethod, staticmethod, property)):
                fields.append(k)

        def keys(_):
            return fields

        def _aliases(_):
            return aliases

        attributes.setdefault("keys", classmethod(keys))
        attributes.setdefault("_aliases", classmethod(_aliases))

        return super(ConfigType, mcs).__new__(mcs, name, bases,
                                              {k: v for k, v in attributes.items()
                                               if k not in aliases})


class Config(Mapping, metaclass=ConfigType):
    """ Base class for all configuration containers.

    Fields are declared as class attributes carrying their defaults.
    Instances validate themselves after every construction.
    """

    @staticmethod
    def consume_chain(data, *config_classes):
        values = []
        for config_class in config_classes:
            if not issubclass(config_class, Config):
                raise TypeError("%r is not a Config subclass" % config_class)
            values.append(config_class._consume(data))
        if data:
            raise ConfigurationError("Unexpected config keys: %s" % ", ".join(data.keys()))
        return values

    @classmethod
    def consume(cls, data):
        config, = cls.consume_chain(data, cls)
        return config

    @classmethod
    def _consume(cls, data):
        config = {}
        if data:
            for key in list(cls.keys()) + list(cls._aliases()):
                try:
                    value = data.pop(key)
                except KeyError:
                    pass
                else:
                    config[key] = value
        return cls(config)

    def __update(self, data):
        data_dict = dict(iter_items(data))
        aliases = self._aliases()

        for key, value in data_dict.items():
            if value is None:
                continue
            if key in aliases:
                target = aliases[key]
                if data_dict.get(target) is not None:
                    raise ConfigurationError("Cannot specify both '{}' and '{}' in config".format(target, key))
                key = target
            if key not in self.keys():
                raise ConfigurationError("Unknown config key: %s" % key)
            setattr(self, key, value)

    def __init__(self, *args, **kwargs):
        for arg in args:
            self.__update(arg)
        self.__update(kwargs)
        self._validate()

    def _validate(self):
        """ Hook for subclasses; raise :class:`.ConfigurationError` on
        values outside the valid range.
        """

    def replace(self, **changes):
        """ Return a copy of this config with some fields changed. Unlike
        construction, a change to :const:`None` clears the field.
        """
        data = dict(self)
        data.update(changes)
        config = type(self)(data)
        cleared = [key for key, value in changes.items() if value is None and key in self.keys()]
        if cleared:
            for key in cleared:
                setattr(config, key, None)
            config._validate()
        return config

    def __repr__(self):
        attrs = []
        for key in self:
            attrs.append(" %s=%r" % (key, getattr(self, key)))
        return "<%s%s>" % (self.__class__.__name__, "".join(attrs))

    def __len__(self):
        return len(self.keys())

    def __getitem__(self, key):
        return getattr(self, key)

    def __iter__(self):
        return iter(self.keys())


class FitConfig(Config):
    """ Delay distribution fitting configuration.
    """

    #: Minimum sample size accepted by a fit
    min_fit_samples = 30

    #: Kolmogorov-Smirnov p-value below which a parametric family is rejected
    ks_alpha = 0.05

    #: Largest mixture size tried by the GMM fallback
    gmm_max_components = 20

    #: Random restarts of EM per mixture size
    gmm_restarts = 10

    #: EM iteration cap
    gmm_max_iter = 200

    #: EM relative log-likelihood improvement considered converged
    gmm_tol = 1e-6

    #: Stop scanning mixture sizes after this many BICs in a row fail to
    #: improve; None scans every size up to gmm_max_components.
    gmm_patience = 3

    #: Floor applied to every log-density term
    density_floor = -700.0

    #: Seed for EM restarts
    seed = 0

    def _validate(self):
        if int(self.min_fit_samples) < 2:
            raise ConfigurationError("min_fit_samples must be at least 2")
        if not 0.0 < float(self.ks_alpha) < 1.0:
            raise ConfigurationError("ks_alpha must lie in (0, 1)")
        if not 1 <= int(self.gmm_max_components):
            raise ConfigurationError("gmm_max_components must be positive")
        if int(self.gmm_restarts) < 1 or int(self.gmm_max_iter) < 1:
            raise ConfigurationError("gmm_restarts and gmm_max_iter must be positive")
        if self.gmm_patience is not None and int(self.gmm_patience) < 1:
            raise ConfigurationError("gmm_patience must be positive or None")


class CorrelatorConfig(FitConfig):
    """ Cross-thread correlation configuration.
    """

    #: Scaling factor of the adaptive threshold, T_k = delta * mu_k
    delta = 4.0

    #: Minimum CDS gap ratio of a high-certainty ingress span
    diff_threshold = 0.2

    #: Goodness-of-fit gate forwarded to the fitter
    pdf_gate = ConfigAlias("ks_alpha")

    #: Use one threshold (in microseconds) for every position instead of delta * mu_k
    fixed_threshold_us = None

    #: Threshold used for a position whose estimated mean delay is not positive
    mean_floor_us = 1000.0

    #: Emit every near-top candidate, duplicating contested egress spans
    multi_candidate = False

    #: PDS distance from the top candidate within which extra candidates are emitted
    multi_candidate_margin = log(2)

    #: Only emit extra candidates for ingress spans at or above this duration quantile
    multi_candidate_quantile = None

    #: Candidates kept per ingress span, smallest total delay first
    max_candidates_per_ingress = 1000

    #: Largest conflict component resolved by exhaustive search
    exhaustive_cap = 12

    #: Search nodes allowed per conflict component before falling back
    resolution_node_limit = 200000

    def _validate(self):
        super()._validate()
        if not float(self.delta) > 0.0:
            raise ConfigurationError("delta must be positive")
        if not 0.0 < float(self.diff_threshold) < 1.0:
            raise ConfigurationError("diff_threshold must lie in (0, 1)")
        if self.fixed_threshold_us is not None and not float(self.fixed_threshold_us) > 0.0:
            raise ConfigurationError("fixed_threshold_us must be positive")
        if not float(self.mean_floor_us) > 0.0:
            raise ConfigurationError("mean_floor_us must be positive")
        if float(self.multi_candidate_margin) < 0.0:
            raise ConfigurationError("multi_candidate_margin must not be negative")
        q = self.multi_candidate_quantile
        if q is not None and not 0.0 <= float(q) <= 1.0:
            raise ConfigurationError("multi_candidate_quantile must lie in [0, 1]")
        if int(self.max_candidates_per_ingress) < 1:
            raise ConfigurationError("max_candidates_per_ingress must be positive")
        if int(self.exhaustive_cap) < 1:
            raise ConfigurationError("exhaustive_cap must be positive")

    @property
    def fit_config(self):
        """ The fitting subset of this configuration.
        """
        return FitConfig().replace(**{key: self[key] for key in FitConfig.keys()})
