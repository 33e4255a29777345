#!/usr/bin/python

# Copyright 2025 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License


"""Loads the verification suite definitions from JSON files.

Each suite names the operator family, the seeded potential kinds, the box
schedule and the bounds whose dominance is checked. The parsed mappings
are collected in `suites`, keyed by suite name.
"""

import os
from utils import parse_json  # pylint: disable=E0401

SUITE_DIR = os.path.join(os.path.dirname(os.path.dirname(
    os.path.abspath(__file__))), 'suite_mapping_json')
SUITE_NAMES = ('bargmann1d', 'lattice2d', 'fractional', 'bessel',
               'continuum1d', 'lt1d')

suites = {name: parse_json(os.path.join(SUITE_DIR, f'{name}.json'))
          for name in SUITE_NAMES}
