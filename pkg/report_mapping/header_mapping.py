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


"""Loads the verification workbook mappings from JSON files.

This module parses the sheet headers, info blocks and summary layout of
the verification workbook. The `parse_json` utility function is used for
parsing the JSON data.
"""

import os
from utils import parse_json  # pylint: disable=E0401

MAPPING_DIR = os.path.join(os.path.dirname(os.path.dirname(
    os.path.abspath(__file__))), 'report_mapping_json')

suite_sheet_mapping = parse_json(os.path.join(MAPPING_DIR, 'suite_sheet.json'))
violations_mapping = parse_json(os.path.join(MAPPING_DIR, 'violations.json'))
report_summary = parse_json(os.path.join(MAPPING_DIR, 'report_summary.json'))
