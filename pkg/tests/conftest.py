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

"""Shared fixtures; the modules live at the repository root."""

import os
import sys
import numpy as np
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def single_delta():
    from potentials import parse_potential  # pylint: disable=C0415
    return parse_potential('delta:site=0,amp=3')


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    """Runs a test inside an empty directory."""
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    """Keeps parallel helpers in-process unless a test asks otherwise."""
    monkeypatch.setenv('CLR_LAB_THREADS', '1')
