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

import json
import math
import numpy as np
import pytest

import utils
from errors import ValidationError


def test_serialize_report_canonical():
    result = {'value': math.inf, 'n0': np.int64(3), 'x': np.float64(0.1)}
    text = utils.serialize_report('bound', {'b': 1, 'a': 2}, result,
                                  seed=7, canonical=True)
    assert text == utils.serialize_report('bound', {'a': 2, 'b': 1}, result,
                                          seed=7, canonical=True)
    data = utils.parse_report(text)
    assert data['timestamp'] is None
    assert data['schema_version'] == utils.SCHEMA_VERSION
    assert data['result']['value'] == math.inf
    assert data['result']['x'] == 0.1
    assert '"value": Infinity' in text


def test_serialize_report_keeps_timestamp():
    data = json.loads(utils.serialize_report('count', {}, {}))
    assert data['timestamp']


def test_to_jsonable():
    data = utils.to_jsonable({1: (np.arange(2), np.bool_(True))})
    assert data == {'1': [[0, 1], True]}


def test_flatten():
    flat = utils.flatten({'a': {'b': 1, 'c': [1, 2]}, 'd': 'x'})
    assert flat == {'a.b': 1, 'a.c': '[1, 2]', 'd': 'x'}


def test_write_table_csv(tmp_path):
    target = tmp_path / 'table.csv'
    utils.write_table_csv(str(target), [{'a': 1}, {'a': 2, 'b': {'c': 3}}])
    lines = target.read_text().splitlines()
    assert lines == ['a,b.c', '1,', '2,3']


def test_worker_count_respects_environment(monkeypatch):
    monkeypatch.setenv('CLR_LAB_THREADS', '2')
    assert 1 <= utils.worker_count() <= 2
    monkeypatch.setenv('CLR_LAB_THREADS', 'many')
    assert utils.worker_count() >= 1


def test_backend_config():
    backend = utils.load_backend_config()
    assert backend.getint('numerics', 'EIGEN_CAP') == 5000
    assert backend.get('report', 'WORKBOOK_NAME').endswith('.xlsx')


def test_parse_config_missing_file(tmp_path):
    with pytest.raises(ValidationError):
        utils.parse_config(str(tmp_path / 'absent.properties'))


def test_finite_or_inf():
    assert utils.finite_or_inf(float('nan')) == math.inf
    assert utils.finite_or_inf(2) == 2.0


def test_run_parallel_keeps_order():
    assert utils.run_parallel(abs, [-3, -1, -2], workers=2) == [3, 1, 2]
    assert utils.run_parallel(abs, [-3, -1], workers=1) == [3, 1]


def test_run_parallel_returns_failures():
    results = utils.run_parallel(int, ['1', 'x'], workers=1, max_retries=0)
    assert results[0] == 1
    assert isinstance(results[1], ValueError)


def test_json_files(tmp_path):
    target = str(tmp_path / 'data.json')
    assert utils.write_json(target, {'a': np.float64(1.5)})
    assert utils.parse_json(target) == {'a': 1.5}
    assert utils.parse_json(str(tmp_path / 'none.json')) == {}
    assert utils.list_dir(str(tmp_path)) == ['data.json']
    assert utils.list_dir(str(tmp_path / 'none'), isok=True) == []
