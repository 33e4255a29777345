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

import logging

import base_logger


def test_file_handler_writes_plain_records(tmp_path):
    path = tmp_path / 'run.log'
    handler = base_logger.build_handler('File', str(path))
    record = logging.LogRecord('ClrLab', logging.WARNING, __file__, 1,
                               'box too small', None, None)
    handler.emit(record)
    handler.close()
    text = path.read_text()
    assert 'ClrLab[MainProcess] - WARNING - box too small' in text
    assert '\x1b[' not in text


def test_colour_only_wraps_the_record():
    formatter = base_logger.LevelColourFormatter('%(message)s')
    record = logging.LogRecord('ClrLab', logging.ERROR, __file__, 1,
                               'failed', None, None)
    assert formatter.format(record) == '\x1b[31;20mfailed\x1b[0m'


def test_logger_has_one_handler():
    assert base_logger.logger.name == 'ClrLab'
    assert len(base_logger.logger.handlers) == 1
