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

import math
import zipfile

from verification_report import VerificationReport


def _summary(violations):
    record = {'index': 0, 'potential': {'family': 'delta'}, 'case': {},
              'exact': 1, 'converged': True, 'violations': violations,
              'bounds': {'bargmann_1d': {'value': 13.0, 'status': 'certified',
                                         'exact': 1},
                         'barggen': {'value': math.inf, 'status': 'certified',
                                     'exact': 1},
                         'clr_lattice1d': {'value': None, 'status': 'skipped',
                                           'exact': 1}}}
    return {'suite': 'bargmann1d', 'instances': 1, 'records': [record],
            'violations': [dict(v, index=0, potential=record['potential'])
                           for v in violations]}


def test_workbook_sheets(tmp_path):
    target = str(tmp_path / 'report.xlsx')
    report = VerificationReport(target, {
        'bargmann1d': _summary([]),
        'fractional': _summary([{'bound': 'barggen', 'value': 0.5,
                                 'exact': 1}])})
    report.write()
    report.close()
    with zipfile.ZipFile(target) as archive:
        workbook = archive.read('xl/workbook.xml').decode()
        strings = archive.read('xl/sharedStrings.xml').decode()
    for sheet in ('Verification Summary', 'bargmann1d', 'fractional',
                  'Violations'):
        assert f'name="{sheet}"' in workbook
    assert 'barggen' in strings
