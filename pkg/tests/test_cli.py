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
import os
import math
import pytest

import main


def run(capsys, *argv):
    code = main.main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if code == 0 and out else None)


def test_count_single_delta(capsys):
    code, data = run(capsys, 'count', '--family', 'lattice1d',
                     '--potential', 'delta:site=0,amp=3', '--box', '64',
                     '--eigenvalues')
    assert code == 0
    assert data['command'] == 'count'
    assert data['result']['n0'] == 1
    assert data['result']['eigenvalues'][0] == pytest.approx(
        -(math.sqrt(13) - 2), rel=1e-8)


def test_count_zero_potential(capsys):
    code, data = run(capsys, 'count', '--family', 'lattice2d',
                     '--potential', 'zero', '--box', '6')
    assert code == 0
    assert data['result']['n0'] == 0


def test_missing_required_option(capsys):
    code = main.main(['count', '--family', 'lattice1d',
                      '--potential', 'zero'])
    assert code == 2
    assert 'missing required options' in capsys.readouterr().err


def test_malformed_flag_is_a_usage_error(capsys):
    assert main.main(['count', '--box', 'wide']) == 2
    assert main.main(['bound', '--x0s', '1,a']) == 2
    capsys.readouterr()


def test_domain_error_exit_code(capsys):
    code = main.main(['count', '--family', 'lattice1d', '--box', '8',
                      '--potential', 'delta:site=0,amp=-1'])
    assert code == 2
    assert 'error:' in capsys.readouterr().err


def test_canonical_output_is_byte_identical(capsys):
    argv = ['bound', '--bound', 'bargmann_1d', '--family', 'lattice1d',
            '--potential', 'delta:site=4,amp=3', '--canonical']
    assert main.main(argv) == 0
    first = capsys.readouterr().out
    assert main.main(argv) == 0
    assert capsys.readouterr().out == first
    assert json.loads(first)['timestamp'] is None


def test_bound_compared_with_exact_count(capsys):
    code, data = run(capsys, 'bound', '--bound', 'bargmann_1d',
                     '--family', 'lattice1d', '--potential',
                     'delta:site=4,amp=3', '--box', '64')
    assert code == 0
    assert data['result']['value'] == pytest.approx(13)
    assert data['result']['comparison']['exact_count'] == 1
    assert data['result']['comparison']['dominates']


def test_config_file_beneath_flags(capsys, tmp_path):
    config = tmp_path / 'run.properties'
    config.write_text('[inputs]\nfamily=lattice1d\n'
                      'potential=delta:site=0,amp=3\nbox=32\n')
    code, data = run(capsys, 'count', '--config', str(config))
    assert code == 0
    assert data['result']['n0'] == 1
    code, data = run(capsys, 'count', '--config', str(config),
                     '--potential', 'zero')
    assert data['result']['n0'] == 0


def test_missing_config_file(capsys, tmp_path):
    code = main.main(['count', '--config', str(tmp_path / 'none.properties')])
    assert code == 2
    capsys.readouterr()


def test_kernel_negative_values(capsys):
    code, data = run(capsys, 'kernel', '--family', 'p_alpha',
                     '--alpha', '1.5', '--t', '1')
    assert code == 0
    assert data['result']['negative_values'] > 0


def test_kernel_resolvent_cross_checks(capsys):
    code, data = run(capsys, 'kernel', '--family', 'lattice2d_quadrature',
                     '--lambdas', '1,0.01', '--range', '2')
    assert code == 0
    result = data['result']
    assert result['mismatches'] == []
    assert result['violations'] == 0
    assert result['regularized_limit']['(1, 0)']['extrapolated'] == \
        pytest.approx(0.5, abs=1e-3)
    assert 0.0 < result['hitting']['0.01']['(2, 0)'] < 1.0


def test_sparse_delta_witness(capsys):
    code, data = run(capsys, 'witness', '--family', 'sparse_delta',
                     '--check-inertia')
    assert code == 0
    result = data['result']
    assert result['certified_count'] == 4
    assert result['potential_sum'] == pytest.approx(0.9375)
    assert result['inertia_count'] >= 4


def test_unknown_suite(capsys):
    assert main.main(['verify', '--suite', 'quantum', '--seed', '1']) == 2
    capsys.readouterr()


def test_verify_then_report(capsys, workdir):
    code, data = run(capsys, 'verify', '--suite', 'bargmann1d', '--n', '2',
                     '--seed', '3', '--workers', '1', '--output-dir', 'out')
    assert code == 0
    assert data['seed'] == 3
    assert data['result']['passed']
    assert os.path.exists(os.path.join('out', 'verify_bargmann1d.json'))
    code, data = run(capsys, 'report', '--input-dir', 'out',
                     '--output-dir', 'out')
    assert code == 0
    assert os.path.exists(data['result']['workbook'])
    assert data['result']['suites'] == {'bargmann1d': True}


def test_report_needs_outputs_or_seed(capsys, workdir):
    assert main.main(['report', '--input-dir', 'empty']) == 2
    capsys.readouterr()


def test_kernel_bessel_slope(capsys):
    code, data = run(capsys, 'kernel', '--family', 'p_bessel', '--d', '1.5',
                     '--boundary', 'dirichlet', '--t', '1e7')
    assert code == 0
    assert data['result']['diagonal_slopes']['10000000.0'] == pytest.approx(
        1.0, abs=1e-3)


def test_lieb_thirring_against_exact_sum(capsys):
    code, data = run(capsys, 'lt', '--gamma', '1', '--Lambda', '4',
                     '--potential', 'constant_on_set:radius=1,value=4',
                     '--box', '20', '--step', '0.02')
    assert code == 0
    result = data['result']
    assert result['exact'] > 0
    assert 'rebarg11' in result['bounds']
    for report in result['bounds'].values():
        assert report['value'] >= result['exact']


def test_sweep_writes_tables(capsys, workdir):
    code, data = run(capsys, 'sweep', '--family', 'lattice1d',
                     '--schedule', '32,48', '--potentials',
                     'delta:site=0,amp=3 zero', '--scales', '1,2',
                     '--bounds', 'bargmann_1d', '--output', 'sweep.json',
                     '--csv', 'sweep.csv')
    assert code == 0
    rows = data['result']['rows']
    assert [r['n0'] for r in rows] == [1, 1, 0, 0]
    assert all(r['bounds']['bargmann_1d']['value'] >= r['n0'] for r in rows)
    assert os.path.exists('sweep.json')
    assert os.path.exists('sweep.csv')


def test_sweep_needs_increasing_schedule(capsys):
    assert main.main(['sweep', '--family', 'lattice1d', '--schedule',
                      '48,32', '--potentials', 'zero']) == 2
    capsys.readouterr()
