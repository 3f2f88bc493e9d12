#!/usr/bin/env python3
"""
Tests for the JSON API
"""

import json
from pathlib import Path

import pytest

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


def example(name):
    return json.loads((INSTANCES / f"{name}.json").read_text())


def test_health(client):
    """Test that the health endpoint answers"""
    response = client.get('/api/v1/health')
    assert response.status_code == 200
    assert response.json['status'] == 'success'


def test_app_config(app):
    """Test basic app configuration"""
    assert app.config['SECRET_KEY'] is not None
    assert app.config['ORACLE_MAX_MESSAGES'] == 8


def test_validate(client):
    response = client.post('/api/v1/validate', json=example('ex_a'))
    assert response.status_code == 200
    assert response.json['data']['num_senders'] == 4


def test_validate_rejects_bad_instance(client):
    response = client.post('/api/v1/validate', json={'num_messages': 2, 'senders': [[1]], 'wants': [[2], [1]]})
    assert response.status_code == 400
    assert response.json['status'] == 'error'


def test_validate_rejects_missing_body(client):
    response = client.post('/api/v1/validate', data='nope', content_type='text/plain')
    assert response.status_code == 400


def test_report(client):
    response = client.post('/api/v1/report?oracle=true', json=example('ex_a'))
    assert response.status_code == 200
    data = response.json['data']
    assert (data['lower_bound'], data['oracle']['length'], data['upper_bound']) == (4, 4, 5)
    assert data['certified']


def test_bound_and_code(client):
    bound = client.post('/api/v1/bound', json=example('ex_c')).json['data']
    assert bound['lower_bound'] == 2
    code = client.post('/api/v1/code', json=example('ex_c')).json['data']
    assert code['blueprint']['uncoded'] == [1, 2]


@pytest.mark.parametrize('endpoint', ['simplify', 'classify', 'oracle'])
def test_pipeline_endpoints(client, endpoint):
    response = client.post(f'/api/v1/{endpoint}', json=example('ex_b'))
    assert response.status_code == 200


def test_oracle_certified(client):
    """Test that the oracle reports whether it meets the lower bound"""
    response = client.post('/api/v1/oracle', json=example('ex_a'))
    data = response.json['data']
    assert data['length'] == 4
    assert data['certified'] is True


def test_verify(client):
    code = {'rows': [{'sender': 1, 'coeffs': [1, 0]}, {'sender': 2, 'coeffs': [0, 1]}]}
    response = client.post('/api/v1/verify?exhaustive=1', json={'instance': example('ex_c'), 'code': code})
    assert response.status_code == 200
    assert response.json['data']['decodable']
    assert response.json['data']['exhaustive']


def test_verify_rejects_unowned_row(client):
    code = [{'sender': 1, 'coeffs': [1, 1]}]
    response = client.post('/api/v1/verify', json={'instance': example('ex_c'), 'code': code})
    assert response.status_code == 400


def test_oracle_guard(client, monkeypatch):
    monkeypatch.setattr('msic.config.Config.ORACLE_MAX_MESSAGES', 3)
    response = client.post('/api/v1/oracle', json=example('ex_a'))
    assert response.status_code == 413


def test_dot(client):
    response = client.post('/api/v1/dot', json=example('ex_c'))
    assert response.status_code == 200
    assert response.mimetype == 'text/vnd.graphviz'
    assert b'digraph' in response.data
